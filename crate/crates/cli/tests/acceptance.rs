//! Acceptance suite. Runs without the libtest harness so that the
//! PASS/FAIL line of every criterion is always printed.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use eigenratio::concentration::{cheng_classical_check, cheng_dimension_free_check, obs_diameter_lower};
use eigenratio::graph::{Edge, MeasuredGraph};
use eigenratio::improved_cheeger::{build_thresholds, functional_certificate, step_error_bound_check};
use eigenratio::isoperimetry::{
    buser_ledoux_check, h1_exact, h1_sweep_upper, higher_buser_ledoux_check, hk_bruteforce, hk_spectral_heuristic,
    model_h1, H1Estimate, H1Source,
};
use eigenratio::model_spaces::{
    circle_exact_spectrum, circle_graph, grid_cos_mode, grid_spectrum, torus_exact_spectrum, ModelSpace, TorusSpec,
};
use eigenratio::report::InequalityReport;
use eigenratio::spectra::{compute_spectrum, Method};
use eigenratio::verify::{optimality_scan, ratio_bound_check};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
/// Label, graph, dense spectrum and test function.
type Run = (String, MeasuredGraph<f64>, eigenratio::Spectrum64, Vec<f64>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

fn all_pass(reports: &[InequalityReport]) -> Result<(), String> {
    match reports.iter().find(|r| !r.passed()) {
        Some(r) => Err(format!("{} k={:?}: lhs {} rhs {} ({})", r.name, r.k, r.lhs, r.rhs, r.note)),
        None => Ok(()),
    }
}

fn torus(n: usize, a: f64, counts: &[usize]) -> ModelSpace<f64> {
    ModelSpace::Torus(TorusSpec::with_counts(n, a, counts).unwrap())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let exact = circle_exact_spectrum(std::f64::consts::TAU, 10);
    let expected = [0.0, 1.0, 1.0, 4.0, 4.0, 9.0, 9.0, 16.0, 16.0, 25.0, 25.0];
    ensure(exact.eigenvalues == expected, || format!("exact spectrum {:?}", exact.eigenvalues))?;
    let g = circle_graph(std::f64::consts::TAU, 512).map_err(|e| e.to_string())?;
    let s = compute_spectrum(&g, 10, Method::Auto).map_err(|e| e.to_string())?;
    let worst = (1..=10).map(|k| (s.lambda(k) / expected[k] - 1.0).abs()).fold(0.0, f64::max);
    ensure(worst <= 0.005, || format!("worst relative error {worst}"))?;
    within(start, Duration::from_secs(5))?;
    Ok(format!("worst relative error {worst:.2e} at N=512 in {:.2?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let s = torus_exact_spectrum::<f64>(2, 0.5, 9).map_err(|e| e.to_string())?;
    let pi2 = std::f64::consts::PI.powi(2);
    ensure((s.lambda(1) - pi2).abs() <= 1e-9 * pi2, || format!("lambda_1 = {}", s.lambda(1)))?;
    let ratio = s.lambda(9) / s.lambda(1);
    ensure((ratio - 16.0).abs() <= 1e-9 * 16.0, || format!("lambda_9/lambda_1 = {ratio}"))?;
    let row = &optimality_scan(2, &[0.5], 1 << 30).map_err(|e| e.to_string())?[0];
    ensure(row.k == 9 && row.ratio == 16.0 && row.lower_bound == 9.0, || format!("{row:?}"))?;
    all_pass(&row.reports("torus:n=2:a=0.5"))?;
    Ok(format!("lambda_1 = {}, lambda_9/lambda_1 = {ratio}, 16 >= 9", s.lambda(1)))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    let a_grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let mut spectra = Vec::new();
    for n in [2, 3] {
        for &a in &a_grid {
            spectra.push(torus_exact_spectrum::<f64>(n, a, 50).map_err(|e| e.to_string())?.eigenvalues);
        }
    }
    for &a in &a_grid {
        spectra.push(circle_exact_spectrum(a, 50).eigenvalues);
    }
    for eigs in &spectra {
        for k in 1..=50 {
            let r = ratio_bound_check(eigs, k).map_err(|e| e.to_string())?;
            all_pass(std::slice::from_ref(&r))?;
            worst = worst.max(r.lhs / r.rhs);
            checked += 1;
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{checked} ratios, largest lhs/rhs {worst:.4}, {:.2?}", start.elapsed()))
}

/// Graphs, dense spectra and test functions for the certificate runs.
fn certificate_runs() -> Result<Vec<Run>, String> {
    let models = [
        ModelSpace::Circle { a: std::f64::consts::TAU, points: 256 },
        ModelSpace::Circle { a: 1.0, points: 256 },
        torus(2, 0.5, &[16, 64]),
    ];
    models
        .iter()
        .map(|m| {
            let g = m.graph(100_000).map_err(|e| e.to_string())?;
            let s = compute_spectrum(&g, 8, Method::Dense).map_err(|e| e.to_string())?;
            let f = s.eigenfunctions[1].iter().map(|&x| x.max(0.0)).collect();
            Ok((m.label(), g, s, f))
        })
        .collect()
}

fn criterion_4(runs: &[Run], elapsed: Duration) -> Outcome {
    let start = Instant::now();
    let mut tightest: f64 = 0.0;
    for (label, g, s, f) in runs {
        for k in 1..=8 {
            let cert = functional_certificate(g, f, k, s).map_err(|e| format!("{label} k={k}: {e}"))?;
            ensure(cert.holds(), || format!("{label} k={k}: phi {} > {}", cert.phi_f, cert.rhs))?;
            tightest = tightest.max(cert.phi_f / cert.rhs);
        }
    }
    let total = elapsed + start.elapsed();
    ensure(total < Duration::from_secs(60), || format!("took {total:.2?}"))?;
    Ok(format!("{} runs x k=1..8, largest phi/rhs {tightest:.4}, {total:.2?}", runs.len()))
}

/// Overshoot for each `k = 1..=8` on the positive part of the first
/// cosine mode along the last axis, with the grid's own `λ_k`.
fn mode_overshoots(model: &ModelSpace<f64>) -> Result<Vec<f64>, String> {
    let g = model.graph(100_000).map_err(|e| e.to_string())?;
    let counts = model.counts();
    let f: Vec<f64> = grid_cos_mode::<f64>(&counts, counts.len() - 1, 1).iter().map(|&x| x.max(0.0)).collect();
    let lambdas = grid_spectrum(&counts, &model.spacings(), 8);
    (1..=8)
        .map(|k| {
            let a = build_thresholds(&g, &f, k, lambdas[k]).map_err(|e| e.to_string())?;
            all_pass(&[step_error_bound_check(&g, &f, &a, lambdas[k])])?;
            Ok(a.overshoot)
        })
        .collect()
}

fn criterion_5(runs: &[Run]) -> Outcome {
    for (label, g, s, f) in runs {
        for k in 1..=8 {
            let a = build_thresholds(g, f, k, s.lambda(k)).map_err(|e| format!("{label} k={k}: {e}"))?;
            all_pass(&[step_error_bound_check(g, f, &a, s.lambda(k))]).map_err(|e| format!("{label}: {e}"))?;
        }
    }
    let pairs = [
        (
            ModelSpace::Circle { a: std::f64::consts::TAU, points: 256 },
            ModelSpace::Circle { a: std::f64::consts::TAU, points: 512 },
        ),
        (torus(2, 0.5, &[16, 64]), torus(2, 0.5, &[32, 128])),
    ];
    let mut summary = Vec::new();
    for (coarse, fine) in &pairs {
        let (a, b) = (mode_overshoots(coarse)?, mode_overshoots(fine)?);
        let per_k: Vec<String> = a
            .iter()
            .zip(&b)
            .map(|(x, y)| if *x == 0.0 && *y == 0.0 { "0".into() } else { format!("{:.2}", x / y) })
            .collect();
        let (ma, mb) = (a.iter().cloned().fold(0.0, f64::max), b.iter().cloned().fold(0.0, f64::max));
        ensure(ma >= 2.0 * mb, || format!("{}: max overshoot {ma:.3e} -> {mb:.3e}", coarse.label()))?;
        summary.push(format!(
            "{}: max overshoot {ma:.3e} -> {mb:.3e} ({:.2}x; per k {})",
            coarse.label(),
            ma / mb,
            per_k.join(" ")
        ));
    }
    Ok(summary.join("; "))
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, unit: bool) -> MeasuredGraph<f64> {
    let mut pairs = BTreeSet::new();
    for v in 1..n {
        pairs.insert((rng.gen_range(0..v), v));
    }
    for _ in 0..rng.gen_range(0..=n) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    let edges = pairs
        .into_iter()
        .map(|(i, j)| {
            if unit {
                Edge::pure(i, j, 1.0)
            } else {
                Edge::new(i, j, rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0), None)
            }
        })
        .collect();
    let mu = if unit {
        vec![1.0 / n as f64; n]
    } else {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.iter().map(|x| x / total).collect()
    };
    MeasuredGraph::new(n, mu, edges).unwrap()
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(2..=50);
        let g = random_graph(&mut rng, n, false);
        for _ in 0..5 {
            let f: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..10.0) }).collect();
            let tv = g.total_variation(&f);
            let integral = g.coarea_integral(&f).map_err(|e| e.to_string())?;
            let rel = if tv > 0.0 { (tv - integral).abs() / tv } else { integral.abs() };
            ensure(rel <= 1e-10, || format!("relative gap {rel}"))?;
            worst = worst.max(rel);
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("100 functions on 20 graphs, worst relative gap {worst:.1e}, {:.2?}", start.elapsed()))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut comparisons = 0;
    for _ in 0..200 {
        let n = rng.gen_range(3..=8);
        let g = random_graph(&mut rng, n, true);
        let s = compute_spectrum(&g, 2, Method::Dense).map_err(|e| e.to_string())?;
        for k in [1, 2] {
            let (_, exact) = hk_bruteforce(&g, k).map_err(|e| e.to_string())?;
            let (_, heuristic) = hk_spectral_heuristic(&g, k, &s).map_err(|e| e.to_string())?;
            ensure(heuristic >= exact * (1.0 - 1e-12), || format!("k={k}: heuristic {heuristic} < exact {exact}"))?;
            comparisons += 1;
        }
        let (_, h1) = h1_exact(&g).map_err(|e| e.to_string())?;
        let (_, sweep) = h1_sweep_upper(&g, &s).map_err(|e| e.to_string())?;
        ensure(sweep >= h1 * (1.0 - 1e-12), || format!("sweep {sweep} < h1 {h1}"))?;
        comparisons += 1;
    }
    Ok(format!("{comparisons} comparisons on 200 unit-weight graphs, no violations"))
}

fn criterion_8() -> Outcome {
    let mut reports = Vec::new();
    for a in [0.5, 1.0, std::f64::consts::TAU, 10.0] {
        let exact = circle_exact_spectrum(a, 6);
        let h1 = H1Estimate { value: 4.0 / a, source: H1Source::ClosedForm };
        reports.push(buser_ledoux_check(&h1, exact.lambda(1)).map_err(|e| e.to_string())?);
        for k in 1..=6 {
            reports.push(higher_buser_ledoux_check(&h1, exact.lambda(k), k).map_err(|e| e.to_string())?);
        }
    }
    for (n, a, counts) in [(2, 0.5, vec![3, 4]), (2, 0.9, vec![3, 4]), (2, 0.7, vec![3, 3])] {
        let m = torus(n, a, &counts);
        let g = m.graph(100).map_err(|e| e.to_string())?;
        ensure(g.vertex_count() <= 12, || "coarse torus too large".into())?;
        let h1 = model_h1(&m, &g).map_err(|e| e.to_string())?;
        ensure(h1.source == H1Source::Enumerated, || "h1 not enumerated".into())?;
        let s = compute_spectrum(&g, 6.min(g.vertex_count() - 1), Method::Dense).map_err(|e| e.to_string())?;
        reports.push(buser_ledoux_check(&h1, s.lambda(1)).map_err(|e| e.to_string())?);
        for k in 1..s.len() {
            reports.push(higher_buser_ledoux_check(&h1, s.lambda(k), k).map_err(|e| e.to_string())?);
        }
    }
    all_pass(&reports)?;
    let margin = reports.iter().map(|r| r.lhs / r.rhs).fold(f64::INFINITY, f64::min);
    Ok(format!("{} lower bounds hold, smallest h1/bound {margin:.4}", reports.len()))
}

fn criterion_9(runs: &[Run]) -> Outcome {
    let mut reports = Vec::new();
    let a = std::f64::consts::TAU;
    let circle = ModelSpace::Circle { a, points: 256 };
    let exact = circle_exact_spectrum(a, 8);
    let k1 = cheng_classical_check(circle.diameter(), 1, exact.lambda(1), 1);
    all_pass(std::slice::from_ref(&k1))?;
    let margin = k1.slack / k1.rhs;
    ensure(margin <= 0.01, || format!("circle k=1 margin {margin}"))?;
    for k in 1..=8 {
        reports.push(cheng_classical_check(circle.diameter(), 1, exact.lambda(k), k));
    }
    for a in [0.3, 0.5, 0.9] {
        let t = torus(2, a, &[8, 8]);
        let exact = t.exact_spectrum(8, 1 << 30).map_err(|e| e.to_string())?;
        for k in 1..=8 {
            reports.push(cheng_classical_check(t.diameter(), 2, exact.lambda(k), k));
        }
    }
    for (label, g, s, _) in runs {
        let model = if label.starts_with("torus") { torus(2, 0.5, &[16, 64]) } else { circle.clone() };
        let extra: Vec<(String, Vec<f64>)> =
            model.coordinate_functions().into_iter().enumerate().map(|(i, f)| (format!("coordinate_{i}"), f)).collect();
        for kappa in [0.5, 0.1, 0.01] {
            let est = obs_diameter_lower(g, kappa, &extra).map_err(|e| e.to_string())?;
            for k in 1..=6 {
                reports.push(cheng_dimension_free_check(&est, s.lambda(k), k));
            }
        }
    }
    all_pass(&reports)?;
    Ok(format!("circle k=1 margin {:.3}% of rhs; {} further checks hold", 100.0 * margin, reports.len()))
}

fn run_verify_all(config: &Path, out: &Path) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_eigenratio"))
        .args(["verify-all", "--method", "dense", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())
}

fn criterion_10() -> Outcome {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut csvs = Vec::new();
    for run in ["first", "second"] {
        let out = tmp.path().join(run);
        let o = run_verify_all(&configs.join("circle_smoke.toml"), &out)?;
        ensure(o.status.success(), || format!("exit {:?}: {}", o.status, String::from_utf8_lossy(&o.stderr)))?;
        csvs.push(std::fs::read(out.join("summary.csv")).map_err(|e| e.to_string())?);
    }
    ensure(csvs[0] == csvs[1], || "CSV summaries differ between runs".into())?;
    let start = Instant::now();
    let out = tmp.path().join("full");
    let o = Command::new(env!("CARGO_BIN_EXE_eigenratio"))
        .args(["verify-all", "--config"])
        .arg(configs.join("torus_full.toml"))
        .arg("--out")
        .arg(&out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), || format!("torus_full exit {:?}: {}", o.status, String::from_utf8_lossy(&o.stderr)))?;
    within(start, Duration::from_secs(120))?;
    Ok(format!(
        "identical {}-byte CSVs; torus_full in {:.2?}: {}",
        csvs[0].len(),
        start.elapsed(),
        String::from_utf8_lossy(&o.stderr).trim()
    ))
}

fn main() {
    let start = Instant::now();
    let runs = certificate_runs();
    let setup = start.elapsed();
    let with_runs = |f: &dyn Fn(&[Run]) -> Outcome| match &runs {
        Ok(r) => f(r),
        Err(e) => Err(format!("setup failed: {e}")),
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("exact circle spectrum", criterion_1()),
        ("thin-torus optimality", criterion_2()),
        ("universal ratio bound", criterion_3()),
        ("functional certificates", with_runs(&|r| criterion_4(r, setup))),
        ("step approximation bound", with_runs(&criterion_5)),
        ("co-area identity", criterion_6()),
        ("oracle equivalence", criterion_7()),
        ("Buser-Ledoux lower bounds", criterion_8()),
        ("diameter bounds", with_runs(&criterion_9)),
        ("determinism", criterion_10()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed in {:.2?}", results.len() - failed, start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
