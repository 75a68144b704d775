//! Runs every check on every configured model and writes the reports.
//!
//! Each subcommand of the command-line tool maps onto one of the `*_reports`
//! functions here; [`run_suite`] is their union plus the global scans.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ModelConfig, ModelSource};
use super::{coarea_check, eigenfunction_split_check, optimality_scan, ratio_bound_check, weyl_diagnostic};
use crate::concentration::{cheng_classical_check, cheng_dimension_free_check, obs_diameter_lower};
use crate::error::{Error, Result};
use crate::graph::io::read_graph_file;
use crate::graph::MeasuredGraph;
use crate::improved_cheeger::{functional_certificate, higher_order_certificate, step_error_bound_check};
use crate::isoperimetry::{
    buser_ledoux_check, disjoint_functions_from_partition, h1_exact, h1_sweep_upper, higher_buser_ledoux_check,
    hk_bruteforce, hk_ratio_check, hk_spectral_heuristic, model_h1, H1Estimate, H1Source, H1_EXACT_CAP, HK_EXACT_CAP,
};
use crate::model_spaces::{torus_exact_spectrum_capped, ExactSpectrum, ModelSpace};
use crate::report::{InequalityReport, Status};
use crate::spectra::{compute_spectrum, Spectrum};

const COAREA_SEED: u64 = 0xc0a_4ea;

/// A model with its graph and spectra, shared by all checks on it.
pub struct Prepared {
    pub label: String,
    pub model: Option<ModelSpace<f64>>,
    pub graph: MeasuredGraph<f64>,
    /// Eigenpairs `0..=K` with `K = min(2·k_max, n − 1)`.
    pub spectrum: Spectrum<f64>,
    /// Continuum spectrum, for model spaces whose enumeration fits the cap.
    pub exact: Option<std::result::Result<ExactSpectrum<f64>, Error>>,
}

impl Prepared {
    pub fn new(source: &ModelSource, k_max: usize, config: &ExperimentConfig) -> Result<Self> {
        let (model, graph) = match source {
            ModelSource::Space(m) => (Some(m.clone()), m.graph(config.caps.vertices)?),
            ModelSource::File { path, .. } => (None, read_graph_file::<f64>(path)?),
        };
        let n = graph.vertex_count();
        let top = (2 * k_max).max(1).min(n.saturating_sub(1));
        if top == 0 {
            return Err(Error::KTooLarge { requested: 2, n });
        }
        let spectrum = compute_spectrum(&graph, top, config.method)?;
        let exact =
            model.as_ref().map(|m| m.exact_spectrum(config.caps.exact_spectrum, config.caps.enumeration as u128));
        Ok(Self { label: source.label(), model, graph, spectrum, exact })
    }

    /// Largest `k` with `λ_k` available on the graph.
    pub fn k_limit(&self) -> usize {
        self.spectrum.len() - 1
    }

    fn ks(&self, k_max: usize) -> std::ops::RangeInclusive<usize> {
        1..=k_max.min(self.k_limit())
    }

    fn exact(&self) -> Result<Option<&ExactSpectrum<f64>>> {
        match &self.exact {
            None => Ok(None),
            Some(Ok(e)) => Ok(Some(e)),
            Some(Err(e)) => Err(e.clone()),
        }
    }

    /// Positive part of the first nontrivial eigenfunction.
    pub fn test_function(&self) -> Vec<f64> {
        self.spectrum.eigenfunctions[1].iter().map(|&x| x.max(0.0)).collect()
    }

    fn tag(&self, reports: Vec<InequalityReport>) -> Vec<InequalityReport> {
        reports.into_iter().map(|r| r.with_model(self.label.clone())).collect()
    }
}

/// Runs `f`, turning a module error into a single ERROR row.
fn guarded(name: &str, f: impl FnOnce() -> Result<Vec<InequalityReport>>) -> Vec<InequalityReport> {
    f().unwrap_or_else(|e| vec![InequalityReport::error(name, e.to_string())])
}

/// Discrete eigenvalues against the continuum ones, with the eigenfunction
/// split check on `λ₁`.
pub fn spectrum_reports(p: &Prepared, k_max: usize, eigenvalue_rel: Option<f64>) -> Vec<InequalityReport> {
    let mut out = guarded("eigenvalue", || {
        let exact = p.exact()?;
        Ok(p.ks(k_max)
            .map(|k| {
                let discrete = p.spectrum.lambda(k);
                match exact.filter(|e| k < e.eigenvalues.len()) {
                    Some(e) => {
                        let target = e.lambda(k);
                        let rel = (discrete / target - 1.0).abs();
                        let note = format!("discrete {discrete}, exact {target}");
                        match eigenvalue_rel {
                            Some(tol) => InequalityReport::asserted("eigenvalue_convergence", rel, tol).with_note(note),
                            None => InequalityReport::reported("eigenvalue_convergence", rel, f64::NAN).with_note(note),
                        }
                    }
                    None => InequalityReport::reported("eigenvalue", discrete, f64::NAN),
                }
                .with_k(k)
            })
            .collect())
    });
    out.extend(guarded("eigenfunction_split", || {
        eigenfunction_split_check(&p.graph, p.spectrum.lambda(1), &p.spectrum.eigenfunctions[1])
            .map(|rs| rs.into_iter().map(|r| r.with_k(1)).collect())
    }));
    p.tag(out)
}

/// Buser-Ledoux lower bounds and the sweep upper bound on `h₁`.
pub fn cheeger_reports(p: &Prepared, k_max: usize) -> Vec<InequalityReport> {
    let out = guarded("buser_ledoux", || {
        let n = p.graph.vertex_count();
        let mut out = Vec::new();
        let (_, sweep) = h1_sweep_upper(&p.graph, &p.spectrum)?;
        let h1 = match &p.model {
            Some(m) => model_h1(m, &p.graph)?,
            None if n <= H1_EXACT_CAP => H1Estimate { value: h1_exact(&p.graph)?.1, source: H1Source::Enumerated },
            None => H1Estimate { value: sweep, source: H1Source::UpperBound },
        };
        // Only an enumerated h₁ lives on the same graph as the sweep.
        out.push(
            match h1.source {
                H1Source::Enumerated => InequalityReport::asserted_ge("h1_sweep_upper", sweep, h1.value),
                _ => InequalityReport::reported("h1_sweep_upper", sweep, h1.value),
            }
            .with_note(format!("h1 {:?}", h1.source)),
        );
        // A closed-form h₁ belongs to the continuum, so it is paired with the
        // continuum spectrum; an enumerated one with the graph spectrum.
        let lambdas: Vec<f64> = match (h1.source, p.exact()?) {
            (H1Source::ClosedForm, Some(e)) => e.eigenvalues.clone(),
            (H1Source::ClosedForm, None) => {
                out.push(InequalityReport::skipped("buser_ledoux", "no continuum spectrum for a closed-form h1"));
                return Ok(out);
            }
            _ => p.spectrum.eigenvalues.clone(),
        };
        match buser_ledoux_check(&h1, lambdas[1]) {
            Ok(r) => out.push(curvature_gate(p, r)),
            Err(Error::H1NotExact) => {
                out.push(InequalityReport::skipped("buser_ledoux", "h1 known only as an upper bound"));
                return Ok(out);
            }
            Err(e) => return Err(e),
        }
        for k in 1..=k_max.min(lambdas.len() - 1) {
            out.push(curvature_gate(p, higher_buser_ledoux_check(&h1, lambdas[k], k)?));
        }
        Ok(out)
    });
    p.tag(out)
}

/// Lower bounds on `h₁` need nonnegative curvature, which only the flat
/// models guarantee; on graph files they are reported.
fn curvature_gate(p: &Prepared, r: InequalityReport) -> InequalityReport {
    if p.model.is_some() || r.status != Status::Fail && r.status != Status::Pass {
        return r;
    }
    InequalityReport { status: Status::Reported, ..r }.with_note("no curvature guarantee for a graph file")
}

/// Functional certificates, their intermediate bound and the step
/// approximation error bound on the positive part of the `λ₁` eigenfunction.
pub fn improved_cheeger_reports(p: &Prepared, k_max: usize) -> Vec<InequalityReport> {
    let f = p.test_function();
    let mut out = Vec::new();
    for k in p.ks(k_max) {
        out.extend(guarded("improved_cheeger", || {
            let cert = functional_certificate(&p.graph, &f, k, &p.spectrum)?;
            let mut rs = vec![cert.report(), cert.intermediate_report()];
            if let Some(approx) = &cert.approximation {
                rs.push(step_error_bound_check(&p.graph, &f, approx, cert.lambda_k));
            }
            Ok(rs)
        }));
    }
    p.tag(out)
}

/// Multi-way constants: exact or heuristic `h_k`, the empirical constants of
/// the `h_k` ratio, shifted and higher-order bounds.
pub fn multiway_reports(p: &Prepared, k_max: usize) -> Vec<InequalityReport> {
    let n = p.graph.vertex_count();
    let mut out = Vec::new();
    let h1 = guarded("hk_ratio", || {
        let (_, h1) = if n <= H1_EXACT_CAP { h1_exact(&p.graph)? } else { h1_sweep_upper(&p.graph, &p.spectrum)? };
        Ok(vec![InequalityReport::reported("h1", h1, f64::NAN).with_note(if n <= H1_EXACT_CAP {
            "enumerated"
        } else {
            "sweep upper bound"
        })])
    });
    let h1_value = h1[0].lhs;
    out.extend(h1);
    for k in p.ks(k_max).filter(|&k| k < n) {
        out.extend(guarded("multiway", || {
            let (partition, hk) = if n <= HK_EXACT_CAP {
                hk_bruteforce(&p.graph, k)?
            } else {
                hk_spectral_heuristic(&p.graph, k, &p.spectrum)?
            };
            let mut rs = vec![InequalityReport::reported("hk", hk, f64::NAN)
                .with_k(k)
                .with_note(if n <= HK_EXACT_CAP { "enumerated" } else { "spectral heuristic upper bound" })];
            if h1_value.is_finite() {
                rs.push(hk_ratio_check(k, h1_value, hk));
            }
            if 2 * k <= p.k_limit() {
                let scale = (p.spectrum.lambda(2 * k) * (1.0 + k as f64).ln()).sqrt();
                rs.push(
                    InequalityReport::reported("shifted_cheeger", hk, scale)
                        .with_k(k)
                        .with_note(format!("empirical C1 = {}", hk / scale)),
                );
            }
            let functions = disjoint_functions_from_partition(&p.graph, &partition);
            match higher_order_certificate(&p.graph, k, k, &functions, &p.spectrum) {
                Ok(h) => rs.push(h.report()),
                Err(e) => rs.push(InequalityReport::error("higher_order_cheeger", e.to_string()).with_k(k)),
            }
            Ok(rs)
        }));
    }
    p.tag(out)
}

/// Observable-diameter lower bounds against both Cheng-type bounds.
pub fn obsdiam_reports(p: &Prepared, k_max: usize, kappas: &[f64]) -> Vec<InequalityReport> {
    let mut out = Vec::new();
    let extra: Vec<(String, Vec<f64>)> = p
        .model
        .as_ref()
        .map(|m| {
            m.coordinate_functions().into_iter().enumerate().map(|(i, f)| (format!("coordinate_{i}"), f)).collect()
        })
        .unwrap_or_default();
    for &kappa in kappas {
        out.extend(guarded("cheng_dimension_free", || {
            let est = obs_diameter_lower(&p.graph, kappa, &extra)?;
            Ok(p.ks(k_max)
                .map(|k| {
                    let r = cheng_dimension_free_check(&est, p.spectrum.lambda(k), k);
                    let r = if p.model.is_some() { r } else { InequalityReport { status: Status::Reported, ..r } };
                    r.with_note(format!("kappa = {kappa}, witness {}", est.witness_label))
                })
                .collect())
        }));
    }
    if let Some(m) = &p.model {
        out.extend(guarded("cheng_classical", || {
            let Some(exact) = p.exact()? else { return Ok(Vec::new()) };
            let diameter = m.diameter();
            Ok((1..=k_max.min(exact.eigenvalues.len() - 1))
                .map(|k| cheng_classical_check(diameter, m.dimension(), exact.lambda(k), k))
                .collect())
        }));
    }
    p.tag(out)
}

/// `λ_k/λ₁` against the universal bound on the continuum and graph spectra.
pub fn ratio_reports(p: &Prepared) -> Vec<InequalityReport> {
    let mut out = guarded("ratio_bound", || {
        let Some(exact) = p.exact()? else { return Ok(Vec::new()) };
        (1..exact.eigenvalues.len())
            .map(|k| ratio_bound_check(&exact.eigenvalues, k).map(|r| r.with_note("continuum spectrum")))
            .collect()
    });
    out.extend(guarded("ratio_bound_discrete", || {
        (1..p.spectrum.len())
            .map(|k| {
                let r = ratio_bound_check(&p.spectrum.eigenvalues, k)?;
                let r = InequalityReport { name: "ratio_bound_discrete".into(), ..r };
                Ok(if p.model.is_some() { r } else { InequalityReport { status: Status::Reported, ..r } })
            })
            .collect()
    }));
    p.tag(out)
}

/// Co-area identity on the test function and seeded random functions.
pub fn coarea_reports(p: &Prepared, rel_tol: f64, samples: usize, seed: u64) -> Vec<InequalityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(COAREA_SEED ^ seed);
    let n = p.graph.vertex_count();
    let mut functions = vec![("eigenfunction_positive_part".to_string(), p.test_function())];
    for s in 0..samples {
        let f: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() }).collect();
        functions.push((format!("random_{s}"), f));
    }
    let out = functions
        .into_iter()
        .flat_map(|(label, f)| guarded("coarea", || Ok(vec![coarea_check(&p.graph, &f, rel_tol)?.with_note(label)])))
        .collect();
    p.tag(out)
}

pub fn weyl_reports(p: &Prepared) -> Vec<InequalityReport> {
    let out = guarded("weyl_exponent", || {
        let dimension = p.model.as_ref().map_or(1, |m| m.dimension());
        let r = match p.exact()? {
            Some(e) => weyl_diagnostic(&e.eigenvalues, dimension).report(&p.label),
            None => weyl_diagnostic(&p.spectrum.eigenvalues, dimension).report(&p.label),
        };
        Ok(vec![r])
    });
    p.tag(out)
}

/// Every per-model check.
pub fn model_reports(model: &ModelConfig, index: usize, config: &ExperimentConfig) -> Vec<InequalityReport> {
    let source = match model.source() {
        Ok(s) => s,
        Err(e) => return vec![InequalityReport::error("model", e.to_string())],
    };
    let source = &source;
    let p = match Prepared::new(source, config.k_max, config) {
        Ok(p) => p,
        Err(e) => return vec![InequalityReport::error("model", e.to_string()).with_model(source.label())],
    };
    let k = config.k_max;
    let mut out = spectrum_reports(&p, k, model.eigenvalue_rel(config.tolerances.eigenvalue_rel));
    out.extend(improved_cheeger_reports(&p, k));
    out.extend(ratio_reports(&p));
    out.extend(cheeger_reports(&p, k));
    out.extend(multiway_reports(&p, k));
    out.extend(obsdiam_reports(&p, k, &config.kappas));
    out.extend(coarea_reports(&p, config.tolerances.coarea_rel, config.tolerances.coarea_samples, index as u64));
    out.extend(weyl_reports(&p));
    out
}

/// Ratio bound over thin tori for every `(n, a)`, `k ≤ k_max`.
pub fn ratio_scan_reports(ns: &[usize], a_grid: &[f64], k_max: usize, cap: u128) -> Vec<InequalityReport> {
    let mut out = Vec::new();
    for &n in ns {
        for &a in a_grid {
            let label = format!("torus:n={n}:a={a}");
            out.extend(
                guarded("ratio_bound", || {
                    let e = torus_exact_spectrum_capped::<f64>(n, a, k_max, cap)?;
                    (1..=k_max).map(|k| ratio_bound_check(&e.eigenvalues, k)).collect()
                })
                .into_iter()
                .map(|r| r.with_model(label.clone())),
            );
        }
    }
    out
}

/// Thin-torus optimality rows for every `(n, a)`.
pub fn optimality_reports(ns: &[usize], a_grid: &[f64], cap: u128) -> Vec<InequalityReport> {
    let mut out = Vec::new();
    for &n in ns {
        match optimality_scan(n, a_grid, cap) {
            Ok(rows) => {
                for row in rows {
                    out.extend(row.reports(&format!("torus:n={n}:a={}", row.a)));
                }
            }
            Err(e) => out.push(InequalityReport::error("optimality", e.to_string()).with_model(format!("torus:n={n}"))),
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub reports: Vec<InequalityReport>,
}

impl SuiteOutcome {
    pub fn count(&self, status: Status) -> usize {
        self.reports.iter().filter(|r| r.status == status).count()
    }

    /// 0 iff no report failed.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.count(Status::Fail) > 0)
    }
}

pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteOutcome> {
    config.validate()?;
    let per_model: Vec<Vec<InequalityReport>> =
        config.models.par_iter().enumerate().map(|(i, s)| model_reports(s, i, config)).collect();
    let mut reports: Vec<InequalityReport> = per_model.into_iter().flatten().collect();
    if let Some(opt) = &config.optimality {
        let cap = config.caps.enumeration as u128;
        reports.extend(ratio_scan_reports(&opt.n, &opt.a, config.caps.exact_spectrum, cap));
        reports.extend(optimality_reports(&opt.n, &opt.a, cap));
    }
    Ok(SuiteOutcome { reports })
}

fn number(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

/// CSV with columns `check, model, k, lhs, rhs, slack, status`.
pub fn to_csv(reports: &[InequalityReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["check", "model", "k", "lhs", "rhs", "slack", "status"]).map_err(io)?;
    for r in reports {
        let k = r.k.map(|k| k.to_string()).unwrap_or_default();
        w.write_record([
            r.name.as_str(),
            r.model.as_str(),
            &k,
            &number(r.lhs),
            &number(r.rhs),
            &number(r.slack),
            r.status.as_str(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn to_json(reports: &[InequalityReport]) -> Result<String> {
    serde_json::to_string_pretty(reports).map_err(|e| Error::Io(e.to_string()))
}

/// Writes `<check>.json` for each check name and the CSV summary into `dir`.
pub fn write_outputs(reports: &[InequalityReport], dir: &Path, csv_name: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut by_check: BTreeMap<&str, Vec<&InequalityReport>> = BTreeMap::new();
    for r in reports {
        by_check.entry(r.name.as_str()).or_default().push(r);
    }
    for (name, rs) in by_check {
        let text = serde_json::to_string_pretty(&rs).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(dir.join(format!("{name}.json")), text)?;
    }
    std::fs::write(dir.join(csv_name), to_csv(reports)?)?;
    Ok(())
}
