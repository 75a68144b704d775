use eigenratio::model_spaces::{ModelSpace, Resolution, TorusSpec};
use eigenratio::spectra::{compute_spectrum, Method};

const K: usize = 10;

fn relative_errors(model: &ModelSpace<f64>) -> Vec<f64> {
    let g = model.graph(100_000).unwrap();
    let s = compute_spectrum(&g, K, Method::Auto).unwrap();
    let exact = model.exact_spectrum(K, 1 << 30).unwrap();
    (1..=K).map(|k| (s.lambda(k) / exact.lambda(k) - 1.0).abs()).collect()
}

fn assert_quadratic(coarse: &ModelSpace<f64>, fine: &ModelSpace<f64>) {
    let (a, b) = (relative_errors(coarse), relative_errors(fine));
    for k in 0..K {
        let ratio = a[k] / b[k];
        println!("{} k={} error {:.3e} -> {:.3e}, ratio {ratio:.3}", coarse.label(), k + 1, a[k], b[k]);
        assert!((3.8..=4.1).contains(&ratio), "k = {}: ratio {ratio}", k + 1);
    }
}

#[test]
fn circle_error_quarters_when_spacing_halves() {
    for a in [1.0, std::f64::consts::TAU] {
        for n in [64, 128] {
            assert_quadratic(&ModelSpace::Circle { a, points: n }, &ModelSpace::Circle { a, points: 2 * n });
        }
    }
}

#[test]
fn torus_error_quarters_when_spacing_halves() {
    let torus =
        |counts: &[usize]| ModelSpace::Torus(TorusSpec::new(2, 0.5, Resolution::Counts(counts.to_vec())).unwrap());
    assert_quadratic(&torus(&[8, 32]), &torus(&[16, 64]));
    let torus3 = |c: usize| ModelSpace::Torus(TorusSpec::new(3, 0.8, Resolution::Counts(vec![c, c, 2 * c])).unwrap());
    assert_quadratic(&torus3(6), &torus3(12));
}
