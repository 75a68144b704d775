//! Experiment harness: whole-spectrum checks, configuration and the suite
//! runner.

pub mod config;
pub mod suite;

use serde::Serialize;

use crate::constants;
use crate::error::{Error, Result};
use crate::graph::MeasuredGraph;
use crate::model_spaces::{ratio_witness, torus_exact_spectrum_capped};
use crate::report::InequalityReport;
use crate::scalar::Real;

/// `λ_k/λ₁ ≤ (16e/(e−1))²·k²`.
pub fn ratio_bound_check<T: Real>(eigenvalues: &[T], k: usize) -> Result<InequalityReport> {
    if k == 0 || k >= eigenvalues.len() {
        return Err(Error::KTooLarge { requested: k + 1, n: eigenvalues.len() });
    }
    let l1 = eigenvalues[1].as_f64();
    if !(l1 > 0.0) {
        return Err(Error::DegenerateSpectrum { k: 1 });
    }
    let c = constants::ratio_bound::<f64>();
    Ok(InequalityReport::asserted("ratio_bound", eigenvalues[k].as_f64() / l1, c * (k * k) as f64)
        .with_k(k)
        .with_constant("ratio_bound", "(16e/(e-1))^2", c))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalityRow {
    pub n: usize,
    pub a: f64,
    pub k: usize,
    /// `1/a^{2n}`.
    pub ratio: f64,
    /// `k²/9`.
    pub lower_bound: f64,
    /// `λ_k/λ₁` from the enumerated spectrum, when enumeration fits the cap.
    pub enumerated_ratio: Option<f64>,
}

/// Thin-torus witnesses `λ_k/λ₁ = 1/a^{2n} ≥ k²/9` over a grid of `a`.
pub fn optimality_scan(n: usize, a_grid: &[f64], enumeration_cap: u128) -> Result<Vec<OptimalityRow>> {
    a_grid
        .iter()
        .map(|&a| {
            let (k, ratio, lower_bound) = ratio_witness(n, a)?;
            let enumerated_ratio = match torus_exact_spectrum_capped::<f64>(n, a, k, enumeration_cap) {
                Ok(s) => Some(s.lambda(k) / s.lambda(1)),
                Err(Error::EnumerationOverflow { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(OptimalityRow { n, a, k, ratio, lower_bound, enumerated_ratio })
        })
        .collect()
}

impl OptimalityRow {
    /// `ratio ≥ k²/9`, plus agreement of the enumerated ratio with `1/a^{2n}`.
    pub fn reports(&self, model: &str) -> Vec<InequalityReport> {
        let mut out = vec![InequalityReport::asserted_ge("optimality", self.ratio, self.lower_bound)
            .with_model(model)
            .with_k(self.k)
            .with_note(format!("n = {}, a = {}", self.n, self.a))];
        if let Some(e) = self.enumerated_ratio {
            let tol = 1e-9 * self.ratio;
            out.push(
                InequalityReport::asserted("optimality_enumerated", (e - self.ratio).abs(), tol)
                    .with_model(model)
                    .with_k(self.k)
                    .with_note(format!("enumerated ratio {e} vs 1/a^(2n) = {}", self.ratio)),
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylDiagnostic {
    /// `(k, λ_k)` over the fitted range.
    pub rows: Vec<(usize, f64)>,
    /// Least-squares slope of `log λ_k` against `log k`.
    pub exponent: Option<f64>,
    /// `2/n`.
    pub expected: f64,
    pub note: String,
}

/// Minimum spectrum length for the Weyl fit.
pub const WEYL_MIN_LEN: usize = 20;

/// Log-log fit of `λ_k` against `k` over the upper half of the spectrum.
pub fn weyl_diagnostic<T: Real>(eigenvalues: &[T], n: usize) -> WeylDiagnostic {
    let expected = 2.0 / n as f64;
    if eigenvalues.len() < WEYL_MIN_LEN {
        return WeylDiagnostic {
            rows: Vec::new(),
            exponent: None,
            expected,
            note: format!("only {} eigenvalues, need {WEYL_MIN_LEN}", eigenvalues.len()),
        };
    }
    let rows: Vec<(usize, f64)> = (eigenvalues.len() / 2..eigenvalues.len())
        .map(|k| (k, eigenvalues[k].as_f64()))
        .filter(|&(k, l)| k > 0 && l > 0.0)
        .collect();
    let pts: Vec<(f64, f64)> = rows.iter().map(|&(k, l)| ((k as f64).ln(), l.ln())).collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + (x - mx) * (x - mx), b + (x - mx) * (y - my)));
    let exponent = if sxx > 0.0 { Some(sxy / sxx) } else { None };
    WeylDiagnostic { rows, exponent, expected, note: String::new() }
}

impl WeylDiagnostic {
    pub fn report(&self, model: &str) -> InequalityReport {
        match self.exponent {
            Some(e) => InequalityReport::reported("weyl_exponent", e, self.expected)
                .with_model(model)
                .with_note(format!("fitted over {} eigenvalues", self.rows.len())),
            None => InequalityReport::skipped("weyl_exponent", self.note.clone()).with_model(model),
        }
    }
}

/// `|TV(f) − ∫ μ⁺({f > t}) dt| ≤ tol·TV(f)` for nonnegative `f`.
pub fn coarea_check<T: Real>(graph: &MeasuredGraph<T>, f: &[T], rel_tol: f64) -> Result<InequalityReport> {
    let tv = graph.total_variation(f).as_f64();
    let integral = graph.coarea_integral(f)?.as_f64();
    Ok(InequalityReport::asserted("coarea", (tv - integral).abs(), rel_tol * tv)
        .with_note(format!("TV = {tv}, integral = {integral}")))
}

/// `R(f±) ≤ λ` for the positive and negative parts of an eigenfunction.
pub fn eigenfunction_split_check<T: Real>(
    graph: &MeasuredGraph<T>,
    lambda: T,
    f: &[T],
) -> Result<Vec<InequalityReport>> {
    let (pos, neg) = crate::spectra::eigenfunction_split(graph, lambda, f)?;
    let bound = lambda.as_f64() * (1.0 + 1e-9);
    Ok(vec![
        InequalityReport::asserted("eigenfunction_split_positive", graph.rayleigh_quotient(&pos)?.as_f64(), bound),
        InequalityReport::asserted("eigenfunction_split_negative", graph.rayleigh_quotient(&neg)?.as_f64(), bound),
    ])
}
