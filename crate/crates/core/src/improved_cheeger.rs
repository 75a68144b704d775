//! Step-function approximation of a nonnegative function and the resulting
//! conductance certificate `φ(f) ≤ 8√2·k·R(f)/√λ_k`.
//!
//! Thresholds `0 = t₀ ≤ t₁ ≤ … ≤ t_{2k} = max f` are placed greedily: each
//! `t_i` is the first value of `f` at which the quantization error of the
//! segment `(t_{i−1}, t_i]` reaches the barrier `C₀ = E(f)/(kλ_k)`.

use serde::Serialize;

use crate::constants;
use crate::error::{Error, Result};
use crate::graph::{CutCertificate, MeasuredGraph};
use crate::isoperimetry::sweep_phi;
use crate::report::InequalityReport;
use crate::scalar::Real;
use crate::spectra::Spectrum;

/// Nearest threshold to `x`; ties go to the smaller threshold.
pub fn quantize<T: Real>(thresholds: &[T], x: T) -> T {
    assert!(!thresholds.is_empty(), "quantize needs at least one threshold");
    let idx = thresholds.partition_point(|&t| t <= x);
    if idx == 0 {
        return thresholds[0];
    }
    if idx == thresholds.len() {
        return thresholds[idx - 1];
    }
    let (lo, hi) = (thresholds[idx - 1], thresholds[idx]);
    if x - lo <= hi - x {
        lo
    } else {
        hi
    }
}

/// Distance from `x` to its quantized value.
pub fn eta<T: Real>(thresholds: &[T], x: T) -> T {
    (x - quantize(thresholds, x)).abs()
}

/// `∫₀^v η(t) dt` in closed form. Each full segment of width `Δ` contributes
/// `Δ²/4`; past the last threshold `η` grows linearly.
pub fn h_transform<T: Real>(thresholds: &[T], v: T) -> Result<T> {
    if v < T::zero() {
        return Err(Error::NegativeInput(v.as_f64()));
    }
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let mut total = T::zero();
    for w in thresholds.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let width = hi - lo;
        if v >= hi {
            total += width * width / four;
        } else if v > lo {
            let s = v - lo;
            total +=
                if two * s <= width { s * s / two } else { width * width / four - (width - s) * (width - s) / two };
            return Ok(total);
        } else {
            return Ok(total);
        }
    }
    let last = *thresholds.last().unwrap_or(&T::zero());
    if v > last {
        let s = v - last;
        total += s * s / two;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepApproximation<T> {
    pub k: usize,
    /// `t₀ … t_{2k}`.
    pub thresholds: Vec<T>,
    /// `g_k`, the quantized function.
    pub gk: Vec<T>,
    /// `∫_{t_{i−1}<f≤t_i} |f − g_k|² dμ` for `i = 1..=2k`, recomputed directly.
    pub segment_masses: Vec<T>,
    /// The same masses as tracked incrementally during construction.
    pub incremental_masses: Vec<T>,
    pub c0: T,
    /// `max(0, max_i segment_mass_i − C₀)`.
    pub overshoot: T,
    /// True when some `t_i` with `i < 2k` fell back to `max f` because no
    /// value reached the barrier.
    pub barrier_exhausted: bool,
    /// `‖f − g_k‖²`.
    pub error_sq: T,
}

/// Greedy thresholds for nonnegative, nonconstant `f`.
pub fn build_thresholds<T: Real>(
    graph: &MeasuredGraph<T>,
    f: &[T],
    k: usize,
    lambda_k: T,
) -> Result<StepApproximation<T>> {
    let n = graph.vertex_count();
    if f.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: f.len() });
    }
    if k == 0 {
        return Err(Error::BadParameter("k must be at least 1".into()));
    }
    if let Some(v) = f.iter().position(|&x| x < T::zero()) {
        return Err(Error::NegativeFunction(v));
    }
    if !(lambda_k > T::zero()) {
        return Err(Error::DegenerateSpectrum { k });
    }
    let top = f.iter().copied().fold(T::zero(), T::max);
    let bottom = f.iter().copied().fold(top, T::min);
    if top == bottom {
        return Err(Error::DegenerateFunction);
    }
    let energy = graph.dirichlet_energy(f);
    let c0 = energy / (T::from_usize_lossy(k) * lambda_k);

    let mut points: Vec<(T, T)> = f.iter().zip(graph.mu()).map(|(&x, &m)| (x, m)).collect();
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

    let mut thresholds = vec![T::zero()];
    let mut incremental = Vec::with_capacity(2 * k);
    let mut barrier_exhausted = false;
    // first point strictly above the current lower threshold
    let mut start = points.partition_point(|p| p.0 <= T::zero());
    for _ in 1..2 * k {
        let lo = *thresholds.last().expect("t0");
        if lo >= top {
            thresholds.push(top);
            incremental.push(T::zero());
            continue;
        }
        match first_barrier_crossing(&points[start..], lo, c0) {
            Some((t, mass, consumed)) => {
                thresholds.push(t);
                incremental.push(mass);
                start += consumed;
            }
            None => {
                barrier_exhausted = true;
                let mass = segment_mass_direct(&points[start..], lo, top);
                thresholds.push(top);
                incremental.push(mass);
                start = points.len();
            }
        }
    }
    let lo = *thresholds.last().expect("t0");
    incremental.push(if lo >= top { T::zero() } else { segment_mass_direct(&points[start..], lo, top) });
    thresholds.push(top);

    let gk: Vec<T> = f.iter().map(|&x| quantize(&thresholds, x)).collect();
    let segment_masses: Vec<T> = thresholds
        .windows(2)
        .map(|w| {
            let lo_idx = points.partition_point(|p| p.0 <= w[0]);
            let hi_idx = points.partition_point(|p| p.0 <= w[1]);
            segment_mass_direct(&points[lo_idx..hi_idx], w[0], w[1])
        })
        .collect();
    let overshoot = segment_masses.iter().fold(T::zero(), |acc, &m| acc.max(m - c0));
    let error_sq = f.iter().zip(&gk).zip(graph.mu()).map(|((&x, &g), &m)| m * (x - g) * (x - g)).sum();
    Ok(StepApproximation {
        k,
        thresholds,
        gk,
        segment_masses,
        incremental_masses: incremental,
        c0,
        overshoot,
        barrier_exhausted,
        error_sq,
    })
}

/// `Σ μ·min(x − lo, t − x)²` over points in `(lo, t]`.
fn segment_mass_direct<T: Real>(points: &[(T, T)], lo: T, t: T) -> T {
    points
        .iter()
        .filter(|p| p.0 > lo && p.0 <= t)
        .map(|&(x, m)| {
            let d = (x - lo).min(t - x);
            m * d * d
        })
        .sum()
}

/// Scans candidate thresholds `t` (the values in `points`, ascending, all
/// above `lo`) and returns the first whose segment mass reaches `c0`, with
/// that mass and the number of points in `(lo, t]`.
///
/// Points in the segment are split at the midpoint `(lo + t)/2`: those below
/// round down to `lo` and are summed directly, those above round up to `t`
/// and are tracked through `Σμ, Σμy, Σμy²` with `y = x − lo`.
fn first_barrier_crossing<T: Real>(points: &[(T, T)], lo: T, c0: T) -> Option<(T, T, usize)> {
    let two = T::lit(2.0);
    let mut lower = T::zero();
    let (mut u0, mut u1, mut u2) = (T::zero(), T::zero(), T::zero());
    let mut split = 0;
    let mut end = 0;
    while end < points.len() {
        let t = points[end].0;
        while end < points.len() && points[end].0 == t {
            let (x, m) = points[end];
            let y = x - lo;
            u0 += m;
            u1 += m * y;
            u2 += m * y * y;
            end += 1;
        }
        let s = t - lo;
        while split < end && two * (points[split].0 - lo) <= s {
            let (x, m) = points[split];
            let y = x - lo;
            u0 -= m;
            u1 -= m * y;
            u2 -= m * y * y;
            lower += m * y * y;
            split += 1;
        }
        let upper = (s * s * u0 - two * s * u1 + u2).max(T::zero());
        let mass = lower + upper;
        if mass >= c0 {
            return Some((t, mass, end));
        }
    }
    None
}

/// `‖f − g_k‖² ≤ 2E(f)/λ_k`, with `2k·overshoot` added to the right-hand
/// side as the allowance for discrete barrier overshoot.
pub fn step_error_bound_check<T: Real>(
    graph: &MeasuredGraph<T>,
    f: &[T],
    approx: &StepApproximation<T>,
    lambda_k: T,
) -> InequalityReport {
    let bound = (T::lit(2.0) * graph.dirichlet_energy(f) / lambda_k).as_f64();
    let allowance = 2.0 * approx.k as f64 * approx.overshoot.as_f64();
    InequalityReport::asserted("step_error_bound", approx.error_sq.as_f64(), bound + allowance)
        .with_k(approx.k)
        .with_allowance(allowance)
        .with_note(format!(
            "C0 = {}, overshoot = {}, barrier_exhausted = {}",
            approx.c0, approx.overshoot, approx.barrier_exhausted
        ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImprovedCheegerCertificate<T> {
    pub k: usize,
    pub phi_f: T,
    pub rayleigh: T,
    pub lambda_k: T,
    /// `8√2·k·R(f)/√λ_k`.
    pub rhs: T,
    pub witness: CutCertificate<T>,
    /// `None` for constant `f`, where `φ(f) = 0`.
    pub approximation: Option<StepApproximation<T>>,
    /// `‖f − g_k‖`.
    pub error_norm: T,
    pub f_norm: T,
    /// `8k√R(f)·‖f − g_k‖/‖f‖`.
    pub intermediate_rhs: T,
    /// `h(f(x))` per vertex; empty when there is no approximation.
    pub h_values: Vec<T>,
}

impl<T: Real> ImprovedCheegerCertificate<T> {
    pub fn holds(&self) -> bool {
        crate::report::holds(self.phi_f.as_f64(), self.rhs.as_f64())
    }

    pub fn report(&self) -> InequalityReport {
        InequalityReport::asserted("improved_cheeger", self.phi_f.as_f64(), self.rhs.as_f64())
            .with_k(self.k)
            .with_constant("improved_cheeger", "8*sqrt(2)", constants::improved_cheeger())
            .with_note(format!("R(f) = {}, lambda_k = {}", self.rayleigh, self.lambda_k))
    }

    /// The intermediate bound through the step approximation; reported only.
    pub fn intermediate_report(&self) -> InequalityReport {
        InequalityReport::reported("improved_cheeger_intermediate", self.phi_f.as_f64(), self.intermediate_rhs.as_f64())
            .with_k(self.k)
    }
}

pub fn functional_certificate<T: Real>(
    graph: &MeasuredGraph<T>,
    f: &[T],
    k: usize,
    spectrum: &Spectrum<T>,
) -> Result<ImprovedCheegerCertificate<T>> {
    if k == 0 {
        return Err(Error::BadParameter("k must be at least 1".into()));
    }
    if k >= spectrum.len() {
        return Err(Error::KTooLarge { requested: k + 1, n: spectrum.len() });
    }
    let lambda_k = spectrum.lambda(k);
    if !(lambda_k > T::tol(1e-12) * graph.operator_scale()) {
        return Err(Error::DegenerateSpectrum { k });
    }
    let (witness, phi_f) = sweep_phi(graph, f)?;
    let rayleigh = graph.rayleigh_quotient(f)?;
    let kf = T::from_usize_lossy(k);
    let rhs = constants::improved_cheeger::<T>() * kf * rayleigh / lambda_k.sqrt();
    let f_norm = graph.l2_norm_sq(f).sqrt();

    let top = f.iter().copied().fold(T::zero(), T::max);
    let constant = f.iter().all(|&x| x == top);
    let approximation = if constant { None } else { Some(build_thresholds(graph, f, k, lambda_k)?) };
    let (error_norm, h_values) = match &approximation {
        Some(a) => (a.error_sq.sqrt(), f.iter().map(|&x| h_transform(&a.thresholds, x)).collect::<Result<Vec<T>>>()?),
        None => (T::zero(), Vec::new()),
    };
    let intermediate_rhs = T::lit(8.0) * kf * rayleigh.sqrt() * error_norm / f_norm;
    Ok(ImprovedCheegerCertificate {
        k,
        phi_f,
        rayleigh,
        lambda_k,
        rhs,
        witness,
        approximation,
        error_norm,
        f_norm,
        intermediate_rhs,
        h_values,
    })
}

/// Certificates for each of `k+1` disjointly supported functions at
/// parameter `l`; the largest `φ(f_i)` bounds `h_k` from above.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HigherOrderCertificate<T> {
    pub k: usize,
    pub l: usize,
    pub certificates: Vec<ImprovedCheegerCertificate<T>>,
    pub hk_upper: T,
    /// `l·k⁶·λ_k/√λ_l`.
    pub scale: T,
    pub empirical_c: T,
}

impl<T: Real> HigherOrderCertificate<T> {
    pub fn report(&self) -> InequalityReport {
        InequalityReport::reported("higher_order_cheeger", self.hk_upper.as_f64(), self.scale.as_f64())
            .with_k(self.k)
            .with_note(format!("l = {}, empirical C = {}", self.l, self.empirical_c))
    }
}

pub fn higher_order_certificate<T: Real>(
    graph: &MeasuredGraph<T>,
    k: usize,
    l: usize,
    functions: &[Vec<T>],
    spectrum: &Spectrum<T>,
) -> Result<HigherOrderCertificate<T>> {
    if functions.len() != k + 1 {
        return Err(Error::BadParameter(format!("expected {} functions, got {}", k + 1, functions.len())));
    }
    for i in 0..functions.len() {
        for j in i + 1..functions.len() {
            if functions[i].iter().zip(&functions[j]).any(|(&a, &b)| a != T::zero() && b != T::zero()) {
                return Err(Error::NotDisjoint(i, j));
            }
        }
    }
    if k >= spectrum.len() {
        return Err(Error::KTooLarge { requested: k + 1, n: spectrum.len() });
    }
    let certificates =
        functions.iter().map(|f| functional_certificate(graph, f, l, spectrum)).collect::<Result<Vec<_>>>()?;
    let hk_upper = certificates.iter().map(|c| c.phi_f).fold(T::zero(), T::max);
    let k6 = T::from_usize_lossy(k).powi(6);
    let scale = T::from_usize_lossy(l) * k6 * spectrum.lambda(k) / spectrum.lambda(l).sqrt();
    Ok(HigherOrderCertificate { k, l, certificates, hk_upper, scale, empirical_c: hk_upper / scale })
}
