//! Observable-diameter lower bounds and the Cheng-type diameter checks.

use serde::Serialize;

use crate::constants;
use crate::error::{Error, Result};
use crate::graph::MeasuredGraph;
use crate::report::InequalityReport;
use crate::scalar::Real;

/// Number of farthest-point sources whose distance functions are tried.
pub const MAX_DISTANCE_SOURCES: usize = 64;
const MASS_TOL: f64 = 1e-12;
const LIPSCHITZ_TOL: f64 = 1e-12;

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa < 1.0 {
        Ok(())
    } else {
        Err(Error::BadKappa(kappa))
    }
}

/// Length of the shortest closed interval carrying at least `1 − κ` of the
/// push-forward of `μ` under `f`.
pub fn partial_diameter<T: Real>(graph: &MeasuredGraph<T>, f: &[T], kappa: f64) -> Result<T> {
    check_kappa(kappa)?;
    if f.len() != graph.vertex_count() {
        return Err(Error::LengthMismatch { expected: graph.vertex_count(), got: f.len() });
    }
    let mut atoms: Vec<(T, T)> = f.iter().copied().zip(graph.mu().iter().copied()).collect();
    atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let target = T::lit(1.0 - kappa - MASS_TOL);
    let mut best = T::infinity();
    let mut mass = T::zero();
    let mut lo = 0;
    for hi in 0..atoms.len() {
        mass += atoms[hi].1;
        // shrink from the left while the window still carries enough mass
        while lo < hi && mass - atoms[lo].1 >= target {
            mass -= atoms[lo].1;
            lo += 1;
        }
        if mass >= target {
            best = best.min(atoms[hi].0 - atoms[lo].0);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObsDiamEstimate<T> {
    pub kappa: f64,
    /// Lower bound on the observable diameter.
    pub value: T,
    /// 1-Lipschitz function attaining `value`.
    pub witness: Vec<T>,
    pub witness_label: String,
    /// Candidates that passed the Lipschitz check.
    pub candidate_count: usize,
}

/// True when `|f_i − f_j| ≤ ell_ij` on every edge.
pub fn is_one_lipschitz<T: Real>(graph: &MeasuredGraph<T>, f: &[T]) -> bool {
    graph.edges().iter().all(|e| match e.ell {
        Some(l) => (f[e.i] - f[e.j]).abs() <= l * (T::one() + T::tol(LIPSCHITZ_TOL)),
        None => false,
    })
}

/// Graph-distance functions from up to [`MAX_DISTANCE_SOURCES`]
/// farthest-point sources (starting from vertex 0).
pub fn distance_candidates<T: Real>(graph: &MeasuredGraph<T>) -> Result<Vec<(String, Vec<T>)>> {
    let n = graph.vertex_count();
    let mut out = Vec::new();
    let mut nearest = vec![T::infinity(); n];
    let mut source = 0;
    for _ in 0..MAX_DISTANCE_SOURCES.min(n) {
        let d = graph.distances_from(source)?;
        for (m, &x) in nearest.iter_mut().zip(&d) {
            *m = m.min(x);
        }
        out.push((format!("distance_from_{source}"), d));
        let mut next = 0;
        for v in 1..n {
            if nearest[v] > nearest[next] {
                next = v;
            }
        }
        if nearest[next] <= T::zero() {
            break;
        }
        source = next;
    }
    Ok(out)
}

/// Best partial diameter over distance functions and `extra` candidates
/// (e.g. model coordinates). Candidates failing the Lipschitz check are
/// discarded, so the value is a certified lower bound.
pub fn obs_diameter_lower<T: Real>(
    graph: &MeasuredGraph<T>,
    kappa: f64,
    extra: &[(String, Vec<T>)],
) -> Result<ObsDiamEstimate<T>> {
    check_kappa(kappa)?;
    if !graph.has_edge_lengths() {
        return Err(Error::NoEdgeLengths);
    }
    let mut candidates = distance_candidates(graph)?;
    candidates.extend(extra.iter().cloned());
    let mut best: Option<(T, usize)> = None;
    let mut count = 0;
    for (idx, (_, f)) in candidates.iter().enumerate() {
        if f.len() != graph.vertex_count() || !is_one_lipschitz(graph, f) {
            continue;
        }
        count += 1;
        let value = partial_diameter(graph, f, kappa)?;
        if best.is_none_or(|(b, _)| value > b) {
            best = Some((value, idx));
        }
    }
    let (value, idx) = best.expect("distance candidates are always 1-Lipschitz");
    let (label, witness) = candidates.swap_remove(idx);
    Ok(ObsDiamEstimate { kappa, value, witness, witness_label: label, candidate_count: count })
}

/// `ObsDiam(−κ) ≤ 152k·log(2/κ)/√λ_k`. The left side is a lower bound, so a
/// pass is evidence of consistency rather than a proof.
pub fn cheng_dimension_free_check<T: Real>(estimate: &ObsDiamEstimate<T>, lambda_k: T, k: usize) -> InequalityReport {
    let c = constants::dimension_free_cheng::<f64>();
    let rhs = c * k as f64 * (2.0 / estimate.kappa).ln() / lambda_k.as_f64().sqrt();
    InequalityReport::asserted("cheng_dimension_free", estimate.value.as_f64(), rhs)
        .with_k(k)
        .with_constant("dimension_free_cheng", "152", c)
        .with_note(format!("kappa = {}, lhs is a lower bound on the observable diameter", estimate.kappa))
}

/// `diam ≤ √(2n(n+4))·k/√λ_k`.
pub fn cheng_classical_check<T: Real>(diameter: T, dimension: usize, lambda_k: T, k: usize) -> InequalityReport {
    let c = constants::classical_cheng::<f64>(dimension);
    let rhs = c * k as f64 / lambda_k.as_f64().sqrt();
    InequalityReport::asserted("cheng_classical", diameter.as_f64(), rhs)
        .with_k(k)
        .with_note(format!("n = {dimension}, sqrt(2n(n+4)) = {c}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::model_spaces::{circle_graph, ModelSpace, TorusSpec};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn two_point(len: f64) -> MeasuredGraph<f64> {
        MeasuredGraph::new(2, vec![0.5, 0.5], vec![Edge::new(0, 1, 1.0, 1.0, Some(len))]).unwrap()
    }

    #[test]
    fn partial_diameter_examples() {
        let g = two_point(1.0);
        assert_eq!(partial_diameter(&g, &[2.0, 2.0], 0.3).unwrap(), 0.0);
        assert_eq!(partial_diameter(&g, &[0.0, 1.0], 0.4).unwrap(), 1.0);
        assert_eq!(partial_diameter(&g, &[0.0, 1.0], 0.5).unwrap(), 0.0);
        assert_eq!(partial_diameter(&g, &[0.0, 1.0], 1.0).unwrap_err(), Error::BadKappa(1.0));
        assert_eq!(partial_diameter(&g, &[0.0, 1.0], 0.0).unwrap_err(), Error::BadKappa(0.0));
    }

    #[test]
    fn circle_distance_function() {
        let g = circle_graph(2.0 * PI, 1000).unwrap();
        let d = g.distances_from(0).unwrap();
        assert_abs_diff_eq!(partial_diameter(&g, &d, 0.1).unwrap(), 0.9 * PI, epsilon = 0.01);
        let est = obs_diameter_lower(&g, 0.1, &[]).unwrap();
        assert!(est.value >= 0.9 * PI - 0.01);
        assert!(est.value <= PI);
        assert!(is_one_lipschitz(&g, &est.witness));
    }

    #[test]
    fn two_point_space() {
        let est = obs_diameter_lower(&two_point(0.7), 0.3, &[]).unwrap();
        assert_eq!(est.value, 0.7);
        let bare = MeasuredGraph::<f64>::unit(2, &[(0, 1)]).unwrap();
        assert_eq!(obs_diameter_lower(&bare, 0.3, &[]).unwrap_err(), Error::NoEdgeLengths);
    }

    #[test]
    fn non_lipschitz_candidates_are_dropped() {
        let g = two_point(0.7);
        let cheat = vec![("cheat".to_string(), vec![0.0, 100.0])];
        let est = obs_diameter_lower(&g, 0.3, &cheat).unwrap();
        assert_eq!(est.value, 0.7);
        assert_eq!(est.candidate_count, 2);
    }

    #[test]
    fn cheng_examples() {
        let g = circle_graph(2.0 * PI, 512).unwrap();
        let est = obs_diameter_lower(&g, 0.1, &[]).unwrap();
        let r = cheng_dimension_free_check(&est, 1.0, 1);
        assert!(r.passed());
        assert_abs_diff_eq!(r.rhs, 152.0 * 20f64.ln(), epsilon = 1e-9);

        let a = 3.0;
        let lambda1 = 4.0 * PI * PI / (a * a);
        let r = cheng_classical_check(a / 2.0, 1, lambda1, 1);
        assert!(r.passed());
        assert!(r.slack <= 0.01 * r.rhs);
        assert_abs_diff_eq!(r.rhs / a, 10f64.sqrt() / (2.0 * PI), epsilon = 1e-12);

        let torus = ModelSpace::Torus(TorusSpec::with_counts(2, 0.5, &[8, 32]).unwrap());
        let r = cheng_classical_check(torus.diameter(), 2, PI * PI, 1);
        assert!(r.passed());
        assert_abs_diff_eq!(r.rhs, 24f64.sqrt() / PI, epsilon = 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn partial_diameter_is_bounded_by_range(values in proptest::collection::vec(-5.0f64..5.0, 8), kappa in 0.01f64..0.99) {
            let edges: Vec<Edge<f64>> = (0..7).map(|i| Edge::new(i, i + 1, 1.0, 1.0, Some(1.0))).collect();
            let g = MeasuredGraph::new(8, vec![0.125; 8], edges).unwrap();
            let pd = partial_diameter(&g, &values, kappa).unwrap();
            let range = values.iter().cloned().fold(f64::MIN, f64::max) - values.iter().cloned().fold(f64::MAX, f64::min);
            prop_assert!(pd >= 0.0 && pd <= range);
        }

        #[test]
        fn estimate_is_monotone_in_kappa(k1 in 0.01f64..0.99, k2 in 0.01f64..0.99) {
            let model = ModelSpace::Torus(TorusSpec::with_counts(2, 0.5, &[4, 16]).unwrap());
            let g = model.graph(1000).unwrap();
            let coords: Vec<(String, Vec<f64>)> = model
                .coordinate_functions()
                .into_iter()
                .enumerate()
                .map(|(i, f)| (format!("coordinate_{i}"), f))
                .collect();
            let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
            let a = obs_diameter_lower(&g, lo, &coords).unwrap();
            let b = obs_diameter_lower(&g, hi, &coords).unwrap();
            prop_assert!(a.value >= b.value);
            prop_assert!(a.value <= model.diameter() * 2.0f64.sqrt());
            prop_assert!(is_one_lipschitz(&g, &a.witness));
        }
    }
}
