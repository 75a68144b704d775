//! Sweep cuts, the Cheeger constant `h₁` and the multi-way constants `h_k`:
//! the smallest achievable `max_i φ(A_i)` over `k+1` disjoint nonempty sets.

use serde::Serialize;

use crate::constants;
use crate::error::{Error, Result};
use crate::graph::{descending_order, mask_from_indices, CutCertificate, MeasuredGraph};
use crate::model_spaces::ModelSpace;
use crate::report::InequalityReport;
use crate::scalar::Real;
use crate::spectra::Spectrum;

/// Largest graph for which `h₁` is computed exactly.
pub const H1_EXACT_CAP: usize = 16;
/// Largest graph for which `h_k` is computed exactly.
pub const HK_EXACT_CAP: usize = 12;
/// Iteration cap of the clustering heuristic.
pub const LLOYD_MAX_ITERATIONS: usize = 100;

/// Pairwise-disjoint nonempty vertex sets with their conductances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition<T> {
    /// Sorted vertex lists.
    pub sets: Vec<Vec<usize>>,
    pub conductances: Vec<T>,
    /// `max_i φ(A_i)`.
    pub value: T,
}

impl<T: Real> Partition<T> {
    pub fn new(graph: &MeasuredGraph<T>, mut sets: Vec<Vec<usize>>) -> Result<Self> {
        let n = graph.vertex_count();
        if sets.len() < 2 {
            return Err(Error::InvalidPartition("need at least two sets".into()));
        }
        let mut owner = vec![usize::MAX; n];
        for (i, set) in sets.iter_mut().enumerate() {
            set.sort_unstable();
            if set.is_empty() {
                return Err(Error::InvalidPartition(format!("set {i} is empty")));
            }
            for &v in set.iter() {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if owner[v] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("vertex {v} lies in sets {} and {i}", owner[v])));
                }
                owner[v] = i;
            }
        }
        let conductances =
            sets.iter().map(|s| graph.conductance(&mask_from_indices(n, s))).collect::<Result<Vec<T>>>()?;
        let value = conductances.iter().copied().fold(T::zero(), T::max);
        Ok(Self { sets, conductances, value })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// `φ(f) = min_t φ({f > t})` over `t = 0` and the distinct values of `f`
/// below its maximum.
pub fn sweep_phi<T: Real>(graph: &MeasuredGraph<T>, f: &[T]) -> Result<(CutCertificate<T>, T)> {
    if f.len() != graph.vertex_count() {
        return Err(Error::LengthMismatch { expected: graph.vertex_count(), got: f.len() });
    }
    if let Some(v) = f.iter().position(|&x| x < T::zero()) {
        return Err(Error::NegativeFunction(v));
    }
    if f.iter().all(|&x| x == T::zero()) {
        return Err(Error::ZeroFunction);
    }
    let order = descending_order(f);
    let mut inside = vec![false; f.len()];
    let (mut boundary, mut mass) = (T::zero(), T::zero());
    let mut best: Option<(T, usize, T)> = None;
    let mut idx = 0;
    while idx < order.len() {
        let value = f[order[idx]];
        if value == T::zero() {
            break;
        }
        while idx < order.len() && f[order[idx]] == value {
            let v = order[idx];
            boundary += graph.boundary_delta(&inside, v);
            inside[v] = true;
            mass += graph.mu()[v];
            idx += 1;
        }
        let threshold = if idx < order.len() { f[order[idx]] } else { T::zero() };
        let phi = boundary.max(T::zero()) / mass;
        if best.is_none_or(|(b, _, _)| phi < b) {
            best = Some((phi, idx, threshold));
        }
    }
    let (_, len, threshold) = best.ok_or(Error::ZeroFunction)?;
    let cut = CutCertificate::from_mask(graph, threshold, &mask_from_indices(f.len(), &order[..len]))?;
    let phi = cut.phi;
    Ok((cut, phi))
}

struct SubsetTable<T> {
    n: usize,
    /// `φ(S)` indexed by bitmask, infinite for the empty set.
    phi: Vec<T>,
}

impl<T: Real> SubsetTable<T> {
    fn new(graph: &MeasuredGraph<T>) -> Self {
        let n = graph.vertex_count();
        let full = 1usize << n;
        let mut mass = vec![T::zero(); full];
        for s in 1..full {
            let v = s.trailing_zeros() as usize;
            mass[s] = mass[s & (s - 1)] + graph.mu()[v];
        }
        let edge_masks: Vec<(usize, T)> = graph.edges().iter().map(|e| ((1 << e.i) | (1 << e.j), e.p)).collect();
        let mut phi = vec![T::infinity(); full];
        for s in 1..full {
            let b: T = edge_masks.iter().filter(|(m, _)| (s & m).count_ones() == 1).map(|&(_, p)| p).sum();
            phi[s] = b / mass[s];
        }
        Self { n, phi }
    }

    fn mask_to_set(&self, s: usize) -> Vec<usize> {
        (0..self.n).filter(|&v| s >> v & 1 == 1).collect()
    }

    /// `best[j][S]`: smallest `max φ` over `j+1` disjoint nonempty subsets of
    /// `S`, built level by level up to `levels` sets. The last level is only
    /// evaluated at the full vertex set.
    fn multiway(&self, levels: usize) -> Vec<Vec<T>> {
        let full = 1usize << self.n;
        let mut single = self.phi.clone();
        for v in 0..self.n {
            for s in 0..full {
                if s >> v & 1 == 1 {
                    let without = single[s ^ (1 << v)];
                    if without < single[s] {
                        single[s] = without;
                    }
                }
            }
        }
        let mut table = vec![single];
        for level in 1..levels {
            let prev = table.last().expect("nonempty");
            let mut next = vec![T::infinity(); full];
            let range = if level + 1 == levels { full - 1..full } else { 1..full };
            for s in range {
                let mut best = T::infinity();
                let mut a = s;
                while a > 0 {
                    let v = self.phi[a].max(prev[s ^ a]);
                    if v < best {
                        best = v;
                    }
                    a = (a - 1) & s;
                }
                next[s] = best;
            }
            table.push(next);
        }
        table
    }

    /// Sets attaining `table[levels−1][S]`.
    fn reconstruct(&self, table: &[Vec<T>], s: usize) -> Vec<Vec<usize>> {
        let mut sets = Vec::new();
        let mut rest = s;
        for level in (1..table.len()).rev() {
            let target = table[level][rest];
            let mut chosen = None;
            let mut a = rest;
            while a > 0 {
                if self.phi[a].max(table[level - 1][rest ^ a]) == target {
                    chosen = Some(a);
                    break;
                }
                a = (a - 1) & rest;
            }
            let a = chosen.expect("optimum is attained");
            sets.push(self.mask_to_set(a));
            rest ^= a;
        }
        let target = table[0][rest];
        let mut a = rest;
        while a > 0 {
            if self.phi[a] == target {
                break;
            }
            a = (a - 1) & rest;
        }
        sets.push(self.mask_to_set(a));
        sets.sort();
        sets
    }
}

/// Exact `h₁` over all pairs of disjoint nonempty sets.
pub fn h1_exact<T: Real>(graph: &MeasuredGraph<T>) -> Result<(Partition<T>, T)> {
    let n = graph.vertex_count();
    if n > H1_EXACT_CAP {
        return Err(Error::TooLargeForExact { n, cap: H1_EXACT_CAP });
    }
    exact_multiway(graph, 1)
}

/// Exact `h_k` over all families of `k+1` disjoint nonempty sets.
pub fn hk_bruteforce<T: Real>(graph: &MeasuredGraph<T>, k: usize) -> Result<(Partition<T>, T)> {
    let n = graph.vertex_count();
    if n > HK_EXACT_CAP {
        return Err(Error::TooLargeForExact { n, cap: HK_EXACT_CAP });
    }
    exact_multiway(graph, k)
}

fn exact_multiway<T: Real>(graph: &MeasuredGraph<T>, k: usize) -> Result<(Partition<T>, T)> {
    let n = graph.vertex_count();
    if k == 0 || k + 1 > n {
        return Err(Error::KTooLarge { requested: k + 1, n });
    }
    let table = SubsetTable::new(graph);
    let levels = table.multiway(k + 1);
    let sets = table.reconstruct(&levels, (1 << n) - 1);
    let partition = Partition::new(graph, sets)?;
    let value = partition.value;
    Ok((partition, value))
}

/// Upper bound on `h₁` from sweeping the first nontrivial eigenfunction:
/// the best `max(φ(S), φ(Sᶜ))` over its superlevel sets.
pub fn h1_sweep_upper<T: Real>(graph: &MeasuredGraph<T>, spectrum: &Spectrum<T>) -> Result<(Partition<T>, T)> {
    let n = graph.vertex_count();
    if spectrum.len() < 2 {
        return Err(Error::KTooLarge { requested: 2, n: spectrum.len() });
    }
    let f = &spectrum.eigenfunctions[1];
    let order = descending_order(f);
    let total: T = graph.mu().iter().copied().sum();
    let mut inside = vec![false; n];
    let (mut boundary, mut mass) = (T::zero(), T::zero());
    let mut best: Option<(T, usize)> = None;
    for (idx, &v) in order.iter().enumerate().take(n - 1) {
        boundary += graph.boundary_delta(&inside, v);
        inside[v] = true;
        mass += graph.mu()[v];
        if f[order[idx + 1]] == f[v] {
            continue;
        }
        let b = boundary.max(T::zero());
        let value = (b / mass).max(b / (total - mass));
        if best.is_none_or(|(x, _)| value < x) {
            best = Some((value, idx + 1));
        }
    }
    let (_, len) = best.ok_or_else(|| Error::InvalidPartition("eigenfunction is constant".into()))?;
    let partition = Partition::new(graph, vec![order[..len].to_vec(), order[len..].to_vec()])?;
    let value = partition.value;
    Ok((partition, value))
}

/// Heuristic `h_k` upper bound: μ-weighted Lloyd clustering of the spectral
/// embedding by eigenfunctions `1..=k` into `k+1` clusters.
pub fn hk_spectral_heuristic<T: Real>(
    graph: &MeasuredGraph<T>,
    k: usize,
    spectrum: &Spectrum<T>,
) -> Result<(Partition<T>, T)> {
    let n = graph.vertex_count();
    if k == 0 || k + 1 > n {
        return Err(Error::KTooLarge { requested: k + 1, n });
    }
    if spectrum.len() < k + 1 {
        return Err(Error::KTooLarge { requested: k + 1, n: spectrum.len() });
    }
    let points: Vec<Vec<T>> = (0..n).map(|v| (1..=k).map(|j| spectrum.eigenfunctions[j][v]).collect()).collect();
    let labels = lloyd(&points, graph.mu(), k + 1);
    let mut sets = vec![Vec::new(); k + 1];
    for (v, &c) in labels.iter().enumerate() {
        sets[c].push(v);
    }
    let partition = Partition::new(graph, sets)?;
    let value = partition.value;
    Ok((partition, value))
}

fn dist2<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum()
}

/// Deterministic weighted k-means; every returned cluster is nonempty.
fn lloyd<T: Real>(points: &[Vec<T>], weights: &[T], clusters: usize) -> Vec<usize> {
    let n = points.len();
    // farthest-point seeding from vertex 0
    let mut seeds = vec![0usize];
    let mut nearest: Vec<T> = points.iter().map(|p| dist2(p, &points[0])).collect();
    while seeds.len() < clusters {
        let mut pick = None;
        for v in 0..n {
            if seeds.contains(&v) {
                continue;
            }
            if pick.is_none_or(|p: usize| nearest[v] > nearest[p]) {
                pick = Some(v);
            }
        }
        let s = pick.expect("enough vertices");
        seeds.push(s);
        for v in 0..n {
            nearest[v] = nearest[v].min(dist2(&points[v], &points[s]));
        }
    }
    let mut centers: Vec<Vec<T>> = seeds.iter().map(|&s| points[s].clone()).collect();
    let mut labels = vec![usize::MAX; n];
    for _ in 0..LLOYD_MAX_ITERATIONS {
        let mut next: Vec<usize> = points
            .iter()
            .map(|p| {
                let mut best = 0;
                let mut best_d = dist2(p, &centers[0]);
                for (c, center) in centers.iter().enumerate().skip(1) {
                    let d = dist2(p, center);
                    if d < best_d {
                        best = c;
                        best_d = d;
                    }
                }
                best
            })
            .collect();
        repair_empty(points, &centers, &mut next, clusters);
        if next == labels {
            break;
        }
        labels = next;
        let dim = points[0].len();
        for (c, center) in centers.iter_mut().enumerate() {
            let mut sum = vec![T::zero(); dim];
            let mut w = T::zero();
            for v in (0..n).filter(|&v| labels[v] == c) {
                for (s, &x) in sum.iter_mut().zip(&points[v]) {
                    *s += weights[v] * x;
                }
                w += weights[v];
            }
            *center = sum.into_iter().map(|s| s / w).collect();
        }
    }
    labels
}

/// Moves, for each empty cluster, the point farthest from its own center
/// (taken from a cluster with at least two points) into it.
fn repair_empty<T: Real>(points: &[Vec<T>], centers: &[Vec<T>], labels: &mut [usize], clusters: usize) {
    loop {
        let mut sizes = vec![0usize; clusters];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else { return };
        let mut pick: Option<(usize, T)> = None;
        for (v, &l) in labels.iter().enumerate() {
            if sizes[l] < 2 {
                continue;
            }
            let d = dist2(&points[v], &centers[l]);
            if pick.is_none_or(|(_, b)| d > b) {
                pick = Some((v, d));
            }
        }
        let (v, _) = pick.expect("more points than clusters");
        labels[v] = empty;
    }
}

/// For each set, hop distance to its complement normalized to peak at one,
/// and zero outside the set.
pub fn disjoint_functions_from_partition<T: Real>(graph: &MeasuredGraph<T>, partition: &Partition<T>) -> Vec<Vec<T>> {
    let n = graph.vertex_count();
    partition
        .sets
        .iter()
        .map(|set| {
            let mask = mask_from_indices(n, set);
            let hops = graph.hop_distance_to_complement(&mask);
            let depth: Vec<usize> = (0..n).map(|v| if mask[v] { hops[v].unwrap_or(1) } else { 0 }).collect();
            let peak = T::from_usize_lossy(depth.iter().copied().max().unwrap_or(1).max(1));
            depth.iter().map(|&d| T::from_usize_lossy(d) / peak).collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum H1Source {
    /// Exhaustive search on the graph itself.
    Enumerated,
    /// Continuum value of a model space.
    ClosedForm,
    /// Value of some feasible pair; valid only as an upper bound.
    UpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct H1Estimate<T> {
    pub value: T,
    pub source: H1Source,
}

impl<T: Real> H1Estimate<T> {
    pub fn is_exact(&self) -> bool {
        self.source != H1Source::UpperBound
    }
}

/// `h₁` of a model: enumerated when the grid is small enough, otherwise the
/// continuum value `4/L_max`.
pub fn model_h1<T: Real>(model: &ModelSpace<T>, graph: &MeasuredGraph<T>) -> Result<H1Estimate<T>> {
    if graph.vertex_count() <= H1_EXACT_CAP {
        let (_, value) = h1_exact(graph)?;
        return Ok(H1Estimate { value, source: H1Source::Enumerated });
    }
    Ok(H1Estimate { value: model.h1_closed_form(), source: H1Source::ClosedForm })
}

/// `h₁ ≥ (e−1)/(√2e)·√λ₁`. A lower bound on `h₁` cannot be tested against an
/// upper estimate, so only exact values are accepted.
pub fn buser_ledoux_check<T: Real>(h1: &H1Estimate<T>, lambda_1: T) -> Result<InequalityReport> {
    if !h1.is_exact() {
        return Err(Error::H1NotExact);
    }
    let c = constants::buser_ledoux::<f64>();
    let rhs = c * lambda_1.as_f64().max(0.0).sqrt();
    Ok(InequalityReport::asserted_ge("buser_ledoux", h1.value.as_f64(), rhs)
        .with_constant("buser_ledoux", "(e-1)/(sqrt(2)e)", c)
        .with_note(format!("h1 = {} ({:?}), lambda_1 = {}", h1.value, h1.source, lambda_1)))
}

/// `h_k ≥ h₁ ≥ (e−1)²/(16√2e²)·√λ_k/k`.
pub fn higher_buser_ledoux_check<T: Real>(h1: &H1Estimate<T>, lambda_k: T, k: usize) -> Result<InequalityReport> {
    if !h1.is_exact() {
        return Err(Error::H1NotExact);
    }
    let c = constants::higher_buser_ledoux::<f64>();
    let rhs = c * lambda_k.as_f64().max(0.0).sqrt() / k as f64;
    Ok(InequalityReport::asserted_ge("higher_buser_ledoux", h1.value.as_f64(), rhs)
        .with_k(k)
        .with_constant("higher_buser_ledoux", "(e-1)^2/(16 sqrt(2) e^2)", c)
        .with_note(format!("h1 = {} ({:?}), lambda_k = {}", h1.value, h1.source, lambda_k)))
}

/// Empirical `C = h_k / (k √log(1+k) h₁)`; reported, never asserted.
pub fn hk_ratio_check<T: Real>(k: usize, h1: T, hk_upper: T) -> InequalityReport {
    let kf = k as f64;
    let scale = kf * (1.0 + kf).ln().sqrt() * h1.as_f64();
    let c = hk_upper.as_f64() / scale;
    InequalityReport::reported("hk_ratio", hk_upper.as_f64(), scale).with_k(k).with_note(format!("empirical C = {c}"))
}
