//! Measured weighted graphs and the functionals defined on them.
//!
//! A [`MeasuredGraph`] carries a probability measure `mu` on its vertices and,
//! per undirected edge, an energy weight `w` (quadrature of `|∇f|² dμ`), a
//! perimeter weight `p` (quadrature of the boundary measure) and an optional
//! geometric length `ell`. Abstract graphs that have no geometry use `p = w`.
//!
//! Vertex subsets are passed as boolean masks of length `vertex_count`.

pub mod io;

use std::collections::{BinaryHeap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Renormalization window for the vertex measure.
pub const MEASURE_RENORMALIZE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge<T> {
    pub i: usize,
    pub j: usize,
    pub w: T,
    pub p: T,
    pub ell: Option<T>,
}

impl<T: Real> Edge<T> {
    pub fn new(i: usize, j: usize, w: T, p: T, ell: Option<T>) -> Self {
        Self { i, j, w, p, ell }
    }

    /// Edge in pure graph mode: perimeter weight equal to the energy weight.
    pub fn pure(i: usize, j: usize, w: T) -> Self {
        Self { i, j, w, p: w, ell: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredGraph<T> {
    mu: Vec<T>,
    edges: Vec<Edge<T>>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl<T: Real> MeasuredGraph<T> {
    /// Validates and assembles a graph.
    ///
    /// Edge endpoints are normalized to `i < j`. A measure whose total is
    /// within `1e-9` of one is rescaled to sum to one; anything further off
    /// is rejected.
    pub fn new(vertex_count: usize, mu: Vec<T>, edges: Vec<Edge<T>>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::EmptyGraph);
        }
        if mu.len() != vertex_count {
            return Err(Error::MeasureLength { expected: vertex_count, got: mu.len() });
        }
        for (v, &m) in mu.iter().enumerate() {
            if !m.is_finite() || m <= T::zero() {
                return Err(Error::NonpositiveMeasure { vertex: v, value: m.as_f64() });
            }
        }
        let mu = normalize_measure(mu)?;

        let mut seen = HashSet::with_capacity(edges.len());
        let mut normalized = Vec::with_capacity(edges.len());
        for e in edges {
            let (i, j) = if e.i <= e.j { (e.i, e.j) } else { (e.j, e.i) };
            if j >= vertex_count {
                return Err(Error::VertexOutOfRange { vertex: j, n: vertex_count });
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if !e.w.is_finite() || !e.p.is_finite() || e.w < T::zero() || e.p < T::zero() {
                return Err(Error::NegativeWeight { i, j });
            }
            if let Some(l) = e.ell {
                if !l.is_finite() || l <= T::zero() {
                    return Err(Error::BadEdgeLength { i, j });
                }
            }
            if !seen.insert((i, j)) {
                return Err(Error::DuplicateEdge { i, j });
            }
            normalized.push(Edge { i, j, ..e });
        }

        let mut adjacency = vec![Vec::new(); vertex_count];
        for (idx, e) in normalized.iter().enumerate() {
            adjacency[e.i].push((e.j, idx));
            adjacency[e.j].push((e.i, idx));
        }
        let graph = Self { mu, edges: normalized, adjacency };
        let components = graph.energy_components();
        if components > 1 {
            return Err(Error::DisconnectedGraph { components });
        }
        Ok(graph)
    }

    /// Uniform measure, `w = p = 1` on the given edges.
    pub fn unit(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let m = T::one() / T::from_usize_lossy(vertex_count.max(1));
        let edges = edges.iter().map(|&(i, j)| Edge::pure(i, j, T::one())).collect();
        Self::new(vertex_count, vec![m; vertex_count], edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.mu.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn mu(&self) -> &[T] {
        &self.mu
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    /// `(neighbor, edge index)` pairs of a vertex.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn has_edge_lengths(&self) -> bool {
        self.edges.iter().all(|e| e.ell.is_some())
    }

    fn check_len(&self, f: &[T]) {
        assert_eq!(f.len(), self.vertex_count(), "vertex function length mismatch");
    }

    /// `Σ_edges w (f_i − f_j)²`.
    pub fn dirichlet_energy(&self, f: &[T]) -> T {
        self.check_len(f);
        self.edges
            .iter()
            .map(|e| {
                let d = f[e.i] - f[e.j];
                e.w * d * d
            })
            .sum()
    }

    pub fn rayleigh_quotient(&self, f: &[T]) -> Result<T> {
        let norm = self.l2_norm_sq(f);
        if norm <= T::zero() {
            return Err(Error::ZeroFunction);
        }
        Ok(self.dirichlet_energy(f) / norm)
    }

    /// `Σ_i mu_i |f_i|`.
    pub fn l1_norm(&self, f: &[T]) -> T {
        self.check_len(f);
        self.mu.iter().zip(f).map(|(&m, &x)| m * x.abs()).sum()
    }

    /// `Σ_i mu_i f_i²`.
    pub fn l2_norm_sq(&self, f: &[T]) -> T {
        self.check_len(f);
        self.mu.iter().zip(f).map(|(&m, &x)| m * x * x).sum()
    }

    /// μ-weighted inner product.
    pub fn inner(&self, f: &[T], g: &[T]) -> T {
        self.check_len(f);
        self.check_len(g);
        self.mu.iter().zip(f.iter().zip(g)).map(|(&m, (&a, &b))| m * a * b).sum()
    }

    /// `Σ_edges p |f_i − f_j|`, the discrete `∫|∇f| dμ`.
    pub fn total_variation(&self, f: &[T]) -> T {
        self.check_len(f);
        self.edges.iter().map(|e| e.p * (f[e.i] - f[e.j]).abs()).sum()
    }

    pub fn mass(&self, set: &[bool]) -> T {
        assert_eq!(set.len(), self.vertex_count());
        self.mu.iter().zip(set).filter(|(_, &inside)| inside).map(|(&m, _)| m).sum()
    }

    /// Perimeter weight crossing the cut `(A, Aᶜ)`.
    pub fn boundary_measure(&self, set: &[bool]) -> T {
        assert_eq!(set.len(), self.vertex_count());
        self.edges.iter().filter(|e| set[e.i] != set[e.j]).map(|e| e.p).sum()
    }

    /// `μ⁺(A) / μ(A)`.
    pub fn conductance(&self, set: &[bool]) -> Result<T> {
        let mass = self.mass(set);
        if mass <= T::zero() {
            return Err(Error::EmptySet);
        }
        Ok(self.boundary_measure(set) / mass)
    }

    /// `(L f)_i = Σ_j w_ij (f_i − f_j)`.
    pub fn apply_laplacian(&self, f: &[T]) -> Vec<T> {
        self.check_len(f);
        let mut out = vec![T::zero(); f.len()];
        for e in &self.edges {
            let d = e.w * (f[e.i] - f[e.j]);
            out[e.i] += d;
            out[e.j] -= d;
        }
        out
    }

    pub fn weighted_degree(&self, v: usize) -> T {
        self.adjacency[v].iter().map(|&(_, idx)| self.edges[idx].w).sum()
    }

    /// Gershgorin bound on the spectrum of `M⁻¹L`; used to scale residuals.
    pub fn operator_scale(&self) -> T {
        (0..self.vertex_count())
            .map(|v| (T::one() + T::one()) * self.weighted_degree(v) / self.mu[v])
            .fold(T::zero(), T::max)
    }

    /// Relative residual `‖M⁻¹Lf − λf‖_μ / (scale · ‖f‖_μ)`.
    pub fn eigen_residual(&self, lambda: T, f: &[T]) -> T {
        let lf = self.apply_laplacian(f);
        let r: Vec<T> = lf.iter().zip(&self.mu).zip(f).map(|((&l, &m), &x)| l / m - lambda * x).collect();
        let norm_f = self.l2_norm_sq(f).sqrt();
        let scale = self.operator_scale().max(lambda.abs()).max(T::min_positive_value());
        if norm_f <= T::zero() {
            return T::infinity();
        }
        self.l2_norm_sq(&r).sqrt() / (scale * norm_f)
    }

    /// `M_f(t) = {f > t}`.
    pub fn superlevel_set(&self, f: &[T], t: T) -> Vec<bool> {
        self.check_len(f);
        f.iter().map(|&x| x > t).collect()
    }

    /// `∫₀^∞ μ⁺({f > t}) dt` evaluated exactly as a finite sum over the
    /// distinct values of a nonnegative `f`.
    pub fn coarea_integral(&self, f: &[T]) -> Result<T> {
        self.level_integrals(f).map(|(perimeter, _)| perimeter)
    }

    /// `∫₀^∞ μ({f > t}) dt` for nonnegative `f`.
    pub fn layer_cake_integral(&self, f: &[T]) -> Result<T> {
        self.level_integrals(f).map(|(_, mass)| mass)
    }

    fn level_integrals(&self, f: &[T]) -> Result<(T, T)> {
        self.check_len(f);
        if let Some(v) = f.iter().position(|&x| x < T::zero()) {
            return Err(Error::NegativeFunction(v));
        }
        let order = descending_order(f);
        let mut inside = vec![false; f.len()];
        let (mut boundary, mut mass) = (T::zero(), T::zero());
        let (mut perimeter_integral, mut mass_integral) = (T::zero(), T::zero());
        let mut idx = 0;
        while idx < order.len() {
            let value = f[order[idx]];
            while idx < order.len() && f[order[idx]] == value {
                let v = order[idx];
                boundary += self.boundary_delta(&inside, v);
                inside[v] = true;
                mass += self.mu[v];
                idx += 1;
            }
            // Between this value and the next lower one the superlevel set is
            // exactly the vertices added so far.
            let next = if idx < order.len() { f[order[idx]] } else { T::zero() };
            perimeter_integral += (value - next) * boundary;
            mass_integral += (value - next) * mass;
        }
        Ok((perimeter_integral, mass_integral))
    }

    /// Change in `μ⁺(A)` when `v` joins `A`.
    pub(crate) fn boundary_delta(&self, inside: &[bool], v: usize) -> T {
        let mut delta = T::zero();
        for &(u, idx) in &self.adjacency[v] {
            let p = self.edges[idx].p;
            if inside[u] {
                delta -= p;
            } else {
                delta += p;
            }
        }
        delta
    }

    /// Hop distance to the nearest vertex outside `set`; `None` for vertices
    /// that cannot reach the complement.
    pub fn hop_distance_to_complement(&self, set: &[bool]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        for (v, &inside) in set.iter().enumerate() {
            if !inside {
                dist[v] = Some(0);
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &(u, _) in &self.adjacency[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Shortest-path distances from `source` with edge lengths as metric.
    pub fn distances_from(&self, source: usize) -> Result<Vec<T>> {
        if !self.has_edge_lengths() {
            return Err(Error::NoEdgeLengths);
        }
        let mut dist = vec![T::infinity(); self.vertex_count()];
        dist[source] = T::zero();
        let mut heap = BinaryHeap::new();
        heap.push(HeapEntry { dist: T::zero(), vertex: source });
        while let Some(HeapEntry { dist: d, vertex: v }) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(u, idx) in &self.adjacency[v] {
                let nd = d + self.edges[idx].ell.unwrap_or_else(T::zero);
                if nd < dist[u] {
                    dist[u] = nd;
                    heap.push(HeapEntry { dist: nd, vertex: u });
                }
            }
        }
        Ok(dist)
    }

    /// Connected components along edges of positive energy weight.
    fn energy_components(&self) -> usize {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut components = 0;
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = components;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &(u, idx) in &self.adjacency[v] {
                    if label[u] == usize::MAX && self.edges[idx].w > T::zero() {
                        label[u] = components;
                        stack.push(u);
                    }
                }
            }
            components += 1;
        }
        components
    }

    /// Same graph with vertices relabeled: old vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.vertex_count();
        assert_eq!(perm.len(), n);
        let mut mu = vec![T::zero(); n];
        for (v, &m) in self.mu.iter().enumerate() {
            mu[perm[v]] = m;
        }
        let edges = self.edges.iter().map(|e| Edge { i: perm[e.i], j: perm[e.j], ..e.clone() }).collect();
        Self::new(n, mu, edges)
    }
}

struct HeapEntry<T> {
    dist: T,
    vertex: usize,
}

impl<T: Real> PartialEq for HeapEntry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl<T: Real> Eq for HeapEntry<T> {}
impl<T: Real> PartialOrd for HeapEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for HeapEntry<T> {
    // min-heap on distance, then on vertex index
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

fn normalize_measure<T: Real>(mut mu: Vec<T>) -> Result<Vec<T>> {
    let sum: T = mu.iter().copied().sum();
    let dev = (sum - T::one()).abs();
    let exact = T::from_usize_lossy(4 * mu.len()) * T::epsilon();
    if dev <= exact {
        return Ok(mu);
    }
    if dev <= T::tol(MEASURE_RENORMALIZE_TOL) {
        for m in &mut mu {
            *m /= sum;
        }
        return Ok(mu);
    }
    Err(Error::UnnormalizedMeasure { sum: sum.as_f64() })
}

/// Vertex indices sorted by decreasing value, ties by increasing index.
pub(crate) fn descending_order<T: Real>(f: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f[b].partial_cmp(&f[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    order
}

pub fn mask_from_indices(n: usize, indices: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &v in indices {
        mask[v] = true;
    }
    mask
}

pub fn indices_from_mask(mask: &[bool]) -> Vec<usize> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v).collect()
}

/// A superlevel set together with its measure, boundary and conductance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutCertificate<T> {
    pub threshold: T,
    pub inside: Vec<usize>,
    pub mass: T,
    pub boundary: T,
    pub phi: T,
}

impl<T: Real> CutCertificate<T> {
    pub fn from_mask(graph: &MeasuredGraph<T>, threshold: T, mask: &[bool]) -> Result<Self> {
        let mass = graph.mass(mask);
        if mass <= T::zero() {
            return Err(Error::EmptySet);
        }
        let boundary = graph.boundary_measure(mask);
        Ok(Self { threshold, inside: indices_from_mask(mask), mass, boundary, phi: boundary / mass })
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        mask_from_indices(n, &self.inside)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c4() -> MeasuredGraph<f64> {
        MeasuredGraph::unit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn builds_uniform_cycle() {
        let g = c4();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edges()[3], Edge::pure(0, 3, 1.0));
        assert_eq!(g.mu().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let half = MeasuredGraph::<f64>::new(2, vec![0.25, 0.25], vec![Edge::pure(0, 1, 1.0)]);
        assert!(matches!(half, Err(Error::UnnormalizedMeasure { .. })));
        let disjoint = MeasuredGraph::<f64>::unit(4, &[(0, 1), (2, 3)]);
        assert_eq!(disjoint, Err(Error::DisconnectedGraph { components: 2 }));
        let neg = MeasuredGraph::<f64>::new(2, vec![0.5, 0.5], vec![Edge::new(0, 1, -1.0, 1.0, None)]);
        assert_eq!(neg, Err(Error::NegativeWeight { i: 0, j: 1 }));
        let dup = MeasuredGraph::<f64>::unit(2, &[(0, 1), (1, 0)]);
        assert_eq!(dup, Err(Error::DuplicateEdge { i: 0, j: 1 }));
        let zero = MeasuredGraph::<f64>::new(2, vec![1.0, 0.0], vec![Edge::pure(0, 1, 1.0)]);
        assert!(matches!(zero, Err(Error::NonpositiveMeasure { vertex: 1, .. })));
        assert_eq!(MeasuredGraph::<f64>::unit(2, &[(1, 1)]), Err(Error::SelfLoop(1)));
        assert!(matches!(MeasuredGraph::<f64>::unit(2, &[(0, 2)]), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn renormalizes_small_drift() {
        let g = MeasuredGraph::<f64>::new(2, vec![0.5 + 1e-10, 0.5], vec![Edge::pure(0, 1, 1.0)]).unwrap();
        assert!((g.mu().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn zero_energy_edge_does_not_connect() {
        let g = MeasuredGraph::<f64>::new(2, vec![0.5, 0.5], vec![Edge::new(0, 1, 0.0, 1.0, None)]);
        assert!(matches!(g, Err(Error::DisconnectedGraph { .. })));
    }

    #[test]
    fn energy_and_rayleigh_on_c4() {
        let g = c4();
        assert_eq!(g.dirichlet_energy(&[1.0, 0.0, -1.0, 0.0]), 4.0);
        assert_eq!(g.dirichlet_energy(&[1.0, 1.0, 0.0, 0.0]), 2.0);
        assert_eq!(g.dirichlet_energy(&[3.0; 4]), 0.0);
        assert_eq!(g.rayleigh_quotient(&[1.0, 0.0, -1.0, 0.0]).unwrap(), 8.0);
        assert_eq!(g.rayleigh_quotient(&[1.0, 1.0, 0.0, 0.0]).unwrap(), 4.0);
        assert_eq!(g.rayleigh_quotient(&[1.0; 4]).unwrap(), 0.0);
        assert_eq!(g.rayleigh_quotient(&[0.0; 4]), Err(Error::ZeroFunction));
    }

    #[test]
    fn boundary_and_conductance_on_c4() {
        let g = c4();
        let half = mask_from_indices(4, &[0, 1]);
        assert_eq!(g.boundary_measure(&half), 2.0);
        assert_eq!(g.boundary_measure(&[true; 4]), 0.0);
        assert_eq!(g.conductance(&half).unwrap(), 4.0);
        assert_eq!(g.conductance(&[true; 4]).unwrap(), 0.0);
        assert_eq!(g.conductance(&mask_from_indices(4, &[0])).unwrap(), 8.0);
        assert_eq!(g.conductance(&[false; 4]), Err(Error::EmptySet));
    }

    #[test]
    fn norms_and_variation_on_c4() {
        let g = c4();
        assert_eq!(g.total_variation(&[1.0, 1.0, 0.0, 0.0]), 2.0);
        // |3−1| + |1−0| + |0−0| + |0−3|
        assert_eq!(g.total_variation(&[3.0, 1.0, 0.0, 0.0]), 6.0);
        assert_eq!(g.total_variation(&[2.0; 4]), 0.0);
        assert_eq!(g.l1_norm(&[1.0, 1.0, 0.0, 0.0]), 0.5);
        assert_eq!(g.l2_norm_sq(&[1.0, 1.0, 0.0, 0.0]), 0.5);
        assert_eq!(g.l1_norm(&[2.0, 0.0, 0.0, 0.0]), 0.5);
        assert_eq!(g.l2_norm_sq(&[2.0, 0.0, 0.0, 0.0]), 1.0);
        assert_eq!(g.l1_norm(&[0.0; 4]), 0.0);
    }

    #[test]
    fn coarea_matches_variation_on_c4() {
        let g = c4();
        let f = [3.0, 1.0, 0.0, 0.0];
        assert_relative_eq!(g.coarea_integral(&f).unwrap(), 6.0);
        assert_relative_eq!(g.layer_cake_integral(&f).unwrap(), g.l1_norm(&f));
        assert_eq!(g.coarea_integral(&[-1.0, 0.0, 0.0, 0.0]), Err(Error::NegativeFunction(0)));
    }

    #[test]
    fn shortest_paths_need_lengths() {
        let g = c4();
        assert_eq!(g.distances_from(0), Err(Error::NoEdgeLengths));
        let edges = (0..4).map(|i| Edge::new(i, (i + 1) % 4, 1.0, 1.0, Some(0.5))).collect();
        let g = MeasuredGraph::new(4, vec![0.25; 4], edges).unwrap();
        assert_eq!(g.distances_from(0).unwrap(), vec![0.0, 0.5, 1.0, 0.5]);
    }

    #[test]
    fn hop_distance_to_complement_counts_layers() {
        let g = MeasuredGraph::<f64>::unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let d = g.hop_distance_to_complement(&[true, true, true, true, false]);
        assert_eq!(d, vec![Some(4), Some(3), Some(2), Some(1), Some(0)]);
    }
}
