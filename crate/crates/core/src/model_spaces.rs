//! Flat model spaces: circles of length `a` and thin tori with side lengths
//! `(a, …, a, a^{−(n−1)})`, their grid discretizations and exact spectra.
//!
//! Grid vertices are indexed row-major, the last dimension varying fastest.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, MeasuredGraph};
use crate::scalar::Real;

/// Default cap on the number of grid vertices.
pub const DEFAULT_VERTEX_CAP: usize = 250_000;
/// Default cap on the lattice box enumerated for an exact spectrum.
pub const DEFAULT_ENUMERATION_CAP: u128 = 50_000_000;
/// Minimum points per dimension under the points-per-unit heuristic.
pub const MIN_POINTS_PER_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Resolution<T> {
    /// Points per unit length, at least [`MIN_POINTS_PER_DIM`] per dimension.
    PerUnit(T),
    /// Explicit per-dimension counts.
    Counts(Vec<usize>),
}

/// A flat torus `ℝⁿ/Γ`. For `n = 1`, `a` is the circle length; for `n ≥ 2`,
/// `a ∈ (0, 1]` and the sides are `(a, …, a, a^{−(n−1)})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusSpec<T> {
    pub n: usize,
    pub a: T,
    pub resolution: Resolution<T>,
}

impl<T: Real> TorusSpec<T> {
    pub fn new(n: usize, a: T, resolution: Resolution<T>) -> Result<Self> {
        let spec = Self { n, a, resolution };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_counts(n: usize, a: T, counts: &[usize]) -> Result<Self> {
        Self::new(n, a, Resolution::Counts(counts.to_vec()))
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::BadParameter("torus dimension must be at least 1".into()));
        }
        if !self.a.is_finite() || self.a <= T::zero() || (self.n >= 2 && self.a > T::one()) {
            return Err(Error::BadParameter(format!("torus parameter a = {} out of range", self.a)));
        }
        match &self.resolution {
            Resolution::PerUnit(r) if !r.is_finite() || *r <= T::zero() => {
                Err(Error::BadResolution(format!("points per unit must be positive, got {r}")))
            }
            Resolution::Counts(c) if c.len() != self.n => {
                Err(Error::BadResolution(format!("expected {} counts, got {}", self.n, c.len())))
            }
            Resolution::Counts(c) if c.iter().any(|&m| m < 3) => {
                Err(Error::BadResolution(format!("every count must be at least 3, got {c:?}")))
            }
            _ => Ok(()),
        }
    }

    pub fn side_lengths(&self) -> Vec<T> {
        thin_torus_sides(self.n, self.a)
    }

    pub fn counts(&self) -> Vec<usize> {
        match &self.resolution {
            Resolution::Counts(c) => c.clone(),
            Resolution::PerUnit(r) => self
                .side_lengths()
                .iter()
                .map(|&l| (l * *r).round().to_usize().unwrap_or(usize::MAX).max(MIN_POINTS_PER_DIM))
                .collect(),
        }
    }

    /// Grid spacings `h_i = L_i / N_i`.
    pub fn spacings(&self) -> Vec<T> {
        self.side_lengths().iter().zip(self.counts()).map(|(&l, m)| l / T::from_usize_lossy(m)).collect()
    }

    pub fn vertex_count(&self) -> Option<usize> {
        self.counts().iter().try_fold(1usize, |acc, &m| acc.checked_mul(m))
    }
}

/// `(a, …, a, a^{−(n−1)})`; just `(a)` when `n = 1`.
pub fn thin_torus_sides<T: Real>(n: usize, a: T) -> Vec<T> {
    if n == 1 {
        return vec![a];
    }
    let mut sides = vec![a; n];
    sides[n - 1] = a.powi(-(n as i32 - 1));
    sides
}

/// Generators of the dual lattice: `1/a` in the first `n−1` directions and
/// `a^{n−1}` in the last; `1/a` when `n = 1`.
pub fn dual_generators<T: Real>(n: usize, a: T) -> Vec<T> {
    thin_torus_sides(n, a).into_iter().map(|l| T::one() / l).collect()
}

/// `N`-cycle discretizing the circle of length `a`.
pub fn circle_graph<T: Real>(a: T, points: usize) -> Result<MeasuredGraph<T>> {
    if points < 3 {
        return Err(Error::BadResolution(format!("a circle needs at least 3 points, got {points}")));
    }
    if !a.is_finite() || a <= T::zero() {
        return Err(Error::BadParameter(format!("circle length must be positive, got {a}")));
    }
    grid_graph(&[a], &[points])
}

pub fn torus_graph<T: Real>(spec: &TorusSpec<T>, cap: usize) -> Result<MeasuredGraph<T>> {
    spec.validate()?;
    let counts = spec.counts();
    let vertices = spec.vertex_count().unwrap_or(usize::MAX);
    if vertices > cap {
        return Err(Error::TooLarge { vertices, cap });
    }
    grid_graph(&spec.side_lengths(), &counts)
}

fn grid_graph<T: Real>(sides: &[T], counts: &[usize]) -> Result<MeasuredGraph<T>> {
    let n: usize = counts.iter().product();
    let mu = T::one() / T::from_usize_lossy(n);
    let spacing: Vec<T> = sides.iter().zip(counts).map(|(&l, &m)| l / T::from_usize_lossy(m)).collect();
    let density = T::one() / sides.iter().fold(T::one(), |acc, &l| acc * l);
    let strides = strides(counts);

    let mut edges = Vec::with_capacity(n * counts.len());
    for v in 0..n {
        for (dim, &m) in counts.iter().enumerate() {
            let coord = (v / strides[dim]) % m;
            let u = v - coord * strides[dim] + ((coord + 1) % m) * strides[dim];
            let h = spacing[dim];
            let cross = spacing.iter().enumerate().filter(|&(j, _)| j != dim).fold(T::one(), |acc, (_, &s)| acc * s);
            edges.push(Edge::new(v, u, mu / (h * h), density * cross, Some(h)));
        }
    }
    MeasuredGraph::new(n, vec![mu; n], edges)
}

fn strides(counts: &[usize]) -> Vec<usize> {
    let mut s = vec![1; counts.len()];
    for d in (0..counts.len().saturating_sub(1)).rev() {
        s[d] = s[d + 1] * counts[d + 1];
    }
    s
}

/// Grid coordinates of vertex `v`.
pub fn grid_coordinates(counts: &[usize], v: usize) -> Vec<usize> {
    strides(counts).iter().zip(counts).map(|(&s, &m)| (v / s) % m).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactSpectrum<T> {
    /// Nondecreasing, with multiplicity.
    pub eigenvalues: Vec<T>,
    /// Integer coefficients of the dual lattice point behind each eigenvalue.
    pub generators: Vec<Vec<i64>>,
}

impl<T: Real> ExactSpectrum<T> {
    pub fn lambda(&self, k: usize) -> T {
        self.eigenvalues[k]
    }
}

/// `0` followed by the pairs `4π²m²/a²`.
pub fn circle_exact_spectrum<T: Real>(a: T, max_index: usize) -> ExactSpectrum<T> {
    let mut eigenvalues = Vec::with_capacity(max_index + 1);
    let mut generators = Vec::with_capacity(max_index + 1);
    eigenvalues.push(T::zero());
    generators.push(vec![0]);
    let c = T::lit(4.0) * T::PI() * T::PI() / (a * a);
    let mut m = 1i64;
    while eigenvalues.len() <= max_index {
        let v = c * T::lit((m * m) as f64);
        for g in [m, -m] {
            if eigenvalues.len() <= max_index {
                eigenvalues.push(v);
                generators.push(vec![g]);
            }
        }
        m += 1;
    }
    ExactSpectrum { eigenvalues, generators }
}

/// The `max_index + 1` smallest values of `4π²|γ*|²` over the dual lattice of
/// the thin torus.
pub fn torus_exact_spectrum<T: Real>(n: usize, a: T, max_index: usize) -> Result<ExactSpectrum<T>> {
    torus_exact_spectrum_capped(n, a, max_index, DEFAULT_ENUMERATION_CAP)
}

pub fn torus_exact_spectrum_capped<T: Real>(n: usize, a: T, max_index: usize, cap: u128) -> Result<ExactSpectrum<T>> {
    if n < 2 {
        return Err(Error::BadParameter("thin torus needs n ≥ 2".into()));
    }
    if !(a > T::zero() && a <= T::one()) {
        return Err(Error::BadParameter(format!("thin torus parameter a = {a} must lie in (0, 1]")));
    }
    lattice_spectrum(&dual_generators(n, a), max_index, cap)
}

/// Spectrum of the flat torus whose dual lattice is `⊕ b_i ℤ`.
///
/// All lattice points inside a ball of radius `R` are enumerated; `R` doubles
/// until the ball holds at least `max_index + 1` points, at which point the
/// smallest ones are exactly the smallest of the whole lattice.
pub fn lattice_spectrum<T: Real>(generators: &[T], max_index: usize, cap: u128) -> Result<ExactSpectrum<T>> {
    let b: Vec<f64> = generators.iter().map(|g| g.as_f64().abs()).collect();
    let mut radius = b.iter().cloned().fold(f64::INFINITY, f64::min);
    loop {
        let bounds: Vec<i64> = b.iter().map(|&bi| (radius / bi).floor() as i64).collect();
        let points = bounds.iter().fold(1u128, |acc, &m| acc.saturating_mul(2 * m as u128 + 1));
        if points > cap {
            return Err(Error::EnumerationOverflow { points, cap });
        }
        let mut found: Vec<(f64, Vec<i64>)> = Vec::new();
        let mut m: Vec<i64> = bounds.iter().map(|&x| -x).collect();
        'enumerate: loop {
            let q: f64 = m.iter().zip(&b).map(|(&mi, &bi)| (mi as f64 * bi).powi(2)).sum();
            if q <= radius * radius {
                found.push((q, m.clone()));
            }
            for d in (0..m.len()).rev() {
                if m[d] < bounds[d] {
                    m[d] += 1;
                    continue 'enumerate;
                }
                m[d] = -bounds[d];
            }
            break;
        }
        if found.len() > max_index {
            found.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
            found.truncate(max_index + 1);
            let c = T::lit(4.0) * T::PI() * T::PI();
            let eigenvalues = found
                .iter()
                .map(|(_, m)| {
                    let q = m.iter().zip(generators).fold(T::zero(), |acc, (&mi, &g)| {
                        let x = T::lit(mi as f64) * g;
                        acc + x * x
                    });
                    c * q
                })
                .collect();
            let generators = found.into_iter().map(|(_, m)| m).collect();
            return Ok(ExactSpectrum { eigenvalues, generators });
        }
        radius *= 2.0;
    }
}

/// Spectrum of a product of cycles with the given counts and spacings: the
/// sums `Σ_i (4/h_i²) sin²(π j_i/N_i)`, smallest `max_index + 1`.
pub fn grid_spectrum<T: Real>(counts: &[usize], spacings: &[T], max_index: usize) -> Vec<T> {
    let per_dim: Vec<Vec<T>> = counts
        .iter()
        .zip(spacings)
        .map(|(&m, &h)| {
            (0..m)
                .map(|j| {
                    let s = (T::PI() * T::from_usize_lossy(j) / T::from_usize_lossy(m)).sin();
                    T::lit(4.0) * s * s / (h * h)
                })
                .collect()
        })
        .collect();
    let mut values = vec![T::zero()];
    for dim in &per_dim {
        let mut next = Vec::with_capacity(values.len() * dim.len());
        for &v in &values {
            for &d in dim {
                next.push(v + d);
            }
        }
        values = next;
    }
    values.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    values.truncate(max_index + 1);
    values
}

/// `cos(2π j c/N)` along dimension `dim` of the grid, normalized in `L²(μ)`.
/// An exact eigenfunction of the grid graph for eigenvalue
/// `(4/h²) sin²(π j/N)`.
pub fn grid_cos_mode<T: Real>(counts: &[usize], dim: usize, j: usize) -> Vec<T> {
    let n: usize = counts.iter().product();
    let m = T::from_usize_lossy(counts[dim]);
    let mut f: Vec<T> = (0..n)
        .map(|v| {
            let c = T::from_usize_lossy(grid_coordinates(counts, v)[dim]);
            (T::lit(2.0) * T::PI() * T::from_usize_lossy(j) * c / m).cos()
        })
        .collect();
    let norm = (f.iter().fold(T::zero(), |acc, &x| acc + x * x) / T::from_usize_lossy(n)).sqrt();
    for x in &mut f {
        *x /= norm;
    }
    f
}

/// `(k, ratio, lower_bound)` with `k = 2⌊1/aⁿ⌋ + 1`, `ratio = 1/a^{2n}` and
/// `lower_bound = k²/9`.
pub fn ratio_witness(n: usize, a: f64) -> Result<(usize, f64, f64)> {
    if n < 2 || !(a > 0.0 && a < 1.0) {
        return Err(Error::BadParameter(format!("ratio witness needs n ≥ 2 and a in (0, 1), got n = {n}, a = {a}")));
    }
    let inv = a.powi(-(n as i32));
    let nearest = inv.round();
    let floor = if (inv - nearest).abs() <= 1e-9 * inv { nearest } else { inv.floor() };
    let k = 2 * floor as usize + 1;
    let ratio = inv * inv;
    let lower = (k * k) as f64 / 9.0;
    debug_assert!(ratio >= lower);
    Ok((k, ratio, lower))
}

/// A model space together with its discretization.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpace<T> {
    Circle { a: T, points: usize },
    Torus(TorusSpec<T>),
}

impl<T: Real> ModelSpace<T> {
    pub fn label(&self) -> String {
        match self {
            ModelSpace::Circle { a, points } => format!("circle:a={a}:N={points}"),
            ModelSpace::Torus(s) => {
                let counts: Vec<String> = s.counts().iter().map(|c| c.to_string()).collect();
                format!("torus:n={}:a={}:N={}", s.n, s.a, counts.join("x"))
            }
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ModelSpace::Circle { .. } => 1,
            ModelSpace::Torus(s) => s.n,
        }
    }

    pub fn side_lengths(&self) -> Vec<T> {
        match self {
            ModelSpace::Circle { a, .. } => vec![*a],
            ModelSpace::Torus(s) => s.side_lengths(),
        }
    }

    pub fn counts(&self) -> Vec<usize> {
        match self {
            ModelSpace::Circle { points, .. } => vec![*points],
            ModelSpace::Torus(s) => s.counts(),
        }
    }

    pub fn spacings(&self) -> Vec<T> {
        self.side_lengths().iter().zip(self.counts()).map(|(&l, m)| l / T::from_usize_lossy(m)).collect()
    }

    pub fn graph(&self, cap: usize) -> Result<MeasuredGraph<T>> {
        match self {
            ModelSpace::Circle { a, points } => {
                if *points > cap {
                    return Err(Error::TooLarge { vertices: *points, cap });
                }
                circle_graph(*a, *points)
            }
            ModelSpace::Torus(s) => torus_graph(s, cap),
        }
    }

    /// Continuum spectrum.
    pub fn exact_spectrum(&self, max_index: usize, cap: u128) -> Result<ExactSpectrum<T>> {
        match self {
            ModelSpace::Circle { a, .. } => Ok(circle_exact_spectrum(*a, max_index)),
            ModelSpace::Torus(s) if s.n == 1 => Ok(circle_exact_spectrum(s.a, max_index)),
            ModelSpace::Torus(s) => torus_exact_spectrum_capped(s.n, s.a, max_index, cap),
        }
    }

    /// Spectrum of the grid graph in closed form.
    pub fn grid_spectrum(&self, max_index: usize) -> Vec<T> {
        grid_spectrum(&self.counts(), &self.spacings(), max_index)
    }

    /// Continuum Cheeger constant `4/L_max`, attained by two complementary
    /// slabs across the longest side.
    pub fn h1_closed_form(&self) -> T {
        let longest = self.side_lengths().into_iter().fold(T::zero(), T::max);
        T::lit(4.0) / longest
    }

    /// `½√(Σ L_i²)`, which is `a/2` for the circle.
    pub fn diameter(&self) -> T {
        let s = self.side_lengths().iter().fold(T::zero(), |acc, &l| acc + l * l);
        s.sqrt() / T::lit(2.0)
    }

    /// Periodic distance to the hyperplane `{x_i = 0}`, per dimension. Each is
    /// 1-Lipschitz for the grid metric.
    pub fn coordinate_functions(&self) -> Vec<Vec<T>> {
        let counts = self.counts();
        let sides = self.side_lengths();
        let spacing = self.spacings();
        let n: usize = counts.iter().product();
        (0..counts.len())
            .map(|dim| {
                (0..n)
                    .map(|v| {
                        let x = T::from_usize_lossy(grid_coordinates(&counts, v)[dim]) * spacing[dim];
                        x.min(sides[dim] - x)
                    })
                    .collect()
            })
            .collect()
    }
}
