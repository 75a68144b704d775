//! Spectrum of the generalized problem `L f = λ M f`, `M = diag(μ)`.
//!
//! Both solvers work on the symmetrized operator `S = M^{-1/2} L M^{-1/2}`;
//! an orthonormal eigenvector `y` of `S` maps to the μ-orthonormal
//! eigenfunction `f = M^{-1/2} y`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MeasuredGraph;
use crate::linalg::symmetric_eigen;
use crate::scalar::Real;

/// Below this many vertices `Method::Auto` uses the dense solver.
pub const AUTO_DENSE_LIMIT: usize = 1500;
/// Relative residual at which Ritz pairs are accepted.
pub const ITERATIVE_TOL: f64 = 1e-9;
const ITERATIVE_SEED: u64 = 0x5eed_1a2c;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Iterative,
    Auto,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Method::Dense),
            "iterative" => Ok(Method::Iterative),
            "auto" => Ok(Method::Auto),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Spectrum<T> {
    /// Nondecreasing, `λ₀ ≈ 0`.
    pub eigenvalues: Vec<T>,
    /// μ-orthonormal; `eigenfunctions[k]` belongs to `eigenvalues[k]`.
    pub eigenfunctions: Vec<Vec<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn lambda(&self, k: usize) -> T {
        self.eigenvalues[k]
    }
}

/// Eigenpairs `λ₀ … λ_K` for `K = max_index`.
pub fn compute_spectrum<T: Real>(graph: &MeasuredGraph<T>, max_index: usize, method: Method) -> Result<Spectrum<T>> {
    let n = graph.vertex_count();
    if max_index >= n {
        return Err(Error::KTooLarge { requested: max_index + 1, n });
    }
    let count = max_index + 1;
    let method = match method {
        Method::Auto if n < AUTO_DENSE_LIMIT => Method::Dense,
        Method::Auto => Method::Iterative,
        m => m,
    };
    let (values, vectors) = match method {
        Method::Dense => dense_pairs(graph, count),
        _ => iterative_pairs(graph, count)?,
    };
    let inv_sqrt_mu: Vec<T> = graph.mu().iter().map(|m| T::one() / m.sqrt()).collect();
    let eigenfunctions = vectors
        .into_iter()
        .map(|y| {
            let mut f: Vec<T> = y.iter().zip(&inv_sqrt_mu).map(|(&a, &s)| a * s).collect();
            normalize_sign(&mut f);
            f
        })
        .collect();
    Ok(Spectrum { eigenvalues: values, eigenfunctions })
}

/// Dense row-major `S = M^{-1/2} L M^{-1/2}`.
pub fn symmetrized_matrix<T: Real>(graph: &MeasuredGraph<T>) -> Vec<T> {
    let n = graph.vertex_count();
    let sqrt_mu: Vec<T> = graph.mu().iter().map(|m| m.sqrt()).collect();
    let mut s = vec![T::zero(); n * n];
    for e in graph.edges() {
        let off = e.w / (sqrt_mu[e.i] * sqrt_mu[e.j]);
        s[e.i * n + e.j] -= off;
        s[e.j * n + e.i] -= off;
        s[e.i * n + e.i] += e.w / graph.mu()[e.i];
        s[e.j * n + e.j] += e.w / graph.mu()[e.j];
    }
    s
}

fn dense_pairs<T: Real>(graph: &MeasuredGraph<T>, count: usize) -> (Vec<T>, Vec<Vec<T>>) {
    let n = graph.vertex_count();
    let mut eig = symmetric_eigen(n, &symmetrized_matrix(graph));
    eig.values.truncate(count);
    eig.vectors.truncate(count);
    (eig.values, eig.vectors)
}

fn apply_symmetrized<T: Real>(graph: &MeasuredGraph<T>, sqrt_mu: &[T], y: &[T]) -> Vec<T> {
    let x: Vec<T> = y.iter().zip(sqrt_mu).map(|(&a, &s)| a / s).collect();
    let mut out = graph.apply_laplacian(&x);
    for (o, &s) in out.iter_mut().zip(sqrt_mu) {
        *o /= s;
    }
    out
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Block Krylov iteration with full reorthogonalization and Rayleigh–Ritz
/// extraction. The block width exceeds the number of wanted pairs so that
/// repeated eigenvalues are captured.
fn iterative_pairs<T: Real>(graph: &MeasuredGraph<T>, count: usize) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let n = graph.vertex_count();
    let width = (count + 2).min(n);
    let max_products = 5 * n;
    let tol = T::tol(ITERATIVE_TOL);
    let scale = graph.operator_scale().max(T::min_positive_value());
    let sqrt_mu: Vec<T> = graph.mu().iter().map(|m| m.sqrt()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(ITERATIVE_SEED);
    let random_vector =
        |rng: &mut ChaCha8Rng| -> Vec<T> { (0..n).map(|_| T::lit(StandardNormal.sample(rng))).collect() };

    let mut basis: Vec<Vec<T>> = Vec::new();
    let mut images: Vec<Vec<T>> = Vec::new();
    // projected[i][j] = v_i · S v_j, for j ≤ i
    let mut projected: Vec<Vec<T>> = Vec::new();
    let mut block: Vec<Vec<T>> = (0..width).map(|_| random_vector(&mut rng)).collect();
    let mut products = 0usize;
    let mut last_check = 0usize;
    let mut worst = T::infinity();

    loop {
        let start = basis.len();
        for mut x in std::mem::take(&mut block) {
            if basis.len() == n {
                break;
            }
            for _attempt in 0..4 {
                let before = dot(&x, &x).sqrt();
                for _pass in 0..2 {
                    for v in &basis {
                        let c = dot(v, &x);
                        axpy(-c, v, &mut x);
                    }
                }
                let after = dot(&x, &x).sqrt();
                if before > T::zero() && after > T::tol(1e-10) * before {
                    for xi in &mut x {
                        *xi /= after;
                    }
                    basis.push(x);
                    break;
                }
                x = random_vector(&mut rng);
            }
        }
        for j in start..basis.len() {
            let image = apply_symmetrized(graph, &sqrt_mu, &basis[j]);
            products += 1;
            let row: Vec<T> = (0..=j).map(|i| dot(&basis[i], &image)).collect();
            projected.push(row);
            images.push(image);
        }
        let m = basis.len();
        let grew = m > start;
        let complete = m == n || !grew || products >= max_products;

        if m >= count && (complete || m * 5 >= last_check * 6 + 5 * width) {
            last_check = m;
            let mut h = vec![T::zero(); m * m];
            for i in 0..m {
                for j in 0..=i {
                    h[i * m + j] = projected[i][j];
                    h[j * m + i] = projected[i][j];
                }
            }
            let ritz = symmetric_eigen(m, &h);
            let mut values = Vec::with_capacity(count);
            let mut vectors = Vec::with_capacity(count);
            worst = T::zero();
            for k in 0..count {
                let theta = ritz.values[k];
                let coeffs = &ritz.vectors[k];
                let mut y = vec![T::zero(); n];
                let mut sy = vec![T::zero(); n];
                for (i, &c) in coeffs.iter().enumerate() {
                    axpy(c, &basis[i], &mut y);
                    axpy(c, &images[i], &mut sy);
                }
                axpy(-theta, &y, &mut sy);
                let residual = dot(&sy, &sy).sqrt() / scale;
                worst = worst.max(residual);
                values.push(theta);
                vectors.push(y);
            }
            if worst <= tol {
                return Ok((values, vectors));
            }
        }
        if complete {
            return Err(Error::ConvergenceFailure { iterations: products, residual: worst.as_f64() });
        }
        block = images[start..].to_vec();
    }
}

/// Fixes the sign so that the first entry of (near-)maximal magnitude is positive.
pub fn normalize_sign<T: Real>(f: &mut [T]) {
    let max = f.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    if max <= T::zero() {
        return;
    }
    let cut = max * (T::one() - T::lit(1e-6));
    if let Some(&lead) = f.iter().find(|x| x.abs() >= cut) {
        if lead < T::zero() {
            for x in f.iter_mut() {
                *x = -*x;
            }
        }
    }
}

/// Splits an eigenfunction of a positive eigenvalue into its positive and
/// negative parts `(max(f, 0), max(−f, 0))`.
pub fn eigenfunction_split<T: Real>(graph: &MeasuredGraph<T>, lambda: T, f: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    if f.len() != graph.vertex_count() {
        return Err(Error::LengthMismatch { expected: graph.vertex_count(), got: f.len() });
    }
    let residual = graph.eigen_residual(lambda, f);
    let scale = graph.operator_scale();
    if !(residual <= T::tol(1e-8)) || lambda <= T::tol(1e-9) * scale {
        return Err(Error::NotAnEigenfunction { residual: residual.as_f64() });
    }
    let positive: Vec<T> = f.iter().map(|&x| x.max(T::zero())).collect();
    let negative: Vec<T> = f.iter().map(|&x| (-x).max(T::zero())).collect();
    if positive.iter().all(|&x| x == T::zero()) || negative.iter().all(|&x| x == T::zero()) {
        return Err(Error::OneSidedFunction);
    }
    Ok((positive, negative))
}
