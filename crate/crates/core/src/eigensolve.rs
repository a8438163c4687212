//! Positive eigenpairs of the pencil `A e = lambda B e`.
//!
//! `A` is SPD, `B` may be indefinite. Both solvers work with
//! `mu = u^T B u / u^T A u = 1 / lambda` and never factor `B`:
//!
//! - [`solve_dense`]: congruence `L^{-1} B L^{-T}` with `A = L L^T`, full
//!   symmetric eigendecomposition.
//! - [`solve_successive`]: mode by mode, maximizes `mu` on the `A`-orthogonal
//!   complement of the modes already found. Each step is an inverse-iteration
//!   step `w = A^{-1} B u` accelerated by a three-term Rayleigh-Ritz
//!   (current iterate, `w`, previous search direction).

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::assembly::DiscreteOperatorPair;
use crate::linalg::{axpy, dot, norm2, CsrMatrix, SpdSolver};
use crate::{Error, Result};

/// Largest order handed to [`solve_dense`] by default.
pub const DENSE_THRESHOLD: usize = 2000;

/// Relative threshold below which `mu` is treated as zero: a positive
/// eigenvalue `lambda` larger than `1e12 lambda_1` is roundoff, not spectrum.
pub const MU_FLOOR: f64 = 1e-12;

/// Relative gap under which neighbouring eigenvalues share a cluster id.
pub const CLUSTER_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverSettings {
    pub count: usize,
    /// Target for `||A e - lambda B e|| / ||A e||`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Iterations with `mu <= 0` before a restart.
    pub stall_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            count: 6,
            tolerance: 1e-10,
            max_iterations: 2000,
            stall_iterations: 40,
            restarts: 8,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    pub n: usize,
    pub lambda: f64,
    #[serde(skip)]
    pub vector: Vec<f64>,
    pub residual: f64,
    /// `e^T B e` after normalization.
    pub b_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub cluster: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dense,
    Successive,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenSequence {
    pub method: Method,
    pub requested: usize,
    pub pairs: Vec<EigenPair>,
    /// `<e_i, e_j>_alpha`.
    pub energy_products: Vec<Vec<f64>>,
    /// `int g e_i e_j`.
    pub mass_products: Vec<Vec<f64>>,
    /// No further positive eigenvalue could be found.
    pub exhausted: bool,
    pub warnings: Vec<String>,
}

impl EigenSequence {
    fn new(
        method: Method,
        requested: usize,
        pair: &DiscreteOperatorPair,
        mut pairs: Vec<EigenPair>,
        exhausted: bool,
    ) -> Self {
        assign_clusters(&mut pairs);
        let k = pairs.len();
        let mut energy_products = vec![vec![0.0; k]; k];
        let mut mass_products = vec![vec![0.0; k]; k];
        for i in 0..k {
            let ae = pair.stiffness.mul_vec(&pairs[i].vector);
            let be = pair.mass.mul_vec(&pairs[i].vector);
            for j in 0..k {
                energy_products[i][j] = dot(&ae, &pairs[j].vector);
                mass_products[i][j] = dot(&be, &pairs[j].vector);
            }
        }
        let mut warnings = Vec::new();
        if k < requested {
            warnings.push(format!("partial result: {k} of {requested} positive eigenvalues found"));
        }
        for p in pairs.iter().filter(|p| !p.converged) {
            warnings.push(format!("pair {} did not reach the residual tolerance", p.n));
        }
        EigenSequence {
            method,
            requested,
            pairs,
            energy_products,
            mass_products,
            exhausted,
            warnings,
        }
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }

    pub fn is_partial(&self) -> bool {
        self.pairs.len() < self.requested
    }

    pub fn all_converged(&self) -> bool {
        self.pairs.iter().all(|p| p.converged)
    }

    /// `max_{i != j} |<e_i, e_j>_alpha|`.
    pub fn max_cross_energy(&self) -> f64 {
        off_diagonal_max(&self.energy_products, 0.0)
    }

    /// `max_{i, j} |int g e_i e_j - delta_ij|`.
    pub fn max_mass_deviation(&self) -> f64 {
        off_diagonal_max(&self.mass_products, 1.0)
    }

    /// `max_n |<e_n, e_n>_alpha - lambda_n| / lambda_n`.
    pub fn max_energy_mismatch(&self) -> f64 {
        self.pairs
            .iter()
            .enumerate()
            .map(|(i, p)| (self.energy_products[i][i] - p.lambda).abs() / p.lambda)
            .fold(0.0, f64::max)
    }
}

fn off_diagonal_max(m: &[Vec<f64>], diag: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let target = if i == j { diag } else { 0.0 };
            if i != j || diag != 0.0 {
                worst = worst.max((v - target).abs());
            }
        }
    }
    worst
}

fn assign_clusters(pairs: &mut [EigenPair]) {
    let mut cluster = 0;
    for i in 0..pairs.len() {
        if i > 0 {
            let (a, b) = (pairs[i - 1].lambda, pairs[i].lambda);
            if (b - a).abs() > CLUSTER_TOLERANCE * b.abs().max(a.abs()) {
                cluster += 1;
            }
        }
        pairs[i].cluster = cluster;
    }
}

/// `||A e - lambda B e|| / ||A e||`.
pub fn residual(pair: &DiscreteOperatorPair, lambda: f64, e: &[f64]) -> Result<f64> {
    if e.len() != pair.order() {
        return Err(Error::DimensionMismatch {
            expected: pair.order(),
            found: e.len(),
        });
    }
    Ok(pencil_residual(&pair.stiffness, &pair.mass, lambda, e))
}

fn pencil_residual(a: &CsrMatrix, b: &CsrMatrix, lambda: f64, e: &[f64]) -> f64 {
    let mut r = a.mul_vec(e);
    let an = norm2(&r);
    let be = b.mul_vec(e);
    axpy(-lambda, &be, &mut r);
    if an == 0.0 {
        return f64::INFINITY;
    }
    norm2(&r) / an
}

/// Orients `e`: mode 1 by a nonnegative volume integral, the others by the
/// first clearly nonzero coefficient.
fn orient(pair: &DiscreteOperatorPair, n: usize, e: &mut [f64]) {
    let flip = if n == 1 {
        pair.volume_integral(e).map(|s| s < 0.0).unwrap_or(false)
    } else {
        let big = e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        e.iter().find(|v| v.abs() > 1e-8 * big).is_some_and(|&v| v < 0.0)
    };
    if flip {
        e.iter_mut().for_each(|v| *v = -*v);
    }
}

/// B-normalizes `u` (requires `u^T B u > 0`) and builds the reported pair.
fn finish_pair(pair: &DiscreteOperatorPair, n: usize, mut u: Vec<f64>, iterations: usize, tolerance: f64) -> EigenPair {
    let b = pair.mass.bilinear(&u, &u);
    let s = 1.0 / b.sqrt();
    u.iter_mut().for_each(|v| *v *= s);
    orient(pair, n, &mut u);
    let lambda = pair.stiffness.bilinear(&u, &u);
    let residual = pencil_residual(&pair.stiffness, &pair.mass, lambda, &u);
    EigenPair {
        n,
        lambda,
        b_norm: pair.mass.bilinear(&u, &u),
        vector: u,
        residual,
        iterations,
        converged: residual <= tolerance,
        cluster: 0,
    }
}

/// The `k` smallest positive eigenvalues through a dense congruence.
pub fn solve_dense(pair: &DiscreteOperatorPair, k: usize) -> Result<EigenSequence> {
    let order = pair.order();
    if order > DENSE_THRESHOLD {
        return Err(Error::InvalidOperator(format!(
            "order {order} exceeds the dense threshold {DENSE_THRESHOLD}"
        )));
    }
    let a = pair.stiffness.to_dense();
    let b = pair.mass.to_dense();
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::InvalidOperator("stiffness matrix is not positive definite".into()))?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(&b)
        .ok_or_else(|| Error::InvalidOperator("singular Cholesky factor".into()))?;
    let mut c = l
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(|| Error::InvalidOperator("singular Cholesky factor".into()))?;
    let ct = c.transpose();
    c += ct;
    c *= 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order_idx: Vec<usize> = (0..order).collect();
    order_idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mu_max = eig.eigenvalues.max();
    let floor = if mu_max > 0.0 { MU_FLOOR * mu_max } else { 0.0 };
    let mut pairs = Vec::new();
    for &i in order_idx.iter().take(k) {
        let mu = eig.eigenvalues[i];
        if !(mu > floor) {
            break;
        }
        let y = eig.eigenvectors.column(i).into_owned();
        let e = l
            .tr_solve_lower_triangular(&y)
            .ok_or_else(|| Error::InvalidOperator("singular Cholesky factor".into()))?;
        let n = pairs.len() + 1;
        pairs.push(finish_pair(pair, n, e.as_slice().to_vec(), 1, 1e-8));
    }
    let exhausted = pairs.len() < k;
    Ok(EigenSequence::new(Method::Dense, k, pair, pairs, exhausted))
}

struct Deflation {
    vectors: Vec<Vec<f64>>,
    a_vectors: Vec<Vec<f64>>,
    energies: Vec<f64>,
}

impl Deflation {
    /// Removes the `A`-projection onto every stored vector (twice, for stability).
    fn apply(&self, u: &mut [f64]) {
        for _ in 0..2 {
            for ((e, ae), &en) in self.vectors.iter().zip(&self.a_vectors).zip(&self.energies) {
                let c = dot(ae, u) / en;
                axpy(-c, e, u);
            }
        }
    }
}

fn random_start(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// `A`-orthonormalizes `candidates` against `basis` and each other, dropping
/// vectors that are numerically dependent.
fn extend_a_orthonormal(
    a: &CsrMatrix,
    basis: &mut Vec<Vec<f64>>,
    a_basis: &mut Vec<Vec<f64>>,
    candidates: Vec<Vec<f64>>,
) {
    for mut v in candidates {
        let mut av = a.mul_vec(&v);
        let start = dot(&v, &av).max(0.0).sqrt();
        if start == 0.0 || !start.is_finite() {
            continue;
        }
        for _ in 0..2 {
            for (s, as_) in basis.iter().zip(a_basis.iter()) {
                let c = dot(as_, &v);
                axpy(-c, s, &mut v);
                axpy(-c, as_, &mut av);
            }
        }
        av = a.mul_vec(&v);
        let nrm = dot(&v, &av).max(0.0).sqrt();
        if nrm <= 1e-14 * start {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= nrm);
        av.iter_mut().for_each(|x| *x /= nrm);
        basis.push(v);
        a_basis.push(av);
    }
}

/// Successive maximization of `mu = u^T B u / u^T A u` over the
/// `A`-orthogonal complement of the modes already found.
pub fn solve_successive(pair: &DiscreteOperatorPair, settings: &SolverSettings) -> Result<EigenSequence> {
    if settings.count == 0 {
        return Err(Error::config("count", "eigenvalue count must be at least 1"));
    }
    let a = &pair.stiffness;
    let b = &pair.mass;
    let order = pair.order();
    let solver = SpdSolver::new(a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut deflation = Deflation {
        vectors: Vec::new(),
        a_vectors: Vec::new(),
        energies: Vec::new(),
    };
    let mut pairs: Vec<EigenPair> = Vec::new();
    let mut exhausted = false;
    let mut mu_first = 0.0;

    'modes: for n in 1..=settings.count.min(order) {
        let floor = MU_FLOOR * mu_first;
        let mut attempt = 0;
        let result = loop {
            if attempt > settings.restarts {
                break None;
            }
            attempt += 1;
            let mut u = random_start(&mut rng, order);
            deflation.apply(&mut u);
            match iterate_mode(a, b, &solver, &deflation, u, floor, settings)? {
                Some(found) => break Some(found),
                None => continue,
            }
        };
        let Some((u, iterations)) = result else {
            exhausted = true;
            break 'modes;
        };
        let mut u = u;
        deflation.apply(&mut u);
        let p = finish_pair(pair, n, u, iterations, settings.tolerance);
        if n == 1 {
            mu_first = 1.0 / p.lambda;
        }
        deflation.a_vectors.push(a.mul_vec(&p.vector));
        deflation.energies.push(p.lambda);
        deflation.vectors.push(p.vector.clone());
        pairs.push(p);
    }
    Ok(EigenSequence::new(
        Method::Successive,
        settings.count,
        pair,
        pairs,
        exhausted,
    ))
}

/// Runs one mode from start vector `u`. `None` when `mu` stays at or below
/// `floor` for `stall_iterations` consecutive steps.
fn iterate_mode(
    a: &CsrMatrix,
    b: &CsrMatrix,
    solver: &SpdSolver,
    deflation: &Deflation,
    u0: Vec<f64>,
    floor: f64,
    settings: &SolverSettings,
) -> Result<Option<(Vec<f64>, usize)>> {
    let mut basis = Vec::new();
    let mut a_basis = Vec::new();
    extend_a_orthonormal(a, &mut basis, &mut a_basis, vec![u0]);
    let (Some(mut u), Some(mut au)) = (basis.pop(), a_basis.pop()) else {
        return Ok(None);
    };
    let mut direction: Option<Vec<f64>> = None;
    let mut stall = 0;
    let mut best_residual = f64::INFINITY;
    let mut best: Option<Vec<f64>> = None;
    for it in 0..settings.max_iterations {
        let bu = b.mul_vec(&u);
        let theta = dot(&u, &bu);
        if theta > floor {
            stall = 0;
            let lambda = 1.0 / theta;
            let mut r = au.clone();
            axpy(-lambda, &bu, &mut r);
            let res = norm2(&r) / norm2(&au);
            if res <= settings.tolerance {
                return Ok(Some((u, it + 1)));
            }
            if res < best_residual {
                best_residual = res;
                best = Some(u.clone());
            }
        } else {
            stall += 1;
            if stall >= settings.stall_iterations {
                return Ok(None);
            }
        }

        let guess: Vec<f64> = u.iter().map(|x| theta * x).collect();
        let mut w = solver.solve(&bu, Some(&guess))?;
        deflation.apply(&mut w);

        let mut basis = vec![u.clone()];
        let mut a_basis = vec![au.clone()];
        let mut candidates = vec![w];
        if let Some(p) = direction.take() {
            candidates.push(p);
        }
        extend_a_orthonormal(a, &mut basis, &mut a_basis, candidates);
        if basis.len() == 1 {
            break;
        }
        let m = basis.len();
        let b_basis: Vec<Vec<f64>> = basis.iter().map(|s| b.mul_vec(s)).collect();
        let small = DMatrix::from_fn(m, m, |i, j| {
            0.5 * (dot(&basis[i], &b_basis[j]) + dot(&basis[j], &b_basis[i]))
        });
        let eig = SymmetricEigen::new(small);
        let top = eig.eigenvalues.imax();
        let y = eig.eigenvectors.column(top);

        let mut next = vec![0.0; u.len()];
        let mut p = vec![0.0; u.len()];
        for i in 0..m {
            axpy(y[i], &basis[i], &mut next);
            if i > 0 {
                axpy(y[i], &basis[i], &mut p);
            }
        }
        deflation.apply(&mut next);
        let mut an = a.mul_vec(&next);
        let nrm = dot(&next, &an).sqrt();
        if !(nrm > 0.0) {
            return Err(Error::Numerical("iterate collapsed to zero".into()));
        }
        next.iter_mut().for_each(|x| *x /= nrm);
        an.iter_mut().for_each(|x| *x /= nrm);
        u = next;
        au = an;
        direction = Some(p);
    }
    // iteration cap or stagnation: return the best iterate, flagged by its residual
    let bu = b.mul_vec(&u);
    if dot(&u, &bu) > floor {
        return Ok(Some((u, settings.max_iterations)));
    }
    Ok(best.map(|v| (v, settings.max_iterations)))
}

/// Number of sign alternations in `v`, ignoring entries below `1e-10 max|v|`.
pub fn sign_changes(v: &[f64]) -> usize {
    let big = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut last = 0.0;
    let mut count = 0;
    for &x in v {
        if x.abs() <= 1e-10 * big {
            continue;
        }
        if last != 0.0 && (x > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = x;
    }
    count
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub lambda: f64,
    /// `<f_n, f_n>_alpha` with `f_n = e_n / sqrt(lambda_n)`.
    pub f_energy: f64,
    pub inverse_lambda: f64,
    /// `int g f_n^2`.
    pub g_f2: f64,
    /// `int (g1 + g2) f_n^2`.
    pub gplus_f2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    pub max_f_energy_error: f64,
    pub max_identity_error: f64,
    /// `min_n (int g+ f_n^2 - 1/lambda_n)`.
    pub min_bound_margin: f64,
    pub increasing: bool,
    pub convex: bool,
    pub ratio_last_first: f64,
}

/// Identities for `f_n = e_n / sqrt(lambda_n)` and the trend of `lambda_n`.
pub fn growth_diagnostics(seq: &EigenSequence, pair: &DiscreteOperatorPair) -> Result<GrowthReport> {
    if seq.pairs.is_empty() {
        return Err(Error::Numerical("empty eigen sequence".into()));
    }
    let mut rows = Vec::new();
    for p in &seq.pairs {
        let s = 1.0 / p.lambda.sqrt();
        let f: Vec<f64> = p.vector.iter().map(|v| v * s).collect();
        rows.push(GrowthRow {
            n: p.n,
            lambda: p.lambda,
            f_energy: pair.energy_inner(&f, &f)?,
            inverse_lambda: 1.0 / p.lambda,
            g_f2: pair.mass_inner(&f, &f)?,
            gplus_f2: pair.mass_plus_inner(&f, &f)?,
        });
    }
    let l: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    let increasing = l.windows(2).all(|w| w[1] > w[0]);
    let tol = 1e-8;
    let convex = l.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] >= -tol * w[2]);
    Ok(GrowthReport {
        max_f_energy_error: rows.iter().map(|r| (r.f_energy - 1.0).abs()).fold(0.0, f64::max),
        max_identity_error: rows
            .iter()
            .map(|r| (r.inverse_lambda - r.g_f2).abs())
            .fold(0.0, f64::max),
        min_bound_margin: rows
            .iter()
            .map(|r| r.gplus_f2 - r.inverse_lambda)
            .fold(f64::INFINITY, f64::min),
        increasing,
        convex,
        ratio_last_first: l[l.len() - 1] / l[0],
        rows,
    })
}
