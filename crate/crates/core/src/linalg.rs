//! Sparse symmetric matrices and SPD solvers.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Compressed sparse row matrix with sorted, duplicate-free columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    order: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets, summing duplicates in input order.
    pub fn from_triplets(order: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        // stable sort keeps the summation order of duplicates deterministic
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0; order + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            assert!(i < order && j < order, "triplet ({i}, {j}) outside order {order}");
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                cols.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..order {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            order,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        CsrMatrix {
            order: n,
            row_ptr: (0..=n).collect(),
            cols: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.order).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.order];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// `u^T M v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        (0..self.order)
            .map(|i| u[i] * self.row(i).map(|(j, a)| a * v[j]).sum::<f64>())
            .sum()
    }

    /// Exact structural and value symmetry.
    pub fn is_symmetric(&self) -> bool {
        (0..self.order).all(|i| self.row(i).all(|(j, v)| self.get(j, i) == v))
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.order)
            .flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.order, self.order);
        for i in 0..self.order {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// One `i j value` line per stored entry, 0-based, sorted by `(i, j)`.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.order {
            for (j, v) in self.row(i) {
                let _ = writeln!(out, "{i} {j} {v:.16e}");
            }
        }
        out
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    for v in x {
        *v *= alpha;
    }
}

/// Cholesky factor of a banded SPD matrix, stored row-wise in the band.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    order: usize,
    band: usize,
    // l[i * (band + 1) + (j + band - i)] = L[i][j] for i - band <= j <= i
    l: Vec<f64>,
}

impl BandCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.order();
        let band = a.bandwidth();
        let w = band + 1;
        let mut l = vec![0.0; n * w];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    l[i * w + (j + band - i)] = v;
                }
            }
        }
        for i in 0..n {
            let j0 = i.saturating_sub(band);
            for j in j0..=i {
                let k0 = j0.max(j.saturating_sub(band));
                let mut s = l[i * w + (j + band - i)];
                for k in k0..j {
                    s -= l[i * w + (k + band - i)] * l[j * w + (k + band - j)];
                }
                if j == i {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::InvalidOperator(format!(
                            "matrix is not positive definite (pivot {s:e} at row {i})"
                        )));
                    }
                    l[i * w + band] = s.sqrt();
                } else {
                    l[i * w + (j + band - i)] = s / l[j * w + band];
                }
            }
        }
        Ok(BandCholesky { order: n, band, l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, band, w) = (self.order, self.band, self.band + 1);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(band)..i {
                s -= self.l[i * w + (k + band - i)] * y[k];
            }
            y[i] = s / self.l[i * w + band];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n.min(i + band + 1) {
                s -= self.l[k * w + (i + band - k)] * y[k];
            }
            y[i] = s / self.l[i * w + band];
        }
        y
    }
}

/// Conjugate gradients preconditioned by symmetric Gauss-Seidel.
#[derive(Debug, Clone)]
pub struct PcgSolver {
    matrix: CsrMatrix,
    diag: Vec<f64>,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl PcgSolver {
    pub fn new(matrix: CsrMatrix, tolerance: f64) -> Result<Self> {
        let diag = matrix.diagonal();
        if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
            return Err(Error::InvalidOperator(format!("nonpositive diagonal entry at row {i}")));
        }
        let max_iterations = 20 * matrix.order().max(100);
        Ok(PcgSolver {
            matrix,
            diag,
            tolerance,
            max_iterations,
        })
    }

    fn precondition(&self, r: &[f64]) -> Vec<f64> {
        let n = r.len();
        let a = &self.matrix;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = r[i];
            for (j, v) in a.row(i) {
                if j < i {
                    s -= v * y[j];
                }
            }
            y[i] = s / self.diag[i];
        }
        for i in 0..n {
            y[i] *= self.diag[i];
        }
        let mut z = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for (j, v) in a.row(i) {
                if j > i {
                    s -= v * z[j];
                }
            }
            z[i] = s / self.diag[i];
        }
        z
    }

    pub fn solve(&self, b: &[f64], guess: Option<&[f64]>) -> Result<Vec<f64>> {
        let n = b.len();
        let bnorm = norm2(b);
        if bnorm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let mut x = guess.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
        let mut r = b.to_vec();
        let ax = self.matrix.mul_vec(&x);
        axpy(-1.0, &ax, &mut r);
        let mut z = self.precondition(&r);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut ap = vec![0.0; n];
        for _ in 0..self.max_iterations {
            if norm2(&r) <= self.tolerance * bnorm {
                return Ok(x);
            }
            self.matrix.mul_vec_into(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return Err(Error::InvalidOperator(
                    "conjugate gradients met a nonpositive curvature direction".into(),
                ));
            }
            let step = rz / pap;
            axpy(step, &p, &mut x);
            axpy(-step, &ap, &mut r);
            z = self.precondition(&r);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for (pi, zi) in p.iter_mut().zip(&z) {
                *pi = zi + beta * *pi;
            }
        }
        if norm2(&r) <= 1e3 * self.tolerance * bnorm {
            return Ok(x);
        }
        Err(Error::Numerical(format!(
            "conjugate gradients did not reach relative residual {:e}",
            self.tolerance
        )))
    }
}

/// Direct banded factorization for narrow-band matrices, PCG otherwise.
#[derive(Debug, Clone)]
pub enum SpdSolver {
    Banded(BandCholesky),
    Iterative(PcgSolver),
}

/// Widest band factored directly.
pub const MAX_DIRECT_BAND: usize = 64;

impl SpdSolver {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        if a.bandwidth() <= MAX_DIRECT_BAND {
            Ok(SpdSolver::Banded(BandCholesky::factor(a)?))
        } else {
            Ok(SpdSolver::Iterative(PcgSolver::new(a.clone(), 1e-13)?))
        }
    }

    pub fn solve(&self, b: &[f64], guess: Option<&[f64]>) -> Result<Vec<f64>> {
        match self {
            SpdSolver::Banded(c) => Ok(c.solve(b)),
            SpdSolver::Iterative(p) => p.solve(b, guess),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 + 0.1 * i as f64));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (1, 0, 2.0), (0, 0, 0.5), (0, 1, 2.0)]);
        assert_eq!(m.get(0, 0), 1.5);
        assert_eq!(m.nnz(), 3);
        assert!(m.is_symmetric());
        assert_eq!(
            m.to_coordinate_text().lines().next().unwrap(),
            "0 0 1.5000000000000000e0"
        );
    }

    #[test]
    fn banded_and_pcg_agree_with_dense() {
        let a = laplacian_1d(40);
        let b: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let dense = a
            .to_dense()
            .cholesky()
            .unwrap()
            .solve(&nalgebra::DVector::from_vec(b.clone()));
        let x1 = BandCholesky::factor(&a).unwrap().solve(&b);
        let x2 = PcgSolver::new(a, 1e-14).unwrap().solve(&b, None).unwrap();
        for i in 0..40 {
            assert!((x1[i] - dense[i]).abs() < 1e-12);
            assert!((x2[i] - dense[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = CsrMatrix::from_diagonal(&[1.0, -1.0]);
        assert!(matches!(BandCholesky::factor(&a), Err(Error::InvalidOperator(_))));
    }
}
