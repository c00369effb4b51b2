//! Dense matrix helpers shared by the numerical modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<C64>;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(c)
}

pub fn fro(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn fro_r(m: &RMat) -> f64 {
    m.iter().map(|z| z * z).sum::<f64>().sqrt()
}

/// `‖L − R‖ / (1 + ‖L‖ + ‖R‖)` in the Frobenius norm.
pub fn rel_mat(l: &CMat, r: &CMat) -> f64 {
    fro(&(l - r)) / (1.0 + fro(l) + fro(r))
}

pub fn rel_mat_r(l: &RMat, r: &RMat) -> f64 {
    fro_r(&(l - r)) / (1.0 + fro_r(l) + fro_r(r))
}

/// `|L − R| / (1 + |L| + |R|)`.
pub fn rel(l: C64, r: C64) -> f64 {
    (l - r).norm() / (1.0 + l.norm() + r.norm())
}

pub fn rel_r(l: f64, r: f64) -> f64 {
    (l - r).abs() / (1.0 + l.abs() + r.abs())
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn diag(d: &[C64]) -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_column_slice(d))
}

pub fn diag_r(d: &[f64]) -> RMat {
    RMat::from_diagonal(&nalgebra::DVector::from_column_slice(d))
}

pub fn comm(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Linear combination `Σ w_i M_i` of equally sized matrices.
pub fn lin_comb(weights: &[C64], mats: &[CMat]) -> CMat {
    let n = mats[0].nrows();
    let mut out = CMat::zeros(n, n);
    for (w, m) in weights.iter().zip(mats) {
        out += m * *w;
    }
    out
}

pub fn lin_comb_r(weights: &[f64], mats: &[RMat]) -> RMat {
    let n = mats[0].nrows();
    let mut out = RMat::zeros(n, n);
    for (w, m) in weights.iter().zip(mats) {
        out += m * *w;
    }
    out
}

/// Numerical rank of the row vectors, threshold `tol · σ_max`.
pub fn numerical_rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let m = RMat::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    let gram = &m * m.transpose();
    let eig = nalgebra::SymmetricEigen::new(gram);
    let sv: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax).count()
}

pub fn cpow(z: C64, e: i64) -> C64 {
    z.powi(e as i32)
}

/// Finite value or `None`, for JSON-safe reporting.
pub fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}
