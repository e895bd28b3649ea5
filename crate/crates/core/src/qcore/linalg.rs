//! Dense complex linear-algebra helpers shared by the state layer.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Kahan-compensated sum.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Eigendecomposition of a Hermitian matrix. Returns (eigenvalues, column
/// eigenvectors); the input is symmetrized first to shed numerical skew.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    (vals, eig.eigenvectors)
}

/// Eigenvalues only of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()).scale(0.5);
    sym.symmetric_eigenvalues().iter().copied().collect()
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues are clamped at zero so that tiny numerical negatives do not
/// produce NaN; eigenvalues within eigensolver noise of zero (relative to the
/// largest) are zeroed outright, which keeps the square root exact on the
/// numerical null space.
pub fn sqrtm_psd(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let n = m.nrows();
    let lmax = vals.iter().fold(0.0f64, |a, &b| a.max(b));
    let floor = lmax * 1e-13;
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let clamped = if v <= floor { 0.0 } else { v };
        let s = Complex64::new(clamped.sqrt(), 0.0);
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    &scaled * vecs.adjoint()
}

/// Nuclear norm (sum of singular values).
pub fn nuclear_norm(m: &CMatrix) -> f64 {
    let svd = m.clone().svd(false, false);
    kahan_sum(svd.singular_values.iter().copied())
}

/// Checks `m` is an isometry (`m† m = I`) within `tol`.
pub fn isometry_defect(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    let n = gram.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { C_ONE } else { C_ZERO };
            worst = worst.max((gram[(i, j)] - expect).norm());
        }
    }
    worst
}

pub fn require_isometry(m: &CMatrix, tol: f64, what: &str) -> Result<()> {
    if m.nrows() < m.ncols() {
        return Err(Error::NotIsometry(format!(
            "{what}: output dim {} smaller than input dim {}",
            m.nrows(),
            m.ncols()
        )));
    }
    let defect = isometry_defect(m);
    if defect > tol {
        return Err(Error::NotIsometry(format!("{what}: defect {defect:.3e}")));
    }
    Ok(())
}
