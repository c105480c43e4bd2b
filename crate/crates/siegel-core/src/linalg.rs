//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Result, SiegelError};

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|v| Complex64::new(v, 0.0))
}

pub fn compose(x: &RMat, y: &RMat) -> CMat {
    CMat::from_fn(x.nrows(), x.ncols(), |i, j| Complex64::new(x[(i, j)], y[(i, j)]))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn imag_part(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

pub fn symmetrize(m: &RMat) -> RMat {
    (m + m.transpose()) * 0.5
}

pub fn symmetrize_c(m: &CMat) -> CMat {
    (m + m.transpose()) * Complex64::new(0.5, 0.0)
}

/// Largest absolute entry of `m - m^t`.
pub fn asymmetry(m: &RMat) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn is_positive_definite(m: &RMat) -> bool {
    m.clone().cholesky().is_some()
}

pub fn min_eigenvalue(m: &RMat) -> f64 {
    SymmetricEigen::new(symmetrize(m))
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric square root and its inverse of a positive-definite matrix.
pub fn sqrt_and_inv_sqrt(m: &RMat) -> Result<(RMat, RMat)> {
    let eig = SymmetricEigen::new(symmetrize(m));
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(SiegelError::Domain("matrix is not positive definite".into()));
    }
    let q = &eig.eigenvectors;
    let s = RMat::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let si = RMat::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    Ok((q * s * q.transpose(), q * si * q.transpose()))
}

/// Inverse of a complex matrix with a Frobenius condition-number guard.
pub fn inverse_checked(m: &CMat, max_cond: f64) -> Result<CMat> {
    let inv = m
        .clone()
        .try_inverse()
        .ok_or_else(|| SiegelError::Conditioning("matrix is singular".into()))?;
    let cond = m.norm() * inv.norm();
    if !cond.is_finite() || cond > max_cond {
        return Err(SiegelError::Conditioning(format!(
            "condition number {cond:.3e} exceeds {max_cond:.1e}"
        )));
    }
    Ok(inv)
}

/// Factor a positive-definite `y = P D P^t` with `P` unit upper-triangular.
///
/// Returns `(P, d)`. The last pivot is `y[n-1][n-1]`, elimination runs upward.
pub fn udu(y: &RMat) -> Result<(RMat, Vec<f64>)> {
    let n = y.nrows();
    let mut p = RMat::identity(n, n);
    let mut d = vec![0.0; n];
    for j in (0..n).rev() {
        let mut dj = y[(j, j)];
        for k in j + 1..n {
            dj -= p[(j, k)] * p[(j, k)] * d[k];
        }
        if !(dj > 0.0) {
            return Err(SiegelError::Numerical(
                "triangular factorization hit a non-positive pivot".into(),
            ));
        }
        d[j] = dj;
        for i in 0..j {
            let mut v = y[(i, j)];
            for k in j + 1..n {
                v -= p[(i, k)] * p[(j, k)] * d[k];
            }
            p[(i, j)] = v / dj;
        }
    }
    Ok((p, d))
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

/// Hermitian matrix function `u f(diag) u^*`.
pub fn hermitian_map(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let u = &eig.eigenvectors;
    let d = CMat::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(f(l), 0.0)));
    u * d * u.adjoint()
}

/// Singular values, descending, by one-sided (Hestenes) Jacobi on the columns.
///
/// Accurate to a few ulps relative to each singular value when the columns
/// are badly scaled but otherwise well conditioned, which plain bidiagonal SVD
/// is not.
pub fn jacobi_singular_values(b: &CMat) -> Vec<f64> {
    let mut a = b.clone();
    let n = a.ncols();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..a.nrows() {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)] * phase.conj();
                    a[(i, p)] = ap * c - aq * s;
                    a[(i, q)] = ap * s + aq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n).map(|j| a.column(j).norm()).collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

pub fn det_c(m: &CMat) -> Complex64 {
    m.clone().lu().determinant()
}
