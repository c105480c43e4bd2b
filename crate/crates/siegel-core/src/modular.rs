//! Degree-one ground truth: the discriminant form, its Petersson norm, the
//! weight-12 density `y^12 |Delta|^2 / <Delta, Delta>` and the weight-12
//! Laplacian eigenvalue check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{validation, Result, SiegelError};
use crate::integration::adaptive_quad;
use crate::linalg::RMat;
use crate::symplectic::{apply_maass_laplacian, SiegelPoint, SymplecticMatrix};

/// Fourier coefficients `a(1..=N)` of a cusp form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QExpansion {
    pub weight: u32,
    pub coefficients: Vec<f64>,
}

impl QExpansion {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `sum a(m) q^m`, `q = exp(2 pi i z)`.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let q = (Complex64::new(0.0, 2.0 * PI) * z).exp();
        // Horner from the top coefficient
        let mut acc = Complex64::new(0.0, 0.0);
        for a in self.coefficients.iter().rev() {
            acc = (acc + a) * q;
        }
        acc
    }

    pub fn scaled(&self, c: f64) -> QExpansion {
        QExpansion {
            weight: self.weight,
            coefficients: self.coefficients.iter().map(|a| a * c).collect(),
        }
    }
}

/// Ramanujan `tau(1..=n)` from `q prod (1 - q^k)^24`, in exact integer arithmetic.
pub fn ramanujan_tau(n: usize) -> Vec<i128> {
    // Euler's pentagonal series for prod (1 - q^k), truncated at q^{n-1}
    let len = n;
    let mut eta = vec![0i128; len];
    let mut m: i64 = 0;
    loop {
        let mut any = false;
        for s in [m, -m] {
            let e = (s * (3 * s - 1) / 2) as usize;
            if e < len {
                eta[e] = if m % 2 == 0 { 1 } else { -1 };
                any = true;
            }
            if m == 0 {
                break;
            }
        }
        if !any {
            break;
        }
        m += 1;
    }
    let mul = |a: &[i128], b: &[i128]| -> Vec<i128> {
        let mut c = vec![0i128; len];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate().take(len - i) {
                c[i + j] += x * y;
            }
        }
        c
    };
    let e2 = mul(&eta, &eta);
    let e4 = mul(&e2, &e2);
    let e8 = mul(&e4, &e4);
    let e16 = mul(&e8, &e8);
    // tau(m) is the coefficient of q^{m-1} in eta^24
    mul(&e16, &e8)
}

/// The discriminant form as a q-expansion with `n` coefficients.
pub fn delta_q_expansion(n: usize) -> QExpansion {
    QExpansion {
        weight: 12,
        coefficients: ramanujan_tau(n).into_iter().map(|v| v as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaValue {
    pub value: Complex64,
    /// Bound on `|Delta(z) - value|` from the omitted product factors.
    pub tail_bound: f64,
}

/// `Delta(z) = q prod_{k <= n} (1 - q^k)^24`.
pub fn delta_cusp_form(z: Complex64, n: usize) -> Result<DeltaValue> {
    if !(z.im > 0.05) || !z.re.is_finite() {
        return Err(SiegelError::Domain(format!("need Im z > 0.05, got {z}")));
    }
    if n < 50 {
        return validation("need at least 50 product factors");
    }
    let q = (Complex64::new(0.0, 2.0 * PI) * z).exp();
    let aq = q.norm();
    let mut log_prod = Complex64::new(0.0, 0.0);
    let mut qk = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        qk *= q;
        log_prod += (Complex64::new(1.0, 0.0) - qk).ln();
    }
    let value = q * (log_prod * 24.0).exp();
    let eps = 24.0 * aq.powi(n as i32 + 1) / ((1.0 - aq) * (1.0 - aq.powi(n as i32 + 1)));
    let tail_bound = value.norm() * eps.exp_m1();
    if tail_bound > 1e-10 * value.norm() {
        return Err(SiegelError::Numerical(format!(
            "product truncated at {n} factors leaves relative error {:.1e}",
            tail_bound / value.norm()
        )));
    }
    Ok(DeltaValue { value, tail_bound })
}

/// `<f, f> = int_F y^k |f|^2 dx dy / y^2` over the standard fundamental domain.
pub fn petersson_norm_sq(f: &QExpansion) -> Result<f64> {
    petersson_norm_sq_with(f, 1e-10)
}

/// [`petersson_norm_sq`] at a chosen relative tolerance of the nested quadrature.
pub fn petersson_norm_sq_with(f: &QExpansion, rel_tol: f64) -> Result<f64> {
    if f.weight < 12 {
        return validation("Petersson norm needs weight >= 12");
    }
    if f.is_empty() {
        return validation("empty q-expansion");
    }
    let k = f.weight as f64;
    let y_max = 10.0 + k;
    let err_acc = std::cell::Cell::new(0.0f64);
    let inner = |x: f64| -> f64 {
        let (v, e) = adaptive_quad(
            |y| y.powf(k - 2.0) * f.evaluate(Complex64::new(x, y)).norm_sqr(),
            (1.0 - x * x).sqrt(),
            y_max,
            0.0,
            rel_tol * 0.1,
        );
        err_acc.set(err_acc.get() + e);
        v
    };
    // symmetric in x for real coefficients
    let (half, err) = adaptive_quad(inner, 0.0, 0.5, 0.0, rel_tol);
    let value = 2.0 * half;
    let rel = 2.0 * err / value;
    if !(value > 0.0) || rel > 1e-6 {
        return Err(SiegelError::Numerical(format!(
            "Petersson quadrature error estimate {rel:.1e} exceeds 1e-6"
        )));
    }
    Ok(value)
}

/// `<Delta, Delta>`, computed once per process.
pub fn delta_petersson_norm_sq() -> f64 {
    static NORM: OnceLock<f64> = OnceLock::new();
    *NORM.get_or_init(|| petersson_norm_sq(&delta_q_expansion(40)).expect("Delta norm quadrature"))
}

/// `S_12(z) = y^12 |Delta(z)|^2 / <Delta, Delta>`; `S_12` is one-dimensional.
pub fn s_kappa_direct(z: Complex64, kappa: u32) -> Result<f64> {
    if kappa != 12 {
        return Err(SiegelError::Unsupported(format!(
            "only weight 12 ships a cusp-form basis, got {kappa}"
        )));
    }
    let d = delta_cusp_form(z, 200)?;
    Ok(z.im.powi(12) * d.value.norm_sqr() / delta_petersson_norm_sq())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenCheck {
    pub z: Complex64,
    pub laplacian: Complex64,
    pub expected: Complex64,
    pub rel_error: f64,
}

/// Applies the weight-12 Laplacian to `y^6 Delta(z)` by finite differences and
/// compares with `30 y^6 Delta(z)`.
pub fn weight12_eigen_check(points: &[Complex64], h: f64) -> Result<Vec<EigenCheck>> {
    let phi = |p: &SiegelPoint| -> Complex64 {
        let z = Complex64::new(p.x()[(0, 0)], p.y()[(0, 0)]);
        match delta_cusp_form(z, 200) {
            Ok(d) => d.value * z.im.powi(6),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    points
        .iter()
        .map(|&z| {
            let p = SiegelPoint::new(RMat::from_element(1, 1, z.re), RMat::from_element(1, 1, z.im))?;
            let lap = apply_maass_laplacian(phi, &p, 12, h)?;
            let expected = phi(&p) * 30.0;
            if !lap.re.is_finite() || !lap.im.is_finite() {
                return Err(SiegelError::Numerical(format!("non-finite Laplacian at {z}")));
            }
            Ok(EigenCheck {
                z,
                laplacian: lap,
                expected,
                rel_error: (lap - expected).norm() / expected.norm(),
            })
        })
        .collect()
}

/// All of `SL_2(Z)` with entries bounded by `bound` in absolute value, both signs included.
pub fn sl2z_elements(bound: i64) -> Vec<SymplecticMatrix> {
    let mut out = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in -bound..=bound {
                for d in -bound..=bound {
                    if a * d - b * c == 1 {
                        let m = RMat::from_row_slice(2, 2, &[a as f64, b as f64, c as f64, d as f64]);
                        out.push(SymplecticMatrix::from_raw(m));
                    }
                }
            }
        }
    }
    out
}

/// A 5 x 4 grid in the standard fundamental domain.
pub fn fundamental_domain_grid() -> Vec<Complex64> {
    let xs = [-0.45, -0.2, 0.0, 0.2, 0.45];
    let ys = [1.0, 1.3, 1.7, 2.3];
    let mut out = Vec::with_capacity(20);
    for &y in &ys {
        for &x in &xs {
            out.push(Complex64::new(x, y));
        }
    }
    out
}

/// Reduce `z` into the standard fundamental domain of `SL_2(Z)`.
pub fn reduce_sl2z(mut z: Complex64) -> Complex64 {
    for _ in 0..1000 {
        z.re -= z.re.round();
        if z.norm_sqr() < 1.0 - 1e-15 {
            z = -z.inv();
        } else {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_tau_values() {
        let t = ramanujan_tau(10);
        assert_eq!(&t[..6], &[1, -24, 252, -1472, 4830, -6048]);
    }

    #[test]
    fn series_matches_product() {
        let z = Complex64::new(0.3, 0.9);
        let a = delta_q_expansion(60).evaluate(z);
        let b = delta_cusp_form(z, 200).unwrap().value;
        assert!((a - b).norm() < 1e-13 * b.norm());
    }
}
