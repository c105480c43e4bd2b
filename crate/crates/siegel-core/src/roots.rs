//! Type `C_n` root data and the special functions built from it.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dd::{self, two_prod, Dd};
use crate::linalg::I;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSystemData {
    pub n: usize,
    /// Coefficient vectors of `2 e_j` and `e_j +- e_k` (j < k).
    pub positive_roots: Vec<Vec<i32>>,
    pub rho0: Vec<f64>,
    pub pairing_scale: f64,
}

impl RootSystemData {
    pub fn new(n: usize) -> Self {
        let mut roots = Vec::with_capacity(n * n);
        for j in 0..n {
            let mut v = vec![0; n];
            v[j] = 2;
            roots.push(v);
        }
        for j in 0..n {
            for k in j + 1..n {
                let mut p = vec![0; n];
                p[j] = 1;
                p[k] = 1;
                roots.push(p);
                let mut m = vec![0; n];
                m[j] = 1;
                m[k] = -1;
                roots.push(m);
            }
        }
        RootSystemData {
            n,
            positive_roots: roots,
            rho0: rho0(n),
            pairing_scale: 1.0 / (4.0 * (n as f64 + 1.0)),
        }
    }

    /// `<u, v>` in the normalization `<e_j, e_k> = delta_jk / (4(n+1))`.
    pub fn pairing(&self, u: &[f64], v: &[f64]) -> f64 {
        self.pairing_scale * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
    }
}

/// `(n, n-1, ..., 1)`.
pub fn rho0(n: usize) -> Vec<f64> {
    (0..n).map(|j| (n - j) as f64).collect()
}

/// Spectral parameter with its Casimir eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralParameter {
    pub lambda: Vec<f64>,
}

impl SpectralParameter {
    pub fn new(lambda: Vec<f64>) -> Self {
        SpectralParameter { lambda }
    }

    pub fn eigenvalue(&self) -> f64 {
        casimir_eigenvalue(&self.lambda)
    }
}

fn pair_product(v: &[f64], f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64) -> f64 {
    let mut acc: f64 = v.iter().map(|&x| f(x)).product();
    for j in 0..v.len() {
        for k in j + 1..v.len() {
            acc *= g(v[j] + v[k]) * g(v[j] - v[k]);
        }
    }
    acc
}

/// `prod v_j * prod_{j<k} (v_j + v_k)(v_j - v_k)`.
pub fn epsilon(v: &[f64]) -> f64 {
    pair_product(v, |x| x, |x| x)
}

/// `prod sh(v_j) * prod_{j<k} sh((v_j + v_k)/2) sh((v_j - v_k)/2)`.
pub fn delta(v: &[f64]) -> f64 {
    pair_product(v, f64::sinh, |x| (x / 2.0).sinh())
}

/// As [`delta`] with `ch` in place of `sh`.
pub fn nu(v: &[f64]) -> f64 {
    pair_product(v, f64::cosh, |x| (x / 2.0).cosh())
}

/// `prod th(pi l/2)` over `l` in `{lambda_j} u {lambda_j +- lambda_k}`.
pub fn tau(lambda: &[f64]) -> f64 {
    let th = |x: f64| (x * PI / 2.0).tanh();
    pair_product(lambda, th, th)
}

/// `|c(lambda)|^{-2} = pi^{-n^2/2} 2^{-n^2} eps(lambda) tau(lambda)`.
pub fn c_inverse_sq(lambda: &[f64]) -> f64 {
    let n2 = (lambda.len() * lambda.len()) as f64;
    PI.powf(-n2 / 2.0) * 2f64.powf(-n2) * epsilon(lambda) * tau(lambda)
}

/// `|c(lambda)|^{-2}` as the product over positive roots of `(l/2) th(pi l/2)`.
pub fn c_inverse_sq_product(lambda: &[f64]) -> f64 {
    let n2 = (lambda.len() * lambda.len()) as f64;
    let f = |x: f64| x / 2.0 * (x * PI / 2.0).tanh();
    PI.powf(-n2 / 2.0) * pair_product(lambda, f, f)
}

/// `|pi_0(lambda)|^2` with the pairing `1/(4(n+1))`.
pub fn pi0_sq(lambda: &[f64]) -> f64 {
    let s = 4.0 * (lambda.len() as f64 + 1.0);
    pair_product(lambda, |x| 2.0 * x / s, |x| x / s).powi(2)
}

/// `-(sum j^2 + sum lambda_j^2) / 4`.
pub fn casimir_eigenvalue(lambda: &[f64]) -> f64 {
    let n = lambda.len();
    let base: f64 = (1..=n).map(|j| (j * j) as f64).sum();
    -(base + lambda.iter().map(|l| l * l).sum::<f64>()) / 4.0
}

/// `<rho_0, rho_0>_0 = (1^2 + ... + n^2) / (4(n+1))`.
pub fn rho0_pairing(n: usize) -> f64 {
    (1..=n).map(|j| (j * j) as f64).sum::<f64>() / (4.0 * (n as f64 + 1.0))
}

/// `sum_{sigma in W} det(sigma) exp(i <sigma lambda, r>)`, as `det[2i sin(lambda_j r_k)]`.
pub fn weyl_alternating_sum(lambda: &[f64], r: &[f64]) -> Complex64 {
    // det[2i sin(lambda_j r_k)] = i^n det[2 sin(lambda_j r_k)]. Near the walls the
    // determinant is a small difference of O(1) products, so it is formed in
    // double-double from exact products lambda_j r_k.
    let n = lambda.len();
    let m: Vec<Dd> = (0..n * n)
        .map(|i| two_prod(lambda[i / n], r[i % n]).sin_cos().0.scale(2.0))
        .collect();
    let d = dd::det(m, n).to_f64();
    match n % 4 {
        0 => Complex64::new(d, 0.0),
        1 => Complex64::new(0.0, d),
        2 => Complex64::new(-d, 0.0),
        _ => Complex64::new(0.0, -d),
    }
}

/// `sum_{sigma in W} det(sigma) exp(<sigma v, r>) = det[2 sh(v_j r_k)]`.
pub fn weyl_alternating_sinh(v: &[f64], r: &[f64]) -> f64 {
    let n = v.len();
    DMatrix::from_fn(n, n, |j, k| 2.0 * (v[j] * r[k]).sinh()).determinant()
}

/// Signed permutations of `n` letters as `(perm, signs, det)`:
/// `sigma(v)_j = signs[j] * v[perm[j]]`.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, Vec<f64>, f64)> {
    let mut out = Vec::new();
    for perm in permutations(n) {
        let psign = permutation_sign(&perm);
        for mask in 0..(1usize << n) {
            let signs: Vec<f64> = (0..n).map(|j| if mask >> j & 1 == 1 { -1.0 } else { 1.0 }).collect();
            let det = psign * signs.iter().product::<f64>();
            out.push((perm.clone(), signs, det));
        }
    }
    out
}

pub fn apply_signed(sigma: &(Vec<usize>, Vec<f64>, f64), v: &[f64]) -> Vec<f64> {
    sigma.0.iter().zip(&sigma.1).map(|(&p, &s)| s * v[p]).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn permutation_sign(p: &[usize]) -> f64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Brute-force Weyl sum over all `2^n n!` elements.
pub fn weyl_alternating_sum_brute(lambda: &[f64], r: &[f64]) -> Complex64 {
    signed_permutations(lambda.len())
        .iter()
        .map(|s| {
            let sl = apply_signed(s, lambda);
            let phase: f64 = sl.iter().zip(r).map(|(a, b)| a * b).sum();
            (I * phase).exp() * s.2
        })
        .sum()
}

/// Order of the Weyl group, `2^n n!`.
pub fn weyl_order(n: usize) -> usize {
    (1..=n).product::<usize>() << n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_count() {
        for n in 1..=4 {
            assert_eq!(RootSystemData::new(n).positive_roots.len(), n * n);
            assert_eq!(signed_permutations(n).len(), weyl_order(n));
        }
    }

    #[test]
    fn two_paths_for_c_agree() {
        for lam in [[0.3, 1.7, -0.4], [2.0, 1.0, 0.5]] {
            let a = c_inverse_sq(&lam);
            let b = c_inverse_sq_product(&lam);
            assert!((a - b).abs() <= 1e-14 * a.abs());
        }
    }
}
