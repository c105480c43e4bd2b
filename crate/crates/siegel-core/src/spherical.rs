//! Spherical functions: the closed form on the complex group, the real form
//! as an integral over the complexified compact group, the Harish-Chandra
//! integral used as an oracle, and the weight-kappa variant.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result, SiegelError};
use crate::integration::{
    haar_unitary, log_shc, mc_moments, sample_hermitian_factor, Estimate, HermitianSample, Proposal,
    QuadratureSpec,
};
use crate::linalg::{hermitian_eigenvalues, hermitian_map, jacobi_singular_values, udu, CMat, RMat, I};
use crate::roots::{c_inverse_sq, epsilon, pi0_sq, rho0, tau};
use crate::symplectic::{RadialVector, SiegelPoint};

const SERIES_RADIUS: f64 = 3.0;
const SERIES_TERMS: usize = 48;
const CLUSTER_GAP: f64 = 1e-4;

/// `sin(sqrt(mu nu)) / sqrt(mu nu)`, continued to negative products by `sinh`.
pub fn sinc_kernel(mu: f64, nu: f64) -> f64 {
    let p = mu * nu;
    if p.abs() < 1e-8 {
        return 1.0 - p / 6.0 + p * p / 120.0;
    }
    if p > 0.0 {
        let s = p.sqrt();
        s.sin() / s
    } else {
        let s = (-p).sqrt();
        s.sinh() / s
    }
}

/// Spread clustered nodes symmetrically so divided differences stay defined.
fn separate(nodes: &[f64]) -> Vec<f64> {
    let scale = nodes.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
    let mut idx: Vec<usize> = (0..nodes.len()).collect();
    idx.sort_by(|&a, &b| nodes[a].partial_cmp(&nodes[b]).unwrap());
    let mut out = nodes.to_vec();
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && nodes[idx[end]] - nodes[idx[end - 1]] < CLUSTER_GAP * scale {
            end += 1;
        }
        let m = end - start;
        if m > 1 {
            let center = idx[start..end].iter().map(|&i| nodes[i]).sum::<f64>() / m as f64;
            let eta = if m == 2 { 1e-5 } else { 1e-4 } * scale;
            for (slot, &i) in idx[start..end].iter().enumerate() {
                out[i] = center + eta * (slot as f64 - (m as f64 - 1.0) / 2.0);
            }
        }
        start = end;
    }
    out
}

/// Newton divided differences in place along one axis.
fn newton_in_place(values: &mut [f64], nodes: &[f64]) {
    let n = nodes.len();
    for order in 1..n {
        for j in (order..n).rev() {
            values[j] = (values[j] - values[j - 1]) / (nodes[j] - nodes[j - order]);
        }
    }
}

/// Complete homogeneous symmetric polynomials `h_0..h_{m_max}` of `x`.
fn complete_homogeneous(x: &[f64], m_max: usize) -> Vec<f64> {
    let mut h = vec![0.0; m_max + 1];
    h[0] = 1.0;
    for &xk in x {
        for m in 1..=m_max {
            h[m] += xk * h[m - 1];
        }
    }
    h
}

/// Double divided-difference table `T_ab = F[mu_0..mu_a; nu_0..nu_b]` of the sinc kernel.
pub fn divided_difference_table(mu: &[f64], nu: &[f64]) -> DMatrix<f64> {
    let n = mu.len();
    let mu_max = mu.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let nu_max = nu.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if (mu_max * nu_max).sqrt() <= SERIES_RADIUS {
        let hm: Vec<Vec<f64>> = (0..n).map(|a| complete_homogeneous(&mu[..=a], SERIES_TERMS)).collect();
        let hn: Vec<Vec<f64>> = (0..n).map(|b| complete_homogeneous(&nu[..=b], SERIES_TERMS)).collect();
        let mut coef = vec![0.0; SERIES_TERMS + 1];
        let mut fact = 1.0;
        for (m, c) in coef.iter_mut().enumerate() {
            if m > 0 {
                fact *= (2 * m) as f64 * (2 * m + 1) as f64;
            }
            *c = if m % 2 == 0 { 1.0 } else { -1.0 } / fact;
        }
        return DMatrix::from_fn(n, n, |a, b| {
            let lo = a.max(b);
            (lo..=SERIES_TERMS).map(|m| coef[m] * hm[a][m - a] * hn[b][m - b]).sum()
        });
    }
    let mu = separate(mu);
    let nu = separate(nu);
    let mut t = DMatrix::from_fn(n, n, |j, k| sinc_kernel(mu[j], nu[k]));
    for k in 0..n {
        let mut col: Vec<f64> = (0..n).map(|j| t[(j, k)]).collect();
        newton_in_place(&mut col, &mu);
        for j in 0..n {
            t[(j, k)] = col[j];
        }
    }
    for j in 0..n {
        let mut row: Vec<f64> = (0..n).map(|k| t[(j, k)]).collect();
        newton_in_place(&mut row, &nu);
        for k in 0..n {
            t[(j, k)] = row[k];
        }
    }
    t
}

/// `log( prod sh(2 r_j)/r_j * prod_{j<k} sh(r_j+r_k) sh(r_j-r_k) / (r_j^2 - r_k^2) )`.
fn log_wall_free_delta(r: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (j, &rj) in r.iter().enumerate() {
        acc += std::f64::consts::LN_2 + log_shc(2.0 * rj);
        for &rk in &r[j + 1..] {
            acc += log_shc(rj + rk) + log_shc(rj - rk);
        }
    }
    acc
}

/// Spherical function of the complex group at `exp(r)`, normalized to 1 at `r = 0`.
///
/// Evaluated as `prod (2a+1)! 2^n (-1)^{n(n-1)/2} det T / Dt(r)` with `T`
/// the double divided-difference table of the sinc kernel at `lambda^2`,
/// `r^2`, so walls in either argument are removable.
pub fn complex_spherical(lambda: &[f64], r: &[f64]) -> f64 {
    let n = lambda.len();
    let mu: Vec<f64> = lambda.iter().map(|l| l * l).collect();
    let nu: Vec<f64> = r.iter().map(|x| x * x).collect();
    let det = divided_difference_table(&mu, &nu).determinant();
    let mut c = 1.0;
    for a in 0..n {
        c *= (1..=2 * a + 1).map(|v| v as f64).product::<f64>();
    }
    let sign = if (n * (n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let log_dt = log_wall_free_delta(r) - n as f64 * std::f64::consts::LN_2;
    sign * c * det * (-log_dt).exp()
}

/// `k_h = [[A, B], [-B, A]]` with `A + iB = h`, `A - iB = conj(h)^{-1}`.
pub fn k_from_factor(h: &CMat) -> CMat {
    let n = h.nrows();
    let hinv = conj_inverse(h);
    let a = (h + &hinv) * Complex64::new(0.5, 0.0);
    let b = (h - &hinv) * Complex64::new(0.0, -0.5);
    let mut k = CMat::zeros(2 * n, 2 * n);
    k.view_mut((0, 0), (n, n)).copy_from(&a);
    k.view_mut((0, n), (n, n)).copy_from(&b);
    k.view_mut((n, 0), (n, n)).copy_from(&(-&b));
    k.view_mut((n, n), (n, n)).copy_from(&a);
    k
}

/// `k = k_0 k_h` with `k_0` the real embedding of the unitary `u`.
pub fn k_from_parts(u: &CMat, h: &CMat) -> CMat {
    let k0 = crate::integration::unitary_to_k0(u).matrix().map(|v| Complex64::new(v, 0.0));
    k0 * k_from_factor(h)
}

fn conj_inverse(h: &CMat) -> CMat {
    hermitian_map(h, |x| 1.0 / x).conjugate()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialPartResult {
    pub rho: RadialVector,
    /// Largest `|log lambda_j + log lambda_{2n+1-j}|` over the reciprocal pairs,
    /// read from `k e^r k^*` and `k e^{-r} k^*`.
    pub u_residual: f64,
}

fn check_orthogonal(k: &CMat) -> Result<usize> {
    let m = k.nrows();
    if m % 2 != 0 || k.ncols() != m || m == 0 {
        return validation("k must be a square matrix of even size");
    }
    let defect = (k * k.transpose() - CMat::identity(m, m)).camax();
    if defect > 1e-9 * (1.0 + k.camax().powi(2)) {
        return validation(format!("k is not complex orthogonal (defect {defect:.2e})"));
    }
    Ok(m / 2)
}

fn top_logs(m: &CMat, n: usize) -> Vec<f64> {
    hermitian_eigenvalues(m).iter().take(n).map(|v| v.ln()).collect()
}

/// `rho(r, k)`: logs of the `n` largest eigenvalues of `k exp(r) conj(k)^t`.
pub fn radial_part(r: &RadialVector, k: &CMat) -> Result<RadialPartResult> {
    let n = check_orthogonal(k)?;
    if r.len() != n {
        return validation("radial vector and k have different degrees");
    }
    let diag = |sign: f64| {
        CMat::from_diagonal(&nalgebra::DVector::from_fn(2 * n, |i, _| {
            let v = if i < n { r.r[i] } else { -r.r[i - n] };
            Complex64::new((sign * v).exp(), 0.0)
        }))
    };
    let m_plus = k * diag(1.0) * k.adjoint();
    let m_minus = k * diag(-1.0) * k.adjoint();
    let up = top_logs(&m_plus, n);
    let down = top_logs(&m_minus, n);
    let residual = up.iter().zip(&down).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if residual > 1e-7 * (1.0 + up[0].abs()) {
        return Err(SiegelError::Numerical(format!(
            "eigenvalues of k e^r k^* are not reciprocal pairs (residual {residual:.2e})"
        )));
    }
    Ok(RadialPartResult {
        rho: RadialVector::canonical(&up),
        u_residual: residual,
    })
}

/// Cached pieces of a Hermitian factor used by the fast radial-part path.
pub struct FactorData {
    /// Eigenvectors of `S = log h`, columns matching `s_eigen`.
    pub v: CMat,
    pub s_eigen: Vec<f64>,
    pub trace_s: f64,
    pub log_weight: f64,
}

impl FactorData {
    pub fn new(sample: &HermitianSample) -> Self {
        let eig = SymmetricEigen::new(sample.s.clone());
        FactorData {
            v: eig.eigenvectors,
            s_eigen: eig.eigenvalues.iter().cloned().collect(),
            trace_s: sample.s_eigen.iter().sum(),
            log_weight: sample.log_weight,
        }
    }

    /// `rho(r, k_h)`: the `n` largest logs of the eigenvalues of
    /// `M = [[h C h, h S g], [g S h, g C g]]`, `g = conj(h)^{-1}`, `C = ch R`, `S = sh R`.
    ///
    /// `M = F F^*` with `F = diag(e^L, e^{-L}) W^* Q diag(e^{r/2}, e^{-r/2})`, where
    /// `W = diag(V, conj V)` diagonalizes `h` and `Q` is the Hadamard block. `F` is a
    /// row scaling of a well-conditioned matrix, so one-sided Jacobi on `F^*` keeps
    /// the small singular values accurate even for `|S|` large.
    pub fn rho(&self, r: &[f64]) -> Vec<f64> {
        let n = r.len();
        if n == 1 {
            // h = e^s: the top eigenvalue is e^rho with ch rho = ch r ch 2s
            return vec![(r[0].cosh() * (2.0 * self.trace_s).cosh()).acosh()];
        }
        let c = std::f64::consts::FRAC_1_SQRT_2;
        // F^* = diag(e^{r/2}, e^{-r/2}) Q^t W diag(e^L, e^{-L})
        let mut fs = CMat::zeros(2 * n, 2 * n);
        for i in 0..n {
            let up = (0.5 * r[i]).exp() * c;
            let down = (-0.5 * r[i]).exp() * c;
            for j in 0..n {
                let a = self.v[(i, j)] * self.s_eigen[j].exp();
                let b = self.v[(i, j)].conj() * (-self.s_eigen[j]).exp();
                fs[(i, j)] = a * up;
                fs[(i, n + j)] = b * up;
                fs[(n + i, j)] = a * down;
                fs[(n + i, n + j)] = -b * down;
            }
        }
        jacobi_singular_values(&fs)
            .iter()
            .take(n)
            .map(|sv| 2.0 * sv.ln())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightFactor {
    pub det_h: f64,
    pub kappa: u32,
}

impl WeightFactor {
    /// `det(h)^{2 kappa}` in log form.
    pub fn log_value(&self) -> f64 {
        2.0 * self.kappa as f64 * self.det_h.ln()
    }
}

/// `det(h)` for `k = k_0 k_h`; equals `|det(A + iB)|` for `k = [[A, B], [-B, A]]`.
pub fn weight_factor(k: &CMat, kappa: u32) -> Result<WeightFactor> {
    let n = check_orthogonal(k)?;
    let a = k.view((0, 0), (n, n));
    let b = k.view((0, n), (n, n));
    let block_defect = (k.view((n, n), (n, n)) - a).camax() + (k.view((n, 0), (n, n)) + b).camax();
    if block_defect > 1e-9 * (1.0 + k.camax()) {
        return validation("k does not have the [[A, B], [-B, A]] block form");
    }
    let p: CMat = a + b * I;
    Ok(WeightFactor {
        det_h: crate::linalg::det_c(&p).norm(),
        kappa,
    })
}

/// `log( exp(sum |rho_j|) / prod ch(r_j) )`, the bound on `det h` from the
/// principal-submatrix argument (`det(h)^2` is bounded by the same quantity).
pub fn log_weight_bound(rho: &[f64], r: &[f64]) -> f64 {
    rho.iter().map(|v| v.abs()).sum::<f64>() - r.iter().map(|v| v.cosh().ln()).sum::<f64>()
}

/// Sampler settings for integrals over the non-compact factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FjConfig {
    pub proposal: Proposal,
    /// `None` picks [`default_scale`].
    pub scale: Option<f64>,
}

impl Default for FjConfig {
    fn default() -> Self {
        FjConfig {
            proposal: Proposal::RadialLaplace,
            scale: None,
        }
    }
}

/// Proposal scale: the integrands decay like `exp(-sqrt(2) |S|)` for `n >= 2`
/// and `exp(-2|s|)` for `n = 1`, so a Laplace scale below `sqrt(2)` keeps
/// the second moment of the weights finite.
pub fn default_scale(n: usize) -> f64 {
    if n == 1 {
        1.0
    } else {
        1.25
    }
}

impl FjConfig {
    pub fn scale_for(&self, n: usize) -> f64 {
        self.scale.unwrap_or_else(|| default_scale(n))
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> FactorData {
        FactorData::new(&sample_hermitian_factor(n, self.scale_for(n), self.proposal, rng))
    }
}

fn check_lambda_r(lambda: &[f64], r: &[f64]) -> Result<usize> {
    let n = lambda.len();
    if n == 0 || r.len() != n {
        return validation("lambda and r must have the same positive length");
    }
    if lambda.iter().chain(r).any(|v| !v.is_finite()) {
        return validation("lambda and r must be finite");
    }
    Ok(n)
}

/// `Phi_{2 lambda}(rho / 2)`, the integrand of the real spherical function up to `eps(lambda)`.
pub fn fj_kernel(lambda: &[f64], rho: &[f64]) -> f64 {
    let l2: Vec<f64> = lambda.iter().map(|l| 2.0 * l).collect();
    let half: Vec<f64> = rho.iter().map(|v| v.abs() / 2.0).collect();
    complex_spherical(&l2, &half)
}

/// Real spherical functions on a grid, all from the same samples.
///
/// `result[a][b]` estimates `phi_{lambdas[a]}(rs[b])` as the ratio of the
/// integrals of `Phi_{2 lambda}(rho(r, k)/2)` at `r` and at `0`.
pub fn real_spherical_fj_grid(
    lambdas: &[Vec<f64>],
    rs: &[Vec<f64>],
    spec: &QuadratureSpec,
    cfg: &FjConfig,
) -> Result<Vec<Vec<Estimate>>> {
    let n = lambdas.first().map(|l| l.len()).unwrap_or(0);
    for l in lambdas {
        for r in rs {
            check_lambda_r(l, r)?;
        }
        check_lambda_r(l, &vec![0.0; n])?;
    }
    let zero = vec![0.0; n];
    let nl = lambdas.len();
    let nr = rs.len();
    // layout: for each lambda, nr values then the r = 0 normalizer
    let dim = nl * (nr + 1);
    let moments = mc_moments(
        dim,
        |f: &FactorData, out: &mut [f64]| {
            let w = f.log_weight.exp();
            let rhos: Vec<Vec<f64>> = rs.iter().map(|r| f.rho(r)).collect();
            let rho0 = f.rho(&zero);
            for (a, l) in lambdas.iter().enumerate() {
                let base = a * (nr + 1);
                for (b, rho) in rhos.iter().enumerate() {
                    out[base + b] = w * fj_kernel(l, rho);
                }
                out[base + nr] = w * fj_kernel(l, &rho0);
            }
        },
        |rng| cfg.draw(n, rng),
        spec,
    )?;
    Ok((0..nl)
        .map(|a| {
            let base = a * (nr + 1);
            (0..nr).map(|b| moments.ratio(base + b, base + nr)).collect()
        })
        .collect())
}

/// Real spherical function `phi_lambda(exp r)` by Monte Carlo over the Hermitian factor.
pub fn real_spherical_fj(lambda: &[f64], r: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    check_lambda_r(lambda, r)?;
    Ok(real_spherical_fj_grid(&[lambda.to_vec()], &[r.to_vec()], spec, &FjConfig::default())?[0][0])
}

/// Weight-kappa spherical function: the numerator carries `det(h)^{2 kappa}`.
///
/// The normalizer is the unweighted integral at `r = 0`, so `kappa = 0`
/// reproduces [`real_spherical_fj`] exactly. Every sample is checked
/// against `det(h)^2 <= exp(sum|rho|)/prod ch(r_j)`.
pub fn weighted_spherical(lambda: &[f64], r: &[f64], kappa: u32, spec: &QuadratureSpec) -> Result<Estimate> {
    let n = check_lambda_r(lambda, r)?;
    let cfg = FjConfig::default();
    let zero = vec![0.0; n];
    let violation = std::sync::atomic::AtomicBool::new(false);
    let m = mc_moments(
        2,
        |f: &FactorData, out: &mut [f64]| {
            let rho = f.rho(r);
            let log_det = f.trace_s;
            if 2.0 * log_det > log_weight_bound(&rho, r) + 1e-9 {
                violation.store(true, std::sync::atomic::Ordering::Relaxed);
            }
            let kernel = fj_kernel(lambda, &rho);
            let log_mag = f.log_weight + 2.0 * kappa as f64 * log_det;
            out[0] = kernel * log_mag.exp();
            out[1] = f.log_weight.exp() * fj_kernel(lambda, &f.rho(&zero));
        },
        |rng| cfg.draw(n, rng),
        spec,
    )?;
    if violation.load(std::sync::atomic::Ordering::Relaxed) {
        return Err(SiegelError::Numerical("weight-factor bound violated by a sample".into()));
    }
    Ok(m.ratio(0, 1))
}

/// `exp(2 R)` diagonal point's a-part under `k_0^{-1}`: the `d_j` of
/// `Im(k_0^{-1} (i e^{-2r})) = P D P^t`.
pub fn plane_wave_pivots(u: &CMat, r: &[f64]) -> Result<Vec<f64>> {
    let n = r.len();
    let z0 = CMat::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| I * (-2.0 * r[i]).exp()));
    pivots_of(u, &z0)
}

/// The `d_j` of `Im(k_0^{-1} Z) = P D P^t` at a general point.
pub fn plane_wave_pivots_at(u: &CMat, z: &SiegelPoint) -> Result<Vec<f64>> {
    pivots_of(u, &z.z())
}

fn pivots_of(u: &CMat, z0: &CMat) -> Result<Vec<f64>> {
    let a = u.map(|z| z.re);
    let b = u.map(|z| z.im);
    let at = a.transpose().map(|v| Complex64::new(v, 0.0));
    let bt = b.transpose().map(|v| Complex64::new(v, 0.0));
    let num = &at * z0 - &bt;
    let den = &bt * z0 + &at;
    let inv = den
        .try_inverse()
        .ok_or_else(|| SiegelError::Conditioning("singular automorphy factor".into()))?;
    let w = num * inv;
    let y: RMat = w.map(|z| z.im);
    let y = (&y + y.transpose()) * 0.5;
    Ok(udu(&y)?.1)
}

/// `Re exp((i lambda - rho_0)(H))` with `H = -log(d)/2`.
pub fn plane_wave(lambda: &[f64], d: &[f64]) -> f64 {
    let rho = rho0(lambda.len());
    let mut mag = 0.0;
    let mut phase = 0.0;
    for j in 0..d.len() {
        let h = -0.5 * d[j].ln();
        mag -= rho[j] * h;
        phase += lambda[j] * h;
    }
    mag.exp() * phase.cos()
}

/// Harish-Chandra integrals on a grid, all from the same Haar samples.
pub fn harish_chandra_grid(lambdas: &[Vec<f64>], rs: &[Vec<f64>], spec: &QuadratureSpec) -> Result<Vec<Vec<Estimate>>> {
    let n = lambdas.first().map(|l| l.len()).unwrap_or(0);
    for l in lambdas {
        for r in rs {
            check_lambda_r(l, r)?;
        }
    }
    let nr = rs.len();
    let m = mc_moments(
        lambdas.len() * nr,
        |u: &CMat, out: &mut [f64]| {
            for (b, r) in rs.iter().enumerate() {
                match plane_wave_pivots(u, r) {
                    Ok(d) => {
                        for (a, l) in lambdas.iter().enumerate() {
                            out[a * nr + b] = plane_wave(l, &d);
                        }
                    }
                    Err(_) => {
                        for a in 0..lambdas.len() {
                            out[a * nr + b] = f64::NAN;
                        }
                    }
                }
            }
        },
        |rng| haar_unitary(n, rng),
        spec,
    )?;
    Ok((0..lambdas.len())
        .map(|a| (0..nr).map(|b| m.estimate(a * nr + b)).collect())
        .collect())
}

/// `phi_lambda(exp r) = int_{K_0} exp((i lambda - rho_0)(H(exp(r) k_0))) dk_0`.
pub fn harish_chandra_phi(lambda: &[f64], r: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    check_lambda_r(lambda, r)?;
    Ok(harish_chandra_grid(&[lambda.to_vec()], &[r.to_vec()], spec)?[0][0])
}

/// Raw integral `int Phi_{2 lambda}(rho(r, k)/2) dmu` against Lebesgue measure
/// in exponential coordinates times the Jacobian (no normalizing constant).
pub fn fj_raw_integral(lambda: &[f64], r: &[f64], spec: &QuadratureSpec, cfg: &FjConfig) -> Result<Estimate> {
    let n = check_lambda_r(lambda, r)?;
    let m = mc_moments(
        1,
        |f: &FactorData, out: &mut [f64]| out[0] = f.log_weight.exp() * fj_kernel(lambda, &f.rho(r)),
        |rng| cfg.draw(n, rng),
        spec,
    )?;
    Ok(m.estimate(0))
}

/// Operational normalization of the measure on the non-compact factor.
///
/// `measure_constant` is the factor that makes
/// `|c(lambda)|^{-2} = |pi_0(lambda)|^2 * kappa * int Phi_{2 lambda}(rho(0,k)/2) dmu_raw`
/// hold at `lambda_ref`; `a_n` is the matching constant in
/// `phi_lambda(r) = a_n eps(lambda)/tau(lambda) int Phi_{2 lambda}(rho(r,k)/2) dmu_raw`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub n: usize,
    pub lambda_ref: Vec<f64>,
    pub measure_constant: f64,
    pub measure_constant_rel_error: f64,
    pub a_n: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Reference spectral parameter away from all walls.
pub fn default_lambda_ref(n: usize) -> Vec<f64> {
    (0..n).map(|j| 1.5 * (n - j) as f64 / n as f64).collect()
}

pub fn calibrate(n: usize, spec: &QuadratureSpec, cfg: &FjConfig) -> Result<Calibration> {
    calibrate_at(&default_lambda_ref(n), spec, cfg)
}

pub fn calibrate_at(lambda_ref: &[f64], spec: &QuadratureSpec, cfg: &FjConfig) -> Result<Calibration> {
    let n = lambda_ref.len();
    let raw = fj_raw_integral(lambda_ref, &vec![0.0; n], spec, cfg)?;
    let p = pi0_sq(lambda_ref);
    if !(raw.value > 0.0) || p == 0.0 {
        return Err(SiegelError::Numerical("calibration integral is not positive".into()));
    }
    let kappa = c_inverse_sq(lambda_ref) / (p * raw.value);
    let a_n = tau(lambda_ref) / (epsilon(lambda_ref) * raw.value);
    Ok(Calibration {
        n,
        lambda_ref: lambda_ref.to_vec(),
        measure_constant: kappa,
        measure_constant_rel_error: raw.std_error / raw.value,
        a_n,
        samples: spec.points,
        seed: spec.seed,
    })
}

impl Calibration {
    /// `|pi_0(lambda)|^2 * kappa * int Phi_{2 lambda}(rho(0,k)/2) dmu_raw`, to compare with `|c(lambda)|^{-2}`.
    pub fn c_inverse_sq_estimate(&self, lambda: &[f64], spec: &QuadratureSpec, cfg: &FjConfig) -> Result<Estimate> {
        let raw = fj_raw_integral(lambda, &vec![0.0; lambda.len()], spec, cfg)?;
        let f = pi0_sq(lambda) * self.measure_constant;
        Ok(Estimate {
            value: f * raw.value,
            std_error: f * raw.std_error,
        })
    }
}
