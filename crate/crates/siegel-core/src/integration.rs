//! Quadrature rules, Gaussian moments and deterministic parallel Monte Carlo
//! over the compact group `U(n)` and the Hermitian factor space.

use nalgebra::QR;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{validation, Result, SiegelError};
use crate::linalg::{hermitian_map, CMat, RMat};
use crate::symplectic::SymplecticMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureMethod {
    GaussLegendre,
    GaussHermite,
    MonteCarlo,
}

/// How an integral is evaluated. Identical specs give bit-identical results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub method: QuadratureMethod,
    /// Nodes for quadrature rules, samples for Monte Carlo.
    pub points: usize,
    pub seed: u64,
    pub workers: usize,
}

impl QuadratureSpec {
    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        QuadratureSpec {
            method: QuadratureMethod::MonteCarlo,
            points: samples,
            seed,
            workers: 8,
        }
    }

    pub fn gauss_legendre(points: usize) -> Self {
        QuadratureSpec {
            method: QuadratureMethod::GaussLegendre,
            points,
            seed: 0,
            workers: 1,
        }
    }

    pub fn gauss_hermite(points: usize) -> Self {
        QuadratureSpec {
            method: QuadratureMethod::GaussHermite,
            points,
            seed: 0,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn check(&self) -> Result<()> {
        if self.points == 0 || self.workers == 0 {
            return validation("points and workers must be positive");
        }
        Ok(())
    }
}

/// `int xi^m exp(-xi^2) d xi` over the real line.
pub fn gaussian_moment(m: u32) -> f64 {
    if m % 2 == 1 {
        return 0.0;
    }
    // Gamma((m+1)/2) = sqrt(pi) (m-1)!! / 2^(m/2)
    let mut acc = std::f64::consts::PI.sqrt();
    let mut k = 1;
    while k < m {
        acc *= k as f64 / 2.0;
        k += 2;
    }
    acc
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let half = m.div_ceil(2);
    for i in 0..half {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..m {
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j as f64 + 1.0) * z * p2 - j as f64 * p3) / (j as f64 + 1.0);
            }
            dp = m as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[m - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss-Hermite nodes and weights for the weight `exp(-x^2)`, ascending.
pub fn gauss_hermite(m: usize) -> (Vec<f64>, Vec<f64>) {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let half = m.div_ceil(2);
    let mf = m as f64;
    let mut z: f64 = 0.0;
    for i in 0..half {
        z = match i {
            0 => (2.0 * mf + 1.0).sqrt() - 1.85575 * (2.0 * mf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * mf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 0..m {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * mf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / (pp * pp);
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..half {
        nodes[i] = -x[i];
        weights[i] = w[i];
        nodes[m - 1 - i] = x[i];
        weights[m - 1 - i] = w[i];
    }
    (nodes, weights)
}

/// Integration domain for [`integrate_1d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval(f64, f64),
    /// The whole real line; only Gauss-Hermite supports it.
    Real,
}

/// `int f` over the domain with the rule selected by `spec`.
///
/// Gauss-Hermite integrates `f` itself (the rule's weight is divided out),
/// so it is exact for `f = poly * exp(-x^2)`.
pub fn integrate_1d<F: Fn(f64) -> f64 + Sync>(f: F, domain: Domain, spec: &QuadratureSpec) -> Result<f64> {
    spec.check()?;
    let value = match (spec.method, domain) {
        (QuadratureMethod::GaussLegendre, Domain::Interval(a, b)) => {
            let (x, w) = gauss_legendre(spec.points);
            let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
            x.iter().zip(&w).map(|(xi, wi)| wi * f(c + h * xi)).sum::<f64>() * h
        }
        (QuadratureMethod::GaussHermite, Domain::Real) => {
            let (x, w) = gauss_hermite(spec.points);
            x.iter().zip(&w).map(|(xi, wi)| wi * (xi * xi).exp() * f(*xi)).sum()
        }
        (QuadratureMethod::MonteCarlo, Domain::Interval(a, b)) => {
            let est = mc_integrate(|u: &f64| f(*u), |rng| rng.random_range(a..b), spec)?;
            est.value * (b - a)
        }
        _ => return validation("quadrature method does not support this domain"),
    };
    if value.is_nan() {
        return Err(SiegelError::Numerical("integrand produced NaN".into()));
    }
    Ok(value)
}

const GK_X: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = GK_WK[7] * fc;
    let mut g = GK_WG[3] * fc;
    for i in 0..7 {
        let dx = h * GK_X[i];
        let s = f(c - dx) + f(c + dx);
        k += GK_WK[i] * s;
        if i % 2 == 1 {
            g += GK_WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
///
/// Returns `(value, error_estimate)`.
pub fn adaptive_quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> (f64, f64) {
    // global strategy: always bisect the piece with the largest error
    let mut pieces = vec![(a, b, kronrod(&f, a, b))];
    let mut splits = 0usize;
    loop {
        let total: f64 = pieces.iter().map(|p| p.2 .0).sum();
        let err: f64 = pieces.iter().map(|p| p.2 .1).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) || splits >= 5000 {
            return (total, err);
        }
        let worst = (0..pieces.len())
            .max_by(|&i, &j| pieces[i].2 .1.total_cmp(&pieces[j].2 .1))
            .unwrap_or(0);
        let (lo, hi, _) = pieces.swap_remove(worst);
        if (hi - lo).abs() < 1e-14 * (b - a).abs() {
            // cannot refine further; keep it and report the error honestly
            let total: f64 = pieces.iter().map(|p| p.2 .0).sum::<f64>() + kronrod(&f, lo, hi).0;
            let err: f64 = pieces.iter().map(|p| p.2 .1).sum::<f64>() + kronrod(&f, lo, hi).1;
            return (total, err);
        }
        let mid = 0.5 * (lo + hi);
        pieces.push((lo, mid, kronrod(&f, lo, mid)));
        pieces.push((mid, hi, kronrod(&f, mid, hi)));
        splits += 1;
    }
}

/// Monte-Carlo estimate and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Per-worker generator: the ChaCha stream number is the worker index.
pub fn worker_rng(seed: u64, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

fn worker_counts(samples: usize, workers: usize) -> Vec<usize> {
    (0..workers)
        .map(|w| samples / workers + usize::from(w < samples % workers))
        .collect()
}

/// Sample means and covariance of a vector-valued integrand.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: Vec<f64>,
    /// Covariance of the per-sample values (not of the mean).
    pub cov: Vec<Vec<f64>>,
}

impl Moments {
    pub fn estimate(&self, i: usize) -> Estimate {
        Estimate {
            value: self.mean[i],
            std_error: (self.cov[i][i] / self.count as f64).sqrt(),
        }
    }

    /// `mean[i] / mean[j]` with a delta-method standard error.
    pub fn ratio(&self, i: usize, j: usize) -> Estimate {
        let (a, b) = (self.mean[i], self.mean[j]);
        let q = a / b;
        let var = (self.cov[i][i] - 2.0 * q * self.cov[i][j] + q * q * self.cov[j][j])
            / (b * b * self.count as f64);
        Estimate {
            value: q,
            std_error: var.max(0.0).sqrt(),
        }
    }
}

struct Partial {
    count: usize,
    sum: Vec<f64>,
    cross: Vec<Vec<f64>>,
    shift: Vec<f64>,
}

/// Deterministic parallel Monte Carlo for `dim` integrands evaluated on the same samples.
///
/// Worker `w` draws `samples / workers` (plus remainder) samples from stream `w`
/// of a ChaCha generator seeded with `spec.seed`; partial sums are combined in
/// worker order, so results do not depend on thread scheduling.
pub fn mc_moments<S, G, F>(dim: usize, f: F, sampler: G, spec: &QuadratureSpec) -> Result<Moments>
where
    G: Fn(&mut ChaCha8Rng) -> S + Sync,
    F: Fn(&S, &mut [f64]) + Sync,
{
    spec.check()?;
    if spec.method != QuadratureMethod::MonteCarlo {
        return validation("mc_moments needs a Monte-Carlo spec");
    }
    let counts = worker_counts(spec.points, spec.workers);
    let partials: Vec<Result<Partial>> = counts
        .par_iter()
        .enumerate()
        .map(|(w, &count)| {
            let mut rng = worker_rng(spec.seed, w);
            let mut buf = vec![0.0; dim];
            let mut p = Partial {
                count,
                sum: vec![0.0; dim],
                cross: vec![vec![0.0; dim]; dim],
                shift: vec![0.0; dim],
            };
            for i in 0..count {
                let s = sampler(&mut rng);
                f(&s, &mut buf);
                if let Some(k) = buf.iter().position(|v| !v.is_finite()) {
                    return Err(SiegelError::Numerical(format!(
                        "integrand {k} returned {} at worker {w}, sample {i}",
                        buf[k]
                    )));
                }
                if i == 0 {
                    p.shift.copy_from_slice(&buf);
                }
                for a in 0..dim {
                    let da = buf[a] - p.shift[a];
                    p.sum[a] += da;
                    for b in 0..=a {
                        p.cross[a][b] += da * (buf[b] - p.shift[b]);
                    }
                }
            }
            Ok(p)
        })
        .collect();

    // Chan et al. pairwise combination, in worker order.
    let mut count = 0usize;
    let mut mean = vec![0.0; dim];
    let mut m2 = vec![vec![0.0; dim]; dim];
    for p in partials {
        let p = p?;
        if p.count == 0 {
            continue;
        }
        let nb = p.count as f64;
        let mb: Vec<f64> = (0..dim).map(|a| p.shift[a] + p.sum[a] / nb).collect();
        let mut cb = vec![vec![0.0; dim]; dim];
        for a in 0..dim {
            for b in 0..=a {
                cb[a][b] = p.cross[a][b] - p.sum[a] * p.sum[b] / nb;
            }
        }
        let na = count as f64;
        let n = na + nb;
        let delta: Vec<f64> = (0..dim).map(|a| mb[a] - mean[a]).collect();
        for a in 0..dim {
            for b in 0..=a {
                m2[a][b] += cb[a][b] + delta[a] * delta[b] * na * nb / n;
            }
        }
        for a in 0..dim {
            mean[a] += delta[a] * nb / n;
        }
        count += p.count;
    }
    let denom = (count.max(2) - 1) as f64;
    let mut cov = vec![vec![0.0; dim]; dim];
    for a in 0..dim {
        for b in 0..=a {
            cov[a][b] = m2[a][b] / denom;
            cov[b][a] = cov[a][b];
        }
    }
    Ok(Moments { count, mean, cov })
}

/// Scalar Monte-Carlo integral `E[f(S)]` under the sampler's distribution.
pub fn mc_integrate<S, G, F>(f: F, sampler: G, spec: &QuadratureSpec) -> Result<Estimate>
where
    G: Fn(&mut ChaCha8Rng) -> S + Sync,
    F: Fn(&S) -> f64 + Sync,
{
    let m = mc_moments(1, |s, out| out[0] = f(s), sampler, spec)?;
    Ok(m.estimate(0))
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary matrix (QR of a complex Ginibre matrix with phase fix).
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = QR::new(g);
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `A + iB -> [[A, B], [-B, A]]`, the embedding `U(n) -> K_0`.
pub fn unitary_to_k0(u: &CMat) -> SymplecticMatrix {
    let n = u.nrows();
    let mut g = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (u[(i, j)].re, u[(i, j)].im);
            g[(i, j)] = a;
            g[(i, n + j)] = b;
            g[(n + i, j)] = -b;
            g[(n + i, n + j)] = a;
        }
    }
    SymplecticMatrix::from_raw(g)
}

/// Haar sample of `U(n)` embedded in `K_0`.
pub fn sample_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (CMat, SymplecticMatrix) {
    let u = haar_unitary(n, rng);
    let k = unitary_to_k0(&u);
    (u, k)
}

/// Proposal law for the logarithm `S` of the Hermitian factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Proposal {
    /// Independent Gaussian coordinates with standard deviation `scale`.
    Gaussian,
    /// Density proportional to `exp(-|S|/scale)`: exponential tails, finite
    /// variance for integrands decaying like `exp(-c |S|)` with `c > 1/(2 scale)`.
    RadialLaplace,
}

/// A positive-definite Hermitian `h = exp(S)` with an importance weight.
#[derive(Debug, Clone)]
pub struct HermitianSample {
    pub h: CMat,
    /// `S = log h`.
    pub s: CMat,
    /// Eigenvalues of `S`.
    pub s_eigen: Vec<f64>,
    /// `log( J(S) / p(S) )`: invariant density in exponential coordinates over
    /// the proposal density, both with respect to Lebesgue measure on the
    /// orthonormal coordinates of Hermitian matrices.
    pub log_weight: f64,
}

/// `log(sh(x)/x)`, stable for all `x`.
pub fn log_shc(x: f64) -> f64 {
    let a = x.abs();
    if a < 1e-4 {
        a * a / 6.0
    } else if a < 20.0 {
        (a.sinh() / a).ln()
    } else {
        a + (-(-2.0 * a).exp()).ln_1p() - (2.0 * a).ln()
    }
}

/// Log of the Jacobian `prod_{j<k} (sh(s_j - s_k)/(s_j - s_k))^2` of
/// `S -> exp(2S)` relative to the `GL_n(C)`-invariant measure.
pub fn log_jacobian(s_eigen: &[f64]) -> f64 {
    let mut acc = 0.0;
    for j in 0..s_eigen.len() {
        for k in j + 1..s_eigen.len() {
            acc += 2.0 * log_shc(s_eigen[j] - s_eigen[k]);
        }
    }
    acc
}

/// The normalization `(2 pi)^{-d/2}`, `d = n^2`, for the non-compact factor.
pub fn flat_measure_constant(n: usize) -> f64 {
    (2.0 * std::f64::consts::PI).powf(-((n * n) as f64) / 2.0)
}

/// Draw `S` Hermitian from the proposal, return `h = exp(S)` and the weight.
pub fn sample_hermitian_factor<R: Rng + ?Sized>(
    n: usize,
    scale: f64,
    proposal: Proposal,
    rng: &mut R,
) -> HermitianSample {
    let d = n * n;
    let mut coords: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let log_p = match proposal {
        Proposal::Gaussian => {
            for c in coords.iter_mut() {
                *c *= scale;
            }
            let q: f64 = coords.iter().map(|c| c * c).sum();
            -0.5 * d as f64 * (2.0 * std::f64::consts::PI * scale * scale).ln() - q / (2.0 * scale * scale)
        }
        Proposal::RadialLaplace => {
            let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
            let radius: f64 = Gamma::new(d as f64, scale).unwrap().sample(rng);
            for c in coords.iter_mut() {
                *c *= radius / norm;
            }
            let df = d as f64;
            let log_area = std::f64::consts::LN_2 + 0.5 * df * std::f64::consts::PI.ln() - ln_gamma(0.5 * df);
            -df * scale.ln() - ln_gamma(df) - log_area - radius / scale
        }
    };
    let s = hermitian_from_coords(n, &coords);
    let eig = nalgebra::SymmetricEigen::new(s.clone());
    let s_eigen: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    let u = &eig.eigenvectors;
    let e = CMat::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.exp(), 0.0)));
    let h = u * e * u.adjoint();
    HermitianSample {
        h,
        log_weight: log_jacobian(&s_eigen) - log_p,
        s,
        s_eigen,
    }
}

/// Hermitian matrix from orthonormal coordinates: diagonal entries first,
/// then `sqrt(2) Re`, `sqrt(2) Im` of each upper entry.
pub fn hermitian_from_coords(n: usize, coords: &[f64]) -> CMat {
    let mut s = CMat::zeros(n, n);
    let mut it = coords.iter();
    for j in 0..n {
        s[(j, j)] = Complex64::new(*it.next().unwrap(), 0.0);
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..n {
        for k in j + 1..n {
            let re = it.next().unwrap() * r;
            let im = it.next().unwrap() * r;
            s[(j, k)] = Complex64::new(re, im);
            s[(k, j)] = Complex64::new(re, -im);
        }
    }
    s
}

/// `exp` of a Hermitian matrix.
pub fn hermitian_exp(s: &CMat) -> CMat {
    hermitian_map(s, f64::exp)
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(|p, q| p.partial_cmp(q).unwrap());
    y.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = 2.0 * (-1f64).powi(k - 1) * (-2.0 * kf * kf * lambda * lambda).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    (d, p.clamp(0.0, 1.0))
}
