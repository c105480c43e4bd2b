//! Heat kernels on the Siegel upper half-space: the closed integral over the
//! complexified compact group, the spectral (inverse spherical transform)
//! route, the weight-kappa upper bound, and the classical kernel of the
//! hyperbolic plane used as the `n = 1` oracle.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{validation, Result, SiegelError};
use crate::integration::{adaptive_quad, gauss_hermite, log_shc, mc_moments, Estimate, QuadratureSpec};
use crate::roots::{c_inverse_sq, epsilon, tau};
use crate::spherical::{fj_kernel, Calibration, FactorData, FjConfig};

/// A radial heat-kernel evaluation at `Z = k_0 i exp(2R)`, `R = diag(r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatKernelQuery {
    pub n: usize,
    pub t: f64,
    pub r: Vec<f64>,
    pub kappa: u32,
    pub spec: QuadratureSpec,
}

impl HeatKernelQuery {
    pub fn new(t: f64, r: Vec<f64>, spec: QuadratureSpec) -> Self {
        HeatKernelQuery {
            n: r.len(),
            t,
            r,
            kappa: 0,
            spec,
        }
    }

    pub fn with_kappa(mut self, kappa: u32) -> Self {
        self.kappa = kappa;
        self
    }

    fn check(&self, cal: &Calibration) -> Result<()> {
        if self.n == 0 || self.r.len() != self.n {
            return validation("r must have length n >= 1");
        }
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(SiegelError::Domain(format!("t must be positive, got {}", self.t)));
        }
        if self.r.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return validation("r must be finite and non-negative");
        }
        if cal.n != self.n {
            return validation("calibration degree does not match the query");
        }
        Ok(())
    }
}

/// Estimate with accuracy diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatResult {
    pub value: f64,
    pub std_error: f64,
    pub warnings: Vec<String>,
}

impl HeatResult {
    fn from_estimate(e: Estimate) -> Self {
        let mut warnings = Vec::new();
        if e.std_error > 0.2 * e.value.abs() {
            warnings.push(format!(
                "Monte-Carlo relative error {:.2} exceeds 0.2",
                e.std_error / e.value.abs()
            ));
        }
        HeatResult {
            value: e.value,
            std_error: e.std_error,
            warnings,
        }
    }

    pub fn estimate(&self) -> Estimate {
        Estimate {
            value: self.value,
            std_error: self.std_error,
        }
    }
}

fn structure_constant(n: usize) -> f64 {
    (0..n).map(|a| (1..=2 * a + 1).map(|v| v as f64).product::<f64>()).product()
}

/// `log` of `a_n K_n 2^{-n^2} pi^{-n^2/2} (4 pi)^{n/2} e^{-sum j^2 t/4} t^{-n^2-n/2}`.
pub fn log_heat_prefactor(n: usize, t: f64, cal: &Calibration) -> f64 {
    let n2 = (n * n) as f64;
    let nf = n as f64;
    let sum_sq: f64 = (1..=n).map(|j| (j * j) as f64).sum();
    cal.a_n.ln() + structure_constant(n).ln() - n2 * std::f64::consts::LN_2 - 0.5 * n2 * PI.ln()
        + 0.5 * nf * (4.0 * PI).ln()
        - sum_sq * t / 4.0
        - (n2 + nf / 2.0) * t.ln()
}

/// `log( eps(rho) / delta(rho) )`; the quotient is positive and Weyl invariant.
pub fn log_eps_over_delta(rho: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (j, &a) in rho.iter().enumerate() {
        acc -= log_shc(a);
        for &b in &rho[j + 1..] {
            acc += 2.0 * std::f64::consts::LN_2 - log_shc((a + b) / 2.0) - log_shc((a - b) / 2.0);
        }
    }
    acc
}

/// `K_t` from the integral of `eps(rho) exp(-|rho|^2/t) / delta(rho)` over the factor space.
pub fn heat_kernel_fj(q: &HeatKernelQuery, cal: &Calibration, cfg: &FjConfig) -> Result<HeatResult> {
    q.check(cal)?;
    let pre = log_heat_prefactor(q.n, q.t, cal);
    let m = mc_moments(
        1,
        |f: &FactorData, out: &mut [f64]| {
            let rho = f.rho(&q.r);
            let q2: f64 = rho.iter().map(|v| v * v).sum();
            out[0] = (pre + f.log_weight + log_eps_over_delta(&rho) - q2 / q.t).exp();
        },
        |rng| cfg.draw(q.n, rng),
        &q.spec,
    )?;
    Ok(HeatResult::from_estimate(m.estimate(0)))
}

/// Smallest `t` accepted by the spectral route.
pub const SPECTRAL_MIN_T: f64 = 0.1;

/// Gauss-Hermite nodes per axis used by [`heat_kernel_spectral`].
pub fn default_spectral_nodes(n: usize) -> usize {
    match n {
        1 => 120,
        2 => 36,
        _ => 14,
    }
}

/// `K_t = |W|^{-1} int e^{lambda_omega t} phi_lambda |c(lambda)|^{-2} d lambda`.
///
/// For each sample of the factor space, the lambda-integral of
/// `a_n eps/tau Phi_{2 lambda}(rho/2) |c|^{-2}` is done on a product
/// Gauss-Hermite grid scaled to `exp(-t |lambda|^2 / 4)`, truncated at
/// `|lambda_j| <= 12 / sqrt(t)`.
pub fn heat_kernel_spectral(q: &HeatKernelQuery, cal: &Calibration, cfg: &FjConfig, nodes: usize) -> Result<HeatResult> {
    q.check(cal)?;
    if q.t < SPECTRAL_MIN_T {
        return Err(SiegelError::Domain(format!(
            "spectral route needs t >= {SPECTRAL_MIN_T}, got {}",
            q.t
        )));
    }
    let n = q.n;
    let (x, w) = gauss_hermite(nodes);
    let scale = 2.0 / q.t.sqrt();
    let keep: Vec<(f64, f64)> = x
        .iter()
        .zip(&w)
        .filter(|(xi, _)| xi.abs() * scale <= 12.0 / q.t.sqrt() + 1e-12)
        .map(|(a, b)| (*a, *b))
        .collect();
    // Tensor grid of (lambda, log weight); e^{lambda_omega t} is split into the GH weight and a constant.
    let mut grid: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 0.0)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(grid.len() * keep.len());
        for (l, lw) in &grid {
            for &(xi, wi) in &keep {
                let mut v = l.clone();
                v.push(scale * xi);
                next.push((v, lw + wi.ln()));
            }
        }
        grid = next;
    }
    let sum_sq: f64 = (1..=n).map(|j| (j * j) as f64).sum();
    let weyl = crate::roots::weyl_order(n) as f64;
    let log_const = (-sum_sq * q.t / 4.0) + n as f64 * scale.ln() - weyl.ln() + cal.a_n.ln();
    // eps(lambda)/tau(lambda) * |c|^{-2} = pi^{-n^2/2} 2^{-n^2} eps(lambda)^2
    let spectral: Vec<(Vec<f64>, f64)> = grid
        .into_iter()
        .map(|(l, lw)| {
            let e = epsilon(&l);
            let dens = if tau(&l) == 0.0 {
                0.0
            } else {
                c_inverse_sq(&l) * e / tau(&l)
            };
            (l, (lw + log_const).exp() * dens)
        })
        .filter(|(_, c)| *c != 0.0)
        .collect();
    let m = mc_moments(
        1,
        |f: &FactorData, out: &mut [f64]| {
            let rho = f.rho(&q.r);
            let s: f64 = spectral.iter().map(|(l, c)| c * fj_kernel(l, &rho)).sum();
            out[0] = f.log_weight.exp() * s;
        },
        |rng| cfg.draw(n, rng),
        &q.spec,
    )?;
    Ok(HeatResult::from_estimate(m.estimate(0)))
}

/// `|a - b| <= 3 sqrt(sa^2 + sb^2)`; a failure flags the two routes as inconsistent.
pub fn routes_consistent(a: &HeatResult, b: &HeatResult) -> bool {
    (a.value - b.value).abs() <= 3.0 * a.std_error.hypot(b.std_error)
}

/// Upper bound for the weight-kappa kernel: the fj integrand times
/// `exp(kappa sum|rho_j|) / prod ch(r_j)^kappa`, evaluated in log space.
pub fn heat_kernel_weighted_bound(q: &HeatKernelQuery, cal: &Calibration, cfg: &FjConfig) -> Result<HeatResult> {
    q.check(cal)?;
    let mut out = weighted_bound_many(q.n, &[q.r.clone()], q.t, q.kappa, cal, cfg, &q.spec)?;
    Ok(out.remove(0))
}

/// [`heat_kernel_weighted_bound`] at several radial points from the same samples.
pub fn weighted_bound_many(
    n: usize,
    rs: &[Vec<f64>],
    t: f64,
    kappa: u32,
    cal: &Calibration,
    cfg: &FjConfig,
    spec: &QuadratureSpec,
) -> Result<Vec<HeatResult>> {
    for r in rs {
        HeatKernelQuery::new(t, r.clone(), *spec).check(cal)?;
        if r.len() != n {
            return validation("radial points must all have length n");
        }
    }
    if (kappa as usize) < n + 1 {
        return Err(SiegelError::Domain(format!(
            "weighted bound needs kappa >= n + 1 = {}, got {kappa}",
            n + 1
        )));
    }
    if rs.is_empty() {
        return Ok(Vec::new());
    }
    let k = kappa as f64;
    let base = log_heat_prefactor(n, t, cal);
    let pre: Vec<f64> = rs
        .iter()
        .map(|r| base - k * r.iter().map(|v| v.cosh().ln()).sum::<f64>())
        .collect();
    let m = mc_moments(
        rs.len(),
        |f: &FactorData, out: &mut [f64]| {
            for (i, r) in rs.iter().enumerate() {
                let rho = f.rho(r);
                let expo: f64 = rho.iter().map(|v| v * v / t - k * v.abs()).sum();
                out[i] = (pre[i] + f.log_weight + log_eps_over_delta(&rho) - expo).exp();
            }
        },
        |rng| cfg.draw(n, rng),
        spec,
    )?;
    Ok((0..rs.len()).map(|i| HeatResult::from_estimate(m.estimate(i))).collect())
}

/// Heat kernel of `y^2 (d_x^2 + d_y^2)` on the hyperbolic plane at distance `d`:
/// `sqrt(2) (4 pi t)^{-3/2} e^{-t/4} int_d^inf s e^{-s^2/4t} / sqrt(ch s - ch d) ds`.
pub fn classical_h2_heat_kernel(d: f64, t: f64) -> f64 {
    // s = d + u^2; ch s - ch d = 2 sh((s + d)/2) sh(u^2/2)
    let g = |u: f64| -> f64 {
        if u == 0.0 {
            return if d == 0.0 { 0.0 } else { 2.0 * d * (-d * d / (4.0 * t)).exp() / d.sinh().sqrt() };
        }
        let s = d + u * u;
        let den = (2.0 * ((s + d) / 2.0).sinh() * (u * u / 2.0).sinh()).sqrt();
        2.0 * u * s * (-s * s / (4.0 * t)).exp() / den
    };
    // e^{-s^2/4t} < e^{-700} beyond this
    let s_max = (2800.0 * t).sqrt().max(d + 1.0) + 1.0;
    let u_max = (s_max - d).max(1.0).sqrt() + 1.0;
    let (v, _) = adaptive_quad(g, 0.0, u_max, 1e-15, 1e-12);
    2f64.sqrt() * (4.0 * PI * t).powf(-1.5) * (-t / 4.0).exp() * v
}

/// Deterministic `n = 1` kernel from the fj integral: `rho = acosh(ch r ch 2s)`.
pub fn heat_kernel_n1_quadrature(r: f64, t: f64, cal: &Calibration) -> f64 {
    let pre = log_heat_prefactor(1, t, cal);
    let f = |s: f64| -> f64 {
        let rho = (r.cosh() * (2.0 * s).cosh()).acosh();
        (pre + log_eps_over_delta(&[rho]) - rho * rho / t).exp()
    };
    let s_max = ((700.0 * t).sqrt() + r) / 2.0 + 1.0;
    let (v, _) = adaptive_quad(f, 0.0, s_max, 1e-300, 1e-12);
    // the integrand is even in s
    2.0 * v
}

/// `K_paper(r, t) ~ amplitude * K_classical(a r, b t)` for `n = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametrizationFit {
    pub a: f64,
    pub b: f64,
    pub amplitude: f64,
    /// Root-mean-square log residual over the fit grid.
    pub rms_log_residual: f64,
}

/// Least-squares fit of `(a, b, amplitude)` in log space over a grid of `(r, t)`.
pub fn fit_parametrization(cal: &Calibration) -> ParametrizationFit {
    let mut pts = Vec::new();
    for &t in &[0.5, 1.0, 2.0] {
        for i in 0..7 {
            let r = 0.25 * i as f64;
            pts.push((r, t, heat_kernel_n1_quadrature(r, t, cal).ln()));
        }
    }
    let loss = |p: &[f64; 3]| -> f64 {
        if p[0] <= 0.0 || p[1] <= 0.0 {
            return f64::INFINITY;
        }
        pts.iter()
            .map(|&(r, t, lk)| {
                let e = lk - p[2] - classical_h2_heat_kernel(p[0] * r, p[1] * t).ln();
                e * e
            })
            .sum::<f64>()
    };
    let best = nelder_mead(&loss, [1.5, 1.2, 1.0], 0.3, 2000);
    ParametrizationFit {
        a: best[0],
        b: best[1],
        amplitude: best[2].exp(),
        rms_log_residual: (loss(&best) / pts.len() as f64).sqrt(),
    }
}

fn nelder_mead(f: &dyn Fn(&[f64; 3]) -> f64, start: [f64; 3], step: f64, iters: usize) -> [f64; 3] {
    let mut simplex: Vec<([f64; 3], f64)> = (0..4)
        .map(|i| {
            let mut p = start;
            if i > 0 {
                p[i - 1] += step;
            }
            (p, f(&p))
        })
        .collect();
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        if (simplex[3].1 - simplex[0].1).abs() < 1e-16 {
            break;
        }
        let mut c = [0.0; 3];
        for (p, _) in &simplex[..3] {
            for k in 0..3 {
                c[k] += p[k] / 3.0;
            }
        }
        let along = |coef: f64| -> [f64; 3] {
            let mut p = [0.0; 3];
            for k in 0..3 {
                p[k] = c[k] + coef * (simplex[3].0[k] - c[k]);
            }
            p
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = f(&xe);
            simplex[3] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (xr, fr);
        } else {
            let xc = along(0.5);
            let fc = f(&xc);
            if fc < simplex[3].1 {
                simplex[3] = (xc, fc);
            } else {
                let best = simplex[0].0;
                for s in simplex.iter_mut().skip(1) {
                    for k in 0..3 {
                        s.0[k] = best[k] + 0.5 * (s.0[k] - best[k]);
                    }
                    s.1 = f(&s.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    simplex[0].0
}
