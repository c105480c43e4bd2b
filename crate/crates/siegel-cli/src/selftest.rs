use serde::Serialize;
use siegel_core::integration::gaussian_moment;
use siegel_core::modular::{delta_cusp_form, delta_petersson_norm_sq, delta_q_expansion, petersson_norm_sq, ramanujan_tau};
use siegel_core::roots::weyl_order;
use siegel_core::spherical::{complex_spherical, harish_chandra_phi, real_spherical_fj, weighted_spherical};
use siegel_core::supnorm::{cocompact_bound, cofinite_bound, hua_beta, rectangular_beta, C2_DEGREE_ONE};
use siegel_core::symplectic::{cayley, cosh_product};
use siegel_core::{act, distance, Complex64, DistanceConvention, QuadratureSpec, Result, SiegelPoint, SymplecticMatrix};
use std::f64::consts::PI;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let (passed, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, e.to_string()),
    };
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

fn close(a: f64, b: f64, tol: f64) -> (bool, String) {
    ((a - b).abs() <= tol * b.abs().max(1.0), format!("{a} vs {b}"))
}

/// Identities that hold exactly or by construction.
fn quick() -> Vec<Check> {
    vec![
        check("identity_action", || {
            let z = SiegelPoint::base(3);
            let w = act(&SymplecticMatrix::identity(3), &z)?;
            Ok(close((w.z() - z.z()).camax(), 0.0, 1e-15))
        }),
        check("distance_to_self", || {
            let z = SiegelPoint::base(2);
            Ok(close(distance(&z, &z, DistanceConvention::Paper)?, 0.0, 0.0))
        }),
        check("cosh_product_at_self", || {
            let z = SiegelPoint::base(2);
            Ok(close(cosh_product(&z, &z)?, 1.0, 1e-15))
        }),
        check("cayley_of_base_point", || Ok(close(cayley(&SiegelPoint::base(2))?.camax(), 0.0, 1e-15))),
        check("weyl_group_order", || Ok(((1..=4).map(weyl_order).eq([2, 8, 48, 384]), "2,8,48,384".into()))),
        check("gaussian_moment_zero", || Ok(close(gaussian_moment(0), PI.sqrt(), 1e-15))),
        check("hua_n1", || Ok(close(hua_beta(1, 2.0)?, PI / 2.0, 1e-14))),
        check("rectangular_1x1", || Ok(close(rectangular_beta(1, 1, 1.0)?, PI, 1e-14))),
        check("complex_spherical_at_origin", || Ok(close(complex_spherical(&[1.3, 0.4], &[0.0, 0.0]), 1.0, 1e-12))),
        check("fj_at_origin", || {
            let e = real_spherical_fj(&[1.0, 0.5], &[0.0, 0.0], &QuadratureSpec::monte_carlo(2000, 1))?;
            Ok(close(e.value, 1.0, 1e-12))
        }),
        check("hc_at_origin", || {
            let e = harish_chandra_phi(&[1.0], &[0.0], &QuadratureSpec::monte_carlo(2000, 1))?;
            Ok(close(e.value, 1.0, 1e-12))
        }),
        check("weight_zero_is_unweighted", || {
            let spec = QuadratureSpec::monte_carlo(2000, 2);
            let a = weighted_spherical(&[1.0], &[0.5], 0, &spec)?;
            let b = real_spherical_fj(&[1.0], &[0.5], &spec)?;
            Ok((a.value.to_bits() == b.value.to_bits(), format!("{} vs {}", a.value, b.value)))
        }),
        check("tau_leading_coefficients", || {
            let t = ramanujan_tau(2);
            Ok((t == [1, -24], format!("{t:?}")))
        }),
        check("delta_periodic", || {
            let z = Complex64::new(0.2, 0.9);
            let a = delta_cusp_form(z, 200)?.value;
            let b = delta_cusp_form(z + 1.0, 200)?.value;
            Ok(close((a - b).norm() / a.norm(), 0.0, 1e-12))
        }),
        check("petersson_bilinear", || {
            let n = delta_petersson_norm_sq();
            let m = petersson_norm_sq(&delta_q_expansion(40).scaled(2.0))?;
            Ok(close(m, 4.0 * n, 1e-9))
        }),
        check("bound_exponents", || {
            let a = cocompact_bound(2, 12)?.exponent.to_string();
            let b = cofinite_bound(1, 12, 1, C2_DEGREE_ONE)?.exponent.to_string();
            Ok((a == "3" && b == "3/2", format!("{a}, {b}")))
        }),
    ]
}

/// Monte-Carlo cross-checks, several seconds each.
fn slow() -> Vec<Check> {
    vec![
        check("fj_matches_hc_n1", || {
            let spec = QuadratureSpec::monte_carlo(200_000, 5);
            let a = real_spherical_fj(&[1.0], &[1.0], &spec)?;
            let b = harish_chandra_phi(&[1.0], &[1.0], &spec)?;
            let ok = (a.value - b.value).abs() <= 3.0 * (a.std_error + b.std_error);
            Ok((ok, format!("{} vs {}", a.value, b.value)))
        }),
        check("c_function_n1", || {
            let cfg = siegel_core::FjConfig::default();
            let spec = QuadratureSpec::monte_carlo(200_000, 11);
            let cal = siegel_core::spherical::calibrate(1, &spec, &cfg)?;
            let e = cal.c_inverse_sq_estimate(&[1.0], &spec.with_seed(12), &cfg)?;
            Ok(close(e.value, siegel_core::roots::c_inverse_sq(&[1.0]), 0.02))
        }),
    ]
}

pub fn run(quick_only: bool) -> Vec<Check> {
    let mut out = quick();
    if !quick_only {
        out.extend(slow());
    }
    out
}
