use crate::config::RunConfig;
use crate::output::{fmt_float, to_value, CsvTable};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use siegel_core::heat::{
    classical_h2_heat_kernel, default_spectral_nodes, fit_parametrization, heat_kernel_fj, heat_kernel_spectral,
    heat_kernel_weighted_bound,
};
use siegel_core::modular::{
    delta_cusp_form, delta_petersson_norm_sq, delta_q_expansion, petersson_norm_sq_with, s_kappa_direct,
    weight12_eigen_check,
};
use siegel_core::roots::{c_inverse_sq, c_inverse_sq_product};
use siegel_core::spherical::{calibrate, complex_spherical, harish_chandra_phi, real_spherical_fj, weighted_spherical};
use siegel_core::supnorm::{cocompact_bound, cofinite_bound, cusp_sum_bound, cusp_sum_direct, log_log_slope};
use siegel_core::{
    act, distance, radial_coordinates, siegel_reduce, Calibration, Complex64, DistanceConvention, FjConfig,
    HeatKernelQuery, QuadratureSpec, Result, SiegelError, SiegelPoint, SymplecticMatrix,
};

const EXAMPLE_PAIR: &str = include_str!("../data/example_pair.json");

pub enum Output {
    Json(Value),
    Csv(CsvTable),
}

fn bad(msg: impl Into<String>) -> SiegelError {
    SiegelError::Validation(msg.into())
}

/// Inline JSON, or `@path` to read it from a file.
pub fn parse_json<T: DeserializeOwned>(arg: &str) -> Result<T> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| bad(format!("{path}: {e}")))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| bad(format!("bad JSON input: {e}")))
}

fn mc_spec(cfg: &RunConfig) -> QuadratureSpec {
    QuadratureSpec::monte_carlo(cfg.samples, cfg.seed).with_workers(cfg.workers)
}

fn fj_config(cfg: &RunConfig) -> FjConfig {
    FjConfig {
        scale: cfg.proposal_scale,
        ..FjConfig::default()
    }
}

fn calibration(n: usize, cfg: &RunConfig) -> Result<Calibration> {
    let spec = QuadratureSpec::monte_carlo(cfg.calibration_samples, cfg.calibration_seed).with_workers(cfg.workers);
    calibrate(n, &spec, &fj_config(cfg))
}

pub fn act_cmd(g: &str, z: &str) -> Result<Output> {
    let g: SymplecticMatrix = parse_json(g)?;
    let z: SiegelPoint = parse_json(z)?;
    Ok(Output::Json(to_value(&act(&g, &z)?)?))
}

#[derive(Deserialize)]
struct Pair {
    z: SiegelPoint,
    w: SiegelPoint,
}

pub fn distance_cmd(z: Option<&str>, w: Option<&str>, convention: DistanceConvention) -> Result<Output> {
    let (z, w) = match (z, w) {
        (Some(z), Some(w)) => (parse_json(z)?, parse_json(w)?),
        (None, None) => {
            let p: Pair = parse_json(EXAMPLE_PAIR)?;
            (p.z, p.w)
        }
        _ => return Err(bad("give both --z and --w, or neither for the example pair")),
    };
    let d = distance(&z, &w, convention)?;
    let r = radial_coordinates(&z, &w)?;
    Ok(Output::Json(json!({
        "convention": convention,
        "distance": d,
        "radial": r.r,
    })))
}

pub fn reduce_cmd(z: &str, cfg: &RunConfig) -> Result<Output> {
    let z: SiegelPoint = parse_json(z)?;
    Ok(Output::Json(to_value(&siegel_reduce(&z, cfg.max_reduction_steps)?)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SphericalMethod {
    Fj,
    Hc,
    Complex,
}

pub fn spherical_cmd(lambda: &[f64], r: &[f64], method: SphericalMethod, kappa: u32, cfg: &RunConfig) -> Result<Output> {
    let spec = mc_spec(cfg);
    let (e, name, id) = match method {
        SphericalMethod::Fj if kappa > 0 => (weighted_spherical(lambda, r, kappa, &spec)?, "fj", "ratio-at-origin"),
        SphericalMethod::Fj => (real_spherical_fj(lambda, r, &spec)?, "fj", "ratio-at-origin"),
        SphericalMethod::Hc => (harish_chandra_phi(lambda, r, &spec)?, "hc", "haar-probability"),
        SphericalMethod::Complex => {
            if lambda.len() != r.len() || lambda.is_empty() {
                return Err(bad("lambda and r must have the same positive length"));
            }
            let v = complex_spherical(lambda, r);
            (siegel_core::Estimate { value: v, std_error: 0.0 }, "complex", "closed-form")
        }
    };
    Ok(Output::Json(json!({
        "value": e.value,
        "std_error": e.std_error,
        "method": name,
        "kappa": kappa,
        "calibration_id": id,
    })))
}

pub fn cfunction_cmd(lambda: &[f64], estimate: bool, cfg: &RunConfig) -> Result<Output> {
    if lambda.is_empty() || lambda.iter().any(|v| !v.is_finite()) {
        return Err(bad("lambda must be a non-empty list of finite numbers"));
    }
    let mut out = json!({
        "lambda": lambda,
        "c_inverse_sq": c_inverse_sq(lambda),
        "c_inverse_sq_product": c_inverse_sq_product(lambda),
    });
    if estimate {
        let cal = calibration(lambda.len(), cfg)?;
        let e = cal.c_inverse_sq_estimate(lambda, &mc_spec(cfg), &fj_config(cfg))?;
        out["estimate"] = to_value(&e)?;
        out["calibration"] = to_value(&cal)?;
    }
    Ok(Output::Json(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum HeatMethod {
    Fj,
    Spectral,
    Bound,
    Oracle,
}

pub fn heat_cmd(t: f64, r: &[f64], kappa: Option<u32>, method: HeatMethod, cfg: &RunConfig) -> Result<Output> {
    let n = r.len();
    if n == 0 {
        return Err(bad("--r needs at least one coordinate"));
    }
    let cal = calibration(n, cfg)?;
    let fj = fj_config(cfg);
    let mut q = HeatKernelQuery::new(t, r.to_vec(), mc_spec(cfg));
    if let Some(k) = kappa {
        q = q.with_kappa(k);
    }
    let res = match method {
        HeatMethod::Fj => heat_kernel_fj(&q, &cal, &fj)?,
        HeatMethod::Spectral => heat_kernel_spectral(&q, &cal, &fj, default_spectral_nodes(n))?,
        HeatMethod::Bound => {
            if kappa.is_none() {
                return Err(bad("--method bound needs --kappa"));
            }
            heat_kernel_weighted_bound(&q, &cal, &fj)?
        }
        HeatMethod::Oracle => {
            if n != 1 {
                return Err(SiegelError::Unsupported("the closed-form oracle exists for n = 1 only".into()));
            }
            if !(t > 0.0) {
                return Err(SiegelError::Domain(format!("need t > 0, got {t}")));
            }
            let fit = fit_parametrization(&cal);
            siegel_core::HeatResult {
                value: fit.amplitude * classical_h2_heat_kernel(fit.a * r[0], fit.b * t),
                std_error: 0.0,
                warnings: vec![],
            }
        }
    };
    let mut out = to_value(&res)?;
    out["method"] = json!(format!("{method:?}").to_lowercase());
    out["calibration"] = to_value(&cal)?;
    Ok(Output::Json(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Setting {
    Cocompact,
    Cofinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct BoundArgs {
    pub setting: Setting,
    pub n: usize,
    pub kappa_min: u32,
    pub kappa_max: u32,
    pub kappa_step: u32,
    pub level: i64,
    pub format: Format,
}

pub fn bound_cmd(a: &BoundArgs, cfg: &RunConfig) -> Result<Output> {
    if a.kappa_min > a.kappa_max || a.kappa_step == 0 {
        return Err(bad("need kappa-min <= kappa-max and a positive step"));
    }
    let mut kappas: Vec<u32> = (a.kappa_min..=a.kappa_max).step_by(a.kappa_step as usize).collect();
    if kappas.last() != Some(&a.kappa_max) {
        kappas.push(a.kappa_max);
    }
    let reports = kappas
        .iter()
        .map(|&k| match a.setting {
            Setting::Cocompact => cocompact_bound(a.n, k),
            Setting::Cofinite => cofinite_bound(a.n, k, a.level, cfg.c2),
        })
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = kappas.iter().map(|&k| k as f64).collect();
    let total: Vec<f64> = reports.iter().map(|r| r.bound).collect();
    // the cusp contribution carries the top power of kappa in the cofinite case
    let leading: Vec<f64> = reports
        .iter()
        .map(|r| match a.setting {
            Setting::Cocompact => r.bound,
            Setting::Cofinite => r.evaluations.iter().find(|e| e.label == "cusp_part").map_or(f64::NAN, |e| e.value),
        })
        .collect();
    let slope_leading = log_log_slope(&x, &leading);
    let slope_total = log_log_slope(&x, &total);
    let exponent = reports[0].exponent;

    if a.format == Format::Json {
        return Ok(Output::Json(json!({
            "reports": to_value(&reports)?,
            "exponent": exponent.to_string(),
            "slope_leading": slope_leading,
            "slope_total": slope_total,
        })));
    }
    let labels: Vec<String> = reports[0].evaluations.iter().map(|e| e.label.clone()).collect();
    let mut header: Vec<String> = ["kappa", "bound", "exponent", "constant_estimate"].map(String::from).to_vec();
    header.extend(labels.iter().cloned());
    let mut rows = Vec::new();
    for (k, r) in kappas.iter().zip(&reports) {
        let mut row = vec![
            k.to_string(),
            fmt_float(r.bound),
            r.exponent.to_string(),
            fmt_float(r.constant_estimate),
        ];
        for l in &labels {
            row.push(r.evaluations.iter().find(|e| &e.label == l).map_or(String::new(), |e| fmt_float(e.value)));
        }
        rows.push(row);
    }
    rows.push(vec!["slope_leading".into(), fmt_float(slope_leading), exponent.to_string()]);
    rows.push(vec!["slope_total".into(), fmt_float(slope_total), exponent.to_string()]);
    Ok(Output::Csv(CsvTable { header, rows }))
}

pub struct CuspArgs {
    pub n: usize,
    pub j: usize,
    pub kappa: u32,
    pub cutoff: Option<i64>,
    pub level: i64,
    pub z: Option<String>,
    pub y: f64,
}

pub fn cusp_sum_cmd(a: &CuspArgs, cfg: &RunConfig) -> Result<Output> {
    let z = match &a.z {
        Some(s) => parse_json(s)?,
        None => SiegelPoint::imaginary_diagonal(&vec![a.y; a.n])?,
    };
    let cutoff = a.cutoff.unwrap_or(cfg.cusp_cutoff);
    let sum = cusp_sum_direct(a.n, a.j, &z, a.kappa, cutoff, a.level)?;
    let bound = cusp_sum_bound(a.n, a.j, z.y(), a.kappa, a.level)?;
    let mut out = to_value(&sum)?;
    out["bound"] = json!(bound);
    out["ratio"] = json!(sum.value / bound);
    Ok(Output::Json(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleWhat {
    Delta,
    Norm,
    Skappa,
    EigenCheck,
}

/// Ten interior points of the standard fundamental domain and nearby.
pub fn default_eigen_points() -> Vec<Complex64> {
    [
        (0.0, 1.1),
        (0.2, 1.0),
        (-0.3, 1.2),
        (0.45, 1.5),
        (0.1, 2.0),
        (-0.1, 0.9),
        (0.3, 0.7),
        (0.0, 3.0),
        (-0.45, 1.0),
        (0.25, 1.6),
    ]
    .iter()
    .map(|&(x, y)| Complex64::new(x, y))
    .collect()
}

pub fn oracle_cmd(what: OracleWhat, z: Option<(f64, f64)>, kappa: u32, cfg: &RunConfig) -> Result<Output> {
    let z = z.map(|(x, y)| Complex64::new(x, y)).unwrap_or(Complex64::new(0.0, 1.0));
    let out = match what {
        OracleWhat::Delta => {
            let d = delta_cusp_form(z, 200)?;
            json!({ "z": [z.re, z.im], "re": d.value.re, "im": d.value.im, "tail_bound": d.tail_bound })
        }
        OracleWhat::Norm => {
            let v = if cfg.petersson_rel_tol == RunConfig::default().petersson_rel_tol {
                delta_petersson_norm_sq()
            } else {
                petersson_norm_sq_with(&delta_q_expansion(40), cfg.petersson_rel_tol)?
            };
            json!({ "petersson_norm_sq": v, "rel_tol": cfg.petersson_rel_tol })
        }
        OracleWhat::Skappa => json!({ "z": [z.re, z.im], "kappa": kappa, "value": s_kappa_direct(z, kappa)? }),
        OracleWhat::EigenCheck => {
            let checks = weight12_eigen_check(&default_eigen_points(), cfg.fd_step)?;
            let worst = checks.iter().map(|c| c.rel_error).fold(0.0, f64::max);
            json!({ "eigenvalue": 30.0, "max_rel_error": worst, "checks": to_value(&checks)? })
        }
    };
    Ok(Output::Json(out))
}
