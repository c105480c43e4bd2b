use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use siegel_core::{Result, SiegelError};
use std::path::{Path, PathBuf};

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "SIEGEL_HEAT_CONFIG";

/// Effective settings of a run. Every key is optional in the file; unknown keys are errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Degree used when a command does not get `--n`.
    pub degree: usize,
    pub seed: u64,
    /// Monte-Carlo samples per estimate.
    pub samples: usize,
    /// Logical workers; part of the result, not a thread count.
    pub workers: usize,
    pub calibration_samples: usize,
    pub calibration_seed: u64,
    /// Laplace proposal scale on the non-compact factor; unset picks the per-degree default.
    pub proposal_scale: Option<f64>,
    pub petersson_rel_tol: f64,
    pub fd_step: f64,
    /// Cusp decay constant in `exp(-c2 tr Y)`.
    pub c2: f64,
    pub cusp_cutoff: i64,
    pub max_reduction_steps: usize,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            degree: 1,
            seed: 1,
            samples: 200_000,
            workers: 8,
            calibration_samples: 200_000,
            calibration_seed: 11,
            proposal_scale: None,
            petersson_rel_tol: 1e-10,
            fd_step: 1e-3,
            c2: siegel_core::supnorm::C2_DEGREE_ONE,
            cusp_cutoff: 40,
            max_reduction_steps: 200,
            output: None,
        }
    }
}

fn bad(msg: impl Into<String>) -> SiegelError {
    SiegelError::Validation(msg.into())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| bad(format!("config: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path`, else the file named by [`CONFIG_ENV`], else the defaults.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let env = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
        match path.map(Path::to_path_buf).or(env) {
            Some(p) => {
                let text = std::fs::read_to_string(&p).map_err(|e| bad(format!("{}: {e}", p.display())))?;
                Self::from_toml(&text)
            }
            None => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.degree) {
            return Err(bad("degree must be in 1..=4"));
        }
        if self.samples == 0 || self.workers == 0 || self.calibration_samples == 0 {
            return Err(bad("samples, workers and calibration_samples must be positive"));
        }
        if self.proposal_scale.is_some_and(|s| !(s > 0.0 && s.is_finite())) {
            return Err(bad("proposal_scale must be positive"));
        }
        for (name, v) in [
            ("petersson_rel_tol", self.petersson_rel_tol),
            ("fd_step", self.fd_step),
            ("c2", self.c2),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(format!("{name} must be positive")));
            }
        }
        if self.cusp_cutoff < 1 {
            return Err(bad("cusp_cutoff must be at least 1"));
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form (sorted keys), output path excluded.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).unwrap_or_default();
        if let Some(m) = v.as_object_mut() {
            m.remove("output");
        }
        let canonical = v.to_string();
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
