use crate::config::RunConfig;
use serde::Serialize;
use serde_json::{json, Value};
use siegel_core::{Result, SiegelError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `(config hash, seed, version)` stamped on every output.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub config: RunConfig,
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config: RunConfig) -> Self {
        Provenance {
            config_hash: config.hash(),
            seed: config.seed,
            config,
        }
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| SiegelError::Numerical(format!("serialization: {e}")))
}

/// JSON document with sorted keys.
pub fn json_document(command: &str, prov: &Provenance, result: Value) -> Result<String> {
    // serde_json's default map is ordered by key, so the layout is stable
    let doc = json!({
        "command": command,
        "config": to_value(&prov.config)?,
        "config_hash": prov.config_hash,
        "seed": prov.seed,
        "version": VERSION,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| SiegelError::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    /// Serializes with provenance columns appended to every row.
    pub fn render(&self, prov: &Provenance) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let err = |e: csv::Error| SiegelError::Numerical(format!("csv: {e}"));
        let mut header = self.header.clone();
        header.extend(["config_hash", "seed", "version"].map(String::from));
        w.write_record(&header).map_err(err)?;
        for row in &self.rows {
            let mut r = row.clone();
            r.resize(self.header.len(), String::new());
            r.extend([prov.config_hash.clone(), prov.seed.to_string(), VERSION.to_string()]);
            w.write_record(&r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| SiegelError::Numerical(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| SiegelError::Numerical(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 6.02e23, -1e-300, std::f64::consts::PI] {
            let s = fmt_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }
}
