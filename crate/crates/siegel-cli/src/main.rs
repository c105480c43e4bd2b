mod commands;
mod config;
mod output;
mod selftest;

use clap::{Parser, Subcommand};
use commands::*;
use config::RunConfig;
use output::{json_document, to_value, Provenance};
use siegel_core::{DistanceConvention, Result, SiegelError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "siegel", version, about = "Harmonic analysis on the Siegel upper half-space")]
struct Cli {
    /// TOML run config; defaults to $SIEGEL_HEAT_CONFIG, then built-in values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a symplectic matrix to a point (JSON inline or @file).
    Act {
        #[arg(long)]
        g: String,
        #[arg(long)]
        z: String,
    },
    /// Distance and radial coordinates; no points means the shipped example pair.
    Distance {
        #[arg(long)]
        z: Option<String>,
        #[arg(long)]
        w: Option<String>,
        #[arg(long, default_value = "paper")]
        convention: DistanceConvention,
    },
    /// Siegel-reduce a point.
    Reduce {
        #[arg(long)]
        z: String,
    },
    /// Spherical function at (lambda, r).
    Spherical {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        lambda: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        r: Vec<f64>,
        #[arg(long, value_enum, default_value = "fj")]
        method: SphericalMethod,
        #[arg(long, default_value_t = 0)]
        kappa: u32,
    },
    /// Plancherel density |c(lambda)|^-2, optionally estimated by Monte Carlo.
    Cfunction {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        lambda: Vec<f64>,
        #[arg(long)]
        estimate: bool,
    },
    /// Heat kernel at time t and radial point r.
    Heat {
        #[arg(long)]
        t: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        r: Vec<f64>,
        #[arg(long)]
        kappa: Option<u32>,
        #[arg(long, value_enum, default_value = "fj")]
        method: HeatMethod,
    },
    /// Sup-norm bounds over a range of weights.
    Bound {
        #[arg(long, value_enum)]
        setting: Setting,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        kappa_min: u32,
        #[arg(long)]
        kappa_max: u32,
        #[arg(long, default_value_t = 12)]
        kappa_step: u32,
        #[arg(long, default_value_t = 1)]
        level: i64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Direct partial sum of a cusp series and its bound.
    CuspSum {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        j: usize,
        #[arg(long)]
        kappa: u32,
        #[arg(long)]
        cutoff: Option<i64>,
        #[arg(long, default_value_t = 1)]
        level: i64,
        /// Point as JSON; otherwise `i y` times the identity.
        #[arg(long)]
        z: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        y: f64,
    },
    /// Degree-one ground truth from the discriminant form.
    Oracle {
        #[arg(long, value_enum)]
        what: OracleWhat,
        /// `x,y` for z = x + iy.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        z: Option<Vec<f64>>,
        #[arg(long, default_value_t = 12)]
        kappa: u32,
    },
    /// Built-in consistency checks.
    Selftest {
        #[arg(long)]
        quick: bool,
    },
}

fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(s) = cli.samples {
        cfg.samples = s;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(o) = &cli.out {
        cfg.output = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(String, bool)> {
    let cfg = effective_config(cli)?;
    let degree = |n: Option<usize>| n.unwrap_or(cfg.degree);
    let (name, out, ok) = match &cli.command {
        Command::Act { g, z } => ("act", act_cmd(g, z)?, true),
        Command::Distance { z, w, convention } => ("distance", distance_cmd(z.as_deref(), w.as_deref(), *convention)?, true),
        Command::Reduce { z } => ("reduce", reduce_cmd(z, &cfg)?, true),
        Command::Spherical { lambda, r, method, kappa } => {
            ("spherical", spherical_cmd(lambda, r, *method, *kappa, &cfg)?, true)
        }
        Command::Cfunction { lambda, estimate } => ("cfunction", cfunction_cmd(lambda, *estimate, &cfg)?, true),
        Command::Heat { t, r, kappa, method } => ("heat", heat_cmd(*t, r, *kappa, *method, &cfg)?, true),
        Command::Bound {
            setting,
            n,
            kappa_min,
            kappa_max,
            kappa_step,
            level,
            format,
        } => {
            let a = BoundArgs {
                setting: *setting,
                n: degree(*n),
                kappa_min: *kappa_min,
                kappa_max: *kappa_max,
                kappa_step: *kappa_step,
                level: *level,
                format: *format,
            };
            ("bound", bound_cmd(&a, &cfg)?, true)
        }
        Command::CuspSum {
            n,
            j,
            kappa,
            cutoff,
            level,
            z,
            y,
        } => {
            let a = CuspArgs {
                n: degree(*n),
                j: *j,
                kappa: *kappa,
                cutoff: *cutoff,
                level: *level,
                z: z.clone(),
                y: *y,
            };
            ("cusp-sum", cusp_sum_cmd(&a, &cfg)?, true)
        }
        Command::Oracle { what, z, kappa } => {
            let z = match z.as_deref() {
                None => None,
                Some(&[x, y]) => Some((x, y)),
                Some(_) => return Err(SiegelError::Validation("--z takes exactly two numbers x,y".into())),
            };
            ("oracle", oracle_cmd(*what, z, *kappa, &cfg)?, true)
        }
        Command::Selftest { quick } => {
            let checks = selftest::run(*quick);
            for c in &checks {
                eprintln!("{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let ok = checks.iter().all(|c| c.passed);
            ("selftest", Output::Json(to_value(&checks)?), ok)
        }
    };
    let prov = Provenance::new(cfg);
    let text = match out {
        Output::Json(v) => json_document(name, &prov, v)?,
        Output::Csv(t) => t.render(&prov)?,
    };
    Ok((text, ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(text, ok)| {
        let dest = cli.out.clone().or_else(|| effective_config(&cli).ok().and_then(|c| c.output));
        match dest {
            Some(p) => std::fs::write(&p, &text).map_err(|e| SiegelError::Validation(format!("{}: {e}", p.display())))?,
            None => print!("{text}"),
        }
        Ok(ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("siegel: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
