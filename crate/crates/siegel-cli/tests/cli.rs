use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::Instant;

fn siegel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siegel"))
        .args(args)
        .env_remove("SIEGEL_HEAT_CONFIG")
        .output()
        .expect("spawn siegel")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("siegel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn distance_of_example_pair() {
    let v = json(&siegel(&["distance"]));
    let d = v["result"]["distance"].as_f64().unwrap();
    assert!((d - 2f64.sqrt() * 2f64.ln()).abs() < 1e-12, "{d}");
    let m = json(&siegel(&["distance", "--convention", "metric"]));
    assert!((m["result"]["distance"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn provenance_and_key_order() {
    let out = siegel(&["distance"]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let v = json(&out);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(v["seed"], 1);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
    assert!(pos("command") < pos("config") && pos("config_hash") < pos("result") && pos("result") < pos("version"));
}

#[test]
fn cofinite_bound_csv() {
    let out = siegel(&["bound", "--setting", "cofinite", "--n", "1", "--kappa-min", "12", "--kappa-max", "96"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&header[..4], ["kappa", "bound", "exponent", "constant_estimate"]);
    assert!(header.iter().any(|h| h == "config_hash"));
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 10);
    let slope: f64 = rows[8][1].parse().unwrap();
    assert_eq!(&rows[8][0], "slope_leading");
    assert!((slope - 1.5).abs() < 0.1, "{slope}");
    assert_eq!(&rows[0][2], "3/2");
    // 17 significant digits in scientific form
    let b = &rows[0][1];
    assert_eq!(b.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count(), 17);
}

#[test]
fn selftest_quick_is_fast() {
    let t = Instant::now();
    let out = siegel(&["selftest", "--quick"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(t.elapsed().as_secs() < 60);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.lines().count() >= 10 && err.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn exit_codes() {
    let bad = siegel(&["act", "--g", r#"{"n":1,"g":[1,1,0,2]}"#, "--z", r#"{"n":1,"X":[0],"Y":[1]}"#]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());

    let domain = siegel(&["oracle", "--what", "delta", "--z", "0,0.01"]);
    assert_eq!(domain.status.code(), Some(2));

    let cfg = scratch("one_step.toml");
    std::fs::write(&cfg, "max_reduction_steps = 1\n").unwrap();
    let stuck = siegel(&["reduce", "--config", cfg.to_str().unwrap(), "--z", r#"{"n":1,"X":[0.31],"Y":[0.001]}"#]);
    assert_eq!(stuck.status.code(), Some(3), "{}", String::from_utf8_lossy(&stuck.stderr));

    assert_eq!(siegel(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn config_file_and_env() {
    let bogus = scratch("bogus.toml");
    std::fs::write(&bogus, "seed = 3\nsamplez = 10\n").unwrap();
    assert_eq!(siegel(&["distance", "--config", bogus.to_str().unwrap()]).status.code(), Some(2));

    let good = scratch("good.toml");
    std::fs::write(&good, "seed = 5\nsamples = 1000\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_siegel"))
        .args(["distance"])
        .env("SIEGEL_HEAT_CONFIG", &good)
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["seed"], 5);
    assert_eq!(v["config"]["samples"], 1000);
}

#[test]
fn reruns_are_bit_identical() {
    let args = ["spherical", "--lambda", "1,0.5", "--r", "0.6,0.2", "--samples", "20000", "--seed", "4"];
    let a = siegel(&args);
    let b = siegel(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut other = args.to_vec();
    other[8] = "5";
    let c = json(&siegel(&other));
    assert_ne!(json(&a)["result"]["value"], c["result"]["value"]);
}

#[test]
fn writes_output_file() {
    let path = scratch("cusp.json");
    let out = siegel(&["cusp-sum", "--kappa", "12", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let s = v["result"]["value"].as_f64().unwrap();
    assert!((s - 1.557379443804697).abs() < 1e-9);
    assert!(v["result"]["ratio"].as_f64().unwrap() < 1.5);
}

#[test]
fn oracle_and_heat_commands() {
    let d = json(&siegel(&["oracle", "--what", "delta"]));
    assert!((d["result"]["re"].as_f64().unwrap() - 0.0017853698).abs() < 1e-9);
    let e = json(&siegel(&["oracle", "--what", "eigen-check"]));
    assert!(e["result"]["max_rel_error"].as_f64().unwrap() < 1e-3);
    let h = json(&siegel(&["heat", "--t", "1", "--r", "0.5", "--method", "oracle", "--samples", "1000"]));
    assert!(h["result"]["value"].as_f64().unwrap() > 0.0);
    let c = json(&siegel(&["cfunction", "--lambda", "1"]));
    let v = c["result"]["c_inverse_sq"].as_f64().unwrap();
    assert!((v - c["result"]["c_inverse_sq_product"].as_f64().unwrap()).abs() < 1e-12 * v);
}
