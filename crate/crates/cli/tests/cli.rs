use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use noisy_vqe::hamiltonian::{exact_spectrum, h2_hamiltonian};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_noisy-vqe"));
    c.env_remove("NOISY_VQE_WORKERS");
    c
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .args(["run", "--config"])
        .arg(config)
        .arg("--output-dir")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const SWEEP: &str = r#"
experiment = "SWEEP"

[ansatz]
kind = "RY"

[optimizer]
max_iterations = 6
method = { kind = "NFT" }

[sweep]
noise_axis = "READOUT"
intensities = [0.0, 0.05, 0.1, 0.2]
repetitions = 3
shots = 128
seed_base = 11
"#;

#[test]
fn sweep_writes_artifacts_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    fs::write(&cfg, SWEEP).unwrap();
    let out = dir.path().join("run");
    let o = run(&cfg, &out, &["--workers", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["sweep.csv", "summary.json", "metadata.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(csv.starts_with("intensity,repetition,final_energy,params_0,"));
    assert_eq!(csv.lines().count(), 1 + 4 * 3);

    let meta = json(&out.join("metadata.json"));
    assert_eq!(meta["seeds"]["seed_base"], 11);
    assert_eq!(meta["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(meta["versions"]["noisy_vqe"], noisy_vqe::VERSION);
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["stats"].as_array().unwrap().len(), 4);
    let trace_dir = out.join(summary["trace_dir"].as_str().unwrap());
    assert_eq!(fs::read_dir(trace_dir).unwrap().count(), 12);

    let report = |kinds: &str| {
        bin()
            .args(["report", "--run-dir"])
            .arg(&out)
            .args(["--kinds", kinds])
            .output()
            .unwrap()
    };
    let r = report("heatmap,noise_curve,histogram");
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let first: Vec<Vec<u8>> = ["heatmap", "noise_curve", "histogram"]
        .iter()
        .map(|k| fs::read(out.join(format!("{k}.svg"))).unwrap())
        .collect();
    assert!(String::from_utf8_lossy(&first[1]).contains("<polyline"));
    assert!(report("heatmap,noise_curve,histogram").status.success());
    for (k, before) in ["heatmap", "noise_curve", "histogram"].iter().zip(&first) {
        assert_eq!(&fs::read(out.join(format!("{k}.svg"))).unwrap(), before, "{k} not byte-identical");
    }

    let r = report("trace");
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("trace.csv"));
}

#[test]
fn workers_do_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    fs::write(&cfg, SWEEP.replace("intensities = [0.0, 0.05, 0.1, 0.2]", "intensities = [0.0, 0.1]")).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&cfg, &a, &["--workers", "1"]).status.success());
    let o = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--output-dir")
        .arg(&b)
        .env("NOISY_VQE_WORKERS", "3")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(fs::read(a.join("sweep.csv")).unwrap(), fs::read(b.join("sweep.csv")).unwrap());
    assert_eq!(json(&b.join("metadata.json"))["workers"], 3);
}

#[test]
fn unknown_key_exits_2_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, SWEEP.replace("shots = 128", "shotz = 128")).unwrap();
    let o = run(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("shotz"), "{err}");
    assert!(err.contains("bad.toml:15:"), "{err}");
}

#[test]
fn missing_config_and_missing_section_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&dir.path().join("nope.toml"), &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = dir.path().join("vqe.json");
    fs::write(&cfg, r#"{"experiment": "VQE", "ansatz": {"kind": "RY"}}"#).unwrap();
    let o = run(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[optimizer]"));
}

#[test]
fn exact_spectrum_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exact.toml");
    fs::write(&cfg, "experiment = \"EXACT_SPECTRUM\"\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&cfg, &out, &[]);
    assert!(o.status.success());
    let s = json(&out.join("summary.json"));
    let ground = exact_spectrum(&h2_hamiltonian()).unwrap()[0];
    assert!((s["ground_energy"].as_f64().unwrap() - ground).abs() < 1e-12);
    assert_eq!(s["spectrum"].as_array().unwrap().len(), 16);
    assert!(out.join("metadata.json").is_file());
}

#[test]
fn recalc_run_and_two_panel_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("recalc.toml");
    fs::write(
        &cfg,
        r#"
experiment = "RECALC"
[ansatz]
kind = "UCCSD"
[optimizer]
max_iterations = 8
method = { kind = "NFT" }
[backend]
mode = "NOISY"
shots = 256
noise = { p_readout = 0.02 }
[vqe]
seed = 5
"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = run(&cfg, &out, &["--dump-circuit", "--verbose"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("IIZZ"));
    assert!(out.join("circuit.json").is_file());
    let recalc = fs::read_to_string(out.join("recalc.csv")).unwrap();
    assert!(recalc.starts_with("iteration,recorded_energy,exact_energy"));
    let s = json(&out.join("summary.json"));
    assert!(s["recalculated_final_energy"].as_f64().is_some());
    let meta = json(&out.join("metadata.json"));
    assert_eq!(meta["runs"][0]["ansatz"], "UCCSD");

    let r = bin().args(["report", "--run-dir"]).arg(&out).args(["--kinds", "trace"]).output().unwrap();
    assert!(r.status.success());
    let svg = fs::read_to_string(out.join("trace.svg")).unwrap();
    assert!(svg.contains("recalculated exact energy"));
    assert_eq!(svg.matches("<polyline").count(), 4);
}

#[test]
fn seed_override_changes_hash_and_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("vqe.toml");
    fs::write(
        &cfg,
        r#"
experiment = "VQE"
[ansatz]
kind = "RY"
[optimizer]
max_iterations = 3
method = { kind = "SPSA" }
[backend]
mode = "SHOTS"
shots = 64
"#,
    )
    .unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&cfg, &a, &[]).status.success());
    assert!(run(&cfg, &b, &["--seed", "99"]).status.success());
    let (ma, mb) = (json(&a.join("metadata.json")), json(&b.join("metadata.json")));
    assert_ne!(ma["config_hash"], mb["config_hash"]);
    assert_eq!(mb["seeds"]["seed"], 99);
    assert_ne!(fs::read(a.join("trace.csv")).unwrap(), fs::read(b.join("trace.csv")).unwrap());
}

#[test]
fn fit_and_splitting_read_a_sweep_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("sweep.csv");
    let mut body = String::from("intensity,repetition,final_energy,params_0,seed,intensity_index,best_energy\n");
    for i in 0..5 {
        for r in 0..12 {
            let p = 0.02 * i as f64;
            let e = -1.13 + 2.0 * p + if r % 2 == 0 { 0.0 } else { 0.1 } + 1e-4 * r as f64;
            body.push_str(&format!("{p},{r},{e},{},{r},{i},{e}\n", 0.3 + std::f64::consts::TAU * (r % 2) as f64));
        }
    }
    fs::write(&table, body).unwrap();
    let fit_cfg = dir.path().join("fit.toml");
    fs::write(&fit_cfg, format!("experiment = \"FIT\"\n[fit]\ninput = {:?}\nmodels = [\"LINEAR\"]\n", table)).unwrap();
    let out = dir.path().join("fit");
    assert!(run(&fit_cfg, &out, &[]).status.success());
    let s = json(&out.join("summary.json"));
    let slope = s["fits"][0]["result"]["coefficients"][0].as_f64().unwrap();
    assert!((slope - 2.0).abs() < 1e-9, "{slope}");

    let split_cfg = dir.path().join("split.json");
    fs::write(
        &split_cfg,
        serde_json::json!({"experiment": "SPLITTING", "splitting": {"input": table, "intensity": 0.04}}).to_string(),
    )
    .unwrap();
    let out = dir.path().join("split");
    let o = run(&split_cfg, &out, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&out.join("summary.json"));
    assert_eq!(s["splitting"]["levels"], 2);
    assert_eq!(s["splitting"]["param_period_check"], true);
}

#[test]
fn bakeoff_runs_every_optimizer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bake.toml");
    fs::write(
        &cfg,
        r#"
experiment = "OPTIMIZER_BAKEOFF"
[ansatz]
kind = "RY"
[backend]
mode = "EXACT"
[bakeoff]
repetitions = 2
seed = 3
[[bakeoff.optimizers]]
max_iterations = 5
method = { kind = "NFT" }
[[bakeoff.optimizers]]
max_iterations = 5
method = { kind = "NELDER_MEAD" }
"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = run(&cfg, &out, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(out.join("bakeoff.csv")).unwrap().lines().count(), 5);
    let s = json(&out.join("summary.json"));
    assert_eq!(s["optimizers"][1]["optimizer"], "NELDER_MEAD");
    assert_eq!(fs::read_dir(out.join("traces")).unwrap().count(), 4);
}
