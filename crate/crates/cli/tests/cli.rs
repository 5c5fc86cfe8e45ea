use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_photon-tow"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

const CASE1: &str = r#"{
  "reward_probs": [0.8, 0.2, 0.1, 0.1],
  "cycles": 30,
  "replications": 200,
  "master_seed": 7
}"#;

const CASE3: &str = r#"{
  "reward_probs": [0.7, 0.5, 0.9, 0.1],
  "cycles": 40,
  "replications": 100
}"#;

#[test]
fn run_writes_curves_and_manifest() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), CASE1);
    let out = tmp.path().join("out");
    let o = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let curves = fs::read_to_string(out.join("curves.csv")).unwrap();
    let lines: Vec<&str> = curves.lines().collect();
    assert_eq!(
        lines[0],
        "cycle,fine_cdr,coarse_cdr_L1,mean_pa_1,mean_pa_2,mean_pa_3"
    );
    assert_eq!(lines.len(), 31);
    assert!(lines[1].starts_with("1,"));
    assert!(!out.join("traces.csv").exists());

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 7);
    assert_eq!(manifest["trial_seeds"].as_array().unwrap().len(), 200);
    assert_eq!(manifest["configs"][0]["cycles"], 30);
}

#[test]
fn run_is_byte_identical_for_same_seed() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), CASE1);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for out in [&a, &b] {
        let o = run(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "42",
            "--traces",
        ]);
        assert!(o.status.success());
    }
    for file in ["curves.csv", "traces.csv"] {
        assert_eq!(
            fs::read(a.join(file)).unwrap(),
            fs::read(b.join(file)).unwrap(),
            "{file}"
        );
    }
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["master_seed"], 42);
    assert_eq!(m["configs"][0]["master_seed"], 42);
}

#[test]
fn traces_have_one_row_per_trial_cycle_with_exact_values() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"reward_probs":[0.8,0.2,0.1,0.1],"cycles":12,"replications":3}"#,
    );
    let out = tmp.path().join("out");
    let o = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--traces",
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(out.join("traces.csv")).unwrap();
    let mut rows = text.lines();
    assert_eq!(
        rows.next().unwrap(),
        "trial,cycle,arm,rewarded,pa_1,pa_2,pa_3,rounded_pa_1,rounded_pa_2,rounded_pa_3,\
         p_arm_1,p_arm_2,p_arm_3,p_arm_4"
    );
    let rows: Vec<Vec<&str>> = rows.map(|r| r.split(',').collect()).collect();
    assert_eq!(rows.len(), 36);
    assert_eq!(rows[0][..4], ["0", "1", rows[0][2], rows[0][3]]);
    assert_eq!(rows[0][4..7], ["0", "0", "0"]);

    let expected = photon_trace(0);
    for (row, (pa, arm)) in rows.iter().zip(expected) {
        let parsed: Vec<f64> = row[4..7].iter().map(|v| v.parse().unwrap()).collect();
        assert_eq!(parsed, pa);
        assert_eq!(row[2].parse::<usize>().unwrap(), arm + 1);
    }
}

fn photon_trace(trial: usize) -> Vec<(Vec<f64>, usize)> {
    let cfg = photon_tow::ExperimentConfig::new(vec![0.8, 0.2, 0.1, 0.1], 12, 3);
    photon_tow::run_trial(&cfg, trial)
        .unwrap()
        .records
        .into_iter()
        .map(|r| (r.pa_values, r.arm))
        .collect()
}

#[test]
fn even_resolution_is_rejected_with_status_2() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"reward_probs":[0.8,0.2,0.1,0.1],"cycles":30,"resolution":8}"#,
    );
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--out", "unused"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resolution must be odd"));
    assert!(!Path::new("unused").exists());
}

#[test]
fn unknown_keys_and_bad_arity_are_rejected() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    for body in [
        r#"{"reward_probs":[0.5,0.5,0.5,0.5],"cycles":3,"speed":1}"#,
        r#"{"reward_probs":[0.5,0.5,0.5],"cycles":3}"#,
        r#"{"reward_probs":[0.5,0.5,0.5,0.5],"cycles":30,"strategy":{"kind":"tournament","round1_cycles":30}}"#,
        "not json",
    ] {
        let cfg = write_config(tmp.path(), body);
        let o = run(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(2), "{body}");
    }
}

#[test]
fn missing_config_is_an_io_failure() {
    let tmp = TempDir::new().unwrap();
    let o = run(&[
        "run",
        "--config",
        tmp.path().join("nope.json").to_str().unwrap(),
        "--out",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unwritable_output_is_an_io_failure() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), CASE1);
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_writes_snapshot_rows() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), CASE3);
    let out = tmp.path().join("sweep");
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--resolutions",
        "5,7,9,11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let snap = fs::read_to_string(out.join("snapshot.csv")).unwrap();
    let lines: Vec<&str> = snap.lines().collect();
    assert_eq!(lines[0], "resolution,fine_cdr,coarse_cdr_L1");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("5,"));
    for r in [5, 7, 9, 11] {
        let curves = fs::read_to_string(out.join(format!("curves_res{r}.csv"))).unwrap();
        assert_eq!(curves.lines().count(), 41);
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["snapshot_cycle"], 30);
    assert_eq!(manifest["configs"].as_array().unwrap().len(), 4);
}

#[test]
fn sweep_rejects_even_or_small_resolutions() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), CASE3);
    for list in ["6", "5,1", "5,x"] {
        let o = run(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--resolutions",
            list,
            "--out",
            tmp.path().join("o").to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(2), "{list}");
    }
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--resolutions",
        "5",
        "--snapshot-cycle",
        "41",
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_high_resolution_approaches_unity() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"reward_probs":[0.7,0.5,0.9,0.1],"cycles":500,"replications":1000}"#,
    );
    let out = tmp.path().join("o");
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--resolutions",
        "101",
        "--snapshot-cycle",
        "500",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let snap = fs::read_to_string(out.join("snapshot.csv")).unwrap();
    let row: Vec<&str> = snap.lines().nth(1).unwrap().split(',').collect();
    let fine: f64 = row[1].parse().unwrap();
    assert!(fine >= 0.9, "{fine}");
}

#[test]
fn reproduce_fig4_writes_curves_and_summary() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("fig4");
    let o = run(&["reproduce", "fig4", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "fig4_standard.csv",
        "fig4_tournament.csv",
        "fig4_summary.csv",
        "manifest.json",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let summary = fs::read_to_string(out.join("fig4_summary.csv")).unwrap();
    assert_eq!(
        summary.lines().next().unwrap(),
        "figure,check,status,detail"
    );
    assert!(
        summary.lines().skip(1).all(|l| l.contains(",pass,")),
        "{summary}"
    );

    // coarse rate falls and fine rate rises once the root starts adapting
    let t = fs::read_to_string(out.join("fig4_tournament.csv")).unwrap();
    let rows: Vec<Vec<f64>> = t
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    let mean = |range: std::ops::Range<usize>, col: usize| {
        rows[range.clone()].iter().map(|r| r[col]).sum::<f64>() / range.len() as f64
    };
    assert!(mean(15..30, 1) > mean(0..15, 1));
    assert!(mean(15..30, 2) < mean(0..15, 2));
}

#[test]
fn reproduce_fig3_paper_fidelity() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("fig3");
    let o = run(&[
        "reproduce",
        "fig3",
        "--out",
        out.to_str().unwrap(),
        "--paper-fidelity",
    ]);
    assert!(o.status.success());
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["configs"][0]["replications"], 10);
    assert_eq!(m["configs"].as_array().unwrap().len(), 2);
    let case1 = fs::read_to_string(out.join("fig3_case1.csv")).unwrap();
    assert_eq!(case1.lines().count(), 31);
}

#[test]
fn reproduce_rejects_unknown_figure() {
    let o = run(&["reproduce", "fig9", "--out", "x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn manifest_reproduces_run() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), CASE3);
    let a = tmp.path().join("a");
    assert!(run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        a.to_str().unwrap(),
        "--seed",
        "9"
    ])
    .status
    .success());
    // rebuild a config from the manifest echo and rerun
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    let echoed = write_config(tmp.path(), &m["configs"][0].to_string());
    let b = tmp.path().join("b");
    assert!(run(&[
        "run",
        "--config",
        echoed.to_str().unwrap(),
        "--out",
        b.to_str().unwrap()
    ])
    .status
    .success());
    assert_eq!(
        fs::read(a.join("curves.csv")).unwrap(),
        fs::read(b.join("curves.csv")).unwrap()
    );
}
