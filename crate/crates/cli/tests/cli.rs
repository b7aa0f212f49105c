use std::process::{Command, Output};

use tunnel_core::lattice::evaluate;
use tunnel_core::ModelParams;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sfqm-tunnel"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV table, split into fields.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn gamma_of(csv: &str) -> Vec<f64> {
    rows(csv).iter().map(|r| r[2].parse().unwrap()).collect()
}

#[test]
fn compute_zero_width() {
    let out = stdout(&run(&[
        "--alpha", "2", "--V", "5", "--E", "3", "--b", "0", "--L", "0.2", "--N", "1",
    ]));
    assert_eq!(gamma_of(&out), vec![0.0]);
}

#[test]
fn compute_wide_barrier_near_saturation() {
    let out = stdout(&run(&[
        "--alpha", "2", "--V", "5", "--E", "3", "--b", "10", "--L", "0.2", "--N", "1",
    ]));
    assert!((gamma_of(&out)[0] - 1.0 / 6f64.sqrt()).abs() < 1e-6);
}

#[test]
fn compute_more_barriers_shorter_time() {
    let args = [
        "--alpha", "1.995", "--V", "5", "--E", "3", "--b", "30", "--L", "0.2",
    ];
    let one = gamma_of(&stdout(&run(&[&args[..], &["--N", "1"]].concat())))[0];
    let two = gamma_of(&stdout(&run(&[&args[..], &["--N", "2"]].concat())))[0];
    assert!(two < one);
}

#[test]
fn compute_json() {
    let out = stdout(&run(&["--alpha", "1.9", "--b", "2", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["meta"]["f1_convention"], "expansion");
    let direct = evaluate(&ModelParams::new(1.9, 5.0, 3.0, 2.0, 0.2, 1))
        .unwrap()
        .1
        .gamma_n;
    assert!((v["rows"][0]["gamma"].as_f64().unwrap() - direct).abs() < 1e-15 * direct);

    let verbatim = stdout(&run(&[
        "--alpha",
        "1.9",
        "--b",
        "2",
        "--format",
        "json",
        "--paper-verbatim",
    ]));
    let w: serde_json::Value = serde_json::from_str(&verbatim).unwrap();
    assert_eq!(w["meta"]["f1_convention"], "literal");
    assert_ne!(w["meta"]["f1"], v["meta"]["f1"]);
    assert_eq!(w["rows"], v["rows"]);
}

#[test]
fn domain_errors_exit_nonzero() {
    for args in [
        &["--E", "5"][..],
        &["--E", "6"],
        &["--alpha", "2.5"],
        &["--alpha", "1"],
        &["--b", "-1"],
        &["--N", "0"],
        &["--sweep", "b", "--from", "3", "--to", "1"],
        &["--sweep", "E", "--from", "1", "--to", "5"],
        &["--sweep", "b", "--from", "0", "--to", "1", "--steps", "1"],
    ] {
        let out = run(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unknown_figure_lists_names() {
    let out = run(&["--figure", "fig2"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("fig1a") && err.contains("fig1b"), "{err}");
}

#[test]
fn figure_writes_dataset_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["--figure", "fig1b", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("fig1b.csv")).unwrap();
    assert_eq!(rows(&csv).len(), 4 * 401);
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("fig1b_manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["base"]["alpha"], 1.995);
    assert_eq!(manifest["base"]["d_alpha"], 1.0);
    assert_eq!(manifest["rows"], 1604);
    assert!(manifest["notes"]
        .as_array()
        .unwrap()
        .iter()
        .any(|n| n.as_str().unwrap().contains("unresolved")));
}

#[test]
fn sweep_order_and_width_grid() {
    let out = stdout(&run(&[
        "--alpha", "2", "--sweep", "b", "--from", "0", "--to", "20", "--steps", "400", "--n-list",
        "1,2,3,4",
    ]));
    let r = rows(&out);
    assert_eq!(r.len(), 1604);
    assert_eq!(r[0][0].parse::<f64>().unwrap(), 0.0);
    assert_eq!(r[400][0].parse::<f64>().unwrap(), 20.0);
    assert_eq!(r[401][1], "2");
    assert_eq!(r[1][0].parse::<f64>().unwrap(), 0.05);
    // saturated and N-independent at the wide end
    for block in 0..4 {
        let g: f64 = r[block * 401 + 400][2].parse().unwrap();
        assert!((g - 1.0 / 6f64.sqrt()).abs() < 1e-6);
    }
}

#[test]
fn sweep_over_barrier_count_decreases() {
    let out = stdout(&run(&[
        "--alpha",
        "1.995",
        "--b",
        "30",
        "--sweep",
        "N",
        "--n-list",
        "1,2,3,4,5",
    ]));
    let g = gamma_of(&out);
    assert_eq!(g.len(), 5);
    assert!(g.windows(2).all(|w| w[1] < w[0]), "{g:?}");
    let by_range = stdout(&run(&[
        "--alpha", "1.995", "--b", "30", "--sweep", "N", "--from", "1", "--to", "5",
    ]));
    assert_eq!(out, by_range);
}

#[test]
fn byte_identical_across_runs_and_threads() {
    let args = [
        "--alpha", "1.9", "--sweep", "E", "--from", "0.5", "--to", "4.5", "--steps", "300", "--N",
        "3",
    ];
    let a = bin()
        .args(args)
        .env("SFQM_TUNNEL_THREADS", "1")
        .output()
        .unwrap();
    let b = bin()
        .args(args)
        .env("SFQM_TUNNEL_THREADS", "4")
        .output()
        .unwrap();
    let c = bin().args(args).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(!text.contains('\r'));
    for field in &rows(&text)[7][2..8] {
        let (mantissa, _) = field.split_once('e').unwrap();
        assert_eq!(
            mantissa.trim_start_matches('-').replace('.', "").len(),
            17,
            "{field}"
        );
    }
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = bin()
        .args(["--b", "1"])
        .env("SFQM_TUNNEL_THREADS", "zero")
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn flag_beats_config_beats_default() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "alpha = 1.9\nb = 2.0\nN = 3\nformat = \"json\"\n").unwrap();
    let out = stdout(
        &bin()
            .arg("--config")
            .arg(&cfg)
            .args(["--b", "3"])
            .output()
            .unwrap(),
    );
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let params = &v["meta"]["params"];
    assert_eq!(params["alpha"], 1.9);
    assert_eq!(params["b"], 3.0);
    assert_eq!(params["n_barriers"], 3);
    assert_eq!(params["energy"], 3.0);
    let direct = evaluate(&ModelParams::new(1.9, 5.0, 3.0, 3.0, 0.2, 3))
        .unwrap()
        .1
        .gamma_n;
    assert!((v["rows"][0]["gamma"].as_f64().unwrap() - direct).abs() < 1e-15 * direct);
}

#[test]
fn config_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "alfa = 1.9\n").unwrap();
    assert!(!bin()
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap()
        .status
        .success());
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("row.csv");
    let out = bin()
        .args(["--b", "1", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(rows(&std::fs::read_to_string(path).unwrap()).len(), 1);
}

#[test]
fn validate_default_grid() {
    let text = stdout(&run(&["--validate"]));
    assert!(
        text.contains("0 hard failures"),
        "{}",
        text.lines().last().unwrap()
    );
    let json = stdout(&run(&["--validate", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(!v["records"].as_array().unwrap().is_empty());
    assert!(!run(&["--validate", "--grid", "huge"]).status.success());
}

#[test]
fn validate_fine_grid() {
    let text = stdout(&run(&["--validate", "--grid", "fine"]));
    assert!(text.contains("0 hard failures"));
}

#[test]
fn fractional_free_passage_changes_time_only() {
    let std = rows(&stdout(&run(&["--alpha", "1.8", "--b", "2", "--N", "2"])));
    let frac = rows(&stdout(&run(&[
        "--alpha",
        "1.8",
        "--b",
        "2",
        "--N",
        "2",
        "--free-passage",
        "fractional",
    ])));
    assert_ne!(std[0][2], frac[0][2]);
    assert_eq!(std[0][4..], frac[0][4..]);
}

#[test]
fn figure_matches_goldens() {
    let golden = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let dir = tempfile::tempdir().unwrap();
    for name in ["fig1a", "fig1b"] {
        let out = bin()
            .args(["--figure", name, "--out"])
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
        for file in [format!("{name}.csv"), format!("{name}_manifest.json")] {
            let fresh = std::fs::read(dir.path().join(&file)).unwrap();
            assert!(
                fresh == std::fs::read(golden.join(&file)).unwrap(),
                "{file} differs from golden"
            );
        }
    }
}
