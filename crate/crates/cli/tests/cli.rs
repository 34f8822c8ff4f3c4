use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_taunav"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Writes `body` to `dir/name` and returns the path as a string.
fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn episode(world: &str, extra: &str) -> String {
    format!(
        r#"{{
  "world": {world:?},
  "initial_state": {{ "x": 1.0, "y": 0.0, "theta": 1.5707963267948966, "v": 1.5 }}
  {extra}
}}"#,
        world = fixture(world).to_str().unwrap()
    )
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn simulate_straight_corridor_writes_log_and_sidecar() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", &episode("straight_corridor", ""));
    let out = tmp.path().join("out");
    let o = run(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = read(&out, "episode.csv");
    assert_eq!(
        csv.lines().next().unwrap(),
        "t,x,y,theta,v,u,phase,mode,tau_fl,tau_l,tau_c,tau_r,tau_fr,offset"
    );
    let side: serde_json::Value = serde_json::from_str(&read(&out, "episode.json")).unwrap();
    assert_eq!(side["metrics"]["collision"], false);
    assert!(side["events"].is_array());
}

#[test]
fn negative_gain_is_a_config_error_naming_the_field() {
    let tmp = TempDir::new().unwrap();
    let body = episode("straight_corridor", r#", "gains": { "k_f": -1.0 }"#);
    let cfg = write(tmp.path(), "c.json", &body);
    let o = run(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("k_f"), "{}", stderr(&o));
}

#[test]
fn uncontrolled_l_corridor_exits_with_collision_status() {
    let tmp = TempDir::new().unwrap();
    let body = episode("l_corridor", r#", "control": "disabled""#);
    let cfg = write(tmp.path(), "c.json", &body);
    let o = run(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let side: serde_json::Value = serde_json::from_str(&read(tmp.path(), "episode.json")).unwrap();
    assert_eq!(side["metrics"]["collision"], true);
}

#[test]
fn simulate_is_reproducible_and_seed_override_applies() {
    let tmp = TempDir::new().unwrap();
    let body = episode("straight_corridor", r#", "duration": 3.0"#);
    let cfg = write(tmp.path(), "c.json", &body);
    let dirs: Vec<String> = ["a", "b", "c"]
        .iter()
        .map(|d| tmp.path().join(d).to_str().unwrap().to_owned())
        .collect();
    for (d, seed) in dirs.iter().zip(["7", "7", "8"]) {
        let o = run(&["simulate", "--config", &cfg, "--out", d, "--seed", seed]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let csv = |d: &str| std::fs::read(Path::new(d).join("episode.csv")).unwrap();
    assert_eq!(csv(&dirs[0]), csv(&dirs[1]));
    assert_ne!(csv(&dirs[0]), csv(&dirs[2]));
}

#[test]
fn world_flag_overrides_the_config() {
    let tmp = TempDir::new().unwrap();
    let body = episode("straight_corridor", r#", "control": "disabled""#);
    let cfg = write(tmp.path(), "c.json", &body);
    let l = fixture("l_corridor");
    let o = run(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        tmp.path().to_str().unwrap(),
        "--world",
        l.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn usage_and_input_errors_exit_one() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert_eq!(code(&run(&["simulate", "--out", out])), 1);
    assert_eq!(code(&run(&["no-such-command"])), 1);
    let bad = write(tmp.path(), "bad.json", "{ not json");
    assert_eq!(code(&run(&["simulate", "--config", &bad, "--out", out])), 1);
    let missing = tmp.path().join("missing.json");
    let o = run(&[
        "simulate",
        "--config",
        missing.to_str().unwrap(),
        "--out",
        out,
    ]);
    assert_eq!(code(&o), 1);
    let unknown = write(
        tmp.path(),
        "u.json",
        &episode("straight_corridor", r#", "gainz": {}"#),
    );
    let o = run(&["simulate", "--config", &unknown, "--out", out]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("gainz"));
    assert_eq!(code(&run(&["--help"])), 0);
}

fn stability_rows(body: &str) -> (i32, Vec<Vec<String>>, String) {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "g.json", body);
    let o = run(&[
        "stability",
        "--config",
        &cfg,
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    let rows = std::fs::read_to_string(tmp.path().join("stability.csv"))
        .map(|t| {
            t.lines()
                .map(|l| l.split(',').map(str::to_owned).collect())
                .collect()
        })
        .unwrap_or_default();
    (code(&o), rows, stderr(&o))
}

#[test]
fn stability_single_wall_rows() {
    let (c, rows, err) =
        stability_rows(r#"{ "single_wall": { "k": [1.0, 0.5], "f": [1.0], "c": [3.0, 2.0] } }"#);
    assert_eq!(c, 0, "{err}");
    let header = &rows[0];
    assert_eq!(header.len(), 17);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let find = |k: &str, cc: &str| {
        rows.iter()
            .find(|r| r[col("k")] == k && r[col("c")] == cc)
            .unwrap()
            .clone()
    };
    let num = |r: &Vec<String>, name: &str| r[col(name)].parse::<f64>().unwrap();

    let r = find("1", "3");
    assert!((num(&r, "re1") + 2.618034).abs() < 1e-6);
    assert!((num(&r, "re2") + 0.381966).abs() < 1e-6);
    assert_eq!(num(&r, "im1"), 0.0);
    assert_eq!(num(&r, "im2"), 0.0);
    assert_eq!(r[col("real_eigs")], "true");

    let r = find("0.5", "2");
    assert!(num(&r, "im1") != 0.0 && num(&r, "im2") != 0.0);
    assert_eq!(r[col("real_eigs")], "false");
    assert_eq!(r[col("paper_condition")], "false");
    assert!(rows[1..].iter().all(|r| r[col("oracle_agrees")] == "true"));
    assert!(rows[1..].iter().all(|r| r[col("hurwitz")] == "true"));
}

#[test]
fn stability_flags_printed_tau_balance_formula() {
    let (c, rows, err) = stability_rows(
        r#"{ "tau_balance": { "k_f": [1.0], "k_m": [0.05], "f_f": [0.64], "f_m": [0.213], "r": [2.0] } }"#,
    );
    assert_eq!(c, 0, "{err}");
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][0], "tau_balance");
    assert_eq!(rows[1][16], "false");
    assert_eq!(rows[1][13], "true");
}

#[test]
fn malformed_stability_grids_exit_one() {
    for body in [
        "{}",
        r#"{ "single_wall": { "k": [], "f": [1.0], "c": [1.0] } }"#,
        r#"{ "single_wall": { "k": [1.0], "f": [-1.0], "c": [1.0] } }"#,
        r#"{ "single_wall": { "k": [1.0], "f": [1.0] } }"#,
        r#"{ "single_wall": { "k": "many", "f": [1.0], "c": [1.0] } }"#,
        "[1, 2]",
    ] {
        let (c, _, _) = stability_rows(body);
        assert_eq!(c, 1, "{body}");
    }
}

#[test]
fn tau_trace_default_run_writes_six_series() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().to_str().unwrap();
    let o = run(&["tau-trace", "--out", out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for m in ["straight", "turn_away", "turn_toward"] {
        let csv = read(tmp.path(), &format!("tau_trace_{m}.csv"));
        assert_eq!(
            csv.lines().next().unwrap(),
            "t,tau_geom,tau_per,phase,variant"
        );
        assert!(csv.contains(",continuous\n") && csv.contains(",sense_act\n"));
    }
    let s: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "tau_trace_summary.json")).unwrap();
    let series = s["series"].as_array().unwrap();
    assert_eq!(series.len(), 6);
    let rms = |m: &str, v: &str| {
        series
            .iter()
            .find(|r| r["maneuver"] == m && r["variant"] == v)
            .unwrap()["rms"]
            .as_f64()
            .unwrap()
    };
    for m in ["turn_away", "turn_toward"] {
        assert!(rms(m, "sense_act") < rms(m, "continuous"), "{m}");
    }
}

#[test]
fn tau_trace_with_missing_fixture_exits_one() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope.json");
    let o = run(&[
        "tau-trace",
        "--world",
        missing.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let cfg = write(
        tmp.path(),
        "t.json",
        r#"{ "world": "nope.json", "duration": 1.0 }"#,
    );
    let o = run(&[
        "tau-trace",
        "--config",
        &cfg,
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
}

fn sweep(dir: &Path, manifest: &str) -> (i32, Vec<String>) {
    let cfg = write(dir, "s.json", manifest);
    let out = dir.join("out");
    let o = run(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    let rows = std::fs::read_to_string(out.join("sweep.csv"))
        .map(|t| t.lines().map(str::to_owned).collect())
        .unwrap_or_default();
    (code(&o), rows)
}

#[test]
fn sweep_rows_per_grid_point_and_seed() {
    let tmp = TempDir::new().unwrap();
    let base = episode("straight_corridor", r#", "duration": 1.0"#);
    let manifest = format!(
        r#"{{ "base": {base}, "grid": {{ "k_f": [0.5, 1.0], "k_m": [0.05, 0.1] }},
             "seeds_per_point": 3, "seed": 10 }}"#
    );
    let (c, rows) = sweep(tmp.path(), &manifest);
    assert_eq!(c, 0);
    assert_eq!(rows.len(), 13);
    let seeds: Vec<&str> = rows[1..]
        .iter()
        .map(|r| r.split(',').nth(2).unwrap())
        .collect();
    let want: Vec<String> = (10..22).map(|s| s.to_string()).collect();
    assert_eq!(seeds, want);
    let (_, again) = sweep(tmp.path(), &manifest);
    assert_eq!(rows, again);
}

#[test]
fn sweep_errors() {
    let tmp = TempDir::new().unwrap();
    let base = episode("straight_corridor", r#", "duration": 1.0"#);
    for grid in [r#"{}"#, r#"{ "k_f": [] }"#, r#"{ "gain": [1.0] }"#] {
        let manifest = format!(r#"{{ "base": {base}, "grid": {grid} }}"#);
        assert_eq!(sweep(tmp.path(), &manifest).0, 1, "{grid}");
    }
    // One bad grid value fails its row only.
    let manifest = format!(r#"{{ "base": {base}, "grid": {{ "k_f": [-1.0, 1.0] }} }}"#);
    let (c, rows) = sweep(tmp.path(), &manifest);
    assert_eq!(c, 0);
    assert_eq!(rows.len(), 3);
    assert!(rows[1].contains("k_f"));
    assert!(rows[2].ends_with(','));
}

#[test]
fn sweep_oscillation_grows_below_the_critical_gain() {
    let tmp = TempDir::new().unwrap();
    let base = format!(
        r#"{{ "world": {:?},
             "initial_state": {{ "x": -0.8, "y": 0.0, "theta": 1.5707963267948966, "v": 0.75 }},
             "control": {{ "fixed": "single_wall_left" }},
             "maneuver": {{ "v_cruise": 0.75 }} }}"#,
        fixture("single_wall").to_str().unwrap()
    );
    let manifest = format!(
        r#"{{ "base": {base}, "grid": {{ "k": [0.1, 0.7], "c": [4.0] }}, "seeds_per_point": 2 }}"#
    );
    let (c, rows) = sweep(tmp.path(), &manifest);
    assert_eq!(c, 0);
    let header: Vec<&str> = rows[0].split(',').collect();
    let col = |n: &str| header.iter().position(|h| *h == n).unwrap();
    let overshoots = |k: &str| -> usize {
        rows[1..]
            .iter()
            .map(|r| r.split(',').collect::<Vec<_>>())
            .filter(|r| r[col("k")] == k)
            .map(|r| r[col("overshoots")].parse::<usize>().unwrap())
            .sum()
    };
    assert!(overshoots("0.1") > overshoots("0.7"));
}
