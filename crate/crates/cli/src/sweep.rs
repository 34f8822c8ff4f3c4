//! `sweep`: episodes over a gain grid, several seeds per grid point, run in
//! parallel.
//!
//! ```json
//! {
//!   "base": "straight_corridor.json",
//!   "grid": { "k_f": [0.5, 1.0], "k_m": [0.05, 0.1] },
//!   "seeds_per_point": 3,
//!   "seed": 0
//! }
//! ```
//!
//! `base` is an episode config, either a path relative to the manifest or
//! an inline object. Episodes are numbered grid point first, then
//! replicate, and episode `i` runs with seed `seed + i`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Deserialize;
use taunav::simulator::{metrics, run_episode_in, EpisodeConfig, Metrics};
use taunav::world::load_world;

use crate::{read_json, relative_to, require_config, write, Common, Outcome, UsageError};

/// Parameters a grid may vary.
const GRID_KEYS: [&str; 7] = ["k_f", "k_m", "k", "c", "k_kong", "u_max", "v_cruise"];

#[derive(Deserialize)]
#[serde(untagged)]
enum Base {
    Path(PathBuf),
    Inline(serde_json::Value),
}

fn one() -> usize {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    base: Base,
    grid: BTreeMap<String, Vec<f64>>,
    #[serde(default = "one")]
    seeds_per_point: usize,
    #[serde(default)]
    seed: u64,
}

fn set_param(cfg: &mut EpisodeConfig, key: &str, value: f64) {
    let g = &mut cfg.gains;
    match key {
        "k_f" => g.k_f = value,
        "k_m" => g.k_m = value,
        "k" => g.k = value,
        "c" => g.c = value,
        "k_kong" => g.k_kong = value,
        "u_max" => g.u_max = value,
        "v_cruise" => cfg.maneuver.v_cruise = value,
        _ => unreachable!("grid keys are checked on load"),
    }
}

/// Grid points in row-major order over the (sorted) keys.
fn grid_points(grid: &BTreeMap<String, Vec<f64>>) -> Vec<Vec<f64>> {
    grid.values().fold(vec![Vec::new()], |acc, axis| {
        acc.into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect()
    })
}

struct RowResult {
    point: usize,
    replicate: usize,
    seed: u64,
    values: Vec<f64>,
    outcome: Result<Metrics, String>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn to_csv(keys: &[&String], rows: &[RowResult]) -> String {
    let mut out = String::from("point,replicate,seed");
    for k in keys {
        let _ = write!(out, ",{k}");
    }
    out.push_str(
        ",duration,collision,goal_reached,rms_offset,max_abs_offset,convergence_time,\
         rest_offset,overshoots,mode_switches,mean_abs_u,error\n",
    );
    for r in rows {
        let _ = write!(out, "{},{},{}", r.point, r.replicate, r.seed);
        for v in &r.values {
            let _ = write!(out, ",{v}");
        }
        match &r.outcome {
            Ok(m) => {
                let _ = writeln!(
                    out,
                    ",{},{},{},{},{},{},{},{},{},{},",
                    m.duration,
                    m.collision,
                    m.goal_reached,
                    opt(m.rms_offset),
                    opt(m.max_abs_offset),
                    opt(m.convergence_time),
                    opt(m.rest_offset),
                    m.overshoots,
                    m.mode_switches,
                    m.mean_abs_u
                );
            }
            Err(e) => {
                let _ = writeln!(out, ",,,,,,,,,,,\"{}\"", e.replace('"', "'"));
            }
        }
    }
    out
}

pub fn run(a: &Common) -> Result<Outcome, UsageError> {
    let path = require_config(a)?;
    let manifest: Manifest = serde_json::from_value(read_json(path)?)
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    if manifest.grid.is_empty() {
        return Err(UsageError("grid is empty".into()));
    }
    for (k, v) in &manifest.grid {
        if !GRID_KEYS.contains(&k.as_str()) {
            return Err(UsageError(format!(
                "grid.{k}: unknown parameter (expected one of {})",
                GRID_KEYS.join(", ")
            )));
        }
        if v.is_empty() {
            return Err(UsageError(format!("grid.{k}: empty list")));
        }
    }
    if manifest.seeds_per_point == 0 {
        return Err(UsageError("seeds_per_point must be >= 1".into()));
    }
    let mut base = match manifest.base {
        Base::Path(p) => EpisodeConfig::load(relative_to(path, &p))?,
        Base::Inline(v) => {
            let mut cfg = EpisodeConfig::from_json(&v.to_string())
                .map_err(|e| UsageError(format!("base: {e}")))?;
            cfg.world = relative_to(path, &cfg.world);
            cfg
        }
    };
    if let Some(w) = &a.world {
        base.world = w.clone();
    }
    let seed0 = a.seed.unwrap_or(manifest.seed);
    let world = load_world(&base.world)?;

    let keys: Vec<&String> = manifest.grid.keys().collect();
    let points = grid_points(&manifest.grid);
    let reps = manifest.seeds_per_point;
    let rows: Vec<RowResult> = (0..points.len() * reps)
        .into_par_iter()
        .map(|i| {
            let (point, replicate) = (i / reps, i % reps);
            let seed = seed0.wrapping_add(i as u64);
            let mut cfg = base.clone();
            cfg.seed = seed;
            for (k, &v) in keys.iter().zip(&points[point]) {
                set_param(&mut cfg, k, v);
            }
            let outcome = run_episode_in(&cfg, &world)
                .map(|log| metrics(&log))
                .map_err(|e| e.to_string());
            RowResult {
                point,
                replicate,
                seed,
                values: points[point].clone(),
                outcome,
            }
        })
        .collect();

    write(&a.out, "sweep.csv", &to_csv(&keys, &rows))?;
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    let collisions = rows
        .iter()
        .filter(|r| r.outcome.as_ref().is_ok_and(|m| m.collision))
        .count();
    println!(
        "{} rows, {collisions} collisions, {failed} failed",
        rows.len()
    );
    for r in rows.iter().filter_map(|r| r.outcome.as_ref().err()) {
        eprintln!("episode failed: {r}");
    }
    if failed == rows.len() {
        return Err(UsageError("every episode failed".into()));
    }
    Ok(Outcome::Done)
}
