//! `taunav`: run τ-navigation episodes, τ-trace comparisons, stability
//! tables and gain sweeps from JSON config files.
//!
//! Exit status is 0 on success, 1 on a usage or config error, and 2 when a
//! simulated episode ends in a collision.

mod stability;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use taunav::fixtures;
use taunav::simulator::{
    metrics, run_episode_in, sidecar_json, tau_trace_experiment, EpisodeConfig, Maneuver,
    TraceConfig,
};
use taunav::world::{load_world, World};

#[derive(Parser)]
#[command(
    name = "taunav",
    version,
    about = "Time-to-transit visual navigation simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one closed-loop episode; writes episode.csv and episode.json.
    Simulate(Common),
    /// Eigenvalue table over a parameter grid; writes stability.csv.
    Stability(Common),
    /// Geometric vs perceived τ for three maneuvers, with and without
    /// sense-act; writes one CSV per maneuver and tau_trace_summary.json.
    TauTrace(Common),
    /// Episodes over a gain grid and several seeds, in parallel; writes
    /// sweep.csv.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the world file named in the config.
    #[arg(long)]
    world: Option<PathBuf>,
}

/// Problems with the invocation or its inputs (exit 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

/// How a successful invocation ended.
enum Outcome {
    Done,
    Collision,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(&a),
        Command::Stability(a) => stability::run(&a),
        Command::TauTrace(a) => tau_trace(&a),
        Command::Sweep(a) => sweep::run(&a),
    };
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Collision) => ExitCode::from(2),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn require_config(a: &Common) -> Result<&Path, UsageError> {
    a.config
        .as_deref()
        .ok_or_else(|| UsageError("--config is required".into()))
}

fn read_json(path: &Path) -> Result<serde_json::Value, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

/// Resolves `p` against the directory of `base` unless it is absolute.
fn relative_to(base: &Path, p: &Path) -> PathBuf {
    match base.parent() {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), UsageError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| UsageError(format!("creating {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| UsageError(format!("writing {}: {e}", path.display())))
}

/// Loads an episode config and applies the `--world` and `--seed`
/// overrides.
fn episode_config(a: &Common) -> Result<(EpisodeConfig, World<f64>), UsageError> {
    let mut cfg = EpisodeConfig::load(require_config(a)?)?;
    if let Some(w) = &a.world {
        cfg.world = w.clone();
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let world = load_world(&cfg.world)?;
    Ok((cfg, world))
}

fn simulate(a: &Common) -> Result<Outcome, UsageError> {
    let (cfg, world) = episode_config(a)?;
    let log = run_episode_in(&cfg, &world)?;
    let m = metrics(&log);
    write(&a.out, "episode.csv", &log.to_csv())?;
    write(&a.out, "episode.json", &sidecar_json(&log, &m))?;
    println!(
        "duration {:.3} s, collision {}, goal {}, mode switches {}",
        m.duration, m.collision, m.goal_reached, m.mode_switches
    );
    Ok(if m.collision {
        Outcome::Collision
    } else {
        Outcome::Done
    })
}

fn tau_trace(a: &Common) -> Result<Outcome, UsageError> {
    // The config is a trace config plus an optional "world" path.
    let (mut cfg, file_world) = match &a.config {
        Some(path) => {
            let mut value = read_json(path)?;
            let world = value
                .as_object_mut()
                .ok_or_else(|| UsageError(format!("{}: expected an object", path.display())))?
                .remove("world")
                .map(|w| {
                    w.as_str()
                        .map(|s| relative_to(path, Path::new(s)))
                        .ok_or_else(|| UsageError("world: expected a path string".into()))
                })
                .transpose()?;
            let cfg: TraceConfig = serde_json::from_value(value)
                .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            (cfg, world)
        }
        None => (TraceConfig::default(), None),
    };
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let world = match a.world.as_ref().or(file_world.as_ref()) {
        Some(p) => load_world(p)?,
        None => fixtures::single_feature_wall(),
    };
    let (series, summary) = tau_trace_experiment(&world, &cfg)?;
    for m in Maneuver::ALL {
        let mut csv = String::new();
        for s in series.iter().filter(|s| s.maneuver == m) {
            let body = s.to_csv();
            if csv.is_empty() {
                csv = body;
            } else {
                csv.extend(body.lines().skip(1).map(|l| format!("{l}\n")));
            }
        }
        write(&a.out, &format!("tau_trace_{}.csv", m.name()), &csv)?;
    }
    let ratios: serde_json::Map<String, serde_json::Value> =
        [Maneuver::TurnAway, Maneuver::TurnToward]
            .into_iter()
            .map(|m| (m.name().to_string(), serde_json::json!(summary.ratio(m))))
            .collect();
    let doc = serde_json::json!({
        "series": summary.series,
        "sense_act_to_continuous_ratio": ratios,
    });
    write(
        &a.out,
        "tau_trace_summary.json",
        &serde_json::to_string_pretty(&doc)?,
    )?;
    for r in &summary.series {
        println!(
            "{:<12} {:<10} rms {}",
            r.maneuver.name(),
            r.variant.name(),
            r.rms.map_or("n/a".into(), |v| format!("{v:.4} s"))
        );
    }
    Ok(Outcome::Done)
}
