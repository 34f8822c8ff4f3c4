//! Geometric versus perceived τ for a single wall feature while the
//! vehicle drives straight, turns away from the feature, or turns toward
//! it, with and without sense-act interleaving.
//!
//! Perceived τ comes from a least-squares line fitted to the feature's
//! image position over recent frames: τ at the window midpoint is
//! |r̄| / |ṙ|, carried forward to the current frame with dτ/dt = −1. Both
//! variants use the same estimator and the same noise stream; under
//! sense-act the fit only ever spans frames from the current sense window.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::camera::{project, CameraConfig};
use crate::control::{Phase, SenseActSchedule};
use crate::scalar::Vec2;
use crate::tau::geometric_tau;
use crate::vehicle::{step, ControlCommand, VehicleState};
use crate::world::World;

use super::config::{InitialState, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Maneuver {
    Straight,
    TurnAway,
    TurnToward,
}

impl Maneuver {
    pub const ALL: [Maneuver; 3] = [Maneuver::Straight, Maneuver::TurnAway, Maneuver::TurnToward];

    pub fn name(self) -> &'static str {
        match self {
            Maneuver::Straight => "straight",
            Maneuver::TurnAway => "turn_away",
            Maneuver::TurnToward => "turn_toward",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Continuous,
    SenseAct,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Continuous, Variant::SenseAct];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Continuous => "continuous",
            Variant::SenseAct => "sense_act",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceConfig {
    pub initial_state: InitialState,
    /// Magnitude of the turn rate for the turning maneuvers, rad/s.
    pub turn_rate: f64,
    pub duration: f64,
    pub camera: CameraConfig<f64>,
    pub schedule: SenseActSchedule<f64>,
    /// Maximum frames in the fit window.
    pub fit_frames: usize,
    /// Frames needed before an estimate is reported.
    pub min_fit_frames: usize,
    pub substeps: usize,
    pub seed: u64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            initial_state: InitialState {
                x: 0.0,
                y: 0.0,
                theta: std::f64::consts::FRAC_PI_2,
                v: 0.5,
            },
            turn_rate: 0.2,
            duration: 5.0,
            camera: CameraConfig::default(),
            schedule: SenseActSchedule::default(),
            fit_frames: 12,
            min_fit_frames: 8,
            substeps: 3,
            seed: 0,
        }
    }
}

impl TraceConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let err = |m: &str| Err(SimError::Config(m.to_string()));
        if !self.camera.is_valid() {
            return err("camera parameters invalid");
        }
        if !self.schedule.is_valid() {
            return err("schedule: sense_duration and act_duration must be > 0");
        }
        if !(self.duration > 0.0) || !(self.turn_rate >= 0.0) || !(self.initial_state.v > 0.0) {
            return err("duration and speed must be > 0, turn_rate >= 0");
        }
        if self.substeps == 0 || self.min_fit_frames < 2 || self.fit_frames < self.min_fit_frames {
            return err("need substeps >= 1 and 2 <= min_fit_frames <= fit_frames");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSample {
    pub t: f64,
    /// Signed geometric τ of the feature.
    pub tau_geom: f64,
    /// `None` when the feature is out of view or the fit window is short.
    pub tau_per: Option<f64>,
    /// `None` under continuous control.
    pub phase: Option<Phase>,
    /// The frame interval contained no turning (always true when
    /// continuous).
    pub trusted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSeries {
    pub maneuver: Maneuver,
    pub variant: Variant,
    pub samples: Vec<TraceSample>,
}

impl TraceSeries {
    /// Trusted samples that carry a perceived value.
    pub fn scored(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples
            .iter()
            .filter(|s| s.trusted)
            .filter_map(|s| s.tau_per.map(|p| (p, s.tau_geom)))
    }

    /// RMS of τ_per − τ_geom over [`TraceSeries::scored`] samples.
    pub fn rms_error(&self) -> Option<f64> {
        let (n, sum) = self.scored().fold((0usize, 0.0), |(n, s), (p, g)| {
            (n + 1, s + (p - g) * (p - g))
        });
        (n > 0).then(|| (sum / n as f64).sqrt())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,tau_geom,tau_per,phase,variant\n");
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                s.t,
                s.tau_geom,
                s.tau_per.map(|v| v.to_string()).unwrap_or_default(),
                s.phase.map_or("continuous", Phase::name),
                self.variant.name()
            );
        }
        out
    }
}

fn fit_tau(window: &VecDeque<(f64, Vec2<f64>)>, now: f64) -> Option<f64> {
    let n = window.len() as f64;
    let t_mean = window.iter().map(|w| w.0).sum::<f64>() / n;
    let p_mean = window
        .iter()
        .fold(Vec2::default(), |acc, w| acc + w.1)
        .scale(1.0 / n);
    let (mut stt, mut stp) = (0.0, Vec2::default());
    for &(t, p) in window {
        let dt = t - t_mean;
        stt += dt * dt;
        stp = stp + (p - p_mean).scale(dt);
    }
    if stt == 0.0 {
        return None;
    }
    let rate = stp.scale(1.0 / stt).norm();
    (rate > 0.0).then(|| p_mean.norm() / rate - (now - t_mean))
}

/// Runs one maneuver under one variant. The world's first feature is the
/// tracked one.
pub fn run_trace(
    world: &World<f64>,
    cfg: &TraceConfig,
    maneuver: Maneuver,
    variant: Variant,
) -> Result<TraceSeries, SimError> {
    cfg.validate()?;
    let feature = world
        .features
        .first()
        .ok_or_else(|| SimError::Config("tau trace needs a world with a feature".into()))?;
    let mut state: VehicleState<f64> = cfg.initial_state.into();
    let left = state.heading().cross(feature.position - state.position()) > 0.0;
    let toward = if left { cfg.turn_rate } else { -cfg.turn_rate };
    let u_cmd = match maneuver {
        Maneuver::Straight => 0.0,
        Maneuver::TurnAway => -toward,
        Maneuver::TurnToward => toward,
    };
    let cam = &cfg.camera;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ticks_per_second = cfg.substeps as f64 * cam.frame_rate;
    let n_frames = (cfg.duration * cam.frame_rate).round() as usize;
    let mut window: VecDeque<(f64, Vec2<f64>)> = VecDeque::new();
    let mut samples = Vec::with_capacity(n_frames + 1);

    for k in 0..=n_frames {
        // Whether any substep of this frame interval was an Act substep.
        let mut acted = false;
        if k > 0 {
            for j in 0..cfg.substeps {
                let ts = ((k - 1) * cfg.substeps + j) as f64 / ticks_per_second;
                let u = match variant {
                    Variant::Continuous => u_cmd,
                    Variant::SenseAct => match cfg.schedule.phase(ts) {
                        Phase::Sense => 0.0,
                        Phase::Act => {
                            acted = true;
                            u_cmd
                        }
                    },
                };
                state = step(
                    state,
                    ControlCommand::new(u, state.v),
                    1.0 / ticks_per_second,
                )?;
            }
        }
        let t = k as f64 / cam.frame_rate;
        let phase = match variant {
            Variant::Continuous => None,
            Variant::SenseAct => Some(if acted { Phase::Act } else { Phase::Sense }),
        };
        let trusted = !acted;
        let seen = project(&state, cam, world)
            .into_iter()
            .find(|p| p.feature_id == feature.id);
        let noise = if cam.pixel_noise_sigma > 0.0 {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            Vec2::new(a, b).scale(cam.pixel_noise_sigma)
        } else {
            Vec2::default()
        };
        match seen {
            Some(p) if trusted => {
                window.push_back((t, Vec2::new(p.u_px, p.v_px) + noise));
                while window.len() > cfg.fit_frames {
                    window.pop_front();
                }
            }
            _ => window.clear(),
        }
        let tau_per = (window.len() >= cfg.min_fit_frames)
            .then(|| fit_tau(&window, t))
            .flatten();
        samples.push(TraceSample {
            t,
            tau_geom: geometric_tau(&state, feature).unwrap_or(f64::NAN),
            tau_per,
            phase,
            trusted,
        });
    }
    Ok(TraceSeries {
        maneuver,
        variant,
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRms {
    pub maneuver: Maneuver,
    pub variant: Variant,
    pub rms: Option<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSummary {
    pub series: Vec<TraceRms>,
}

impl TraceSummary {
    pub fn rms(&self, maneuver: Maneuver, variant: Variant) -> Option<f64> {
        self.series
            .iter()
            .find(|s| s.maneuver == maneuver && s.variant == variant)
            .and_then(|s| s.rms)
    }

    /// Sense-act RMS divided by continuous RMS for one maneuver.
    pub fn ratio(&self, maneuver: Maneuver) -> Option<f64> {
        Some(self.rms(maneuver, Variant::SenseAct)? / self.rms(maneuver, Variant::Continuous)?)
    }
}

/// All three maneuvers under both variants, with an RMS summary. Every
/// series uses the same noise seed.
pub fn tau_trace_experiment(
    world: &World<f64>,
    cfg: &TraceConfig,
) -> Result<(Vec<TraceSeries>, TraceSummary), SimError> {
    let mut all = Vec::new();
    for m in Maneuver::ALL {
        for v in Variant::ALL {
            all.push(run_trace(world, cfg, m, v)?);
        }
    }
    let series = all
        .iter()
        .map(|s| TraceRms {
            maneuver: s.maneuver,
            variant: s.variant,
            rms: s.rms_error(),
            samples: s.scored().count(),
        })
        .collect();
    Ok((all, TraceSummary { series }))
}
