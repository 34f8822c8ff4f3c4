use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::camera::CameraConfig;
use crate::control::{GainConfig, ManeuverConfig, SenseActSchedule};
use crate::tau::{RoiConfig, SceneConfig, SceneMode, ROI_FL, ROI_FR, ROI_L, ROI_R};
use crate::vehicle::VehicleState;
use crate::world::WorldError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("vehicle integration failed: {0}")]
    Vehicle(#[from] crate::vehicle::VehicleError),
}

/// How the episode chooses its steering command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ControlSource {
    /// Scene detection with hysteresis selects the law.
    #[default]
    Auto,
    /// u = 0 at cruise speed; perception still runs and is logged.
    Disabled,
    /// The given mode is used throughout.
    Fixed(SceneMode),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: f64,
}

impl From<InitialState> for VehicleState<f64> {
    fn from(s: InitialState) -> Self {
        VehicleState::new(s.x, s.y, s.theta, s.v)
    }
}

impl From<VehicleState<f64>> for InitialState {
    fn from(s: VehicleState<f64>) -> Self {
        Self {
            x: s.x,
            y: s.y,
            theta: s.theta,
            v: s.v,
        }
    }
}

fn default_duration() -> f64 {
    30.0
}
fn default_control_period() -> f64 {
    1.0 / 30.0
}
fn default_substeps() -> usize {
    3
}
fn default_footprint() -> f64 {
    0.25
}
fn default_window() -> f64 {
    0.4
}
fn default_goal_tolerance() -> f64 {
    2.0
}
fn default_true() -> bool {
    true
}
fn default_schedule() -> Option<SenseActSchedule<f64>> {
    Some(SenseActSchedule::default())
}
fn default_initial_mode() -> SceneMode {
    SceneMode::Corridor
}

/// Everything one closed-loop episode needs. Mirrors the JSON config file
/// field for field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpisodeConfig {
    /// World file, resolved relative to the config file when loaded with
    /// [`EpisodeConfig::load`].
    pub world: PathBuf,
    pub initial_state: InitialState,
    #[serde(default)]
    pub camera: CameraConfig<f64>,
    #[serde(default)]
    pub roi: RoiConfig<f64>,
    #[serde(default)]
    pub scene: SceneConfig<f64>,
    #[serde(default)]
    pub gains: GainConfig<f64>,
    #[serde(default)]
    pub maneuver: ManeuverConfig<f64>,
    /// `null` for continuous control.
    #[serde(default = "default_schedule")]
    pub schedule: Option<SenseActSchedule<f64>>,
    #[serde(default)]
    pub control: ControlSource,
    #[serde(default = "default_initial_mode")]
    pub initial_mode: SceneMode,
    #[serde(default = "default_duration")]
    pub duration: f64,
    /// Controller period; an integer multiple of the camera frame interval.
    #[serde(default = "default_control_period")]
    pub control_period: f64,
    /// Dynamics substeps per camera frame.
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    /// Sliding aggregation window for continuous control, seconds.
    #[serde(default = "default_window")]
    pub aggregation_window: f64,
    #[serde(default = "default_footprint")]
    pub footprint_radius: f64,
    /// End the episode once the vehicle is within this distance of the end
    /// of the centreline.
    #[serde(default = "default_goal_tolerance")]
    pub goal_tolerance: f64,
    #[serde(default = "default_true")]
    pub stop_at_goal: bool,
    #[serde(default)]
    pub seed: u64,
}

impl EpisodeConfig {
    /// Defaults everywhere except the world and start pose.
    pub fn new(world: impl Into<PathBuf>, initial_state: VehicleState<f64>) -> Self {
        Self {
            world: world.into(),
            initial_state: initial_state.into(),
            camera: CameraConfig::default(),
            roi: RoiConfig::default(),
            scene: SceneConfig::default(),
            gains: GainConfig::default(),
            maneuver: ManeuverConfig::default(),
            schedule: default_schedule(),
            control: ControlSource::Auto,
            initial_mode: SceneMode::Corridor,
            duration: default_duration(),
            control_period: default_control_period(),
            substeps: default_substeps(),
            aggregation_window: default_window(),
            footprint_radius: default_footprint(),
            goal_tolerance: default_goal_tolerance(),
            stop_at_goal: true,
            seed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| {
            SimError::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; a relative `world` path is taken relative to
    /// the config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, SimError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg = Self::from_json(&text)?;
        if cfg.world.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.world = dir.join(&cfg.world);
            }
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Camera frames per controller decision in continuous mode.
    pub fn frames_per_control(&self) -> usize {
        (self.control_period * self.camera.frame_rate)
            .round()
            .max(1.0) as usize
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let err = |m: String| Err(SimError::Config(m));
        if !(self.duration > 0.0) {
            return err(format!("duration must be > 0, got {}", self.duration));
        }
        if !self.camera.is_valid() {
            return err("camera: focal_px, width_px, height_px, frame_rate must be > 0 and pixel_noise_sigma >= 0".into());
        }
        let ratio = self.control_period * self.camera.frame_rate;
        if !(self.control_period > 0.0)
            || (ratio - ratio.round()).abs() > 1e-9
            || ratio.round() < 1.0
        {
            return err(format!(
                "control_period {} must be a positive multiple of the frame interval {}",
                self.control_period,
                1.0 / self.camera.frame_rate
            ));
        }
        if self.substeps == 0 {
            return err("substeps must be >= 1".into());
        }
        self.roi
            .validate(&self.camera)
            .map_err(|m| SimError::Config(format!("roi: {m}")))?;
        self.gains
            .validate()
            .map_err(|e| SimError::Config(format!("gains: {e}")))?;
        let m = &self.maneuver;
        for (name, v) in [
            ("v_cruise", m.v_cruise),
            ("v_turn", m.v_turn),
            ("v_blind", m.v_blind),
        ] {
            if !(v >= 0.0) {
                return err(format!("maneuver.{name} must be >= 0, got {v}"));
            }
        }
        if ![ROI_FL, ROI_L, ROI_R, ROI_FR].contains(&m.single_wall_band) {
            return err(format!(
                "maneuver.single_wall_band must be a lateral band index, got {}",
                m.single_wall_band
            ));
        }
        if let Some(s) = &self.schedule {
            if !s.is_valid() {
                return err("schedule: sense_duration and act_duration must be > 0".into());
            }
        }
        let s = &self.initial_state;
        if !(s.x.is_finite() && s.y.is_finite() && s.theta.is_finite()) || !(s.v >= 0.0) {
            return err("initial_state must be finite with v >= 0".into());
        }
        if !(self.footprint_radius >= 0.0) {
            return err("footprint_radius must be >= 0".into());
        }
        if !(self.aggregation_window > 0.0) {
            return err("aggregation_window must be > 0".into());
        }
        if self.scene.hysteresis == 0 {
            return err("scene.hysteresis must be >= 1".into());
        }
        Ok(())
    }
}
