//! Episode records and their CSV / JSON serializations.

use std::fmt::Write as _;

use serde::Serialize;

use crate::control::Phase;
use crate::tau::{RoiSummary, SceneMode, TauSample, ROI_COUNT};
use crate::vehicle::{ControlCommand, VehicleState};

/// Column order of the per-tick CSV.
pub const TICK_CSV_HEADER: &str =
    "t,x,y,theta,v,u,phase,mode,tau_fl,tau_l,tau_c,tau_r,tau_fr,offset";

/// State after one dynamics substep, with the command applied during it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickRecord {
    pub t: f64,
    pub state: VehicleState<f64>,
    pub command: ControlCommand<f64>,
    /// `None` under continuous control.
    pub phase: Option<Phase>,
    pub mode: SceneMode,
    /// Latest ROI values at the time of the tick.
    pub tau: [Option<f64>; ROI_COUNT],
    /// Signed centreline offset; `None` without a centreline.
    pub offset: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RejectionCounts {
    pub below_floor: usize,
    pub contracting: usize,
    pub above_max: usize,
}

/// Perception output for one camera frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub t: f64,
    /// Frame interval free of turning (always true under continuous
    /// control).
    pub trusted: bool,
    pub tracks: usize,
    pub samples: Vec<TauSample<f64>>,
    pub rejected: RejectionCounts,
    /// Aggregate over the current sense window (or sliding window).
    pub summary: RoiSummary<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    ModeSwitch {
        from: SceneMode,
        to: SceneMode,
    },
    /// A latched controller decision; records the window it used.
    Decision {
        window_start: f64,
        window_end: f64,
        u: f64,
        v: f64,
    },
    Collision {
        x: f64,
        y: f64,
    },
    GoalReached,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    pub t: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EpisodeLog {
    pub ticks: Vec<TickRecord>,
    pub frames: Vec<FrameRecord>,
    pub events: Vec<Event>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl EpisodeLog {
    pub fn collided(&self) -> bool {
        self.events
            .iter()
            .any(|e| matches!(e.kind, EventKind::Collision { .. }))
    }

    pub fn reached_goal(&self) -> bool {
        self.events.iter().any(|e| e.kind == EventKind::GoalReached)
    }

    pub fn mode_switches(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e.kind, EventKind::ModeSwitch { .. }))
            .count()
    }

    pub fn end_time(&self) -> f64 {
        self.ticks.last().map_or(0.0, |t| t.t)
    }

    /// One row per tick, columns as in [`TICK_CSV_HEADER`].
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.ticks.len() * 96);
        out.push_str(TICK_CSV_HEADER);
        out.push('\n');
        for r in &self.ticks {
            let phase = r.phase.map_or("continuous", Phase::name);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.t,
                r.state.x,
                r.state.y,
                r.state.theta,
                r.command.v,
                r.command.u,
                phase,
                r.mode.name(),
                opt(r.tau[0]),
                opt(r.tau[1]),
                opt(r.tau[2]),
                opt(r.tau[3]),
                opt(r.tau[4]),
                opt(r.offset),
            );
        }
        out
    }
}
