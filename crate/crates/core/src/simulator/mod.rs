//! Closed-loop episodes, their logs and metrics, and the τ-trace
//! comparison.

mod config;
mod episode;
mod log;
mod metrics;
mod trace;

pub use config::{ControlSource, EpisodeConfig, InitialState, SimError};
pub use episode::{run_episode, run_episode_in};
pub use log::{
    EpisodeLog, Event, EventKind, FrameRecord, RejectionCounts, TickRecord, TICK_CSV_HEADER,
};
pub use metrics::{
    convergence_time, count_crossings, metrics, sidecar_json, Metrics, CONVERGENCE_BAND,
    OVERSHOOT_BAND, OVERSHOOT_FRACTION,
};
pub use trace::{
    run_trace, tau_trace_experiment, Maneuver, TraceConfig, TraceRms, TraceSample, TraceSeries,
    TraceSummary, Variant,
};
