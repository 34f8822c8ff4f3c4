use serde::Serialize;

use super::log::{EpisodeLog, EventKind};

/// Offset band used for convergence, metres.
pub const CONVERGENCE_BAND: f64 = 0.05;
/// Smallest hysteresis half-width for counting overshoots, metres.
pub const OVERSHOOT_BAND: f64 = 0.02;
/// Overshoot hysteresis as a fraction of the initial distance from rest.
pub const OVERSHOOT_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub duration: f64,
    pub rms_offset: Option<f64>,
    pub max_abs_offset: Option<f64>,
    /// First time after which |offset| stays below [`CONVERGENCE_BAND`]
    /// for the rest of the log. Absent after a collision.
    pub convergence_time: Option<f64>,
    pub collision: bool,
    pub goal_reached: bool,
    pub mode_switches: usize,
    pub mean_abs_u: f64,
    /// Mean offset over the last quarter of the log.
    pub rest_offset: Option<f64>,
    /// Sign changes of (offset − rest_offset). Excursions smaller than
    /// [`OVERSHOOT_FRACTION`] of the initial distance from rest (at least
    /// [`OVERSHOOT_BAND`]) are treated as noise.
    pub overshoots: usize,
    pub rejected_contracting: usize,
    pub rejected_below_floor: usize,
}

/// Counts how many times `series` crosses from one side of `rest` to the
/// other. A side is only entered once the value is more than `band` away
/// from `rest`, so jitter inside the band is ignored. Approaching `rest`
/// without passing it counts as zero.
pub fn count_crossings(series: &[f64], rest: f64, band: f64) -> usize {
    let mut side = 0i8;
    let mut n = 0;
    for &x in series {
        let s = if x > rest + band {
            1
        } else if x < rest - band {
            -1
        } else {
            continue;
        };
        if side != 0 && s != side {
            n += 1;
        }
        side = s;
    }
    n
}

/// First time after which `|offset| < band` holds for every later sample,
/// provided the final sample is inside the band.
pub fn convergence_time(times: &[f64], offsets: &[f64], band: f64) -> Option<f64> {
    if offsets.last().is_none_or(|o| o.abs() >= band) {
        return None;
    }
    let last_out = offsets.iter().rposition(|o| o.abs() >= band);
    Some(match last_out {
        Some(i) => times[i + 1],
        None => times[0],
    })
}

pub fn metrics(log: &EpisodeLog) -> Metrics {
    let (times, offsets): (Vec<f64>, Vec<f64>) = log
        .ticks
        .iter()
        .filter_map(|r| r.offset.map(|o| (r.t, o)))
        .unzip();
    let collision = log.collided();
    let n = offsets.len();
    let rms_offset =
        (n > 0).then(|| (offsets.iter().map(|o| o * o).sum::<f64>() / n as f64).sqrt());
    let max_abs_offset = offsets.iter().map(|o| o.abs()).reduce(f64::max);
    let rest_offset = (n > 0).then(|| {
        let tail = &offsets[n - n.div_ceil(4)..];
        tail.iter().sum::<f64>() / tail.len() as f64
    });
    let overshoots = rest_offset.map_or(0, |r| {
        let band = (OVERSHOOT_FRACTION * (offsets[0] - r).abs()).max(OVERSHOOT_BAND);
        count_crossings(&offsets, r, band)
    });
    let convergence_time = if collision {
        None
    } else {
        convergence_time(&times, &offsets, CONVERGENCE_BAND)
    };
    let mean_abs_u = if log.ticks.is_empty() {
        0.0
    } else {
        log.ticks.iter().map(|r| r.command.u.abs()).sum::<f64>() / log.ticks.len() as f64
    };
    Metrics {
        duration: log.end_time(),
        rms_offset,
        max_abs_offset,
        convergence_time,
        collision,
        goal_reached: log.events.iter().any(|e| e.kind == EventKind::GoalReached),
        mode_switches: log.mode_switches(),
        mean_abs_u,
        rest_offset,
        overshoots,
        rejected_contracting: log.frames.iter().map(|f| f.rejected.contracting).sum(),
        rejected_below_floor: log.frames.iter().map(|f| f.rejected.below_floor).sum(),
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    events: &'a [super::log::Event],
    metrics: &'a Metrics,
}

/// JSON document holding the event list and the summary metrics.
pub fn sidecar_json(log: &EpisodeLog, metrics: &Metrics) -> String {
    serde_json::to_string_pretty(&Sidecar {
        events: &log.events,
        metrics,
    })
    .expect("sidecar serializes")
}
