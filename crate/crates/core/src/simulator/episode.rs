//! The closed loop, one camera frame at a time:
//! project → track → τ → aggregate → detect mode → select law → gate →
//! integrate.

use std::collections::{HashMap, VecDeque};

use super::config::{ControlSource, EpisodeConfig, SimError};
use super::log::{EpisodeLog, Event, EventKind, FrameRecord, RejectionCounts, TickRecord};
use crate::camera::{make_tracks_aged, project, ImagePoint};
use crate::control::{select_controller, sense_act_gate, Phase};
use crate::tau::{
    aggregate_rois, detect_scene_mode, tau_sample, ModeSwitch, Rejection, RoiSummary, SceneMode,
    TauSample,
};
use crate::vehicle::{step, ControlCommand, VehicleState};
use crate::world::World;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Loads the configured world and runs the episode.
pub fn run_episode(cfg: &EpisodeConfig) -> Result<EpisodeLog, SimError> {
    cfg.validate()?;
    let world = crate::world::load_world(&cfg.world)?;
    run_episode_in(cfg, &world)
}

/// Decision-level state: scene history and the latched command.
struct Controller<'a> {
    cfg: &'a EpisodeConfig,
    history: Vec<RoiSummary<f64>>,
    switch: ModeSwitch,
    held: ControlCommand<f64>,
}

impl<'a> Controller<'a> {
    fn new(cfg: &'a EpisodeConfig) -> Self {
        let mode = match cfg.control {
            ControlSource::Fixed(m) => m,
            _ => cfg.initial_mode,
        };
        Self {
            cfg,
            history: Vec::new(),
            switch: ModeSwitch::new(mode, cfg.scene.hysteresis),
            held: ControlCommand::new(0.0, cfg.initial_state.v),
        }
    }

    fn mode(&self) -> SceneMode {
        self.switch.current()
    }

    /// Folds one summary into the history and recomputes the command.
    /// Returns a mode-switch event if the mode changed.
    fn decide(&mut self, summary: RoiSummary<f64>) -> Option<(SceneMode, SceneMode)> {
        let before = self.mode();
        self.history.push(summary);
        let keep = self.cfg.scene.window.max(2);
        if self.history.len() > keep {
            self.history.drain(..self.history.len() - keep);
        }
        if self.cfg.control == ControlSource::Auto {
            if let Ok(raw) = detect_scene_mode(&self.history, &self.cfg.scene) {
                self.switch.update(raw);
            }
        }
        let mode = self.mode();
        self.held = match self.cfg.control {
            ControlSource::Disabled => ControlCommand::new(0.0, self.cfg.maneuver.v_cruise),
            _ => select_controller(mode, &summary, &self.cfg.gains, &self.cfg.maneuver),
        };
        (mode != before).then_some((before, mode))
    }
}

/// Runs one episode in an already loaded world. Deterministic given the
/// config (including `seed`).
pub fn run_episode_in(cfg: &EpisodeConfig, world: &World<f64>) -> Result<EpisodeLog, SimError> {
    cfg.validate()?;
    let mut log = EpisodeLog::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cam = &cfg.camera;
    let frame_dt = 1.0 / cam.frame_rate;
    let substeps = cfg.substeps;
    let ticks_per_second = substeps as f64 * cam.frame_rate;
    let n_frames = (cfg.duration * cam.frame_rate).round().max(1.0) as usize;
    let frames_per_control = cfg.frames_per_control();
    let window_frames = ((cfg.aggregation_window / frame_dt).round() as usize).max(1);

    let mut state: VehicleState<f64> = cfg.initial_state.into();
    let mut ctl = Controller::new(cfg);
    let mut prev_points: Vec<ImagePoint<f64>> = project(&state, cam, world);
    let mut ages: HashMap<u32, u32> = HashMap::new();

    // Sense-act bookkeeping.
    let mut window: Vec<TauSample<f64>> = Vec::new();
    let mut window_start = 0.0;
    let mut last_phase = cfg.schedule.map(|s| s.phase(0.0));
    // Continuous-control sliding window, one entry per frame.
    let mut sliding: VecDeque<Vec<TauSample<f64>>> = VecDeque::new();

    let mut latest = RoiSummary::empty(0.0);
    let goal = world
        .centerline
        .as_ref()
        .map(|_| {
            world
                .centerline_progress(state.position())
                .map(|(_, total)| total)
        })
        .transpose()?;

    'frames: for k in 1..=n_frames {
        let mut frame_all_sense = true;
        for j in 0..substeps {
            let idx = (k - 1) * substeps + j;
            let ts = idx as f64 / ticks_per_second;
            let (u, phase) = match &cfg.schedule {
                Some(sched) => {
                    let phase = sched.phase(ts);
                    if last_phase == Some(Phase::Sense) && phase == Phase::Act {
                        // Latch using only samples from the finished window.
                        let summary = aggregate_rois(&window, &cfg.roi, ts);
                        if let Some((from, to)) = ctl.decide(summary) {
                            log.events.push(Event {
                                t: ts,
                                kind: EventKind::ModeSwitch { from, to },
                            });
                        }
                        log.events.push(Event {
                            t: ts,
                            kind: EventKind::Decision {
                                window_start,
                                window_end: ts,
                                u: ctl.held.u,
                                v: ctl.held.v,
                            },
                        });
                    }
                    if last_phase == Some(Phase::Act) && phase == Phase::Sense {
                        window.clear();
                        window_start = ts;
                    }
                    last_phase = Some(phase);
                    let (u, phase) = sense_act_gate(ts, sched, ctl.held.u);
                    if phase == Phase::Act {
                        frame_all_sense = false;
                    }
                    (u, Some(phase))
                }
                None => (ctl.held.u, None),
            };
            let cmd = ControlCommand::new(u, ctl.held.v);
            state = step(state, cmd, 1.0 / ticks_per_second)?;
            let t_end = (idx + 1) as f64 / ticks_per_second;
            let offset = world
                .centerline
                .as_ref()
                .and_then(|_| world.centerline_offset(state.position()).ok());
            log.ticks.push(TickRecord {
                t: t_end,
                state,
                command: cmd,
                phase,
                mode: ctl.mode(),
                tau: latest.tau,
                offset,
            });
            if let Some(d) = world.nearest_wall_distance(state.position()) {
                if d < cfg.footprint_radius {
                    log.events.push(Event {
                        t: t_end,
                        kind: EventKind::Collision {
                            x: state.x,
                            y: state.y,
                        },
                    });
                    break 'frames;
                }
            }
            if let (Some(total), true) = (goal, cfg.stop_at_goal) {
                let (s, _) = world.centerline_progress(state.position())?;
                if s >= total - cfg.goal_tolerance {
                    log.events.push(Event {
                        t: t_end,
                        kind: EventKind::GoalReached,
                    });
                    break 'frames;
                }
            }
        }

        // Camera frame at t_k.
        let t_frame = (k * substeps) as f64 / ticks_per_second;
        let cur_points = project(&state, cam, world);
        let tracks = make_tracks_aged(&prev_points, &cur_points, cam, &mut rng, &ages);
        ages = tracks.iter().map(|t| (t.feature_id, t.age)).collect();
        let mut rejected = RejectionCounts::default();
        let samples: Vec<TauSample<f64>> = tracks
            .iter()
            .filter_map(|tr| match tau_sample(tr, cam, &cfg.roi) {
                Ok(s) => Some(s),
                Err(Rejection::BelowFloor) => {
                    rejected.below_floor += 1;
                    None
                }
                Err(Rejection::Contracting) => {
                    rejected.contracting += 1;
                    None
                }
                Err(Rejection::AboveMax) => {
                    rejected.above_max += 1;
                    None
                }
            })
            .collect();
        prev_points = cur_points;

        let trusted = cfg.schedule.is_none() || frame_all_sense;
        match &cfg.schedule {
            Some(_) => {
                if trusted {
                    window.extend(samples.iter().copied());
                }
                latest = aggregate_rois(&window, &cfg.roi, t_frame);
            }
            None => {
                sliding.push_back(samples.clone());
                while sliding.len() > window_frames {
                    sliding.pop_front();
                }
                let pooled: Vec<TauSample<f64>> = sliding.iter().flatten().copied().collect();
                latest = aggregate_rois(&pooled, &cfg.roi, t_frame);
                if k % frames_per_control == 0 {
                    if let Some((from, to)) = ctl.decide(latest) {
                        log.events.push(Event {
                            t: t_frame,
                            kind: EventKind::ModeSwitch { from, to },
                        });
                    }
                }
            }
        }
        log.frames.push(FrameRecord {
            t: t_frame,
            trusted,
            tracks: tracks.len(),
            samples,
            rejected,
            summary: latest,
        });
    }
    Ok(log)
}
