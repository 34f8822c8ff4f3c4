//! Scene classification from a short history of ROI summaries, plus the
//! hysteresis filter that keeps the selected mode from chattering.

use serde::{Deserialize, Serialize};

use super::{RoiSummary, TauError, ROI_C, ROI_FL, ROI_FR, ROI_L, ROI_R};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    fn bands(self) -> [usize; 2] {
        match self {
            Side::Left => [ROI_FL, ROI_L],
            Side::Right => [ROI_FR, ROI_R],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneMode {
    Corridor,
    TurnLeft,
    TurnRight,
    SingleWallLeft,
    SingleWallRight,
    Blind,
}

impl SceneMode {
    pub fn turn(side: Side) -> Self {
        match side {
            Side::Left => SceneMode::TurnLeft,
            Side::Right => SceneMode::TurnRight,
        }
    }

    pub fn single_wall(side: Side) -> Self {
        match side {
            Side::Left => SceneMode::SingleWallLeft,
            Side::Right => SceneMode::SingleWallRight,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SceneMode::Corridor => "corridor",
            SceneMode::TurnLeft => "turn_left",
            SceneMode::TurnRight => "turn_right",
            SceneMode::SingleWallLeft => "single_wall_left",
            SceneMode::SingleWallRight => "single_wall_right",
            SceneMode::Blind => "blind",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneConfig<T> {
    /// Relative change between consecutive summaries treated as a jump.
    pub jump_threshold: T,
    /// Central τ below this (seconds) means a wall ahead.
    pub tau_turn: T,
    /// Consecutive agreeing classifications needed to switch mode.
    pub hysteresis: usize,
    /// Number of most recent summaries examined.
    pub window: usize,
}

impl<T: Scalar> Default for SceneConfig<T> {
    fn default() -> Self {
        Self {
            jump_threshold: T::lit(0.5),
            tau_turn: T::lit(4.0),
            hysteresis: 3,
            window: 4,
        }
    }
}

fn side_valid<T: Scalar>(s: &RoiSummary<T>, side: Side) -> bool {
    side.bands().iter().any(|&i| s.tau[i].is_some())
}

fn side_tau<T: Scalar>(s: &RoiSummary<T>, side: Side) -> Option<T> {
    let vals: Vec<T> = side.bands().iter().filter_map(|&i| s.tau[i]).collect();
    if vals.is_empty() {
        None
    } else {
        let n = T::from_usize(vals.len()).expect("small");
        Some(vals.iter().fold(T::zero(), |a, b| a + *b) / n)
    }
}

fn jumped<T: Scalar>(a: &RoiSummary<T>, b: &RoiSummary<T>, threshold: T) -> bool {
    [ROI_FL, ROI_L, ROI_R, ROI_FR]
        .iter()
        .any(|&i| match (a.tau[i], b.tau[i]) {
            (Some(x), Some(y)) => (y - x).abs() > threshold * x,
            (None, None) => false,
            _ => true,
        })
}

/// Classifies the latest summary in `history` (oldest first). Only the
/// last `cfg.window` entries are examined.
///
/// * `Blind`: no band valid.
/// * `Turn{side}`: the centre band sees a wall closer than `tau_turn` and
///   the lateral field is discontinuous within the window or unbalanced by
///   more than the jump threshold. The turn goes toward the more open side
///   (larger lateral τ; a side with no valid band counts as open).
/// * `SingleWall{side}`: across the whole window only `side` has valid
///   lateral bands.
/// * `Corridor`: otherwise, whenever both sides have a valid band.
pub fn detect_scene_mode<T: Scalar>(
    history: &[RoiSummary<T>],
    cfg: &SceneConfig<T>,
) -> Result<SceneMode, TauError> {
    if history.len() < 2 {
        return Err(TauError::InsufficientHistory(history.len()));
    }
    let start = history.len().saturating_sub(cfg.window.max(2));
    let win = &history[start..];
    let last = win.last().expect("non-empty");

    if !last.any_valid() {
        return Ok(SceneMode::Blind);
    }

    let left = side_tau(last, Side::Left);
    let right = side_tau(last, Side::Right);
    if let Some(c) = last.tau[ROI_C] {
        if c < cfg.tau_turn {
            let discontinuous = win
                .windows(2)
                .any(|p| jumped(&p[0], &p[1], cfg.jump_threshold));
            let unbalanced = match (left, right) {
                (Some(l), Some(r)) => {
                    let (lo, hi) = if l < r { (l, r) } else { (r, l) };
                    hi > (T::one() + cfg.jump_threshold) * lo
                }
                _ => true,
            };
            if discontinuous || unbalanced {
                let side = match (left, right) {
                    (None, _) => Side::Left,
                    (_, None) => Side::Right,
                    (Some(l), Some(r)) => {
                        if l >= r {
                            Side::Left
                        } else {
                            Side::Right
                        }
                    }
                };
                return Ok(SceneMode::turn(side));
            }
        }
    }

    for side in [Side::Left, Side::Right] {
        let only_this = win
            .iter()
            .all(|s| side_valid(s, side) && !side_valid(s, side.other()));
        if only_this {
            return Ok(SceneMode::single_wall(side));
        }
    }

    if side_valid(last, Side::Left) && side_valid(last, Side::Right) {
        return Ok(SceneMode::Corridor);
    }
    // One side valid now, but not for the whole window: keep treating the
    // scene as a corridor until the single-wall evidence is complete.
    Ok(if left.is_some() || right.is_some() {
        SceneMode::Corridor
    } else {
        // Only the centre band is valid.
        SceneMode::Blind
    })
}

/// Switches mode only after `hysteresis` consecutive agreeing
/// classifications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSwitch {
    current: SceneMode,
    candidate: Option<SceneMode>,
    streak: usize,
    hysteresis: usize,
}

impl ModeSwitch {
    pub fn new(initial: SceneMode, hysteresis: usize) -> Self {
        Self {
            current: initial,
            candidate: None,
            streak: 0,
            hysteresis: hysteresis.max(1),
        }
    }

    pub fn current(&self) -> SceneMode {
        self.current
    }

    /// Feeds one raw classification; returns the (possibly new) mode.
    pub fn update(&mut self, raw: SceneMode) -> SceneMode {
        if raw == self.current {
            self.candidate = None;
            self.streak = 0;
            return self.current;
        }
        if self.candidate == Some(raw) {
            self.streak += 1;
        } else {
            self.candidate = Some(raw);
            self.streak = 1;
        }
        if self.streak >= self.hysteresis {
            self.current = raw;
            self.candidate = None;
            self.streak = 0;
        }
        self.current
    }
}
