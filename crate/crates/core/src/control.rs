//! Steering laws driven by ROI time-to-transit, controller dispatch by
//! scene mode, and the sense-act gate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::tau::{RoiSummary, SceneMode, Side, ROI_FL, ROI_FR, ROI_L, ROI_R};
use crate::vehicle::ControlCommand;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("insufficient perception: {0}")]
    InsufficientPerception(&'static str),
    #[error("invalid gain {field}: {value}")]
    InvalidGain { field: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainConfig<T> {
    /// Outer-band balancing gain, 1/s².
    pub k_f: T,
    /// Inner-band balancing gain, 1/s².
    pub k_m: T,
    /// Single-wall gain, 1/s².
    pub k: T,
    /// Single-wall τ setpoint, seconds.
    pub c: T,
    /// Derivative-difference law gain.
    pub k_kong: T,
    /// Turning-rate clamp, rad/s.
    pub u_max: T,
}

impl<T: Scalar> Default for GainConfig<T> {
    fn default() -> Self {
        Self {
            k_f: T::lit(1.0),
            k_m: T::lit(0.05),
            k: T::lit(0.3),
            c: T::lit(1.92),
            k_kong: T::lit(0.5),
            u_max: T::lit(1.5),
        }
    }
}

impl<T: Scalar> GainConfig<T> {
    pub fn validate(&self) -> Result<(), ControlError> {
        let fields = [
            ("k_f", self.k_f),
            ("k_m", self.k_m),
            ("k", self.k),
            ("c", self.c),
            ("k_kong", self.k_kong),
            ("u_max", self.u_max),
        ];
        for (field, value) in fields {
            if !(value > T::zero()) || !value.is_finite() {
                return Err(ControlError::InvalidGain {
                    field,
                    value: value.as_f64(),
                });
            }
        }
        Ok(())
    }

    pub fn clamp(&self, u: T) -> T {
        u.max(-self.u_max).min(self.u_max)
    }
}

/// Speeds and open-loop primitives used by [`select_controller`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ManeuverConfig<T> {
    pub v_cruise: T,
    pub v_turn: T,
    pub v_blind: T,
    /// Turning rate of the open-loop turn primitive, rad/s.
    pub u_turn: T,
    /// Band used by the single-wall law, given for a left wall
    /// (`ROI_FL` or `ROI_L`); mirrored for a right wall.
    pub single_wall_band: usize,
}

impl<T: Scalar> Default for ManeuverConfig<T> {
    fn default() -> Self {
        Self {
            v_cruise: T::lit(1.5),
            v_turn: T::lit(0.5),
            v_blind: T::lit(0.3),
            u_turn: T::lit(0.8),
            single_wall_band: ROI_FL,
        }
    }
}

/// u = k_f(τ_fl − τ_fr) + k_m(τ_l − τ_r), clamped.
pub fn tau_balancing<T: Scalar>(
    summary: &RoiSummary<T>,
    g: &GainConfig<T>,
) -> Result<T, ControlError> {
    match (summary.fl(), summary.fr(), summary.l(), summary.r()) {
        (Some(fl), Some(fr), Some(l), Some(r)) => Ok(g.clamp(g.k_f * (fl - fr) + g.k_m * (l - r))),
        _ => Err(ControlError::InsufficientPerception(
            "tau balancing needs all four lateral bands",
        )),
    }
}

/// Balancing over whichever symmetric band pairs are valid.
fn partial_balancing<T: Scalar>(summary: &RoiSummary<T>, g: &GainConfig<T>) -> Option<T> {
    let outer = summary.fl().zip(summary.fr()).map(|(a, b)| g.k_f * (a - b));
    let inner = summary.l().zip(summary.r()).map(|(a, b)| g.k_m * (a - b));
    match (outer, inner) {
        (None, None) => None,
        (a, b) => Some(g.clamp(a.unwrap_or(T::zero()) + b.unwrap_or(T::zero()))),
    }
}

/// u = ±k(τ_x − c): positive sign for a wall on the left, negative on the
/// right, so that drifting toward the wall turns the vehicle away.
pub fn single_wall<T: Scalar>(
    summary: &RoiSummary<T>,
    side: Side,
    band: usize,
    g: &GainConfig<T>,
) -> Result<T, ControlError> {
    if ![ROI_FL, ROI_L, ROI_R, ROI_FR].contains(&band) {
        return Err(ControlError::InsufficientPerception(
            "single-wall law needs a lateral band",
        ));
    }
    let tau = summary.tau[band].ok_or(ControlError::InsufficientPerception(
        "single-wall band invalid",
    ))?;
    let e = g.k * (tau - g.c);
    Ok(g.clamp(match side {
        Side::Left => e,
        Side::Right => -e,
    }))
}

fn mirror_band(band: usize) -> usize {
    match band {
        ROI_FL => ROI_FR,
        ROI_L => ROI_R,
        ROI_R => ROI_L,
        ROI_FR => ROI_FL,
        b => b,
    }
}

/// One time-stamped observation of two features on the same wall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauPair<T> {
    pub t: T,
    pub tau1: T,
    pub tau2: T,
}

/// u = k[τ₂′ − τ₁′], derivatives by backward difference over the last two
/// observations.
pub fn kong_derivative_law<T: Scalar>(
    history: &[TauPair<T>],
    g: &GainConfig<T>,
) -> Result<T, ControlError> {
    let [.., a, b] = history else {
        return Err(ControlError::InsufficientPerception(
            "derivative law needs two observations",
        ));
    };
    let dt = b.t - a.t;
    if !(dt > T::zero()) {
        return Err(ControlError::InsufficientPerception(
            "observations must be time-ordered",
        ));
    }
    let d1 = (b.tau1 - a.tau1) / dt;
    let d2 = (b.tau2 - a.tau2) / dt;
    Ok(g.clamp(g.k_kong * (d2 - d1)))
}

/// Maps the current scene mode to a command.
///
/// Corridor falls back to balancing over the valid band pairs, then to the
/// single-wall law on whichever side is still seen, then to straight
/// motion, when full balancing is not possible.
pub fn select_controller<T: Scalar>(
    mode: SceneMode,
    summary: &RoiSummary<T>,
    g: &GainConfig<T>,
    m: &ManeuverConfig<T>,
) -> ControlCommand<T> {
    let left_band = m.single_wall_band;
    let right_band = mirror_band(left_band);
    let wall = |side: Side| {
        let band = match side {
            Side::Left => left_band,
            Side::Right => right_band,
        };
        single_wall(summary, side, band, g).ok()
    };
    match mode {
        SceneMode::Corridor => {
            let u = tau_balancing(summary, g)
                .ok()
                .or_else(|| partial_balancing(summary, g))
                .or_else(|| wall(Side::Left))
                .or_else(|| wall(Side::Right))
                .unwrap_or(T::zero());
            ControlCommand::new(u, m.v_cruise)
        }
        SceneMode::SingleWallLeft | SceneMode::SingleWallRight => {
            let side = if mode == SceneMode::SingleWallLeft {
                Side::Left
            } else {
                Side::Right
            };
            ControlCommand::new(wall(side).unwrap_or(T::zero()), m.v_cruise)
        }
        SceneMode::TurnLeft => ControlCommand::new(g.clamp(m.u_turn), m.v_turn),
        SceneMode::TurnRight => ControlCommand::new(g.clamp(-m.u_turn), m.v_turn),
        SceneMode::Blind => ControlCommand::new(T::zero(), m.v_blind),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Sense,
    Act,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Sense => "sense",
            Phase::Act => "act",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SenseActSchedule<T> {
    pub sense_duration: T,
    pub act_duration: T,
    pub phase_origin: T,
}

impl<T: Scalar> Default for SenseActSchedule<T> {
    fn default() -> Self {
        Self {
            sense_duration: T::lit(0.4),
            act_duration: T::lit(0.25),
            phase_origin: T::zero(),
        }
    }
}

impl<T: Scalar> SenseActSchedule<T> {
    pub fn period(&self) -> T {
        self.sense_duration + self.act_duration
    }

    pub fn is_valid(&self) -> bool {
        self.sense_duration > T::zero()
            && self.act_duration > T::zero()
            && self.phase_origin.is_finite()
    }

    /// Index of the sense+act cycle containing `t`.
    pub fn cycle(&self, t: T) -> i64 {
        ((t - self.phase_origin) / self.period())
            .floor()
            .to_i64()
            .unwrap_or(i64::MIN)
    }

    pub fn phase(&self, t: T) -> Phase {
        let p = self.period();
        let mut local = (t - self.phase_origin) % p;
        if local < T::zero() {
            local = local + p;
        }
        if local < self.sense_duration {
            Phase::Sense
        } else {
            Phase::Act
        }
    }
}

/// Zero turning during Sense; the held command during Act.
pub fn sense_act_gate<T: Scalar>(t: T, sched: &SenseActSchedule<T>, u_held: T) -> (T, Phase) {
    match sched.phase(t) {
        Phase::Sense => (T::zero(), Phase::Sense),
        Phase::Act => (u_held, Phase::Act),
    }
}
