//! Time-to-transit: the geometric value, the general closed form for an
//! offset camera, the canonical-trajectory expansion, and the value
//! perceived from image motion.

mod roi;
mod scene;

pub use roi::{
    aggregate_rois, tau_sample, Rejection, RoiConfig, RoiStatistic, RoiSummary, TauSample, ROI_C,
    ROI_COUNT, ROI_FL, ROI_FR, ROI_L, ROI_R,
};
pub use scene::{detect_scene_mode, ModeSwitch, SceneConfig, SceneMode, Side};

use thiserror::Error;

use crate::camera::Track;
use crate::scalar::Scalar;
use crate::vehicle::VehicleState;
use crate::world::FeaturePoint;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TauError {
    #[error("time-to-transit undefined at zero speed")]
    ZeroSpeed,
    #[error("transit line degenerate: feature lies on the heading line")]
    DegenerateTransitLine,
    #[error("x_f must be non-zero")]
    ZeroLateral,
    #[error("image velocity {speed} px/s below floor {floor} px/s")]
    BelowFloor { speed: f64, floor: f64 },
    #[error("scene detection needs at least two summaries, got {0}")]
    InsufficientHistory(usize),
}

/// Signed time until the vehicle crosses the line through `feature`
/// perpendicular to its heading, at constant speed and heading. Negative
/// once the transit has happened.
pub fn geometric_tau<T: Scalar>(
    state: &VehicleState<T>,
    feature: &FeaturePoint<T>,
) -> Result<T, TauError> {
    if state.v == T::zero() {
        return Err(TauError::ZeroSpeed);
    }
    let (s, c) = state.theta.sin_cos();
    let dx = feature.position.x - state.x;
    let dy = feature.position.y - state.y;
    Ok((c * dx + s * dy) / state.v)
}

/// Time-to-transit seen through a camera yawed by `phi` from the heading.
/// Reduces to [`geometric_tau`] at `phi = 0`.
pub fn general_tau<T: Scalar>(
    state: &VehicleState<T>,
    phi: T,
    feature: &FeaturePoint<T>,
) -> Result<T, TauError> {
    if state.v == T::zero() {
        return Err(TauError::ZeroSpeed);
    }
    let dx = feature.position.x - state.x;
    let dy = feature.position.y - state.y;
    let (sp, cp) = (state.theta + phi).sin_cos();
    let (st, ct) = state.theta.sin_cos();
    let denom = st * dx - ct * dy;
    let scale = dx.abs() + dy.abs();
    if denom == T::zero() || denom.abs() <= T::epsilon() * scale {
        return Err(TauError::DegenerateTransitLine);
    }
    let lateral_cam = dx * sp - dy * cp;
    let depth_cam = dx * cp + dy * sp;
    Ok(lateral_cam * depth_cam / (state.v * denom))
}

/// Perceived τ on the straight run (0, t, π/2) at unit speed for a feature
/// at (x_f, y_f), expanded as a polynomial in t with trigonometric
/// coefficients in the mount offset `phi`.
pub fn perceived_tau_expansion<T: Scalar>(t: T, phi: T, x_f: T, y_f: T) -> Result<T, TauError> {
    if x_f == T::zero() {
        return Err(TauError::ZeroLateral);
    }
    let (s, c) = phi.sin_cos();
    let sc = s * c;
    let two = T::lit(2.0);
    Ok(
        t * t * sc / x_f + t * (-two * y_f * sc / x_f + s * s - c * c) + y_f * y_f * sc / x_f
            - x_f * sc
            - y_f * s * s
            + y_f * c * c,
    )
}

/// First-order-in-`phi` summary of [`perceived_tau_expansion`]:
/// (y_f − t) + (φ/x_f)(y_f − t)² − φ·x_f.
pub fn perceived_tau_first_order<T: Scalar>(t: T, phi: T, x_f: T, y_f: T) -> T {
    let d = y_f - t;
    d + phi / x_f * d * d - phi * x_f
}

/// |r| / |ṙ| for one track.
pub fn perceived_tau<T: Scalar>(track: &Track<T>, velocity_floor: T) -> Result<T, TauError> {
    let speed = track.velocity.norm();
    if !(speed > velocity_floor) {
        return Err(TauError::BelowFloor {
            speed: speed.as_f64(),
            floor: velocity_floor.as_f64(),
        });
    }
    Ok(track.position.norm() / speed)
}

/// Rate of change of |r|; negative for a contracting (inward-moving) track.
pub fn radial_rate<T: Scalar>(track: &Track<T>) -> T {
    let r = track.position.norm();
    if r == T::zero() {
        return T::zero();
    }
    track.position.dot(track.velocity) / r
}
