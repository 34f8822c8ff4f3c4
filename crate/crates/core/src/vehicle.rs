//! Unicycle kinematics: ẋ = v cos θ, ẏ = v sin θ, θ̇ = u.

use thiserror::Error;

use crate::scalar::{wrap_angle, Scalar, Vec2};

#[derive(Debug, Error, PartialEq)]
pub enum VehicleError {
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("time step must be positive, got {0}")]
    BadStep(f64),
    #[error("speed must be non-negative, got {0}")]
    NegativeSpeed(f64),
}

/// Planar pose plus forward speed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VehicleState<T> {
    pub x: T,
    pub y: T,
    /// Heading in (-π, π].
    pub theta: T,
    pub v: T,
}

impl<T: Scalar> VehicleState<T> {
    pub fn new(x: T, y: T, theta: T, v: T) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
            v,
        }
    }

    pub fn position(&self) -> Vec2<T> {
        Vec2::new(self.x, self.y)
    }

    pub fn heading(&self) -> Vec2<T> {
        Vec2::new(self.theta.cos(), self.theta.sin())
    }

    fn check(&self) -> Result<(), VehicleError> {
        if !(self.x.is_finite() && self.y.is_finite() && self.theta.is_finite()) {
            return Err(VehicleError::NonFinite("state"));
        }
        if !self.v.is_finite() {
            return Err(VehicleError::NonFinite("speed"));
        }
        Ok(())
    }
}

/// Turning rate and forward speed held over one integration step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlCommand<T> {
    pub u: T,
    pub v: T,
}

impl<T: Scalar> ControlCommand<T> {
    pub fn new(u: T, v: T) -> Self {
        Self { u, v }
    }

    /// Clamps the turning rate to ±`u_max`; speed is floored at zero.
    pub fn clamped(u: T, v: T, u_max: T) -> Self {
        Self {
            u: u.max(-u_max).min(u_max),
            v: v.max(T::zero()),
        }
    }
}

fn validate<T: Scalar>(
    state: &VehicleState<T>,
    cmd: &ControlCommand<T>,
    dt: T,
) -> Result<(), VehicleError> {
    state.check()?;
    if !cmd.u.is_finite() || !cmd.v.is_finite() {
        return Err(VehicleError::NonFinite("command"));
    }
    if !dt.is_finite() {
        return Err(VehicleError::NonFinite("dt"));
    }
    if dt <= T::zero() {
        return Err(VehicleError::BadStep(dt.as_f64()));
    }
    if cmd.v < T::zero() {
        return Err(VehicleError::NegativeSpeed(cmd.v.as_f64()));
    }
    Ok(())
}

/// One classical RK4 step with `cmd` held constant over `dt`.
pub fn step<T: Scalar>(
    state: VehicleState<T>,
    cmd: ControlCommand<T>,
    dt: T,
) -> Result<VehicleState<T>, VehicleError> {
    validate(&state, &cmd, dt)?;
    let v = cmd.v;
    let u = cmd.u;
    if u == T::zero() {
        // All four stages coincide when the heading is constant.
        let (s, c) = state.theta.sin_cos();
        return Ok(VehicleState::new(
            state.x + v * c * dt,
            state.y + v * s * dt,
            state.theta,
            v,
        ));
    }
    let two = T::lit(2.0);
    let half = dt / two;
    let f = |th: T| (v * th.cos(), v * th.sin());
    let th0 = state.theta;
    let k1 = f(th0);
    let k2 = f(th0 + half * u);
    let k3 = f(th0 + half * u);
    let k4 = f(th0 + dt * u);
    let sixth = dt / T::lit(6.0);
    Ok(VehicleState::new(
        state.x + sixth * (k1.0 + two * k2.0 + two * k3.0 + k4.0),
        state.y + sixth * (k1.1 + two * k2.1 + two * k3.1 + k4.1),
        th0 + u * dt,
        v,
    ))
}

/// Closed-form constant-twist motion over `dt`.
pub fn exact_arc<T: Scalar>(state: VehicleState<T>, u: T, v: T, dt: T) -> VehicleState<T> {
    let th0 = state.theta;
    if u == T::zero() {
        let (s, c) = th0.sin_cos();
        return VehicleState::new(state.x + v * c * dt, state.y + v * s * dt, th0, v);
    }
    let th1 = th0 + u * dt;
    let r = v / u;
    VehicleState::new(
        state.x + r * (th1.sin() - th0.sin()),
        state.y - r * (th1.cos() - th0.cos()),
        th1,
        v,
    )
}
