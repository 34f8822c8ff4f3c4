//! Time-to-transit (τ) visual navigation for a camera-equipped unicycle.
//!
//! * [`world`]: walls, feature points, visibility and centreline queries.
//! * [`vehicle`]: unicycle kinematics integrated with RK4.
//! * [`camera`]: pinhole projection and frame-to-frame feature tracks.
//! * [`tau`]: geometric and perceived τ, five-band aggregation, scene modes.
//! * [`control`]: tau balancing, single-wall and derivative laws, the
//!   sense-act gate.
//! * [`stability`]: linearizations, eigenvalues and Hurwitz checks.
//! * [`simulator`]: closed-loop episodes, logs, metrics and the τ-trace
//!   experiment.
//!
//! The math is generic over [`Scalar`] (`f32` or `f64`). The simulator and
//! file formats are `f64`; the aliases below name the `f64` instantiations.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod camera;
pub mod control;
pub mod fixtures;
pub mod scalar;
pub mod simulator;
pub mod stability;
pub mod tau;
pub mod vehicle;
pub mod world;

pub use scalar::{wrap_angle, Scalar, Vec2};

pub type Point = scalar::Vec2<f64>;
pub type VehicleState = vehicle::VehicleState<f64>;
pub type ControlCommand = vehicle::ControlCommand<f64>;
pub type World = world::World<f64>;
pub type WallSegment = world::WallSegment<f64>;
pub type FeaturePoint = world::FeaturePoint<f64>;
pub type CameraConfig = camera::CameraConfig<f64>;
pub type ImagePoint = camera::ImagePoint<f64>;
pub type Track = camera::Track<f64>;
pub type TauSample = tau::TauSample<f64>;
pub type RoiConfig = tau::RoiConfig<f64>;
pub type RoiSummary = tau::RoiSummary<f64>;
pub type SceneConfig = tau::SceneConfig<f64>;
pub type GainConfig = control::GainConfig<f64>;
pub type ManeuverConfig = control::ManeuverConfig<f64>;
pub type SenseActSchedule = control::SenseActSchedule<f64>;
pub type Linearization = stability::Linearization<f64>;
pub type Mat2 = stability::Mat2<f64>;

pub type VehicleStateF32 = vehicle::VehicleState<f32>;
pub type WorldF32 = world::World<f32>;
pub type CameraConfigF32 = camera::CameraConfig<f32>;
pub type RoiSummaryF32 = tau::RoiSummary<f32>;
pub type GainConfigF32 = control::GainConfig<f32>;
pub type Mat2F32 = stability::Mat2<f32>;

pub use control::Phase;
pub use tau::{SceneMode, Side};
