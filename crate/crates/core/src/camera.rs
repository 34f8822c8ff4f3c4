//! Forward-looking pinhole camera and synthetic Lagrangian optical flow.
//!
//! Image coordinates have their origin where the optical axis pierces the
//! image plane; `u` grows to the right and `v` grows upward. Features are
//! associated across frames by id, so dropout only happens when a feature
//! leaves the field of view or becomes occluded.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::scalar::{Scalar, Vec2};
use crate::vehicle::VehicleState;
use crate::world::World;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraConfig<T> {
    pub focal_px: T,
    pub width_px: T,
    pub height_px: T,
    /// Mount yaw relative to the vehicle heading, radians (positive = left).
    pub mount_offset_phi: T,
    pub frame_rate: T,
    pub pixel_noise_sigma: T,
    pub rng_seed: u64,
}

impl<T: Scalar> Default for CameraConfig<T> {
    fn default() -> Self {
        Self {
            focal_px: T::lit(300.0),
            width_px: T::lit(640.0),
            height_px: T::lit(480.0),
            mount_offset_phi: T::zero(),
            frame_rate: T::lit(30.0),
            pixel_noise_sigma: T::lit(0.1),
            rng_seed: 0,
        }
    }
}

impl<T: Scalar> CameraConfig<T> {
    /// Horizontal field of view, 2·atan(width / 2f).
    pub fn hfov(&self) -> T {
        T::lit(2.0) * (self.width_px / (T::lit(2.0) * self.focal_px)).atan()
    }

    pub fn frame_interval(&self) -> T {
        T::one() / self.frame_rate
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.rng_seed)
    }

    pub fn is_valid(&self) -> bool {
        self.focal_px > T::zero()
            && self.width_px > T::zero()
            && self.height_px > T::zero()
            && self.frame_rate > T::zero()
            && self.pixel_noise_sigma >= T::zero()
            && self.mount_offset_phi.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagePoint<T> {
    pub feature_id: u32,
    pub u_px: T,
    pub v_px: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Track<T> {
    pub feature_id: u32,
    /// Image position in the current frame, pixels.
    pub position: Vec2<T>,
    /// One-frame backward difference, pixels/second.
    pub velocity: Vec2<T>,
    /// Number of consecutive frames the feature has been seen.
    pub age: u32,
}

/// Depth along the optical axis and lateral offset (positive right) of a
/// world point in the camera frame.
pub fn camera_frame<T: Scalar>(state: &VehicleState<T>, phi: T, p: Vec2<T>) -> (T, T) {
    let (s, c) = (state.theta + phi).sin_cos();
    let d = p - state.position();
    (c * d.x + s * d.y, s * d.x - c * d.y)
}

/// Projects every visible feature into the image.
pub fn project<T: Scalar>(
    state: &VehicleState<T>,
    cam: &CameraConfig<T>,
    world: &World<T>,
) -> Vec<ImagePoint<T>> {
    let half_fov = cam.hfov() / T::lit(2.0);
    let half_w = cam.width_px / T::lit(2.0);
    let half_h = cam.height_px / T::lit(2.0);
    let origin = state.position();
    world
        .features
        .iter()
        .filter_map(|f| {
            let (depth, lateral) = camera_frame(state, cam.mount_offset_phi, f.position);
            if depth <= T::zero() {
                return None;
            }
            let bearing = lateral.atan2(depth);
            if bearing.abs() > half_fov {
                return None;
            }
            let u_px = cam.focal_px * lateral / depth;
            let v_px = cam.focal_px * f.height / depth;
            if u_px.abs() > half_w || v_px.abs() > half_h {
                return None;
            }
            if !world.line_of_sight_except(origin, f.position, f.wall) {
                return None;
            }
            Some(ImagePoint {
                feature_id: f.id,
                u_px,
                v_px,
            })
        })
        .collect()
}

fn jitter<T: Scalar, R: Rng + ?Sized>(rng: &mut R, sigma: T) -> Vec2<T> {
    if sigma == T::zero() {
        return Vec2::default();
    }
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    Vec2::new(T::lit(a) * sigma, T::lit(b) * sigma)
}

/// Pairs features seen in two consecutive frames and differentiates their
/// positions. Each endpoint receives independent Gaussian pixel noise.
/// `ages` carries each feature's age from the previous call, if tracked.
pub fn make_tracks<T: Scalar, R: Rng + ?Sized>(
    prev: &[ImagePoint<T>],
    cur: &[ImagePoint<T>],
    cam: &CameraConfig<T>,
    rng: &mut R,
) -> Vec<Track<T>> {
    make_tracks_aged(prev, cur, cam, rng, &HashMap::new())
}

pub fn make_tracks_aged<T: Scalar, R: Rng + ?Sized>(
    prev: &[ImagePoint<T>],
    cur: &[ImagePoint<T>],
    cam: &CameraConfig<T>,
    rng: &mut R,
    ages: &HashMap<u32, u32>,
) -> Vec<Track<T>> {
    let before: HashMap<u32, Vec2<T>> = prev
        .iter()
        .map(|p| (p.feature_id, Vec2::new(p.u_px, p.v_px)))
        .collect();
    let rate = cam.frame_rate;
    let sigma = cam.pixel_noise_sigma;
    cur.iter()
        .filter_map(|c| {
            let p0 = *before.get(&c.feature_id)?;
            let p1 = Vec2::new(c.u_px, c.v_px);
            let n0 = jitter(rng, sigma);
            let n1 = jitter(rng, sigma);
            let a = p0 + n0;
            let b = p1 + n1;
            Some(Track {
                feature_id: c.feature_id,
                position: b,
                velocity: (b - a).scale(rate),
                age: ages.get(&c.feature_id).map_or(2, |n| n + 1),
            })
        })
        .collect()
}
