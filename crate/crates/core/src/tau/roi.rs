//! Five vertical image bands and their per-band τ averages.
//!
//! Bands are indexed left to right: far-left, left, centre, right,
//! far-right.

use serde::{Deserialize, Serialize};

use super::{perceived_tau, radial_rate};
use crate::camera::{CameraConfig, Track};
use crate::scalar::Scalar;

pub const ROI_COUNT: usize = 5;
pub const ROI_FL: usize = 0;
pub const ROI_L: usize = 1;
pub const ROI_C: usize = 2;
pub const ROI_R: usize = 3;
pub const ROI_FR: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RoiStatistic {
    #[default]
    Mean,
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoiConfig<T> {
    /// Band widths as fractions of the image width, left to right.
    pub band_fractions: [T; ROI_COUNT],
    pub min_features_per_roi: usize,
    /// Samples above this are discarded, seconds.
    pub tau_max: T,
    /// Tracks slower than this are discarded, px/s.
    pub velocity_floor: T,
    pub statistic: RoiStatistic,
}

impl<T: Scalar> Default for RoiConfig<T> {
    fn default() -> Self {
        Self {
            band_fractions: [T::lit(0.2); ROI_COUNT],
            min_features_per_roi: 2,
            tau_max: T::lit(50.0),
            velocity_floor: T::one(),
            statistic: RoiStatistic::Mean,
        }
    }
}

impl<T: Scalar> RoiConfig<T> {
    /// Horizontal pixel coordinates of the six band edges.
    pub fn edges(&self, cam: &CameraConfig<T>) -> [T; ROI_COUNT + 1] {
        let half = cam.width_px / T::lit(2.0);
        let mut out = [-half; ROI_COUNT + 1];
        let mut acc = T::zero();
        for (i, f) in self.band_fractions.iter().enumerate() {
            acc = acc + *f;
            out[i + 1] = acc * cam.width_px - half;
        }
        out
    }

    /// Bearing of the outer (φ₁) and inner (φ₂) band boundaries, averaged
    /// over the two image halves.
    pub fn boundary_angles(&self, cam: &CameraConfig<T>) -> (T, T) {
        let e = self.edges(cam);
        let ang = |u: T| (u.abs() / cam.focal_px).atan();
        let two = T::lit(2.0);
        ((ang(e[1]) + ang(e[4])) / two, (ang(e[2]) + ang(e[3])) / two)
    }

    /// tan φ₁ and tan φ₂.
    pub fn boundary_gains(&self, cam: &CameraConfig<T>) -> (T, T) {
        let (a, b) = self.boundary_angles(cam);
        (a.tan(), b.tan())
    }

    /// Band containing horizontal image coordinate `u_px`.
    pub fn roi_index(&self, u_px: T, cam: &CameraConfig<T>) -> usize {
        let e = self.edges(cam);
        (1..ROI_COUNT)
            .find(|&i| u_px < e[i])
            .map_or(ROI_COUNT - 1, |i| i - 1)
    }

    pub fn validate(&self, cam: &CameraConfig<T>) -> Result<(), String> {
        if self.band_fractions.iter().any(|f| !(*f > T::zero())) {
            return Err("band_fractions must all be positive".into());
        }
        let sum = self.band_fractions.iter().fold(T::zero(), |a, b| a + *b);
        if (sum - T::one()).abs().as_f64() > 1e-12f64.max(8.0 * T::epsilon().as_f64()) {
            return Err(format!("band_fractions must sum to 1, got {sum}"));
        }
        let (p1, p2) = self.boundary_angles(cam);
        if !(T::zero() < p2 && p2 < p1 && p1 < cam.hfov() / T::lit(2.0)) {
            return Err(format!(
                "band boundary angles must satisfy 0 < phi2 < phi1 < hfov/2, got phi1={p1}, phi2={p2}"
            ));
        }
        if !(self.tau_max > T::zero()) {
            return Err("tau_max must be positive".into());
        }
        if !(self.velocity_floor >= T::zero()) {
            return Err("velocity_floor must be non-negative".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauSample<T> {
    pub feature_id: u32,
    pub tau: T,
    pub image_u: T,
    pub roi_index: usize,
}

/// Why a track produced no sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    BelowFloor,
    Contracting,
    AboveMax,
}

/// Converts a track into a τ sample, or says why it was dropped.
pub fn tau_sample<T: Scalar>(
    track: &Track<T>,
    cam: &CameraConfig<T>,
    cfg: &RoiConfig<T>,
) -> Result<TauSample<T>, Rejection> {
    let tau = perceived_tau(track, cfg.velocity_floor).map_err(|_| Rejection::BelowFloor)?;
    if radial_rate(track) < T::zero() {
        return Err(Rejection::Contracting);
    }
    if tau > cfg.tau_max {
        return Err(Rejection::AboveMax);
    }
    Ok(TauSample {
        feature_id: track.feature_id,
        tau,
        image_u: track.position.x,
        roi_index: cfg.roi_index(track.position.x, cam),
    })
}

/// Per-band τ statistics; `tau[i]` is `None` when band `i` had fewer than
/// the configured minimum of usable samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoiSummary<T> {
    pub tau: [Option<T>; ROI_COUNT],
    pub counts: [usize; ROI_COUNT],
    pub timestamp: T,
}

impl<T: Scalar> RoiSummary<T> {
    pub fn empty(timestamp: T) -> Self {
        Self {
            tau: [None; ROI_COUNT],
            counts: [0; ROI_COUNT],
            timestamp,
        }
    }

    pub fn fl(&self) -> Option<T> {
        self.tau[ROI_FL]
    }
    pub fn l(&self) -> Option<T> {
        self.tau[ROI_L]
    }
    pub fn c(&self) -> Option<T> {
        self.tau[ROI_C]
    }
    pub fn r(&self) -> Option<T> {
        self.tau[ROI_R]
    }
    pub fn fr(&self) -> Option<T> {
        self.tau[ROI_FR]
    }

    /// Left and right bands exchanged.
    pub fn mirrored(&self) -> Self {
        let mut out = *self;
        out.tau.reverse();
        out.counts.reverse();
        out
    }

    pub fn any_valid(&self) -> bool {
        self.tau.iter().any(Option::is_some)
    }
}

/// Averages samples per band after discarding those above `tau_max`.
pub fn aggregate_rois<T: Scalar>(
    samples: &[TauSample<T>],
    cfg: &RoiConfig<T>,
    timestamp: T,
) -> RoiSummary<T> {
    let mut buckets: [Vec<T>; ROI_COUNT] = Default::default();
    for s in samples {
        if s.roi_index < ROI_COUNT && s.tau <= cfg.tau_max && s.tau.is_finite() {
            buckets[s.roi_index].push(s.tau);
        }
    }
    let mut out = RoiSummary::empty(timestamp);
    for (i, b) in buckets.iter_mut().enumerate() {
        out.counts[i] = b.len();
        if b.is_empty() || b.len() < cfg.min_features_per_roi {
            continue;
        }
        out.tau[i] = Some(match cfg.statistic {
            RoiStatistic::Mean => mean(b),
            RoiStatistic::Median => median(b),
        });
    }
    out
}

fn mean<T: Scalar>(xs: &mut [T]) -> T {
    // Sorted summation makes the result independent of sample order.
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = T::from_usize(xs.len()).expect("count fits");
    let m = xs.iter().fold(T::zero(), |a, b| a + *b) / n;
    // Rounding can push the mean a hair outside the sample range.
    m.max(xs[0]).min(xs[xs.len() - 1])
}

fn median<T: Scalar>(xs: &mut [T]) -> T {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / T::lit(2.0)
    }
}
