//! Environment geometry: wall segments, the sparse feature points attached
//! to them, and the queries the camera and simulator need.
//!
//! World files are JSON:
//!
//! ```json
//! {
//!   "walls": [[[-2, 0], [-2, 20]], [[2, 0], [2, 20]]],
//!   "features": [{"id": 0, "pos": [-2, 1.0], "wall": 0, "height": 0.1}],
//!   "corridor_half_width": 2.0,
//!   "centerline": [[0, 0], [0, 20]]
//! }
//! ```
//!
//! Lengths are metres. `wall` is the index of the host wall, or `null` for a
//! free-standing feature. `height` (optional, default 0) is the feature's
//! height relative to the camera. A free-form `description` string is
//! accepted and ignored.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Scalar, Vec2};

/// Maximum distance between a wall-hosted feature and its wall.
pub const FEATURE_WALL_TOLERANCE: f64 = 0.01;

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("reading world file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("world file parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate id {0} in features")]
    DuplicateId(u32),
    #[error("wall {0} is degenerate (zero length)")]
    DegenerateWall(usize),
    #[error("feature {id} references unknown wall {wall}")]
    UnknownWall { id: u32, wall: usize },
    #[error("feature {id} lies {distance:.4} m from its host wall {wall} (limit {FEATURE_WALL_TOLERANCE} m)")]
    FeatureOffWall { id: u32, wall: usize, distance: f64 },
    #[error("non-finite coordinate in {0}")]
    NonFinite(String),
    #[error("corridor_half_width must be > 0 when a centerline is present (and never negative), got {0}")]
    BadHalfWidth(f64),
    #[error("centerline needs at least two distinct points")]
    BadCenterline,
    #[error("world has no centerline")]
    NoCenterline,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallSegment<T> {
    pub a: Vec2<T>,
    pub b: Vec2<T>,
}

impl<T: Scalar> WallSegment<T> {
    pub fn new(a: Vec2<T>, b: Vec2<T>) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> T {
        (self.b - self.a).norm()
    }

    /// Euclidean distance from `p` to the closed segment.
    pub fn distance_to(&self, p: Vec2<T>) -> T {
        point_segment_distance(p, self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeaturePoint<T> {
    pub id: u32,
    pub position: Vec2<T>,
    /// Host wall index; `None` for free-standing features.
    pub wall: Option<usize>,
    /// Height above the camera's optical plane, metres.
    pub height: T,
}

impl<T: Scalar> FeaturePoint<T> {
    pub fn new(id: u32, x: T, y: T) -> Self {
        Self {
            id,
            position: Vec2::new(x, y),
            wall: None,
            height: T::zero(),
        }
    }
}

/// Immutable environment. Cheap to share across threads by reference.
#[derive(Debug, Clone, PartialEq)]
pub struct World<T> {
    pub walls: Vec<WallSegment<T>>,
    pub features: Vec<FeaturePoint<T>>,
    pub corridor_half_width: T,
    pub centerline: Option<Vec<Vec2<T>>>,
}

impl<T: Scalar> World<T> {
    /// Builds a world and checks its invariants.
    pub fn new(
        walls: Vec<WallSegment<T>>,
        features: Vec<FeaturePoint<T>>,
        corridor_half_width: T,
        centerline: Option<Vec<Vec2<T>>>,
    ) -> Result<Self, WorldError> {
        let w = Self {
            walls,
            features,
            corridor_half_width,
            centerline,
        };
        w.validate()?;
        Ok(w)
    }

    /// An empty, wall-less world.
    pub fn open() -> Self {
        Self {
            walls: Vec::new(),
            features: Vec::new(),
            corridor_half_width: T::zero(),
            centerline: None,
        }
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        for (i, w) in self.walls.iter().enumerate() {
            if !w.a.is_finite() || !w.b.is_finite() {
                return Err(WorldError::NonFinite(format!("wall {i}")));
            }
            if w.length() <= T::zero() {
                return Err(WorldError::DegenerateWall(i));
            }
        }
        let mut ids = HashSet::new();
        for f in &self.features {
            if !f.position.is_finite() || !f.height.is_finite() {
                return Err(WorldError::NonFinite(format!("feature {}", f.id)));
            }
            if !ids.insert(f.id) {
                return Err(WorldError::DuplicateId(f.id));
            }
            if let Some(wi) = f.wall {
                let wall = self
                    .walls
                    .get(wi)
                    .ok_or(WorldError::UnknownWall { id: f.id, wall: wi })?;
                let d = wall.distance_to(f.position).as_f64();
                if d > FEATURE_WALL_TOLERANCE {
                    return Err(WorldError::FeatureOffWall {
                        id: f.id,
                        wall: wi,
                        distance: d,
                    });
                }
            }
        }
        let r = self.corridor_half_width;
        if !r.is_finite() || r < T::zero() {
            return Err(WorldError::BadHalfWidth(r.as_f64()));
        }
        if let Some(cl) = &self.centerline {
            if r <= T::zero() {
                return Err(WorldError::BadHalfWidth(r.as_f64()));
            }
            if cl.iter().any(|p| !p.is_finite()) {
                return Err(WorldError::NonFinite("centerline".into()));
            }
            let distinct = cl.windows(2).any(|s| (s[1] - s[0]).norm() > T::zero());
            if cl.len() < 2 || !distinct {
                return Err(WorldError::BadCenterline);
            }
        }
        Ok(())
    }

    pub fn feature(&self, id: u32) -> Option<&FeaturePoint<T>> {
        self.features.iter().find(|f| f.id == id)
    }

    /// True iff the open segment `from → to` crosses no wall.
    pub fn line_of_sight(&self, from: Vec2<T>, to: Vec2<T>) -> bool {
        self.line_of_sight_except(from, to, None)
    }

    /// As [`World::line_of_sight`], ignoring wall `skip` (a feature's host).
    pub fn line_of_sight_except(&self, from: Vec2<T>, to: Vec2<T>, skip: Option<usize>) -> bool {
        self.walls
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .all(|(_, w)| !open_segment_hits(from, to, w.a, w.b))
    }

    /// Distance from `p` to the nearest wall, or `None` in a wall-less world.
    pub fn nearest_wall_distance(&self, p: Vec2<T>) -> Option<T> {
        self.walls
            .iter()
            .map(|w| w.distance_to(p))
            .fold(None, |acc, d| match acc {
                None => Some(d),
                Some(m) => Some(if d < m { d } else { m }),
            })
    }

    /// Signed perpendicular distance to the nearest centerline segment,
    /// positive to the left of the polyline's direction of travel.
    pub fn centerline_offset(&self, p: Vec2<T>) -> Result<T, WorldError> {
        let (seg, _) = self.nearest_centerline_segment(p)?;
        let cl = self.centerline.as_ref().ok_or(WorldError::NoCenterline)?;
        let (a, b) = (cl[seg], cl[seg + 1]);
        let d = point_segment_distance(p, a, b);
        let side = (b - a).cross(p - a);
        Ok(if side < T::zero() { -d } else { d })
    }

    /// Arc length of the projection of `p` onto the centerline, and the
    /// polyline's total length.
    pub fn centerline_progress(&self, p: Vec2<T>) -> Result<(T, T), WorldError> {
        let (seg, t) = self.nearest_centerline_segment(p)?;
        let cl = self.centerline.as_ref().ok_or(WorldError::NoCenterline)?;
        let mut s = T::zero();
        let mut total = T::zero();
        for (i, w) in cl.windows(2).enumerate() {
            let len = (w[1] - w[0]).norm();
            if i < seg {
                s = s + len;
            } else if i == seg {
                s = s + len * t;
            }
            total = total + len;
        }
        Ok((s, total))
    }

    fn nearest_centerline_segment(&self, p: Vec2<T>) -> Result<(usize, T), WorldError> {
        let cl = self.centerline.as_ref().ok_or(WorldError::NoCenterline)?;
        let mut best: Option<(usize, T, T)> = None;
        for (i, w) in cl.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            if (b - a).norm() <= T::zero() {
                continue;
            }
            let t = segment_param(p, a, b);
            let d = point_segment_distance(p, a, b);
            // Ties go to the later segment so progress is monotone at corners.
            if best.is_none_or(|(_, bd, _)| d <= bd) {
                best = Some((i, d, t));
            }
        }
        best.map(|(i, _, t)| (i, t))
            .ok_or(WorldError::BadCenterline)
    }

    /// Applies a rotation by `angle` about the origin followed by a
    /// translation to every wall, feature and centerline vertex.
    pub fn transformed(&self, angle: T, shift: Vec2<T>) -> Self {
        let tf = |p: Vec2<T>| rigid(p, angle, shift);
        Self {
            walls: self
                .walls
                .iter()
                .map(|w| WallSegment::new(tf(w.a), tf(w.b)))
                .collect(),
            features: self
                .features
                .iter()
                .map(|f| FeaturePoint {
                    position: tf(f.position),
                    ..*f
                })
                .collect(),
            corridor_half_width: self.corridor_half_width,
            centerline: self
                .centerline
                .as_ref()
                .map(|cl| cl.iter().map(|p| tf(*p)).collect()),
        }
    }

    pub fn cast<U: Scalar>(&self) -> World<U> {
        World {
            walls: self
                .walls
                .iter()
                .map(|w| WallSegment::new(w.a.cast(), w.b.cast()))
                .collect(),
            features: self
                .features
                .iter()
                .map(|f| FeaturePoint {
                    id: f.id,
                    position: f.position.cast(),
                    wall: f.wall,
                    height: U::lit(f.height.as_f64()),
                })
                .collect(),
            corridor_half_width: U::lit(self.corridor_half_width.as_f64()),
            centerline: self
                .centerline
                .as_ref()
                .map(|cl| cl.iter().map(|p| p.cast()).collect()),
        }
    }
}

/// Rotation about the origin then translation.
pub fn rigid<T: Scalar>(p: Vec2<T>, angle: T, shift: Vec2<T>) -> Vec2<T> {
    let (s, c) = angle.sin_cos();
    Vec2::new(c * p.x - s * p.y + shift.x, s * p.x + c * p.y + shift.y)
}

fn segment_param<T: Scalar>(p: Vec2<T>, a: Vec2<T>, b: Vec2<T>) -> T {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 <= T::zero() {
        return T::zero();
    }
    ((p - a).dot(ab) / len2).max(T::zero()).min(T::one())
}

pub fn point_segment_distance<T: Scalar>(p: Vec2<T>, a: Vec2<T>, b: Vec2<T>) -> T {
    let t = segment_param(p, a, b);
    let q = a + (b - a).scale(t);
    (p - q).norm()
}

/// Does the open segment p→q touch the closed segment a→b?
fn open_segment_hits<T: Scalar>(p: Vec2<T>, q: Vec2<T>, a: Vec2<T>, b: Vec2<T>) -> bool {
    let eps = T::lit(1e-12);
    let r = q - p;
    let s = b - a;
    let denom = r.cross(s);
    let ap = a - p;
    if denom.abs() <= eps * r.norm() * s.norm() {
        // Parallel: only collinear overlap blocks.
        if ap.cross(r).abs() > eps * r.norm() * (ap.norm() + T::one()) {
            return false;
        }
        let rr = r.dot(r);
        if rr <= T::zero() {
            return false;
        }
        let t0 = ap.dot(r) / rr;
        let t1 = (b - p).dot(r) / rr;
        let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
        return hi > eps && lo < T::one() - eps;
    }
    let t = ap.cross(s) / denom;
    let u = ap.cross(r) / denom;
    let tol = T::lit(1e-9);
    t > tol && t < T::one() - tol && u >= -tol && u <= T::one() + tol
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    walls: Vec<[[f64; 2]; 2]>,
    features: Vec<FeatureFile>,
    corridor_half_width: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    centerline: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FeatureFile {
    id: u32,
    pos: [f64; 2],
    wall: Option<usize>,
    #[serde(default, skip_serializing_if = "is_zero")]
    height: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// Parses and validates a world from JSON text.
pub fn parse_world(text: &str) -> Result<World<f64>, WorldError> {
    let raw: WorldFile = serde_json::from_str(text).map_err(|e| WorldError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    World::new(
        raw.walls
            .iter()
            .map(|[a, b]| WallSegment::new(Vec2::new(a[0], a[1]), Vec2::new(b[0], b[1])))
            .collect(),
        raw.features
            .iter()
            .map(|f| FeaturePoint {
                id: f.id,
                position: Vec2::new(f.pos[0], f.pos[1]),
                wall: f.wall,
                height: f.height,
            })
            .collect(),
        raw.corridor_half_width,
        raw.centerline
            .map(|cl| cl.iter().map(|p| Vec2::new(p[0], p[1])).collect()),
    )
}

pub fn load_world(path: impl AsRef<Path>) -> Result<World<f64>, WorldError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| WorldError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_world(&text)
}

/// Serializes a world in the file format read by [`load_world`].
pub fn world_to_json(world: &World<f64>, description: Option<&str>) -> String {
    let raw = WorldFile {
        description: description.map(str::to_owned),
        walls: world
            .walls
            .iter()
            .map(|w| [[w.a.x, w.a.y], [w.b.x, w.b.y]])
            .collect(),
        features: world
            .features
            .iter()
            .map(|f| FeatureFile {
                id: f.id,
                pos: [f.position.x, f.position.y],
                wall: f.wall,
                height: f.height,
            })
            .collect(),
        corridor_half_width: world.corridor_half_width,
        centerline: world
            .centerline
            .as_ref()
            .map(|cl| cl.iter().map(|p| [p.x, p.y]).collect()),
    };
    serde_json::to_string_pretty(&raw).expect("world serializes")
}
