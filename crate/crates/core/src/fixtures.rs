//! Standard environments: straight corridor, 90° turn (L), two turns (U),
//! a single featured wall, and the one-feature wall used for τ traces.
//!
//! Features are spaced evenly along each wall at [`FEATURE_SPACING`] and
//! given a deterministic pseudo-random height in ±0.5 m so that both image
//! coordinates carry flow.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::Vec2;
use crate::world::{FeaturePoint, WallSegment, World};

pub const FEATURE_SPACING: f64 = 0.1;
pub const HALF_WIDTH: f64 = 2.0;

struct Builder {
    walls: Vec<WallSegment<f64>>,
    features: Vec<FeaturePoint<f64>>,
    rng: ChaCha8Rng,
}

impl Builder {
    fn new(seed: u64) -> Self {
        Self {
            walls: Vec::new(),
            features: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Adds a wall with features every `spacing` metres, offset half a
    /// spacing from each end.
    fn wall(&mut self, a: (f64, f64), b: (f64, f64), spacing: Option<f64>) -> &mut Self {
        let a = Vec2::new(a.0, a.1);
        let b = Vec2::new(b.0, b.1);
        let idx = self.walls.len();
        self.walls.push(WallSegment::new(a, b));
        if let Some(spacing) = spacing {
            let len = (b - a).norm();
            let n = (len / spacing).floor() as usize;
            for i in 0..n {
                let t = (i as f64 + 0.5) * spacing / len;
                let id = self.features.len() as u32;
                let height = self.rng.random_range(-0.5..=0.5);
                self.features.push(FeaturePoint {
                    id,
                    position: a + (b - a).scale(t),
                    wall: Some(idx),
                    height,
                });
            }
        }
        self
    }

    fn build(self, centerline: Vec<(f64, f64)>) -> World<f64> {
        World::new(
            self.walls,
            self.features,
            HALF_WIDTH,
            Some(
                centerline
                    .into_iter()
                    .map(|(x, y)| Vec2::new(x, y))
                    .collect(),
            ),
        )
        .expect("fixture satisfies world invariants")
    }
}

/// Walls at x = ±2 from y = 0 to 20, 200 features per wall. Travel is +y.
pub fn straight_corridor() -> World<f64> {
    let s = Some(FEATURE_SPACING);
    let mut b = Builder::new(1);
    b.wall((-2.0, 0.0), (-2.0, 20.0), s)
        .wall((2.0, 0.0), (2.0, 20.0), s);
    b.build(vec![(0.0, 0.0), (0.0, 20.0)])
}

/// Straight leg up +y for 10 m, then a 90° left turn into a 10 m leg
/// heading −x.
pub fn l_corridor() -> World<f64> {
    let s = Some(FEATURE_SPACING);
    let (leg_y, leg_x) = (10.0, 10.0);
    let mut b = Builder::new(2);
    b.wall((-2.0, 0.0), (-2.0, leg_y), s)
        .wall((2.0, 0.0), (2.0, leg_y + 4.0), s)
        .wall((2.0, leg_y + 4.0), (-leg_x - 2.0, leg_y + 4.0), s)
        .wall((-2.0, leg_y), (-leg_x - 2.0, leg_y), s);
    b.build(vec![(0.0, 0.0), (0.0, leg_y + 2.0), (-leg_x, leg_y + 2.0)])
}

/// Up +y, left along −x, back down −y: two 90° left turns.
pub fn u_corridor() -> World<f64> {
    let s = Some(FEATURE_SPACING);
    let (h, w) = (8.0, 8.0);
    let mut b = Builder::new(3);
    b.wall((2.0, 0.0), (2.0, h + 2.0), s)
        .wall((2.0, h + 2.0), (-w - 2.0, h + 2.0), s)
        .wall((-w - 2.0, h + 2.0), (-w - 2.0, 0.0), s)
        .wall((-2.0, 0.0), (-2.0, h - 2.0), s)
        .wall((-2.0, h - 2.0), (-w + 2.0, h - 2.0), s)
        .wall((-w + 2.0, h - 2.0), (-w + 2.0, 0.0), s);
    b.build(vec![(0.0, 0.0), (0.0, h), (-w, h), (-w, 0.0)])
}

/// One featured wall at x = −2, y ∈ [0, 25]; travel is +y.
pub fn single_wall() -> World<f64> {
    let mut b = Builder::new(4);
    b.wall((-2.0, 0.0), (-2.0, 25.0), Some(FEATURE_SPACING));
    b.build(vec![(0.0, 0.0), (0.0, 25.0)])
}

/// A wall at x = −1 carrying a single feature at (−1, 4).
pub fn single_feature_wall() -> World<f64> {
    World::new(
        vec![WallSegment::new(
            Vec2::new(-1.0, -5.0),
            Vec2::new(-1.0, 20.0),
        )],
        vec![FeaturePoint {
            id: 0,
            position: Vec2::new(-1.0, 4.0),
            wall: Some(0),
            height: 0.5,
        }],
        1.0,
        None,
    )
    .expect("fixture satisfies world invariants")
}

/// (file stem, world, description) for every shipped fixture.
pub fn all() -> Vec<(&'static str, World<f64>, &'static str)> {
    vec![
        (
            "straight_corridor",
            straight_corridor(),
            "Straight corridor, R = 2 m, 20 m long, features every 0.1 m on both walls (200 per wall).",
        ),
        (
            "l_corridor",
            l_corridor(),
            "90 degree left turn: 10 m leg up +y then 10 m leg along -x, R = 2 m, features every 0.1 m.",
        ),
        (
            "u_corridor",
            u_corridor(),
            "Two left turns: 8 m up, 8 m across, 8 m down, R = 2 m, features every 0.1 m.",
        ),
        (
            "single_wall",
            single_wall(),
            "One featured wall at x = -2 m, 25 m long, features every 0.1 m; centreline at x = 0.",
        ),
        (
            "single_feature_wall",
            single_feature_wall(),
            "Wall at x = -1 m with one feature at (-1, 4) for tau-trace comparisons.",
        ),
    ]
}
