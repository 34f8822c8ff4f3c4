//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for
//! each, and exits non-zero if any failed.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use taunav::camera::CameraConfig;
use taunav::control::SenseActSchedule;
use taunav::fixtures;
use taunav::simulator::{
    metrics, run_episode_in, tau_trace_experiment, ControlSource, EpisodeConfig, Maneuver,
    TraceConfig,
};
use taunav::stability::{
    eig2, eigs_agree, is_hurwitz, is_real_pair, single_wall_critical_gain,
    single_wall_eigs_closed_form, single_wall_linearization, tau_balance_linearization,
    tau_balance_printed_eigs, tau_balance_real_eig_condition,
};
use taunav::tau::{
    general_tau, geometric_tau, perceived_tau_expansion, perceived_tau_first_order, RoiConfig,
};
use taunav::{FeaturePoint, GainConfig, SceneMode, Side, VehicleState};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Noise-free straight run at v = 1 from the centreline: every perceived
/// τ sample against the geometric value and against y_f − t.
fn tau_fidelity() -> Outcome {
    let world = fixtures::straight_corridor();
    let mut cfg = EpisodeConfig::new("", VehicleState::new(0.0, 0.0, FRAC_PI_2, 1.0));
    cfg.camera.pixel_noise_sigma = 0.0;
    cfg.camera.mount_offset_phi = 0.0;
    cfg.control = ControlSource::Disabled;
    cfg.maneuver.v_cruise = 1.0;
    cfg.duration = 15.0;
    let log = run_episode_in(&cfg, &world).unwrap();
    let bound = 2.0 / cfg.camera.frame_rate;
    let (mut n, mut worst_geom, mut worst_canon) = (0usize, 0.0f64, 0.0f64);
    for frame in log.frames.iter().filter(|f| f.trusted) {
        let tick = log
            .ticks
            .iter()
            .find(|t| (t.t - frame.t).abs() < 1e-9)
            .expect("tick at every frame");
        for s in &frame.samples {
            let f = world.feature(s.feature_id).unwrap();
            let geom = geometric_tau(&tick.state, f).unwrap();
            worst_geom = worst_geom.max((s.tau - geom).abs());
            worst_canon = worst_canon.max((s.tau - (f.position.y - frame.t)).abs());
            n += 1;
        }
    }
    outcome(
        n > 1000 && worst_geom < bound && worst_canon < bound,
        format!(
            "{n} samples, max |tau_per - tau_geom| = {worst_geom:.5} s, \
             max |tau_per - (y_f - t)| = {worst_canon:.5} s, bound {bound:.5} s"
        ),
    )
}

/// Residual of the first-order summary is O(φ²): |residual|/φ² varies by
/// less than a factor 3 over the φ set, at several (t, x_f, y_f).
fn distortion_expansion() -> Outcome {
    let phis = [-0.1, -0.05, -0.02, 0.02, 0.05, 0.1];
    let points = [
        (0.0, 2.0, 10.0),
        (2.0, 1.0, 6.0),
        (1.0, -1.5, 8.0),
        (0.5, 3.0, 4.0),
    ];
    let mut worst_factor = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for (t, x_f, y_f) in points {
        let ratios: Vec<f64> = phis
            .iter()
            .map(|&phi| {
                let exact = perceived_tau_expansion(t, phi, x_f, y_f).unwrap();
                // Independent oracle: τ through a yawed camera on the
                // straight run (0, t, π/2).
                let state = VehicleState::new(0.0, t, FRAC_PI_2, 1.0);
                let feature = FeaturePoint::new(0, x_f, y_f);
                let oracle = general_tau(&state, phi, &feature).unwrap();
                worst_oracle = worst_oracle.max((exact - oracle).abs());
                (exact - perceived_tau_first_order(t, phi, x_f, y_f)).abs() / (phi * phi)
            })
            .collect();
        let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
        let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
        worst_factor = worst_factor.max(hi / lo);
    }
    outcome(
        worst_factor < 3.0 && worst_oracle < 1e-9,
        format!(
            "max variation of |residual|/phi^2 = {worst_factor:.3}x (limit 3), \
             expansion vs camera-frame oracle {worst_oracle:.1e}"
        ),
    )
}

/// Largest element-wise difference of two ordered pairs, relative to the
/// larger magnitude (absolute below 1).
fn max_difference(a: &[Complex<f64>; 2], b: &[Complex<f64>; 2]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm() / x.norm().max(y.norm()).max(1.0))
        .fold(0.0, f64::max)
}

/// Closed-form single-wall eigenvalues against the numeric solver on a
/// 10×10×10 grid, and the complex/real flip at k = 4/(fc²).
fn single_wall_eigenvalues() -> Outcome {
    let axis = |lo: f64, hi: f64| -> Vec<f64> {
        (0..10)
            .map(|i| lo * (hi / lo).powf(i as f64 / 9.0))
            .collect()
    };
    let (ks, fs, cs) = (axis(0.05, 20.0), axis(0.1, 2.0), axis(0.3, 6.0));
    let (mut n, mut worst, mut misclassified) = (0, 0.0f64, 0);
    for &k in &ks {
        for &f in &fs {
            for &c in &cs {
                let lin = single_wall_linearization(k, f, c, Side::Left, 2.0).unwrap();
                let numeric = eig2(&lin.matrix);
                let closed = single_wall_eigs_closed_form(k, f, c);
                worst = worst.max(max_difference(&closed, &numeric));
                let real = k >= single_wall_critical_gain(f, c);
                if is_real_pair(&numeric) != real || is_real_pair(&closed) != real {
                    misclassified += 1;
                }
                n += 1;
            }
        }
    }
    // Either side of the boundary, for every (f, c).
    let mut flips = 0;
    for &f in &fs {
        for &c in &cs {
            let kc = single_wall_critical_gain(f, c);
            let below =
                single_wall_linearization(kc * (1.0 - 1e-9), f, c, Side::Left, 2.0).unwrap();
            let above =
                single_wall_linearization(kc * (1.0 + 1e-9), f, c, Side::Left, 2.0).unwrap();
            if !is_real_pair(&eig2(&below.matrix)) && is_real_pair(&eig2(&above.matrix)) {
                flips += 1;
            }
        }
    }
    outcome(
        n == 1000 && worst <= 1e-9 && misclassified == 0 && flips == fs.len() * cs.len(),
        format!(
            "{n} points, max relative eigenvalue difference {worst:.1e}, \
             {misclassified} misclassified, flip at 4/(fc^2) on {flips}/{} (f, c) pairs",
            fs.len() * cs.len()
        ),
    )
}

/// Both linearizations Hurwitz on 10⁴ random positive parameter sets. The
/// printed tau-balancing eigenvalue expression is compared with the matrix
/// and its disagreements reported.
fn hurwitz_property() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut pos = || 10f64.powf(rng.random_range(-2.0..2.0));
    let trials = 10_000;
    let (mut violations, mut printed_off, mut condition_off) = (0, 0, 0);
    for _ in 0..trials {
        let (k, f, c) = (pos(), pos(), pos());
        let sw = single_wall_linearization(k, f, c, Side::Left, 2.0).unwrap();
        let (k_f, k_m, f_f, f_m, r) = (pos(), pos(), pos(), pos(), pos());
        let tb = tau_balance_linearization(k_f, k_m, f_f, f_m, r).unwrap();
        for m in [&sw.matrix, &tb.matrix] {
            if !is_hurwitz(m) || eig2(m).iter().any(|e| e.re >= 0.0 || e.re.is_nan()) {
                violations += 1;
            }
        }
        let numeric = eig2(&tb.matrix);
        if !eigs_agree(
            &tau_balance_printed_eigs(k_f, k_m, f_f, f_m, r),
            &numeric,
            1e-9,
        ) {
            printed_off += 1;
        }
        if tau_balance_real_eig_condition(k_f, k_m, f_f, f_m, r) != is_real_pair(&numeric) {
            condition_off += 1;
        }
    }
    outcome(
        violations == 0,
        format!(
            "{trials} parameter sets x 2 laws, {violations} non-Hurwitz; printed tau-balancing \
             eigenvalues disagree with the matrix on {printed_off}, stated real-eigenvalue \
             condition disagrees on {condition_off} (reported only)"
        ),
    )
}

/// Straight corridor from four off-centre starts under tau balancing with
/// the default gains.
fn corridor_centering() -> Outcome {
    let world = fixtures::straight_corridor();
    let base = EpisodeConfig::new("", VehicleState::new(0.0, 0.0, FRAC_PI_2, 1.5));
    let (f_f, f_m) = RoiConfig::default().boundary_gains(&CameraConfig::<f64>::default());
    let g = &base.gains;
    let condition = tau_balance_real_eig_condition(g.k_f, g.k_m, f_f, f_m, 2.0);
    let mut pass = condition;
    let mut parts = Vec::new();
    for x0 in [-1.0, 1.0] {
        for dtheta in [-0.3, 0.3] {
            let mut cfg = base.clone();
            cfg.initial_state.x = x0;
            cfg.initial_state.theta = FRAC_PI_2 + dtheta;
            cfg.initial_state.v = cfg.maneuver.v_cruise;
            cfg.control = ControlSource::Fixed(SceneMode::Corridor);
            cfg.duration = 60.0;
            let started = Instant::now();
            let log = run_episode_in(&cfg, &world).unwrap();
            let wall = started.elapsed().as_secs_f64();
            let m = metrics(&log);
            let ok = !m.collision && m.convergence_time.is_some_and(|t| t < 60.0) && wall < 10.0;
            pass &= ok;
            parts.push(format!(
                "x0={x0:+} dtheta={dtheta:+}: {} ({:.2} s sim, {wall:.2} s wall)",
                m.convergence_time
                    .map_or("no convergence".into(), |t| format!(
                        "in band from {t:.2} s"
                    )),
                m.duration
            ));
        }
    }
    outcome(
        pass,
        format!(
            "k_f={} k_m={} meet the real-eigenvalue condition: {condition}; {}",
            g.k_f,
            g.k_m,
            parts.join("; ")
        ),
    )
}

/// Single-wall episodes either side of k = 4/(fc²).
fn oscillation_prediction() -> Outcome {
    let world = fixtures::single_wall();
    let (f, _) = RoiConfig::default().boundary_gains(&CameraConfig::<f64>::default());
    let c = 4.0;
    let kc = single_wall_critical_gain(f, c);
    let run = |k: f64, x0: f64, seed: u64| {
        let mut cfg = EpisodeConfig::new("", VehicleState::new(x0, 0.0, FRAC_PI_2, 0.75));
        cfg.control = ControlSource::Fixed(SceneMode::SingleWallLeft);
        cfg.maneuver.v_cruise = 0.75;
        cfg.gains = GainConfig {
            k,
            c,
            ..GainConfig::default()
        };
        cfg.seed = seed;
        let m = metrics(&run_episode_in(&cfg, &world).unwrap());
        (m.overshoots, m.collision)
    };
    let (k_low, k_high) = (0.1, 0.7);
    let mut pass = k_low < kc && k_high >= kc;
    let mut parts = Vec::new();
    for x0 in [-0.8, 1.5] {
        let (lo, lo_hit) = run(k_low, x0, 0);
        let (hi, hi_hit) = run(k_high, x0, 0);
        pass &= lo >= 1 && hi == 0 && !lo_hit && !hi_hit;
        parts.push(format!(
            "x0={x0}: k={k_low} -> {lo} overshoots, k={k_high} -> {hi}"
        ));
    }
    outcome(
        pass,
        format!("f={f:.3}, c={c}, 4/(fc^2)={kc:.3}; {}", parts.join("; ")),
    )
}

/// Trusted-phase τ error on the turning maneuvers, sense-act against
/// continuous, same noise seed, over several seeds.
fn sense_act_improvement() -> Outcome {
    let world = fixtures::single_feature_wall();
    let base = TraceConfig::default();
    let sched = SenseActSchedule::<f64>::default();
    let setup_ok = base.initial_state.v == 0.5
        && base.schedule.sense_duration == 0.4
        && base.schedule.act_duration == 0.25
        && sched == base.schedule;
    let mut worst = [0.0f64; 2];
    for seed in 0..5 {
        let cfg = TraceConfig { seed, ..base };
        let (_, summary) = tau_trace_experiment(&world, &cfg).unwrap();
        for (i, m) in [Maneuver::TurnAway, Maneuver::TurnToward]
            .into_iter()
            .enumerate()
        {
            worst[i] = worst[i].max(summary.ratio(m).unwrap_or(f64::INFINITY));
        }
    }
    outcome(
        setup_ok && worst.iter().all(|r| *r <= 0.5),
        format!(
            "worst sense-act/continuous RMS ratio over 5 seeds: turn_away {:.3}, \
             turn_toward {:.3} (limit 0.5)",
            worst[0], worst[1]
        ),
    )
}

/// Every scenario fixture under automatic mode switching.
fn scenario_completion() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, world) in [
        ("straight", fixtures::straight_corridor()),
        ("L", fixtures::l_corridor()),
        ("U", fixtures::u_corridor()),
        ("single wall", fixtures::single_wall()),
    ] {
        let mut cfg = EpisodeConfig::new("", VehicleState::new(0.0, 0.0, FRAC_PI_2, 1.5));
        cfg.control = ControlSource::Auto;
        cfg.duration = 30.0;
        let m = metrics(&run_episode_in(&cfg, &world).unwrap());
        let ok = m.goal_reached && !m.collision && m.duration < 30.0;
        pass &= ok;
        parts.push(format!(
            "{name}: {} at {:.2} s, {} mode switches",
            if m.collision {
                "collision"
            } else if m.goal_reached {
                "completed"
            } else {
                "not completed"
            },
            m.duration,
            m.mode_switches
        ));
    }
    outcome(pass, parts.join("; "))
}

type Check = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("tau fidelity", tau_fidelity),
        ("distortion expansion", distortion_expansion),
        ("single-wall eigenvalues", single_wall_eigenvalues),
        ("Hurwitz property", hurwitz_property),
        ("corridor centering", corridor_centering),
        ("oscillation prediction", oscillation_prediction),
        ("sense-act improvement", sense_act_improvement),
        ("scenario completion", scenario_completion),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
