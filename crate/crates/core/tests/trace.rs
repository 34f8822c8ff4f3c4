use taunav::fixtures;
use taunav::simulator::{run_trace, tau_trace_experiment, Maneuver, TraceConfig, Variant};
use taunav::Phase;

fn noise_free() -> TraceConfig {
    let mut cfg = TraceConfig::default();
    cfg.camera.pixel_noise_sigma = 0.0;
    cfg
}

#[test]
fn noise_free_straight_run_is_within_two_frames() {
    let w = fixtures::single_feature_wall();
    let cfg = noise_free();
    for v in Variant::ALL {
        let s = run_trace(&w, &cfg, Maneuver::Straight, v).unwrap();
        let rms = s.rms_error().unwrap();
        assert!(rms < 2.0 / cfg.camera.frame_rate, "{v:?}: {rms}");
    }
}

#[test]
fn turning_distorts_continuous_tau() {
    let w = fixtures::single_feature_wall();
    let (_, summary) = tau_trace_experiment(&w, &TraceConfig::default()).unwrap();
    let straight = summary
        .rms(Maneuver::Straight, Variant::Continuous)
        .unwrap();
    for m in [Maneuver::TurnAway, Maneuver::TurnToward] {
        assert!(summary.rms(m, Variant::Continuous).unwrap() > straight);
        assert!(summary.ratio(m).unwrap() < 1.0);
    }
}

#[test]
fn trace_series_shape() {
    let w = fixtures::single_feature_wall();
    let cfg = TraceConfig::default();
    let (series, summary) = tau_trace_experiment(&w, &cfg).unwrap();
    assert_eq!(series.len(), 6);
    assert_eq!(summary.series.len(), 6);
    let frames = (cfg.duration * cfg.camera.frame_rate).round() as usize + 1;
    for s in &series {
        assert_eq!(s.samples.len(), frames);
        match s.variant {
            Variant::Continuous => {
                assert!(s.samples.iter().all(|x| x.trusted && x.phase.is_none()))
            }
            Variant::SenseAct => {
                // The schedule runs in every maneuver; straight runs act with u = 0.
                assert!(s.samples.iter().any(|x| x.phase == Some(Phase::Act)));
                assert!(s
                    .samples
                    .iter()
                    .all(|x| x.trusted == (x.phase == Some(Phase::Sense))));
            }
        }
        let csv = s.to_csv();
        assert_eq!(csv.lines().count(), frames + 1);
    }
    // The geometric oracle is signed: it crosses zero at the transit.
    let straight = &series[0];
    assert!(straight.samples.first().unwrap().tau_geom > 0.0);
}

#[test]
fn same_seed_same_series() {
    let w = fixtures::single_feature_wall();
    let cfg = TraceConfig {
        seed: 3,
        ..TraceConfig::default()
    };
    assert_eq!(
        tau_trace_experiment(&w, &cfg).unwrap(),
        tau_trace_experiment(&w, &cfg).unwrap()
    );
}

#[test]
fn trace_needs_a_feature() {
    let w = taunav::World::open();
    assert!(tau_trace_experiment(&w, &TraceConfig::default()).is_err());
}
