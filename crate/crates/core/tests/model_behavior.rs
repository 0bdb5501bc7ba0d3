//! Statistical behavior of the mobility model and the calibration stack on
//! desk-scale runs: wait-time calibration, locality of destination choice,
//! the large-neighborhood degeneration toward uniform choice, and the
//! flatness ordering of the sorted pair curve.

use swim_core::calibrate::{alpha_sweep, curve_distance};
use swim_core::metrics::{contact_count_matrix, pair_probability, sorted_pair_curve};
use swim_core::mobility::{choose_destination, run_mobility, Cell, NodeState};
use swim_core::rng::rng_from_seed;
use swim_core::scenario::{cambridge_default, generate_world, NodeClass, ScenarioConfig};
use swim_core::simulate_contact_log;

/// Realized wait durations converge to the configured mean within 5% over
/// more than ten thousand waits.
#[test]
fn wait_times_match_the_configured_mean() {
    let mut config = cambridge_default();
    config.num_mobile = 4;
    config.num_stationary = 0;
    config.num_locations = 6;
    config.wait_time_mean = 50.0;
    config.trip_duration = 1.0;
    config.sim_duration = 200_000.0;
    config.node_classes = vec![NodeClass {
        name: "walkers".into(),
        count: 4,
        mobile: true,
        radio_range: 11.0,
        beacon_interval: 600.0,
    }];
    config.validate().unwrap();

    let world = generate_world(&config, &mut rng_from_seed(21));
    let timeline = run_mobility(&config, &world, &mut rng_from_seed(22));
    let mut total = 0usize;
    for node_intervals in &timeline.intervals {
        // The final interval is clipped by the end of the experiment.
        let waits: Vec<f64> = node_intervals[..node_intervals.len() - 1]
            .iter()
            .map(|interval| interval.t_end - interval.t_start)
            .collect();
        total += waits.len();
        let mean = waits.iter().sum::<f64>() / waits.len() as f64;
        let relative_error = (mean - config.wait_time_mean).abs() / config.wait_time_mean;
        assert!(
            relative_error < 0.05,
            "node mean {mean:.2} vs configured {} over {} waits ({relative_error:.3})",
            config.wait_time_mean,
            waits.len()
        );
    }
    assert!(total >= 10_000, "only {total} waits across the run");
}

fn near_home_fraction(alpha: f64, choices: usize) -> f64 {
    let config = cambridge_default();
    let r0 = config.neighborhood_radius;
    let mut rng = rng_from_seed(31);
    let world = generate_world(&config, &mut rng);
    let mut near = 0usize;
    let mut total = 0usize;
    let per_node = choices / config.num_mobile + 1;
    for m in 0..config.num_mobile {
        let mut node = NodeState::new(m, world.homes[m]);
        for _ in 0..per_node {
            let destination = choose_destination(&node, &world, alpha, r0, &mut rng);
            let position = match destination {
                Cell::Home => node.home,
                Cell::Location(i) => world.locations[i],
            };
            if node.home.distance(position) <= r0 {
                near += 1;
            }
            total += 1;
            node.current_cell = destination;
        }
    }
    near as f64 / total as f64
}

/// With a small neighborhood radius, alpha = 1 concentrates destinations
/// near home far more than alpha = 0 does.
#[test]
fn high_alpha_prefers_the_neighborhood() {
    let at_one = near_home_fraction(1.0, 2_000);
    let at_zero = near_home_fraction(0.0, 2_000);
    assert!(
        at_one > at_zero,
        "near-home fraction at alpha=1 ({at_one:.3}) should exceed alpha=0 ({at_zero:.3})"
    );
}

/// When the neighborhood radius dwarfs the map, the distance preference
/// vanishes and destinations become uniform over cells (the random-waypoint
/// degeneration, tested in the regime where it is statistically resolvable).
#[test]
fn huge_neighborhood_radius_makes_choices_uniform() {
    let config = cambridge_default();
    let diagonal = (config.map_width.powi(2) + config.map_height.powi(2)).sqrt();
    let r0 = 100.0 * diagonal;
    let mut rng = rng_from_seed(41);
    let world = generate_world(&config, &mut rng);
    let mut counts = vec![0u64; config.num_locations];
    for m in 0..config.num_mobile {
        let mut node = NodeState::new(m, world.homes[m]);
        for _ in 0..11_000 {
            let destination = choose_destination(&node, &world, 1.0, r0, &mut rng);
            if let Cell::Location(i) = destination {
                counts[i] += 1;
            }
            node.current_cell = destination;
        }
    }
    let total: u64 = counts.iter().sum();
    let uniform = total as f64 / config.num_locations as f64;
    let max_deviation = counts
        .iter()
        .map(|&c| (c as f64 - uniform).abs() / uniform)
        .fold(0.0, f64::max);
    assert!(
        max_deviation <= 0.10,
        "max per-cell relative deviation {max_deviation:.3} over {total} choices"
    );
}

fn mean_curve_features_at(alpha: f64, replications: usize) -> swim_core::calibrate::CurveFeatures {
    // Run a single-alpha sweep against an arbitrary target; the features of
    // the replication-averaged curve are what we are after.
    let mut target_config = cambridge_default();
    target_config.rng_seed = 5_050;
    let target_log = simulate_contact_log(&target_config, true);
    let target = sorted_pair_curve(&pair_probability(&contact_count_matrix(&target_log)).unwrap());
    let sweep = alpha_sweep(&cambridge_default(), &target, &[alpha], replications).unwrap();
    sweep.per_alpha[0].features
}

/// Low alpha produces a flatter curve: the tail-to-base slope ratio of the
/// replication-averaged curve grows with alpha.
#[test]
fn tail_slope_ratio_grows_with_alpha() {
    let low = mean_curve_features_at(0.1, 10);
    let high = mean_curve_features_at(0.9, 10);
    assert!(
        low.tail_slope_ratio < high.tail_slope_ratio,
        "slope ratio at alpha=0.1 ({}) should be below alpha=0.9 ({})",
        low.tail_slope_ratio,
        high.tail_slope_ratio
    );
}

/// A singleton sweep recommends its only alpha, and a repeated sweep with
/// the same seed is identical.
#[test]
fn sweep_is_deterministic_and_singleton_recommends_itself() {
    let mut config = cambridge_default();
    config.sim_duration = 86_400.0;
    let mut target_config = config.clone();
    target_config.alpha = 0.5;
    target_config.rng_seed = 999;
    let target_log = simulate_contact_log(&target_config, true);
    let target = sorted_pair_curve(&pair_probability(&contact_count_matrix(&target_log)).unwrap());

    let single = alpha_sweep(&config, &target, &[0.5], 2).unwrap();
    assert_eq!(single.recommended_alpha, 0.5);

    let a = alpha_sweep(&config, &target, &[0.2, 0.8], 3).unwrap();
    let b = alpha_sweep(&config, &target, &[0.2, 0.8], 3).unwrap();
    assert_eq!(a.recommended_alpha, b.recommended_alpha);
    for (x, y) in a.per_alpha.iter().zip(&b.per_alpha) {
        assert_eq!(x.distance, y.distance);
        assert_eq!(x.mean_curve, y.mean_curve);
    }
    assert_eq!(a.report_csv(), b.report_csv());
}

/// Sweep argument validation.
#[test]
fn sweep_rejects_bad_arguments() {
    let config = cambridge_default();
    let target_log = simulate_contact_log(
        &ScenarioConfig {
            sim_duration: 43_200.0,
            ..config.clone()
        },
        true,
    );
    let target = sorted_pair_curve(&pair_probability(&contact_count_matrix(&target_log)).unwrap());
    assert!(alpha_sweep(&config, &target, &[], 3).is_err());
    assert!(alpha_sweep(&config, &target, &[1.5], 3).is_err());
    assert!(alpha_sweep(&config, &target, &[0.5], 0).is_err());
}

/// Curves from the same alpha but different seeds are much closer to each
/// other than curves from distant alphas.
#[test]
fn curve_distance_separates_alphas() {
    let curve_at = |alpha: f64, seed: u64| {
        let mut config = cambridge_default();
        config.alpha = alpha;
        config.rng_seed = seed;
        let log = simulate_contact_log(&config, true);
        sorted_pair_curve(&pair_probability(&contact_count_matrix(&log)).unwrap())
    };
    let reference = curve_at(0.9, 1);
    let same_alpha = curve_at(0.9, 2);
    let far_alpha = curve_at(0.1, 3);
    let d_same = curve_distance(&reference, &same_alpha);
    let d_far = curve_distance(&reference, &far_alpha);
    assert!(
        d_same < d_far,
        "distance within alpha ({d_same:.6}) should undercut distance across alphas ({d_far:.6})"
    );
}
