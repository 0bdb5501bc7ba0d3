//! Simulation and analysis toolkit for SWIM-style human mobility.
//!
//! The crate covers the full loop of working with pairwise contact data:
//!
//! * [`scenario`] — scenario configuration documents and world generation;
//! * [`mobility`] — the SWIM mobility model itself, run as a deterministic
//!   event-driven simulation;
//! * [`contact`] — geometric contact detection and the beacon-sampling
//!   measurement model;
//! * [`trace`] — the canonical contact-log type plus the whitespace trace
//!   format shared with real-world Bluetooth sighting dumps;
//! * [`metrics`] — pairwise contact probability matrices, sorted pair
//!   curves, duration and inter-contact CCDFs, hourly activity profiles;
//! * [`calibrate`] — curve features, curve distance, and the alpha sweep
//!   that matches a simulated scenario to a target trace.
//!
//! Everything is deterministic for a fixed `(config, seed)`.

pub mod calibrate;
pub mod contact;
pub mod geom;
pub mod metrics;
pub mod mobility;
pub mod rng;
pub mod scenario;
pub mod trace;

use contact::{detect_contacts, quantize_to_beacons};
use mobility::{run_mobility, MovementTimeline};
use rng::rng_from_seed;
use scenario::{generate_world, ScenarioConfig, World};
use trace::ContactLog;

/// Generate the world and run the mobility model for `config`, using
/// `config.rng_seed`.
pub fn run_simulation(config: &ScenarioConfig) -> (World, MovementTimeline) {
    let mut rng = rng_from_seed(config.rng_seed);
    let world = generate_world(config, &mut rng);
    let timeline = run_mobility(config, &world, &mut rng);
    (world, timeline)
}

/// The full simulate -> detect -> (optionally) beacon-sample pipeline.
/// With `beacon_sampled` the contacts are degraded the way periodic
/// neighbor scans would record them, which is how real traces are
/// collected; without it the geometric ground truth is returned.
pub fn simulate_contact_log(config: &ScenarioConfig, beacon_sampled: bool) -> ContactLog {
    let (_, timeline) = run_simulation(config);
    let ground_truth = detect_contacts(&timeline, &config.radio_ranges());
    if beacon_sampled {
        quantize_to_beacons(
            &ground_truth,
            &config.beacon_intervals(),
            config.sim_duration,
        )
    } else {
        ground_truth
    }
}
