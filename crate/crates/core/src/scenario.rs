//! Scenario configuration and world materialization.
//!
//! A scenario is described by a line-oriented `key=value` document:
//!
//! ```text
//! # anything after '#' is a comment
//! alpha=0.9
//! neighborhood_radius=100
//! node_class=mobile,36,mobile,11,600
//! node_class=stationary-long,4,stationary,22,120
//! ```
//!
//! Scalar keys: `num_mobile`, `num_stationary`, `map_width`, `map_height`,
//! `num_locations`, `neighborhood_radius`, `alpha`, `wait_time_mean`,
//! `trip_duration`, `sim_duration`, `rng_seed`, `hour_of_day_offset`.
//! Repeated `node_class=<name>,<count>,<mobile|stationary>,<radio_range>,<beacon_interval>`
//! lines replace the default class list as a whole. Keys that never appear
//! keep their [`cambridge_default`] value.
//!
//! Node ids are assigned densely: mobile nodes first (`0..num_mobile`, taking
//! the mobile classes in declaration order), then stationary nodes
//! (`num_mobile..num_nodes`, taking the stationary classes in order).

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::geom::Point;

/// One homogeneous group of nodes sharing a radio range and scan period.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeClass {
    pub name: String,
    pub count: usize,
    pub mobile: bool,
    /// Radio range in meters.
    pub radio_range: f64,
    /// Neighbor-scan period in seconds.
    pub beacon_interval: f64,
}

/// Full parameterization of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub num_mobile: usize,
    pub num_stationary: usize,
    /// Map extent in meters.
    pub map_width: f64,
    pub map_height: f64,
    /// Number of destination locations scattered over the map.
    pub num_locations: usize,
    /// Distance-decay scale in meters (the neighborhood radius).
    pub neighborhood_radius: f64,
    /// Blend between the distance term (alpha) and the popularity term
    /// (1 - alpha) when weighing destinations. Must lie in [0, 1].
    pub alpha: f64,
    /// Mean of the exponential wait-time distribution, seconds.
    pub wait_time_mean: f64,
    /// Fixed travel time between consecutive stops, seconds.
    pub trip_duration: f64,
    /// Experiment length in seconds.
    pub sim_duration: f64,
    pub rng_seed: u64,
    /// Wall-clock hour at experiment start, in [0, 24).
    pub hour_of_day_offset: f64,
    pub node_classes: Vec<NodeClass>,
}

/// Errors from parsing or validating a scenario document.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {reason}")]
    BadValue {
        line: usize,
        key: String,
        reason: String,
    },
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("line {line}: invalid `{key}`: {reason}")]
    InvalidAt {
        line: usize,
        key: String,
        reason: String,
    },
}

/// The Cambridge-style default scenario: 36 mobile and 18 stationary nodes
/// on a 2000 m x 2000 m map with 38 locations, exponential 30-minute waits,
/// alpha 0.9, a 100 m neighborhood radius, and an 11-day run.
pub fn cambridge_default() -> ScenarioConfig {
    ScenarioConfig {
        num_mobile: 36,
        num_stationary: 18,
        map_width: 2000.0,
        map_height: 2000.0,
        num_locations: 38,
        neighborhood_radius: 100.0,
        alpha: 0.9,
        wait_time_mean: 1800.0,
        trip_duration: 1.0,
        sim_duration: 950_400.0,
        rng_seed: 42,
        hour_of_day_offset: 0.0,
        node_classes: vec![
            NodeClass {
                name: "mobile".into(),
                count: 36,
                mobile: true,
                radio_range: 11.0,
                beacon_interval: 600.0,
            },
            NodeClass {
                name: "stationary-long".into(),
                count: 4,
                mobile: false,
                radio_range: 22.0,
                beacon_interval: 120.0,
            },
            NodeClass {
                name: "stationary-short-fast".into(),
                count: 2,
                mobile: false,
                radio_range: 11.0,
                beacon_interval: 360.0,
            },
            NodeClass {
                name: "stationary-short".into(),
                count: 12,
                mobile: false,
                radio_range: 11.0,
                beacon_interval: 600.0,
            },
        ],
    }
}

impl ScenarioConfig {
    pub fn num_nodes(&self) -> usize {
        self.num_mobile + self.num_stationary
    }

    pub fn is_mobile(&self, node_id: usize) -> bool {
        node_id < self.num_mobile
    }

    /// Per-node radio range, indexed by node id.
    pub fn radio_ranges(&self) -> Vec<f64> {
        self.expand_per_node(|c| c.radio_range)
    }

    /// Per-node beacon interval, indexed by node id.
    pub fn beacon_intervals(&self) -> Vec<f64> {
        self.expand_per_node(|c| c.beacon_interval)
    }

    fn expand_per_node(&self, f: impl Fn(&NodeClass) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_nodes());
        for class in self.node_classes.iter().filter(|c| c.mobile) {
            out.extend(std::iter::repeat_n(f(class), class.count));
        }
        for class in self.node_classes.iter().filter(|c| !c.mobile) {
            out.extend(std::iter::repeat_n(f(class), class.count));
        }
        out
    }

    /// Check every structural invariant. Errors name the offending key.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        fn invalid(key: &str, reason: impl Into<String>) -> ScenarioError {
            ScenarioError::Invalid {
                key: key.into(),
                reason: reason.into(),
            }
        }
        let positive: [(&str, f64); 5] = [
            ("map_width", self.map_width),
            ("map_height", self.map_height),
            ("neighborhood_radius", self.neighborhood_radius),
            ("wait_time_mean", self.wait_time_mean),
            ("sim_duration", self.sim_duration),
        ];
        for (key, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(invalid(key, format!("must be a positive number, got {v}")));
            }
        }
        if !self.trip_duration.is_finite() || self.trip_duration < 0.0 {
            return Err(invalid(
                "trip_duration",
                format!("must be >= 0, got {}", self.trip_duration),
            ));
        }
        if !self.alpha.is_finite() || !(0.0..=1.0).contains(&self.alpha) {
            return Err(invalid(
                "alpha",
                format!("must lie in [0, 1], got {}", self.alpha),
            ));
        }
        if !self.hour_of_day_offset.is_finite() || !(0.0..24.0).contains(&self.hour_of_day_offset) {
            return Err(invalid(
                "hour_of_day_offset",
                format!("must lie in [0, 24), got {}", self.hour_of_day_offset),
            ));
        }
        if self.num_stationary > self.num_locations {
            return Err(invalid(
                "num_stationary",
                format!(
                    "stationary nodes are placed at distinct locations; {} > {} locations",
                    self.num_stationary, self.num_locations
                ),
            ));
        }
        if self.num_mobile > 0 && self.num_locations == 0 {
            return Err(invalid(
                "num_locations",
                "mobile nodes need at least one location to travel to",
            ));
        }
        for class in &self.node_classes {
            if !class.radio_range.is_finite() || class.radio_range <= 0.0 {
                return Err(invalid(
                    "node_class",
                    format!("class `{}`: radio_range must be > 0", class.name),
                ));
            }
            if !class.beacon_interval.is_finite() || class.beacon_interval <= 0.0 {
                return Err(invalid(
                    "node_class",
                    format!("class `{}`: beacon_interval must be > 0", class.name),
                ));
            }
        }
        let mobile_total: usize = self
            .node_classes
            .iter()
            .filter(|c| c.mobile)
            .map(|c| c.count)
            .sum();
        if mobile_total != self.num_mobile {
            return Err(invalid(
                "node_class",
                format!(
                    "mobile class counts sum to {mobile_total}, but num_mobile is {}",
                    self.num_mobile
                ),
            ));
        }
        let stationary_total: usize = self
            .node_classes
            .iter()
            .filter(|c| !c.mobile)
            .map(|c| c.count)
            .sum();
        if stationary_total != self.num_stationary {
            return Err(invalid(
                "node_class",
                format!(
                    "stationary class counts sum to {stationary_total}, but num_stationary is {}",
                    self.num_stationary
                ),
            ));
        }
        Ok(())
    }

    /// Serialize to the `key=value` document format. `load_scenario` of the
    /// result reproduces this config exactly.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "num_mobile={}", self.num_mobile);
        let _ = writeln!(out, "num_stationary={}", self.num_stationary);
        let _ = writeln!(out, "map_width={}", self.map_width);
        let _ = writeln!(out, "map_height={}", self.map_height);
        let _ = writeln!(out, "num_locations={}", self.num_locations);
        let _ = writeln!(out, "neighborhood_radius={}", self.neighborhood_radius);
        let _ = writeln!(out, "alpha={}", self.alpha);
        let _ = writeln!(out, "wait_time_mean={}", self.wait_time_mean);
        let _ = writeln!(out, "trip_duration={}", self.trip_duration);
        let _ = writeln!(out, "sim_duration={}", self.sim_duration);
        let _ = writeln!(out, "rng_seed={}", self.rng_seed);
        let _ = writeln!(out, "hour_of_day_offset={}", self.hour_of_day_offset);
        for c in &self.node_classes {
            let _ = writeln!(
                out,
                "node_class={},{},{},{},{}",
                c.name,
                c.count,
                if c.mobile { "mobile" } else { "stationary" },
                c.radio_range,
                c.beacon_interval
            );
        }
        out
    }
}

/// Parse a scenario document. Unspecified keys keep the
/// [`cambridge_default`] value; the merged config is then validated.
pub fn load_scenario(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let mut config = cambridge_default();
    let mut classes_replaced = false;
    let mut key_lines: HashMap<String, usize> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ScenarioError::BadValue {
                line: line_no,
                key: line.to_string(),
                reason: "expected `key=value`".into(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        key_lines.insert(key.to_string(), line_no);
        match key {
            "num_mobile" => config.num_mobile = parse_value(key, value, line_no)?,
            "num_stationary" => config.num_stationary = parse_value(key, value, line_no)?,
            "map_width" => config.map_width = parse_value(key, value, line_no)?,
            "map_height" => config.map_height = parse_value(key, value, line_no)?,
            "num_locations" => config.num_locations = parse_value(key, value, line_no)?,
            "neighborhood_radius" => config.neighborhood_radius = parse_value(key, value, line_no)?,
            "alpha" => config.alpha = parse_value(key, value, line_no)?,
            "wait_time_mean" => config.wait_time_mean = parse_value(key, value, line_no)?,
            "trip_duration" => config.trip_duration = parse_value(key, value, line_no)?,
            "sim_duration" => config.sim_duration = parse_value(key, value, line_no)?,
            "rng_seed" => config.rng_seed = parse_value(key, value, line_no)?,
            "hour_of_day_offset" => config.hour_of_day_offset = parse_value(key, value, line_no)?,
            "node_class" => {
                if !classes_replaced {
                    config.node_classes.clear();
                    classes_replaced = true;
                }
                config.node_classes.push(parse_node_class(value, line_no)?);
            }
            _ => {
                return Err(ScenarioError::UnknownKey {
                    line: line_no,
                    key: key.to_string(),
                })
            }
        }
    }

    config.validate().map_err(|err| match err {
        ScenarioError::Invalid { key, reason } => match key_lines.get(&key) {
            Some(&line) => ScenarioError::InvalidAt { line, key, reason },
            None => ScenarioError::Invalid { key, reason },
        },
        other => other,
    })?;
    Ok(config)
}

fn parse_value<T: std::str::FromStr>(
    key: &str,
    value: &str,
    line: usize,
) -> Result<T, ScenarioError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ScenarioError::BadValue {
        line,
        key: key.to_string(),
        reason: e.to_string(),
    })
}

fn parse_node_class(value: &str, line: usize) -> Result<NodeClass, ScenarioError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(ScenarioError::BadValue {
            line,
            key: "node_class".into(),
            reason: format!(
                "expected `<name>,<count>,<mobile|stationary>,<radio_range>,<beacon_interval>`, got {} field(s)",
                parts.len()
            ),
        });
    }
    let mobile = match parts[2] {
        "mobile" => true,
        "stationary" => false,
        other => {
            return Err(ScenarioError::BadValue {
                line,
                key: "node_class".into(),
                reason: format!("mobility must be `mobile` or `stationary`, got `{other}`"),
            })
        }
    };
    Ok(NodeClass {
        name: parts[0].to_string(),
        count: parse_value("node_class", parts[1], line)?,
        mobile,
        radio_range: parse_value("node_class", parts[3], line)?,
        beacon_interval: parse_value("node_class", parts[4], line)?,
    })
}

/// The materialized geometry of a scenario: location points, per-mobile-node
/// home points, and the location index of each stationary node.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub locations: Vec<Point>,
    /// Home of mobile node `i` (which is also its initial position).
    pub homes: Vec<Point>,
    /// `stationary_placement[s]` is the location index of stationary node
    /// `num_mobile + s`. Indices are distinct.
    pub stationary_placement: Vec<usize>,
}

impl World {
    /// Position of stationary node `num_mobile + stationary_idx`.
    pub fn stationary_position(&self, stationary_idx: usize) -> Point {
        self.locations[self.stationary_placement[stationary_idx]]
    }
}

/// Draw a world for `config`: locations and homes uniform i.i.d. over the map
/// rectangle, stationary nodes assigned to distinct locations uniformly
/// without replacement. Deterministic for a fixed RNG state.
pub fn generate_world(config: &ScenarioConfig, rng: &mut impl Rng) -> World {
    fn point(config: &ScenarioConfig, rng: &mut impl Rng) -> Point {
        Point::new(
            rng.gen_range(0.0..=config.map_width),
            rng.gen_range(0.0..=config.map_height),
        )
    }
    let locations: Vec<Point> = (0..config.num_locations)
        .map(|_| point(config, rng))
        .collect();
    let homes: Vec<Point> = (0..config.num_mobile).map(|_| point(config, rng)).collect();
    let stationary_placement =
        rand::seq::index::sample(rng, config.num_locations, config.num_stationary).into_vec();
    World {
        locations,
        homes,
        stationary_placement,
    }
}
