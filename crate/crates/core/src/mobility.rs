//! Event-driven execution of the SWIM mobility model.
//!
//! Every mobile node owns a fixed home point and walks between the world's
//! locations and its home. A destination cell `C` is drawn with probability
//! proportional to
//!
//! ```text
//! w(C) = alpha * decay(|home - center(C)|) + (1 - alpha) * seen_norm(C)
//! ```
//!
//! where `decay(d) = 1 / (1 + d/r0)^2` with `r0` the neighborhood radius,
//! and `seen_norm(C) = seen(C) / (1 + total seen)` is the node's own count
//! of encounters at `C`, normalized so both terms stay commensurate. High
//! alpha keeps a node near home; low alpha sends it to popular cells.
//!
//! A node waits at each stop for an exponential time, then travels for
//! exactly `trip_duration` seconds (so speed equals the trip distance).
//! Nodes in transit have no position and meet nobody. The run produces a
//! piecewise-constant presence timeline per node; stationary nodes
//! contribute one full-span interval at their assigned location.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_distr::Exp;

use crate::geom::Point;
use crate::rng::SimRng;
use crate::scenario::{ScenarioConfig, World};

/// A destination: one of the world's locations, or the node's own home.
/// The home acts as a regular cell centered on the home point, with its own
/// seen count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cell {
    Home,
    Location(usize),
}

/// Per-node mobility state: home anchor, current cell, and the sparse map of
/// encounter counts for cells the node has visited. Unvisited cells simply
/// contribute `seen(C) = 0`.
#[derive(Debug, Clone)]
pub struct NodeState {
    pub node_id: usize,
    pub home: Point,
    pub current_cell: Cell,
    seen: BTreeMap<Cell, u64>,
}

impl NodeState {
    pub fn new(node_id: usize, home: Point) -> Self {
        Self {
            node_id,
            home,
            current_cell: Cell::Home,
            seen: BTreeMap::new(),
        }
    }

    /// Record an arrival at `cell` together with the number of other nodes
    /// found within radio range at that instant. Marks the cell visited even
    /// when nobody was met.
    pub fn update_seen(&mut self, cell: Cell, encountered: u64) {
        *self.seen.entry(cell).or_insert(0) += encountered;
    }

    pub fn seen(&self, cell: Cell) -> u64 {
        self.seen.get(&cell).copied().unwrap_or(0)
    }

    pub fn total_seen(&self) -> u64 {
        self.seen.values().sum()
    }

    /// `seen(cell) / (1 + total seen)`, the popularity term of the weight.
    pub fn seen_norm(&self, cell: Cell) -> f64 {
        self.seen(cell) as f64 / (1.0 + self.total_seen() as f64)
    }
}

/// Distance attractiveness: `1 / (1 + d/r0)^2`. Equals 1 at the home point
/// and falls to 1/4 at `d = r0`.
pub fn distance_decay(d: f64, r0: f64) -> f64 {
    debug_assert!(d >= 0.0 && r0 > 0.0);
    let x = 1.0 + d / r0;
    1.0 / (x * x)
}

fn cell_center(node: &NodeState, cell: Cell, world: &World) -> Point {
    match cell {
        Cell::Home => node.home,
        Cell::Location(i) => world.locations[i],
    }
}

/// Weight the node assigns to `cell`; see the module docs for the formula.
pub fn cell_weight(node: &NodeState, cell: Cell, world: &World, alpha: f64, r0: f64) -> f64 {
    let center = cell_center(node, cell, world);
    let distance_term = distance_decay(node.home.distance(center), r0);
    alpha * distance_term + (1.0 - alpha) * node.seen_norm(cell)
}

/// Draw the next destination among all location cells plus home, excluding
/// the current cell, with probability proportional to [`cell_weight`]. Falls
/// back to a uniform draw when every candidate has weight zero (possible
/// only at alpha = 0 with nothing seen yet).
pub fn choose_destination(
    node: &NodeState,
    world: &World,
    alpha: f64,
    r0: f64,
    rng: &mut SimRng,
) -> Cell {
    let mut candidates = Vec::with_capacity(world.locations.len() + 1);
    if node.current_cell != Cell::Home {
        candidates.push(Cell::Home);
    }
    for i in 0..world.locations.len() {
        if node.current_cell != Cell::Location(i) {
            candidates.push(Cell::Location(i));
        }
    }
    assert!(
        !candidates.is_empty(),
        "node {} has nowhere to go (no locations)",
        node.node_id
    );
    let weights: Vec<f64> = candidates
        .iter()
        .map(|&c| cell_weight(node, c, world, alpha, r0))
        .collect();
    match WeightedIndex::new(&weights) {
        Ok(dist) => candidates[dist.sample(rng)],
        Err(_) => candidates[rng.gen_range(0..candidates.len())],
    }
}

/// A stretch of time during which a node sits still at `position`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresenceInterval {
    pub node_id: usize,
    pub position: Point,
    pub t_start: f64,
    pub t_end: f64,
}

/// Per-node presence intervals over the experiment span `[0, sim_duration]`.
/// Intervals of one node are disjoint and time-ordered, with gaps of exactly
/// `trip_duration` between consecutive stops.
#[derive(Debug, Clone, PartialEq)]
pub struct MovementTimeline {
    pub intervals: Vec<Vec<PresenceInterval>>,
    pub sim_duration: f64,
}

impl MovementTimeline {
    pub fn num_nodes(&self) -> usize {
        self.intervals.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Event {
    time: f64,
    node: usize,
    kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    Depart,
    Arrive(Cell),
}

impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.node.cmp(&other.node))
            .then(self.kind.cmp(&other.kind))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Run the mobility model. Mobile nodes start at their homes at t = 0; the
/// returned timeline is fully determined by `(config, world, rng state)`.
pub fn run_mobility(config: &ScenarioConfig, world: &World, rng: &mut SimRng) -> MovementTimeline {
    let n = config.num_nodes();
    let ranges = config.radio_ranges();
    let mut intervals: Vec<Vec<PresenceInterval>> = vec![Vec::new(); n];

    // Stationary nodes sit at their location for the whole run.
    let mut positions: Vec<Option<Point>> = vec![None; n];
    for s in 0..config.num_stationary {
        let id = config.num_mobile + s;
        let pos = world.stationary_position(s);
        positions[id] = Some(pos);
        intervals[id].push(PresenceInterval {
            node_id: id,
            position: pos,
            t_start: 0.0,
            t_end: config.sim_duration,
        });
    }

    let wait_dist = Exp::new(1.0 / config.wait_time_mean).expect("wait_time_mean > 0");
    let mut nodes: Vec<NodeState> = (0..config.num_mobile)
        .map(|m| NodeState::new(m, world.homes[m]))
        .collect();
    let mut open_start: Vec<f64> = vec![0.0; config.num_mobile];
    let mut heap: BinaryHeap<Reverse<Event>> = BinaryHeap::new();

    // t = 0: everyone is placed first, then arrivals are processed in node
    // order, so simultaneous initial encounters are counted symmetrically.
    positions[..config.num_mobile]
        .iter_mut()
        .zip(&world.homes)
        .for_each(|(slot, home)| *slot = Some(*home));
    for m in 0..config.num_mobile {
        let encountered = others_in_range(&positions, m, ranges[m]);
        nodes[m].update_seen(Cell::Home, encountered);
        let wait: f64 = wait_dist.sample(rng);
        heap.push(Reverse(Event {
            time: wait,
            node: m,
            kind: EventKind::Depart,
        }));
    }

    while let Some(Reverse(event)) = heap.pop() {
        if event.time >= config.sim_duration {
            break;
        }
        let m = event.node;
        match event.kind {
            EventKind::Depart => {
                let position = positions[m].expect("departing node must be present");
                intervals[m].push(PresenceInterval {
                    node_id: m,
                    position,
                    t_start: open_start[m],
                    t_end: event.time,
                });
                positions[m] = None;
                let dest = choose_destination(
                    &nodes[m],
                    world,
                    config.alpha,
                    config.neighborhood_radius,
                    rng,
                );
                heap.push(Reverse(Event {
                    time: event.time + config.trip_duration,
                    node: m,
                    kind: EventKind::Arrive(dest),
                }));
            }
            EventKind::Arrive(dest) => {
                let position = cell_center(&nodes[m], dest, world);
                nodes[m].current_cell = dest;
                positions[m] = Some(position);
                let encountered = others_in_range(&positions, m, ranges[m]);
                nodes[m].update_seen(dest, encountered);
                open_start[m] = event.time;
                let wait: f64 = wait_dist.sample(rng);
                heap.push(Reverse(Event {
                    time: event.time + wait,
                    node: m,
                    kind: EventKind::Depart,
                }));
            }
        }
    }

    // Close intervals still open at the end of the experiment. Nodes in
    // transit at sim_duration simply never arrive.
    for m in 0..config.num_mobile {
        if let Some(position) = positions[m] {
            intervals[m].push(PresenceInterval {
                node_id: m,
                position,
                t_start: open_start[m],
                t_end: config.sim_duration,
            });
        }
    }

    MovementTimeline {
        intervals,
        sim_duration: config.sim_duration,
    }
}

/// Number of other nodes whose current position lies within `range` of
/// node `m`. Nodes in transit have no position and are not counted.
fn others_in_range(positions: &[Option<Point>], m: usize, range: f64) -> u64 {
    let own = positions[m].expect("node must be present to look around");
    positions
        .iter()
        .enumerate()
        .filter(|&(j, p)| j != m && matches!(p, Some(q) if own.distance(*q) <= range))
        .count() as u64
}
