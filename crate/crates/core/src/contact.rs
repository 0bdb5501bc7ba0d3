//! Contact detection over movement timelines, plus the beacon-sampling
//! measurement model that mimics how Bluetooth traces are collected.
//!
//! Two nodes are in contact while both sit still and their positions are
//! within `max(range_a, range_b)` — a sighting is logged if either device
//! can see the other. Beacon sampling then degrades the ground truth: node
//! `n` scans at times `k * beacon_interval(n)`, a contact is observed only
//! if some scan of either endpoint falls inside it, and the observed record
//! runs from the first such scan until one scan period past the last.

use std::collections::BTreeMap;

use crate::mobility::MovementTimeline;
use crate::trace::{ContactLog, ContactRecord};

/// Extract ground-truth contact intervals from a timeline. For each pair the
/// overlaps of their presence intervals at distance `<= max(range_a, range_b)`
/// are collected and merged where they touch.
pub fn detect_contacts(timeline: &MovementTimeline, radio_ranges: &[f64]) -> ContactLog {
    let n = timeline.num_nodes();
    assert_eq!(radio_ranges.len(), n, "one radio range per node");
    let mut records = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let range = radio_ranges[a].max(radio_ranges[b]);
            let (xs, ys) = (&timeline.intervals[a], &timeline.intervals[b]);
            let (mut i, mut j) = (0, 0);
            while i < xs.len() && j < ys.len() {
                let (x, y) = (&xs[i], &ys[j]);
                let start = x.t_start.max(y.t_start);
                let end = x.t_end.min(y.t_end);
                if start <= end && x.position.distance(y.position) <= range {
                    records.push(ContactRecord {
                        a,
                        b,
                        t_start: start,
                        t_end: end,
                    });
                }
                if x.t_end < y.t_end {
                    i += 1;
                } else {
                    j += 1;
                }
            }
        }
    }
    ContactLog::new(n, Some((0.0, timeline.sim_duration)), records)
}

/// First and last scan times of a `period`-scanner inside `[s, e]`, if any.
/// Scans happen at `k * period`, `k = 0, 1, 2, ...`.
fn scans_within(s: f64, e: f64, period: f64) -> Option<(f64, f64)> {
    debug_assert!(period > 0.0);
    let mut k0 = (s / period).ceil();
    if k0 >= 1.0 && (k0 - 1.0) * period >= s {
        k0 -= 1.0;
    }
    let mut k1 = (e / period).floor();
    if (k1 + 1.0) * period <= e {
        k1 += 1.0;
    }
    (k0 <= k1).then_some((k0 * period, k1 * period))
}

/// Degrade a ground-truth log through periodic neighbor scans.
///
/// A contact `[s, e]` of pair `(a, b)` is observed iff a scan of `a` or `b`
/// lies in `[s, e]`. The observation starts at the earliest such scan and
/// ends one scan period after the latest (taken from the scanner that made
/// it), clipped to `experiment_end`. Observed contacts of a pair separated
/// by a gap of at most `max(beacon_a, beacon_b)` are merged, mirroring how
/// trace collection cannot distinguish a short break from a missed scan.
pub fn quantize_to_beacons(
    log: &ContactLog,
    beacon_intervals: &[f64],
    experiment_end: f64,
) -> ContactLog {
    assert_eq!(
        beacon_intervals.len(),
        log.num_nodes(),
        "one beacon interval per node"
    );
    let mut per_pair: BTreeMap<(usize, usize), Vec<(f64, f64)>> = BTreeMap::new();
    for r in log.records() {
        if let Some(obs) = observe(r, beacon_intervals, experiment_end) {
            per_pair.entry(r.pair()).or_default().push(obs);
        }
    }

    let mut records = Vec::new();
    for ((a, b), observations) in per_pair {
        let merge_gap = beacon_intervals[a].max(beacon_intervals[b]);
        let mut current: Option<(f64, f64)> = None;
        for (s, e) in observations {
            match current {
                Some((cs, ce)) if s - ce <= merge_gap => current = Some((cs, ce.max(e))),
                Some((cs, ce)) => {
                    records.push(ContactRecord {
                        a,
                        b,
                        t_start: cs,
                        t_end: ce,
                    });
                    current = Some((s, e));
                }
                None => current = Some((s, e)),
            }
        }
        if let Some((cs, ce)) = current {
            records.push(ContactRecord {
                a,
                b,
                t_start: cs,
                t_end: ce,
            });
        }
    }
    ContactLog::new(log.num_nodes(), Some(log.span()), records)
}

/// Observe one ground-truth record through the two endpoints' scanners.
fn observe(r: &ContactRecord, beacon_intervals: &[f64], experiment_end: f64) -> Option<(f64, f64)> {
    let scans_a = scans_within(r.t_start, r.t_end, beacon_intervals[r.a]);
    let scans_b = scans_within(r.t_start, r.t_end, beacon_intervals[r.b]);
    let (first, last, last_period) = match (scans_a, scans_b) {
        (None, None) => return None,
        (Some((fa, la)), None) => (fa, la, beacon_intervals[r.a]),
        (None, Some((fb, lb))) => (fb, lb, beacon_intervals[r.b]),
        (Some((fa, la)), Some((fb, lb))) => {
            // The observation ends a scan period after the latest sighting;
            // on a tie the longer period wins (visibility is assumed until
            // the next missed scan).
            let (last, period) = if la > lb {
                (la, beacon_intervals[r.a])
            } else if lb > la {
                (lb, beacon_intervals[r.b])
            } else {
                (la, beacon_intervals[r.a].max(beacon_intervals[r.b]))
            };
            (fa.min(fb), last, period)
        }
    };
    Some((first, (last + last_period).min(experiment_end)))
}
