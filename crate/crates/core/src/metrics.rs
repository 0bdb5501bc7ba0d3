//! Comparison statistics over contact logs: the pairwise contact-count
//! matrix A, its normalization P, the sorted pair curve, duration and
//! inter-contact CCDFs, and the two hourly profiles. Each metric has a CSV
//! emitter; the CSV layouts are the interchange format of the CLI.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::trace::ContactLog;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no contacts in log")]
    NoContacts,
    #[error("no node pair has two or more contacts")]
    NoRepeatContacts,
    #[error("curve has {len} points, need at least {min}")]
    CurveTooShort { len: usize, min: usize },
}

/// N x N symmetric matrix of per-pair contact counts, zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactCountMatrix {
    n: usize,
    counts: Vec<u64>,
}

impl ContactCountMatrix {
    /// Wrap a raw row-major count matrix. Panics unless it is symmetric with
    /// a zero diagonal.
    pub fn from_counts(n: usize, counts: Vec<u64>) -> Self {
        assert_eq!(counts.len(), n * n);
        for i in 0..n {
            assert_eq!(counts[i * n + i], 0, "diagonal must be zero");
            for j in 0..n {
                assert_eq!(counts[i * n + j], counts[j * n + i], "must be symmetric");
            }
        }
        Self { n, counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.n + j]
    }

    /// Sum of the upper triangle (the Eq. 2 denominator).
    pub fn upper_triangle_sum(&self) -> u64 {
        let mut total = 0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                total += self.get(i, j);
            }
        }
        total
    }

    /// The same matrix with every count multiplied by `c`.
    pub fn scaled(&self, c: u64) -> Self {
        Self {
            n: self.n,
            counts: self.counts.iter().map(|&v| v * c).collect(),
        }
    }
}

/// N x N matrix of pairwise contact probabilities; the upper triangle sums
/// to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PairProbabilityMatrix {
    n: usize,
    probs: Vec<f64>,
}

impl PairProbabilityMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.probs[i * self.n + j]
    }
}

/// Ascending sort of the upper triangle of P; length N(N-1)/2.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedPairCurve {
    values: Vec<f64>,
}

impl SortedPairCurve {
    /// Wrap an already-sorted probability vector. Panics if the values are
    /// negative, decreasing, or do not sum to one.
    pub fn from_sorted_values(values: Vec<f64>) -> Self {
        assert!(
            values.windows(2).all(|w| w[0] <= w[1]),
            "curve must be non-decreasing"
        );
        assert!(
            values.iter().all(|&v| v >= 0.0),
            "curve must be non-negative"
        );
        let sum: f64 = values.iter().sum();
        assert!(
            values.is_empty() || (sum - 1.0).abs() < 1e-9,
            "curve must sum to 1, got {sum}"
        );
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Empirical complementary CDF: at each distinct sample value x, the
/// fraction of samples strictly greater than x.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfSeries {
    points: Vec<(f64, f64)>,
}

impl CcdfSeries {
    fn from_samples(mut samples: Vec<f64>) -> Self {
        samples.sort_by(f64::total_cmp);
        let n = samples.len() as f64;
        let mut points = Vec::new();
        let mut i = 0;
        while i < samples.len() {
            let x = samples[i];
            while i < samples.len() && samples[i] == x {
                i += 1;
            }
            points.push((x, (samples.len() - i) as f64 / n));
        }
        CcdfSeries { points }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Step evaluation: the fraction of samples strictly greater than `x`.
    pub fn value_at(&self, x: f64) -> f64 {
        match self.points.binary_search_by(|p| p.0.total_cmp(&x)) {
            Ok(i) => self.points[i].1,
            Err(0) => 1.0,
            Err(i) => self.points[i - 1].1,
        }
    }

    /// Largest sample value.
    pub fn max_x(&self) -> f64 {
        self.points.last().map(|p| p.0).unwrap_or(0.0)
    }
}

/// Count contacts per pair.
pub fn contact_count_matrix(log: &ContactLog) -> ContactCountMatrix {
    let n = log.num_nodes();
    let mut counts = vec![0u64; n * n];
    for r in log.records() {
        counts[r.a * n + r.b] += 1;
        counts[r.b * n + r.a] += 1;
    }
    ContactCountMatrix { n, counts }
}

/// Normalize A by its upper-triangle sum.
pub fn pair_probability(a: &ContactCountMatrix) -> Result<PairProbabilityMatrix, MetricsError> {
    let total = a.upper_triangle_sum();
    if total == 0 {
        return Err(MetricsError::NoContacts);
    }
    let probs = a.counts.iter().map(|&v| v as f64 / total as f64).collect();
    Ok(PairProbabilityMatrix { n: a.n, probs })
}

/// Sort the upper triangle of P ascending.
pub fn sorted_pair_curve(p: &PairProbabilityMatrix) -> SortedPairCurve {
    let mut values = Vec::with_capacity(p.n * (p.n.saturating_sub(1)) / 2);
    for i in 0..p.n {
        for j in (i + 1)..p.n {
            values.push(p.get(i, j));
        }
    }
    values.sort_by(f64::total_cmp);
    SortedPairCurve { values }
}

/// CCDF of contact durations.
pub fn contact_duration_ccdf(log: &ContactLog) -> Result<CcdfSeries, MetricsError> {
    if log.is_empty() {
        return Err(MetricsError::NoContacts);
    }
    Ok(CcdfSeries::from_samples(
        log.records().iter().map(|r| r.duration()).collect(),
    ))
}

/// CCDF of inter-contact times: for every pair with at least two records,
/// the gaps between the end of one contact and the start of the next,
/// pooled over all pairs.
pub fn intercontact_ccdf(log: &ContactLog) -> Result<CcdfSeries, MetricsError> {
    let mut gaps = Vec::new();
    let mut per_pair: BTreeMap<(usize, usize), &crate::trace::ContactRecord> = BTreeMap::new();
    for r in log.records() {
        if let Some(prev) = per_pair.insert(r.pair(), r) {
            gaps.push(r.t_start - prev.t_end);
        }
    }
    if gaps.is_empty() {
        return Err(MetricsError::NoRepeatContacts);
    }
    Ok(CcdfSeries::from_samples(gaps))
}

/// Hour grid length for a log: full hours covering the span (a partial last
/// hour counts as a whole cell), extended if a record starts right on the
/// final boundary.
fn hour_grid(log: &ContactLog) -> u64 {
    let mut hours = (log.span().1 / 3600.0).ceil() as u64;
    for r in log.records() {
        hours = hours.max((r.t_start / 3600.0).floor() as u64 + 1);
    }
    hours
}

/// Histogram of contacts per hour per node: for every (node, hour) cell,
/// count the records involving that node that start in that hour, then
/// report how often each count value occurs. Every contact credits both
/// endpoints.
pub fn contacts_per_hour_per_node(log: &ContactLog) -> BTreeMap<u64, u64> {
    let hours = hour_grid(log);
    let n = log.num_nodes();
    let mut cells: Vec<u64> = vec![0; n * hours as usize];
    for r in log.records() {
        let h = (r.t_start / 3600.0).floor() as usize;
        cells[r.a * hours as usize + h] += 1;
        cells[r.b * hours as usize + h] += 1;
    }
    let mut histogram = BTreeMap::new();
    for count in cells {
        *histogram.entry(count).or_insert(0) += 1;
    }
    histogram
}

/// Total contacts per hour of day. Each record lands in bucket
/// `(floor(t_start / 3600) + offset) mod 24`; `offset` is in hours.
pub fn contacts_by_hour_of_day(log: &ContactLog, offset: f64) -> [u64; 24] {
    let mut buckets = [0u64; 24];
    for r in log.records() {
        let hour = ((r.t_start / 3600.0).floor() + offset)
            .rem_euclid(24.0)
            .floor() as usize;
        buckets[hour.min(23)] += 1;
    }
    buckets
}

// --- CSV emitters -----------------------------------------------------------

pub fn pair_curve_csv(curve: &SortedPairCurve) -> String {
    let mut out = String::from("pair_index,probability\n");
    for (i, v) in curve.values().iter().enumerate() {
        let _ = writeln!(out, "{i},{v}");
    }
    out
}

pub fn ccdf_csv(series: &CcdfSeries) -> String {
    let mut out = String::from("seconds,ccdf\n");
    for (x, y) in series.points() {
        let _ = writeln!(out, "{x},{y}");
    }
    out
}

pub fn contacts_per_hour_csv(histogram: &BTreeMap<u64, u64>) -> String {
    let mut out =
        String::from("# every contact credits both endpoint nodes; cells are (node, hour)\n");
    out.push_str("contacts,frequency\n");
    for (value, freq) in histogram {
        let _ = writeln!(out, "{value},{freq}");
    }
    out
}

pub fn hour_of_day_csv(buckets: &[u64; 24]) -> String {
    let mut out = String::from("hour,contacts\n");
    for (hour, count) in buckets.iter().enumerate() {
        let _ = writeln!(out, "{hour},{count}");
    }
    out
}

pub fn pair_matrix_csv(p: &PairProbabilityMatrix) -> String {
    let mut out = String::new();
    let header: Vec<String> = (0..p.n()).map(|j| j.to_string()).collect();
    let _ = writeln!(out, "{}", header.join(","));
    for i in 0..p.n() {
        let row: Vec<String> = (0..p.n()).map(|j| p.get(i, j).to_string()).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}
