//! Canonical contact-log model and the whitespace-delimited trace format.
//!
//! One record per line, `a b t_start t_end`, with `#` comments, blank lines,
//! and extra trailing columns (ignored) allowed. Files written by
//! [`write_contact_trace`] begin with a self-describing header comment
//!
//! ```text
//! # nodes=<N> span=<t_min> <t_max>
//! ```
//!
//! When that header is present the node ids are taken verbatim (they must be
//! integers below `N`), so `parse(write(log)) == log` for every normalized
//! log. Foreign traces without it get their ids remapped densely to `0..N`
//! in first-appearance order and the span derived from the data.
//!
//! Normalization canonicalizes every log: timestamps are rounded to the
//! millisecond grid of the on-disk format, pairs are oriented `a < b`,
//! overlapping or touching records of a pair are merged, and records are
//! sorted by `(t_start, a, b)`.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

/// One pairwise contact interval. Always stored with `a < b` and
/// `t_start <= t_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactRecord {
    pub a: usize,
    pub b: usize,
    pub t_start: f64,
    pub t_end: f64,
}

impl ContactRecord {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.a, self.b)
    }
}

/// A normalized collection of contact records over `num_nodes` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactLog {
    records: Vec<ContactRecord>,
    num_nodes: usize,
    span: (f64, f64),
}

/// Errors from parsing a contact trace.
#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: node `{id}` is in contact with itself")]
    SelfContact { line: usize, id: String },
    #[error("line {line}: t_end precedes t_start")]
    ReversedInterval { line: usize },
}

/// Round to the millisecond grid used by the on-disk format.
fn round_ms(t: f64) -> f64 {
    (t * 1000.0).round() / 1000.0
}

impl ContactLog {
    /// Build a normalized log. `span` is expanded to cover all records; pass
    /// `None` to derive it from the records alone ((0, 0) when empty).
    ///
    /// Panics if a record references a node id `>= num_nodes`, pairs a node
    /// with itself, or runs backwards in time; the parsing and detection
    /// entry points validate their inputs before construction.
    pub fn new(
        num_nodes: usize,
        span: Option<(f64, f64)>,
        records: Vec<ContactRecord>,
    ) -> ContactLog {
        let mut per_pair: HashMap<(usize, usize), Vec<(f64, f64)>> = HashMap::new();
        for r in records {
            assert!(r.a != r.b, "self-contact in record {r:?}");
            let (a, b) = if r.a < r.b { (r.a, r.b) } else { (r.b, r.a) };
            assert!(b < num_nodes, "node id {b} out of range (N={num_nodes})");
            let (s, e) = (round_ms(r.t_start), round_ms(r.t_end));
            assert!(e >= s, "record runs backwards in time: {r:?}");
            per_pair.entry((a, b)).or_default().push((s, e));
        }

        let mut merged = Vec::new();
        for (&(a, b), intervals) in &mut per_pair {
            intervals.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let mut current: Option<(f64, f64)> = None;
            for &(s, e) in intervals.iter() {
                match current {
                    Some((cs, ce)) if s <= ce => current = Some((cs, ce.max(e))),
                    Some(done) => {
                        merged.push(record(a, b, done));
                        current = Some((s, e));
                    }
                    None => current = Some((s, e)),
                }
            }
            if let Some(done) = current {
                merged.push(record(a, b, done));
            }
        }
        merged.sort_by(|x, y| {
            x.t_start
                .total_cmp(&y.t_start)
                .then(x.a.cmp(&y.a))
                .then(x.b.cmp(&y.b))
        });

        let mut span = span
            .map(|(s, e)| (round_ms(s), round_ms(e)))
            .unwrap_or_else(|| {
                if merged.is_empty() {
                    (0.0, 0.0)
                } else {
                    (f64::INFINITY, f64::NEG_INFINITY)
                }
            });
        for r in &merged {
            span.0 = span.0.min(r.t_start);
            span.1 = span.1.max(r.t_end);
        }
        assert!(span.0 <= span.1, "span runs backwards");

        ContactLog {
            records: merged,
            num_nodes,
            span,
        }
    }

    pub fn records(&self) -> &[ContactRecord] {
        &self.records
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Experiment span `(t_min, t_max)`; covers every record.
    pub fn span(&self) -> (f64, f64) {
        self.span
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records of one pair, in time order.
    pub fn pair_records(&self, a: usize, b: usize) -> impl Iterator<Item = &ContactRecord> {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.records.iter().filter(move |r| r.pair() == (a, b))
    }
}

fn record(a: usize, b: usize, (s, e): (f64, f64)) -> ContactRecord {
    ContactRecord {
        a,
        b,
        t_start: s,
        t_end: e,
    }
}

/// Parse a contact trace document.
pub fn parse_contact_trace(text: &str) -> Result<ContactLog, TraceError> {
    let mut header: Option<(usize, f64, f64)> = None;
    let mut raw: Vec<(String, String, f64, f64, usize)> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.starts_with('#') {
            if header.is_none() {
                header = parse_header(trimmed);
            }
            continue;
        }
        let data = match trimmed.find('#') {
            Some(pos) => trimmed[..pos].trim(),
            None => trimmed,
        };
        if data.is_empty() {
            continue;
        }
        let fields: Vec<&str> = data.split_whitespace().collect();
        if fields.len() < 4 {
            return Err(TraceError::Malformed {
                line: line_no,
                reason: format!(
                    "expected `a b t_start t_end`, got {} field(s)",
                    fields.len()
                ),
            });
        }
        let t_start = parse_time(fields[2], line_no)?;
        let t_end = parse_time(fields[3], line_no)?;
        if fields[0] == fields[1] {
            return Err(TraceError::SelfContact {
                line: line_no,
                id: fields[0].to_string(),
            });
        }
        if t_end < t_start {
            return Err(TraceError::ReversedInterval { line: line_no });
        }
        raw.push((
            fields[0].to_string(),
            fields[1].to_string(),
            t_start,
            t_end,
            line_no,
        ));
    }

    let (num_nodes, span, records) = match header {
        Some((n, s0, s1)) => {
            let mut records = Vec::with_capacity(raw.len());
            for (a, b, s, e, line_no) in raw {
                let a = parse_declared_id(&a, n, line_no)?;
                let b = parse_declared_id(&b, n, line_no)?;
                records.push(ContactRecord {
                    a,
                    b,
                    t_start: s,
                    t_end: e,
                });
            }
            (n, Some((s0, s1)), records)
        }
        None => {
            let mut ids: HashMap<String, usize> = HashMap::new();
            let mut intern = |token: &str| {
                let next = ids.len();
                *ids.entry(token.to_string()).or_insert(next)
            };
            let mut records = Vec::with_capacity(raw.len());
            for (a, b, s, e, _) in &raw {
                let a = intern(a);
                let b = intern(b);
                records.push(ContactRecord {
                    a,
                    b,
                    t_start: *s,
                    t_end: *e,
                });
            }
            (ids.len(), None, records)
        }
    };

    Ok(ContactLog::new(num_nodes, span, records))
}

fn parse_time(token: &str, line: usize) -> Result<f64, TraceError> {
    let t: f64 = token.parse().map_err(|_| TraceError::Malformed {
        line,
        reason: format!("`{token}` is not a number"),
    })?;
    if !t.is_finite() {
        return Err(TraceError::Malformed {
            line,
            reason: format!("`{token}` is not a finite time"),
        });
    }
    Ok(t)
}

fn parse_declared_id(token: &str, n: usize, line: usize) -> Result<usize, TraceError> {
    let id: usize = token.parse().map_err(|_| TraceError::Malformed {
        line,
        reason: format!("node id `{token}` is not an integer (header declares nodes={n})"),
    })?;
    if id >= n {
        return Err(TraceError::Malformed {
            line,
            reason: format!("node id {id} out of range (header declares nodes={n})"),
        });
    }
    Ok(id)
}

/// Recognize the canonical `# nodes=<N> span=<t0> <t1>` header comment.
fn parse_header(line: &str) -> Option<(usize, f64, f64)> {
    let body = line.trim_start_matches('#').trim();
    let mut parts = body.split_whitespace();
    let n = parts.next()?.strip_prefix("nodes=")?.parse().ok()?;
    let s0 = parts.next()?.strip_prefix("span=")?.parse().ok()?;
    let s1 = parts.next()?.parse().ok()?;
    Some((n, s0, s1))
}

/// Serialize a log: header comment, then one `a b t_start t_end` line per
/// record with times to three decimal places, sorted by `(t_start, a, b)`.
pub fn write_contact_trace(log: &ContactLog) -> String {
    let (s0, s1) = log.span();
    let mut out = format!("# nodes={} span={:.3} {:.3}\n", log.num_nodes(), s0, s1);
    for r in log.records() {
        let _ = writeln!(out, "{} {} {:.3} {:.3}", r.a, r.b, r.t_start, r.t_end);
    }
    out
}
