//! Side-by-side CSV reports for `compare`: every metric as a two-series
//! table joined on a common x axis, plus a summary of curve distance and
//! feature deltas.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;

use swim_core::calibrate::{curve_distance, resample, thumb_rule_features};
use swim_core::metrics::{
    contact_count_matrix, contact_duration_ccdf, contacts_by_hour_of_day,
    contacts_per_hour_per_node, intercontact_ccdf, pair_probability, sorted_pair_curve, CcdfSeries,
    MetricsError, SortedPairCurve,
};
use swim_core::trace::ContactLog;

pub fn write_comparison(log_a: &ContactLog, log_b: &ContactLog, outdir: &Path) -> Result<()> {
    let curve_a = sorted_pair_curve(&pair_probability(&contact_count_matrix(log_a))?);
    let curve_b = sorted_pair_curve(&pair_probability(&contact_count_matrix(log_b))?);

    write(
        outdir,
        "pair_curve.csv",
        pair_curve_table(&curve_a, &curve_b),
    )?;
    write(
        outdir,
        "contact_duration_ccdf.csv",
        ccdf_table(
            &Some(contact_duration_ccdf(log_a)?),
            &Some(contact_duration_ccdf(log_b)?),
        ),
    )?;
    let intercontact_a = optional_ccdf(intercontact_ccdf(log_a))?;
    let intercontact_b = optional_ccdf(intercontact_ccdf(log_b))?;
    if intercontact_a.is_none() || intercontact_b.is_none() {
        eprintln!("warning: a trace has no repeat contacts; intercontact_ccdf.csv is sparse");
    }
    write(
        outdir,
        "intercontact_ccdf.csv",
        ccdf_table(&intercontact_a, &intercontact_b),
    )?;
    write(outdir, "hour_of_day.csv", hour_table(log_a, log_b))?;
    write(
        outdir,
        "contacts_per_hour_per_node.csv",
        histogram_table(log_a, log_b),
    )?;
    write(outdir, "summary.csv", summary_table(&curve_a, &curve_b)?)?;
    Ok(())
}

fn write(outdir: &Path, name: &str, contents: String) -> Result<()> {
    std::fs::write(outdir.join(name), contents)?;
    Ok(())
}

fn optional_ccdf(
    result: std::result::Result<CcdfSeries, MetricsError>,
) -> Result<Option<CcdfSeries>> {
    match result {
        Ok(series) => Ok(Some(series)),
        Err(MetricsError::NoRepeatContacts) => Ok(None),
        Err(other) => Err(other.into()),
    }
}

/// Pair curves joined on the quantile grid.
fn pair_curve_table(curve_a: &SortedPairCurve, curve_b: &SortedPairCurve) -> String {
    let resampled_a = resample(curve_a.values());
    let resampled_b = resample(curve_b.values());
    let mut out = String::from("quantile,value_a,value_b\n");
    let points = resampled_a.len();
    for (i, (a, b)) in resampled_a.iter().zip(&resampled_b).enumerate() {
        let q = i as f64 / points as f64;
        let _ = writeln!(out, "{q},{a},{b}");
    }
    out
}

/// CCDFs joined on the union of their x values with step interpolation.
/// A missing series leaves its column empty.
fn ccdf_table(series_a: &Option<CcdfSeries>, series_b: &Option<CcdfSeries>) -> String {
    let mut xs: BTreeSet<u64> = BTreeSet::new();
    for series in [series_a, series_b].into_iter().flatten() {
        // x values sit on the trace format's millisecond grid.
        xs.extend(
            series
                .points()
                .iter()
                .map(|p| (p.0 * 1000.0).round() as u64),
        );
    }
    let mut out = String::from("seconds,ccdf_a,ccdf_b\n");
    for x_ms in xs {
        let x = x_ms as f64 / 1000.0;
        // Distinct sample values are at least 1 ms apart; the epsilon only
        // absorbs the rounding slop of reconstructing x from the grid.
        let column = |series: &Option<CcdfSeries>| match series {
            Some(series) => series.value_at(x + 1e-6).to_string(),
            None => String::new(),
        };
        let _ = writeln!(out, "{x},{},{}", column(series_a), column(series_b));
    }
    out
}

fn hour_table(log_a: &ContactLog, log_b: &ContactLog) -> String {
    let buckets_a = contacts_by_hour_of_day(log_a, 0.0);
    let buckets_b = contacts_by_hour_of_day(log_b, 0.0);
    let mut out = String::from("hour,contacts_a,contacts_b\n");
    for hour in 0..24 {
        let _ = writeln!(out, "{hour},{},{}", buckets_a[hour], buckets_b[hour]);
    }
    out
}

fn histogram_table(log_a: &ContactLog, log_b: &ContactLog) -> String {
    let histogram_a = contacts_per_hour_per_node(log_a);
    let histogram_b = contacts_per_hour_per_node(log_b);
    let values: BTreeSet<u64> = histogram_a
        .keys()
        .chain(histogram_b.keys())
        .copied()
        .collect();
    let mut out = String::from("contacts,frequency_a,frequency_b\n");
    for value in values {
        let _ = writeln!(
            out,
            "{value},{},{}",
            histogram_a.get(&value).copied().unwrap_or(0),
            histogram_b.get(&value).copied().unwrap_or(0)
        );
    }
    out
}

/// Curve distance plus the thumb-rule features of both curves and their
/// deltas. Swapping the traces swaps the value columns and negates the
/// deltas; the distance row is symmetric.
fn summary_table(curve_a: &SortedPairCurve, curve_b: &SortedPairCurve) -> Result<String> {
    let distance = curve_distance(curve_a, curve_b);
    let features_a = thumb_rule_features(curve_a)?;
    let features_b = thumb_rule_features(curve_b)?;
    let mut out = String::from("quantity,value_a,value_b,delta\n");
    let _ = writeln!(out, "curve_distance,{distance},{distance},0");
    let mut row = |name: &str, a: f64, b: f64| {
        let _ = writeln!(out, "{name},{a},{b},{}", b - a);
    };
    row(
        "zero_fraction",
        features_a.zero_fraction,
        features_b.zero_fraction,
    );
    row("tail_max", features_a.tail_max, features_b.tail_max);
    row(
        "knee_index_fraction",
        features_a.knee_index_fraction,
        features_b.knee_index_fraction,
    );
    row(
        "tail_slope_ratio",
        features_a.tail_slope_ratio,
        features_b.tail_slope_ratio,
    );
    Ok(out)
}
