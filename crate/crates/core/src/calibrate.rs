//! Alpha calibration: curve features behind the graphical thumb rule, a
//! quantile-resampled L1 distance between sorted pair curves, and the sweep
//! that recommends the alpha whose simulated curve best matches a target.
//!
//! The thumb rule reads a sorted pair curve like this: a flat curve (no
//! sudden rise) wants a low alpha, a long zero run followed by a steep tail
//! wants a high one. The features quantify exactly that so a recommendation
//! is reproducible, while the full per-alpha profile is reported so the
//! graphical judgement stays possible.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::metrics::{
    contact_count_matrix, pair_probability, sorted_pair_curve, MetricsError, SortedPairCurve,
};
use crate::rng::derive_seed;
use crate::scenario::ScenarioConfig;
use crate::simulate_contact_log;

/// Number of quantile positions curves are resampled to before averaging
/// and distance computation.
pub const RESAMPLE_POINTS: usize = 1001;

/// Minimum curve length for feature extraction.
pub const MIN_CURVE_LEN: usize = 10;

#[derive(Debug, Error)]
pub enum CalibrateError {
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("bad sweep arguments: {0}")]
    BadArguments(String),
}

/// Shape descriptors of a sorted pair curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveFeatures {
    /// Share of pairs that never met (value exactly zero).
    pub zero_fraction: f64,
    /// Largest value of the curve.
    pub tail_max: f64,
    /// First index whose value exceeds twice the curve mean, as a fraction
    /// of the curve length; 1 when no value does (a flat curve).
    pub knee_index_fraction: f64,
    /// Mean slope of the top decile divided by the mean slope below the
    /// knee. 0 for a flat tail; +inf when the tail rises out of a perfectly
    /// flat base.
    pub tail_slope_ratio: f64,
}

/// Compute the thumb-rule features of a curve with at least
/// [`MIN_CURVE_LEN`] points.
pub fn thumb_rule_features(curve: &SortedPairCurve) -> Result<CurveFeatures, CalibrateError> {
    if curve.len() < MIN_CURVE_LEN {
        return Err(CalibrateError::Metrics(MetricsError::CurveTooShort {
            len: curve.len(),
            min: MIN_CURVE_LEN,
        }));
    }
    Ok(features_of(curve.values()))
}

fn features_of(values: &[f64]) -> CurveFeatures {
    let len = values.len();
    debug_assert!(len >= 2);
    let mean = values.iter().sum::<f64>() / len as f64;
    let zero_fraction = values.iter().filter(|&&v| v == 0.0).count() as f64 / len as f64;
    let tail_max = *values.last().expect("non-empty");

    let knee = values.iter().position(|&v| v > 2.0 * mean).unwrap_or(len);
    let knee_index_fraction = knee as f64 / len as f64;

    let decile = (len / 10).max(1);
    let top_slope = (values[len - 1] - values[len - 1 - decile]) / decile as f64;

    // Mean slope of the region below the knee: indices [0, knee), or the
    // whole curve when there is no knee. A sub-knee region of fewer than two
    // points has no slope.
    let base_end = if knee == len { len - 1 } else { knee - 1 };
    let base_slope = if base_end == 0 {
        0.0
    } else {
        (values[base_end] - values[0]) / base_end as f64
    };

    let tail_slope_ratio = if top_slope == 0.0 {
        0.0
    } else if base_slope == 0.0 {
        f64::INFINITY
    } else {
        top_slope / base_slope
    };

    CurveFeatures {
        zero_fraction,
        tail_max,
        knee_index_fraction,
        tail_slope_ratio,
    }
}

/// Resample a curve at [`RESAMPLE_POINTS`] quantile positions by
/// nearest-index lookup, so curves of different lengths become comparable.
pub fn resample(values: &[f64]) -> Vec<f64> {
    assert!(!values.is_empty(), "cannot resample an empty curve");
    let last = values.len() - 1;
    (0..RESAMPLE_POINTS)
        .map(|i| {
            let q = i as f64 / RESAMPLE_POINTS as f64;
            values[(q * last as f64).round() as usize]
        })
        .collect()
}

fn distance_resampled(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

/// Mean absolute difference between two curves after quantile resampling.
/// Symmetric, and zero exactly when the resampled curves coincide.
pub fn curve_distance(c1: &SortedPairCurve, c2: &SortedPairCurve) -> f64 {
    distance_resampled(&resample(c1.values()), &resample(c2.values()))
}

/// Outcome of simulating one alpha value.
#[derive(Debug, Clone)]
pub struct AlphaResult {
    pub alpha: f64,
    /// Pointwise mean of the replications' resampled sorted curves.
    pub mean_curve: Vec<f64>,
    /// Distance between the mean curve and the target.
    pub distance: f64,
    /// Features of the mean curve.
    pub features: CurveFeatures,
}

/// Full sweep outcome.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub per_alpha: Vec<AlphaResult>,
    /// The alpha attaining the minimum distance; ties go to the smaller
    /// alpha.
    pub recommended_alpha: f64,
}

impl SweepResult {
    /// `sweep_report.csv` body: one row per alpha.
    pub fn report_csv(&self) -> String {
        let mut out = String::from(
            "alpha,distance,zero_fraction,tail_max,knee_index_fraction,tail_slope_ratio\n",
        );
        for r in &self.per_alpha {
            let f = r.features;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.alpha,
                r.distance,
                f.zero_fraction,
                f.tail_max,
                f.knee_index_fraction,
                f.tail_slope_ratio
            );
        }
        out
    }
}

/// `pair_curve_alpha_<alpha>.csv` body for one mean curve.
pub fn mean_curve_csv(mean_curve: &[f64]) -> String {
    let mut out = String::from("quantile,probability\n");
    for (i, v) in mean_curve.iter().enumerate() {
        let q = i as f64 / RESAMPLE_POINTS as f64;
        let _ = writeln!(out, "{q},{v}");
    }
    out
}

/// The default sweep grid {0.0, 0.1, ..., 1.0}.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// Default number of replications per alpha.
pub const DEFAULT_REPLICATIONS: usize = 10;

/// Simulate every alpha in `alphas` with `replications` independent runs
/// (seed streams derived from `config.rng_seed` and the replication index,
/// shared across alphas so the comparison is paired), average the resampled
/// sorted curves, and rank the alphas by distance to `target`.
pub fn alpha_sweep(
    config: &ScenarioConfig,
    target: &SortedPairCurve,
    alphas: &[f64],
    replications: usize,
) -> Result<SweepResult, CalibrateError> {
    if alphas.is_empty() {
        return Err(CalibrateError::BadArguments("no alpha values given".into()));
    }
    if let Some(bad) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(CalibrateError::BadArguments(format!(
            "alpha {bad} outside [0, 1]"
        )));
    }
    if replications == 0 {
        return Err(CalibrateError::BadArguments(
            "need at least one replication".into(),
        ));
    }
    if target.is_empty() {
        return Err(CalibrateError::BadArguments("target curve is empty".into()));
    }

    let target_resampled = resample(target.values());
    let per_alpha: Vec<AlphaResult> = alphas
        .par_iter()
        .map(|&alpha| -> Result<AlphaResult, CalibrateError> {
            let mut run_config = config.clone();
            run_config.alpha = alpha;
            let mut mean_curve = vec![0.0; RESAMPLE_POINTS];
            for rep in 0..replications {
                run_config.rng_seed = derive_seed(config.rng_seed, rep as u64);
                let log = simulate_contact_log(&run_config, true);
                let curve = sorted_pair_curve(&pair_probability(&contact_count_matrix(&log))?);
                for (acc, v) in mean_curve.iter_mut().zip(resample(curve.values())) {
                    *acc += v;
                }
            }
            for v in &mut mean_curve {
                *v /= replications as f64;
            }
            let distance = distance_resampled(&mean_curve, &target_resampled);
            let features = features_of(&mean_curve);
            Ok(AlphaResult {
                alpha,
                mean_curve,
                distance,
                features,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let recommended_alpha = per_alpha
        .iter()
        .map(|r| (r.distance, r.alpha))
        .min_by(|a, b| a.partial_cmp(b).expect("distances are finite"))
        .expect("non-empty")
        .1;

    Ok(SweepResult {
        per_alpha,
        recommended_alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve(values: Vec<f64>) -> SortedPairCurve {
        SortedPairCurve::from_sorted_values(values)
    }

    #[test]
    fn flat_curve_has_no_knee_and_zero_ratio() {
        // 10 equal values (n = 5 pairs -> use 10 = C(5,2)).
        let c = curve(vec![0.1; 10]);
        let f = thumb_rule_features(&c).unwrap();
        assert_eq!(f.zero_fraction, 0.0);
        assert_eq!(f.knee_index_fraction, 1.0);
        assert_eq!(f.tail_slope_ratio, 0.0);
        assert_eq!(f.tail_max, 0.1);
    }

    #[test]
    fn half_zero_curve_reports_half() {
        let mut values = vec![0.0; 5];
        values.extend([0.1, 0.1, 0.2, 0.2, 0.4]);
        let f = thumb_rule_features(&curve(values)).unwrap();
        assert_eq!(f.zero_fraction, 0.5);
    }

    #[test]
    fn worked_feature_example() {
        let c = curve(vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.1, 0.1, 0.1, 0.2, 0.5]);
        let f = thumb_rule_features(&c).unwrap();
        assert_eq!(f.zero_fraction, 0.5);
        assert_eq!(f.tail_max, 0.5);
        // mean 0.1, first value > 0.2 sits at index 9 of 10.
        assert_eq!(f.knee_index_fraction, 0.9);
        // top decile slope (0.5 - 0.2) / 1; base slope (0.2 - 0.0) / 8.
        assert!(
            (f.tail_slope_ratio - 12.0).abs() < 1e-12,
            "{}",
            f.tail_slope_ratio
        );
    }

    #[test]
    fn rising_tail_over_flat_base_is_infinite() {
        let c = curve(vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let f = thumb_rule_features(&c).unwrap();
        assert_eq!(f.tail_slope_ratio, f64::INFINITY);
    }

    #[test]
    fn short_curves_are_rejected() {
        let c = curve(vec![0.2, 0.3, 0.5]); // length 3 = C(3,2)
        assert!(thumb_rule_features(&c).is_err());
    }

    #[test]
    fn distance_of_identical_curves_is_zero() {
        let c = curve(vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.1, 0.1, 0.1, 0.2, 0.5]);
        assert_eq!(curve_distance(&c, &c), 0.0);
    }

    #[test]
    fn quantile_alignment_bridges_different_lengths() {
        // Same shape at different lengths: half zeros, half at the top.
        let short = resample(&[0.0, 1.0]);
        let long = resample(&[0.0, 0.0, 1.0, 1.0]);
        assert_eq!(distance_resampled(&short, &long), 0.0);
    }

    #[test]
    fn mean_absolute_difference_is_exact_on_constants() {
        let a = resample(&[0.0, 0.0]);
        let b = resample(&[0.5, 0.5]);
        assert_eq!(distance_resampled(&a, &b), 0.5);
    }

    proptest! {
        #[test]
        fn distance_is_a_metric_on_resampled_vectors(
            x in proptest::collection::vec(0.0f64..1.0, 3..40),
            y in proptest::collection::vec(0.0f64..1.0, 3..40),
            z in proptest::collection::vec(0.0f64..1.0, 3..40),
        ) {
            let (mut x, mut y, mut z) = (x, y, z);
            x.sort_by(f64::total_cmp);
            y.sort_by(f64::total_cmp);
            z.sort_by(f64::total_cmp);
            let (rx, ry, rz) = (resample(&x), resample(&y), resample(&z));
            let dxy = distance_resampled(&rx, &ry);
            let dyx = distance_resampled(&ry, &rx);
            prop_assert_eq!(dxy, dyx);
            let dxz = distance_resampled(&rx, &rz);
            let dzy = distance_resampled(&rz, &ry);
            prop_assert!(dxy <= dxz + dzy + 1e-12);
            prop_assert!(dxy >= 0.0);
        }
    }
}
