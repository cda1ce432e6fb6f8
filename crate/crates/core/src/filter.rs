//! Outlier labeling, range filtering and min-max rescaling of samples.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{Float, Num};
use thiserror::Error;

use crate::metrics::{Feature, SbSample};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("no values to summarize")]
    Empty,
    #[error("values are not totally ordered (NaN present?)")]
    Unordered,
    #[error("fence multiplier must be positive")]
    NonPositiveMultiplier,
}

/// Sorts a copy of `values`, failing on incomparable pairs.
fn sorted<T: Copy + PartialOrd>(values: &[T]) -> Result<Vec<T>, FilterError> {
    if values.iter().any(|v| v.partial_cmp(v).is_none()) {
        return Err(FilterError::Unordered);
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    Ok(v)
}

fn two<T: Num>() -> T {
    T::one() + T::one()
}

fn median_sorted<T: Copy + Num>(xs: &[T]) -> T {
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / two()
    }
}

/// Tukey hinges `(q1, median, q3)`.
///
/// Each hinge is the median of one half of the sorted values; for an odd
/// count both halves include the overall median.
pub fn quartiles<T: Copy + PartialOrd + Num>(values: &[T]) -> Result<(T, T, T), FilterError> {
    if values.is_empty() {
        return Err(FilterError::Empty);
    }
    let xs = sorted(values)?;
    let n = xs.len();
    let (lower, upper) = if n % 2 == 1 {
        (&xs[..=n / 2], &xs[n / 2..])
    } else {
        (&xs[..n / 2], &xs[n / 2..])
    };
    Ok((
        median_sorted(lower),
        median_sorted(&xs),
        median_sorted(upper),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fences<T> {
    pub q1: T,
    pub q3: T,
    pub iqr: T,
    pub lower: T,
    pub upper: T,
    pub k: T,
}

impl<T: Copy + PartialOrd> Fences<T> {
    pub fn is_outlier(&self, v: T) -> bool {
        v < self.lower || v > self.upper
    }
}

pub fn fences<T: Copy + PartialOrd + Num>(values: &[T], k: T) -> Result<Fences<T>, FilterError> {
    if !(k > T::zero()) {
        return Err(FilterError::NonPositiveMultiplier);
    }
    let (q1, _, q3) = quartiles(values)?;
    let iqr = q3 - q1;
    Ok(Fences {
        q1,
        q3,
        iqr,
        lower: q1 - k * iqr,
        upper: q3 + k * iqr,
        k,
    })
}

fn in_unit<T: Float>(v: T) -> bool {
    v >= T::zero() && v <= T::one()
}

/// A sample dropped for carrying a feature outside [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Dropped<T> {
    pub sample: SbSample<T>,
    /// Every feature that was out of range.
    pub features: Vec<Feature>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeReport {
    pub samples_in: usize,
    pub samples_dropped: usize,
    pub samples_out: usize,
}

/// Drops every sample with any feature outside [0, 1]; kept samples are untouched.
pub fn drop_out_of_range<T: Float>(
    samples: Vec<SbSample<T>>,
) -> (Vec<SbSample<T>>, Vec<Dropped<T>>, RangeReport) {
    let samples_in = samples.len();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for s in samples {
        let bad: Vec<Feature> = Feature::ALL
            .into_iter()
            .filter(|&f| !in_unit(s.get(f)))
            .collect();
        if bad.is_empty() {
            kept.push(s);
        } else {
            dropped.push(Dropped {
                sample: s,
                features: bad,
            });
        }
    }
    let report = RangeReport {
        samples_in,
        samples_dropped: dropped.len(),
        samples_out: kept.len(),
    };
    (kept, dropped, report)
}

/// Rescales each feature to [0, 1] over the given samples. Constant features map to 0.
///
/// Returns the per-feature `(min, max)` that was used.
pub fn minmax_rescale<T: Float>(
    mut samples: Vec<SbSample<T>>,
) -> Result<(Vec<SbSample<T>>, [(T, T); 9]), FilterError> {
    if samples.is_empty() {
        return Err(FilterError::Empty);
    }
    let mut ranges = [(T::zero(), T::zero()); 9];
    for f in Feature::ALL {
        let (lo, hi) = samples
            .iter()
            .map(|s| s.get(f))
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        ranges[f.index()] = (lo, hi);
        let span = hi - lo;
        for s in samples.iter_mut() {
            let v = if span > T::zero() {
                (s.get(f) - lo) / span
            } else {
                T::zero()
            };
            s.set(f, v);
        }
    }
    Ok((samples, ranges))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSummary<T> {
    pub feature: Feature,
    /// Computed over all incoming samples.
    pub fences: Fences<T>,
    /// Incoming samples outside the fences (reported, not removed).
    pub flagged: usize,
    /// Range used for rescaling; `None` when no sample survived.
    pub range: Option<(T, T)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterReport<T> {
    pub samples_in: usize,
    pub samples_dropped: usize,
    pub samples_out: usize,
    pub auctions_in: usize,
    pub auctions_out: usize,
    pub bidders_in: usize,
    pub bidders_out: usize,
    pub features: Vec<FeatureSummary<T>>,
    pub dropped: Vec<Dropped<T>>,
}

fn distinct_counts<T>(samples: &[SbSample<T>]) -> (usize, usize) {
    let auctions: BTreeSet<u32> = samples.iter().map(|s| s.auction_id).collect();
    let bidders: BTreeSet<&str> = samples.iter().map(|s| s.bidder_id.as_str()).collect();
    (auctions.len(), bidders.len())
}

/// Fences (diagnostic) → range drop → min-max rescale.
pub fn run_filter<T: Float>(
    samples: Vec<SbSample<T>>,
    k: T,
) -> Result<(Vec<SbSample<T>>, FilterReport<T>), FilterError> {
    if samples.is_empty() {
        return Err(FilterError::Empty);
    }
    let mut summaries = Vec::with_capacity(9);
    for f in Feature::ALL {
        let col: Vec<T> = samples.iter().map(|s| s.get(f)).collect();
        let fence = fences(&col, k)?;
        let flagged = col.iter().filter(|&&v| fence.is_outlier(v)).count();
        summaries.push(FeatureSummary {
            feature: f,
            fences: fence,
            flagged,
            range: None,
        });
    }
    let (auctions_in, bidders_in) = distinct_counts(&samples);

    let (kept, dropped, counts) = drop_out_of_range(samples);
    let (auctions_out, bidders_out) = distinct_counts(&kept);
    let out = if kept.is_empty() {
        kept
    } else {
        let (rescaled, ranges) = minmax_rescale(kept)?;
        for s in summaries.iter_mut() {
            s.range = Some(ranges[s.feature.index()]);
        }
        rescaled
    };

    let report = FilterReport {
        samples_in: counts.samples_in,
        samples_dropped: counts.samples_dropped,
        samples_out: counts.samples_out,
        auctions_in,
        auctions_out,
        bidders_in,
        bidders_out,
        features: summaries,
        dropped,
    };
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn sample(id: u32, f: [f64; 9]) -> SbSample<f64> {
        SbSample::from_features(id, format!("b{id}"), f)
    }

    #[test]
    fn quartile_examples() {
        assert_eq!(quartiles(&[3.0; 4]).unwrap(), (3.0, 3.0, 3.0));
        assert_eq!(
            quartiles(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap(),
            (2.0, 3.0, 4.0)
        );
        assert_eq!(quartiles(&[4.0, 1.0, 3.0, 2.0]).unwrap(), (1.5, 2.5, 3.5));
        assert_eq!(quartiles(&[7.0]).unwrap(), (7.0, 7.0, 7.0));
        assert_eq!(quartiles::<f64>(&[]), Err(FilterError::Empty));
        assert_eq!(quartiles(&[1.0, f64::NAN]), Err(FilterError::Unordered));
    }

    #[test]
    fn quartiles_on_rationals_are_exact() {
        let r = |n, d| Rational64::new(n, d);
        let (q1, m, q3) = quartiles(&[r(1, 3), r(2, 3), r(1, 1), r(5, 3)]).unwrap();
        assert_eq!((q1, m, q3), (r(1, 2), r(5, 6), r(4, 3)));
        let f = fences(&[r(1, 1), r(2, 1), r(3, 1), r(4, 1), r(100, 1)], r(3, 2)).unwrap();
        assert_eq!((f.lower, f.upper), (r(-1, 1), r(7, 1)));
    }

    #[test]
    fn fence_examples() {
        let c = fences(&[0.4; 6], 1.5).unwrap();
        assert_eq!((c.lower, c.upper, c.iqr), (0.4, 0.4, 0.0));
        let v = [1.0, 2.0, 3.0, 4.0, 100.0];
        let f = fences(&v, 1.5).unwrap();
        assert_eq!(f.iqr, 2.0);
        assert_eq!((f.lower, f.upper), (-1.0, 7.0));
        let flagged: Vec<f64> = v.iter().copied().filter(|&x| f.is_outlier(x)).collect();
        assert_eq!(flagged, [100.0]);
        assert_eq!(fences(&v, 0.0), Err(FilterError::NonPositiveMultiplier));
    }

    #[test]
    fn range_drop_examples() {
        let ok = sample(1, [0.5; 9]);
        let mut late = sample(2, [0.5; 9]);
        late.last_bidding = 3.2;
        let mut early = sample(3, [0.5; 9]);
        early.early_bidding = -0.4;
        let (kept, dropped, rep) = drop_out_of_range(vec![ok.clone(), late, early]);
        assert_eq!(kept, vec![ok]);
        assert_eq!(rep.samples_dropped, 2);
        assert_eq!(dropped[0].features, [Feature::LastBidding]);
        assert_eq!(dropped[1].features, [Feature::EarlyBidding]);
    }

    #[test]
    fn rescale_examples() {
        let s: Vec<_> = [0.2, 0.4, 0.6]
            .iter()
            .enumerate()
            .map(|(i, &v)| sample(i as u32, [v, 0.3, v, v, v, v, v, v, v]))
            .collect();
        let (out, ranges) = minmax_rescale(s).unwrap();
        let col: Vec<f64> = out.iter().map(|s| s.opening_price_m).collect();
        assert!(
            (col[0] - 0.0).abs() < 1e-12
                && (col[1] - 0.5).abs() < 1e-12
                && (col[2] - 1.0).abs() < 1e-12
        );
        assert!(out.iter().all(|s| s.early_bidding == 0.0));
        assert_eq!(ranges[1], (0.3, 0.3));
        let (again, _) = minmax_rescale(out.clone()).unwrap();
        assert_eq!(again, out);
        assert_eq!(
            minmax_rescale::<f64>(vec![]).unwrap_err(),
            FilterError::Empty
        );
    }

    #[test]
    fn run_filter_drops_then_rescales_over_survivors() {
        let mut samples: Vec<_> = (0..20)
            .map(|i| {
                let v = i as f64 / 19.0;
                sample(i, [v, v, v * 0.5, v, v, v, v, v, v])
            })
            .collect();
        for i in [3, 9, 15] {
            samples[i].last_bidding = 2.5 + i as f64;
        }
        let (out, rep) = run_filter(samples.clone(), 1.5).unwrap();
        assert_eq!(
            (rep.samples_in, rep.samples_dropped, rep.samples_out),
            (20, 3, 17)
        );
        assert_eq!(out.len(), 17);
        for s in &out {
            assert!(s.features().iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
        // recompute the range from the survivors by hand
        let kept: Vec<f64> = samples
            .iter()
            .enumerate()
            .filter(|(i, _)| ![3, 9, 15].contains(i))
            .map(|(_, s)| s.last_bidding)
            .collect();
        let lo = kept.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = kept.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(
            rep.features[Feature::LastBidding.index()].range,
            Some((lo, hi))
        );
        assert!(rep.features[Feature::LastBidding.index()].flagged >= 3);
    }

    #[test]
    fn run_filter_fixed_point() {
        let samples: Vec<_> = (0..5).map(|i| sample(i, [i as f64 / 4.0; 9])).collect();
        let (out, rep) = run_filter(samples.clone(), 1.5).unwrap();
        assert_eq!(rep.samples_dropped, 0);
        for (a, b) in out.iter().zip(&samples) {
            for (x, y) in a.features().iter().zip(b.features()) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
        assert_eq!(
            run_filter::<f64>(vec![], 1.5).unwrap_err(),
            FilterError::Empty
        );
    }
}
