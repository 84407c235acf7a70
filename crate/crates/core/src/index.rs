//! Attention indices built from per-outlet share series.
//!
//! The recipe: scale each outlet series to unit sample standard deviation over
//! a normalization window, average the scaled series period by period over the
//! outlets that report, then rescale the average so its window mean is 100.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::exec::Execution;
use crate::period::{Granularity, Period};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("series `{label}` has zero variance over the window")]
    ZeroVariance { label: String },
    #[error("series `{label}` has {n} defined value(s) in the window, need at least 2")]
    InsufficientData { label: String, n: usize },
    #[error("series `{label}` has non-positive window mean {mean}")]
    NonPositiveMean { label: String, mean: f64 },
    #[error("only {n} common defined period(s), need at least 2")]
    InsufficientOverlap { n: usize },
    #[error("no input series")]
    NoSeries,
    #[error("series `{label}`: expected {expected} granularity, found {found}")]
    GranularityMismatch { label: String, expected: Granularity, found: Granularity },
    #[error("series `{label}`: periods are not strictly increasing at {at}")]
    Unordered { label: String, at: Period },
    #[error("series `{label}`: non-finite value at {at}")]
    NonFinite { label: String, at: Period },
}

/// Inclusive range of periods used for standardization and mean pinning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start: Period,
    pub end: Period,
}

impl Window {
    pub fn new(start: Period, end: Period) -> Self {
        Window { start, end }
    }

    pub fn contains(&self, p: Period) -> bool {
        self.start <= p && p <= self.end
    }

    /// The full extent covered by a set of series, or `None` if all are empty.
    pub fn spanning(series: &[ShareSeries]) -> Option<Window> {
        let first = series.iter().filter_map(|s| s.rows.first()).map(|r| r.0).min()?;
        let last = series.iter().filter_map(|s| s.rows.last()).map(|r| r.0).max()?;
        Some(Window::new(first, last))
    }
}

/// A labelled series of real values, where `None` marks an undefined period.
#[derive(Debug, Clone, PartialEq)]
pub struct ShareSeries {
    pub label: String,
    pub granularity: Granularity,
    pub rows: Vec<(Period, Option<f64>)>,
}

impl ShareSeries {
    pub fn new(
        label: impl Into<String>,
        granularity: Granularity,
        rows: Vec<(Period, Option<f64>)>,
    ) -> Result<Self, IndexError> {
        let s = ShareSeries { label: label.into(), granularity, rows };
        s.validate()?;
        Ok(s)
    }

    /// Convenience constructor for consecutive periods starting at `start`.
    pub fn from_values(label: impl Into<String>, start: Period, values: &[Option<f64>]) -> Result<Self, IndexError> {
        let rows = values.iter().enumerate().map(|(i, v)| (start.offset(i as i64), *v)).collect();
        ShareSeries::new(label, start.granularity(), rows)
    }

    fn validate(&self) -> Result<(), IndexError> {
        for (i, (p, v)) in self.rows.iter().enumerate() {
            if p.granularity() != self.granularity {
                return Err(IndexError::GranularityMismatch {
                    label: self.label.clone(),
                    expected: self.granularity,
                    found: p.granularity(),
                });
            }
            if i > 0 && self.rows[i - 1].0 >= *p {
                return Err(IndexError::Unordered { label: self.label.clone(), at: *p });
            }
            if v.is_some_and(|x| !x.is_finite()) {
                return Err(IndexError::NonFinite { label: self.label.clone(), at: *p });
            }
        }
        Ok(())
    }

    fn window_values(&self, w: &Window) -> Vec<f64> {
        self.rows.iter().filter(|(p, _)| w.contains(*p)).filter_map(|(_, v)| *v).collect()
    }

    pub fn get(&self, p: Period) -> Option<f64> {
        self.rows.binary_search_by_key(&p, |r| r.0).ok().and_then(|i| self.rows[i].1)
    }

    /// Multiplies every defined value by `k`.
    pub fn scaled(&self, k: f64) -> ShareSeries {
        self.map_values(|x| x * k)
    }

    fn map_values(&self, f: impl Fn(f64) -> f64) -> ShareSeries {
        ShareSeries {
            label: self.label.clone(),
            granularity: self.granularity,
            rows: self.rows.iter().map(|(p, v)| (*p, v.map(&f))).collect(),
        }
    }

    pub fn defined_count(&self) -> usize {
        self.rows.iter().filter(|r| r.1.is_some()).count()
    }
}

/// A normalized index with its normalization window and source labels.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSeries {
    pub label: String,
    pub granularity: Granularity,
    pub window: Window,
    pub sources: Vec<String>,
    pub rows: Vec<(Period, Option<f64>)>,
}

impl IndexSeries {
    pub fn window_mean(&self) -> f64 {
        mean(&self.as_share_series().window_values(&self.window))
    }

    pub fn as_share_series(&self) -> ShareSeries {
        ShareSeries { label: self.label.clone(), granularity: self.granularity, rows: self.rows.clone() }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn is_constant(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}

fn sample_sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

/// Divides the series by its sample (n−1) standard deviation over `window`.
///
/// Values outside the window are scaled by the same factor.
pub fn standardize(s: &ShareSeries, window: &Window) -> Result<ShareSeries, IndexError> {
    let vals = s.window_values(window);
    if vals.len() < 2 {
        return Err(IndexError::InsufficientData { label: s.label.clone(), n: vals.len() });
    }
    let sd = sample_sd(&vals);
    if is_constant(&vals) || sd == 0.0 || !sd.is_finite() {
        return Err(IndexError::ZeroVariance { label: s.label.clone() });
    }
    Ok(s.map_values(|x| x / sd))
}

/// Builds a mean-100 index from one or more outlet series.
pub fn build_index(series: &[ShareSeries], window: &Window) -> Result<IndexSeries, IndexError> {
    build_index_with(series, window, "index", Execution::default())
}

pub fn build_index_with(
    series: &[ShareSeries],
    window: &Window,
    label: &str,
    execution: Execution,
) -> Result<IndexSeries, IndexError> {
    build_index_opts(series, window, label, &IndexOptions { rescale_sd: false, execution })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IndexOptions {
    /// Finish with the affine mean-100 / SD-100 map instead of the mean-100 ratio.
    pub rescale_sd: bool,
    pub execution: Execution,
}

pub fn build_index_opts(
    series: &[ShareSeries],
    window: &Window,
    label: &str,
    opts: &IndexOptions,
) -> Result<IndexSeries, IndexError> {
    let execution = opts.execution;
    let first = series.first().ok_or(IndexError::NoSeries)?;
    let granularity = first.granularity;
    for s in series {
        s.validate()?;
        if s.granularity != granularity {
            return Err(IndexError::GranularityMismatch {
                label: s.label.clone(),
                expected: granularity,
                found: s.granularity,
            });
        }
    }
    let standardized = execution
        .map(series, |s| standardize(s, window))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    // Average over the outlets that report in each period.
    let mut sums: BTreeMap<Period, (f64, usize)> = BTreeMap::new();
    for s in &standardized {
        for (p, v) in &s.rows {
            let e = sums.entry(*p).or_insert((0.0, 0));
            if let Some(x) = v {
                e.0 += x;
                e.1 += 1;
            }
        }
    }
    let (lo, hi) = (*sums.keys().next().unwrap(), *sums.keys().next_back().unwrap());
    let averaged: Vec<(Period, Option<f64>)> = Period::range(lo, hi)
        .map(|p| match sums.get(&p) {
            Some(&(sum, n)) if n > 0 => (p, Some(sum / n as f64)),
            _ => (p, None),
        })
        .collect();
    let avg = ShareSeries { label: label.to_string(), granularity, rows: averaged };
    let mut index = if opts.rescale_sd {
        normalize_mean100_sd100(&avg, window)?
    } else {
        normalize_mean100(&avg, window)?
    };
    index.sources = series.iter().map(|s| s.label.clone()).collect();
    Ok(index)
}

/// Rescales a single series to window mean 100: `100 · s / mean_window(s)`.
pub fn normalize_mean100(s: &ShareSeries, window: &Window) -> Result<IndexSeries, IndexError> {
    let vals = s.window_values(window);
    let m = mean(&vals);
    if vals.is_empty() || m <= 0.0 || !m.is_finite() {
        return Err(IndexError::NonPositiveMean { label: s.label.clone(), mean: if vals.is_empty() { 0.0 } else { m } });
    }
    Ok(IndexSeries {
        label: s.label.clone(),
        granularity: s.granularity,
        window: *window,
        sources: vec![s.label.clone()],
        rows: s.map_values(|x| 100.0 * x / m).rows,
    })
}

/// Affine rescaling to window mean 100 and window sample SD 100.
///
/// Unlike [`normalize_mean100`] this shifts the series, so values may go negative.
pub fn normalize_mean100_sd100(s: &ShareSeries, window: &Window) -> Result<IndexSeries, IndexError> {
    let vals = s.window_values(window);
    if vals.len() < 2 {
        return Err(IndexError::InsufficientData { label: s.label.clone(), n: vals.len() });
    }
    let m = mean(&vals);
    let sd = sample_sd(&vals);
    if is_constant(&vals) || sd == 0.0 {
        return Err(IndexError::ZeroVariance { label: s.label.clone() });
    }
    Ok(IndexSeries {
        label: s.label.clone(),
        granularity: s.granularity,
        window: *window,
        sources: vec![s.label.clone()],
        rows: s.map_values(|x| 100.0 + 100.0 * (x - m) / sd).rows,
    })
}

/// Averages a series into a coarser granularity over defined values.
///
/// A coarse period is undefined only when all of its sub-periods are.
pub fn resample_mean(s: &ShareSeries, to: Granularity) -> Result<ShareSeries, IndexError> {
    if !s.granularity.nests_in(to) {
        return Err(IndexError::GranularityMismatch { label: s.label.clone(), expected: to, found: s.granularity });
    }
    let mut buckets: BTreeMap<Period, (f64, usize)> = BTreeMap::new();
    for (p, v) in &s.rows {
        let e = buckets.entry(p.coarsen(to)).or_insert((0.0, 0));
        if let Some(x) = v {
            e.0 += x;
            e.1 += 1;
        }
    }
    let rows = match (buckets.keys().next(), buckets.keys().next_back()) {
        (Some(&lo), Some(&hi)) => Period::range(lo, hi)
            .map(|p| match buckets.get(&p) {
                Some(&(sum, n)) if n > 0 => (p, Some(sum / n as f64)),
                _ => (p, None),
            })
            .collect(),
        _ => Vec::new(),
    };
    ShareSeries::new(s.label.clone(), to, rows)
}

/// Monthly to quarterly by averaging defined months.
pub fn to_quarterly(s: &ShareSeries) -> Result<ShareSeries, IndexError> {
    if s.granularity != Granularity::Monthly {
        return Err(IndexError::GranularityMismatch {
            label: s.label.clone(),
            expected: Granularity::Monthly,
            found: s.granularity,
        });
    }
    resample_mean(s, Granularity::Quarterly)
}

/// Pearson correlation over the periods where both series are defined.
pub fn correlation(a: &ShareSeries, b: &ShareSeries) -> Result<f64, IndexError> {
    let pairs: Vec<(f64, f64)> = a
        .rows
        .iter()
        .filter_map(|(p, x)| Some((((*x)?), b.get(*p)?)))
        .collect();
    if pairs.len() < 2 {
        return Err(IndexError::InsufficientOverlap { n: pairs.len() });
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in &pairs {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || pairs.windows(2).all(|w| w[0].0 == w[1].0) {
        return Err(IndexError::ZeroVariance { label: a.label.clone() });
    }
    if syy == 0.0 || pairs.windows(2).all(|w| w[0].1 == w[1].1) {
        return Err(IndexError::ZeroVariance { label: b.label.clone() });
    }
    // sqrt of the product keeps r(a, a) == 1 exactly.
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monthly(label: &str, vals: &[Option<f64>]) -> ShareSeries {
        ShareSeries::from_values(label, Period::parse("2000-01").unwrap(), vals).unwrap()
    }

    fn full(s: &ShareSeries) -> Window {
        Window::spanning(std::slice::from_ref(s)).unwrap()
    }

    fn vals(s: &ShareSeries) -> Vec<Option<f64>> {
        s.rows.iter().map(|r| r.1).collect()
    }

    #[test]
    fn standardize_examples() {
        let c = monthly("c", &[Some(0.3); 4]);
        assert_eq!(standardize(&c, &full(&c)), Err(IndexError::ZeroVariance { label: "c".into() }));

        let s = monthly("s", &[Some(0.0), Some(0.1), Some(0.2)]);
        let out = standardize(&s, &full(&s)).unwrap();
        for (got, want) in vals(&out).iter().zip([0.0, 1.0, 2.0]) {
            assert!((got.unwrap() - want).abs() < 1e-12);
        }

        let again = standardize(&out, &full(&out)).unwrap();
        for (a, b) in vals(&again).iter().zip(vals(&out)) {
            assert!((a.unwrap() - b.unwrap()).abs() < 1e-12);
        }

        let one = monthly("one", &[Some(1.0), None]);
        assert!(matches!(standardize(&one, &full(&one)), Err(IndexError::InsufficientData { n: 1, .. })));
    }

    #[test]
    fn standardize_scales_outside_window() {
        let s = monthly("s", &[Some(0.0), Some(0.1), Some(0.2), Some(5.0)]);
        let w = Window::new(Period::parse("2000-01").unwrap(), Period::parse("2000-03").unwrap());
        let out = standardize(&s, &w).unwrap();
        assert!((out.rows[3].1.unwrap() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn normalize_examples() {
        let s = monthly("s", &[Some(1.0), Some(2.0), Some(3.0)]);
        let idx = normalize_mean100(&s, &full(&s)).unwrap();
        assert_eq!(vals(&idx.as_share_series()), vec![Some(50.0), Some(100.0), Some(150.0)]);

        let c = monthly("c", &[Some(0.7); 5]);
        for v in vals(&normalize_mean100(&c, &full(&c)).unwrap().as_share_series()) {
            assert!((v.unwrap() - 100.0).abs() < 1e-12);
        }

        let z = monthly("z", &[Some(0.0); 3]);
        assert!(matches!(normalize_mean100(&z, &full(&z)), Err(IndexError::NonPositiveMean { .. })));
    }

    #[test]
    fn mean_sd_variant() {
        let s = monthly("s", &[Some(1.0), Some(2.0), Some(3.0), Some(10.0)]);
        let idx = normalize_mean100_sd100(&s, &full(&s)).unwrap();
        let v: Vec<f64> = vals(&idx.as_share_series()).into_iter().flatten().collect();
        assert!((mean(&v) - 100.0).abs() < 1e-9);
        assert!((sample_sd(&v) - 100.0).abs() < 1e-9);
    }

    #[test]
    fn build_index_single_positive_series() {
        let s = monthly("s", &[Some(0.1), Some(0.3), None, Some(0.2)]);
        let w = full(&s);
        let idx = build_index(std::slice::from_ref(&s), &w).unwrap();
        let direct = normalize_mean100(&s, &w).unwrap();
        for (a, b) in idx.rows.iter().zip(&direct.rows) {
            match (a.1, b.1) {
                (Some(x), Some(y)) => assert!((x - y).abs() <= 1e-9 * y.abs()),
                (None, None) => {}
                other => panic!("{other:?}"),
            }
        }
        assert!((idx.window_mean() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn build_index_duplicates_do_not_change_result() {
        let s = monthly("s", &[Some(0.1), Some(0.3), Some(0.25), Some(0.2)]);
        let w = full(&s);
        let one = build_index(std::slice::from_ref(&s), &w).unwrap();
        let two = build_index(&[s.clone(), s.clone()], &w).unwrap();
        for (a, b) in one.rows.iter().zip(&two.rows) {
            assert!((a.1.unwrap() - b.1.unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn build_index_reports_offending_label() {
        let good = monthly("good", &[Some(0.1), Some(0.2), Some(0.3)]);
        let flat = monthly("flat", &[Some(0.2); 3]);
        let w = full(&good);
        assert_eq!(build_index(&[good, flat], &w).unwrap_err(), IndexError::ZeroVariance { label: "flat".into() });
    }

    #[test]
    fn build_index_negative_mean() {
        let s = monthly("s", &[Some(-0.1), Some(-0.3), Some(-0.2)]);
        assert!(matches!(build_index(std::slice::from_ref(&s), &full(&s)), Err(IndexError::NonPositiveMean { .. })));
    }

    #[test]
    fn to_quarterly_examples() {
        let s = monthly("s", &[Some(1.0), Some(2.0), Some(3.0), Some(4.0), None, Some(8.0), None, None, None]);
        let q = to_quarterly(&s).unwrap();
        assert_eq!(vals(&q), vec![Some(2.0), Some(6.0), None]);
        assert_eq!(q.rows[0].0.to_string(), "2000-Q1");
        assert!(to_quarterly(&q).is_err());
    }

    #[test]
    fn correlation_examples() {
        let a = monthly("a", &[Some(1.0), Some(3.0), Some(2.0), Some(7.5)]);
        assert_eq!(correlation(&a, &a).unwrap(), 1.0);
        let neg = a.map_values(|x| 4.0 - x);
        assert!((correlation(&a, &neg).unwrap() + 1.0).abs() < 1e-15);
        let short = monthly("b", &[Some(1.0), None, None, None]);
        assert!(matches!(correlation(&a, &short), Err(IndexError::InsufficientOverlap { n: 1 })));
    }

    #[test]
    fn unordered_rows_rejected() {
        let p = Period::parse("2000-02").unwrap();
        let rows = vec![(p, Some(1.0)), (p, Some(2.0))];
        assert!(matches!(ShareSeries::new("x", Granularity::Monthly, rows), Err(IndexError::Unordered { .. })));
    }
}
