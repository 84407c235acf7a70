use std::collections::BTreeSet;

use nalgebra::DMatrix;

use super::VarError;
use crate::index::{ShareSeries, Window};
use crate::period::{Granularity, Period};

/// A balanced, contiguous multi-variable panel.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub variable_names: Vec<String>,
    pub granularity: Granularity,
    pub rows: Vec<(Period, Vec<f64>)>,
}

impl Panel {
    pub fn new(variable_names: Vec<String>, granularity: Granularity, rows: Vec<(Period, Vec<f64>)>) -> Result<Self, VarError> {
        let k = variable_names.len();
        if k == 0 {
            return Err(VarError::Dimension("panel has no variables".into()));
        }
        for (i, (p, v)) in rows.iter().enumerate() {
            if v.len() != k {
                return Err(VarError::Dimension(format!("row {p} has {} values, expected {k}", v.len())));
            }
            if let Some(col) = v.iter().position(|x| !x.is_finite()) {
                return Err(VarError::NonFinite { row: i, col });
            }
            if p.granularity() != granularity {
                return Err(VarError::Unbalanced(format!("period {p} is not {granularity}")));
            }
            if i > 0 && rows[i - 1].0.succ() != *p {
                return Err(VarError::Unbalanced(format!("gap or disorder between {} and {p}", rows[i - 1].0)));
            }
        }
        Ok(Panel { variable_names, granularity, rows })
    }

    /// Panel from a `T × k` matrix with consecutive periods starting at `start`.
    pub fn from_matrix(variable_names: Vec<String>, start: Period, data: &DMatrix<f64>) -> Result<Self, VarError> {
        let rows = (0..data.nrows())
            .map(|t| (start.offset(t as i64), data.row(t).iter().copied().collect()))
            .collect();
        Panel::new(variable_names, start.granularity(), rows)
    }

    /// Aligns series on the periods where every series is defined, within `window`.
    ///
    /// The surviving periods must be contiguous.
    pub fn from_series(series: &[ShareSeries], window: Option<&Window>) -> Result<Self, VarError> {
        let first = series.first().ok_or_else(|| VarError::Dimension("no series".into()))?;
        let granularity = first.granularity;
        if let Some(s) = series.iter().find(|s| s.granularity != granularity) {
            return Err(VarError::Unbalanced(format!("series `{}` is {}, expected {granularity}", s.label, s.granularity)));
        }
        let mut periods: BTreeSet<Period> = first.rows.iter().filter(|r| r.1.is_some()).map(|r| r.0).collect();
        for s in &series[1..] {
            periods.retain(|p| s.get(*p).is_some());
        }
        if let Some(w) = window {
            periods.retain(|p| w.contains(*p));
        }
        let rows = periods
            .into_iter()
            .map(|p| (p, series.iter().map(|s| s.get(p).expect("retained periods are defined")).collect()))
            .collect();
        Panel::new(series.iter().map(|s| s.label.clone()).collect(), granularity, rows)
    }

    pub fn restrict(&self, window: &Window) -> Result<Panel, VarError> {
        let rows = self.rows.iter().filter(|r| window.contains(r.0)).cloned().collect();
        Panel::new(self.variable_names.clone(), self.granularity, rows)
    }

    pub fn k(&self) -> usize {
        self.variable_names.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `T × k` data matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), self.k(), |t, j| self.rows[t].1[j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligns_on_common_defined_periods() {
        let q = Period::parse("2000-Q1").unwrap();
        let a = ShareSeries::from_values("a", q, &[Some(1.0), Some(2.0), Some(3.0), Some(4.0)]).unwrap();
        let b = ShareSeries::from_values("b", q.offset(1), &[Some(5.0), Some(6.0), Some(7.0)]).unwrap();
        let p = Panel::from_series(&[a.clone(), b.clone()], None).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.rows[0], (q.offset(1), vec![2.0, 5.0]));

        let holey = ShareSeries::from_values("h", q, &[Some(1.0), None, Some(3.0), Some(4.0)]).unwrap();
        assert!(matches!(Panel::from_series(&[a, holey], None), Err(VarError::Unbalanced(_))));
    }

    #[test]
    fn rejects_gaps_and_nonfinite() {
        let q = Period::parse("2000-Q1").unwrap();
        let gap = vec![(q, vec![1.0]), (q.offset(2), vec![2.0])];
        assert!(matches!(Panel::new(vec!["x".into()], Granularity::Quarterly, gap), Err(VarError::Unbalanced(_))));
        let nan = vec![(q, vec![f64::NAN])];
        assert!(matches!(Panel::new(vec!["x".into()], Granularity::Quarterly, nan), Err(VarError::NonFinite { .. })));
    }
}
