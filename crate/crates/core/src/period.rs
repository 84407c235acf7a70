//! Calendar periods at monthly, quarterly or yearly granularity.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Monthly,
    Quarterly,
    Yearly,
}

impl Granularity {
    /// Number of sub-periods per year.
    pub fn per_year(self) -> i64 {
        match self {
            Granularity::Monthly => 12,
            Granularity::Quarterly => 4,
            Granularity::Yearly => 1,
        }
    }

    /// True when every period of `self` lies inside exactly one period of `coarser`.
    pub fn nests_in(self, coarser: Granularity) -> bool {
        self.per_year() % coarser.per_year() == 0
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Monthly => "monthly",
            Granularity::Quarterly => "quarterly",
            Granularity::Yearly => "yearly",
        })
    }
}

impl FromStr for Granularity {
    type Err = PeriodError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "monthly" | "month" | "m" => Ok(Granularity::Monthly),
            "quarterly" | "quarter" | "q" => Ok(Granularity::Quarterly),
            "yearly" | "annual" | "year" | "y" => Ok(Granularity::Yearly),
            _ => Err(PeriodError::UnknownGranularity(s.to_string())),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PeriodError {
    #[error("unknown granularity `{0}`")]
    UnknownGranularity(String),
    #[error("cannot parse period `{0}` (expected YYYY, YYYY-Qn or YYYY-MM)")]
    Malformed(String),
}

/// A period identified by its granularity and its first calendar day.
///
/// Internally stored as an ordinal (`year * per_year + sub_index`) so that
/// consecutive periods differ by exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Period {
    granularity: Granularity,
    ordinal: i64,
}

impl Period {
    pub fn containing(date: NaiveDate, granularity: Granularity) -> Self {
        let year = i64::from(date.year());
        let sub = match granularity {
            Granularity::Monthly => i64::from(date.month0()),
            Granularity::Quarterly => i64::from(date.month0() / 3),
            Granularity::Yearly => 0,
        };
        Period { granularity, ordinal: year * granularity.per_year() + sub }
    }

    pub fn from_ordinal(granularity: Granularity, ordinal: i64) -> Self {
        Period { granularity, ordinal }
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn ordinal(&self) -> i64 {
        self.ordinal
    }

    pub fn year(&self) -> i64 {
        self.ordinal.div_euclid(self.granularity.per_year())
    }

    /// Zero-based month / quarter within the year (always 0 for yearly).
    pub fn sub_index(&self) -> i64 {
        self.ordinal.rem_euclid(self.granularity.per_year())
    }

    pub fn start(&self) -> NaiveDate {
        let month0 = match self.granularity {
            Granularity::Monthly => self.sub_index(),
            Granularity::Quarterly => self.sub_index() * 3,
            Granularity::Yearly => 0,
        };
        NaiveDate::from_ymd_opt(self.year() as i32, month0 as u32 + 1, 1)
            .expect("period start is a valid date")
    }

    pub fn succ(&self) -> Self {
        self.offset(1)
    }

    pub fn offset(&self, n: i64) -> Self {
        Period { granularity: self.granularity, ordinal: self.ordinal + n }
    }

    /// Number of steps from `self` to `other` (same granularity).
    pub fn steps_to(&self, other: &Period) -> i64 {
        debug_assert_eq!(self.granularity, other.granularity);
        other.ordinal - self.ordinal
    }

    /// The coarser period containing this one.
    pub fn coarsen(&self, to: Granularity) -> Period {
        Period::containing(self.start(), to)
    }

    /// Inclusive range of periods `first..=last`.
    pub fn range(first: Period, last: Period) -> impl Iterator<Item = Period> {
        (first.ordinal..=last.ordinal).map(move |o| Period::from_ordinal(first.granularity, o))
    }

    /// Parses `YYYY`, `YYYY-Qn` or `YYYY-MM`; the granularity is inferred from the shape.
    pub fn parse(s: &str) -> Result<Self, PeriodError> {
        let bad = || PeriodError::Malformed(s.to_string());
        let t = s.trim();
        let (year_str, rest) = match t.split_once('-') {
            Some((y, r)) => (y, Some(r)),
            None => (t, None),
        };
        if year_str.len() != 4 || !year_str.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let year: i64 = year_str.parse().map_err(|_| bad())?;
        match rest {
            None => Ok(Period::from_ordinal(Granularity::Yearly, year)),
            Some(r) if r.starts_with(['Q', 'q']) => {
                let q: i64 = r[1..].parse().map_err(|_| bad())?;
                if !(1..=4).contains(&q) || r.len() != 2 {
                    return Err(bad());
                }
                Ok(Period::from_ordinal(Granularity::Quarterly, year * 4 + q - 1))
            }
            Some(r) => {
                if r.len() != 2 || !r.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                let m: i64 = r.parse().map_err(|_| bad())?;
                if !(1..=12).contains(&m) {
                    return Err(bad());
                }
                Ok(Period::from_ordinal(Granularity::Monthly, year * 12 + m - 1))
            }
        }
    }

    /// Parses a period and checks it has the expected granularity.
    pub fn parse_as(s: &str, granularity: Granularity) -> Result<Self, PeriodError> {
        let p = Period::parse(s)?;
        if p.granularity != granularity {
            return Err(PeriodError::Malformed(format!("{s} (expected {granularity} period)")));
        }
        Ok(p)
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.granularity {
            Granularity::Monthly => write!(f, "{:04}-{:02}", self.year(), self.sub_index() + 1),
            Granularity::Quarterly => write!(f, "{:04}-Q{}", self.year(), self.sub_index() + 1),
            Granularity::Yearly => write!(f, "{:04}", self.year()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn containing_and_display() {
        let date = d(1997, 5, 17);
        assert_eq!(Period::containing(date, Granularity::Monthly).to_string(), "1997-05");
        assert_eq!(Period::containing(date, Granularity::Quarterly).to_string(), "1997-Q2");
        assert_eq!(Period::containing(date, Granularity::Yearly).to_string(), "1997");
        assert_eq!(Period::containing(date, Granularity::Quarterly).start(), d(1997, 4, 1));
    }

    #[test]
    fn parse_round_trips() {
        for s in ["1997", "1997-Q1", "2021-Q4", "2003-01", "2003-12"] {
            assert_eq!(Period::parse(s).unwrap().to_string(), s);
        }
        for s in ["97", "1997-Q5", "1997-13", "1997-1", "abcd", "1997-Q"] {
            assert!(Period::parse(s).is_err(), "{s}");
        }
    }

    #[test]
    fn succ_wraps_year() {
        let p = Period::parse("1999-Q4").unwrap();
        assert_eq!(p.succ().to_string(), "2000-Q1");
        let m = Period::parse("1999-12").unwrap();
        assert_eq!(m.succ().to_string(), "2000-01");
        assert_eq!(m.coarsen(Granularity::Quarterly).to_string(), "1999-Q4");
    }
}
