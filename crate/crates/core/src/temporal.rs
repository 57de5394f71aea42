//! Temporal values and the constraint algebra used by pruning, verification
//! and benchmark generation.
//!
//! Every value normalizes to a closed [`DayInterval`] over proleptic Gregorian
//! day numbers (days since 0001-01-01 counted as day 1, as `chrono` does).
//! Coarse values cover their whole granule: `1975` is every day of that year.

use std::cmp::{max, min, Ordering};
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Year,
    Month,
    Day,
}

/// A calendar point at year, month or day granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimePoint {
    year: i32,
    month: Option<u32>,
    day: Option<u32>,
}

impl TimePoint {
    pub fn new(year: i32, month: Option<u32>, day: Option<u32>) -> Result<Self> {
        match (month, day) {
            (None, Some(_)) => {
                return Err(Error::InvalidTime(format!(
                    "day given without month in year {year}"
                )))
            }
            (Some(m), _) if !(1..=12).contains(&m) => {
                return Err(Error::InvalidTime(format!("month {m} out of range")))
            }
            (Some(m), Some(d)) if NaiveDate::from_ymd_opt(year, m, d).is_none() => {
                return Err(Error::InvalidTime(format!(
                    "{year:04}-{m:02}-{d:02} is not a calendar date"
                )));
            }
            _ => {}
        }
        if NaiveDate::from_ymd_opt(year, 1, 1).is_none() {
            return Err(Error::InvalidTime(format!("year {year} out of range")));
        }
        Ok(Self { year, month, day })
    }

    pub fn year(year: i32) -> Result<Self> {
        Self::new(year, None, None)
    }

    pub fn month(year: i32, month: u32) -> Result<Self> {
        Self::new(year, Some(month), None)
    }

    pub fn day(year: i32, month: u32, day: u32) -> Result<Self> {
        Self::new(year, Some(month), Some(day))
    }

    pub fn from_date(date: NaiveDate) -> Self {
        Self {
            year: date.year(),
            month: Some(date.month()),
            day: Some(date.day()),
        }
    }

    pub fn year_value(&self) -> i32 {
        self.year
    }

    pub fn month_value(&self) -> Option<u32> {
        self.month
    }

    pub fn day_value(&self) -> Option<u32> {
        self.day
    }

    pub fn granularity(&self) -> Granularity {
        match (self.month, self.day) {
            (None, _) => Granularity::Year,
            (Some(_), None) => Granularity::Month,
            (Some(_), Some(_)) => Granularity::Day,
        }
    }

    /// First calendar day covered by this point.
    pub fn first_date(&self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year, self.month.unwrap_or(1), self.day.unwrap_or(1))
            .expect("validated on construction")
    }

    /// Last calendar day covered by this point.
    pub fn last_date(&self) -> NaiveDate {
        match (self.month, self.day) {
            (Some(m), Some(d)) => NaiveDate::from_ymd_opt(self.year, m, d),
            (Some(m), None) => {
                let (ny, nm) = if m == 12 { (self.year + 1, 1) } else { (self.year, m + 1) };
                NaiveDate::from_ymd_opt(ny, nm, 1).and_then(|d| d.pred_opt())
            }
            (None, _) => NaiveDate::from_ymd_opt(self.year, 12, 31),
        }
        .expect("validated on construction")
    }

    /// Day extent of this point's granule.
    pub fn extent(&self) -> DayInterval {
        DayInterval {
            start_day: self.first_date().num_days_from_ce(),
            end_day: self.last_date().num_days_from_ce(),
        }
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}", self.year)?;
        if let Some(m) = self.month {
            write!(f, "-{m:02}")?;
        }
        if let Some(d) = self.day {
            write!(f, "-{d:02}")?;
        }
        Ok(())
    }
}

impl FromStr for TimePoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidTime(format!("cannot parse time point `{s}`"));
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, s),
        };
        let mut parts = body.split('-');
        let year: i32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let month = parts
            .next()
            .map(|p| p.parse::<u32>().map_err(|_| bad()))
            .transpose()?;
        let day = parts
            .next()
            .map(|p| p.parse::<u32>().map_err(|_| bad()))
            .transpose()?;
        if parts.next().is_some() {
            return Err(bad());
        }
        TimePoint::new(sign * year, month, day)
    }
}

impl Serialize for TimePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TimePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Closed interval of day numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DayInterval {
    pub start_day: i32,
    pub end_day: i32,
}

impl DayInterval {
    pub fn new(start_day: i32, end_day: i32) -> Option<Self> {
        (start_day <= end_day).then_some(Self { start_day, end_day })
    }

    pub fn len_days(&self) -> i64 {
        i64::from(self.end_day) - i64::from(self.start_day) + 1
    }

    pub fn intersect(&self, other: &DayInterval) -> Option<DayInterval> {
        DayInterval::new(
            max(self.start_day, other.start_day),
            min(self.end_day, other.end_day),
        )
    }

    pub fn contains(&self, other: &DayInterval) -> bool {
        self.start_day <= other.start_day && other.end_day <= self.end_day
    }

    pub fn start_date(&self) -> NaiveDate {
        NaiveDate::from_num_days_from_ce_opt(self.start_day).expect("day number in range")
    }

    pub fn end_date(&self) -> NaiveDate {
        NaiveDate::from_num_days_from_ce_opt(self.end_day).expect("day number in range")
    }
}

impl fmt::Display for DayInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start_date(), self.end_date())
    }
}

/// A point in time or a closed interval between two points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemporalValue {
    Point(TimePoint),
    Interval { begin: TimePoint, end: TimePoint },
}

impl TemporalValue {
    pub fn interval(begin: TimePoint, end: TimePoint) -> Result<Self> {
        if begin.extent().start_day > end.extent().end_day {
            return Err(Error::InvalidTime(format!(
                "interval begin {begin} lies after end {end}"
            )));
        }
        Ok(TemporalValue::Interval { begin, end })
    }

    pub fn year(year: i32) -> Result<Self> {
        TimePoint::year(year).map(TemporalValue::Point)
    }

    pub fn begin(&self) -> TimePoint {
        match *self {
            TemporalValue::Point(p) => p,
            TemporalValue::Interval { begin, .. } => begin,
        }
    }

    pub fn end(&self) -> TimePoint {
        match *self {
            TemporalValue::Point(p) => p,
            TemporalValue::Interval { end, .. } => end,
        }
    }

    pub fn is_interval(&self) -> bool {
        matches!(self, TemporalValue::Interval { .. })
    }

    /// Finest granularity among the value's endpoints.
    pub fn granularity(&self) -> Granularity {
        max(self.begin().granularity(), self.end().granularity())
    }

    pub fn expand(&self) -> DayInterval {
        DayInterval {
            start_day: self.begin().extent().start_day,
            end_day: self.end().extent().end_day,
        }
    }
}

impl From<TimePoint> for TemporalValue {
    fn from(p: TimePoint) -> Self {
        TemporalValue::Point(p)
    }
}

impl fmt::Display for TemporalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemporalValue::Point(p) => write!(f, "{p}"),
            TemporalValue::Interval { begin, end } => write!(f, "{begin}/{end}"),
        }
    }
}

impl FromStr for TemporalValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('/') {
            Some((a, b)) => TemporalValue::interval(a.trim().parse()?, b.trim().parse()?),
            None => Ok(TemporalValue::Point(s.trim().parse()?)),
        }
    }
}

impl Serialize for TemporalValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TemporalValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl PartialOrd for TemporalValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by expansion start, then end, then granularity.
impl Ord for TemporalValue {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.expand(), other.expand());
        a.start_day
            .cmp(&b.start_day)
            .then(a.end_day.cmp(&b.end_day))
            .then(self.granularity().cmp(&other.granularity()))
            .then_with(|| self.to_string().cmp(&other.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemporalSignal {
    Overlap,
    Before,
    After,
    None,
}

impl TemporalSignal {
    pub fn as_str(&self) -> &'static str {
        match self {
            TemporalSignal::Overlap => "overlap",
            TemporalSignal::Before => "before",
            TemporalSignal::After => "after",
            TemporalSignal::None => "none",
        }
    }
}

impl fmt::Display for TemporalSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemporalSignal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "overlap" => Ok(TemporalSignal::Overlap),
            "before" => Ok(TemporalSignal::Before),
            "after" => Ok(TemporalSignal::After),
            "none" | "" | "_" => Ok(TemporalSignal::None),
            other => Err(Error::Format(format!("unknown temporal signal `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TemporalConstraint {
    signal: TemporalSignal,
    value: TemporalValue,
}

impl TemporalConstraint {
    pub fn new(signal: TemporalSignal, value: TemporalValue) -> Result<Self> {
        if signal == TemporalSignal::None {
            return Err(Error::Argument(
                "a temporal constraint needs a signal other than NONE".into(),
            ));
        }
        Ok(Self { signal, value })
    }

    pub fn signal(&self) -> TemporalSignal {
        self.signal
    }

    pub fn value(&self) -> TemporalValue {
        self.value
    }
}

impl fmt::Display for TemporalConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.signal, self.value)
    }
}

pub fn expand(v: &TemporalValue) -> DayInterval {
    v.expand()
}

/// Whether a value found in evidence is consistent with a constraint.
///
/// BEFORE and AFTER compare against the granule of the constraint's nearer
/// endpoint, so `1949–1950` is after `[1946, 1949]` and `1553` is before
/// `May 1553`.
pub fn satisfies(evidence_value: &TemporalValue, c: &TemporalConstraint) -> bool {
    let e = evidence_value.expand();
    match c.signal {
        TemporalSignal::Overlap => e.intersect(&c.value.expand()).is_some(),
        TemporalSignal::After => e.start_day >= c.value.end().extent().start_day,
        TemporalSignal::Before => e.end_day <= c.value.begin().extent().end_day,
        TemporalSignal::None => true,
    }
}

pub fn intersect(a: &TemporalValue, b: &TemporalValue) -> Option<DayInterval> {
    a.expand().intersect(&b.expand())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn cons(signal: TemporalSignal, v: &str) -> TemporalConstraint {
        TemporalConstraint::new(signal, v.parse().unwrap()).unwrap()
    }

    #[test]
    fn expand_year_month_day() {
        let y = TemporalValue::year(1975).unwrap().expand();
        assert_eq!((y.start_date(), y.end_date()), (ymd(1975, 1, 1), ymd(1975, 12, 31)));

        let aug_sep: TemporalValue = "1975-08/1975-09".parse().unwrap();
        let e = aug_sep.expand();
        assert_eq!((e.start_date(), e.end_date()), (ymd(1975, 8, 1), ymd(1975, 9, 30)));

        let d: TemporalValue = "1991-11-24".parse().unwrap();
        let e = d.expand();
        assert_eq!((e.start_date(), e.end_date()), (ymd(1991, 11, 24), ymd(1991, 11, 24)));
    }

    #[test]
    fn february_extent_respects_leap_years() {
        let e = TimePoint::month(2000, 2).unwrap().extent();
        assert_eq!(e.end_date(), ymd(2000, 2, 29));
        let e = TimePoint::month(1900, 2).unwrap().extent();
        assert_eq!(e.end_date(), ymd(1900, 2, 28));
    }

    #[test]
    fn point_invariants() {
        assert!(TimePoint::new(1990, None, Some(3)).is_err());
        assert!(TimePoint::new(1990, Some(13), None).is_err());
        assert!(TimePoint::day(1991, 2, 29).is_err());
        assert!(TimePoint::day(1992, 2, 29).is_ok());
        let late = TimePoint::year(1990).unwrap();
        let early = TimePoint::year(1980).unwrap();
        assert!(TemporalValue::interval(late, early).is_err());
        assert!(TemporalConstraint::new(TemporalSignal::None, late.into()).is_err());
    }

    #[test]
    fn satisfies_examples() {
        let oct: TemporalValue = "1975-10".parse().unwrap();
        assert!(satisfies(&oct, &cons(TemporalSignal::Overlap, "1975")));

        let raab: TemporalValue = "1949/1950".parse().unwrap();
        assert!(satisfies(&raab, &cons(TemporalSignal::After, "1946/1949")));

        let y1990 = TemporalValue::year(1990).unwrap();
        assert!(!satisfies(&y1990, &cons(TemporalSignal::Overlap, "1975")));

        let y1549 = TemporalValue::year(1549).unwrap();
        assert!(satisfies(&y1549, &cons(TemporalSignal::Before, "1553-05-25")));
    }

    #[test]
    fn after_and_before_reject_strictly_earlier_or_later() {
        let nantes: TemporalValue = "1946/1949".parse().unwrap();
        assert!(!satisfies(&nantes, &cons(TemporalSignal::After, "1946/1949")));
        let y1554 = TemporalValue::year(1554).unwrap();
        assert!(!satisfies(&y1554, &cons(TemporalSignal::Before, "1553-05-25")));
    }

    #[test]
    fn intersect_examples() {
        let y = TemporalValue::year(1975).unwrap();
        let oct: TemporalValue = "1975-10".parse().unwrap();
        let i = intersect(&y, &oct).unwrap();
        assert_eq!((i.start_date(), i.end_date()), (ymd(1975, 10, 1), ymd(1975, 10, 31)));

        assert!(intersect(&y, &TemporalValue::year(1990).unwrap()).is_none());

        let dec: TemporalValue = "2003-12".parse().unwrap();
        let i = intersect(&TemporalValue::year(2003).unwrap(), &dec).unwrap();
        assert_eq!((i.start_date(), i.end_date()), (ymd(2003, 12, 1), ymd(2003, 12, 31)));
    }

    #[test]
    fn canonical_rendering() {
        for s in ["1975", "1975-08", "1991-11-24", "1946/1949", "1975-08/1975-09"] {
            let v: TemporalValue = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        let json = serde_json::to_string(&"1946/1949".parse::<TemporalValue>().unwrap()).unwrap();
        assert_eq!(json, "\"1946/1949\"");
        assert!("1975-13".parse::<TemporalValue>().is_err());
        assert!("19x5".parse::<TemporalValue>().is_err());
    }

    #[test]
    fn month_expansion_within_year() {
        for m in 1..=12 {
            let month = TimePoint::month(1993, m).unwrap().extent();
            assert!(TimePoint::year(1993).unwrap().extent().contains(&month));
        }
    }
}
