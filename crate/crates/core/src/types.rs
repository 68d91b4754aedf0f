//! Core domain types: ages, age groups, calendar years and ISO weeks.

use std::fmt;

use chrono::{Datelike, NaiveDate, Weekday};

use crate::error::{Error, Result};

/// Completed years of age.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Age(pub u32);

impl Age {
    pub fn value(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Age {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A calendar year. Population stocks carry the year of their Dec 31
/// reference date; "beginning of year y" is the Dec 31, y-1 stock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearLabel(pub i32);

impl YearLabel {
    pub fn value(self) -> i32 {
        self.0
    }

    pub fn prev(self) -> YearLabel {
        YearLabel(self.0 - 1)
    }

    pub fn next(self) -> YearLabel {
        YearLabel(self.0 + 1)
    }
}

impl fmt::Display for YearLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Number of ISO 8601 weeks in a year (52 or 53).
pub fn iso_weeks_in_year(year: i32) -> u32 {
    // A year has 53 ISO weeks iff ISO week 53 exists, i.e. Dec 28 falls in week 53.
    match NaiveDate::from_isoywd_opt(year, 53, Weekday::Mon) {
        Some(_) => 53,
        None => 52,
    }
}

/// Number of days in a calendar year.
pub fn days_in_year(year: i32) -> i64 {
    NaiveDate::from_ymd_opt(year, 12, 31)
        .map(|d| d.ordinal() as i64)
        .unwrap_or(365)
}

/// An ISO 8601 week, validated against the week count of its ISO year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IsoWeek {
    year: i32,
    week: u32,
}

impl IsoWeek {
    pub fn new(year: i32, week: u32) -> Result<IsoWeek> {
        let weeks = iso_weeks_in_year(year);
        if week == 0 || week > weeks {
            return Err(Error::InvalidIsoWeek {
                year,
                week,
                weeks_in_year: weeks,
            });
        }
        Ok(IsoWeek { year, week })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn week(self) -> u32 {
        self.week
    }

    /// The Monday of this ISO week. May fall in the previous calendar year
    /// for week 1.
    pub fn monday(self) -> NaiveDate {
        NaiveDate::from_isoywd_opt(self.year, self.week, Weekday::Mon)
            .expect("validated on construction")
    }

    /// Fraction of the ISO year elapsed at the Monday of this week,
    /// measured against the calendar length of the ISO year and clamped
    /// to [0, 1]. Week-1 Mondays that fall in the prior December clamp
    /// to 0, i.e. the Dec 31 stock of the previous year.
    pub fn year_fraction(self) -> f64 {
        let jan1 = NaiveDate::from_ymd_opt(self.year, 1, 1).expect("valid date");
        let offset = (self.monday() - jan1).num_days();
        let span = days_in_year(self.year) - 1;
        (offset as f64 / span as f64).clamp(0.0, 1.0)
    }
}

impl fmt::Display for IsoWeek {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-W{:02}", self.year, self.week)
    }
}

/// An inclusive age interval `[lower, upper]`, or `[lower, ∞)` when open-ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AgeGroup {
    lower: Age,
    upper: Option<Age>,
}

impl AgeGroup {
    pub fn new(lower: Age, upper: Age) -> Result<AgeGroup> {
        if lower > upper {
            return Err(Error::InvalidAgeGroup { lower, upper });
        }
        Ok(AgeGroup {
            lower,
            upper: Some(upper),
        })
    }

    pub fn open(lower: Age) -> AgeGroup {
        AgeGroup { lower, upper: None }
    }

    pub fn lower(self) -> Age {
        self.lower
    }

    pub fn upper(self) -> Option<Age> {
        self.upper
    }

    pub fn is_open(self) -> bool {
        self.upper.is_none()
    }

    /// Upper bound with the open end resolved to `max_age`.
    pub fn upper_or(self, max_age: Age) -> Age {
        self.upper.unwrap_or(max_age)
    }

    pub fn contains(self, age: Age) -> bool {
        age >= self.lower && self.upper.is_none_or(|u| age <= u)
    }

    /// Ages covered by this group within `[lower, max_age]`.
    pub fn ages(self, max_age: Age) -> impl Iterator<Item = Age> {
        (self.lower.0..=self.upper_or(max_age).0).map(Age)
    }
}

impl PartialOrd for AgeGroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AgeGroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Open-ended upper bounds sort after any bounded group with the same lower.
        let key = |g: &AgeGroup| (g.lower, g.upper.map_or(u32::MAX, |u| u.0));
        key(self).cmp(&key(other))
    }
}

impl fmt::Display for AgeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Some(u) => write!(f, "[{}, {}]", self.lower, u),
            None => write!(f, "{}+", self.lower),
        }
    }
}

/// Checks that `groups` partition `[0, max_age]` with no gaps or overlaps.
///
/// The offending boundary age is reported on failure. The list does not
/// have to be pre-sorted.
pub fn validate_partition(groups: &[AgeGroup], max_age: Age) -> Result<()> {
    if groups.is_empty() {
        return Err(Error::EmptyPartition);
    }
    let mut sorted: Vec<AgeGroup> = groups.to_vec();
    sorted.sort();

    let first = sorted[0];
    if first.lower.0 > 0 {
        return Err(Error::PartitionGap { age: Age(0) });
    }
    let mut prev = first;
    for &group in &sorted[1..] {
        match prev.upper {
            None => {
                // An open-ended group covers everything above it.
                return Err(Error::PartitionOverlap { age: group.lower });
            }
            Some(upper) => {
                if group.lower.0 <= upper.0 {
                    return Err(Error::PartitionOverlap { age: group.lower });
                }
                if group.lower.0 > upper.0 + 1 {
                    return Err(Error::PartitionGap {
                        age: Age(upper.0 + 1),
                    });
                }
            }
        }
        prev = group;
    }
    match prev.upper {
        Some(upper) => {
            if upper > max_age {
                return Err(Error::PartitionBound {
                    age: upper,
                    max_age,
                });
            }
            if upper < max_age {
                return Err(Error::PartitionGap {
                    age: Age(upper.0 + 1),
                });
            }
        }
        None => {
            if prev.lower > max_age {
                return Err(Error::PartitionBound {
                    age: prev.lower,
                    max_age,
                });
            }
        }
    }
    // Interior bounds must also stay within range.
    for &group in &sorted {
        if group.lower > max_age {
            return Err(Error::PartitionBound {
                age: group.lower,
                max_age,
            });
        }
    }
    Ok(())
}
