//! Validated data series: population stocks, death counts and standard
//! populations. All types are immutable after construction; the loaders in
//! [`crate::io`] are the only place raw files are touched.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::types::{Age, AgeGroup, IsoWeek, YearLabel};

/// Population stocks by single year of age, referenced to Dec 31 of the
/// keyed year. Counts are real-valued so projected populations fit.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSeries {
    counts: BTreeMap<(YearLabel, Age), f64>,
    first_year: YearLabel,
    last_year: YearLabel,
    max_age: Age,
}

impl PopulationSeries {
    /// Builds a series from `(year, age) -> count` entries, requiring a
    /// complete grid over the observed year range × `[0, max_age]`.
    pub fn new(counts: BTreeMap<(YearLabel, Age), f64>) -> Result<PopulationSeries> {
        if counts.is_empty() {
            return Err(Error::Invalid("population series is empty".into()));
        }
        let mut max_age = Age(0);
        let mut first_year = YearLabel(i32::MAX);
        let mut last_year = YearLabel(i32::MIN);
        for (&(year, age), &count) in &counts {
            if count < 0.0 || !count.is_finite() {
                return Err(Error::NegativeCount {
                    value: count,
                    location: format!("population (year {year}, age {age})"),
                });
            }
            max_age = max_age.max(age);
            first_year = first_year.min(year);
            last_year = last_year.max(year);
        }
        for y in first_year.0..=last_year.0 {
            for a in 0..=max_age.0 {
                if !counts.contains_key(&(YearLabel(y), Age(a))) {
                    return Err(Error::MissingPopulation {
                        year: YearLabel(y),
                        age: Age(a),
                    });
                }
            }
        }
        Ok(PopulationSeries {
            counts,
            first_year,
            last_year,
            max_age,
        })
    }

    pub fn max_age(&self) -> Age {
        self.max_age
    }

    pub fn first_year(&self) -> YearLabel {
        self.first_year
    }

    pub fn last_year(&self) -> YearLabel {
        self.last_year
    }

    /// Stock at Dec 31 of `year`.
    pub fn stock(&self, year: YearLabel, age: Age) -> Result<f64> {
        self.counts
            .get(&(year, age))
            .copied()
            .ok_or(Error::MissingPopulation { year, age })
    }

    /// Stock at the beginning of `year`, i.e. the Dec 31 stock of the
    /// previous year.
    pub fn start_of_year(&self, year: YearLabel, age: Age) -> Result<f64> {
        self.stock(year.prev(), age)
    }

    pub fn entries(&self) -> impl Iterator<Item = (YearLabel, Age, f64)> + '_ {
        self.counts.iter().map(|(&(y, a), &c)| (y, a, c))
    }
}

/// Yearly death counts by single year of age.
#[derive(Debug, Clone, PartialEq)]
pub struct YearlyAgeDeaths {
    counts: BTreeMap<(YearLabel, Age), u64>,
}

impl YearlyAgeDeaths {
    pub fn new(counts: BTreeMap<(YearLabel, Age), u64>) -> Result<YearlyAgeDeaths> {
        if counts.is_empty() {
            return Err(Error::Invalid("death series is empty".into()));
        }
        Ok(YearlyAgeDeaths { counts })
    }

    pub fn count(&self, year: YearLabel, age: Age) -> Result<u64> {
        self.counts
            .get(&(year, age))
            .copied()
            .ok_or_else(|| Error::MissingDeaths {
                key: format!("(year {year}, age {age})"),
            })
    }

    pub fn entries(&self) -> impl Iterator<Item = (YearLabel, Age, u64)> + '_ {
        self.counts.iter().map(|(&(y, a), &c)| (y, a, c))
    }
}

/// Yearly death counts by age group. All years carry the same group set,
/// which must be contiguous from age 0.
#[derive(Debug, Clone, PartialEq)]
pub struct YearlyGroupDeaths {
    groups: Vec<AgeGroup>,
    counts: BTreeMap<(YearLabel, AgeGroup), u64>,
}

impl YearlyGroupDeaths {
    pub fn new(counts: BTreeMap<(YearLabel, AgeGroup), u64>) -> Result<YearlyGroupDeaths> {
        let groups = consistent_groups(counts.keys().map(|&(y, g)| (y.to_string(), g)))?;
        Ok(YearlyGroupDeaths { groups, counts })
    }

    pub fn groups(&self) -> &[AgeGroup] {
        &self.groups
    }

    pub fn years(&self) -> Vec<YearLabel> {
        let years: BTreeSet<YearLabel> = self.counts.keys().map(|&(y, _)| y).collect();
        years.into_iter().collect()
    }

    pub fn count(&self, year: YearLabel, group: AgeGroup) -> Result<u64> {
        self.counts
            .get(&(year, group))
            .copied()
            .ok_or_else(|| Error::MissingDeaths {
                key: format!("(year {year}, group {group})"),
            })
    }

    pub fn entries(&self) -> impl Iterator<Item = (YearLabel, AgeGroup, u64)> + '_ {
        self.counts.iter().map(|(&(y, g), &c)| (y, g, c))
    }
}

/// Weekly death counts by age group, keyed by validated ISO weeks.
#[derive(Debug, Clone, PartialEq)]
pub struct WeeklyGroupDeaths {
    groups: Vec<AgeGroup>,
    counts: BTreeMap<(IsoWeek, AgeGroup), u64>,
}

impl WeeklyGroupDeaths {
    pub fn new(counts: BTreeMap<(IsoWeek, AgeGroup), u64>) -> Result<WeeklyGroupDeaths> {
        let groups = consistent_groups(counts.keys().map(|&(w, g)| (w.to_string(), g)))?;
        Ok(WeeklyGroupDeaths { groups, counts })
    }

    pub fn groups(&self) -> &[AgeGroup] {
        &self.groups
    }

    pub fn count(&self, week: IsoWeek, group: AgeGroup) -> Result<u64> {
        self.counts
            .get(&(week, group))
            .copied()
            .ok_or_else(|| Error::MissingDeaths {
                key: format!("({week}, group {group})"),
            })
    }

    pub fn entries(&self) -> impl Iterator<Item = (IsoWeek, AgeGroup, u64)> + '_ {
        self.counts.iter().map(|(&(w, g), &c)| (w, g, c))
    }
}

/// Death counts at one of the three supported resolutions.
#[derive(Debug, Clone, PartialEq)]
pub enum DeathSeries {
    YearlyByAge(YearlyAgeDeaths),
    YearlyByGroup(YearlyGroupDeaths),
    WeeklyByGroup(WeeklyGroupDeaths),
}

/// Resolution selector for [`crate::io::load_deaths`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    YearlyByAge,
    YearlyByGroup,
    WeeklyByGroup,
}

impl DeathSeries {
    pub fn as_yearly_by_age(&self) -> Result<&YearlyAgeDeaths> {
        match self {
            DeathSeries::YearlyByAge(d) => Ok(d),
            _ => Err(Error::Invalid(
                "death series is not resolved yearly by single age".into(),
            )),
        }
    }

    pub fn as_yearly_by_group(&self) -> Result<&YearlyGroupDeaths> {
        match self {
            DeathSeries::YearlyByGroup(d) => Ok(d),
            _ => Err(Error::Invalid(
                "death series is not resolved yearly by age group".into(),
            )),
        }
    }

    pub fn as_weekly_by_group(&self) -> Result<&WeeklyGroupDeaths> {
        match self {
            DeathSeries::WeeklyByGroup(d) => Ok(d),
            _ => Err(Error::Invalid(
                "death series is not resolved weekly by age group".into(),
            )),
        }
    }
}

/// Standard population by age group, e.g. the Eurostat 2013 reference.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardPopulation {
    groups: Vec<AgeGroup>,
    counts: BTreeMap<AgeGroup, f64>,
}

impl StandardPopulation {
    pub fn new(counts: BTreeMap<AgeGroup, f64>) -> Result<StandardPopulation> {
        for (&group, &count) in &counts {
            if count < 0.0 || !count.is_finite() {
                return Err(Error::NegativeCount {
                    value: count,
                    location: format!("standard population (group {group})"),
                });
            }
        }
        let groups: Vec<AgeGroup> = counts.keys().copied().collect();
        validate_contiguous_from_zero(&groups)?;
        Ok(StandardPopulation { groups, counts })
    }

    pub fn groups(&self) -> &[AgeGroup] {
        &self.groups
    }

    pub fn count(&self, group: AgeGroup) -> Result<f64> {
        self.counts
            .get(&group)
            .copied()
            .ok_or_else(|| Error::GroupMismatch {
                detail: format!("standard population has no group {group}"),
            })
    }
}

/// Checks every time key carries the same group set and that the set is
/// gap- and overlap-free starting at age 0. Whether it reaches the
/// dataset's maximum age is only known once a population is attached, so
/// that part is re-checked by [`validate_partition`] at computation time.
fn consistent_groups<I>(keys: I) -> Result<Vec<AgeGroup>>
where
    I: IntoIterator<Item = (String, AgeGroup)>,
{
    let mut per_key: BTreeMap<String, BTreeSet<AgeGroup>> = BTreeMap::new();
    for (time, group) in keys {
        per_key.entry(time).or_default().insert(group);
    }
    let mut iter = per_key.iter();
    let (_, first) = iter
        .next()
        .ok_or_else(|| Error::Invalid("death series is empty".into()))?;
    for (time, set) in iter {
        if set != first {
            return Err(Error::GroupMismatch {
                detail: format!("{time} uses a different age grouping than the first period"),
            });
        }
    }
    let groups: Vec<AgeGroup> = first.iter().copied().collect();
    validate_contiguous_from_zero(&groups)?;
    Ok(groups)
}

fn validate_contiguous_from_zero(groups: &[AgeGroup]) -> Result<()> {
    if groups.is_empty() {
        return Err(Error::EmptyPartition);
    }
    let mut sorted = groups.to_vec();
    sorted.sort();
    if sorted[0].lower() != Age(0) {
        return Err(Error::PartitionGap { age: Age(0) });
    }
    let mut prev = sorted[0];
    for &group in &sorted[1..] {
        match prev.upper() {
            None => return Err(Error::PartitionOverlap { age: group.lower() }),
            Some(upper) => {
                if group.lower().0 <= upper.0 {
                    return Err(Error::PartitionOverlap { age: group.lower() });
                }
                if group.lower().0 > upper.0 + 1 {
                    return Err(Error::PartitionGap {
                        age: Age(upper.0 + 1),
                    });
                }
            }
        }
        prev = group;
    }
    Ok(())
}
