//! Weekly mortality probabilities, 4-year reference expectations with
//! ISO-week-53 imputation, SMR series and direct standardization.
//!
//! Weekly rates work at age-group level (`q̂_{t,A} = D_{t,A} / P_{t,A}`)
//! because weekly deaths are only published by group. Week-level
//! populations come from linear interpolation between the bracketing
//! Dec 31 stocks, anchored on the Monday of each ISO week.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::series::{PopulationSeries, StandardPopulation, WeeklyGroupDeaths};
use crate::types::{iso_weeks_in_year, validate_partition, AgeGroup, IsoWeek, YearLabel};
use crate::yearly::ExcessTable;

/// Interpolated population per `(week, age group)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeeklyPopulation {
    groups: Vec<AgeGroup>,
    values: BTreeMap<(IsoWeek, AgeGroup), f64>,
}

impl WeeklyPopulation {
    pub fn groups(&self) -> &[AgeGroup] {
        &self.groups
    }

    pub fn value(&self, week: IsoWeek, group: AgeGroup) -> Result<f64> {
        self.values
            .get(&(week, group))
            .copied()
            .ok_or_else(|| Error::MissingWeeklyPopulation {
                key: format!("({week}, {group})"),
            })
    }

    pub fn entries(&self) -> impl Iterator<Item = (IsoWeek, AgeGroup, f64)> + '_ {
        self.values.iter().map(|(&(w, g), &v)| (w, g, v))
    }
}

/// Weekly death probabilities per `(week, age group)`, each in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct WeeklyRateSeries {
    groups: Vec<AgeGroup>,
    values: BTreeMap<(IsoWeek, AgeGroup), f64>,
}

impl WeeklyRateSeries {
    pub fn from_values(
        groups: Vec<AgeGroup>,
        values: BTreeMap<(IsoWeek, AgeGroup), f64>,
    ) -> Result<WeeklyRateSeries> {
        for (&(week, group), &q) in &values {
            if !(0.0..=1.0).contains(&q) || q.is_nan() {
                return Err(Error::RateOutOfRange {
                    key: format!("({week}, {group})"),
                    value: q,
                });
            }
        }
        Ok(WeeklyRateSeries { groups, values })
    }

    pub fn groups(&self) -> &[AgeGroup] {
        &self.groups
    }

    pub fn rate(&self, week: IsoWeek, group: AgeGroup) -> Result<f64> {
        self.values
            .get(&(week, group))
            .copied()
            .ok_or_else(|| Error::MissingRate {
                key: format!("({week}, {group})"),
            })
    }

    pub fn entries(&self) -> impl Iterator<Item = (IsoWeek, AgeGroup, f64)> + '_ {
        self.values.iter().map(|(&(w, g), &v)| (w, g, v))
    }
}

/// One SMR row: observed and expected deaths plus their ratio.
/// `smr` is `None` when the expected count is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmrRow {
    pub observed: f64,
    pub expected: f64,
    pub smr: Option<f64>,
}

/// SMR values per `(week, age group)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmrSeries {
    groups: Vec<AgeGroup>,
    rows: BTreeMap<(IsoWeek, AgeGroup), SmrRow>,
}

impl SmrSeries {
    pub fn groups(&self) -> &[AgeGroup] {
        &self.groups
    }

    pub fn row(&self, week: IsoWeek, group: AgeGroup) -> Result<&SmrRow> {
        self.rows
            .get(&(week, group))
            .ok_or_else(|| Error::Invalid(format!("no SMR row for ({week}, {group})")))
    }

    pub fn entries(&self) -> impl Iterator<Item = (IsoWeek, AgeGroup, &SmrRow)> + '_ {
        self.rows.iter().map(|(&(w, g), r)| (w, g, r))
    }

    pub fn weeks(&self) -> Vec<IsoWeek> {
        let set: BTreeSet<IsoWeek> = self.rows.keys().map(|&(w, _)| w).collect();
        set.into_iter().collect()
    }
}

/// One direct-standardization row: expected deaths on the standard
/// population under target-year rates vs the reference-year mean, plus
/// their ratio (`None` when the reference expectation is zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectStdRow {
    pub target: f64,
    pub reference: f64,
    pub ratio: Option<f64>,
}

/// Direct-standardized expectations per `(target week, age group)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectStdSeries {
    groups: Vec<AgeGroup>,
    rows: BTreeMap<(IsoWeek, AgeGroup), DirectStdRow>,
}

impl DirectStdSeries {
    pub fn groups(&self) -> &[AgeGroup] {
        &self.groups
    }

    pub fn row(&self, week: IsoWeek, group: AgeGroup) -> Result<&DirectStdRow> {
        self.rows
            .get(&(week, group))
            .ok_or_else(|| Error::Invalid(format!("no direct-std row for ({week}, {group})")))
    }

    pub fn entries(&self) -> impl Iterator<Item = (IsoWeek, AgeGroup, &DirectStdRow)> + '_ {
        self.rows.iter().map(|(&(w, g), r)| (w, g, r))
    }
}

/// Interpolates group-level populations for each requested week:
///
/// ```text
/// P_{t,A} = Σ_{x∈A} [ P_{x,y-1} + f_t (P_{x,y} - P_{x,y-1}) ]
/// ```
///
/// where `y` is the ISO year of `t`, `P_{x,y-1}` and `P_{x,y}` are the
/// bracketing Dec 31 stocks and `f_t` is the year fraction of the week's
/// Monday (see [`IsoWeek::year_fraction`]).
pub fn interpolate_population(
    population: &PopulationSeries,
    groups: &[AgeGroup],
    weeks: &[IsoWeek],
) -> Result<WeeklyPopulation> {
    let max_age = population.max_age();
    validate_partition(groups, max_age)?;
    let mut sorted_groups = groups.to_vec();
    sorted_groups.sort();
    let mut values = BTreeMap::new();
    for &week in weeks {
        let year = YearLabel(week.year());
        let f = week.year_fraction();
        for &group in &sorted_groups {
            let mut sum = 0.0;
            for age in group.ages(max_age) {
                let earlier = population.start_of_year(year, age)?;
                let later = population.start_of_year(year.next(), age)?;
                sum += earlier + f * (later - earlier);
            }
            values.insert((week, group), sum);
        }
    }
    Ok(WeeklyPopulation {
        groups: sorted_groups,
        values,
    })
}

/// Weekly death probabilities `q̂_{t,A} = D_{t,A} / P_{t,A}` for every
/// `(week, group)` the interpolated population covers.
///
/// Zero population with zero deaths yields 0; zero population with
/// nonzero deaths is an error, as is any quotient above 1.
pub fn weekly_qhat(
    deaths: &WeeklyGroupDeaths,
    population: &WeeklyPopulation,
) -> Result<WeeklyRateSeries> {
    if deaths.groups() != population.groups() {
        return Err(Error::GroupMismatch {
            detail: "weekly deaths and interpolated population use different age groups".into(),
        });
    }
    let mut values = BTreeMap::new();
    for (week, group, p) in population.entries() {
        let d = deaths.count(week, group)?;
        let key = (week, group);
        if p == 0.0 {
            if d > 0 {
                return Err(Error::ZeroPopulation {
                    key: format!("({week}, {group})"),
                    deaths: d,
                });
            }
            values.insert(key, 0.0);
            continue;
        }
        let q = d as f64 / p;
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::RateOutOfRange {
                key: format!("({week}, {group})"),
                value: q,
            });
        }
        values.insert(key, q);
    }
    Ok(WeeklyRateSeries {
        groups: population.groups().to_vec(),
        values,
    })
}

/// Rate for week `w` of reference year `y`, imputing the missing week 53
/// of 52-week years as the mean of that year's W52 and the following
/// year's W01.
fn reference_rate(
    rates: &WeeklyRateSeries,
    year: YearLabel,
    week: u32,
    group: AgeGroup,
) -> Result<f64> {
    let weeks_in_ref = iso_weeks_in_year(year.0);
    if week <= weeks_in_ref {
        return rates.rate(IsoWeek::new(year.0, week)?, group);
    }
    let w52 = rates.rate(IsoWeek::new(year.0, weeks_in_ref)?, group)?;
    let w01 = rates.rate(IsoWeek::new(year.next().0, 1)?, group)?;
    Ok((w52 + w01) / 2.0)
}

/// Averages the weekly rates of the reference years per target week:
///
/// ```text
/// q̄_{t,A} = (1/n) Σ_y q̂_{y-Wt,A}
/// ```
///
/// Week 53 of a 52-week reference year is imputed before averaging. The
/// result is keyed by the target year's weeks; requesting a week the
/// target year does not have is an error.
pub fn reference_mean_q(
    rates: &WeeklyRateSeries,
    reference_years: &[YearLabel],
    target_year: YearLabel,
    target_weeks: &[u32],
) -> Result<WeeklyRateSeries> {
    if reference_years.is_empty() {
        return Err(Error::EmptyYears);
    }
    let years: BTreeSet<YearLabel> = reference_years.iter().copied().collect();
    let n = years.len() as f64;
    let mut values = BTreeMap::new();
    for &week in target_weeks {
        let target_key = IsoWeek::new(target_year.0, week)?;
        for &group in rates.groups() {
            let mut sum = 0.0;
            for &year in &years {
                sum += reference_rate(rates, year, week, group)?;
            }
            values.insert((target_key, group), sum / n);
        }
    }
    Ok(WeeklyRateSeries {
        groups: rates.groups().to_vec(),
        values,
    })
}

/// Expected weekly deaths `ē_{t,A} = q̄_{t,A} · P_{t,A}` for every cell
/// of the mean-rate series.
pub fn indirect_expected(
    mean_rates: &WeeklyRateSeries,
    target_population: &WeeklyPopulation,
) -> Result<BTreeMap<(IsoWeek, AgeGroup), f64>> {
    if mean_rates.groups() != target_population.groups() {
        return Err(Error::GroupMismatch {
            detail: "mean rates and target population use different age groups".into(),
        });
    }
    let mut expected = BTreeMap::new();
    for (week, group, q) in mean_rates.entries() {
        let p = target_population.value(week, group)?;
        expected.insert((week, group), q * p);
    }
    Ok(expected)
}

/// Pairs observed counts with expected counts and forms SMR values.
/// Cells with zero expected deaths carry `smr = None` rather than a
/// division by zero.
pub fn smr_series(
    observed: &WeeklyGroupDeaths,
    expected: &BTreeMap<(IsoWeek, AgeGroup), f64>,
) -> Result<SmrSeries> {
    let mut rows = BTreeMap::new();
    let mut groups: BTreeSet<AgeGroup> = BTreeSet::new();
    for (&(week, group), &e) in expected {
        let d = observed.count(week, group)? as f64;
        let smr = if e > 0.0 { Some(d / e) } else { None };
        rows.insert(
            (week, group),
            SmrRow {
                observed: d,
                expected: e,
                smr,
            },
        );
        groups.insert(group);
    }
    Ok(SmrSeries {
        groups: groups.into_iter().collect(),
        rows,
    })
}

/// Direct standardization: applies each year's weekly rates to a common
/// standard population,
///
/// ```text
/// ē^s_{y-Wt,A} = q̂_{y-Wt,A} · P^s_A
/// ```
///
/// and compares the target year against the mean over the reference
/// years (week 53 imputed as in [`reference_mean_q`]).
pub fn direct_standardized(
    rates: &WeeklyRateSeries,
    standard: &StandardPopulation,
    reference_years: &[YearLabel],
    target_year: YearLabel,
    target_weeks: &[u32],
) -> Result<DirectStdSeries> {
    if rates.groups() != standard.groups() {
        return Err(Error::GroupMismatch {
            detail: "weekly rates and standard population use different age groups".into(),
        });
    }
    let mean = reference_mean_q(rates, reference_years, target_year, target_weeks)?;
    let mut rows = BTreeMap::new();
    for &week in target_weeks {
        let key = IsoWeek::new(target_year.0, week)?;
        for &group in rates.groups() {
            let ps = standard.count(group)?;
            let target = rates.rate(key, group)? * ps;
            let reference = mean.rate(key, group)? * ps;
            let ratio = if reference > 0.0 {
                Some(target / reference)
            } else {
                None
            };
            rows.insert(
                (key, group),
                DirectStdRow {
                    target,
                    reference,
                    ratio,
                },
            );
        }
    }
    Ok(DirectStdSeries {
        groups: rates.groups().to_vec(),
        rows,
    })
}

/// Sums observed and expected counts over all weeks of `year` per group
/// and shapes the result as a yearly excess table.
pub fn yearly_aggregate_weekly(series: &SmrSeries, year: YearLabel) -> Result<ExcessTable> {
    let mut observed: BTreeMap<AgeGroup, f64> = BTreeMap::new();
    let mut expected: BTreeMap<AgeGroup, f64> = BTreeMap::new();
    for (week, group, row) in series.entries() {
        if week.year() != year.0 {
            continue;
        }
        *observed.entry(group).or_insert(0.0) += row.observed;
        *expected.entry(group).or_insert(0.0) += row.expected;
    }
    if observed.is_empty() {
        return Err(Error::Invalid(format!(
            "SMR series has no rows in year {year}"
        )));
    }
    Ok(ExcessTable::from_counts(
        year,
        observed
            .into_iter()
            .map(|(group, o)| (group, expected[&group], o)),
    ))
}

/// Outputs of the full indirect pipeline for one target year.
#[derive(Debug, Clone, PartialEq)]
pub struct IndirectOutputs {
    /// Interpolated population for every week the pipeline touched.
    pub population: WeeklyPopulation,
    /// Raw weekly rates over reference and target weeks.
    pub rates: WeeklyRateSeries,
    /// Reference-mean rates keyed by target week.
    pub mean_rates: WeeklyRateSeries,
    /// Expected deaths per target `(week, group)`.
    pub expected: BTreeMap<(IsoWeek, AgeGroup), f64>,
    /// Observed, expected and SMR per target `(week, group)`.
    pub smr: SmrSeries,
}

/// Every week whose rate the pipeline needs: all weeks of each reference
/// year, the target weeks, and W01 of the year after any 52-week
/// reference year when week 53 is requested.
fn needed_weeks(
    reference_years: &BTreeSet<YearLabel>,
    target_year: YearLabel,
    target_weeks: &[u32],
) -> Result<BTreeSet<IsoWeek>> {
    let mut weeks = BTreeSet::new();
    for &week in target_weeks {
        weeks.insert(IsoWeek::new(target_year.0, week)?);
    }
    let needs_imputation = target_weeks.contains(&53);
    for &year in reference_years {
        let in_year = iso_weeks_in_year(year.0);
        for w in 1..=in_year {
            weeks.insert(IsoWeek::new(year.0, w)?);
        }
        if needs_imputation && in_year < 53 {
            weeks.insert(IsoWeek::new(year.next().0, 1)?);
        }
    }
    Ok(weeks)
}

/// Runs interpolation, weekly rates, reference averaging, indirect
/// expectation and SMR in one pass.
pub fn indirect_pipeline(
    population: &PopulationSeries,
    deaths: &WeeklyGroupDeaths,
    reference_years: &[YearLabel],
    target_year: YearLabel,
    target_weeks: &[u32],
) -> Result<IndirectOutputs> {
    if reference_years.is_empty() {
        return Err(Error::EmptyYears);
    }
    let years: BTreeSet<YearLabel> = reference_years.iter().copied().collect();
    let weeks: Vec<IsoWeek> = needed_weeks(&years, target_year, target_weeks)?
        .into_iter()
        .collect();
    let weekly_pop = interpolate_population(population, deaths.groups(), &weeks)?;
    let rates = weekly_qhat(deaths, &weekly_pop)?;
    let mean_rates = reference_mean_q(&rates, reference_years, target_year, target_weeks)?;
    let expected = indirect_expected(&mean_rates, &weekly_pop)?;
    let smr = smr_series(deaths, &expected)?;
    Ok(IndirectOutputs {
        population: weekly_pop,
        rates,
        mean_rates,
        expected,
        smr,
    })
}
