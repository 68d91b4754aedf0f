//! Expected yearly deaths per age group (Methods 1-3), excess tables and
//! the RMSE method comparison.
//!
//! Method 1 applies the period probabilities directly, `e = Σ q_x P_x`.
//! Method 2 swaps in the cohort-corrected `q̃_x`. Method 3 additionally
//! splits the boundary ages between neighbouring groups with half-weights,
//! so that deaths of people crossing an age-group boundary during the year
//! are attributed where they occur: interior boundary terms telescope, the
//! youngest group is padded with its own first age and the oldest group
//! keeps the full final year.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::life_table::{CohortLifeTable, LifeTable};
use crate::series::{PopulationSeries, YearlyGroupDeaths};
use crate::types::{validate_partition, Age, AgeGroup, YearLabel};

/// The three expected-death methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    M1,
    M2,
    M3,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::M1, Method::M2, Method::M3];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::M1 => write!(f, "M1"),
            Method::M2 => write!(f, "M2"),
            Method::M3 => write!(f, "M3"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s.trim().to_ascii_uppercase().as_str() {
            "1" | "M1" => Ok(Method::M1),
            "2" | "M2" => Ok(Method::M2),
            "3" | "M3" => Ok(Method::M3),
            other => Err(Error::Invalid(format!(
                "unknown method '{other}' (expected 1, 2 or 3)"
            ))),
        }
    }
}

/// Expected death counts per `(year, age group)` for one method.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedDeathsYearly {
    method: Method,
    groups: Vec<AgeGroup>,
    years: Vec<YearLabel>,
    values: BTreeMap<(YearLabel, AgeGroup), f64>,
}

impl ExpectedDeathsYearly {
    pub fn method(&self) -> Method {
        self.method
    }

    pub fn groups(&self) -> &[AgeGroup] {
        &self.groups
    }

    pub fn years(&self) -> &[YearLabel] {
        &self.years
    }

    pub fn value(&self, year: YearLabel, group: AgeGroup) -> Result<f64> {
        self.values.get(&(year, group)).copied().ok_or_else(|| {
            Error::Invalid(format!(
                "no expected value for (year {year}, group {group})"
            ))
        })
    }

    /// Sum over all groups for one year.
    pub fn total(&self, year: YearLabel) -> Result<f64> {
        let mut sum = 0.0;
        for &g in &self.groups {
            sum += self.value(year, g)?;
        }
        Ok(sum)
    }

    pub fn entries(&self) -> impl Iterator<Item = (YearLabel, AgeGroup, f64)> + '_ {
        self.values.iter().map(|(&(y, g), &v)| (y, g, v))
    }
}

fn canonical_years(years: &[YearLabel]) -> Result<Vec<YearLabel>> {
    if years.is_empty() {
        return Err(Error::EmptyYears);
    }
    let set: BTreeSet<YearLabel> = years.iter().copied().collect();
    Ok(set.into_iter().collect())
}

fn canonical_groups(groups: &[AgeGroup], max_age: Age) -> Result<Vec<AgeGroup>> {
    validate_partition(groups, max_age)?;
    let mut sorted = groups.to_vec();
    sorted.sort();
    Ok(sorted)
}

fn check_table_range(table_max: Age, population_max: Age) -> Result<()> {
    if table_max != population_max {
        return Err(Error::AgeRangeMismatch {
            table_max,
            population_max,
        });
    }
    Ok(())
}

/// Method 1: `e_{A,y} = Σ_{x∈A} q_x P_{x,y}` with the population taken at
/// the beginning of year `y`.
pub fn expected_method1(
    table: &LifeTable,
    population: &PopulationSeries,
    groups: &[AgeGroup],
    years: &[YearLabel],
) -> Result<ExpectedDeathsYearly> {
    let max_age = population.max_age();
    check_table_range(table.max_age(), max_age)?;
    let groups = canonical_groups(groups, max_age)?;
    let years = canonical_years(years)?;
    let mut values = BTreeMap::new();
    for &year in &years {
        for &group in &groups {
            let mut sum = 0.0;
            for age in group.ages(max_age) {
                sum += table.qx(age)? * population.start_of_year(year, age)?;
            }
            values.insert((year, group), sum);
        }
    }
    Ok(ExpectedDeathsYearly {
        method: Method::M1,
        groups,
        years,
        values,
    })
}

/// Method 2: as Method 1 but with the cohort-corrected `q̃_x`.
pub fn expected_method2(
    cohort: &CohortLifeTable,
    population: &PopulationSeries,
    groups: &[AgeGroup],
    years: &[YearLabel],
) -> Result<ExpectedDeathsYearly> {
    let max_age = population.max_age();
    check_table_range(cohort.max_age(), max_age)?;
    let groups = canonical_groups(groups, max_age)?;
    let years = canonical_years(years)?;
    let mut values = BTreeMap::new();
    for &year in &years {
        for &group in &groups {
            let mut sum = 0.0;
            for age in group.ages(max_age) {
                sum += cohort.qtilde(age)? * population.start_of_year(year, age)?;
            }
            values.insert((year, group), sum);
        }
    }
    Ok(ExpectedDeathsYearly {
        method: Method::M2,
        groups,
        years,
        values,
    })
}

/// Per-age weights on `q̃_x P_{x,y}` implementing the Method 3 boundary
/// splitting for the group `[a_l, a_r]`:
///
/// ```text
/// ê = 0.5 q̃_{a_l-1} P_{a_l-1} + Σ_{x=a_l}^{a_r-1} q̃_x P_x + 0.5 q̃_{a_r} P_{a_r}
/// ```
///
/// with `q̃_{-1} := q̃_0, P_{-1} := P_0` for the youngest group and an
/// extra `0.5 q̃_{a_r} P_{a_r}` when `a_r` is the maximum age.
fn method3_weights(group: AgeGroup, max_age: Age) -> BTreeMap<Age, f64> {
    let lower = group.lower();
    let upper = group.upper_or(max_age);
    let mut weights: BTreeMap<Age, f64> = BTreeMap::new();
    let left = if lower.0 == 0 {
        lower
    } else {
        Age(lower.0 - 1)
    };
    *weights.entry(left).or_insert(0.0) += 0.5;
    for x in lower.0..upper.0 {
        *weights.entry(Age(x)).or_insert(0.0) += 1.0;
    }
    *weights.entry(upper).or_insert(0.0) += 0.5;
    if upper == max_age {
        *weights.entry(upper).or_insert(0.0) += 0.5;
    }
    weights
}

/// Method 3: boundary-corrected expected deaths.
pub fn expected_method3(
    cohort: &CohortLifeTable,
    population: &PopulationSeries,
    groups: &[AgeGroup],
    years: &[YearLabel],
) -> Result<ExpectedDeathsYearly> {
    let max_age = population.max_age();
    check_table_range(cohort.max_age(), max_age)?;
    let groups = canonical_groups(groups, max_age)?;
    let years = canonical_years(years)?;
    let mut values = BTreeMap::new();
    for &year in &years {
        for &group in &groups {
            let mut sum = 0.0;
            for (age, weight) in method3_weights(group, max_age) {
                sum += weight * cohort.qtilde(age)? * population.start_of_year(year, age)?;
            }
            values.insert((year, group), sum);
        }
    }
    Ok(ExpectedDeathsYearly {
        method: Method::M3,
        groups,
        years,
        values,
    })
}

/// One row of an excess table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcessCells {
    pub expected: f64,
    pub observed: f64,
    /// `observed - expected`, exactly.
    pub absolute_diff: f64,
    /// `(observed - expected) / expected`; `None` when expected is zero.
    pub relative_diff: Option<f64>,
}

impl ExcessCells {
    fn new(expected: f64, observed: f64) -> ExcessCells {
        let absolute_diff = observed - expected;
        let relative_diff = if expected != 0.0 {
            Some(absolute_diff / expected)
        } else {
            None
        };
        ExcessCells {
            expected,
            observed,
            absolute_diff,
            relative_diff,
        }
    }

    /// Relative difference as a whole percentage, rounded half away from
    /// zero (the presentation used for printed tables).
    pub fn relative_pct(&self) -> Option<i64> {
        self.relative_diff.map(|r| (r * 100.0).round() as i64)
    }
}

/// Expected vs observed deaths per group for one year, plus a total row
/// whose differences are recomputed from the summed columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcessTable {
    pub year: YearLabel,
    pub rows: Vec<(AgeGroup, ExcessCells)>,
    pub total: ExcessCells,
}

impl ExcessTable {
    pub fn from_counts(
        year: YearLabel,
        counts: impl IntoIterator<Item = (AgeGroup, f64, f64)>,
    ) -> ExcessTable {
        let mut rows = Vec::new();
        let mut expected_sum = 0.0;
        let mut observed_sum = 0.0;
        for (group, expected, observed) in counts {
            expected_sum += expected;
            observed_sum += observed;
            rows.push((group, ExcessCells::new(expected, observed)));
        }
        ExcessTable {
            year,
            rows,
            total: ExcessCells::new(expected_sum, observed_sum),
        }
    }
}

/// Builds the excess table for `year` from one expected series and the
/// observed group-resolved deaths.
pub fn excess_table(
    expected: &ExpectedDeathsYearly,
    observed: &YearlyGroupDeaths,
    year: YearLabel,
) -> Result<ExcessTable> {
    if expected.groups() != observed.groups() {
        return Err(Error::GroupMismatch {
            detail: "expected series and observed deaths use different age groups".into(),
        });
    }
    let mut counts = Vec::new();
    for &group in expected.groups() {
        let e = expected.value(year, group)?;
        let o = observed.count(year, group)? as f64;
        counts.push((group, e, o));
    }
    Ok(ExcessTable::from_counts(year, counts))
}

/// Per-group and overall root mean squared errors for a set of methods.
#[derive(Debug, Clone, PartialEq)]
pub struct RmseReport {
    methods: Vec<Method>,
    groups: Vec<AgeGroup>,
    years: Vec<YearLabel>,
    per_group: BTreeMap<(Method, AgeGroup), f64>,
    overall: BTreeMap<Method, f64>,
}

impl RmseReport {
    pub fn methods(&self) -> &[Method] {
        &self.methods
    }

    pub fn groups(&self) -> &[AgeGroup] {
        &self.groups
    }

    pub fn years(&self) -> &[YearLabel] {
        &self.years
    }

    pub fn group_rmse(&self, method: Method, group: AgeGroup) -> Result<f64> {
        self.per_group
            .get(&(method, group))
            .copied()
            .ok_or_else(|| Error::Invalid(format!("no RMSE for ({method}, {group})")))
    }

    pub fn overall_rmse(&self, method: Method) -> Result<f64> {
        self.overall
            .get(&method)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("no overall RMSE for {method}")))
    }

    /// Method with the smallest RMSE for `group`; ties resolve to the
    /// lowest-numbered method.
    pub fn best_for_group(&self, group: AgeGroup) -> Option<Method> {
        self.methods
            .iter()
            .copied()
            .filter_map(|m| self.per_group.get(&(m, group)).map(|&v| (m, v)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(m, _)| m)
    }

    pub fn best_overall(&self) -> Option<Method> {
        self.methods
            .iter()
            .copied()
            .filter_map(|m| self.overall.get(&m).map(|&v| (m, v)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(m, _)| m)
    }
}

/// Compares expected series against observed deaths over `include_years`.
///
/// Per-group RMSE averages squared residuals over the included years; the
/// overall RMSE is computed on the summed-over-groups yearly totals, not
/// by aggregating the per-group values.
pub fn rmse_compare(
    expected: &[&ExpectedDeathsYearly],
    observed: &YearlyGroupDeaths,
    include_years: &[YearLabel],
) -> Result<RmseReport> {
    if include_years.is_empty() {
        return Err(Error::EmptyYears);
    }
    if expected.is_empty() {
        return Err(Error::Invalid("no expected series supplied".into()));
    }
    let years = canonical_years(include_years)?;
    let groups = expected[0].groups().to_vec();
    let mut methods = Vec::new();
    for series in expected {
        if series.groups() != groups.as_slice() {
            return Err(Error::GroupMismatch {
                detail: "expected series use different age groups".into(),
            });
        }
        if methods.contains(&series.method()) {
            return Err(Error::Invalid(format!(
                "method {} supplied twice",
                series.method()
            )));
        }
        methods.push(series.method());
    }
    if groups.as_slice() != observed.groups() {
        return Err(Error::GroupMismatch {
            detail: "expected series and observed deaths use different age groups".into(),
        });
    }

    let n = years.len() as f64;
    let mut per_group = BTreeMap::new();
    let mut overall = BTreeMap::new();
    for series in expected {
        for &group in &groups {
            let mut sq_sum = 0.0;
            for &year in &years {
                let residual = observed.count(year, group)? as f64 - series.value(year, group)?;
                sq_sum += residual * residual;
            }
            per_group.insert((series.method(), group), (sq_sum / n).sqrt());
        }
        let mut sq_sum = 0.0;
        for &year in &years {
            let mut observed_total = 0.0;
            let mut expected_total = 0.0;
            for &group in &groups {
                observed_total += observed.count(year, group)? as f64;
                expected_total += series.value(year, group)?;
            }
            let residual = observed_total - expected_total;
            sq_sum += residual * residual;
        }
        overall.insert(series.method(), (sq_sum / n).sqrt());
    }
    Ok(RmseReport {
        methods,
        groups,
        years,
        per_group,
        overall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::life_table::Provenance;
    use approx::assert_relative_eq;

    fn group(lo: u32, hi: u32) -> AgeGroup {
        AgeGroup::new(Age(lo), Age(hi)).unwrap()
    }

    /// Population whose start-of-`year` stocks are the given per-age counts.
    fn population_for_year(year: i32, counts: &[f64]) -> PopulationSeries {
        let mut m = BTreeMap::new();
        for (a, &c) in counts.iter().enumerate() {
            m.insert((YearLabel(year - 1), Age(a as u32)), c);
        }
        PopulationSeries::new(m).unwrap()
    }

    fn cohort(values: &[f64]) -> CohortLifeTable {
        CohortLifeTable::from_qtilde(values.to_vec()).unwrap()
    }

    #[test]
    fn method1_matches_hand_computed_example() {
        // q = {0.01, 0.02}, P = {1000, 2000}: e = 10 + 40 = 50.
        let table = LifeTable::from_qx(vec![0.01, 0.02], Provenance::LoadedOfficial).unwrap();
        let pop = population_for_year(2020, &[1000.0, 2000.0]);
        let groups = [group(0, 1)];
        let e = expected_method1(&table, &pop, &groups, &[YearLabel(2020)]).unwrap();
        assert_eq!(e.value(YearLabel(2020), groups[0]).unwrap(), 50.0);
    }

    #[test]
    fn method1_zero_table_gives_zero_everywhere() {
        let table = LifeTable::from_qx(vec![0.0; 4], Provenance::LoadedOfficial).unwrap();
        let pop = population_for_year(2020, &[10.0, 20.0, 30.0, 40.0]);
        let groups = [group(0, 1), group(2, 3)];
        let e = expected_method1(&table, &pop, &groups, &[YearLabel(2020)]).unwrap();
        for &g in &groups {
            assert_eq!(e.value(YearLabel(2020), g).unwrap(), 0.0);
        }
    }

    #[test]
    fn method2_matches_hand_computed_example() {
        // q̃ = {0.015, 0.025}, P = {1000, 2000}: ẽ = 15 + 50 = 65.
        let cohort = cohort(&[0.015, 0.025]);
        let pop = population_for_year(2020, &[1000.0, 2000.0]);
        let groups = [group(0, 1)];
        let e = expected_method2(&cohort, &pop, &groups, &[YearLabel(2020)]).unwrap();
        assert_eq!(e.value(YearLabel(2020), groups[0]).unwrap(), 65.0);
    }

    #[test]
    fn method2_single_age_groups_reduce_to_products() {
        let cohort = cohort(&[0.1, 0.2, 0.3]);
        let pop = population_for_year(2020, &[10.0, 20.0, 30.0]);
        let groups = [group(0, 0), group(1, 1), group(2, 2)];
        let e = expected_method2(&cohort, &pop, &groups, &[YearLabel(2020)]).unwrap();
        assert_relative_eq!(e.value(YearLabel(2020), groups[1]).unwrap(), 0.2 * 20.0);
    }

    #[test]
    fn method2_constant_table_scales_population() {
        let cohort = cohort(&[0.05; 5]);
        let pop = population_for_year(2020, &[10.0, 20.0, 30.0, 40.0, 50.0]);
        let groups = [group(0, 4)];
        let e = expected_method2(&cohort, &pop, &groups, &[YearLabel(2020)]).unwrap();
        assert_relative_eq!(
            e.value(YearLabel(2020), groups[0]).unwrap(),
            0.05 * 150.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn method3_matches_hand_computed_boundary_example() {
        // q̃ = {0.015, 0.025, 0.03}, P ≡ 1000, max age 2:
        // [0,1] -> 35.0, [2,2] -> 42.5, total 77.5.
        let cohort = cohort(&[0.015, 0.025, 0.03]);
        let pop = population_for_year(2020, &[1000.0, 1000.0, 1000.0]);
        let groups = [group(0, 1), group(2, 2)];
        let e = expected_method3(&cohort, &pop, &groups, &[YearLabel(2020)]).unwrap();
        assert_eq!(e.value(YearLabel(2020), groups[0]).unwrap(), 35.0);
        assert_eq!(e.value(YearLabel(2020), groups[1]).unwrap(), 42.5);
        assert_eq!(e.total(YearLabel(2020)).unwrap(), 77.5);
    }

    #[test]
    fn method3_total_exceeds_method2_by_half_first_term() {
        let cohort = cohort(&[0.015, 0.025, 0.03]);
        let pop = population_for_year(2020, &[1000.0, 1000.0, 1000.0]);
        let groups = [group(0, 1), group(2, 2)];
        let y = YearLabel(2020);
        let e2 = expected_method2(&cohort, &pop, &groups, &[y]).unwrap();
        let e3 = expected_method3(&cohort, &pop, &groups, &[y]).unwrap();
        assert_eq!(e2.total(y).unwrap(), 70.0);
        assert_eq!(
            e3.total(y).unwrap(),
            e2.total(y).unwrap() + 0.5 * 0.015 * 1000.0
        );
    }

    #[test]
    fn method3_open_ended_top_group() {
        let cohort = cohort(&[0.015, 0.025, 0.03]);
        let pop = population_for_year(2020, &[1000.0, 1000.0, 1000.0]);
        let groups = [group(0, 1), AgeGroup::open(Age(2))];
        let e = expected_method3(&cohort, &pop, &groups, &[YearLabel(2020)]).unwrap();
        assert_eq!(e.value(YearLabel(2020), groups[1]).unwrap(), 42.5);
    }

    #[test]
    fn methods_reject_non_partitioning_groups() {
        let table = LifeTable::from_qx(vec![0.01, 0.02], Provenance::LoadedOfficial).unwrap();
        let pop = population_for_year(2020, &[1000.0, 2000.0]);
        let groups = [group(0, 0)]; // misses age 1
        assert!(matches!(
            expected_method1(&table, &pop, &groups, &[YearLabel(2020)]),
            Err(Error::PartitionGap { .. })
        ));
    }

    #[test]
    fn methods_reject_missing_population_years() {
        let table = LifeTable::from_qx(vec![0.01, 0.02], Provenance::LoadedOfficial).unwrap();
        let pop = population_for_year(2020, &[1000.0, 2000.0]);
        let groups = [group(0, 1)];
        assert!(matches!(
            expected_method1(&table, &pop, &groups, &[YearLabel(2021)]),
            Err(Error::MissingPopulation { .. })
        ));
    }

    #[test]
    fn methods_reject_table_population_range_mismatch() {
        let table = LifeTable::from_qx(vec![0.01; 3], Provenance::LoadedOfficial).unwrap();
        let pop = population_for_year(2020, &[1000.0, 2000.0]);
        assert!(matches!(
            expected_method1(&table, &pop, &[group(0, 1)], &[YearLabel(2020)]),
            Err(Error::AgeRangeMismatch { .. })
        ));
    }

    #[test]
    fn excess_table_diffs_and_percentages() {
        let table = ExcessTable::from_counts(
            YearLabel(2020),
            vec![
                (group(0, 50), 100.0, 120.0),
                (AgeGroup::open(Age(51)), 50.0, 50.0),
            ],
        );
        let (_, first) = table.rows[0];
        assert_eq!(first.absolute_diff, 20.0);
        assert_eq!(first.relative_diff, Some(0.2));
        assert_eq!(first.relative_pct(), Some(20));
        let (_, second) = table.rows[1];
        assert_eq!(second.absolute_diff, 0.0);
        assert_eq!(second.relative_pct(), Some(0));
        assert_eq!(table.total.expected, 150.0);
        assert_eq!(table.total.observed, 170.0);
        assert_eq!(table.total.absolute_diff, 20.0);
    }

    #[test]
    fn excess_table_requires_matching_groups() {
        let cohort = cohort(&[0.015, 0.025]);
        let pop = population_for_year(2020, &[1000.0, 1000.0]);
        let groups = [group(0, 1)];
        let e = expected_method2(&cohort, &pop, &groups, &[YearLabel(2020)]).unwrap();
        let mut m = BTreeMap::new();
        m.insert((YearLabel(2020), group(0, 0)), 5);
        m.insert((YearLabel(2020), group(1, 1)), 5);
        let observed = YearlyGroupDeaths::new(m).unwrap();
        assert!(matches!(
            excess_table(&e, &observed, YearLabel(2020)),
            Err(Error::GroupMismatch { .. })
        ));
    }

    #[test]
    fn excess_identical_counts_are_all_zero() {
        let cohort = cohort(&[0.01, 0.01]);
        let pop = population_for_year(2020, &[1000.0, 1000.0]);
        let groups = [group(0, 1)];
        let e = expected_method2(&cohort, &pop, &groups, &[YearLabel(2020)]).unwrap();
        let mut m = BTreeMap::new();
        m.insert((YearLabel(2020), group(0, 1)), 20);
        let observed = YearlyGroupDeaths::new(m).unwrap();
        let t = excess_table(&e, &observed, YearLabel(2020)).unwrap();
        assert_eq!(t.total.absolute_diff, 0.0);
        assert_eq!(t.total.relative_pct(), Some(0));
    }

    #[test]
    fn rmse_matches_hand_computed_residuals() {
        // Residuals (10, -10, 10, -10) over four years: RMSE = 10.
        let cohort = cohort(&[0.01]);
        let years: Vec<YearLabel> = (2016..=2019).map(YearLabel).collect();
        let mut pm = BTreeMap::new();
        for y in 2015..=2018 {
            pm.insert((YearLabel(y), Age(0)), 10000.0);
        }
        let pop = PopulationSeries::new(pm).unwrap();
        let groups = [group(0, 0)];
        let e = expected_method2(&cohort, &pop, &groups, &years).unwrap();
        // expected = 100 each year; observe 110, 90, 110, 90.
        let mut om = BTreeMap::new();
        for (i, &y) in years.iter().enumerate() {
            om.insert((y, groups[0]), if i % 2 == 0 { 110 } else { 90 });
        }
        let observed = YearlyGroupDeaths::new(om).unwrap();
        let report = rmse_compare(&[&e], &observed, &years).unwrap();
        assert_relative_eq!(report.group_rmse(Method::M2, groups[0]).unwrap(), 10.0);
        assert_relative_eq!(report.overall_rmse(Method::M2).unwrap(), 10.0);
    }

    #[test]
    fn rmse_zero_when_expected_equals_observed() {
        let cohort = cohort(&[0.01]);
        let years = [YearLabel(2019)];
        let pop = population_for_year(2019, &[10000.0]);
        let groups = [group(0, 0)];
        let e = expected_method2(&cohort, &pop, &groups, &years).unwrap();
        let mut om = BTreeMap::new();
        om.insert((years[0], groups[0]), 100);
        let observed = YearlyGroupDeaths::new(om).unwrap();
        let report = rmse_compare(&[&e], &observed, &years).unwrap();
        assert_eq!(report.group_rmse(Method::M2, groups[0]).unwrap(), 0.0);
        assert_eq!(report.overall_rmse(Method::M2).unwrap(), 0.0);
        assert_eq!(report.best_overall(), Some(Method::M2));
    }

    #[test]
    fn rmse_rejects_empty_year_set() {
        let cohort = cohort(&[0.01]);
        let pop = population_for_year(2019, &[10000.0]);
        let groups = [group(0, 0)];
        let e = expected_method2(&cohort, &pop, &groups, &[YearLabel(2019)]).unwrap();
        let mut om = BTreeMap::new();
        om.insert((YearLabel(2019), groups[0]), 100);
        let observed = YearlyGroupDeaths::new(om).unwrap();
        assert!(matches!(
            rmse_compare(&[&e], &observed, &[]),
            Err(Error::EmptyYears)
        ));
    }

    #[test]
    fn method_parsing() {
        assert_eq!("1".parse::<Method>().unwrap(), Method::M1);
        assert_eq!("m3".parse::<Method>().unwrap(), Method::M3);
        assert_eq!("M2".parse::<Method>().unwrap(), Method::M2);
        assert!("4".parse::<Method>().is_err());
    }
}
