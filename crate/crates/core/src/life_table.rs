//! Period life tables and their cohort correction.
//!
//! A period table gives the probability `q_x` that a person who has
//! completed `x` years of age dies before their next birthday, estimated
//! from death counts and year-end population stocks. The cohort table
//! `q̃_x` averages neighbouring probabilities so that it measures deaths
//! within a calendar year for people aged `x` at its start, which is the
//! quantity expected-death calculations need.

use crate::error::{Error, Result};
use crate::series::{PopulationSeries, YearlyAgeDeaths};
use crate::types::{Age, YearLabel};

/// Where a life table came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Loaded from an official table file.
    LoadedOfficial,
    /// Estimated from deaths and population stocks over `[start, end]`.
    Estimated { start: YearLabel, end: YearLabel },
}

/// Period death probabilities `q_x` for every age `0..=max_age`.
#[derive(Debug, Clone, PartialEq)]
pub struct LifeTable {
    qx: Vec<f64>,
    provenance: Provenance,
}

impl LifeTable {
    /// Builds a table from probabilities indexed by age starting at 0.
    /// Every value must lie in `[0, 1]`.
    pub fn from_qx(qx: Vec<f64>, provenance: Provenance) -> Result<LifeTable> {
        if qx.is_empty() {
            return Err(Error::Invalid("life table is empty".into()));
        }
        for (age, &q) in qx.iter().enumerate() {
            if !(0.0..=1.0).contains(&q) || !q.is_finite() {
                return Err(Error::QxOutOfRange {
                    age: Age(age as u32),
                    value: q,
                });
            }
        }
        Ok(LifeTable { qx, provenance })
    }

    pub fn max_age(&self) -> Age {
        Age((self.qx.len() - 1) as u32)
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn qx(&self, age: Age) -> Result<f64> {
        self.qx
            .get(age.0 as usize)
            .copied()
            .ok_or(Error::AgeRangeMismatch {
                table_max: self.max_age(),
                population_max: age,
            })
    }

    pub fn values(&self) -> &[f64] {
        &self.qx
    }
}

/// Cohort-corrected probabilities `q̃_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortLifeTable {
    qtilde: Vec<f64>,
}

impl CohortLifeTable {
    /// Builds a table from precomputed `q̃_x` values indexed by age 0..=max.
    pub fn from_qtilde(qtilde: Vec<f64>) -> Result<CohortLifeTable> {
        if qtilde.is_empty() {
            return Err(Error::Invalid(
                "life table must cover at least age 0".into(),
            ));
        }
        for (age, &q) in qtilde.iter().enumerate() {
            if !(0.0..=1.0).contains(&q) || q.is_nan() {
                return Err(Error::QxOutOfRange {
                    age: Age(age as u32),
                    value: q,
                });
            }
        }
        Ok(CohortLifeTable { qtilde })
    }

    pub fn max_age(&self) -> Age {
        Age((self.qtilde.len() - 1) as u32)
    }

    pub fn qtilde(&self, age: Age) -> Result<f64> {
        self.qtilde
            .get(age.0 as usize)
            .copied()
            .ok_or(Error::AgeRangeMismatch {
                table_max: self.max_age(),
                population_max: age,
            })
    }

    pub fn values(&self) -> &[f64] {
        &self.qtilde
    }
}

/// Estimates `q_x` from cumulated deaths and averaged year-end stocks over
/// the window `[start_year, end_year]`:
///
/// ```text
/// q_x = D_x / ( Σ_{y=start}^{end-1} (P_{x,y} + P_{x,y+1})/2 + D_x/2 )
/// ```
///
/// where `D_x` cumulates deaths of `x`-year-olds over the calendar years
/// `start_year+1 ..= end_year` and `P_{x,y}` is the Dec 31 stock. Values
/// outside `[0, 1]` are reported as errors, never clamped: they signal
/// misaligned inputs.
pub fn estimate_qx_multiyear(
    deaths: &YearlyAgeDeaths,
    population: &PopulationSeries,
    start_year: YearLabel,
    end_year: YearLabel,
) -> Result<LifeTable> {
    if start_year >= end_year {
        return Err(Error::InvalidYearWindow {
            start: start_year,
            end: end_year,
        });
    }
    let max_age = population.max_age();
    let mut qx = Vec::with_capacity(max_age.0 as usize + 1);
    for a in 0..=max_age.0 {
        let age = Age(a);
        let mut dx = 0u64;
        for y in start_year.0 + 1..=end_year.0 {
            dx += deaths.count(YearLabel(y), age)?;
        }
        let dx = dx as f64;
        let mut exposure = 0.0;
        for y in start_year.0..end_year.0 {
            let p0 = population.stock(YearLabel(y), age)?;
            let p1 = population.stock(YearLabel(y + 1), age)?;
            exposure += (p0 + p1) / 2.0;
        }
        let denominator = exposure + dx / 2.0;
        if denominator == 0.0 {
            return Err(Error::ZeroExposure { age });
        }
        let q = dx / denominator;
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::QxOutOfRange { age, value: q });
        }
        qx.push(q);
    }
    LifeTable::from_qx(
        qx,
        Provenance::Estimated {
            start: start_year,
            end: end_year,
        },
    )
}

/// Derives the cohort table: `q̃_x = (q_x + q_{x+1}) / 2`, with the top
/// age kept as-is since no `q_{max+1}` exists and the open-ended top group
/// absorbs all remaining mortality.
pub fn derive_cohort_table(table: &LifeTable) -> CohortLifeTable {
    let qx = table.values();
    let n = qx.len();
    let mut qtilde = Vec::with_capacity(n);
    for x in 0..n {
        if x + 1 < n {
            qtilde.push((qx[x] + qx[x + 1]) / 2.0);
        } else {
            qtilde.push(qx[x]);
        }
    }
    CohortLifeTable { qtilde }
}
