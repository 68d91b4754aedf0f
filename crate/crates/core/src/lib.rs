//! Age-adjusted expected and excess mortality from life tables.
//!
//! The crate estimates period death probabilities from raw deaths and
//! Dec 31 population stocks, derives cohort-corrected probabilities, and
//! computes expected yearly deaths per age group with three methods of
//! increasing refinement. A weekly pipeline interpolates populations to
//! ISO weeks, averages reference-year death probabilities (imputing the
//! missing week 53 of 52-week years) and reports standardized mortality
//! ratios, optionally direct-standardized onto a common standard
//! population. An RMSE harness compares the methods against observed
//! deaths.
//!
//! All series types validate on construction; computation never touches
//! raw files. The `exmort` binary wires the pipeline to CSV in and out.

pub mod cli;
pub mod error;
pub mod io;
pub mod life_table;
pub mod series;
pub mod types;
pub mod weekly;
pub mod yearly;

pub use error::{Error, Result};
pub use io::{load_deaths, load_life_table, load_population, load_standard_population};
pub use life_table::{derive_cohort_table, estimate_qx_multiyear, CohortLifeTable, LifeTable};
pub use series::{
    DeathSeries, PopulationSeries, Resolution, StandardPopulation, WeeklyGroupDeaths,
    YearlyAgeDeaths, YearlyGroupDeaths,
};
pub use types::{iso_weeks_in_year, Age, AgeGroup, IsoWeek, YearLabel};
pub use weekly::{
    direct_standardized, indirect_pipeline, DirectStdSeries, SmrSeries, WeeklyPopulation,
    WeeklyRateSeries,
};
pub use yearly::{
    excess_table, expected_method1, expected_method2, expected_method3, rmse_compare, ExcessTable,
    ExpectedDeathsYearly, Method, RmseReport,
};
