use std::path::PathBuf;

use thiserror::Error;

use crate::types::{Age, YearLabel};

/// Errors produced by ingestion and computation.
///
/// Validation failures (bad schemas, coverage gaps, out-of-range values)
/// are kept separate from plain i/o failures so the CLI can map them to
/// distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {detail}")]
    Schema { path: PathBuf, detail: String },

    #[error("population series has no entry for (year {year}, age {age})")]
    MissingPopulation { year: YearLabel, age: Age },

    #[error("death series has no entry for {key}")]
    MissingDeaths { key: String },

    #[error("negative count {value} at {location}")]
    NegativeCount { value: f64, location: String },

    #[error("{year}-W{week:02} is not a valid ISO week ({year} has {weeks_in_year} ISO weeks)")]
    InvalidIsoWeek {
        year: i32,
        week: u32,
        weeks_in_year: u32,
    },

    #[error("age group list is empty")]
    EmptyPartition,

    #[error("age groups leave a gap at age {age}")]
    PartitionGap { age: Age },

    #[error("age groups overlap at age {age}")]
    PartitionOverlap { age: Age },

    #[error("age group bound {age} exceeds the maximum age {max_age}")]
    PartitionBound { age: Age, max_age: Age },

    #[error("invalid age group: lower bound {lower} exceeds upper bound {upper}")]
    InvalidAgeGroup { lower: Age, upper: Age },

    #[error(
        "q_{age} = {value} lies outside [0, 1]; deaths and population inputs are inconsistent"
    )]
    QxOutOfRange { age: Age, value: f64 },

    #[error("zero exposure at age {age}: no population at risk")]
    ZeroExposure { age: Age },

    #[error("probability {value} for {key} lies outside [0, 1]")]
    RateOutOfRange { key: String, value: f64 },

    #[error("zero population but {deaths} deaths for {key}")]
    ZeroPopulation { key: String, deaths: u64 },

    #[error("missing weekly rate for {key}")]
    MissingRate { key: String },

    #[error("missing weekly population for {key}")]
    MissingWeeklyPopulation { key: String },

    #[error("age groups differ between inputs: {detail}")]
    GroupMismatch { detail: String },

    #[error("empty year list")]
    EmptyYears,

    #[error("life table covers ages 0..={table_max} but population covers 0..={population_max}")]
    AgeRangeMismatch { table_max: Age, population_max: Age },

    #[error("year window [{start}, {end}] must satisfy start < end")]
    InvalidYearWindow { start: YearLabel, end: YearLabel },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// Process exit code for the CLI: 3 for i/o failures, 2 for validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
