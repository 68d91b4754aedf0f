//! Command-line interface: argument parsing, orchestration and report
//! emission.
//!
//! Outputs are staged in memory and written only after every computation
//! has succeeded, so a failing run never leaves partial files behind.
//! Exit codes: 0 success, 2 validation error, 3 i/o error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::io;
use crate::life_table::derive_cohort_table;
use crate::series::Resolution;
use crate::types::{iso_weeks_in_year, YearLabel};
use crate::weekly::{direct_standardized, indirect_pipeline, yearly_aggregate_weekly};
use crate::yearly::{
    excess_table, expected_method1, expected_method2, expected_method3, rmse_compare,
    ExpectedDeathsYearly, Method,
};

#[derive(Parser)]
#[command(
    name = "exmort",
    version,
    about = "Age-adjusted expected and excess mortality from life tables"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or validate life tables.
    #[command(subcommand)]
    Lifetable(LifetableCmd),
    /// Yearly expected deaths, excess tables and method comparison.
    #[command(subcommand)]
    Yearly(YearlyCmd),
    /// Weekly SMR pipeline and direct standardization.
    #[command(subcommand)]
    Weekly(WeeklyCmd),
}

#[derive(Subcommand)]
enum LifetableCmd {
    /// Estimate period death probabilities from deaths and population
    /// stocks over a year window, then derive the cohort table.
    Build {
        /// population.csv with Dec 31 stocks (`year,age,count`)
        #[arg(long)]
        population: PathBuf,
        /// deaths_yearly_age.csv (`year,age,count`)
        #[arg(long)]
        deaths: PathBuf,
        /// estimation window, e.g. `2015-2019` (deaths of 2016-2019)
        #[arg(long)]
        years: String,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Validate an official life table and derive the cohort table.
    Load {
        /// lifetable.csv (`age,qx`)
        #[arg(long)]
        lifetable: PathBuf,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct YearlyArgs {
    /// population.csv with Dec 31 stocks (`year,age,count`)
    #[arg(long)]
    population: PathBuf,
    /// lifetable.csv (`age,qx`)
    #[arg(long)]
    lifetable: PathBuf,
    /// deaths_yearly_group.csv with observed deaths; also supplies the
    /// age-group partition
    #[arg(long)]
    deaths: PathBuf,
    /// methods to run, e.g. `1,2,3` or `M3`
    #[arg(long, default_value = "1,2,3")]
    methods: String,
    /// years to compute, e.g. `2016-2020` or `2016,2017`
    #[arg(long)]
    years: String,
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
    /// reproduce the printed-table rounding instead of full precision
    #[arg(long)]
    rounded: bool,
}

#[derive(Subcommand)]
enum YearlyCmd {
    /// Expected deaths per method, year and age group.
    Expected {
        #[command(flatten)]
        args: YearlyArgs,
    },
    /// Expected vs observed deaths for one target year.
    Excess {
        #[command(flatten)]
        args: YearlyArgs,
        /// year whose excess table to produce
        #[arg(long)]
        target_year: i32,
    },
    /// Method comparison: RMSE against observed deaths, excluding the
    /// target year from the comparison window.
    Rmse {
        #[command(flatten)]
        args: YearlyArgs,
        /// year to exclude from RMSE and report excess for
        #[arg(long)]
        target_year: i32,
    },
}

#[derive(Args)]
struct WeeklyArgs {
    /// population.csv with Dec 31 stocks (`year,age,count`)
    #[arg(long)]
    population: PathBuf,
    /// deaths_weekly.csv (`iso_year,iso_week,age_lower,age_upper,count`)
    #[arg(long)]
    deaths: PathBuf,
    /// reference years to average over, e.g. `2016-2019`
    #[arg(long)]
    reference_years: String,
    /// target year for the SMR series
    #[arg(long)]
    target_year: i32,
    /// target weeks, e.g. `1-53`; defaults to every ISO week of the
    /// target year
    #[arg(long)]
    weeks: Option<String>,
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
    /// reproduce the printed-table rounding instead of full precision
    #[arg(long)]
    rounded: bool,
}

#[derive(Subcommand)]
enum WeeklyCmd {
    /// Weekly observed, expected and SMR per age group.
    Smr {
        #[command(flatten)]
        args: WeeklyArgs,
        /// standard_population.csv; when supplied, direct_std.csv is
        /// also written
        #[arg(long)]
        standard_population: Option<PathBuf>,
    },
    /// Direct standardization onto a standard population.
    Direct {
        #[command(flatten)]
        args: WeeklyArgs,
        /// standard_population.csv (`age_lower,age_upper,count`)
        #[arg(long)]
        standard_population: PathBuf,
    },
    /// Aggregate the weekly SMR series into a yearly excess table.
    Aggregate {
        #[command(flatten)]
        args: WeeklyArgs,
    },
}

/// Parses `2016-2020`, `2016,2018` or a mix of both into year labels.
fn parse_years(s: &str) -> Result<Vec<YearLabel>> {
    let mut years = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((a, b)) = part.split_once('-') {
            let start: i32 = a
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("invalid year '{a}' in '{s}'")))?;
            let end: i32 = b
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("invalid year '{b}' in '{s}'")))?;
            if start > end {
                return Err(Error::Invalid(format!("year range '{part}' is reversed")));
            }
            years.extend((start..=end).map(YearLabel));
        } else {
            years.push(YearLabel(part.parse().map_err(|_| {
                Error::Invalid(format!("invalid year '{part}' in '{s}'"))
            })?));
        }
    }
    if years.is_empty() {
        return Err(Error::EmptyYears);
    }
    Ok(years)
}

/// Parses `1-53` or `1,2,3` into week numbers.
fn parse_weeks(s: &str) -> Result<Vec<u32>> {
    let mut weeks = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((a, b)) = part.split_once('-') {
            let start: u32 = a
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("invalid week '{a}' in '{s}'")))?;
            let end: u32 = b
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("invalid week '{b}' in '{s}'")))?;
            if start > end {
                return Err(Error::Invalid(format!("week range '{part}' is reversed")));
            }
            weeks.extend(start..=end);
        } else {
            weeks.push(
                part.parse()
                    .map_err(|_| Error::Invalid(format!("invalid week '{part}' in '{s}'")))?,
            );
        }
    }
    if weeks.is_empty() {
        return Err(Error::Invalid("empty week list".into()));
    }
    Ok(weeks)
}

fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let method: Method = part.parse()?;
        if !methods.contains(&method) {
            methods.push(method);
        }
    }
    if methods.is_empty() {
        return Err(Error::Invalid("empty method list".into()));
    }
    Ok(methods)
}

/// Staged output files, written together once the whole run succeeded.
struct Outputs {
    files: Vec<(PathBuf, String)>,
}

impl Outputs {
    fn new() -> Outputs {
        Outputs { files: Vec::new() }
    }

    fn add(&mut self, dir: &Path, name: &str, content: String) {
        self.files.push((dir.join(name), content));
    }

    /// Writes every staged file; on failure removes files written so far
    /// so no partial run output remains.
    fn write_all(self) -> Result<Vec<PathBuf>> {
        if let Some((first, _)) = self.files.first() {
            if let Some(dir) = first.parent() {
                fs::create_dir_all(dir).map_err(|source| Error::Io {
                    path: dir.to_path_buf(),
                    source,
                })?;
            }
        }
        let mut written = Vec::new();
        for (path, content) in &self.files {
            if let Err(source) = fs::write(path, content) {
                for done in &written {
                    let _ = fs::remove_file(done);
                }
                return Err(Error::Io {
                    path: path.clone(),
                    source,
                });
            }
            written.push(path.clone());
        }
        Ok(written)
    }
}

fn cmd_lifetable(cmd: LifetableCmd) -> Result<Outputs> {
    let mut outputs = Outputs::new();
    match cmd {
        LifetableCmd::Build {
            population,
            deaths,
            years,
            out_dir,
        } => {
            let population = io::load_population(&population)?;
            let deaths = io::load_deaths(&deaths, Resolution::YearlyByAge)?;
            let years = parse_years(&years)?;
            let start = *years.iter().min().unwrap();
            let end = *years.iter().max().unwrap();
            let table = crate::life_table::estimate_qx_multiyear(
                deaths.as_yearly_by_age()?,
                &population,
                start,
                end,
            )?;
            let cohort = derive_cohort_table(&table);
            outputs.add(&out_dir, "lifetable.csv", io::lifetable_csv(&table));
            outputs.add(
                &out_dir,
                "cohort_lifetable.csv",
                io::cohort_lifetable_csv(&cohort),
            );
        }
        LifetableCmd::Load { lifetable, out_dir } => {
            let table = io::load_life_table(&lifetable)?;
            let cohort = derive_cohort_table(&table);
            outputs.add(&out_dir, "lifetable.csv", io::lifetable_csv(&table));
            outputs.add(
                &out_dir,
                "cohort_lifetable.csv",
                io::cohort_lifetable_csv(&cohort),
            );
        }
    }
    Ok(outputs)
}

fn expected_series(
    args: &YearlyArgs,
    years: &[YearLabel],
) -> Result<(Vec<ExpectedDeathsYearly>, crate::series::YearlyGroupDeaths)> {
    let population = io::load_population(&args.population)?;
    let table = io::load_life_table(&args.lifetable)?;
    let deaths = io::load_deaths(&args.deaths, Resolution::YearlyByGroup)?;
    let observed = deaths.as_yearly_by_group()?.clone();
    let groups = observed.groups().to_vec();
    let methods = parse_methods(&args.methods)?;
    let cohort = derive_cohort_table(&table);
    let mut series = Vec::new();
    for method in methods {
        series.push(match method {
            Method::M1 => expected_method1(&table, &population, &groups, years)?,
            Method::M2 => expected_method2(&cohort, &population, &groups, years)?,
            Method::M3 => expected_method3(&cohort, &population, &groups, years)?,
        });
    }
    Ok((series, observed))
}

fn cmd_yearly(cmd: YearlyCmd) -> Result<Outputs> {
    let mut outputs = Outputs::new();
    match cmd {
        YearlyCmd::Expected { args } => {
            let years = parse_years(&args.years)?;
            let (series, _) = expected_series(&args, &years)?;
            let refs: Vec<&ExpectedDeathsYearly> = series.iter().collect();
            outputs.add(
                &args.out_dir,
                "expected_yearly.csv",
                io::expected_yearly_csv(&refs),
            );
        }
        YearlyCmd::Excess { args, target_year } => {
            let target = YearLabel(target_year);
            let mut years = parse_years(&args.years)?;
            if !years.contains(&target) {
                years.push(target);
            }
            let (series, observed) = expected_series(&args, &years)?;
            let refs: Vec<&ExpectedDeathsYearly> = series.iter().collect();
            let mut tables = Vec::new();
            for s in &series {
                tables.push((s.method(), excess_table(s, &observed, target)?));
            }
            let table_refs: Vec<(Method, &crate::yearly::ExcessTable)> =
                tables.iter().map(|(m, t)| (*m, t)).collect();
            outputs.add(
                &args.out_dir,
                "expected_yearly.csv",
                io::expected_yearly_csv(&refs),
            );
            outputs.add(
                &args.out_dir,
                "excess_yearly.csv",
                io::excess_yearly_csv(&table_refs, args.rounded),
            );
        }
        YearlyCmd::Rmse { args, target_year } => {
            let target = YearLabel(target_year);
            let mut years = parse_years(&args.years)?;
            if !years.contains(&target) {
                years.push(target);
            }
            let include: Vec<YearLabel> = years.iter().copied().filter(|&y| y != target).collect();
            let (series, observed) = expected_series(&args, &years)?;
            let refs: Vec<&ExpectedDeathsYearly> = series.iter().collect();
            let mut tables = Vec::new();
            for s in &series {
                tables.push((s.method(), excess_table(s, &observed, target)?));
            }
            let table_refs: Vec<(Method, &crate::yearly::ExcessTable)> =
                tables.iter().map(|(m, t)| (*m, t)).collect();
            let report = rmse_compare(&refs, &observed, &include)?;
            outputs.add(
                &args.out_dir,
                "expected_yearly.csv",
                io::expected_yearly_csv(&refs),
            );
            outputs.add(
                &args.out_dir,
                "excess_yearly.csv",
                io::excess_yearly_csv(&table_refs, args.rounded),
            );
            outputs.add(
                &args.out_dir,
                "rmse.csv",
                io::rmse_csv(&report, args.rounded),
            );
        }
    }
    Ok(outputs)
}

fn cmd_weekly(cmd: WeeklyCmd) -> Result<Outputs> {
    let (args, standard_path, want_direct, want_aggregate) = match cmd {
        WeeklyCmd::Smr {
            args,
            standard_population,
        } => (args, standard_population, false, false),
        WeeklyCmd::Direct {
            args,
            standard_population,
        } => (args, Some(standard_population), true, false),
        WeeklyCmd::Aggregate { args } => (args, None, false, true),
    };
    let population = io::load_population(&args.population)?;
    let deaths = io::load_deaths(&args.deaths, Resolution::WeeklyByGroup)?;
    let weekly_deaths = deaths.as_weekly_by_group()?;
    let reference_years = parse_years(&args.reference_years)?;
    let target = YearLabel(args.target_year);
    let weeks = match &args.weeks {
        Some(s) => parse_weeks(s)?,
        None => (1..=iso_weeks_in_year(target.0)).collect(),
    };
    let out = indirect_pipeline(&population, weekly_deaths, &reference_years, target, &weeks)?;

    let mut outputs = Outputs::new();
    if want_aggregate {
        let table = yearly_aggregate_weekly(&out.smr, target)?;
        outputs.add(
            &args.out_dir,
            "aggregated_yearly.csv",
            io::aggregate_yearly_csv(&table, args.rounded),
        );
        return Ok(outputs);
    }
    if !want_direct {
        outputs.add(
            &args.out_dir,
            "smr_weekly.csv",
            io::smr_weekly_csv(&out.smr, args.rounded),
        );
    }
    if let Some(path) = standard_path {
        let standard = io::load_standard_population(&path)?;
        let direct = direct_standardized(&out.rates, &standard, &reference_years, target, &weeks)?;
        outputs.add(
            &args.out_dir,
            "direct_std.csv",
            io::direct_std_csv(&direct, args.rounded),
        );
    }
    Ok(outputs)
}

/// Runs a parsed command line; on success returns the list of files
/// written.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let outputs = match cli.command {
        Command::Lifetable(cmd) => cmd_lifetable(cmd)?,
        Command::Yearly(cmd) => cmd_yearly(cmd)?,
        Command::Weekly(cmd) => cmd_weekly(cmd)?,
    };
    outputs.write_all()
}
