//! CSV ingestion and report serialization.
//!
//! All inputs are UTF-8 CSV with a mandatory header row and `.` decimal
//! separator. Loaders validate eagerly so computation modules only ever
//! see well-formed series; writers produce deterministic strings so
//! identical inputs yield byte-identical outputs.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};
use crate::life_table::{CohortLifeTable, LifeTable, Provenance};
use crate::series::{
    DeathSeries, PopulationSeries, Resolution, StandardPopulation, WeeklyGroupDeaths,
    YearlyAgeDeaths, YearlyGroupDeaths,
};
use crate::types::{Age, AgeGroup, IsoWeek, YearLabel};
use crate::weekly::{DirectStdSeries, SmrSeries};
use crate::yearly::{ExcessTable, ExpectedDeathsYearly, Method, RmseReport};

fn schema_error(path: &Path, detail: String) -> Error {
    Error::Schema {
        path: path.to_path_buf(),
        detail,
    }
}

/// Reads all records of a CSV file after checking the exact header.
fn read_records(path: &Path, expected_header: &[&str]) -> Result<Vec<(u64, Vec<String>)>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| schema_error(path, e.to_string()))?;
    let found: Vec<&str> = headers.iter().collect();
    if found != expected_header {
        return Err(schema_error(
            path,
            format!(
                "expected header '{}', found '{}'",
                expected_header.join(","),
                found.join(",")
            ),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => {
                if let csv::ErrorKind::Io(io) = e.into_kind() {
                    Error::Io {
                        path: path.to_path_buf(),
                        source: io,
                    }
                } else {
                    unreachable!()
                }
            }
            _ => schema_error(path, e.to_string()),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        rows.push((line, record.iter().map(str::to_owned).collect()));
    }
    Ok(rows)
}

fn parse_i32(path: &Path, line: u64, name: &str, field: &str) -> Result<i32> {
    field
        .parse()
        .map_err(|_| schema_error(path, format!("line {line}: invalid {name} '{field}'")))
}

fn parse_u32(path: &Path, line: u64, name: &str, field: &str) -> Result<u32> {
    field
        .parse()
        .map_err(|_| schema_error(path, format!("line {line}: invalid {name} '{field}'")))
}

/// Non-negative integer count; negative values get the dedicated error.
fn parse_count(path: &Path, line: u64, field: &str) -> Result<u64> {
    if field.starts_with('-') {
        if let Ok(v) = field.parse::<f64>() {
            return Err(Error::NegativeCount {
                value: v,
                location: format!("{} line {line}", path.display()),
            });
        }
    }
    field
        .parse()
        .map_err(|_| schema_error(path, format!("line {line}: invalid count '{field}'")))
}

/// Non-negative real count (admits projected, non-integral populations).
fn parse_real_count(path: &Path, line: u64, field: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| schema_error(path, format!("line {line}: invalid count '{field}'")))?;
    if !v.is_finite() {
        return Err(schema_error(
            path,
            format!("line {line}: non-finite count '{field}'"),
        ));
    }
    if v < 0.0 {
        return Err(Error::NegativeCount {
            value: v,
            location: format!("{} line {line}", path.display()),
        });
    }
    Ok(v)
}

fn parse_group(path: &Path, line: u64, lower: &str, upper: &str) -> Result<AgeGroup> {
    let lower = Age(parse_u32(path, line, "age_lower", lower)?);
    if upper.is_empty() {
        return Ok(AgeGroup::open(lower));
    }
    let upper = Age(parse_u32(path, line, "age_upper", upper)?);
    AgeGroup::new(lower, upper)
}

/// Loads `population.csv` (`year,age,count`), requiring a complete
/// year-range × age-range grid.
pub fn load_population(path: &Path) -> Result<PopulationSeries> {
    let mut counts = BTreeMap::new();
    for (line, fields) in read_records(path, &["year", "age", "count"])? {
        let year = YearLabel(parse_i32(path, line, "year", &fields[0])?);
        let age = Age(parse_u32(path, line, "age", &fields[1])?);
        let count = parse_real_count(path, line, &fields[2])?;
        if counts.insert((year, age), count).is_some() {
            return Err(schema_error(
                path,
                format!("line {line}: duplicate row for (year {year}, age {age})"),
            ));
        }
    }
    PopulationSeries::new(counts)
}

/// Loads a death-count file at the given resolution:
/// `deaths_yearly_age.csv` (`year,age,count`), `deaths_yearly_group.csv`
/// (`year,age_lower,age_upper,count`) or `deaths_weekly.csv`
/// (`iso_year,iso_week,age_lower,age_upper,count`).
pub fn load_deaths(path: &Path, resolution: Resolution) -> Result<DeathSeries> {
    match resolution {
        Resolution::YearlyByAge => {
            let mut counts = BTreeMap::new();
            for (line, fields) in read_records(path, &["year", "age", "count"])? {
                let year = YearLabel(parse_i32(path, line, "year", &fields[0])?);
                let age = Age(parse_u32(path, line, "age", &fields[1])?);
                let count = parse_count(path, line, &fields[2])?;
                if counts.insert((year, age), count).is_some() {
                    return Err(schema_error(
                        path,
                        format!("line {line}: duplicate row for (year {year}, age {age})"),
                    ));
                }
            }
            Ok(DeathSeries::YearlyByAge(YearlyAgeDeaths::new(counts)?))
        }
        Resolution::YearlyByGroup => {
            let mut counts = BTreeMap::new();
            for (line, fields) in read_records(path, &["year", "age_lower", "age_upper", "count"])?
            {
                let year = YearLabel(parse_i32(path, line, "year", &fields[0])?);
                let group = parse_group(path, line, &fields[1], &fields[2])?;
                let count = parse_count(path, line, &fields[3])?;
                if counts.insert((year, group), count).is_some() {
                    return Err(schema_error(
                        path,
                        format!("line {line}: duplicate row for (year {year}, group {group})"),
                    ));
                }
            }
            Ok(DeathSeries::YearlyByGroup(YearlyGroupDeaths::new(counts)?))
        }
        Resolution::WeeklyByGroup => {
            let mut counts = BTreeMap::new();
            for (line, fields) in read_records(
                path,
                &["iso_year", "iso_week", "age_lower", "age_upper", "count"],
            )? {
                let year = parse_i32(path, line, "iso_year", &fields[0])?;
                let week_no = parse_u32(path, line, "iso_week", &fields[1])?;
                let week = IsoWeek::new(year, week_no)?;
                let group = parse_group(path, line, &fields[2], &fields[3])?;
                let count = parse_count(path, line, &fields[4])?;
                if counts.insert((week, group), count).is_some() {
                    return Err(schema_error(
                        path,
                        format!("line {line}: duplicate row for ({week}, group {group})"),
                    ));
                }
            }
            Ok(DeathSeries::WeeklyByGroup(WeeklyGroupDeaths::new(counts)?))
        }
    }
}

/// Loads `lifetable.csv` (`age,qx`), requiring contiguous ages from 0.
pub fn load_life_table(path: &Path) -> Result<LifeTable> {
    let mut values = BTreeMap::new();
    for (line, fields) in read_records(path, &["age", "qx"])? {
        let age = parse_u32(path, line, "age", &fields[0])?;
        let qx: f64 = fields[1]
            .parse()
            .map_err(|_| schema_error(path, format!("line {line}: invalid qx '{}'", fields[1])))?;
        if values.insert(age, qx).is_some() {
            return Err(schema_error(
                path,
                format!("line {line}: duplicate row for age {age}"),
            ));
        }
    }
    if values.is_empty() {
        return Err(schema_error(path, "no data rows".into()));
    }
    let max_age = *values.keys().next_back().unwrap();
    let mut qx = Vec::with_capacity(max_age as usize + 1);
    for age in 0..=max_age {
        match values.get(&age) {
            Some(&q) => qx.push(q),
            None => {
                return Err(schema_error(path, format!("no row for age {age}")));
            }
        }
    }
    LifeTable::from_qx(qx, Provenance::LoadedOfficial)
}

/// Loads `standard_population.csv` (`age_lower,age_upper,count`).
pub fn load_standard_population(path: &Path) -> Result<StandardPopulation> {
    let mut counts = BTreeMap::new();
    for (line, fields) in read_records(path, &["age_lower", "age_upper", "count"])? {
        let group = parse_group(path, line, &fields[0], &fields[1])?;
        let count = parse_real_count(path, line, &fields[2])?;
        if counts.insert(group, count).is_some() {
            return Err(schema_error(
                path,
                format!("line {line}: duplicate row for group {group}"),
            ));
        }
    }
    StandardPopulation::new(counts)
}

fn group_bounds(group: AgeGroup) -> (String, String) {
    let lower = group.lower().0.to_string();
    let upper = group.upper().map(|a| a.0.to_string()).unwrap_or_default();
    (lower, upper)
}

pub fn population_csv(series: &PopulationSeries) -> String {
    let mut out = String::from("year,age,count\n");
    for (year, age, count) in series.entries() {
        out.push_str(&format!("{year},{age},{count}\n"));
    }
    out
}

pub fn deaths_yearly_age_csv(series: &YearlyAgeDeaths) -> String {
    let mut out = String::from("year,age,count\n");
    for (year, age, count) in series.entries() {
        out.push_str(&format!("{year},{age},{count}\n"));
    }
    out
}

pub fn deaths_yearly_group_csv(series: &YearlyGroupDeaths) -> String {
    let mut out = String::from("year,age_lower,age_upper,count\n");
    for (year, group, count) in series.entries() {
        let (lower, upper) = group_bounds(group);
        out.push_str(&format!("{year},{lower},{upper},{count}\n"));
    }
    out
}

pub fn deaths_weekly_csv(series: &WeeklyGroupDeaths) -> String {
    let mut out = String::from("iso_year,iso_week,age_lower,age_upper,count\n");
    for (week, group, count) in series.entries() {
        let (lower, upper) = group_bounds(group);
        out.push_str(&format!(
            "{},{},{lower},{upper},{count}\n",
            week.year(),
            week.week()
        ));
    }
    out
}

pub fn lifetable_csv(table: &LifeTable) -> String {
    let mut out = String::from("age,qx\n");
    for (age, q) in table.values().iter().enumerate() {
        out.push_str(&format!("{age},{q}\n"));
    }
    out
}

pub fn cohort_lifetable_csv(table: &CohortLifeTable) -> String {
    let mut out = String::from("age,qtilde\n");
    for (age, q) in table.values().iter().enumerate() {
        out.push_str(&format!("{age},{q}\n"));
    }
    out
}

pub fn standard_population_csv(series: &StandardPopulation) -> String {
    let mut out = String::from("age_lower,age_upper,count\n");
    for &group in series.groups() {
        let (lower, upper) = group_bounds(group);
        let count = series.count(group).expect("group comes from the series");
        out.push_str(&format!("{lower},{upper},{count}\n"));
    }
    out
}

pub fn expected_yearly_csv(series: &[&ExpectedDeathsYearly]) -> String {
    let mut out = String::from("method,year,age_lower,age_upper,expected\n");
    for s in series {
        for (year, group, value) in s.entries() {
            let (lower, upper) = group_bounds(group);
            out.push_str(&format!("{},{year},{lower},{upper},{value}\n", s.method()));
        }
    }
    out
}

/// Signed integer in the printed-table style: `+6741`, `-205`, `+0`.
fn fmt_signed(v: f64) -> String {
    let r = v.round();
    if r >= 0.0 {
        format!("+{}", r as i64)
    } else {
        format!("{}", r as i64)
    }
}

fn fmt_signed_pct(pct: Option<i64>) -> String {
    match pct {
        Some(p) if p >= 0 => format!("+{p}%"),
        Some(p) => format!("{p}%"),
        None => "NA".into(),
    }
}

fn excess_row(
    out: &mut String,
    prefix: &str,
    bounds: (String, String),
    cells: &crate::yearly::ExcessCells,
    rounded: bool,
) {
    let (lower, upper) = bounds;
    if rounded {
        out.push_str(&format!(
            "{prefix}{lower},{upper},{},{},{},{}\n",
            cells.expected.round() as i64,
            cells.observed.round() as i64,
            fmt_signed(cells.absolute_diff),
            fmt_signed_pct(cells.relative_pct()),
        ));
    } else {
        let pct = match cells.relative_diff {
            Some(r) => format!("{}", r * 100.0),
            None => "NA".into(),
        };
        out.push_str(&format!(
            "{prefix}{lower},{upper},{},{},{},{pct}\n",
            cells.expected, cells.observed, cells.absolute_diff,
        ));
    }
}

/// Excess tables per method: per-group rows plus a total row with empty
/// age bounds. `rounded` reproduces the printed-table formatting
/// (integer counts, signed differences, whole signed percentages).
pub fn excess_yearly_csv(tables: &[(Method, &ExcessTable)], rounded: bool) -> String {
    let mut out = String::from("method,year,age_lower,age_upper,expected,observed,diff,diff_pct\n");
    for (method, table) in tables {
        for (group, cells) in &table.rows {
            let prefix = format!("{method},{},", table.year);
            excess_row(&mut out, &prefix, group_bounds(*group), cells, rounded);
        }
        let prefix = format!("{method},{},", table.year);
        excess_row(
            &mut out,
            &prefix,
            (String::new(), String::new()),
            &table.total,
            rounded,
        );
    }
    out
}

/// A yearly aggregation of a weekly series, shaped like the excess table
/// but without a method column.
pub fn aggregate_yearly_csv(table: &ExcessTable, rounded: bool) -> String {
    let mut out = String::from("year,age_lower,age_upper,expected,observed,diff,diff_pct\n");
    for (group, cells) in &table.rows {
        let prefix = format!("{},", table.year);
        excess_row(&mut out, &prefix, group_bounds(*group), cells, rounded);
    }
    let prefix = format!("{},", table.year);
    excess_row(
        &mut out,
        &prefix,
        (String::new(), String::new()),
        &table.total,
        rounded,
    );
    out
}

/// RMSE table: one column per method, one row per group plus an overall
/// row with empty age bounds. `rounded` prints one decimal place.
pub fn rmse_csv(report: &RmseReport, rounded: bool) -> String {
    let mut out = String::from("age_lower,age_upper");
    for method in report.methods() {
        out.push_str(&format!(",{method}"));
    }
    out.push('\n');
    let fmt = |v: f64| {
        if rounded {
            format!("{v:.1}")
        } else {
            format!("{v}")
        }
    };
    for &group in report.groups() {
        let (lower, upper) = group_bounds(group);
        out.push_str(&format!("{lower},{upper}"));
        for &method in report.methods() {
            let v = report.group_rmse(method, group).expect("group in report");
            out.push_str(&format!(",{}", fmt(v)));
        }
        out.push('\n');
    }
    out.push(',');
    for &method in report.methods() {
        let v = report.overall_rmse(method).expect("method in report");
        out.push_str(&format!(",{}", fmt(v)));
    }
    out.push('\n');
    out
}

/// Weekly SMR rows; undefined SMR (zero expected) is written as `NA`.
pub fn smr_weekly_csv(series: &SmrSeries, rounded: bool) -> String {
    let mut out = String::from("iso_year,iso_week,age_lower,age_upper,observed,expected,smr\n");
    for (week, group, row) in series.entries() {
        let (lower, upper) = group_bounds(group);
        let expected = if rounded {
            format!("{:.1}", row.expected)
        } else {
            format!("{}", row.expected)
        };
        let smr = match row.smr {
            Some(v) if rounded => format!("{v:.3}"),
            Some(v) => format!("{v}"),
            None => "NA".into(),
        };
        out.push_str(&format!(
            "{},{},{lower},{upper},{},{expected},{smr}\n",
            week.year(),
            week.week(),
            row.observed as i64,
        ));
    }
    out
}

/// Direct-standardization rows, mirroring the SMR layout.
pub fn direct_std_csv(series: &DirectStdSeries, rounded: bool) -> String {
    let mut out = String::from(
        "iso_year,iso_week,age_lower,age_upper,target_expected,reference_expected,ratio\n",
    );
    for (week, group, row) in series.entries() {
        let (lower, upper) = group_bounds(group);
        let (target, reference) = if rounded {
            (
                format!("{:.1}", row.target),
                format!("{:.1}", row.reference),
            )
        } else {
            (format!("{}", row.target), format!("{}", row.reference))
        };
        let ratio = match row.ratio {
            Some(v) if rounded => format!("{v:.3}"),
            Some(v) => format!("{v}"),
            None => "NA".into(),
        };
        out.push_str(&format!(
            "{},{},{lower},{upper},{target},{reference},{ratio}\n",
            week.year(),
            week.week(),
        ));
    }
    out
}
