//! C ABI for the exmort library.
//!
//! Every constructor returns an opaque handle through an out-parameter
//! and reports success or failure as an [`ExmStatus`]. On failure a
//! human-readable message is stored per thread and can be fetched with
//! [`exm_last_error`]; the pointer stays valid until the next failing
//! call on the same thread. Handles must be released with the matching
//! `*_free` function exactly once.
//!
//! The generated header lives in `include/exmort.h` and is refreshed on
//! every build.
//!
//! Safety contract, shared by every function taking pointers: handle
//! arguments must be live pointers obtained from this library, string
//! arguments must be NUL-terminated, array arguments must point to at
//! least the stated number of elements, and out-parameters must be
//! writable. Null is checked and reported; anything else is the
//! caller's responsibility, as usual for a C API.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::slice;

use exmort::{
    derive_cohort_table, estimate_qx_multiyear, expected_method1, expected_method2,
    expected_method3, indirect_pipeline, iso_weeks_in_year, Age, AgeGroup, CohortLifeTable, Error,
    ExpectedDeathsYearly, IsoWeek, LifeTable, PopulationSeries, Resolution, SmrSeries, YearLabel,
};

/// Result of every fallible call. `Validation` and `Io` mirror the CLI
/// exit codes 2 and 3.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExmStatus {
    Ok = 0,
    NullPointer = 1,
    Validation = 2,
    Io = 3,
    Utf8 = 4,
    Panic = 5,
}

/// Population stocks per year and age (opaque).
pub struct ExmPopulation(PopulationSeries);

/// A period life table together with its derived cohort table (opaque).
pub struct ExmLifeTable {
    period: LifeTable,
    cohort: CohortLifeTable,
}

/// Expected yearly deaths per year and age group (opaque).
pub struct ExmExpected(ExpectedDeathsYearly);

/// Weekly observed, expected and SMR per age group (opaque).
pub struct ExmSmr(SmrSeries);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|cell| {
        *cell.borrow_mut() = Some(CString::new(sanitized).unwrap_or_default());
    });
}

fn fail(err: Error) -> ExmStatus {
    let status = match err.exit_code() {
        3 => ExmStatus::Io,
        _ => ExmStatus::Validation,
    };
    set_error(err.to_string());
    status
}

fn null_arg(name: &str) -> ExmStatus {
    set_error(format!("argument '{name}' is null"));
    ExmStatus::NullPointer
}

/// Runs a body, converting panics into `ExmStatus::Panic` so unwinding
/// never crosses the ABI boundary.
fn guard(body: impl FnOnce() -> ExmStatus) -> ExmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic".to_string());
            ExmStatus::Panic
        }
    }
}

unsafe fn path_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a Path, ExmStatus> {
    if ptr.is_null() {
        return Err(null_arg(name));
    }
    match unsafe { CStr::from_ptr(ptr) }.to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => {
            set_error(format!("argument '{name}' is not valid UTF-8"));
            Err(ExmStatus::Utf8)
        }
    }
}

unsafe fn slice_arg<'a, T>(ptr: *const T, len: usize, name: &str) -> Result<&'a [T], ExmStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null_arg(name));
    }
    Ok(unsafe { slice::from_raw_parts(ptr, len) })
}

unsafe fn handle_arg<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, ExmStatus> {
    if ptr.is_null() {
        return Err(null_arg(name));
    }
    Ok(unsafe { &*ptr })
}

unsafe fn out_arg<'a, T>(ptr: *mut T, name: &str) -> Result<&'a mut T, ExmStatus> {
    if ptr.is_null() {
        return Err(null_arg(name));
    }
    Ok(unsafe { &mut *ptr })
}

/// Negative `upper` means an open-ended group (`lower+`).
fn make_group(lower: u32, upper: i32) -> Result<AgeGroup, Error> {
    if upper < 0 {
        Ok(AgeGroup::open(Age(lower)))
    } else {
        AgeGroup::new(Age(lower), Age(upper as u32))
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn exm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread, or null if no
/// call has failed yet. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn exm_last_error() -> *const c_char {
    LAST_ERROR.with(|cell| match cell.borrow().as_ref() {
        Some(message) => message.as_ptr(),
        None => std::ptr::null(),
    })
}

/// Loads December 31 population stocks from a `year,age,count` CSV.
#[no_mangle]
pub unsafe extern "C" fn exm_population_load(
    path: *const c_char,
    out: *mut *mut ExmPopulation,
) -> ExmStatus {
    guard(|| {
        let path = match unsafe { path_arg(path, "path") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        let out = match unsafe { out_arg(out, "out") } {
            Ok(o) => o,
            Err(status) => return status,
        };
        match exmort::load_population(path) {
            Ok(series) => {
                *out = Box::into_raw(Box::new(ExmPopulation(series)));
                ExmStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Stock at December 31 of `year` for a single age.
#[no_mangle]
pub unsafe extern "C" fn exm_population_stock(
    population: *const ExmPopulation,
    year: i32,
    age: u32,
    out: *mut f64,
) -> ExmStatus {
    guard(|| {
        let population = match unsafe { handle_arg(population, "population") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        let out = match unsafe { out_arg(out, "out") } {
            Ok(o) => o,
            Err(status) => return status,
        };
        match population.0.stock(YearLabel(year), Age(age)) {
            Ok(value) => {
                *out = value;
                ExmStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Highest age covered by the population series.
#[no_mangle]
pub unsafe extern "C" fn exm_population_max_age(
    population: *const ExmPopulation,
    out: *mut u32,
) -> ExmStatus {
    guard(|| {
        let population = match unsafe { handle_arg(population, "population") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        let out = match unsafe { out_arg(out, "out") } {
            Ok(o) => o,
            Err(status) => return status,
        };
        *out = population.0.max_age().value();
        ExmStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn exm_population_free(population: *mut ExmPopulation) {
    if !population.is_null() {
        drop(unsafe { Box::from_raw(population) });
    }
}

/// Loads an official life table from an `age,qx` CSV and derives the
/// cohort-corrected probabilities.
#[no_mangle]
pub unsafe extern "C" fn exm_lifetable_load(
    path: *const c_char,
    out: *mut *mut ExmLifeTable,
) -> ExmStatus {
    guard(|| {
        let path = match unsafe { path_arg(path, "path") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        let out = match unsafe { out_arg(out, "out") } {
            Ok(o) => o,
            Err(status) => return status,
        };
        match exmort::load_life_table(path) {
            Ok(period) => {
                let cohort = derive_cohort_table(&period);
                *out = Box::into_raw(Box::new(ExmLifeTable { period, cohort }));
                ExmStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Estimates a life table from yearly deaths (`year,age,count` CSV) and
/// population stocks over the window `[start_year, end_year]`, then
/// derives the cohort-corrected probabilities.
#[no_mangle]
pub unsafe extern "C" fn exm_lifetable_build(
    deaths_path: *const c_char,
    population: *const ExmPopulation,
    start_year: i32,
    end_year: i32,
    out: *mut *mut ExmLifeTable,
) -> ExmStatus {
    guard(|| {
        let deaths_path = match unsafe { path_arg(deaths_path, "deaths_path") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        let population = match unsafe { handle_arg(population, "population") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        let out = match unsafe { out_arg(out, "out") } {
            Ok(o) => o,
            Err(status) => return status,
        };
        let result = exmort::load_deaths(deaths_path, Resolution::YearlyByAge).and_then(|deaths| {
            estimate_qx_multiyear(
                deaths.as_yearly_by_age()?,
                &population.0,
                YearLabel(start_year),
                YearLabel(end_year),
            )
        });
        match result {
            Ok(period) => {
                let cohort = derive_cohort_table(&period);
                *out = Box::into_raw(Box::new(ExmLifeTable { period, cohort }));
                ExmStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Highest age in the life table.
#[no_mangle]
pub unsafe extern "C" fn exm_lifetable_max_age(
    table: *const ExmLifeTable,
    out: *mut u32,
) -> ExmStatus {
    guard(|| {
        let table = match unsafe { handle_arg(table, "table") } {
            Ok(t) => t,
            Err(status) => return status,
        };
        let out = match unsafe { out_arg(out, "out") } {
            Ok(o) => o,
            Err(status) => return status,
        };
        *out = table.period.max_age().value();
        ExmStatus::Ok
    })
}

/// Period death probability for one age.
#[no_mangle]
pub unsafe extern "C" fn exm_lifetable_qx(
    table: *const ExmLifeTable,
    age: u32,
    out: *mut f64,
) -> ExmStatus {
    guard(|| {
        let table = match unsafe { handle_arg(table, "table") } {
            Ok(t) => t,
            Err(status) => return status,
        };
        let out = match unsafe { out_arg(out, "out") } {
            Ok(o) => o,
            Err(status) => return status,
        };
        match table.period.qx(Age(age)) {
            Ok(value) => {
                *out = value;
                ExmStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Cohort-corrected death probability for one age.
#[no_mangle]
pub unsafe extern "C" fn exm_lifetable_qtilde(
    table: *const ExmLifeTable,
    age: u32,
    out: *mut f64,
) -> ExmStatus {
    guard(|| {
        let table = match unsafe { handle_arg(table, "table") } {
            Ok(t) => t,
            Err(status) => return status,
        };
        let out = match unsafe { out_arg(out, "out") } {
            Ok(o) => o,
            Err(status) => return status,
        };
        match table.cohort.qtilde(Age(age)) {
            Ok(value) => {
                *out = value;
                ExmStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn exm_lifetable_free(table: *mut ExmLifeTable) {
    if !table.is_null() {
        drop(unsafe { Box::from_raw(table) });
    }
}

/// Computes expected yearly deaths with method 1, 2 or 3.
///
/// Age groups are given as parallel `group_lowers` / `group_uppers`
/// arrays; a negative upper bound marks an open-ended group. They must
/// partition `[0, max_age]` of the life table.
#[no_mangle]
pub unsafe extern "C" fn exm_expected_yearly(
    table: *const ExmLifeTable,
    population: *const ExmPopulation,
    method: u32,
    group_lowers: *const u32,
    group_uppers: *const i32,
    n_groups: usize,
    years: *const i32,
    n_years: usize,
    out: *mut *mut ExmExpected,
) -> ExmStatus {
    guard(|| {
        let table = match unsafe { handle_arg(table, "table") } {
            Ok(t) => t,
            Err(status) => return status,
        };
        let population = match unsafe { handle_arg(population, "population") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        let lowers = match unsafe { slice_arg(group_lowers, n_groups, "group_lowers") } {
            Ok(s) => s,
            Err(status) => return status,
        };
        let uppers = match unsafe { slice_arg(group_uppers, n_groups, "group_uppers") } {
            Ok(s) => s,
            Err(status) => return status,
        };
        let years = match unsafe { slice_arg(years, n_years, "years") } {
            Ok(s) => s,
            Err(status) => return status,
        };
        let out = match unsafe { out_arg(out, "out") } {
            Ok(o) => o,
            Err(status) => return status,
        };
        let mut groups = Vec::with_capacity(n_groups);
        for (&lower, &upper) in lowers.iter().zip(uppers) {
            match make_group(lower, upper) {
                Ok(group) => groups.push(group),
                Err(err) => return fail(err),
            }
        }
        let years: Vec<YearLabel> = years.iter().map(|&y| YearLabel(y)).collect();
        let result = match method {
            1 => expected_method1(&table.period, &population.0, &groups, &years),
            2 => expected_method2(&table.cohort, &population.0, &groups, &years),
            3 => expected_method3(&table.cohort, &population.0, &groups, &years),
            other => {
                set_error(format!("unknown method {other}; expected 1, 2 or 3"));
                return ExmStatus::Validation;
            }
        };
        match result {
            Ok(expected) => {
                *out = Box::into_raw(Box::new(ExmExpected(expected)));
                ExmStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Expected deaths for one year and age group (negative upper = open).
#[no_mangle]
pub unsafe extern "C" fn exm_expected_value(
    expected: *const ExmExpected,
    year: i32,
    group_lower: u32,
    group_upper: i32,
    out: *mut f64,
) -> ExmStatus {
    guard(|| {
        let expected = match unsafe { handle_arg(expected, "expected") } {
            Ok(e) => e,
            Err(status) => return status,
        };
        let out = match unsafe { out_arg(out, "out") } {
            Ok(o) => o,
            Err(status) => return status,
        };
        let group = match make_group(group_lower, group_upper) {
            Ok(group) => group,
            Err(err) => return fail(err),
        };
        match expected.0.value(YearLabel(year), group) {
            Ok(value) => {
                *out = value;
                ExmStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Expected deaths summed over all age groups for one year.
#[no_mangle]
pub unsafe extern "C" fn exm_expected_total(
    expected: *const ExmExpected,
    year: i32,
    out: *mut f64,
) -> ExmStatus {
    guard(|| {
        let expected = match unsafe { handle_arg(expected, "expected") } {
            Ok(e) => e,
            Err(status) => return status,
        };
        let out = match unsafe { out_arg(out, "out") } {
            Ok(o) => o,
            Err(status) => return status,
        };
        match expected.0.total(YearLabel(year)) {
            Ok(value) => {
                *out = value;
                ExmStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn exm_expected_free(expected: *mut ExmExpected) {
    if !expected.is_null() {
        drop(unsafe { Box::from_raw(expected) });
    }
}

/// Runs the weekly indirect-standardization pipeline: interpolated
/// weekly population, weekly rates averaged over the reference years
/// (imputing week 53 where needed) and the resulting SMR series for the
/// target year.
///
/// Weekly deaths are read from an
/// `iso_year,iso_week,age_lower,age_upper,count` CSV. Passing
/// `n_weeks = 0` selects every ISO week of the target year.
#[no_mangle]
pub unsafe extern "C" fn exm_smr_weekly(
    population: *const ExmPopulation,
    deaths_path: *const c_char,
    reference_years: *const i32,
    n_reference_years: usize,
    target_year: i32,
    weeks: *const u32,
    n_weeks: usize,
    out: *mut *mut ExmSmr,
) -> ExmStatus {
    guard(|| {
        let population = match unsafe { handle_arg(population, "population") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        let deaths_path = match unsafe { path_arg(deaths_path, "deaths_path") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        let reference_years =
            match unsafe { slice_arg(reference_years, n_reference_years, "reference_years") } {
                Ok(s) => s,
                Err(status) => return status,
            };
        let weeks = match unsafe { slice_arg(weeks, n_weeks, "weeks") } {
            Ok(s) => s,
            Err(status) => return status,
        };
        let out = match unsafe { out_arg(out, "out") } {
            Ok(o) => o,
            Err(status) => return status,
        };
        let reference_years: Vec<YearLabel> =
            reference_years.iter().map(|&y| YearLabel(y)).collect();
        let weeks: Vec<u32> = if weeks.is_empty() {
            (1..=iso_weeks_in_year(target_year)).collect()
        } else {
            weeks.to_vec()
        };
        let result =
            exmort::load_deaths(deaths_path, Resolution::WeeklyByGroup).and_then(|deaths| {
                indirect_pipeline(
                    &population.0,
                    deaths.as_weekly_by_group()?,
                    &reference_years,
                    YearLabel(target_year),
                    &weeks,
                )
            });
        match result {
            Ok(outputs) => {
                *out = Box::into_raw(Box::new(ExmSmr(outputs.smr)));
                ExmStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Observed deaths, expected deaths and SMR for one week and age group
/// (negative upper = open). When the expected count is zero the SMR is
/// undefined and `out_smr` receives NaN.
#[no_mangle]
pub unsafe extern "C" fn exm_smr_row(
    smr: *const ExmSmr,
    iso_year: i32,
    iso_week: u32,
    group_lower: u32,
    group_upper: i32,
    out_observed: *mut f64,
    out_expected: *mut f64,
    out_smr: *mut f64,
) -> ExmStatus {
    guard(|| {
        let smr = match unsafe { handle_arg(smr, "smr") } {
            Ok(s) => s,
            Err(status) => return status,
        };
        let out_observed = match unsafe { out_arg(out_observed, "out_observed") } {
            Ok(o) => o,
            Err(status) => return status,
        };
        let out_expected = match unsafe { out_arg(out_expected, "out_expected") } {
            Ok(o) => o,
            Err(status) => return status,
        };
        let out_smr = match unsafe { out_arg(out_smr, "out_smr") } {
            Ok(o) => o,
            Err(status) => return status,
        };
        let week = match IsoWeek::new(iso_year, iso_week) {
            Ok(week) => week,
            Err(err) => return fail(err),
        };
        let group = match make_group(group_lower, group_upper) {
            Ok(group) => group,
            Err(err) => return fail(err),
        };
        match smr.0.row(week, group) {
            Ok(row) => {
                *out_observed = row.observed;
                *out_expected = row.expected;
                *out_smr = row.smr.unwrap_or(f64::NAN);
                ExmStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn exm_smr_free(smr: *mut ExmSmr) {
    if !smr.is_null() {
        drop(unsafe { Box::from_raw(smr) });
    }
}
