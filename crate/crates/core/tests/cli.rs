//! End-to-end tests of the `exmort` binary: exit codes, output files,
//! determinism and the no-partial-outputs guarantee.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn exmort(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exmort"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(path: &Path, content: &str) {
    fs::write(path, content).unwrap();
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Single-age world for life-table estimation: stocks 1000 across
/// 2016-2019 and 10 deaths per year, giving q_0 = 30/3015.
fn lifetable_fixtures(dir: &Path) {
    let mut pop = String::from("year,age,count\n");
    for y in 2016..=2019 {
        pop.push_str(&format!("{y},0,1000\n"));
    }
    write(&dir.join("population.csv"), &pop);
    let mut deaths = String::from("year,age,count\n");
    for y in 2017..=2019 {
        deaths.push_str(&format!("{y},0,10\n"));
    }
    write(&dir.join("deaths_yearly_age.csv"), &deaths);
}

#[test]
fn lifetable_build_writes_both_tables() {
    let tmp = TempDir::new().unwrap();
    lifetable_fixtures(tmp.path());
    let out_dir = tmp.path().join("out");
    let out = exmort(&[
        "lifetable",
        "build",
        "--population",
        tmp.path().join("population.csv").to_str().unwrap(),
        "--deaths",
        tmp.path().join("deaths_yearly_age.csv").to_str().unwrap(),
        "--years",
        "2016-2019",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let lifetable = read(&out_dir.join("lifetable.csv"));
    assert_eq!(lifetable.lines().next().unwrap(), "age,qx");
    let row = lifetable.lines().nth(1).unwrap();
    assert!(
        row.starts_with("0,0.00995024875621890"),
        "unexpected qx row: {row}"
    );
    assert_eq!(row, format!("0,{}", 30.0 / 3015.0));
    let cohort = read(&out_dir.join("cohort_lifetable.csv"));
    assert_eq!(cohort.lines().next().unwrap(), "age,qtilde");
}

#[test]
fn lifetable_build_missing_cell_exits_2_with_named_cell() {
    let tmp = TempDir::new().unwrap();
    write(
        &tmp.path().join("population.csv"),
        "year,age,count\n2016,0,1000\n2016,1,900\n2017,0,1000\n",
    );
    write(
        &tmp.path().join("deaths.csv"),
        "year,age,count\n2017,0,10\n",
    );
    let out_dir = tmp.path().join("out");
    let out = exmort(&[
        "lifetable",
        "build",
        "--population",
        tmp.path().join("population.csv").to_str().unwrap(),
        "--deaths",
        tmp.path().join("deaths.csv").to_str().unwrap(),
        "--years",
        "2016-2017",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(
        msg.contains("2017") && msg.contains("age 1"),
        "stderr: {msg}"
    );
    assert!(!out_dir.exists(), "no outputs on failure");
}

#[test]
fn lifetable_load_rejects_out_of_range_qx() {
    let tmp = TempDir::new().unwrap();
    write(&tmp.path().join("lifetable.csv"), "age,qx\n0,1.5\n");
    let out = exmort(&[
        "lifetable",
        "load",
        "--lifetable",
        tmp.path().join("lifetable.csv").to_str().unwrap(),
        "--out-dir",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("1.5") && msg.contains('0'), "stderr: {msg}");
}

#[test]
fn missing_input_file_exits_3() {
    let tmp = TempDir::new().unwrap();
    let out = exmort(&[
        "lifetable",
        "load",
        "--lifetable",
        tmp.path().join("nonexistent.csv").to_str().unwrap(),
        "--out-dir",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

/// Three-age world with a hand-checked expected-death fixture:
/// q = {0.01, 0.02, 0.03}, stocks 1000 per age, groups [0,1] and 2+.
/// Observed deaths 40/40 in 2016-2019 and 50/40 in 2020.
fn yearly_fixtures(dir: &Path) {
    let mut pop = String::from("year,age,count\n");
    for y in 2015..=2020 {
        for a in 0..3 {
            pop.push_str(&format!("{y},{a},1000\n"));
        }
    }
    write(&dir.join("population.csv"), &pop);
    write(
        &dir.join("lifetable.csv"),
        "age,qx\n0,0.01\n1,0.02\n2,0.03\n",
    );
    let mut deaths = String::from("year,age_lower,age_upper,count\n");
    for y in 2016..=2019 {
        deaths.push_str(&format!("{y},0,1,40\n{y},2,,40\n"));
    }
    deaths.push_str("2020,0,1,50\n2020,2,,40\n");
    write(&dir.join("deaths_yearly_group.csv"), &deaths);
}

fn yearly_args<'a>(dir: &'a Path, out_dir: &'a Path) -> Vec<String> {
    vec![
        "--population".into(),
        dir.join("population.csv").to_str().unwrap().into(),
        "--lifetable".into(),
        dir.join("lifetable.csv").to_str().unwrap().into(),
        "--deaths".into(),
        dir.join("deaths_yearly_group.csv").to_str().unwrap().into(),
        "--years".into(),
        "2016-2020".into(),
        "--out-dir".into(),
        out_dir.to_str().unwrap().into(),
    ]
}

#[test]
fn yearly_rmse_writes_all_three_reports() {
    let tmp = TempDir::new().unwrap();
    yearly_fixtures(tmp.path());
    let out_dir = tmp.path().join("out");
    let mut args: Vec<String> = vec!["yearly".into(), "rmse".into()];
    args.extend(yearly_args(tmp.path(), &out_dir));
    args.extend(["--target-year".into(), "2020".into()]);
    let out = exmort(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let expected = read(&out_dir.join("expected_yearly.csv"));
    assert!(expected.contains("M3,2020,0,1,35\n"), "{expected}");
    assert!(expected.contains("M3,2020,2,,42.5\n"), "{expected}");
    assert!(expected.contains("M1,2020,0,1,30\n"), "{expected}");
    assert!(expected.contains("M2,2020,0,1,40\n"), "{expected}");

    // RMSE over 2016-2019 only (target year excluded): per-group
    // residuals 10/0/5 and 10/10/2.5, overall on totals 20/10/2.5.
    let rmse = read(&out_dir.join("rmse.csv"));
    let lines: Vec<&str> = rmse.lines().collect();
    assert_eq!(lines[0], "age_lower,age_upper,M1,M2,M3");
    assert_eq!(lines[1], "0,1,10,0,5");
    assert_eq!(lines[2], "2,,10,10,2.5");
    assert_eq!(lines[3], ",,20,10,2.5");

    assert!(out_dir.join("excess_yearly.csv").exists());
}

#[test]
fn yearly_excess_rounded_matches_printed_convention() {
    let tmp = TempDir::new().unwrap();
    yearly_fixtures(tmp.path());
    let out_dir = tmp.path().join("out");
    let mut args: Vec<String> = vec!["yearly".into(), "excess".into()];
    args.extend(yearly_args(tmp.path(), &out_dir));
    args.extend([
        "--target-year".into(),
        "2020".into(),
        "--methods".into(),
        "3".into(),
        "--rounded".into(),
    ]);
    let out = exmort(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let excess = read(&out_dir.join("excess_yearly.csv"));
    let lines: Vec<&str> = excess.lines().collect();
    assert_eq!(
        lines[0],
        "method,year,age_lower,age_upper,expected,observed,diff,diff_pct"
    );
    assert_eq!(lines[1], "M3,2020,0,1,35,50,+15,+43%");
    assert_eq!(lines[2], "M3,2020,2,,43,40,-3,-6%");
    assert_eq!(lines[3], "M3,2020,,,78,90,+13,+16%");
}

#[test]
fn yearly_outputs_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    yearly_fixtures(tmp.path());
    let run = |name: &str| {
        let out_dir = tmp.path().join(name);
        let mut args: Vec<String> = vec!["yearly".into(), "rmse".into()];
        args.extend(yearly_args(tmp.path(), &out_dir));
        args.extend(["--target-year".into(), "2020".into()]);
        let out = exmort(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(out.status.code(), Some(0));
        out_dir
    };
    let a = run("out_a");
    let b = run("out_b");
    for file in ["expected_yearly.csv", "excess_yearly.csv", "rmse.csv"] {
        assert_eq!(read(&a.join(file)), read(&b.join(file)), "{file} differs");
    }
}

#[test]
fn yearly_rmse_missing_observed_file_fails() {
    let tmp = TempDir::new().unwrap();
    yearly_fixtures(tmp.path());
    fs::remove_file(tmp.path().join("deaths_yearly_group.csv")).unwrap();
    let out_dir = tmp.path().join("out");
    let mut args: Vec<String> = vec!["yearly".into(), "rmse".into()];
    args.extend(yearly_args(tmp.path(), &out_dir));
    args.extend(["--target-year".into(), "2020".into()]);
    let out = exmort(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(3));
    assert!(!out_dir.exists());
}

/// Constant weekly world: dyadic population so every pinned value below
/// is exact. Reference weeks see 20 deaths, 2020 sees 24. Reference
/// years stop at 2018 so the week-53 imputation for 2018 draws on
/// 2019-W01 (also 20) rather than the elevated target year.
fn weekly_fixtures(dir: &Path) {
    let mut pop = String::from("year,age,count\n");
    for y in 2015..=2020 {
        pop.push_str(&format!("{y},0,131072\n"));
    }
    write(&dir.join("population.csv"), &pop);
    let mut deaths = String::from("iso_year,iso_week,age_lower,age_upper,count\n");
    let weeks_in = |y: i32| if y == 2015 || y == 2020 { 53 } else { 52 };
    for y in 2016..=2019 {
        for w in 1..=weeks_in(y) {
            deaths.push_str(&format!("{y},{w},0,,20\n"));
        }
    }
    for w in 1..=53 {
        deaths.push_str(&format!("2020,{w},0,,24\n"));
    }
    write(&dir.join("deaths_weekly.csv"), &deaths);
    write(
        &dir.join("standard_population.csv"),
        "age_lower,age_upper,count\n0,,65536\n",
    );
}

fn weekly_args<'a>(dir: &'a Path, out_dir: &'a Path) -> Vec<String> {
    vec![
        "--population".into(),
        dir.join("population.csv").to_str().unwrap().into(),
        "--deaths".into(),
        dir.join("deaths_weekly.csv").to_str().unwrap().into(),
        "--reference-years".into(),
        "2016-2018".into(),
        "--target-year".into(),
        "2020".into(),
        "--out-dir".into(),
        out_dir.to_str().unwrap().into(),
    ]
}

#[test]
fn weekly_smr_covers_all_53_weeks() {
    let tmp = TempDir::new().unwrap();
    weekly_fixtures(tmp.path());
    let out_dir = tmp.path().join("out");
    let mut args: Vec<String> = vec!["weekly".into(), "smr".into()];
    args.extend(weekly_args(tmp.path(), &out_dir));
    let out = exmort(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let smr = read(&out_dir.join("smr_weekly.csv"));
    let lines: Vec<&str> = smr.lines().collect();
    assert_eq!(
        lines[0],
        "iso_year,iso_week,age_lower,age_upper,observed,expected,smr"
    );
    assert_eq!(lines.len(), 1 + 53);
    assert!(smr.contains("2020,1,0,,24,20,1.2\n"), "{smr}");
    assert!(smr.contains("2020,53,0,,24,20,1.2\n"), "{smr}");
    assert!(!out_dir.join("direct_std.csv").exists());
}

#[test]
fn weekly_direct_standardizes_onto_standard_population() {
    let tmp = TempDir::new().unwrap();
    weekly_fixtures(tmp.path());
    let out_dir = tmp.path().join("out");
    let mut args: Vec<String> = vec!["weekly".into(), "direct".into()];
    args.extend(weekly_args(tmp.path(), &out_dir));
    args.extend([
        "--standard-population".into(),
        tmp.path()
            .join("standard_population.csv")
            .to_str()
            .unwrap()
            .into(),
    ]);
    let out = exmort(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let direct = read(&out_dir.join("direct_std.csv"));
    let lines: Vec<&str> = direct.lines().collect();
    assert_eq!(
        lines[0],
        "iso_year,iso_week,age_lower,age_upper,target_expected,reference_expected,ratio"
    );
    assert_eq!(lines.len(), 1 + 53);
    assert!(direct.contains("2020,10,0,,12,10,1.2\n"), "{direct}");
}

#[test]
fn weekly_smr_with_standard_population_also_writes_direct() {
    let tmp = TempDir::new().unwrap();
    weekly_fixtures(tmp.path());
    let out_dir = tmp.path().join("out");
    let mut args: Vec<String> = vec!["weekly".into(), "smr".into()];
    args.extend(weekly_args(tmp.path(), &out_dir));
    args.extend([
        "--standard-population".into(),
        tmp.path()
            .join("standard_population.csv")
            .to_str()
            .unwrap()
            .into(),
    ]);
    let out = exmort(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out_dir.join("smr_weekly.csv").exists());
    assert!(out_dir.join("direct_std.csv").exists());
}

#[test]
fn weekly_aggregate_masks_weekly_structure() {
    let tmp = TempDir::new().unwrap();
    weekly_fixtures(tmp.path());
    let out_dir = tmp.path().join("out");
    let mut args: Vec<String> = vec!["weekly".into(), "aggregate".into()];
    args.extend(weekly_args(tmp.path(), &out_dir));
    args.push("--rounded".into());
    let out = exmort(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let agg = read(&out_dir.join("aggregated_yearly.csv"));
    let lines: Vec<&str> = agg.lines().collect();
    assert_eq!(
        lines[0],
        "year,age_lower,age_upper,expected,observed,diff,diff_pct"
    );
    // 53 weeks × (24 observed / 20 expected) = 1272 / 1060.
    assert_eq!(lines[1], "2020,0,,1060,1272,+212,+20%");
    assert_eq!(lines[2], "2020,,,1060,1272,+212,+20%");
}

#[test]
fn weekly_rejects_week_53_of_a_52_week_year() {
    let tmp = TempDir::new().unwrap();
    weekly_fixtures(tmp.path());
    let out_dir = tmp.path().join("out");
    let mut args: Vec<String> = vec!["weekly".into(), "smr".into()];
    args.extend(weekly_args(tmp.path(), &out_dir));
    // Override the target year to one with 52 ISO weeks but still ask
    // for week 53.
    let pos = args.iter().position(|a| a == "--target-year").unwrap();
    args[pos + 1] = "2021".into();
    args.extend(["--weeks".into(), "1-53".into()]);
    let out = exmort(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("2021") && msg.contains("52"), "stderr: {msg}");
    assert!(!out_dir.exists(), "no outputs on failure");
}

#[test]
fn weekly_outputs_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    weekly_fixtures(tmp.path());
    let run = |name: &str| {
        let out_dir = tmp.path().join(name);
        let mut args: Vec<String> = vec!["weekly".into(), "smr".into()];
        args.extend(weekly_args(tmp.path(), &out_dir));
        let out = exmort(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(out.status.code(), Some(0));
        read(&out_dir.join("smr_weekly.csv"))
    };
    assert_eq!(run("out_a"), run("out_b"));
}

#[test]
fn usage_errors_exit_2() {
    let out = exmort(&["yearly", "expected", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = exmort(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn success_reports_written_files() {
    let tmp = TempDir::new().unwrap();
    weekly_fixtures(tmp.path());
    let out_dir = tmp.path().join("out");
    let mut args: Vec<String> = vec!["weekly".into(), "smr".into()];
    args.extend(weekly_args(tmp.path(), &out_dir));
    let out = exmort(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("smr_weekly.csv"), "stdout: {stdout}");
}
