use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use corptax::config::parse_config;
use tempfile::TempDir;

fn corptax(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corptax"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "status {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn field(rows: &[Vec<String>], key: &str, col: usize) -> f64 {
    rows.iter().find(|r| r[0] == key).unwrap_or_else(|| panic!("no row {key}"))[col]
        .parse()
        .unwrap()
}

fn golden(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

/// Numbers rounded to 9 decimals with signed zeros folded, so the golden
/// file pins the column set and the zeros rather than rounding noise.
fn normalise(text: &str) -> String {
    let mut out = String::new();
    for (i, line) in text.lines().enumerate() {
        let cells: Vec<String> = line
            .split(',')
            .map(|c| match c.parse::<f64>() {
                Ok(x) if i > 0 => {
                    let s = format!("{x:.9}");
                    if s.trim_start_matches('-').chars().all(|ch| ch == '0' || ch == '.') {
                        "0.000000000".into()
                    } else {
                        s
                    }
                }
                _ => c.to_string(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[test]
fn null_scenario_matches_golden_files() {
    let dir = TempDir::new().unwrap();
    ok(&corptax(&["run", "null", "--out", "n", "--horizon", "60"], dir.path()));
    let run = dir.path().join("n");
    let summary = fs::read_to_string(run.join("summary.csv")).unwrap();
    assert_eq!(normalise(&summary), golden("null_summary.csv"));
    let path = fs::read_to_string(run.join("path.csv")).unwrap();
    assert_eq!(path.lines().next().unwrap(), golden("path_header.csv").trim_end());
    assert_eq!(path.lines().count(), 61);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    for out in ["a", "b"] {
        ok(&corptax(&["run", "null", "--out", out, "--horizon", "40"], dir.path()));
    }
    for f in ["path.csv", "summary.csv", "manifest.json", "config.toml"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(a == b, "{f} differs between identical runs");
    }
}

#[test]
fn horizon_override_sets_row_count() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("run.toml"), "scenario = \"null\"\nhorizon = 600\nout = \"long\"\n").unwrap();
    ok(&corptax(&["run", "--config", "run.toml"], dir.path()));
    let rows = read_csv(&dir.path().join("long/path.csv"));
    assert_eq!(rows.len(), 601);
    assert_eq!(rows.last().unwrap()[0], "599");
}

#[test]
fn empty_config_lists_required_keys() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("empty.toml"), "").unwrap();
    let out = corptax(&["run", "--config", "empty.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`scenario`: required key missing"), "{err}");
    assert!(err.contains("tcja17"), "{err}");
}

#[test]
fn all_violations_reported_with_exit_code_two() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("bad.toml"),
        "scenario = \"tcja17\"\nhorison = 10\n[solver]\ntol = 0\n[economy]\nbeta = \"high\"\n",
    )
    .unwrap();
    let out = corptax(&["run", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("3 problem(s)"), "{err}");
    assert!(err.contains("`horison`: expected no such key"), "{err}");
    assert!(err.contains("`solver.tol`: expected a number > 0, got 0"), "{err}");
    assert!(err.contains("`economy.beta`: expected a number in (0, 1), got \"high\""), "{err}");
}

#[test]
fn manifest_echo_round_trips() {
    let text = r#"
        scenario = "tcja17"
        horizon = 120
        [solver]
        tol = 1e-9
        [economy]
        tau_indiv = 0.1
        [reform]
        new_investment_only = false
        [emit]
        distortion_grid = true
        [grid]
        tau_points = 5
        lambda_points = 4
    "#;
    let cfg = parse_config(text).unwrap();
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("run.toml"), text).unwrap();
    ok(&corptax(&["run", "--config", "run.toml", "--out", "r"], dir.path()));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r/manifest.json")).unwrap()).unwrap();
    assert_eq!(parse_config(manifest["config"].as_str().unwrap()).unwrap(), cfg);
    let echoed = fs::read_to_string(dir.path().join("r/config.toml")).unwrap();
    assert_eq!(parse_config(&echoed).unwrap(), cfg);
    assert_eq!(manifest["new_investment_only"], false);
    assert_eq!(manifest["result"]["pre"]["policy"]["tau_indiv"], 0.1);
    assert_eq!(read_csv(&dir.path().join("r/distortion_grid.csv")).len(), 1 + 5 * 4);
}

#[test]
fn grid_marks_policy_points() {
    let dir = TempDir::new().unwrap();
    ok(&corptax(&["grid", "--out", "g"], dir.path()));
    let points = read_csv(&dir.path().join("g/policy_points.csv"));
    assert_eq!(points[0], ["label", "tau", "rate_dbal", "lambda", "wedge", "distortion"]);
    assert!((field(&points, "1961", 5) - 0.16).abs() < 0.005);
    assert!((field(&points, "2017", 5) - 0.017).abs() < 0.001);
    let grid = read_csv(&dir.path().join("g/distortion_grid.csv"));
    assert_eq!(grid[0], ["tau", "lambda", "distortion"]);
    assert_eq!(grid.len(), 1 + 61 * 51);
    // untaxed corner
    assert_eq!(grid[1][2].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn tcja17_gdp_multiplier_near_six_tenths() {
    let dir = TempDir::new().unwrap();
    ok(&corptax(&["run", "tcja17", "--out", "t"], dir.path()));
    let s = read_csv(&dir.path().join("t/summary.csv"));
    assert_eq!(s[0], ["measure", "long_run_change", "multiplier", "impact"]);
    let m = field(&s, "gdp", 2);
    assert!((0.5..=0.7).contains(&m), "gdp multiplier {m}");
    assert!(field(&s, "gdp", 1) > 0.0);
}

#[test]
fn decomposition_records_rate_cut_mode() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("f.toml"),
        "scenario = \"fig9-decomposition\"\nhorizon = 200\n[emit]\npath = false\n[decomposition]\nrate_cut = \"relative\"\n",
    )
    .unwrap();
    ok(&corptax(&["run", "--config", "f.toml", "--out", "f"], dir.path()));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("f/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["rate_cut"], "relative");
    let rows = read_csv(&dir.path().join("f/decomposition.csv"));
    let get = |exp: &str| {
        rows.iter()
            .find(|r| r[0] == exp && r[1] == "investment")
            .unwrap_or_else(|| panic!("no {exp} row"))[2]
            .parse::<f64>()
            .unwrap()
    };
    let old = get("calibration-1961");
    assert!((old - (get("one-at-a-time-sum") + get("interaction"))).abs() < 1e-12);
    assert!(!dir.path().join("f/path.csv").exists());
}

#[test]
fn solve_ss_writes_both_steady_states() {
    let dir = TempDir::new().unwrap();
    ok(&corptax(&["solve-ss", "kennedy", "--out", "s"], dir.path()));
    let rows = read_csv(&dir.path().join("s/steady_state.csv"));
    assert_eq!(rows.len(), 31);
    assert!(field(&rows, "k", 2) > field(&rows, "k", 1));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("s/manifest.json")).unwrap()).unwrap();
    let w = manifest["pre"]["wedge"]["wedge"].as_f64().unwrap();
    assert!((w - 0.72).abs() < 0.005);
}

#[test]
fn solver_failure_exits_three_and_leaves_no_files() {
    let dir = TempDir::new().unwrap();
    let out = corptax(&["run", "tcja17", "--out", "short", "--horizon", "20"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_dir(dir.path().join("short")).unwrap().count(), 0);
}

#[test]
fn unwritable_output_exits_one() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("taken"), "not a directory").unwrap();
    let out = corptax(&["grid", "--out", "taken"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unchanged_custom_reform_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("c.toml"), "scenario = \"custom\"\n[reform]\ntau_corp = 0.35\n").unwrap();
    let out = corptax(&["run", "--config", "c.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_verb_passes() {
    let dir = TempDir::new().unwrap();
    let out = corptax(&["check"], dir.path());
    ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5, "{text}");
}
