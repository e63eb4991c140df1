use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use insar_swarm::experiment::Report;
use insar_swarm::scenario::Scenario;

const TINY: &str = "\
[geometry]
uav_count = 3

[solver]
inner_population = 20
inner_iterations = 20
outer_population = 4
outer_generations = 3
cga_population = 40
cga_generations = 20
sa_iterations = 400
";

fn insar_plan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_insar-plan"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .expect("binary runs")
}

fn write_scenario(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn run_tiny(dir: &Path, name: &str, extra: &[&str]) -> (Output, std::path::PathBuf) {
    let scenario = write_scenario(dir, TINY);
    let out = dir.join(name);
    let mut args = vec!["run", "--scenario", &scenario, "--seed", "7", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    (insar_plan(&args), out)
}

fn trace_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

#[test]
fn tiny_run_writes_consistent_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let (out, run) = run_tiny(dir.path(), "run", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(run.join("islands.csv").exists());
    let report = Report::load(&run.join("solution.json")).unwrap();
    let rows = trace_rows(&run.join("trace.csv"));
    let tail: f64 = rows.last().unwrap()[2].parse().unwrap();
    assert_eq!(Some(tail), report.fitness);
    assert!(report.feasible && report.constraints.all());
    assert_eq!(rows.len(), 4);
}

#[test]
fn trace_rows_are_contiguous_and_consistent() {
    let dir = tempfile::tempdir().unwrap();
    for solver in ["coevolution", "cga", "sa"] {
        let (out, run) = run_tiny(dir.path(), solver, &["--solver", solver]);
        assert!(matches!(out.status.code(), Some(0 | 2)));
        for (k, row) in trace_rows(&run.join("trace.csv")).iter().enumerate() {
            assert_eq!(row[0].parse::<usize>().unwrap(), k);
            assert_eq!(&row[1], "");
            if &row[3] == "true" {
                assert_eq!(&row[2], &row[11], "{solver} row {k}");
            }
        }
    }
}

#[test]
fn zero_energy_budget_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let (out, run) = run_tiny(dir.path(), "run", &["--set", "E_max=0"]);
    assert_eq!(out.status.code(), Some(2));
    let report = Report::load(&run.join("solution.json")).unwrap();
    assert!(!report.feasible);
    assert!(report.violations.g11 > 0.0);
    assert!(!report.constraints.energy);
}

#[test]
fn trace_is_byte_identical_across_runs_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    for solver in ["coevolution", "cga", "sa"] {
        let (_, a) = run_tiny(dir.path(), &format!("{solver}-a"), &["--solver", solver, "--jobs", "1"]);
        let (_, b) = run_tiny(dir.path(), &format!("{solver}-b"), &["--solver", solver, "--jobs", "1"]);
        let (_, c) = run_tiny(dir.path(), &format!("{solver}-c"), &["--solver", solver, "--jobs", "4"]);
        let ta = fs::read(a.join("trace.csv")).unwrap();
        assert_eq!(ta, fs::read(b.join("trace.csv")).unwrap(), "{solver}");
        assert_eq!(ta, fs::read(c.join("trace.csv")).unwrap(), "{solver}");
    }
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = insar_plan(&["validate", "--scenario", &write_scenario(dir.path(), "")]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("h_amb_min = 1.2"));

    let bad = write_scenario(dir.path(), "[constraints]\nz_min = 200\nz_max = 100\n");
    let out = insar_plan(&["validate", "--scenario", &bad]);
    assert_eq!(out.status.code(), Some(65));
    assert!(String::from_utf8_lossy(&out.stderr).contains("z_min"));

    let garbled = write_scenario(dir.path(), "[radar\nwavelength = ");
    assert_eq!(insar_plan(&["validate", "--scenario", &garbled]).status.code(), Some(64));

    let unknown = write_scenario(dir.path(), "[radar]\ncolour = 3\n");
    assert_eq!(insar_plan(&["validate", "--scenario", &unknown]).status.code(), Some(64));

    let missing = dir.path().join("absent.toml");
    assert_eq!(insar_plan(&["validate", "--scenario", missing.to_str().unwrap()]).status.code(), Some(66));

    let out = insar_plan(&["validate", "--set", "no_such_key=1"]);
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn unwritable_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out_dir = blocker.join("sub");
    let scenario = write_scenario(dir.path(), TINY);
    let out = insar_plan(&["run", "--scenario", &scenario, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(66));
}

#[test]
fn report_verb_renders_solution() {
    let dir = tempfile::tempdir().unwrap();
    let (_, run) = run_tiny(dir.path(), "run", &[]);
    let out = insar_plan(&["report", run.join("solution.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("sigma_h") && text.contains("b_perp"));
    let missing = insar_plan(&["report", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(66));
}

#[test]
fn report_echo_reloads_to_same_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let (_, run) = run_tiny(dir.path(), "run", &["--set", "h_amb_min=2.5"]);
    let report = Report::load(&run.join("solution.json")).unwrap();
    let original = Scenario::with_overrides(TINY, &[("h_amb_min".into(), "2.5".into())]).unwrap();
    let echoed = Scenario::from_toml_str(&report.scenario.to_toml_string()).unwrap();
    assert_eq!(echoed.params().unwrap(), original.params().unwrap());
    assert_eq!(echoed, original);
}

#[test]
fn sweep_writes_one_directory_per_cell_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), TINY);
    let out = dir.path().join("sweep");
    let status = insar_plan(&[
        "sweep",
        "--scenario",
        &scenario,
        "--variable",
        "h_amb_min",
        "--values",
        "1.2,2,3",
        "--seeds",
        "1,2,3",
        "--out",
        out.to_str().unwrap(),
        "--jobs",
        "3",
    ]);
    assert!(matches!(status.status.code(), Some(0 | 2)), "{}", String::from_utf8_lossy(&status.stderr));
    let runs = fs::read_dir(&out)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .flat_map(|v| fs::read_dir(v.path()).unwrap())
        .flat_map(|s| fs::read_dir(s.unwrap().path()).unwrap())
        .filter(|r| r.as_ref().unwrap().path().join("trace.csv").exists())
        .count();
    assert_eq!(runs, 9);
    let summary = trace_rows(&out.join("summary.csv"));
    assert_eq!(summary.len(), 3);
}

#[test]
fn bundled_scenarios_load() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let desk = Scenario::load(Path::new(&format!("{dir}/examples/scenarios/desk.toml")), &[]).unwrap();
    assert_eq!(desk, Scenario::default());
    let quick = Scenario::load(Path::new(&format!("{dir}/examples/scenarios/quick.toml")), &[]).unwrap();
    assert_eq!(quick.params().unwrap(), desk.params().unwrap());
}
