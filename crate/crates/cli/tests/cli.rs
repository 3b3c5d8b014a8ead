use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gaptime::inference::replicate_rng;
use gaptime::prelude::*;
use gaptime::simulation::{gen_sample, SimConfig};

fn gaptime(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaptime")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Records of a CSV written by the tool, header comment skipped.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).unwrap();
    let headers = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(str::to_string).collect()).collect();
    (headers, rows)
}

fn col(headers: &[String], name: &str) -> usize {
    headers.iter().position(|h| h == name).unwrap()
}

/// The four-subject fixture: events (1.5, 1), (3.0, 2), none, (5.0, 1)
/// with censoring times 2, 4, 6, 8.
fn four_subjects(dir: &Path) -> (PathBuf, PathBuf) {
    let input = dir.join("events.csv");
    fs::write(&input, "subject,stage,gap,cause\n1,1,1.5,1\n2,1,3.0,2\n4,1,5.0,1\n").unwrap();
    let censor = dir.join("censor.csv");
    fs::write(&censor, "subject,censor\n1,2\n2,4\n3,6\n4,8\n").unwrap();
    (input, censor)
}

#[test]
fn estimate_reproduces_hand_value() {
    let dir = tempfile::tempdir().unwrap();
    let (input, censor) = four_subjects(dir.path());
    let out = dir.path().join("out");
    let o = gaptime(&[
        "estimate", "--input", p(&input), "--censor-file", p(&censor), "--stage", "1", "--cause", "1",
        "--variant", "cif", "--bootstrap", "0", "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(out.join("curves.csv")).unwrap();
    assert!(text.starts_with("# gaptime "));
    let (h, rows) = read_csv(&out.join("curves.csv"));
    let (t, v) = (col(&h, "t"), col(&h, "value"));
    assert!(rows.iter().any(|r| r[0] == "cif_k1_j1" && r[t] == "5" && r[v] == "0.75"), "{text}");
}

#[test]
fn empty_input_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.csv");
    fs::write(&input, "").unwrap();
    let o = gaptime(&["estimate", "--input", p(&input), "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("no subjects parsed"), "{}", stderr(&o));
}

#[test]
fn missing_stage_is_reported_per_target() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("two.csv");
    fs::write(
        &input,
        "subject,stage,gap,cause,censor\na,1,1,1,5\na,2,1,2,5\nb,1,2,1,6\nb,2,1,1,6\nc,1,4,0,4\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = gaptime(&["estimate", "--input", p(&input), "--stage", "1,5", "--grid", "0.5,1.5", "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("no stage-5 data"), "{}", stderr(&o));
    let (h, rows) = read_csv(&out.join("targets.csv"));
    let status = col(&h, "status");
    assert_eq!(rows.iter().map(|r| r[status].as_str()).collect::<Vec<_>>(), ["ok", "skipped"]);

    // nothing left to report: unidentifiable exit code
    let o = gaptime(&["estimate", "--input", p(&input), "--stage", "5", "--grid", "1", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn row_diagnostics_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "subject,stage,gap,cause,censor\na,1,x,1,5\nb,1,1,1,3\nb,2,1,1,4\n").unwrap();
    let o = gaptime(&["estimate", "--input", p(&input), "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("bad.csv:2: cannot parse gap time 'x'"), "{err}");
    assert!(err.contains("censoring time 4 disagrees with 3"), "{err}");

    let o = gaptime(&["estimate", "--input", p(&dir.path().join("absent.csv")), "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(5));

    let o = gaptime(&["estimate", "--input", p(&input), "--band", "oops", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

fn simulated_input(dir: &Path, seed: u64) -> PathBuf {
    let out = dir.join(format!("sim{seed}"));
    let o = gaptime(&[
        "simulate", "--sample-only", "--theta", "1.5", "--n", "150", "--seed", &seed.to_string(), "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    out.join("sample.csv")
}

#[test]
fn written_sample_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let input = simulated_input(dir.path(), 11);
    let config = SimConfig { theta: 1.5, n: 150, seed: 11, ..SimConfig::default() };
    let direct = gen_sample(&config, &mut replicate_rng(11, 0)).unwrap();

    let out = dir.path().join("est");
    let o = gaptime(&[
        "estimate", "--input", p(&input), "--stage", "1,2", "--variant", "cif,ipcw,pl,csh", "--bootstrap", "0",
        "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = read_csv(&out.join("curves.csv"));
    let g = fit_censor_survival(&direct);
    let mut checked = 0;
    for row in rows.iter().filter(|r| r[col(&h, "flag")].is_empty()) {
        let t: f64 = row[col(&h, "t")].parse().unwrap();
        let v: f64 = row[col(&h, "value")].parse().unwrap();
        let (func, stage) = row[0].rsplit_once("_j").unwrap();
        let f = match func {
            "cif_k1" => Functional::Cif { cause: 1 },
            "surv_ipcw" => Functional::Survival(SurvivalVariant::Ipcw),
            "surv_pl" => Functional::Survival(SurvivalVariant::ProductLimit),
            "csh_pl_k1" => Functional::CumCsh { cause: 1, plugin: SurvivalVariant::ProductLimit },
            other => panic!("unexpected curve {other}"),
        };
        let est = Target::new(stage.parse().unwrap(), f).estimate(&direct, &g).unwrap();
        // printed values parse back to the library's bits
        assert_eq!(v.to_bits(), est.value(t).to_bits(), "{} at {t}", row[0]);
        checked += 1;
    }
    assert!(checked > 200);
}

#[test]
fn group_test_on_identical_groups() {
    let dir = tempfile::tempdir().unwrap();
    let sample = simulated_input(dir.path(), 3);
    let text = fs::read_to_string(&sample).unwrap();
    let mut doubled = String::from("subject,stage,gap,cause,censor,group\n");
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        doubled.push_str(&format!("a{line},A\nb{line},B\n"));
    }
    let input = dir.path().join("groups.csv");
    fs::write(&input, doubled).unwrap();
    let out = dir.path().join("t");
    let o = gaptime(&[
        "test", "--input", p(&input), "--test", "group", "--group-col", "group", "--stage", "2", "--times",
        "0.4,0.8", "--bootstrap", "50", "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = read_csv(&out.join("tests.csv"));
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(r[col(&h, "statistic")], "0");
        assert_eq!(r[col(&h, "reject")], "false");
    }
}

#[test]
fn test_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = simulated_input(dir.path(), 5);
    let run = |extra: &[&str]| {
        let mut a = vec!["test", "--input", p(&input), "--times", "0.5", "--out", p(dir.path())];
        a.extend_from_slice(extra);
        gaptime(&a)
    };
    let o = run(&["--test", "prevtype", "--stage", "2", "--cause", "1", "--prev-cause", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--test", "stage", "--stage", "2", "--group-col", "x", "--vs-stage", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--test", "stage", "--stage", "2"]);
    assert_eq!(o.status.code(), Some(2));
    // beyond the identifiable range
    let o = run(&["--test", "stage", "--stage", "1", "--vs-stage", "2", "--times", "1000"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn simulate_smoke_run_and_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mc");
    let o = gaptime(&["simulate", "--reps", "10", "--theta", "1.5", "--seed", "4", "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = read_csv(&out.join("summary.csv"));
    assert_eq!(rows.len(), 2 * 9 * 7);
    for r in &rows {
        assert_eq!(r.len(), h.len());
        let cp: f64 = r[col(&h, "cp")].parse().unwrap();
        assert!((0.0..=1.0).contains(&cp));
    }
    let (h, rows) = read_csv(&out.join("rejection.csv"));
    assert_eq!(h.len(), 3 + 9);
    assert_eq!(rows.len(), 7);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 4);
    assert_eq!(manifest["reps"], 10);
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() > 0.0);
    assert!(manifest["header"].as_str().unwrap().ends_with("seed=4"));

    let o = gaptime(&["simulate", "--theta", "0.5", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("theta must be ≥ 1"), "{}", stderr(&o));

    let cfg = dir.path().join("study.toml");
    fs::write(&cfg, "theta = 1.5\nn = 50\nreps = 1\nbootstrap = 20\nseed = 9\n").unwrap();
    let o = gaptime(&["simulate", "--config", p(&cfg), "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = read_csv(&out.join("summary.csv"));
    // a single replication has no empirical SD
    assert!(rows.iter().all(|r| r[col(&h, "ese")].is_empty() && r[col(&h, "flag")] == "ese_undefined"));

    fs::write(&cfg, "thetta = 1.5\n").unwrap();
    let o = gaptime(&["simulate", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_output_carries_header() {
    let dir = tempfile::tempdir().unwrap();
    let (input, censor) = four_subjects(dir.path());
    let o = gaptime(&[
        "estimate", "--input", p(&input), "--censor-file", p(&censor), "--format", "json", "--bootstrap", "0",
        "--seed", "17", "--out", p(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("estimates.json")).unwrap()).unwrap();
    assert_eq!(v["header"], format!("gaptime {} seed=17", env!("CARGO_PKG_VERSION")));
    assert_eq!(v["targets"][0]["curve_id"], "cif_k1_j1");
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = simulated_input(dir.path(), 8);
    let run = |workers: &str| {
        let out = dir.path().join(format!("w{workers}"));
        let o = gaptime(&[
            "estimate", "--input", p(&input), "--stage", "1,2", "--variant", "cif,pl,csh", "--band", "0.2:1.2",
            "--bootstrap", "60", "--workers", workers, "--out", p(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        ["curves.csv", "estimates.csv", "targets.csv"].map(|f| fs::read(out.join(f)).unwrap())
    };
    assert_eq!(run("1"), run("3"));
}
