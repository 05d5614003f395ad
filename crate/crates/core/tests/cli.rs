use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use orgsearch::landscape::{Landscape, LandscapeFile};
use orgsearch::{parse_config, ScenarioConfig};

fn orgsearch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orgsearch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = orgsearch(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn small<'a>(out: &'a Path, extra: &[&'a str]) -> Vec<&'a str> {
    let mut args = vec![
        "--set",
        "landscapes=3",
        "--set",
        "runsPerLandscape=2",
        "--set",
        "T=30",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    args
}

#[test]
fn trace_has_one_row_per_period() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["trace"];
    args.extend(small(
        dir.path(),
        &["--kex", "2", "--landscape", "2", "--run", "1"],
    ));
    ok(&args);
    let text = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 31);
    assert!(lines[0].starts_with("run_id,t,V,V_norm,altered,"));
    assert!(lines[0].ends_with("delta_4"));
    let columns = lines[0].split(',').count();
    for (t, line) in lines[1..].iter().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), columns);
        assert_eq!(fields[0], "5");
        assert_eq!(fields[1], (t + 1).to_string());
    }
}

#[test]
fn sweep_writes_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep"];
    args.extend(small(dir.path(), &[]));
    let out = ok(&args);
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "strategy,kEx,runs,perf_change_first_periods,final_performance,final_performance_ci,global_max_found,altered_config_ratio"
    );
    assert_eq!(lines.len(), 19);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.matches("spread").count(), 3);
}

#[test]
fn echoed_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let mut args = vec!["run"];
    args.extend(small(
        &first,
        &[
            "--strategy",
            "hc2",
            "--seed",
            "9",
            "--set",
            "noiseModel=additive",
        ],
    ));
    ok(&args);
    let echoed = first.join("config.json");
    let config = parse_config(Some(&echoed), &[]).unwrap();
    assert_eq!(config.master_seed, 9);
    assert_eq!(config.periods, 30);
    ok(&[
        "run",
        "--config",
        echoed.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    for file in ["config.json", "summary.json", "summary.csv", "series.csv"] {
        assert_eq!(
            fs::read(first.join(file)).unwrap(),
            fs::read(second.join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn dumped_landscape_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["dump-landscape"];
    args.extend(small(dir.path(), &["--kex", "4", "--landscape", "1"]));
    ok(&args);
    let text = fs::read_to_string(dir.path().join("landscape.json")).unwrap();
    let file: LandscapeFile = serde_json::from_str(&text).unwrap();
    assert_eq!(file.k_ex, 4);
    assert!(file.dependencies.iter().all(|d| d.len() == 6));
    let landscape = Landscape::from_file(file.clone()).unwrap();
    assert_eq!(landscape.to_file(file.seed), file);
}

#[test]
fn bad_input_fails_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let cases: [(&[&str], &str); 4] = [
        (&["run", "--set", "n=10", "--out", out_dir], "not divisible"),
        (&["run", "--set", "colour=blue", "--out", out_dir], "colour"),
        (
            &[
                "trace",
                "--set",
                "landscapes=2",
                "--landscape",
                "2",
                "--out",
                out_dir,
            ],
            "invalid trace selector",
        ),
        (
            &["run", "--strategy", "annealing", "--out", out_dir],
            "annealing",
        ),
    ];
    for (args, needle) in cases {
        let out = orgsearch(args);
        assert!(!out.status.success(), "{args:?} succeeded");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains(needle), "{args:?}: {stderr}");
    }
}

#[test]
fn defaults_reach_the_binary_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    fs::write(&empty, "{}").unwrap();
    let out = dir.path().join("out");
    // keep the run tiny; everything else stays at its default
    ok(&[
        "run",
        "--config",
        empty.to_str().unwrap(),
        "--set",
        "landscapes=1",
        "--set",
        "runsPerLandscape=1",
        "--set",
        "T=1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let echoed = parse_config(Some(&out.join("config.json")), &[]).unwrap();
    let expected = ScenarioConfig {
        landscapes: 1,
        runs_per_landscape: 1,
        periods: 1,
        ..ScenarioConfig::default()
    };
    assert_eq!(echoed, expected);
}
