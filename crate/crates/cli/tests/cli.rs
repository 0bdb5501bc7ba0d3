//! End-to-end tests of the `swim` binary: determinism of outputs, the CSV
//! bundles, flag behavior, and error reporting.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const TINY_CONFIG: &str = "\
num_mobile=8
num_stationary=2
num_locations=6
map_width=500
map_height=500
sim_duration=43200
rng_seed=7
node_class=walkers,8,mobile,11,600
node_class=fixed,2,stationary,22,120
";

fn swim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary should run")
}

fn assert_success(output: &Output) {
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn setup() -> TempDir {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("tiny.cfg"), TINY_CONFIG).unwrap();
    dir
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = setup();
    for out in ["a.trace", "b.trace"] {
        let output = swim(
            &[
                "simulate", "--config", "tiny.cfg", "--seed", "1", "--out", out,
            ],
            dir.path(),
        );
        assert_success(&output);
    }
    let a = fs::read(dir.path().join("a.trace")).unwrap();
    let b = fs::read(dir.path().join("b.trace")).unwrap();
    assert_eq!(a, b);
    assert!(!a.is_empty());
}

#[test]
fn ground_truth_has_at_least_as_many_records() {
    let dir = setup();
    assert_success(&swim(
        &[
            "simulate",
            "--config",
            "tiny.cfg",
            "--seed",
            "3",
            "--out",
            "sampled.trace",
        ],
        dir.path(),
    ));
    assert_success(&swim(
        &[
            "simulate",
            "--config",
            "tiny.cfg",
            "--seed",
            "3",
            "--ground-truth",
            "--out",
            "truth.trace",
        ],
        dir.path(),
    ));
    let count = |name: &str| {
        fs::read_to_string(dir.path().join(name))
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .count()
    };
    assert!(count("truth.trace") >= count("sampled.trace"));
}

#[test]
fn movement_dump_has_the_documented_columns() {
    let dir = setup();
    assert_success(&swim(
        &[
            "simulate",
            "--config",
            "tiny.cfg",
            "--out",
            "sim.trace",
            "--movement",
            "moves.csv",
        ],
        dir.path(),
    ));
    let dump = fs::read_to_string(dir.path().join("moves.csv")).unwrap();
    let mut lines = dump.lines();
    assert_eq!(lines.next(), Some("node_id,x,y,t_start,t_end"));
    let first = lines.next().unwrap();
    assert_eq!(first.split(',').count(), 5);
    // Times carry exactly three decimals.
    let t_start = first.split(',').nth(3).unwrap();
    assert_eq!(t_start.split('.').nth(1).unwrap().len(), 3);
}

#[test]
fn analyze_writes_the_six_metric_files() {
    let dir = setup();
    assert_success(&swim(
        &["simulate", "--config", "tiny.cfg", "--out", "sim.trace"],
        dir.path(),
    ));
    assert_success(&swim(
        &["analyze", "--trace", "sim.trace", "--outdir", "metrics"],
        dir.path(),
    ));
    for name in [
        "pair_curve.csv",
        "pair_matrix.csv",
        "contact_duration_ccdf.csv",
        "intercontact_ccdf.csv",
        "contacts_per_hour_per_node.csv",
        "hour_of_day.csv",
    ] {
        let path = dir.path().join("metrics").join(name);
        assert!(path.exists(), "{name} missing");
        assert!(fs::read_to_string(path).unwrap().lines().count() >= 1);
    }
}

#[test]
fn hour_offset_rotates_the_profile() {
    let dir = setup();
    assert_success(&swim(
        &["simulate", "--config", "tiny.cfg", "--out", "sim.trace"],
        dir.path(),
    ));
    assert_success(&swim(
        &["analyze", "--trace", "sim.trace", "--outdir", "base"],
        dir.path(),
    ));
    assert_success(&swim(
        &[
            "analyze",
            "--trace",
            "sim.trace",
            "--hour-offset",
            "8",
            "--outdir",
            "shifted",
        ],
        dir.path(),
    ));
    let read_buckets = |subdir: &str| -> Vec<(usize, u64)> {
        fs::read_to_string(dir.path().join(subdir).join("hour_of_day.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|line| {
                let mut fields = line.split(',');
                (
                    fields.next().unwrap().parse().unwrap(),
                    fields.next().unwrap().parse().unwrap(),
                )
            })
            .collect()
    };
    let base = read_buckets("base");
    let shifted = read_buckets("shifted");
    for (hour, count) in &base {
        assert_eq!(shifted[(hour + 8) % 24].1, *count);
    }
}

#[test]
fn t0_shifts_absolute_timestamps() {
    let dir = setup();
    fs::write(
        dir.path().join("epoch.trace"),
        "5 9 1000000100 1000000200\n9 5 1000003700 1000003800\n",
    )
    .unwrap();
    assert_success(&swim(
        &[
            "analyze",
            "--trace",
            "epoch.trace",
            "--t0",
            "1000000000",
            "--outdir",
            "m",
        ],
        dir.path(),
    ));
    let hod = fs::read_to_string(dir.path().join("m").join("hour_of_day.csv")).unwrap();
    assert!(hod.contains("0,1\n1,1\n"), "{hod}");

    let bad = swim(
        &[
            "analyze",
            "--trace",
            "epoch.trace",
            "--t0",
            "2000000000",
            "--outdir",
            "m2",
        ],
        dir.path(),
    );
    assert!(!bad.status.success());
}

#[test]
fn compare_of_a_trace_with_itself_has_zero_distance() {
    let dir = setup();
    assert_success(&swim(
        &["simulate", "--config", "tiny.cfg", "--out", "sim.trace"],
        dir.path(),
    ));
    assert_success(&swim(
        &[
            "compare",
            "--trace-a",
            "sim.trace",
            "--trace-b",
            "sim.trace",
            "--outdir",
            "self",
        ],
        dir.path(),
    ));
    let summary = fs::read_to_string(dir.path().join("self").join("summary.csv")).unwrap();
    let distance_row = summary
        .lines()
        .find(|l| l.starts_with("curve_distance"))
        .unwrap();
    assert_eq!(distance_row, "curve_distance,0,0,0");
}

#[test]
fn compare_summary_is_symmetric_under_swap() {
    let dir = setup();
    assert_success(&swim(
        &[
            "simulate", "--config", "tiny.cfg", "--seed", "1", "--out", "a.trace",
        ],
        dir.path(),
    ));
    assert_success(&swim(
        &[
            "simulate", "--config", "tiny.cfg", "--seed", "2", "--out", "b.trace",
        ],
        dir.path(),
    ));
    assert_success(&swim(
        &[
            "compare",
            "--trace-a",
            "a.trace",
            "--trace-b",
            "b.trace",
            "--outdir",
            "ab",
        ],
        dir.path(),
    ));
    assert_success(&swim(
        &[
            "compare",
            "--trace-a",
            "b.trace",
            "--trace-b",
            "a.trace",
            "--outdir",
            "ba",
        ],
        dir.path(),
    ));
    let parse_summary = |subdir: &str| -> Vec<Vec<String>> {
        fs::read_to_string(dir.path().join(subdir).join("summary.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect()
    };
    let ab = parse_summary("ab");
    let ba = parse_summary("ba");
    for (row_ab, row_ba) in ab.iter().zip(&ba) {
        assert_eq!(row_ab[0], row_ba[0]);
        assert_eq!(row_ab[1], row_ba[2], "value_a must become value_b");
        assert_eq!(row_ab[2], row_ba[1], "value_b must become value_a");
    }
    let distance = |rows: &[Vec<String>]| rows[0][1].clone();
    assert_eq!(distance(&ab), distance(&ba));
}

#[test]
fn sweep_recommends_the_only_alpha_and_is_deterministic() {
    let dir = setup();
    assert_success(&swim(
        &["simulate", "--config", "tiny.cfg", "--out", "target.trace"],
        dir.path(),
    ));
    let mut reports = Vec::new();
    for outdir in ["s1", "s2"] {
        let output = swim(
            &[
                "sweep",
                "--config",
                "tiny.cfg",
                "--target",
                "target.trace",
                "--alphas",
                "0.4",
                "--reps",
                "2",
                "--outdir",
                outdir,
            ],
            dir.path(),
        );
        assert_success(&output);
        assert!(
            String::from_utf8_lossy(&output.stdout).contains("recommended alpha: 0.4"),
            "{}",
            String::from_utf8_lossy(&output.stdout)
        );
        assert!(dir
            .path()
            .join(outdir)
            .join("pair_curve_alpha_0.4.csv")
            .exists());
        reports.push(fs::read(dir.path().join(outdir).join("sweep_report.csv")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn errors_exit_nonzero_with_one_line_diagnostics() {
    let dir = setup();
    let cases: Vec<Vec<&str>> = vec![
        vec!["analyze", "--trace", "missing.trace"],
        vec!["simulate", "--config", "missing.cfg"],
        vec!["sweep", "--config", "tiny.cfg", "--target", "missing.trace"],
    ];
    for args in cases {
        let output = swim(&args, dir.path());
        assert!(!output.status.success(), "{args:?} should fail");
        let stderr = String::from_utf8_lossy(&output.stderr);
        assert_eq!(stderr.lines().count(), 1, "stderr: {stderr}");
        assert!(stderr.starts_with("error:"), "stderr: {stderr}");
    }

    fs::write(dir.path().join("bad.cfg"), "alpha=1.5\n").unwrap();
    let output = swim(
        &["simulate", "--config", "bad.cfg", "--out", "x.trace"],
        dir.path(),
    );
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("alpha"), "stderr: {stderr}");
}

#[test]
fn stdout_trace_when_no_out_flag() {
    let dir = setup();
    let output = swim(&["simulate", "--config", "tiny.cfg"], dir.path());
    assert_success(&output);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.starts_with("# nodes=10 span="), "{stdout}");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("records="), "{stderr}");
}
