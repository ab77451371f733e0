//! End-to-end smoke tests for every CLI path.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_commea"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("commea-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawning the binary");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn run_writes_a_record_with_full_archives() {
    let dir = scratch("run");
    let out = dir.join("record.json");
    run_ok(bin().args([
        "run",
        "--problem",
        "sinemirror",
        "--pop",
        "20",
        "--evals",
        "1000",
        "--eps",
        "0.1",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]));
    let record = read_json(&out);
    assert_eq!(record["problem"], "sinemirror");
    assert_eq!(record["final_da"]["x"].as_array().unwrap().len(), 20);
    assert_eq!(record["ablation"], false);
    assert_eq!(record["schema_version"], "1.0");
}

#[test]
fn run_ca_only_is_flagged_and_has_no_da() {
    let dir = scratch("ablation");
    let out = dir.join("record.json");
    run_ok(bin().args([
        "run",
        "--problem",
        "dualdepth-d0.10",
        "--pop",
        "16",
        "--evals",
        "800",
        "--mode",
        "ca-only",
        "--out",
        out.to_str().unwrap(),
    ]));
    let record = read_json(&out);
    assert_eq!(record["ablation"], true);
    assert!(record.get("final_da").is_none());
    assert_eq!(record["final_ca"]["x"].as_array().unwrap().len(), 16);
}

#[test]
fn run_rejects_unknown_problem_with_one_line_diagnostic() {
    let out = bin()
        .args(["run", "--problem", "mystery-42"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("mystery-42"), "stderr: {stderr}");
    assert_eq!(stderr.lines().count(), 1, "stderr: {stderr}");
}

#[test]
fn matrix_is_deterministic_and_table_ranks_modes() {
    let dir = scratch("matrix");
    let config = dir.join("matrix.json");
    fs::write(
        &config,
        r#"{
            "problems": ["sinemirror", "dualdepth-d0.10"],
            "modes": ["full", "ca-only"],
            "pop": 16,
            "evals": 800,
            "eps": 0.1
        }"#,
    )
    .unwrap();
    let records = dir.join("records");
    let run_matrix = |out: &Path| {
        run_ok(bin().args([
            "matrix",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seeds",
            "2",
            "--jobs",
            "2",
        ]));
    };
    run_matrix(&records);
    let mut names: Vec<String> = fs::read_dir(&records)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 8, "2 problems x 2 modes x 2 seeds");

    // rerun into a second directory: byte-identical records
    let again = dir.join("records2");
    run_matrix(&again);
    for name in &names {
        assert_eq!(
            fs::read(records.join(name)).unwrap(),
            fs::read(again.join(name)).unwrap(),
            "{name} differs between reruns"
        );
    }

    // aggregate into the rank table
    let table = dir.join("table.csv");
    run_ok(bin().args([
        "table",
        "--records",
        records.to_str().unwrap(),
        "--out",
        table.to_str().unwrap(),
    ]));
    let text = fs::read_to_string(&table).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "problem,mode,metric,mean,std,rank");
    // 2 problems x 2 modes x 2 metrics
    assert_eq!(lines.count(), 8);
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 6);
        let rank: f64 = fields[5].parse().unwrap();
        assert!((1.0..=2.0).contains(&rank));
    }

    // a ragged matrix aborts and names the missing cell
    fs::remove_file(records.join(&names[0])).unwrap();
    let out = bin()
        .args(["table", "--records", records.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("ragged"), "stderr: {stderr}");
}

#[test]
fn table_with_single_mode_gives_rank_one_everywhere() {
    let dir = scratch("single-mode");
    let config = dir.join("matrix.json");
    fs::write(
        &config,
        r#"{ "problems": ["sinemirror"], "modes": ["full"], "pop": 16, "evals": 800 }"#,
    )
    .unwrap();
    let records = dir.join("records");
    run_ok(bin().args([
        "matrix",
        "--config",
        config.to_str().unwrap(),
        "--out",
        records.to_str().unwrap(),
        "--seeds",
        "3",
    ]));
    let table = dir.join("table.csv");
    run_ok(bin().args([
        "table",
        "--records",
        records.to_str().unwrap(),
        "--out",
        table.to_str().unwrap(),
    ]));
    for line in fs::read_to_string(&table).unwrap().lines().skip(1) {
        assert!(line.ends_with(",1.000"), "line: {line}");
    }
}

#[test]
fn matrix_reads_jobs_from_env_and_keeps_completed_cells_on_failure() {
    let dir = scratch("partial");
    let config = dir.join("matrix.json");
    // one unknown problem id: its cells fail, the rest complete
    fs::write(
        &config,
        r#"{ "problems": ["sinemirror", "not-a-problem"], "pop": 16, "evals": 800 }"#,
    )
    .unwrap();
    let records = dir.join("records");
    let out = bin()
        .env("COMMEA_JOBS", "1")
        .args([
            "matrix",
            "--config",
            config.to_str().unwrap(),
            "--out",
            records.to_str().unwrap(),
            "--seeds",
            "2",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("not-a-problem"), "stderr: {stderr}");
    // the valid cells were kept
    let kept = fs::read_dir(&records).unwrap().count();
    assert_eq!(kept, 2);
}

#[test]
fn plotdata_covers_every_kind() {
    let dir = scratch("plotdata");
    let record = dir.join("record.json");
    run_ok(bin().args([
        "run",
        "--problem",
        "sinemirror",
        "--pop",
        "16",
        "--evals",
        "2000",
        "--eps",
        "1.0",
        "--trace",
        "--out",
        record.to_str().unwrap(),
    ]));

    // eps_curve: with eps = 1 every stage >= 0.5 sits exactly at 1
    let curve = dir.join("eps.csv");
    run_ok(bin().args([
        "plotdata",
        "--record",
        record.to_str().unwrap(),
        "--kind",
        "eps_curve",
        "--out",
        curve.to_str().unwrap(),
    ]));
    let text = fs::read_to_string(&curve).unwrap();
    assert_eq!(text.lines().next().unwrap(), "stage,eps");
    let mut saw_late = false;
    for line in text.lines().skip(1) {
        let (stage, eps) = line.split_once(',').unwrap();
        let stage: f64 = stage.parse().unwrap();
        let eps: f64 = eps.parse().unwrap();
        if stage >= 0.5 {
            assert_eq!(eps, 1.0, "line: {line}");
            saw_late = true;
        }
    }
    assert!(saw_late);

    // trace_metrics: finite non-negative metric columns
    let metrics = dir.join("metrics.csv");
    run_ok(bin().args([
        "plotdata",
        "--record",
        record.to_str().unwrap(),
        "--kind",
        "trace_metrics",
        "--out",
        metrics.to_str().unwrap(),
    ]));
    let text = fs::read_to_string(&metrics).unwrap();
    assert_eq!(text.lines().next().unwrap(), "generation,eps,igd,igdx");
    assert!(text.lines().count() > 1);
    for line in text.lines().skip(1) {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert!(fields[2].is_finite() && fields[2] >= 0.0);
        assert!(fields[3].is_finite() && fields[3] >= 0.0);
    }

    // scatter kinds: one row per archive member
    for (kind, header) in [("scatter_decision", "x1,x2"), ("scatter_objective", "f1,f2")] {
        let out = dir.join(format!("{kind}.csv"));
        run_ok(bin().args([
            "plotdata",
            "--record",
            record.to_str().unwrap(),
            "--kind",
            kind,
            "--out",
            out.to_str().unwrap(),
        ]));
        let text = fs::read_to_string(&out).unwrap();
        assert_eq!(text.lines().next().unwrap(), header);
        assert_eq!(text.lines().count(), 17, "{kind}: 16 members + header");
    }

    // trace_metrics without a trace is an error
    let bare = dir.join("bare.json");
    run_ok(bin().args([
        "run",
        "--problem",
        "sinemirror",
        "--pop",
        "16",
        "--evals",
        "800",
        "--out",
        bare.to_str().unwrap(),
    ]));
    let out = bin()
        .args([
            "plotdata",
            "--record",
            bare.to_str().unwrap(),
            "--kind",
            "trace_metrics",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));
}
