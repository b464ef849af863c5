//! End-to-end tests of the binary: subcommand plumbing, exit codes, and
//! byte-level determinism across thread counts.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slope-mlaa"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_process_diff_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene.png");
    let reference = dir.path().join("scene.ref.png");
    let out = dir.path().join("out.png");

    let synth = run(&[
        "synth",
        "--slope",
        "2/7",
        "--intercept",
        "3.25",
        "--size",
        "96x96",
        "--out",
        path_str(&scene),
        "--reference",
        path_str(&reference),
    ]);
    assert_code(&synth, 0);
    assert!(scene.exists() && reference.exists());

    let process = run(&[
        "process",
        "--in",
        path_str(&scene),
        "--out",
        path_str(&out),
        "--mode",
        "slope",
        "--max-cycles",
        "4",
    ]);
    assert_code(&process, 0);
    let stdout = String::from_utf8_lossy(&process.stdout);
    assert!(stdout.contains("runs extended"), "stdout: {stdout}");

    let diff = run(&[
        "diff",
        "--a",
        path_str(&scene),
        "--b",
        path_str(&out),
        "--reference",
        path_str(&reference),
    ]);
    assert_code(&diff, 0);
    let report = String::from_utf8_lossy(&diff.stdout);
    assert!(report.contains("psnr(a, b)"));
    assert!(report.contains("delta(b - a)"), "report: {report}");
}

#[test]
fn identical_inputs_give_identical_psnr_inf() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("s.png");
    run(&[
        "synth", "--slope", "1/3", "--size", "32x16", "--out", path_str(&scene),
    ]);
    let diff = run(&["diff", "--a", path_str(&scene), "--b", path_str(&scene)]);
    assert_code(&diff, 0);
    assert!(String::from_utf8_lossy(&diff.stdout).contains("inf"));
}

#[test]
fn process_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene.png");
    run(&[
        "synth", "--slope", "3/8", "--intercept", "1.5", "--size", "128x128",
        "--out", path_str(&scene),
    ]);

    let mut outputs = Vec::new();
    for (name, threads) in [("one.png", "1"), ("four.png", "4"), ("again.png", "1")] {
        let out = dir.path().join(name);
        let status = run(&[
            "process",
            "--in",
            path_str(&scene),
            "--out",
            path_str(&out),
            "--mode",
            "slope",
            "--threads",
            threads,
        ]);
        assert_code(&status, 0);
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "1 vs 4 threads");
    assert_eq!(outputs[0], outputs[2], "repeat run");
}

#[test]
fn debug_dumps_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene.png");
    run(&[
        "synth", "--slope", "1/4", "--size", "48x24", "--out", path_str(&scene),
    ]);
    let out = dir.path().join("o.png");
    let edges = dir.path().join("e.png");
    let weights = dir.path().join("w.png");
    let runs = dir.path().join("r.csv");
    let status = run(&[
        "process",
        "--in", path_str(&scene),
        "--out", path_str(&out),
        "--mode", "mlaa",
        "--dump-edges", path_str(&edges),
        "--dump-weights", path_str(&weights),
        "--dump-runs", path_str(&runs),
    ]);
    assert_code(&status, 0);
    assert!(edges.exists() && weights.exists());
    let csv = std::fs::read_to_string(&runs).unwrap();
    assert!(csv.starts_with("schema,orientation,anchor_x,anchor_y"));
    assert!(csv.lines().count() > 2, "expected some runs: {csv}");
}

#[test]
fn bench_writes_versioned_csv_with_probe_data() {
    let dir = tempfile::tempdir().unwrap();
    let scenes = dir.path().join("scenes");
    std::fs::create_dir(&scenes).unwrap();
    run(&[
        "synth", "--slope", "1/8", "--intercept", "2.5", "--size", "128x32",
        "--out", path_str(&scenes.join("l8.png")),
        "--reference", path_str(&scenes.join("l8.ref.png")),
    ]);
    let report = dir.path().join("report.csv");
    let probes = dir.path().join("probes.csv");
    let status = run(&[
        "bench",
        "--scenes", path_str(&scenes),
        "--cycles", "0..4",
        "--out", path_str(&report),
        "--probes-out", path_str(&probes),
    ]);
    assert_code(&status, 0);

    let report = std::fs::read_to_string(&report).unwrap();
    let mut lines = report.lines();
    assert_eq!(
        lines.next().unwrap(),
        "schema,scene,cycles,runs_extended,slope_probes,max_probes_per_direction,probe_bound,brute_probes,probe_ratio,psnr_slope_db,psnr_local_db,psnr_none_db"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5, "one row per budget: {report}");
    for row in &rows {
        assert!(row.starts_with("bench-v1,l8,"));
        let fields: Vec<&str> = row.split(',').collect();
        let max_per_dir: u32 = fields[5].parse().unwrap();
        let bound: u32 = fields[6].parse().unwrap();
        assert!(max_per_dir <= bound, "row: {row}");
        assert!(!fields[9].is_empty(), "psnr column filled from reference");
    }

    let probes = std::fs::read_to_string(&probes).unwrap();
    assert!(probes.starts_with("schema,scene,cycles,run_id,orientation"));
    assert!(probes.lines().count() > 1);
}

#[test]
fn usage_errors_exit_one() {
    let out = run(&["process", "--in", "x.png"]); // missing required flags
    assert_code(&out, 1);
    let out = run(&["nonsense"]);
    assert_code(&out, 1);
    let out = run(&["synth", "--slope", "abc", "--size", "8x8", "--out", "s.png"]);
    assert_code(&out, 1);
}

#[test]
fn io_errors_exit_two() {
    let out = run(&[
        "process", "--in", "/nonexistent/in.png", "--out", "/tmp/out.png", "--mode", "none",
    ]);
    assert_code(&out, 2);
}

#[test]
fn contract_violations_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    // Slope outside (0, 1) is a domain contract failure, not a parse error.
    let out = run(&[
        "synth", "--slope", "3/2", "--size", "16x16",
        "--out", path_str(&dir.path().join("s.png")),
    ]);
    assert_code(&out, 3);

    // Mismatched dimensions in diff.
    let a = dir.path().join("a.png");
    let b = dir.path().join("b.png");
    run(&["synth", "--slope", "1/3", "--size", "16x16", "--out", path_str(&a)]);
    run(&["synth", "--slope", "1/3", "--size", "16x8", "--out", path_str(&b)]);
    let out = run(&["diff", "--a", path_str(&a), "--b", path_str(&b)]);
    assert_code(&out, 3);

    // Threshold outside (0, 1).
    let out = run(&[
        "process", "--in", path_str(&a), "--out", path_str(&dir.path().join("o.png")),
        "--mode", "slope", "--threshold", "1.5",
    ]);
    assert_code(&out, 3);
}
