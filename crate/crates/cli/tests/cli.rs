use std::process::Command;

use clap::Parser;
use qldpc_bp::{ChannelKind, Flavor, UpdateRule};
use qldpc_bp_cli::{parse_spec, run, run_to_writer, Args, CodeFamily, ThresholdReport, CSV_HEADER};

fn args(line: &str) -> Args {
    Args::try_parse_from(std::iter::once("qbp").chain(line.split_whitespace())).unwrap()
}

fn csv_text(line: &str) -> String {
    let spec = parse_spec(&args(line)).unwrap();
    let mut buf = Vec::new();
    run_to_writer(&spec, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn full_grid_example_resolves() {
    let spec = parse_spec(&args(
        "--code xzzx --L 5,13,21 --decoder fdbp --rule min-sum --channel depol:0.1..0.2:0.01 --trials 10000 --seed 7",
    ))
    .unwrap();
    assert_eq!(spec.code, CodeFamily::Xzzx);
    assert_eq!(spec.sizes, vec![5, 13, 21]);
    assert_eq!(spec.decoder, Flavor::Fdbp);
    assert_eq!(spec.rule, UpdateRule::MinSum);
    assert_eq!(spec.seed, 7);
    let models = spec.noise_models().unwrap();
    assert_eq!(models.len(), 11);
    assert_eq!(spec.sizes.len() * models.len(), 33);
    assert!((models[10].total() - 0.2).abs() < 1e-12);
}

#[test]
fn single_channel_and_defaults() {
    let spec = parse_spec(&args("--code planar --L 3 --decoder sbp --channel y:0.3")).unwrap();
    let m = spec.noise_models().unwrap();
    assert_eq!(m.len(), 1);
    assert_eq!((m[0].p_x(), m[0].p_y(), m[0].p_z()), (0.0, 0.3, 0.0));
    assert_eq!(spec.channel_spec().unwrap().kind(), ChannelKind::Y);
    assert_eq!(spec.trials, 10_000);
    assert_eq!(spec.iter_max, None);
}

#[test]
fn bad_requests_are_rejected() {
    for line in [
        "--code torus --L 3 --decoder sbp --channel x:0.1",
        "--code planar --L 3 --decoder gbp --channel x:0.1",
        "--code planar --L 3 --decoder sbp --channel w:0.1",
        "--code planar --L 3 --decoder sbp --channel x:1.5",
        "--code planar --L 3 --decoder sbp --channel x:0.3..0.1:0.05",
        "--code planar --L 3 --decoder sbp --channel x:0.1 --trials 0",
        "--code planar --decoder sbp --channel x:0.1",
    ] {
        assert!(parse_spec(&args(line)).is_err(), "{line}");
    }
}

#[test]
fn single_point_gives_one_row() {
    let text = csv_text("--code planar --L 3 --decoder fdbp --channel depol:0.05 --trials 200");
    let mut lines = text.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# {"));
    let resolved: serde_json::Value = serde_json::from_str(&comment[2..]).unwrap();
    assert_eq!(resolved["trials"], 200);
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(lines.count(), 1);
}

#[test]
fn csv_rows_reconstruct_the_points() {
    let line = "--code xzzx --L 3,5 --decoder pdbp --channel z:0.05,0.1 --trials 300 --seed 4";
    let spec = parse_spec(&args(line)).unwrap();
    let mut buf = Vec::new();
    let summary = run_to_writer(&spec, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let body: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), summary.rows.len());
    for (rec, row) in records.iter().zip(&summary.rows) {
        assert_eq!(rec[1].parse::<usize>().unwrap(), row.l);
        assert_eq!(rec[9].parse::<f64>().unwrap(), row.point.p);
        assert_eq!(rec[11].parse::<u64>().unwrap(), row.point.failures);
        assert_eq!(rec[12].parse::<f64>().unwrap(), row.point.ler);
        assert_eq!(rec[15].parse::<f64>().unwrap(), row.point.avg_iterations);
    }
}

#[test]
fn two_sizes_produce_a_threshold_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("out.csv");
    let json_path = dir.path().join("thr.json");
    let line = format!(
        "--code xzzx --L 5,7 --decoder fdbp --channel depol:0.08..0.24:0.04 --trials 400 -o {} --threshold-output {}",
        csv_path.display(),
        json_path.display()
    );
    run(&parse_spec(&args(&line)).unwrap()).unwrap();
    let report: ThresholdReport = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report.sizes, vec![5, 7]);
    let est = report.estimate.expect("curves should cross");
    assert_eq!(est.pairs.len(), 1);
    assert!(est.threshold > 0.08 && est.threshold < 0.24);
    let raw: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert!(raw["estimate"]["pairs"][0]["crossing"].is_number());
}

#[test]
fn reruns_are_byte_identical() {
    let line = "--code planar --L 3,5 --decoder sbp --channel x:0.05..0.15:0.05 --trials 300 --seed 11";
    assert_eq!(csv_text(line), csv_text(line));
}

fn qbp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qbp"))
}

#[test]
fn binary_exit_codes() {
    let ok = qbp()
        .args([
            "--code",
            "planar",
            "--L",
            "3",
            "--decoder",
            "sbp",
            "--channel",
            "x:0.05",
            "--trials",
            "50",
        ])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8(ok.stdout).unwrap().lines().count(), 3);

    let user = qbp()
        .args([
            "--code",
            "planar",
            "--L",
            "3",
            "--decoder",
            "nope",
            "--channel",
            "x:0.05",
        ])
        .output()
        .unwrap();
    assert_eq!(user.status.code(), Some(1));
    assert!(!user.stderr.is_empty());

    let io = qbp()
        .args([
            "--code",
            "planar",
            "--L",
            "3",
            "--decoder",
            "sbp",
            "--channel",
            "x:0.05",
            "--trials",
            "10",
        ])
        .args(["-o", "/nonexistent-dir/out.csv"])
        .output()
        .unwrap();
    assert_eq!(io.status.code(), Some(2));
}

#[test]
fn thread_count_comes_from_the_environment() {
    let run_with = |threads: &str| {
        qbp()
            .env("QBP_THREADS", threads)
            .args([
                "--code",
                "xzzx",
                "--L",
                "3,5",
                "--decoder",
                "fdbp",
                "--channel",
                "depol:0.1,0.15",
            ])
            .args(["--trials", "300", "--seed", "3"])
            .output()
            .unwrap()
    };
    let one = run_with("1");
    let four = run_with("4");
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run_with("zero").status.code(), Some(1));
}
