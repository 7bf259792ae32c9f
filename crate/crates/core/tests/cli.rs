//! Drives the `qaoa-bench` binary end to end and checks its files with
//! independent parsers.

use std::path::Path;
use std::process::{Command, Output};

use qaoa_constraints::knapsack::KnapsackInstance;

const COLUMNS: [&str; 12] = [
    "method",
    "m",
    "p",
    "instance_seed",
    "nfev",
    "wall_time_ms",
    "p_best",
    "feasibility_ratio",
    "avg_performance",
    "n_qubits",
    "n_ancilla",
    "two_qubit_gates_per_layer",
];

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qaoa-bench"))
        .args(args)
        .env("QAOA_BENCH_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn read_table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn check_svg(path: &Path) {
    let text = std::fs::read_to_string(path).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert!(doc.descendants().any(|n| n.has_tag_name("text")), "{} has no labels", path.display());
}

#[test]
fn usage_errors_exit_with_2() {
    assert_eq!(bench(&[]).status.code(), Some(2));
    assert_eq!(bench(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bench(&["run", "--layers", "many"]).status.code(), Some(2));
}

#[test]
fn invalid_configuration_exits_with_1() {
    let out = bench(&["run", "--method", "zeno", "--backend", "statevector", "-m", "3", "-p", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(bench(&["run", "--method", "annealing"]).status.code(), Some(1));
    assert_eq!(bench(&["report", "/nonexistent/results.csv"]).status.code(), Some(1));
}

#[test]
fn gen_writes_readable_instances() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("inst");
    let out = bench(&["gen", "--sizes", "3..=4", "--instances", "3", "--seed", "5", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let mut names: Vec<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["m3_000.txt", "m3_001.txt", "m3_002.txt", "m4_000.txt", "m4_001.txt", "m4_002.txt"]);
    let inst = KnapsackInstance::read_file(out_dir.join("m4_002.txt")).unwrap();
    assert_eq!(inst.m(), 4);
    assert!(inst.capacity() >= 2);

    // Same seed, same files.
    let again = dir.path().join("again");
    bench(&["gen", "--sizes", "3..=4", "--instances", "3", "--seed", "5", "--out", again.to_str().unwrap()]);
    for name in &names {
        assert_eq!(std::fs::read(out_dir.join(name)).unwrap(), std::fs::read(again.join(name)).unwrap());
    }
}

#[test]
fn run_prints_one_parseable_row() {
    let out = bench(&["run", "--method", "dephasing", "-m", "3", "-p", "2", "--index", "4", "--restarts", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_table(&stdout(&out));
    assert_eq!(header, COLUMNS);
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!((row[0].as_str(), row[1].as_str(), row[2].as_str()), ("dephasing", "3", "2"));
    let p_best: f64 = row[6].parse().unwrap();
    let feasibility: f64 = row[7].parse().unwrap();
    assert!((0.0..=1.0).contains(&p_best));
    assert!(feasibility >= 0.0);
    let nfev: usize = row[4].parse().unwrap();
    assert!(nfev > 0);
}

#[test]
fn sweep_then_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sweep");
    let out = bench(&[
        "sweep",
        "--methods",
        "qubo,dephasing,zeno",
        "--sizes",
        "3,4",
        "--layers",
        "1,2",
        "--instances",
        "2",
        "--restarts",
        "1",
        "--max-iterations",
        "40",
        "--seed",
        "9",
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv_text = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    let (header, rows) = read_table(&csv_text);
    assert_eq!(header, COLUMNS);
    assert_eq!(rows.len(), 3 * 2 * 2 * 2);
    let order: Vec<(String, String, String)> = rows.iter().map(|r| (r[0].clone(), r[1].clone(), r[2].clone())).collect();
    assert_eq!(order.first().unwrap(), &("qubo".into(), "3".into(), "1".into()));
    assert_eq!(order.last().unwrap(), &("zeno".into(), "4".into(), "2".into()));
    // Every method sees the same instances.
    let seeds = |method: &str| -> Vec<&String> { rows.iter().filter(|r| r[0] == method).map(|r| &r[3]).collect() };
    assert_eq!(seeds("qubo"), seeds("zeno"));
    assert_eq!(seeds("qubo"), seeds("dephasing"));

    assert!(std::fs::read_to_string(out_dir.join("config.txt")).unwrap().contains("seed"));
    let (agg_header, agg_rows) = read_table(&std::fs::read_to_string(out_dir.join("aggregate.csv")).unwrap());
    assert_eq!(agg_header, ["method", "m", "p", "metric", "n", "mean", "std", "q25", "q75"]);
    assert_eq!(agg_rows.len(), 3 * 2 * 2 * 8);
    let svgs: Vec<_> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "svg"))
        .collect();
    assert_eq!(svgs.len(), 11);
    svgs.iter().for_each(|p| check_svg(p));

    let report_dir = dir.path().join("report");
    let out = bench(&["report", out_dir.join("results.csv").to_str().unwrap(), "--out", report_dir.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(report_dir.join("aggregate.csv")).unwrap(),
        std::fs::read(out_dir.join("aggregate.csv")).unwrap()
    );
}

#[test]
fn selftest_reports_all_pass() {
    let out = bench(&["selftest", "--instances", "4", "--max-size", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().count() >= 3);
    assert!(text.lines().all(|l| l.starts_with("[PASS]")), "{text}");
}
