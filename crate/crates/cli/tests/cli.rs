//! End-to-end runs of the `codevo` binary on small scenarios.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use codevo_cli::report::{AnalysisReport, Metrics, RunReport};
use serde_json::Value;

fn codevo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_codevo"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, json: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

fn run_ok(dir: &Path, json: &str) -> RunReport {
    let config = write_config(dir, json);
    let out = dir.join("out");
    let output = codevo(&[
        "--threads",
        "1",
        "run",
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "run failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_str(&fs::read_to_string(out.join("results.json")).unwrap()).unwrap()
}

const SMALL_WELL_MIXED: &str = r#"{
  "kind": "well_mixed",
  "agents": 3,
  "environment": { "states": 2 },
  "sensor": { "symmetric": { "epsilon": 0.01 } },
  "output_states": 2,
  "optimizer": { "max_evaluations": 4000, "restarts": 1 },
  "seed": 5
}"#;

#[test]
fn run_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_ok(dir.path(), SMALL_WELL_MIXED);
    for name in [
        "results.json",
        "timing.json",
        "codes.json",
        "trace.csv",
        "distances.csv",
        "mds.csv",
        "mds.svg",
        "codes_heatmap.svg",
        "structure.dot",
    ] {
        assert!(
            dir.path().join("out").join(name).is_file(),
            "{name} missing"
        );
        if name != "timing.json" {
            assert!(
                report.artifacts.iter().any(|a| a == name),
                "{name} not listed"
            );
        }
    }
    let timing: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/timing.json")).unwrap())
            .unwrap();
    assert!(timing["wall_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(report.restarts.len(), 1);
}

#[test]
fn results_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(dir.path(), SMALL_WELL_MIXED);
    let text = fs::read_to_string(dir.path().join("out/results.json")).unwrap();
    let report: RunReport = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&report).unwrap();
    assert_eq!(text.trim_end(), again.trim_end());
    assert_eq!(serde_json::from_str::<RunReport>(&again).unwrap(), report);
}

fn assert_metrics_close(a: &Metrics, b: &Metrics) {
    let pairs = [
        (a.initial_code_similarity, b.initial_code_similarity),
        (a.final_code_similarity, b.final_code_similarity),
        (a.similarity_bound, b.similarity_bound),
        (a.env_info_pair, b.env_info_pair),
        (a.sensor_info, b.sensor_info),
        (a.side_information, b.side_information),
        (a.max_code_distance, b.max_code_distance),
    ];
    for (x, y) in pairs {
        assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
    }
    for (x, y) in a.agent_output_info.iter().zip(&b.agent_output_info) {
        assert!((x - y).abs() <= 1e-12);
    }
    assert_eq!(a.clusters, b.clusters);
    assert_eq!(a.structure.components, b.structure.components);
}

#[test]
fn analyze_reproduces_the_run_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_ok(dir.path(), SMALL_WELL_MIXED);
    let codes = dir.path().join("out/codes.json");
    let again = dir.path().join("again");
    let output = codevo(&[
        "analyze",
        "--codes",
        codes.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let analysis: AnalysisReport =
        serde_json::from_str(&fs::read_to_string(again.join("results.json")).unwrap()).unwrap();
    assert_metrics_close(&report.metrics, &analysis.metrics);
    assert_eq!(
        fs::read(dir.path().join("out/distances.csv")).unwrap(),
        fs::read(again.join("distances.csv")).unwrap()
    );
}

#[test]
fn converged_codes_coincide_in_the_mds_plot() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_ok(dir.path(), SMALL_WELL_MIXED);
    let m = &report.metrics;
    assert!((m.final_code_similarity - m.similarity_bound).abs() < 1e-6);
    let mut reader = csv::Reader::from_path(dir.path().join("out/mds.csv")).unwrap();
    let finals: Vec<(f64, f64)> = reader
        .records()
        .map(|r| r.unwrap())
        .filter(|r| &r[1] == "final")
        .map(|r| (r[3].parse().unwrap(), r[4].parse().unwrap()))
        .collect();
    assert_eq!(finals.len(), 3);
    for p in &finals {
        assert!((p.0 - finals[0].0).abs() < 1e-6 && (p.1 - finals[0].1).abs() < 1e-6);
    }
    let svg = fs::read_to_string(dir.path().join("out/mds.svg")).unwrap();
    assert!(svg.contains("<svg") && svg.contains("<circle"));
}

fn grid_config(width: usize, height: usize, evaluations: usize) -> String {
    format!(
        r#"{{
  "kind": "grid",
  "grid": {{ "width": {width}, "height": {height} }},
  "environment": {{ "states": 4 }},
  "sensor": {{ "factored_symmetric": {{ "components": 2, "epsilon": 0.01 }} }},
  "output_states": 4,
  "optimizer": {{ "max_evaluations": {evaluations}, "restarts": 1 }},
  "seed": 2
}}"#
    )
}

#[test]
fn grid_structure_graph_links_neighbours() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_ok(dir.path(), &grid_config(5, 5, 300));
    let dot = fs::read_to_string(dir.path().join("out/structure.dot")).unwrap();
    let edges: Vec<(usize, usize)> = dot
        .lines()
        .filter_map(|l| l.trim().split_once(" -- "))
        .map(|(a, rest)| {
            (
                a.parse().unwrap(),
                rest.split(' ').next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    let self_loops = edges.iter().filter(|(a, b)| a == b).count();
    assert_eq!(edges.len() - self_loops, 40);
    assert_eq!(self_loops, 25);
    assert_eq!(report.metrics.structure.links, 40);
    assert_eq!(report.metrics.structure.self_loops, 25);
    assert_eq!(report.metrics.structure.components.len(), 1);
}

#[test]
fn single_cell_grid_reaches_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_ok(dir.path(), &grid_config(1, 1, 6000));
    let m = &report.metrics;
    assert!(m.final_code_similarity <= m.similarity_bound + 1e-9);
    assert!((m.final_code_similarity - m.similarity_bound).abs() < 1e-4);
}

const SMALL_HETEROGENEOUS: &str = r#"{
  "kind": "heterogeneous",
  "environment": { "states": 9 },
  "sensor": {
    "agent_types": {
      "types": [
        { "id": "blind", "region": [] },
        { "id": "left", "region": [1, 2, 4, 5] },
        { "id": "right", "region": [5, 6, 8, 9] }
      ],
      "agents_per_type": 2
    }
  },
  "output_states": 2,
  "optimizer": { "max_evaluations": 4000, "restarts": 1 },
  "seed": 3,
  "analysis": { "focus_state": 5 }
}"#;

#[test]
fn two_letter_alphabet_informs_the_blind_agent() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_ok(dir.path(), SMALL_HETEROGENEOUS);
    let blind = report.metrics.blind_info.unwrap();
    assert!(blind > 0.0 && blind <= 9f64.log2());
    assert!(report.metrics.focus_posterior.is_some());
    assert!(dir.path().join("out/concepts.csv").is_file());
    assert!(dir.path().join("out/concepts_heatmap.svg").is_file());
}

#[test]
fn sweep_writes_one_row_per_alphabet() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_HETEROGENEOUS);
    let out = dir.path().join("sweep");
    let output = codevo(&[
        "--threads",
        "1",
        "sweep",
        "--config",
        &config,
        "--xmin",
        "2",
        "--xmax",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let mut reader = csv::Reader::from_path(out.join("sweep.csv")).unwrap();
    let xs: Vec<String> = reader
        .records()
        .map(|r| r.unwrap()[0].to_string())
        .collect();
    assert_eq!(xs, ["2", "3"]);
    assert!(out.join("x2/results.json").is_file() && out.join("x3/results.json").is_file());
}

#[test]
fn bad_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), r#"{ "kind": "well_mixed", "agentz": 3 }"#);
    let output = codevo(&["run", "--config", &unknown]);
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("error"));

    let missing = dir.path().join("nope.json");
    assert!(!codevo(&["run", "--config", missing.to_str().unwrap()])
        .status
        .success());

    let bad_noise = write_config(
        dir.path(),
        &SMALL_WELL_MIXED.replace("\"epsilon\": 0.01", "\"epsilon\": 1.5"),
    );
    assert!(!codevo(&["run", "--config", &bad_noise]).status.success());

    let fine = write_config(dir.path(), SMALL_WELL_MIXED);
    assert!(!codevo(&["--threads", "0", "run", "--config", &fine])
        .status
        .success());
}
