use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use codevo::analysis::{
    classical_mds, concept_table, distance_matrix, group_codes, structure_graph,
};
use codevo::model::{Code, PopulationModel, PopulationStructure};
use codevo::optim::{best_outcome, optimize_restarts, OptimizationTrace, ScenarioOutcome};
use codevo::Execution;
use serde::{Deserialize, Serialize};

use crate::config::{ScenarioConfig, ScenarioKind, Selection};
use crate::error::{io_err, CliError, Result};
use crate::report::{compute_metrics, AnalysisReport, RestartSummary, RunReport};
use crate::svg::{self, Panel, ScatterPoint};

pub const RESULTS_FILE: &str = "results.json";
pub const TIMING_FILE: &str = "timing.json";
pub const CODES_FILE: &str = "codes.json";
pub const SWEEP_FILE: &str = "sweep.csv";

/// Everything needed to re-analyse a run without optimizing again.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SavedCodes {
    pub config: ScenarioConfig,
    pub initial_codes: Vec<Code>,
    pub codes: Vec<Code>,
    pub structure: PopulationStructure,
    /// Only present for flexible runs, whose structure evolves too.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_structure: Option<PopulationStructure>,
}

/// Wall-clock data, kept apart from `results.json` so that file is
/// reproducible byte for byte.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub restart_count: usize,
}

pub struct RunOutput {
    pub report: RunReport,
    pub best: ScenarioOutcome,
    pub directory: PathBuf,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub output_states: usize,
    pub blind_info: f64,
    pub code_similarity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focus_posterior: Option<f64>,
}

/// Optimizes the configured scenario with restarts, keeps the best restart
/// under the configured selection and writes every artifact into `out` (the
/// configured output directory when `None`).
pub fn run(config: &ScenarioConfig, execution: Execution, out: Option<&Path>) -> Result<RunOutput> {
    config.validate()?;
    let started = Instant::now();
    let template = config.template()?;
    let codec = config.codec(&template)?;
    let mut cma = config.cma_config(codec.dimension());
    cma.execution = execution;
    let outcomes = optimize_restarts(
        &template,
        &codec,
        &cma,
        &config.optimizer.refinement,
        config.restarts(),
        execution,
    )?;
    let heterogeneous = config.kind == ScenarioKind::Heterogeneous;
    let restarts: Vec<RestartSummary> = outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| RestartSummary::new(i, o, heterogeneous))
        .collect();
    let best_index = match config.selection() {
        Selection::CodeSimilarity => best_outcome(&outcomes),
        // ties fall back to code similarity, then to the earliest restart
        Selection::BlindInfo => restarts
            .iter()
            .rev()
            .max_by(|a, b| {
                let key = |r: &RestartSummary| (r.blind_info.unwrap_or(0.0), r.best_value);
                key(a)
                    .partial_cmp(&key(b))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|r| r.index),
    }
    .expect("at least one restart");
    let evaluations = outcomes.iter().map(|o| o.trace.evaluations).sum();
    let best = outcomes
        .into_iter()
        .nth(best_index)
        .expect("index from best_outcome");
    let metrics = compute_metrics(config, &best.initial, &best.model)?;

    let directory = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| config.output_dir.clone());
    let mut report = RunReport {
        config: config.clone(),
        restarts,
        best_restart: best_index,
        evaluations,
        metrics,
        artifacts: Vec::new(),
    };
    fs::create_dir_all(&directory).map_err(io_err(&directory))?;
    let mut artifacts = vec![RESULTS_FILE.to_string()];
    write_trace(&directory, &best.trace, &mut artifacts)?;
    let saved = SavedCodes {
        config: report.config.clone(),
        initial_codes: best.initial.codes(),
        codes: best.model.codes(),
        structure: best.model.structure().clone(),
        initial_structure: (config.kind == ScenarioKind::Flexible)
            .then(|| best.initial.structure().clone()),
    };
    write_json(&directory.join(CODES_FILE), &saved)?;
    artifacts.push(CODES_FILE.to_string());
    emit_figures(
        config,
        &best.initial,
        &best.model,
        &directory,
        &mut artifacts,
    )?;
    report.artifacts = artifacts;
    write_json(&directory.join(RESULTS_FILE), &report)?;

    let wall_seconds = started.elapsed().as_secs_f64();
    write_json(
        &directory.join(TIMING_FILE),
        &Timing {
            wall_seconds,
            restart_count: report.restarts.len(),
        },
    )?;
    Ok(RunOutput {
        report,
        best,
        directory,
        wall_seconds,
    })
}

/// One best-of-restarts run per alphabet size in `range`, each in its own
/// `x<size>` subdirectory, plus a `sweep.csv` table in `out`.
pub fn sweep_alphabet(
    config: &ScenarioConfig,
    range: std::ops::RangeInclusive<usize>,
    execution: Execution,
    out: Option<&Path>,
) -> Result<Vec<SweepRow>> {
    if range.is_empty() || *range.start() == 0 {
        return Err(CliError::Config(format!(
            "alphabet range {}..={} must be nonempty and start at 1 or more",
            range.start(),
            range.end()
        )));
    }
    let root = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| config.output_dir.clone());
    let mut rows = Vec::new();
    for xs in range {
        let mut c = config.clone();
        c.output_states = xs;
        let run = run(&c, execution, Some(&root.join(format!("x{xs}"))))?;
        let m = &run.report.metrics;
        rows.push(SweepRow {
            output_states: xs,
            blind_info: m.blind_info.unwrap_or_else(|| run.best.model.blind_info()),
            code_similarity: m.final_code_similarity,
            focus_posterior: m.focus_posterior.as_ref().map(|f| f.posterior),
        });
    }
    let path = root.join(SWEEP_FILE);
    let mut w = csv_writer(&path)?;
    let focus = rows.iter().any(|r| r.focus_posterior.is_some());
    let mut header = vec!["output_states", "blind_info", "code_similarity"];
    if focus {
        header.push("focus_posterior");
    }
    write_record(&mut w, &path, header.iter().map(|s| s.to_string()))?;
    for r in &rows {
        let mut record = vec![
            r.output_states.to_string(),
            fixed(r.blind_info),
            fixed(r.code_similarity),
        ];
        if focus {
            record.push(r.focus_posterior.map(fixed).unwrap_or_default());
        }
        write_record(&mut w, &path, record)?;
    }
    w.flush().map_err(io_err(&path))?;
    Ok(rows)
}

/// Rebuilds a population from `codes.json`, recomputes every metric and
/// redraws the figures (no trace) into `out`.
pub fn analyze(codes_path: &Path, out: &Path) -> Result<AnalysisReport> {
    let text = fs::read_to_string(codes_path).map_err(io_err(codes_path))?;
    let saved: SavedCodes = serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: codes_path.to_path_buf(),
        source,
    })?;
    let config = &saved.config;
    config.validate()?;
    let template = config.template()?;
    let revalidate = |codes: &[Code]| -> Result<Vec<Code>> {
        codes
            .iter()
            .map(|c| {
                Ok(Code::new(
                    c.sensor_states(),
                    c.output_states(),
                    c.table().to_vec(),
                )?)
            })
            .collect()
    };
    let restore = |s: &PopulationStructure| -> Result<PopulationStructure> {
        Ok(PopulationStructure::new(
            s.agents(),
            s.probabilities().to_vec(),
        )?)
    };
    let model = template
        .with_codes(revalidate(&saved.codes)?)?
        .with_structure(restore(&saved.structure)?)?;
    let initial_structure = match &saved.initial_structure {
        Some(s) => restore(s)?,
        None => template.structure().clone(),
    };
    let initial = template
        .with_codes(revalidate(&saved.initial_codes)?)?
        .with_structure(initial_structure)?;

    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut artifacts = vec![RESULTS_FILE.to_string()];
    emit_figures(config, &initial, &model, out, &mut artifacts)?;
    let report = AnalysisReport {
        config: config.clone(),
        metrics: compute_metrics(config, &initial, &model)?,
        artifacts,
    };
    write_json(&out.join(RESULTS_FILE), &report)?;
    Ok(report)
}

fn emit_figures(
    config: &ScenarioConfig,
    initial: &PopulationModel,
    model: &PopulationModel,
    dir: &Path,
    artifacts: &mut Vec<String>,
) -> Result<()> {
    let mut push = |name: &str| artifacts.push(name.to_string());
    write_distances_and_mds(initial, model, dir)?;
    push("distances.csv");
    push("mds.csv");
    push("mds.svg");
    write_codes_heatmap(config, model, dir)?;
    push("codes_heatmap.svg");
    write_structure_dot(config, model, dir)?;
    push("structure.dot");
    if config.kind == ScenarioKind::Heterogeneous {
        write_concepts(model, dir)?;
        push("concepts.csv");
        push("concepts_heatmap.svg");
    }
    Ok(())
}

/// Six decimal places, as used throughout the CSV outputs.
fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn write_record<I, S>(w: &mut csv::Writer<fs::File>, path: &Path, record: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    w.write_record(record).map_err(|source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(io_err(path))
}

fn write_trace(dir: &Path, trace: &OptimizationTrace, artifacts: &mut Vec<String>) -> Result<()> {
    let path = dir.join("trace.csv");
    let mut w = csv_writer(&path)?;
    write_record(
        &mut w,
        &path,
        ["generation", "evaluations", "best", "mean", "sigma"],
    )?;
    for g in &trace.generations {
        write_record(
            &mut w,
            &path,
            [
                g.generation.to_string(),
                g.evaluations.to_string(),
                fixed(g.best),
                fixed(g.mean),
                format!("{:.6e}", g.sigma),
            ],
        )?;
    }
    w.flush().map_err(io_err(&path))?;
    artifacts.push("trace.csv".into());
    Ok(())
}

fn write_distances_and_mds(
    initial: &PopulationModel,
    model: &PopulationModel,
    dir: &Path,
) -> Result<()> {
    let n = model.agents().len();
    let mut codes = initial.codes();
    codes.extend(model.codes());
    let labels: Vec<String> = (0..n)
        .map(|i| format!("initial_{i}"))
        .chain((0..n).map(|i| format!("final_{i}")))
        .collect();
    let d = distance_matrix(&codes)?;

    let path = dir.join("distances.csv");
    let mut w = csv_writer(&path)?;
    write_record(
        &mut w,
        &path,
        std::iter::once("code".to_string()).chain(labels.iter().cloned()),
    )?;
    for (i, label) in labels.iter().enumerate() {
        write_record(
            &mut w,
            &path,
            std::iter::once(label.clone()).chain((0..labels.len()).map(|j| fixed(d.get(i, j)))),
        )?;
    }
    w.flush().map_err(io_err(&path))?;

    let coords = classical_mds(&d, 2);
    let path = dir.join("mds.csv");
    let mut w = csv_writer(&path)?;
    write_record(&mut w, &path, ["code", "phase", "agent", "x", "y"])?;
    let mut points = Vec::with_capacity(labels.len());
    for (i, label) in labels.iter().enumerate() {
        let x = coords[i].first().copied().unwrap_or(0.0);
        let y = coords[i].get(1).copied().unwrap_or(0.0);
        let initial = i < n;
        write_record(
            &mut w,
            &path,
            [
                label.clone(),
                if initial { "initial" } else { "final" }.to_string(),
                (i % n).to_string(),
                fixed(x),
                fixed(y),
            ],
        )?;
        points.push(ScatterPoint {
            x,
            y,
            initial,
            label: label.clone(),
        });
    }
    w.flush().map_err(io_err(&path))?;
    write_text(
        &dir.join("mds.svg"),
        &svg::mds_plot(&points, "Classical MDS of initial and final codes"),
    )
}

fn write_codes_heatmap(config: &ScenarioConfig, model: &PopulationModel, dir: &Path) -> Result<()> {
    let clusters = group_codes(&model.codes(), config.analysis.cluster_tolerance)?;
    let panels: Vec<Panel> = clusters
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let code = &c.representative;
            let type_note = model.agents()[c.members[0]]
                .agent_type
                .as_ref()
                .filter(|_| {
                    c.members.iter().all(|&m| {
                        model.agents()[m].agent_type == model.agents()[c.members[0]].agent_type
                    })
                })
                .map(|t| format!(", type {}", t.id))
                .unwrap_or_default();
            Panel {
                title: format!("code {} — n = {}{}", k + 1, c.count, type_note),
                rows: code.sensor_states(),
                cols: code.output_states(),
                values: code.table().to_vec(),
                row_labels: (1..=code.sensor_states())
                    .map(|y| format!("y{y}"))
                    .collect(),
                col_labels: (1..=code.output_states())
                    .map(|x| format!("x{x}"))
                    .collect(),
            }
        })
        .collect();
    write_text(
        &dir.join("codes_heatmap.svg"),
        &svg::heatmaps(&panels, "Codes p(x|y) by cluster (black = 1)", 22.0, 5),
    )
}

fn write_structure_dot(config: &ScenarioConfig, model: &PopulationModel, dir: &Path) -> Result<()> {
    let graph = structure_graph(model.structure(), config.analysis.structure_threshold);
    let clusters = group_codes(&model.codes(), config.analysis.cluster_tolerance)?;
    let mut cluster_of = vec![0usize; model.agents().len()];
    for (k, c) in clusters.iter().enumerate() {
        for &m in &c.members {
            cluster_of[m] = k + 1;
        }
    }
    let max_weight = graph.edges.iter().map(|e| e.weight).fold(0.0, f64::max);
    let mut dot = String::from("graph structure {\n  node [shape=circle];\n");
    if let (ScenarioKind::Grid, Some(g)) = (config.kind, &config.grid) {
        for a in 0..model.agents().len() {
            dot.push_str(&format!(
                "  {a} [label=\"{a}\\nc{}\", pos=\"{},{}!\"];\n",
                cluster_of[a],
                a % g.width,
                g.height - 1 - a / g.width
            ));
        }
    } else {
        for (a, c) in cluster_of.iter().enumerate() {
            dot.push_str(&format!("  {a} [label=\"{a}\\nc{c}\"];\n"));
        }
    }
    for e in &graph.edges {
        let width = if max_weight > 0.0 {
            0.5 + 2.5 * e.weight / max_weight
        } else {
            1.0
        };
        dot.push_str(&format!(
            "  {} -- {} [weight=\"{:.6}\", penwidth=\"{:.3}\"];\n",
            e.a, e.b, e.weight, width
        ));
    }
    dot.push_str("}\n");
    write_text(&dir.join("structure.dot"), &dot)
}

fn write_concepts(model: &PopulationModel, dir: &Path) -> Result<()> {
    let table = concept_table(model);
    let states = table.environment_states;
    let path = dir.join("concepts.csv");
    let mut w = csv_writer(&path)?;
    write_record(
        &mut w,
        &path,
        ["output", "partner_output", "marginal"]
            .into_iter()
            .map(String::from)
            .chain((1..=states).map(|s| format!("p_mu{s}"))),
    )?;
    for r in &table.rows {
        write_record(
            &mut w,
            &path,
            [
                (r.output + 1).to_string(),
                (r.partner_output + 1).to_string(),
                fixed(r.marginal),
            ]
            .into_iter()
            .chain(r.posterior.iter().map(|&p| fixed(p))),
        )?;
    }
    w.flush().map_err(io_err(&path))?;

    let panel = Panel {
        title: "p(μ | x, x′) for every occurring output pair".into(),
        rows: table.rows.len(),
        cols: states,
        values: table
            .rows
            .iter()
            .flat_map(|r| r.posterior.iter().copied())
            .collect(),
        row_labels: table
            .rows
            .iter()
            .map(|r| format!("x{} x′{}", r.output + 1, r.partner_output + 1))
            .collect(),
        col_labels: (1..=states).map(|s| format!("μ{s}")).collect(),
    };
    write_text(
        &dir.join("concepts_heatmap.svg"),
        &svg::heatmaps(&[panel], "Concepts (black = 1)", 20.0, 1),
    )
}
