//! Artifact emission: per-trial CSV logs, JSON summaries and SVG plots.
//!
//! Per-trial CSV columns, in order: `step, shepherd_x, shepherd_y,
//! x0, y0, ..., x{N-1}, y{N-1}, target_neighbors, max_component, pinning,
//! fallback`. One row per simulation step (the state after the step).
//! Floats are written with 17 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ExperimentConfig, Target, TargetLabel};
use super::svg::{self, Series, PALETTE};
use super::trials::{Aggregates, RunSummary, RNG_NAME};
use crate::controller::{Method, StepRecord};
use crate::{Error, Result, Vec2};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_header(sheep: usize) -> Vec<String> {
    let mut h = vec!["step".to_string(), "shepherd_x".into(), "shepherd_y".into()];
    for i in 0..sheep {
        h.push(format!("x{i}"));
        h.push(format!("y{i}"));
    }
    h.extend(["target_neighbors", "max_component", "pinning", "fallback"].map(String::from));
    h
}

fn csv_row(rec: &StepRecord) -> Vec<String> {
    let mut row = vec![rec.k.to_string(), fmt_f64(rec.shepherd.x), fmt_f64(rec.shepherd.y)];
    for p in &rec.positions {
        row.push(fmt_f64(p.x));
        row.push(fmt_f64(p.y));
    }
    row.push(rec.target_neighbors.to_string());
    row.push(rec.max_component.to_string());
    row.push(rec.pinning.map(|p| p.to_string()).unwrap_or_default());
    row.push(u8::from(rec.fallback).to_string());
    row
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub fn write_trace_csv(path: &Path, sheep: usize, trace: &[StepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(csv_header(sheep)).map_err(|e| csv_error(path, e))?;
    for rec in trace {
        w.write_record(csv_row(rec)).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Parses a per-trial CSV written by [`write_trace_csv`].
pub fn read_trace_csv(path: &Path) -> Result<Vec<StepRecord>> {
    let bad = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() < 7 || (header.len() - 7) % 2 != 0 {
        return Err(bad(format!("unexpected column count {}", header.len())));
    }
    let sheep = (header.len() - 7) / 2;
    if header.iter().ne(csv_header(sheep).iter().map(String::as_str)) {
        return Err(bad("unexpected header".into()));
    }
    let mut out = Vec::new();
    for (line, row) in r.records().enumerate() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let field = |k: usize| row.get(k).unwrap_or("");
        let float = |k: usize| {
            field(k)
                .parse::<f64>()
                .map_err(|e| bad(format!("row {}: column {k}: {e}", line + 1)))
        };
        let int = |k: usize| {
            field(k)
                .parse::<u64>()
                .map_err(|e| bad(format!("row {}: column {k}: {e}", line + 1)))
        };
        let positions = (0..sheep)
            .map(|i| Ok(Vec2::new(float(3 + 2 * i)?, float(4 + 2 * i)?)))
            .collect::<Result<Vec<_>>>()?;
        let base = 3 + 2 * sheep;
        out.push(StepRecord {
            k: int(0)?,
            shepherd: Vec2::new(float(1)?, float(2)?),
            positions,
            target_neighbors: int(base)? as usize,
            max_component: int(base + 1)? as usize,
            pinning: if field(base + 2).is_empty() {
                None
            } else {
                Some(int(base + 2)? as usize)
            },
            fallback: int(base + 3)? != 0,
        });
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct TrialDoc {
    pub index: usize,
    pub seed: u64,
    pub success: Option<bool>,
    pub steps: Option<u64>,
    pub mean_connectivity: Option<f64>,
    pub final_connectivity: Option<f64>,
    pub fallback_events: Option<u64>,
    pub max_shepherd_step: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SummaryDoc<'a> {
    pub config: &'a ExperimentConfig,
    pub target_id: usize,
    pub sheep: usize,
    pub rng: &'static str,
    pub seeds: Vec<u64>,
    pub aggregates: &'a Aggregates,
    pub trials: Vec<TrialDoc>,
}

pub fn summary_doc(summary: &RunSummary) -> SummaryDoc<'_> {
    SummaryDoc {
        config: &summary.config,
        target_id: summary.target_id,
        sheep: summary.sheep,
        rng: RNG_NAME,
        seeds: summary.seeds(),
        aggregates: &summary.aggregates,
        trials: summary
            .trials
            .iter()
            .map(|t| {
                let r = t.result.as_ref();
                TrialDoc {
                    index: t.index,
                    seed: t.seed,
                    success: r.map(|r| r.success),
                    steps: r.map(|r| r.steps),
                    mean_connectivity: r.map(|r| r.mean_connectivity()),
                    final_connectivity: r.map(|r| r.final_connectivity()),
                    fallback_events: r.map(|r| r.fallback_events),
                    max_shepherd_step: r.map(|r| r.max_shepherd_step),
                    error: t.error.clone(),
                }
            })
            .collect(),
    }
}

pub fn summary_json(summary: &RunSummary) -> String {
    serde_json::to_string_pretty(&summary_doc(summary)).expect("summary serializes") + "\n"
}

/// Mean largest-component fraction per step across trials; finished trials
/// hold their last value.
pub fn mean_curve(summary: &RunSummary) -> Vec<f64> {
    let series: Vec<&Vec<f64>> = summary.results().map(|r| &r.connectivity_series).collect();
    let len = series.iter().map(|s| s.len()).max().unwrap_or(0);
    (0..len)
        .map(|k| {
            let sum: f64 = series
                .iter()
                .map(|s| s.get(k).or(s.last()).copied().unwrap_or(1.0))
                .sum();
            sum / series.len() as f64
        })
        .collect()
}

pub fn trial_csv_name(index: usize) -> String {
    format!("trial_{index:03}.csv")
}

fn write_file(path: PathBuf, contents: &str, manifest: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    manifest.push(path);
    Ok(())
}

fn frames(summary: &RunSummary, trace: &[StepRecord]) -> Vec<(Vec2, Vec<Vec2>)> {
    std::iter::once((summary.initial.shepherd, summary.initial.positions.clone()))
        .chain(trace.iter().map(|r| (r.shepherd, r.positions.clone())))
        .collect()
}

fn run_title(summary: &RunSummary) -> String {
    format!(
        "target {} ({}), {}",
        summary.config.target,
        summary.target_id,
        summary.config.method.as_str()
    )
}

/// Writes every artifact of one batch into `dir` and returns the file list.
pub fn write_outputs(summary: &RunSummary, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = Vec::new();

    for t in &summary.trials {
        if let Some(r) = &t.result {
            let path = dir.join(trial_csv_name(t.index));
            write_trace_csv(&path, summary.sheep, &r.trace)?;
            manifest.push(path);
        }
    }

    write_file(dir.join("summary.json"), &summary_json(summary), &mut manifest)?;

    let curve = mean_curve(summary);
    let series = Series {
        name: summary.config.method.as_str().into(),
        color: method_color(summary.config.method).into(),
        dashed: false,
        points: curve.iter().enumerate().map(|(k, &v)| ((k + 1) as f64, v)).collect(),
    };
    let chart = svg::line_chart(
        &format!("Connectivity rate, {}", run_title(summary)),
        "step",
        "largest component / (N-1)",
        &[series],
        Some((0.0, 1.0)),
    );
    write_file(dir.join("connectivity.svg"), &chart, &mut manifest)?;

    for &i in &summary.config.snapshot_trials {
        let Some(r) = summary.trials.get(i).and_then(|t| t.result.as_ref()) else {
            continue;
        };
        let svg = svg::trajectory(
            &format!("{}, seed {}", run_title(summary), r.seed),
            &frames(summary, &r.trace),
            Some(summary.target_id),
        );
        write_file(dir.join(format!("trajectory_{i:03}.svg")), &svg, &mut manifest)?;
    }
    Ok(manifest)
}

/// Re-renders a logged trial as a trajectory SVG.
pub fn replay(csv: &Path, svg_path: &Path, target: Option<usize>) -> Result<()> {
    let trace = read_trace_csv(csv)?;
    let frames: Vec<_> = trace.iter().map(|r| (r.shepherd, r.positions.clone())).collect();
    let title = format!(
        "replay of {}",
        csv.file_name().and_then(|s| s.to_str()).unwrap_or("trial")
    );
    let svg = svg::trajectory(&title, &frames, target);
    fs::write(svg_path, svg).map_err(|e| Error::io(svg_path, e))
}

fn method_color(m: Method) -> &'static str {
    match m {
        Method::Proposed => PALETTE[0],
        Method::Bipartite => PALETTE[1],
    }
}

#[derive(Debug, Serialize)]
pub struct ComparisonEntry {
    pub target: String,
    pub target_id: usize,
    pub method: Method,
    pub aggregates: Aggregates,
}

/// Cross-target, cross-method comparison: JSON table, per-target
/// connectivity curves and a grouped bar chart of mean connectivity.
pub fn write_comparison(summaries: &[RunSummary], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = Vec::new();

    let entries: Vec<ComparisonEntry> = summaries
        .iter()
        .map(|s| ComparisonEntry {
            target: s.config.target.to_string(),
            target_id: s.target_id,
            method: s.config.method,
            aggregates: s.aggregates.clone(),
        })
        .collect();
    let json = serde_json::to_string_pretty(&entries).expect("comparison serializes") + "\n";
    write_file(dir.join("comparison.json"), &json, &mut manifest)?;

    let mut targets: Vec<Target> = Vec::new();
    for s in summaries {
        if !targets.contains(&s.config.target) {
            targets.push(s.config.target);
        }
    }
    let curves: Vec<Series> = summaries
        .iter()
        .map(|s| {
            let k = targets.iter().position(|t| *t == s.config.target).unwrap_or(0);
            Series {
                name: format!("{} {}", s.config.target, s.config.method.as_str()),
                color: PALETTE[k % PALETTE.len()].into(),
                dashed: s.config.method == Method::Bipartite,
                points: mean_curve(s)
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| ((k + 1) as f64, v))
                    .collect(),
            }
        })
        .collect();
    let chart = svg::line_chart(
        "Mean connectivity rate per target (solid: proposed, dashed: bipartite)",
        "step",
        "largest component / (N-1)",
        &curves,
        Some((0.0, 1.0)),
    );
    write_file(dir.join("comparison_curves.svg"), &chart, &mut manifest)?;

    let methods = [Method::Proposed, Method::Bipartite];
    let values: Vec<Vec<f64>> = targets
        .iter()
        .map(|t| {
            methods
                .iter()
                .map(|m| {
                    summaries
                        .iter()
                        .find(|s| s.config.target == *t && s.config.method == *m)
                        .map_or(f64::NAN, |s| s.aggregates.mean_time_avg_connectivity)
                })
                .collect()
        })
        .collect();
    let bars = svg::bar_chart(
        "Average connectivity rate",
        "mean largest component / (N-1)",
        &targets.iter().map(Target::to_string).collect::<Vec<_>>(),
        &methods.map(|m| (m.as_str().to_string(), method_color(m).to_string())),
        &values,
    );
    write_file(dir.join("comparison_bars.svg"), &bars, &mut manifest)?;
    Ok(manifest)
}

/// Configs for every labelled target under both methods.
pub fn comparison_configs(base: &ExperimentConfig) -> Vec<ExperimentConfig> {
    TargetLabel::ALL
        .iter()
        .flat_map(|&label| {
            [Method::Proposed, Method::Bipartite].map(|method| ExperimentConfig {
                target: Target::Label(label),
                method,
                ..base.clone()
            })
        })
        .collect()
}
