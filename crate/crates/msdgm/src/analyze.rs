//! `analyze`: pattern file in, graphs and statistics on disk.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use msdgm_core::graph::{validate_threshold, DEFAULT_THRESHOLDS};
use msdgm_core::pipeline::{analyze, AnalysisOptions, AnalysisResult};
use msdgm_core::{Kernel, MarkedPointPattern};
use serde::Serialize;

use crate::formats::{graph_to_json, write_statistics};
use crate::input::{load_pattern_file, Schema};
use crate::SCHEMA_VERSION;

pub const STATISTICS_FILE: &str = "edge_statistics.csv";
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub input: PathBuf,
    pub schema: Schema,
    pub options: AnalysisOptions,
    pub thresholds: Vec<f64>,
    pub out_dir: PathBuf,
    /// Worker cap for the frequency loop; `None` uses all cores.
    pub threads: Option<usize>,
}

impl AnalysisConfig {
    pub fn new(input: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            schema: Schema::default(),
            options: AnalysisOptions::default(),
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            out_dir: out_dir.into(),
            threads: None,
        }
    }
}

pub fn graph_file_stem(alpha: f64) -> String {
    format!("msdgm_alpha_{alpha}")
}

/// Runs `f` on a rayon pool capped at `threads` workers.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => bail!("--threads must be at least 1"),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(f))
        }
    }
}

/// Deterministic artifacts (graphs and statistics) as `(file name, contents)`.
pub fn render_artifacts(result: &AnalysisResult, thresholds: &[f64]) -> anyhow::Result<Vec<(String, String)>> {
    let mut files = Vec::new();
    for &alpha in thresholds {
        let graph = result.graph(alpha)?;
        let stem = graph_file_stem(alpha);
        files.push((format!("{stem}.dot"), graph.to_dot()));
        files.push((format!("{stem}.json"), graph_to_json(&graph)));
    }
    let mut buf = Vec::new();
    write_statistics(&result.statistics, &result.type_names, &mut buf)?;
    files.push((STATISTICS_FILE.to_string(), String::from_utf8(buf)?));
    Ok(files)
}

#[derive(Debug, Serialize)]
struct TypeReport<'a> {
    name: &'a str,
    count: usize,
    mark_mean: f64,
}

#[derive(Debug, Serialize)]
struct ThresholdReport {
    alpha: f64,
    edges: usize,
    isolated: usize,
    /// component size -> number of components
    components: std::collections::BTreeMap<usize, usize>,
}

#[derive(Debug, Serialize)]
struct RunReport<'a> {
    version: u32,
    input: String,
    points: usize,
    types: Vec<TypeReport<'a>>,
    dropped_types: &'a [String],
    p_max: usize,
    q_max: usize,
    kernel: &'static str,
    bandwidth: usize,
    ridge: f64,
    usable_frequencies: usize,
    flagged_frequencies: usize,
    flagged_singular: usize,
    flagged_non_positive: usize,
    ridged_frequencies: usize,
    warnings: Vec<String>,
    thresholds: Vec<ThresholdReport>,
    elapsed_ms: u128,
}

fn render_report(
    config: &AnalysisConfig,
    pattern: &MarkedPointPattern,
    result: &AnalysisResult,
    elapsed_ms: u128,
) -> anyhow::Result<String> {
    let types = result
        .type_names
        .iter()
        .zip(&result.type_counts)
        .map(|(name, &count)| {
            let mark_mean = pattern
                .types()
                .iter()
                .find(|t| &t.name == name)
                .map_or(f64::NAN, |t| t.mark_mean);
            TypeReport { name, count, mark_mean }
        })
        .collect();
    let thresholds = config
        .thresholds
        .iter()
        .map(|&alpha| {
            let g = result.graph(alpha)?;
            let components = g.component_census();
            Ok(ThresholdReport {
                alpha,
                edges: g.num_edges(),
                isolated: components.get(&1).copied().unwrap_or(0),
                components,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let report = RunReport {
        version: SCHEMA_VERSION,
        input: config.input.display().to_string(),
        points: result.type_counts.iter().sum(),
        types,
        dropped_types: &result.dropped,
        p_max: config.options.grid.p_max(),
        q_max: config.options.grid.q_max(),
        kernel: match result.smoother.kernel {
            Kernel::Uniform => "uniform",
            Kernel::Triangular => "triangular",
        },
        bandwidth: result.smoother.half_width,
        ridge: result.smoother.ridge,
        usable_frequencies: result.usable_frequencies,
        flagged_frequencies: result.flagged(),
        flagged_singular: result.flagged_singular,
        flagged_non_positive: result.flagged_non_positive,
        ridged_frequencies: result.ridged,
        warnings: result.warnings.iter().map(ToString::to_string).collect(),
        thresholds,
        elapsed_ms,
    };
    let mut s = serde_json::to_string_pretty(&report)?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug)]
pub struct AnalysisOutputs {
    pub result: AnalysisResult,
    pub files: Vec<PathBuf>,
}

fn write_all(dir: &Path, files: &[(String, String)]) -> anyhow::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (name, contents) in files {
        let path = dir.join(name);
        if let Err(e) = std::fs::write(&path, contents) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(e).with_context(|| format!("writing {}", path.display()));
        }
        written.push(path);
    }
    Ok(written)
}

/// Loads, analyzes and writes one DOT and one JSON graph per threshold, the
/// statistics matrix and a run report. Nothing is written unless the whole
/// analysis succeeds.
pub fn run_analyze(config: &AnalysisConfig) -> anyhow::Result<AnalysisOutputs> {
    let start = Instant::now();
    if config.thresholds.is_empty() {
        bail!("at least one threshold is required");
    }
    for &alpha in &config.thresholds {
        validate_threshold(alpha)?;
    }
    let pattern = load_pattern_file(&config.input, &config.schema)
        .with_context(|| format!("loading {}", config.input.display()))?;
    let result = with_threads(config.threads, || analyze(&pattern, &config.options))??;
    for w in &result.warnings {
        log::warn!("{w}");
    }
    let mut files = render_artifacts(&result, &config.thresholds)?;
    let report = render_report(config, &pattern, &result, start.elapsed().as_millis())?;
    files.push((REPORT_FILE.to_string(), report));

    std::fs::create_dir_all(&config.out_dir)
        .with_context(|| format!("creating {}", config.out_dir.display()))?;
    let files = write_all(&config.out_dir, &files)?;
    Ok(AnalysisOutputs { result, files })
}
