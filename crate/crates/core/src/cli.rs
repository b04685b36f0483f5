//! Command-line front end: `generate`, `bound`, `feasible`, `compare`, `plot`.
//!
//! Exit codes: 0 success, 1 I/O or malformed input, 2 unsupported
//! configuration or usage error, 3 no solution found. Setting
//! `MTBOUND_THREADS` caps the worker pool.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{SamplingParams, Variant};
use crate::feasible::{self, FeasibleTour};
use crate::geometry::{Piece, Point2};
use crate::graph::{self, ClusteredGraph, DiscretizationLevel, GraphError};
use crate::gtsp::{self, Effort, GtspError, GtspSolution};
use crate::model::{self, generate, GenerateError, GeneratorConfig, Instance, InstanceKind, ModelError};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const SOLUTION_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    NoSolution(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) | CliError::Unsupported(_) => 2,
            CliError::NoSolution(_) => 3,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::VariantUnsupported { .. } | GraphError::BadDelta(_) => CliError::Unsupported(e.to_string()),
            GraphError::Io { .. } | GraphError::Parse(_) => CliError::Io(e.to_string()),
        }
    }
}

impl From<GtspError> for CliError {
    fn from(e: GtspError) -> Self {
        match e {
            GtspError::TooManyClusters(_) | GtspError::TooLarge => CliError::Unsupported(e.to_string()),
            GtspError::Infeasible | GtspError::NotFound => CliError::NoSolution(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "mtbound", version, about = "Lower and upper bounds for the moving-target TSP with time windows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate random instances.
    Generate(GenerateArgs),
    /// Compute a lower bound.
    Bound(BoundArgs),
    /// Compute a feasible tour (upper bound).
    Feasible(FeasibleArgs),
    /// Run variants and levels over a directory of instances.
    Compare(CompareArgs),
    /// Render an instance and a solution as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Simple,
    Complex,
    Generic,
}

impl From<KindArg> for InstanceKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Simple => InstanceKind::Simple,
            KindArg::Complex => InstanceKind::Complex,
            KindArg::Generic => InstanceKind::Generic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Lite,
    Geometric,
    Sampling,
    Linear,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Lite => Variant::Lite,
            VariantArg::Geometric => Variant::Geometric,
            VariantArg::Sampling => Variant::Sampling,
            VariantArg::Linear => Variant::Linear,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "simple")]
    pub kind: KindArg,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Number of instances; seeds run from `seed` upwards.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Discretization {
    /// Discretization level 1–4 (Δ = 5, 2.5, 1.25, 0.625 s).
    #[arg(long, conflicts_with = "delta")]
    pub level: Option<u8>,
    /// Custom interval width in seconds.
    #[arg(long)]
    pub delta: Option<f64>,
}

impl Discretization {
    fn resolve(&self) -> Result<(String, f64), CliError> {
        match (self.level, self.delta) {
            (Some(l), _) => DiscretizationLevel::from_level(l)
                .map(|d| (l.to_string(), d.delta()))
                .ok_or_else(|| CliError::Usage(format!("level must be 1-4, got {l}"))),
            (None, Some(d)) if d > 0.0 => Ok(("custom".into(), d)),
            (None, Some(d)) => Err(CliError::Usage(format!("delta must be positive, got {d}"))),
            (None, None) => Ok(("4".into(), DiscretizationLevel::Level(4).delta())),
        }
    }
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "linear")]
    pub variant: VariantArg,
    #[command(flatten)]
    pub discretization: Discretization,
    /// Sub-intervals per departure interval for the sampling variant.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Bisection tolerance for the sampling variant.
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Solution JSON output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV report output (stdout when absent).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Graph dump output.
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FeasibleArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = feasible::DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Add randomized restarts to the tour heuristic.
    #[arg(long)]
    pub thorough: bool,
    /// Tour JSON output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Directory of instance JSON files.
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "lite,geometric,sampling,linear")]
    pub variants: Vec<VariantArg>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    pub levels: Vec<u8>,
    #[arg(long, default_value_t = feasible::DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Per-run CSV output (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary CSV output (stderr when absent).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Solution written by `bound --out` or `feasible --out`.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (including the program name) and runs the command; returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("MTBOUND_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(a) => cmd_generate(&a).map(|_| ()),
        Command::Bound(a) => cmd_bound(&a).map(|_| ()),
        Command::Feasible(a) => cmd_feasible(&a).map(|_| ()),
        Command::Compare(a) => cmd_compare(&a).map(|_| ()),
        Command::Plot(a) => cmd_plot(&a),
    }
}

/// Writes `count` instances and returns their paths.
pub fn cmd_generate(a: &GenerateArgs) -> Result<Vec<PathBuf>, CliError> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    if a.count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    fs::create_dir_all(&a.out).map_err(|e| io_err(&a.out, e))?;
    let kind = InstanceKind::from(a.kind);
    let mut written = Vec::with_capacity(a.count);
    for seed in a.seed..a.seed + a.count as u64 {
        let inst = generate(&GeneratorConfig::standard(kind, a.n, seed)).map_err(|e| match e {
            GenerateError::InvalidConfig(m) => CliError::Usage(m),
            GenerateError::GenerationFailed { .. } => CliError::NoSolution(e.to_string()),
        })?;
        let path = a.out.join(format!("{kind}_n{}_s{seed}.json", a.n));
        model::save(&inst, &path)?;
        written.push(path);
    }
    eprintln!("wrote {} instance(s) to {}", written.len(), a.out.display());
    Ok(written)
}

/// One row of the CSV report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub instance: String,
    pub n_targets: usize,
    pub kind: String,
    pub variant: String,
    pub level: String,
    pub delta: Option<f64>,
    pub lower_bound: Option<f64>,
    pub feasible_cost: Option<f64>,
    /// `(feasible − lower) / feasible × 100`, two decimals.
    pub percent_deviation: Option<String>,
    pub feasible_from_lb: Option<f64>,
    pub graph_gen_seconds: Option<f64>,
    pub total_seconds: f64,
    pub lb_exact: Option<bool>,
    pub outlier: bool,
    pub note: String,
}

pub fn percent_deviation(feasible: f64, lower: f64) -> Option<f64> {
    (feasible.is_finite() && lower.is_finite() && feasible > 0.0).then(|| (feasible - lower) / feasible * 100.0)
}

fn instance_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Node visited by a lower-bound tour: a trajectory interval of a target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Visit {
    pub node: usize,
    pub target: u32,
    pub t_lo: f64,
    pub t_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundDoc {
    pub version: u32,
    pub variant: Variant,
    pub delta: f64,
    pub cost: f64,
    pub exact: bool,
    pub sequence: Vec<usize>,
    pub edge_costs: Vec<f64>,
    pub visits: Vec<Visit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourDoc {
    pub version: u32,
    #[serde(flatten)]
    pub tour: FeasibleTour,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solution", rename_all = "snake_case")]
pub enum SolutionDoc {
    LowerBound(LowerBoundDoc),
    Feasible(TourDoc),
}

impl SolutionDoc {
    pub fn lower_bound(graph: &ClusteredGraph, variant: Variant, sol: &GtspSolution) -> Self {
        let visits = sol
            .node_sequence
            .iter()
            .filter_map(|&u| {
                let n = graph.node(u);
                n.target.map(|target| Visit { node: u, target, t_lo: n.t_lo, t_hi: n.t_hi })
            })
            .collect();
        SolutionDoc::LowerBound(LowerBoundDoc {
            version: SOLUTION_FORMAT_VERSION,
            variant,
            delta: graph.delta().unwrap_or(0.0),
            cost: sol.cost,
            exact: sol.exact,
            sequence: sol.node_sequence.clone(),
            edge_costs: sol.edge_costs.clone(),
            visits,
        })
    }

    pub fn feasible(tour: &FeasibleTour) -> Self {
        SolutionDoc::Feasible(TourDoc { version: SOLUTION_FORMAT_VERSION, tour: tour.clone() })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, model::ParseError> {
        let doc: SolutionDoc = serde_json::from_str(text).map_err(|e| model::ParseError::from_json(&e))?;
        let version = match &doc {
            SolutionDoc::LowerBound(d) => d.version,
            SolutionDoc::Feasible(d) => d.version,
        };
        if version != SOLUTION_FORMAT_VERSION {
            return Err(model::ParseError::plain(format!("unsupported solution version {version}")));
        }
        Ok(doc)
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn write_csv<T: Serialize>(rows: &[T], path: Option<&Path>, to_stderr: bool) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    match path {
        Some(p) => write_text(p, &String::from_utf8_lossy(&bytes)),
        None if to_stderr => std::io::stderr().write_all(&bytes).map_err(|e| CliError::Io(e.to_string())),
        None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}

struct BoundRun {
    graph: ClusteredGraph,
    solution: Result<GtspSolution, GtspError>,
    total_seconds: f64,
}

fn run_bound(inst: &Instance, variant: Variant, delta: f64, params: SamplingParams) -> Result<BoundRun, GraphError> {
    let started = Instant::now();
    let graph = graph::build(inst, delta, variant, params)?;
    let solution = gtsp::solve_exact(&graph);
    Ok(BoundRun { graph, solution, total_seconds: started.elapsed().as_secs_f64() })
}

fn sampling_params(k: usize, eps: f64) -> Result<SamplingParams, CliError> {
    if k == 0 || !(eps > 0.0) {
        return Err(CliError::Usage("--k must be at least 1 and --eps positive".into()));
    }
    Ok(SamplingParams { k, eps })
}

pub fn cmd_bound(a: &BoundArgs) -> Result<RunReport, CliError> {
    let inst = model::load(&a.instance)?;
    let (level, delta) = a.discretization.resolve()?;
    let params = sampling_params(a.k, a.eps)?;
    let variant = Variant::from(a.variant);
    let run = run_bound(&inst, variant, delta, params)?;
    if let Some(p) = &a.graph {
        write_text(p, &run.graph.to_json())?;
    }
    let sol = run.solution?;
    if let Some(p) = &a.out {
        write_text(p, &SolutionDoc::lower_bound(&run.graph, variant, &sol).to_json())?;
    }
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        instance: instance_id(&a.instance),
        n_targets: inst.targets.len(),
        kind: inst.kind.to_string(),
        variant: variant.to_string(),
        level,
        delta: Some(delta),
        lower_bound: Some(sol.cost),
        feasible_cost: None,
        percent_deviation: None,
        feasible_from_lb: None,
        graph_gen_seconds: Some(run.graph.build_seconds()),
        total_seconds: run.total_seconds,
        lb_exact: Some(sol.exact),
        outlier: false,
        note: String::new(),
    };
    write_csv(std::slice::from_ref(&report), a.report.as_deref(), false)?;
    eprintln!("lower bound ({variant}, delta {delta}): {:.6}", sol.cost);
    Ok(report)
}

pub fn cmd_feasible(a: &FeasibleArgs) -> Result<RunReport, CliError> {
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let inst = model::load(&a.instance)?;
    let started = Instant::now();
    let effort = if a.thorough { Effort::Thorough } else { Effort::Fast };
    let tour = feasible::find_feasible(&inst, a.samples, effort).map_err(|e| CliError::NoSolution(e.to_string()))?;
    let total_seconds = started.elapsed().as_secs_f64();
    if let Some(p) = &a.out {
        write_text(p, &SolutionDoc::feasible(&tour).to_json())?;
    }
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        instance: instance_id(&a.instance),
        n_targets: inst.targets.len(),
        kind: inst.kind.to_string(),
        variant: "feasible".into(),
        level: String::new(),
        delta: None,
        lower_bound: None,
        feasible_cost: Some(tour.completion_time),
        percent_deviation: None,
        feasible_from_lb: None,
        graph_gen_seconds: None,
        total_seconds,
        lb_exact: None,
        outlier: false,
        note: format!("samples={}", a.samples),
    };
    write_csv(std::slice::from_ref(&report), a.report.as_deref(), false)?;
    eprintln!("feasible tour: {:.6}", tour.completion_time);
    Ok(report)
}

/// Average over the rows of one (variant, n, level) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub schema_version: u32,
    pub variant: String,
    pub n_targets: usize,
    pub level: String,
    pub instances: usize,
    pub mean_percent_deviation: Option<String>,
    pub mean_graph_gen_seconds: Option<f64>,
    pub mean_total_seconds: f64,
    pub feasible_from_lb_successes: usize,
    pub outliers: usize,
}

fn compare_instance(
    path: &Path,
    variants: &[Variant],
    levels: &[u8],
    samples: usize,
    params: SamplingParams,
) -> Vec<RunReport> {
    let id = instance_id(path);
    let flagged = |note: String| RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        instance: id.clone(),
        n_targets: 0,
        kind: String::new(),
        variant: String::new(),
        level: String::new(),
        delta: None,
        lower_bound: None,
        feasible_cost: None,
        percent_deviation: None,
        feasible_from_lb: None,
        graph_gen_seconds: None,
        total_seconds: 0.0,
        lb_exact: None,
        outlier: true,
        note,
    };
    let inst = match model::load(path) {
        Ok(i) => i,
        Err(e) => return vec![flagged(e.to_string())],
    };
    let upper = feasible::find_feasible(&inst, samples, Effort::Fast).ok().map(|t| t.completion_time);
    let mut rows = Vec::new();
    for &variant in variants {
        for &level in levels {
            let delta = DiscretizationLevel::Level(level).delta();
            let mut row = flagged(String::new());
            row.n_targets = inst.targets.len();
            row.kind = inst.kind.to_string();
            row.variant = variant.to_string();
            row.level = level.to_string();
            row.delta = Some(delta);
            row.feasible_cost = upper;
            match run_bound(&inst, variant, delta, params) {
                Err(e) => row.note = e.to_string(),
                Ok(run) => {
                    row.graph_gen_seconds = Some(run.graph.build_seconds());
                    row.total_seconds = run.total_seconds;
                    match run.solution {
                        Err(e) => row.note = e.to_string(),
                        Ok(sol) => {
                            row.outlier = false;
                            row.lower_bound = Some(sol.cost);
                            row.lb_exact = Some(sol.exact);
                            row.percent_deviation =
                                upper.and_then(|u| percent_deviation(u, sol.cost)).map(|d| format!("{d:.2}"));
                            row.feasible_from_lb = feasible::feasible_from_lower_bound(&inst, &run.graph, &sol)
                                .ok()
                                .map(|t| t.completion_time);
                            if upper.is_none() {
                                row.note = "no feasible tour found".into();
                            }
                        }
                    }
                }
            }
            rows.push(row);
        }
    }
    rows
}

pub fn summarize(rows: &[RunReport]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(String, usize, String), Vec<&RunReport>> = BTreeMap::new();
    for r in rows.iter().filter(|r| !r.variant.is_empty()) {
        groups.entry((r.variant.clone(), r.n_targets, r.level.clone())).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((variant, n_targets, level), group)| {
            let devs: Vec<f64> = group
                .iter()
                .filter_map(|r| r.percent_deviation.as_deref().and_then(|d| d.parse().ok()))
                .collect();
            let gens: Vec<f64> = group.iter().filter_map(|r| r.graph_gen_seconds).collect();
            let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
            SummaryRow {
                schema_version: REPORT_SCHEMA_VERSION,
                variant,
                n_targets,
                level,
                instances: group.len(),
                mean_percent_deviation: mean(&devs).map(|d| format!("{d:.2}")),
                mean_graph_gen_seconds: mean(&gens),
                mean_total_seconds: group.iter().map(|r| r.total_seconds).sum::<f64>() / group.len() as f64,
                feasible_from_lb_successes: group.iter().filter(|r| r.feasible_from_lb.is_some()).count(),
                outliers: group.iter().filter(|r| r.outlier).count(),
            }
        })
        .collect()
}

pub fn cmd_compare(a: &CompareArgs) -> Result<(Vec<RunReport>, Vec<SummaryRow>), CliError> {
    let params = sampling_params(a.k, a.eps)?;
    if a.samples == 0 || a.variants.is_empty() || a.levels.is_empty() {
        return Err(CliError::Usage("need at least one variant, one level and one sample".into()));
    }
    if let Some(l) = a.levels.iter().find(|l| !(1..=4).contains(*l)) {
        return Err(CliError::Usage(format!("level must be 1-4, got {l}")));
    }
    let entries = fs::read_dir(&a.dir).map_err(|e| io_err(&a.dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Usage(format!("no instance files in {}", a.dir.display())));
    }
    let mut variants: Vec<Variant> = a.variants.iter().map(|&v| Variant::from(v)).collect();
    variants.dedup();
    let rows: Vec<RunReport> = paths
        .par_iter()
        .map(|p| compare_instance(p, &variants, &a.levels, a.samples, params))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let summary = summarize(&rows);
    write_csv(&rows, a.out.as_deref(), false)?;
    write_csv(&summary, a.summary.as_deref(), true)?;
    Ok((rows, summary))
}

pub fn cmd_plot(a: &PlotArgs) -> Result<(), CliError> {
    let inst = model::load(&a.instance)?;
    let solution = match &a.solution {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            Some(SolutionDoc::from_json(&text).map_err(|e| io_err(p, e))?)
        }
        None => None,
    };
    write_text(&a.out, &render_svg(&inst, solution.as_ref()))
}

const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];
const SVG_SIZE: f64 = 800.0;
const SVG_MARGIN: f64 = 30.0;

/// Outline points of a piece chain: line ends, 24 steps per arc.
fn locus_points(pieces: &[Piece]) -> Vec<Point2> {
    let mut out = Vec::new();
    for p in pieces {
        match p {
            Piece::Line(l) => {
                out.push(l.start);
                out.push(l.end);
            }
            Piece::Arc(a) => {
                for k in 0..=24 {
                    out.push(a.position_at(a.t_start + (a.t_end - a.t_start) * f64::from(k) / 24.0));
                }
            }
        }
    }
    out
}

fn dense_points(pieces: &[Piece], per_piece: usize) -> Vec<Point2> {
    pieces
        .iter()
        .flat_map(|p| {
            (0..=per_piece).map(move |k| p.position_at(p.t_start() + (p.t_end() - p.t_start()) * k as f64 / per_piece as f64))
        })
        .collect()
}

struct Frame {
    min: Point2,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(inst: &Instance) -> Self {
        let mut lo = inst.depot;
        let mut hi = inst.depot;
        for t in &inst.targets {
            let (a, b) = t.trajectory.bounding_box();
            lo = Point2::new(lo.x.min(a.x), lo.y.min(a.y));
            hi = Point2::new(hi.x.max(b.x), hi.y.max(b.y));
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
        let scale = (SVG_SIZE - 2.0 * SVG_MARGIN) / span;
        Frame { min: lo, scale, height: (hi.y - lo.y) * scale + 2.0 * SVG_MARGIN }
    }

    fn map(&self, p: Point2) -> (f64, f64) {
        (SVG_MARGIN + (p.x - self.min.x) * self.scale, self.height - SVG_MARGIN - (p.y - self.min.y) * self.scale)
    }

    fn polyline(&self, pts: &[Point2]) -> String {
        let mut s = String::new();
        for (k, p) in pts.iter().enumerate() {
            let (x, y) = self.map(*p);
            if k > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{x:.2},{y:.2}");
        }
        s
    }
}

fn closest_pair(a: &[Point2], b: &[Point2]) -> (Point2, Point2) {
    let mut best = (f64::INFINITY, a[0], b[0]);
    for &p in a {
        for &q in b {
            let d = p.dist(q);
            if d < best.0 {
                best = (d, p, q);
            }
        }
    }
    (best.1, best.2)
}

/// Deterministic SVG of target paths (windows highlighted), the depot and,
/// optionally, a tour. Feasible tours are one connected polyline; lower-bound
/// tours join the visited intervals at their closest sampled points and so
/// show gaps along each visited interval.
pub fn render_svg(inst: &Instance, solution: Option<&SolutionDoc>) -> String {
    let f = Frame::new(inst);
    let width = SVG_SIZE;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {width:.0} {h:.0}\">",
        h = f.height
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    for (k, t) in inst.targets.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let path = locus_points(t.trajectory.pieces());
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-opacity=\"0.35\" stroke-width=\"1\"/>",
            f.polyline(&path)
        );
        for w in &t.windows {
            let pts = locus_points(&t.trajectory.clip(w.lo, w.hi));
            let _ = writeln!(
                s,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"3\"/>",
                f.polyline(&pts)
            );
        }
        let (x, y) = f.map(t.trajectory.position_clamped(t.trajectory.t_start()));
        let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"{color}\">{}</text>", x + 4.0, y - 4.0, t.id);
    }
    match solution {
        Some(SolutionDoc::Feasible(doc)) => {
            let mut pts = vec![inst.depot];
            for (&id, &t) in doc.tour.visit_order.iter().zip(&doc.tour.arrival_times) {
                if let Some(target) = inst.target(id) {
                    pts.push(target.trajectory.position_clamped(t));
                }
            }
            pts.push(inst.depot);
            let _ = writeln!(
                s,
                "<polyline class=\"tour\" points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
                f.polyline(&pts)
            );
            for p in &pts[1..pts.len() - 1] {
                let (x, y) = f.map(*p);
                let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"black\"/>");
            }
        }
        Some(SolutionDoc::LowerBound(doc)) => {
            let mut loci: Vec<Vec<Point2>> = vec![vec![inst.depot]];
            for v in &doc.visits {
                if let Some(target) = inst.target(v.target) {
                    let pieces = target.trajectory.clip(v.t_lo, v.t_hi);
                    let pts = dense_points(&pieces, 8);
                    let _ = writeln!(
                        s,
                        "<polyline class=\"visit\" points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"4\"/>",
                        f.polyline(&pts)
                    );
                    loci.push(pts);
                }
            }
            loci.push(vec![inst.depot]);
            for w in loci.windows(2) {
                let (p, q) = closest_pair(&w[0], &w[1]);
                let ((x1, y1), (x2, y2)) = (f.map(p), f.map(q));
                let _ = writeln!(
                    s,
                    "<line class=\"leg\" x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"black\" stroke-width=\"1.5\" stroke-dasharray=\"4 2\"/>"
                );
            }
        }
        None => {}
    }
    let (x, y) = f.map(inst.depot);
    let _ = writeln!(
        s,
        "<rect class=\"depot\" x=\"{:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"black\"/>",
        x - 5.0,
        y - 5.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deviation_formula() {
        assert_eq!(percent_deviation(100.0, 90.0), Some(10.0));
        assert_eq!(percent_deviation(f64::INFINITY, 90.0), None);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Io(String::new()).exit_code(), 1);
        assert_eq!(CliError::Unsupported(String::new()).exit_code(), 2);
        assert_eq!(CliError::NoSolution(String::new()).exit_code(), 3);
        assert_eq!(main_with_args(["mtbound", "generate", "--n", "0", "--out", "/nonexistent"]), 2);
        assert_eq!(main_with_args(["mtbound", "frobnicate"]), 2);
    }

    #[test]
    fn discretization_defaults() {
        let d = Discretization { level: Some(4), delta: None };
        assert_eq!(d.resolve().unwrap(), ("4".to_string(), 0.625));
        let d = Discretization { level: Some(7), delta: None };
        assert!(matches!(d.resolve(), Err(CliError::Usage(_))));
    }
}
