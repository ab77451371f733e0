//! Experiment harness: seeded runs, run matrices, rank tables and
//! plot-ready CSV extraction.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use commea::coevolution::EpsSchedule;
use commea::metrics::mean_ranks;
use commea::problems::parse_problem_id;
use commea::record::RunRecord;
use commea::types::{Problem, RunConfig, RunMode};

#[derive(Parser)]
#[command(
    name = "commea",
    version,
    about = "Two-archive coevolutionary optimizer for multimodal multi-objective problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one seeded run and write its JSON record.
    Run(RunArgs),
    /// Execute a problems x modes x seeds cross product of runs.
    Matrix(MatrixArgs),
    /// Aggregate a directory of records into a CSV rank table.
    Table(TableArgs),
    /// Emit plot-ready CSV data from one record.
    Plotdata(PlotArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Full,
    CaOnly,
}

impl From<ModeArg> for RunMode {
    fn from(mode: ModeArg) -> RunMode {
        match mode {
            ModeArg::Full => RunMode::Full,
            ModeArg::CaOnly => RunMode::CaOnly,
        }
    }
}

fn mode_name(mode: RunMode) -> &'static str {
    match mode {
        RunMode::Full => "full",
        RunMode::CaOnly => "ca-only",
    }
}

#[derive(Args)]
struct RunArgs {
    /// Problem id, e.g. sinemirror, sinemirrord-d10, polygon-k4-m3-d10,
    /// dualdepth-d0.10.
    #[arg(long)]
    problem: String,
    /// Population / archive capacity; defaults to 100 * D.
    #[arg(long)]
    pop: Option<usize>,
    /// Function-evaluation budget; defaults to 5000 * D.
    #[arg(long)]
    evals: Option<u64>,
    /// User epsilon for the acceptance band.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    mode: ModeArg,
    /// Keep per-generation snapshots (archives + metrics) in the record.
    #[arg(long)]
    trace: bool,
    /// Reference sample size for the record's IGD/IGDX readouts.
    #[arg(long, default_value_t = 500)]
    ref_points: usize,
    #[arg(long, default_value_t = 20.0)]
    sbx_eta: f64,
    #[arg(long, default_value_t = 20.0)]
    pm_eta: f64,
    /// Per-variable mutation probability; defaults to 1/D.
    #[arg(long)]
    pm_rate: Option<f64>,
    /// Record path; defaults to <problem>_<mode>_seed<seed>.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MatrixArgs {
    /// JSON file describing the matrix (see README for the schema).
    #[arg(long)]
    config: PathBuf,
    /// Directory receiving one record per cell.
    #[arg(long, default_value = "records")]
    out: PathBuf,
    /// Runs per problem/mode cell; overrides the config file.
    #[arg(long)]
    seeds: Option<u64>,
    /// Concurrent runs; defaults to $COMMEA_JOBS, then the CPU count.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct TableArgs {
    /// Directory of record JSON files covering a full matrix.
    #[arg(long)]
    records: PathBuf,
    /// Output CSV path.
    #[arg(long, default_value = "table.csv")]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum PlotKind {
    EpsCurve,
    TraceMetrics,
    ScatterDecision,
    ScatterObjective,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ArchiveArg {
    Da,
    Ca,
}

#[derive(Args)]
struct PlotArgs {
    /// Record JSON file.
    #[arg(long)]
    record: PathBuf,
    #[arg(long, value_enum)]
    kind: PlotKind,
    /// Which archive the scatter kinds read.
    #[arg(long, value_enum, default_value_t = ArchiveArg::Da)]
    archive: ArchiveArg,
    /// Output CSV path.
    #[arg(long, default_value = "plot.csv")]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Matrix(args) => cmd_matrix(args),
        Command::Table(args) => cmd_table(args),
        Command::Plotdata(args) => cmd_plotdata(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

/// Writes through a temp file in the same directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

struct CellSpec {
    problem: String,
    mode: RunMode,
    pop: Option<usize>,
    evals: Option<u64>,
    eps: f64,
    seed: u64,
    trace: bool,
    ref_points: usize,
    sbx_eta: f64,
    pm_eta: f64,
    pm_rate: Option<f64>,
}

fn build_config(spec: &CellSpec) -> Result<(Box<dyn Problem>, RunConfig)> {
    let problem = parse_problem_id(&spec.problem)?;
    let mut config = RunConfig::defaults_for(problem.as_ref());
    if let Some(pop) = spec.pop {
        config.pop = pop;
    }
    if let Some(evals) = spec.evals {
        config.max_fe = evals;
    }
    config.epsilon = spec.eps;
    config.seed = spec.seed;
    config.mode = spec.mode;
    config.trace = spec.trace;
    config.ref_points = spec.ref_points;
    config.sbx_eta = spec.sbx_eta;
    config.pm_eta = spec.pm_eta;
    if let Some(rate) = spec.pm_rate {
        config.pm_rate = rate;
    }
    config.validate()?;
    Ok((problem, config))
}

fn execute_cell(spec: &CellSpec, out: &Path) -> Result<RunRecord> {
    let (problem, config) = build_config(spec)?;
    let record = commea::run(&config, problem.as_ref());
    write_atomic(out, &record.to_json())?;
    Ok(record)
}

fn default_record_name(problem: &str, mode: RunMode, seed: u64) -> String {
    format!("{problem}_{}_seed{seed}.json", mode_name(mode))
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let spec = CellSpec {
        problem: args.problem,
        mode: args.mode.into(),
        pop: args.pop,
        evals: args.evals,
        eps: args.eps,
        seed: args.seed,
        trace: args.trace,
        ref_points: args.ref_points,
        sbx_eta: args.sbx_eta,
        pm_eta: args.pm_eta,
        pm_rate: args.pm_rate,
    };
    // canonicalize the id for the default file name
    let canonical = parse_problem_id(&spec.problem)?.id();
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(default_record_name(&canonical, spec.mode, spec.seed)));
    let started = Instant::now();
    let record = execute_cell(&spec, &out)?;
    println!(
        "{} mode={} seed={} gens={} fe={} igd={:.6} igdx={:.6} wall={:.2?} -> {}",
        record.problem,
        mode_name(record.config.mode),
        record.config.seed,
        record.generations,
        record.fe_used,
        record.final_igd,
        record.final_igdx,
        started.elapsed(),
        out.display()
    );
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixConfig {
    problems: Vec<String>,
    #[serde(default = "default_modes")]
    modes: Vec<String>,
    /// Runs per cell.
    #[serde(default)]
    seeds: Option<u64>,
    #[serde(default)]
    base_seed: u64,
    #[serde(default)]
    pop: Option<usize>,
    #[serde(default)]
    evals: Option<u64>,
    #[serde(default = "default_eps")]
    eps: f64,
    #[serde(default)]
    trace: bool,
    #[serde(default = "default_ref_points")]
    ref_points: usize,
    #[serde(default = "default_eta")]
    sbx_eta: f64,
    #[serde(default = "default_eta")]
    pm_eta: f64,
    #[serde(default)]
    pm_rate: Option<f64>,
}

fn default_modes() -> Vec<String> {
    vec!["full".into()]
}

fn default_eps() -> f64 {
    0.1
}

fn default_ref_points() -> usize {
    500
}

fn default_eta() -> f64 {
    20.0
}

fn parse_mode(name: &str) -> Result<RunMode> {
    match name {
        "full" => Ok(RunMode::Full),
        "ca-only" | "ca_only" => Ok(RunMode::CaOnly),
        other => bail!("unknown mode '{other}' (expected full or ca-only)"),
    }
}

fn jobs_from_env() -> Option<usize> {
    std::env::var("COMMEA_JOBS").ok()?.parse().ok()
}

fn cmd_matrix(args: MatrixArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let config: MatrixConfig =
        serde_json::from_str(&text).context("parsing matrix config")?;
    if config.problems.is_empty() {
        bail!("matrix config lists no problems");
    }
    let seeds = args.seeds.or(config.seeds).unwrap_or(30);
    if seeds == 0 {
        bail!("matrix needs at least one seed per cell");
    }
    let jobs = args
        .jobs
        .or_else(jobs_from_env)
        .or_else(|| std::thread::available_parallelism().ok().map(|n| n.get()))
        .unwrap_or(1)
        .max(1);

    // deterministic per-cell seed: base_seed + running cell index
    let mut cells = Vec::new();
    let mut index = 0u64;
    for problem in &config.problems {
        for mode in &config.modes {
            let mode = parse_mode(mode)?;
            for _ in 0..seeds {
                let seed = config.base_seed + index;
                index += 1;
                let spec = CellSpec {
                    problem: problem.clone(),
                    mode,
                    pop: config.pop,
                    evals: config.evals,
                    eps: config.eps,
                    seed,
                    trace: config.trace,
                    ref_points: config.ref_points,
                    sbx_eta: config.sbx_eta,
                    pm_eta: config.pm_eta,
                    pm_rate: config.pm_rate,
                };
                // canonical name needs a parsable id; leave errors for the run
                let name = match parse_problem_id(problem) {
                    Ok(p) => default_record_name(&p.id(), mode, seed),
                    Err(_) => default_record_name(problem, mode, seed),
                };
                cells.push((spec, args.out.join(name)));
            }
        }
    }

    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let started = Instant::now();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let failures = std::sync::Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(cells.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= cells.len() {
                    break;
                }
                let (spec, path) = &cells[i];
                if let Err(err) = execute_cell(spec, path) {
                    failures.lock().unwrap().push(format!(
                        "{} {} seed {}: {err:#}",
                        spec.problem,
                        mode_name(spec.mode),
                        spec.seed
                    ));
                }
            });
        }
    });
    let failures = failures.into_inner().unwrap();
    let done = cells.len() - failures.len();
    println!(
        "matrix: {done}/{} cells completed in {:.2?} -> {}",
        cells.len(),
        started.elapsed(),
        args.out.display()
    );
    if !failures.is_empty() {
        for f in &failures {
            eprintln!("failed cell: {f}");
        }
        bail!("{} of {} cells failed", failures.len(), cells.len());
    }
    Ok(())
}

fn load_records(dir: &Path) -> Result<Vec<RunRecord>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no record files in {}", dir.display());
    }
    paths
        .iter()
        .map(|p| {
            let text =
                fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            RunRecord::from_json(&text).with_context(|| format!("parsing {}", p.display()))
        })
        .collect()
}

fn sample_std(values: &[f64], mean: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (values.len() - 1) as f64;
    var.sqrt()
}

fn cmd_table(args: TableArgs) -> Result<()> {
    let records = load_records(&args.records)?;
    let mut groups: BTreeMap<(String, String), Vec<&RunRecord>> = BTreeMap::new();
    for record in &records {
        groups
            .entry((record.problem.clone(), mode_name(record.config.mode).to_string()))
            .or_default()
            .push(record);
    }
    // the matrix must be complete: every problem x mode cell present with
    // the same run count
    let problems: Vec<String> = {
        let mut v: Vec<String> = groups.keys().map(|(p, _)| p.clone()).collect();
        v.dedup();
        v
    };
    let modes: Vec<String> = {
        let mut v: Vec<String> = groups.keys().map(|(_, m)| m.clone()).collect();
        v.sort();
        v.dedup();
        v
    };
    let count = groups.values().next().map(|v| v.len()).unwrap_or(0);
    let mut missing = Vec::new();
    for p in &problems {
        for m in &modes {
            match groups.get(&(p.clone(), m.clone())) {
                Some(cell) if cell.len() == count => {}
                Some(cell) => missing.push(format!("{p}/{m}: {} of {count} runs", cell.len())),
                None => missing.push(format!("{p}/{m}: missing")),
            }
        }
    }
    if !missing.is_empty() {
        bail!("ragged matrix:\n  {}", missing.join("\n  "));
    }
    for cell in groups.values_mut() {
        cell.sort_by_key(|r| r.config.seed);
    }

    let mut csv = String::from("problem,mode,metric,mean,std,rank\n");
    for problem in &problems {
        for (metric, pick) in [
            ("igd", (|r: &RunRecord| r.final_igd) as fn(&RunRecord) -> f64),
            ("igdx", |r: &RunRecord| r.final_igdx),
        ] {
            // each run index is a block; modes are ranked within blocks and
            // the ranks averaged
            let scores: Vec<Vec<f64>> = modes
                .iter()
                .map(|m| {
                    groups[&(problem.clone(), m.clone())]
                        .iter()
                        .map(|r| pick(r))
                        .collect()
                })
                .collect();
            let table = mean_ranks(&scores, true);
            for (mi, mode) in modes.iter().enumerate() {
                let values = &scores[mi];
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                let std = sample_std(values, mean);
                csv.push_str(&format!(
                    "{problem},{mode},{metric},{mean:.6},{std:.6},{:.3}\n",
                    table.mean[mi]
                ));
            }
        }
    }
    write_atomic(&args.out, &csv)?;
    println!(
        "table: {} problems x {} modes x {count} runs -> {}",
        problems.len(),
        modes.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_plotdata(args: PlotArgs) -> Result<()> {
    let text = fs::read_to_string(&args.record)
        .with_context(|| format!("reading {}", args.record.display()))?;
    let record = RunRecord::from_json(&text)?;
    let csv = match args.kind {
        PlotKind::EpsCurve => {
            let generations = record.config.generations();
            if generations == 0 {
                bail!("record has no generations to plot");
            }
            let schedule = EpsSchedule::new(record.config.epsilon, generations);
            let mut out = String::from("stage,eps\n");
            for i in 1..=generations {
                out.push_str(&format!(
                    "{:.6},{:.6}\n",
                    i as f64 / generations as f64,
                    schedule.eps_at(i)
                ));
            }
            out
        }
        PlotKind::TraceMetrics => {
            let trace = record
                .trace
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("record has no trace (rerun with --trace)"))?;
            let mut out = String::from("generation,eps,igd,igdx\n");
            for frame in trace {
                out.push_str(&format!(
                    "{},{:.6},{:.6},{:.6}\n",
                    frame.gen, frame.eps, frame.igd, frame.igdx
                ));
            }
            out
        }
        PlotKind::ScatterDecision | PlotKind::ScatterObjective => {
            let set = match args.archive {
                ArchiveArg::Da => record
                    .final_da
                    .as_ref()
                    .ok_or_else(|| anyhow::anyhow!("record has no diversity archive (ablation run); use --archive ca"))?,
                ArchiveArg::Ca => &record.final_ca,
            };
            let (rows, prefix) = match args.kind {
                PlotKind::ScatterDecision => (&set.x, "x"),
                _ => (&set.f, "f"),
            };
            let width = rows.first().map(|r| r.len()).unwrap_or(0);
            let header: Vec<String> = (1..=width).map(|i| format!("{prefix}{i}")).collect();
            let mut out = header.join(",");
            out.push('\n');
            for row in rows {
                let line: Vec<String> = row.iter().map(|v| format!("{v:.9}")).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
            out
        }
    };
    write_atomic(&args.out, &csv)?;
    println!("plotdata: {} -> {}", args.record.display(), args.out.display());
    Ok(())
}
