//! `rc-lab`: batch driver for the random cluster toolkit. Subcommands run
//! verification suites, exact computations, phase-diagram scans, critical
//! curve traces and tree-pressure estimates, emitting CSV or JSON for offline
//! plotting. Everything is deterministic given the full configuration
//! including seeds.

mod cmds;
mod config;
mod fmt;
mod gen;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::{ConfigMap, Range};
use gen::GenSpec;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed")]
    VerifyFailed,
    #[error(transparent)]
    Graph(#[from] rc_lab::graphs::GraphError),
    #[error(transparent)]
    Exact(#[from] rc_lab::exact::ExactError),
    #[error(transparent)]
    Mapping(#[from] rc_lab::mapping::MappingError),
    #[error(transparent)]
    Bethe(#[from] rc_lab::bethe::BetheError),
    #[error(transparent)]
    Regular(#[from] rc_lab::regular::RegularError),
}

impl CliError {
    /// 1 for verification failures, 2 for parameter and budget errors.
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::VerifyFailed => ExitCode::from(1),
            _ => ExitCode::from(2),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "rc-lab",
    version,
    about = "Random cluster models on finite graphs: exact oracles, BP bounds, regular-graph phase diagrams",
    after_help = "Set RC_LAB_THREADS to cap the worker count. Every flag can also be given \
                  in a --config file as `name = value`; explicit flags win."
)]
struct Cli {
    /// Flat key-value config file; flags override file entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a randomized verification suite (exit 1 on failure)
    Verify(VerifyArgs),
    /// Exact partition functions and the sandwich report for one graph
    Exact(ExactArgs),
    /// Pressure surface over a (w, B) grid as CSV
    Scan(ScanArgs),
    /// Trace the first-order critical curve as CSV
    Curve(CurveArgs),
    /// Tree-pressure estimate on a Galton-Watson tree as JSON
    Tree(TreeArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// sandwich | identities | bethe | regular | all
    suite: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fix q instead of drawing it per trial
    #[arg(long)]
    q: Option<f64>,
    /// Fix w instead of drawing it per trial
    #[arg(long)]
    w: Option<f64>,
    /// Fix B instead of drawing it per trial
    #[arg(long = "B")]
    b: Option<f64>,
    /// BP convergence tolerance for the bethe suite
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// text | json
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Generator spec: "regular:N,D" or "gw:ROOT/INTERIOR,DEPTH"
    #[arg(long)]
    gen: Option<GenSpec>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    w: Option<f64>,
    #[arg(long = "B")]
    b: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    /// Grid min:max:count over w
    #[arg(long = "w-range")]
    w_range: Option<Range>,
    /// Grid min:max:count over B
    #[arg(long = "B-range")]
    b_range: Option<Range>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    /// Grid min:max:count over B; rows are clipped to [0, B_plus)
    #[arg(long = "B-range")]
    b_range: Option<Range>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TreeArgs {
    /// Tree spec: "gw:ROOT/INTERIOR,DEPTH"
    #[arg(long)]
    gen: Option<GenSpec>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    w: Option<f64>,
    #[arg(long = "B")]
    b: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    /// Truncation depth (overrides the depth in --gen)
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn init_threads() {
    if let Ok(raw) = std::env::var("RC_LAB_THREADS") {
        if let Ok(n) = raw.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let cfg = match &cli.config {
        Some(path) => match ConfigMap::load(path) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => ConfigMap::default(),
    };
    match run(cli.command, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::VerifyFailed) {
                eprintln!("error: {e}");
            }
            e.exit_code()
        }
    }
}

fn run(command: Command, cfg: &ConfigMap) -> Result<(), CliError> {
    match command {
        Command::Verify(args) => cmd_verify(args, cfg),
        Command::Exact(args) => cmd_exact(args, cfg),
        Command::Scan(args) => cmd_scan(args, cfg),
        Command::Curve(args) => cmd_curve(args, cfg),
        Command::Tree(args) => cmd_tree(args, cfg),
    }
}

fn cmd_verify(args: VerifyArgs, cfg: &ConfigMap) -> Result<(), CliError> {
    let suite = match args.suite {
        Some(s) => s,
        None => cfg
            .raw("suite")
            .map(str::to_string)
            .ok_or_else(|| CliError::Usage("missing suite name".into()))?,
    };
    let trials = cfg.or(args.trials, "trials", 100)?;
    let seed = cfg.or(args.seed, "seed", 0)?;
    let tol = cfg.or(args.tol, "tol", 1e-12)?;
    let ov = suites::Overrides {
        q: cfg.opt(args.q, "q")?,
        w: cfg.opt(args.w, "w")?,
        b: cfg.opt(args.b, "B")?,
    };
    let reports: Vec<suites::SuiteReport> = match suite.as_str() {
        "sandwich" => vec![suites::sandwich_suite(trials, seed, &ov)?],
        "identities" => vec![suites::identities_suite(trials, seed, &ov)?],
        "bethe" => vec![suites::bethe_suite(trials, seed, &ov, tol)?],
        "regular" => vec![suites::regular_suite(seed)?],
        "all" => vec![
            suites::sandwich_suite(trials, seed, &ov)?,
            suites::identities_suite(trials, seed, &ov)?,
            suites::bethe_suite(trials, seed, &ov, tol)?,
            suites::regular_suite(seed)?,
        ],
        other => {
            return Err(CliError::Usage(format!(
                "unknown suite `{other}` (sandwich | identities | bethe | regular | all)"
            )))
        }
    };
    let format = cfg.or(args.format, "format", "text".to_string())?;
    let content = match format.as_str() {
        "text" => reports.iter().map(|r| r.render_text()).collect::<String>(),
        "json" => fmt::json_pretty(&serde_json::Value::Array(
            reports.iter().map(|r| r.render_json()).collect(),
        )),
        other => return Err(CliError::Usage(format!("unknown format `{other}`"))),
    };
    fmt::emit(args.out.as_deref(), &content)?;
    if reports.iter().all(|r| r.pass()) {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}

fn cmd_exact(args: ExactArgs, cfg: &ConfigMap) -> Result<(), CliError> {
    let gen = cfg.opt(args.gen, "gen")?;
    let graph_path = match args.graph {
        Some(p) => Some(p),
        None => cfg.raw("graph").map(PathBuf::from),
    };
    let seed = cfg.or(args.seed, "seed", 0)?;
    let g = gen::load_graph(graph_path.as_deref(), gen.as_ref(), seed)?;
    let report = cmds::exact_report(
        &g,
        cfg.req(args.q, "q")?,
        cfg.req(args.w, "w")?,
        cfg.req(args.b, "B")?,
    )?;
    fmt::emit(args.out.as_deref(), &fmt::json_pretty(&report))
}

fn cmd_scan(args: ScanArgs, cfg: &ConfigMap) -> Result<(), CliError> {
    let q = cfg.req(args.q, "q")?;
    let d = cfg.req(args.d, "d")?;
    let w_range: Range = cfg.req(args.w_range, "w-range")?;
    let b_range: Range = cfg.req(args.b_range, "B-range")?;
    let csv = cmds::scan_csv(q, d, &w_range.points(), &b_range.points())?;
    fmt::emit(args.out.as_deref(), &csv)
}

fn cmd_curve(args: CurveArgs, cfg: &ConfigMap) -> Result<(), CliError> {
    let q = cfg.req(args.q, "q")?;
    let d = cfg.req(args.d, "d")?;
    let b_range: Range = cfg.req(args.b_range, "B-range")?;
    let csv = cmds::curve_csv(q, d, &b_range.points())?;
    fmt::emit(args.out.as_deref(), &csv)
}

fn cmd_tree(args: TreeArgs, cfg: &ConfigMap) -> Result<(), CliError> {
    let gen_spec: GenSpec = cfg.req(args.gen, "gen")?;
    let GenSpec::GwTree { spec, depth } = gen_spec else {
        return Err(CliError::Usage("tree needs --gen \"gw:...\"".into()));
    };
    let depth = cfg.or(args.depth, "depth", depth)?;
    let samples = cfg.or(args.samples, "samples", 1000)?;
    let seed = cfg.or(args.seed, "seed", 0)?;
    let q = cfg.opt(args.q, "q")?;
    let beta = cfg.opt(args.beta, "beta")?;
    let params = match (q, beta) {
        (Some(q), None) => cmds::TreeParams::Cluster {
            q,
            w: cfg.req(args.w, "w")?,
            b: cfg.req(args.b, "B")?,
        },
        (None, Some(beta)) => cmds::TreeParams::Direct {
            beta,
            k: cfg.req(args.k, "k")?,
            h: cfg.req(args.h, "h")?,
        },
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either --q/--w/--B or --beta/--k/--h, not both".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Usage(
                "missing model parameters: --q/--w/--B or --beta/--k/--h".into(),
            ))
        }
    };
    let report = cmds::tree_report(&spec, &params, depth, samples, seed)?;
    fmt::emit(args.out.as_deref(), &fmt::json_pretty(&report))
}
