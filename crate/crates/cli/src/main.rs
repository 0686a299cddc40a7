use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use heatbound_cli::config::ExperimentConfig;
use heatbound_cli::{commands, run_verify, AppError};

#[derive(Parser)]
#[command(
    name = "heatbound",
    version,
    about = "Heat kernels and Gaussian bounds on weighted graphs"
)]
struct Cli {
    /// Seed for every random instance.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel searches.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory for `verify`.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArgs {
    /// Graph file; without it a line or anti-tree is generated.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    levels: Option<usize>,
    /// `line` or `antitree`.
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    anchor: Option<usize>,
    /// `degree` or `combinatorial`.
    #[arg(long)]
    metric: Option<String>,
    /// Extra `key=value` configuration settings.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// CSV or graph output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an anti-tree or its reduced line as a graph file.
    Antitree(GraphArgs),
    /// Distances from the anchor and the intrinsic check.
    Metric(GraphArgs),
    /// Heat kernel at the anchor by Dirichlet exhaustion.
    Kernel {
        #[command(flatten)]
        graph: GraphArgs,
        /// Times as `start:end:ratio`.
        #[arg(long)]
        t_grid: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Volume and degree-mean profiles about the anchor.
    Geometry {
        #[command(flatten)]
        graph: GraphArgs,
        /// Mean exponent `p`, or `inf`.
        #[arg(long)]
        p: Option<String>,
    },
    /// Isoperimetric constant of a ball about the anchor.
    Iso {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        n: Option<f64>,
    },
    /// Kernel to bound ratios for one formula.
    Bounds {
        #[command(flatten)]
        graph: GraphArgs,
        /// `main`, `antitree1`, `antitree1c` or `antitree2`.
        #[arg(long)]
        formula: Option<String>,
        #[arg(long)]
        n: Option<f64>,
        #[arg(long)]
        t_grid: Option<String>,
        /// Number of vertices nearest the anchor used as pair endpoints.
        #[arg(long, default_value_t = 10)]
        pairs: usize,
    },
    /// Run the verification suites and write the report bundle.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
    },
}

fn apply(config: &mut ExperimentConfig, key: &str, value: Option<String>) -> Result<(), AppError> {
    if let Some(v) = value {
        config.set(key, &v)?;
    }
    Ok(())
}

fn apply_sets(config: &mut ExperimentConfig, sets: &[String]) -> Result<(), AppError> {
    for s in sets {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| AppError::Usage(format!("expected KEY=VALUE, got `{s}`")))?;
        config.set(k.trim(), v.trim())?;
    }
    Ok(())
}

fn graph_config(base: ExperimentConfig, args: &GraphArgs) -> Result<ExperimentConfig, AppError> {
    let mut c = base;
    apply(
        &mut c,
        "graph",
        args.graph.as_ref().map(|p| p.display().to_string()),
    )?;
    apply(&mut c, "gamma", args.gamma.map(|v| v.to_string()))?;
    apply(&mut c, "levels", args.levels.map(|v| v.to_string()))?;
    apply(&mut c, "shape", args.shape.clone())?;
    apply(&mut c, "anchor", args.anchor.map(|v| v.to_string()))?;
    apply(&mut c, "metric", args.metric.clone())?;
    apply_sets(&mut c, &args.sets)?;
    Ok(c)
}

fn run(cli: Cli) -> Result<u8, AppError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| AppError::Usage(e.to_string()))?;
    }
    let mut base = ExperimentConfig::default();
    if let Some(seed) = cli.seed {
        base.seed = seed;
    }
    let summary = match cli.command {
        Command::Antitree(g) => commands::antitree(&graph_config(base, &g)?, g.out.as_deref())?,
        Command::Metric(g) => commands::metric(&graph_config(base, &g)?, g.out.as_deref())?,
        Command::Kernel { graph, t_grid, tol } => {
            let mut c = graph_config(base, &graph)?;
            apply(&mut c, "t_grid", t_grid)?;
            apply(&mut c, "tolerance", tol.map(|v| v.to_string()))?;
            commands::kernel(&c, graph.out.as_deref())?
        }
        Command::Geometry { graph, p } => {
            let mut c = graph_config(base, &graph)?;
            apply(&mut c, "p", p)?;
            commands::geometry(&c, graph.out.as_deref())?
        }
        Command::Iso { graph, radius, n } => {
            let mut c = graph_config(base, &graph)?;
            apply(&mut c, "n", n.map(|v| v.to_string()))?;
            commands::iso(&c, radius, graph.out.as_deref())?
        }
        Command::Bounds {
            graph,
            formula,
            n,
            t_grid,
            pairs,
        } => {
            let mut c = graph_config(base, &graph)?;
            apply(&mut c, "bound", formula)?;
            apply(&mut c, "n", n.map(|v| v.to_string()))?;
            apply(&mut c, "t_grid", t_grid)?;
            commands::bounds(&c, pairs, graph.out.as_deref())?
        }
        Command::Verify { config, sets } => {
            let mut c = match config {
                Some(path) => ExperimentConfig::parse(&fs::read_to_string(&path)?)?,
                None => ExperimentConfig::default(),
            };
            if let Some(seed) = cli.seed {
                c.seed = seed;
            }
            apply_sets(&mut c, &sets)?;
            if let Some(dir) = cli.out_dir {
                c.out_dir = dir;
            }
            let outcome = run_verify(&c)?;
            for report in &outcome.reports {
                for check in &report.checks {
                    println!(
                        "{:<16} {:<34} {:<5} {:<8} {:.6e}",
                        report.suite,
                        check.name,
                        if check.hard { "hard" } else { "find" },
                        if check.passed { "pass" } else { "FAIL" },
                        check.value
                    );
                }
            }
            eprintln!("report written to {}", c.out_dir.display());
            return Ok(outcome.exit_code());
        }
    };
    eprintln!("{summary}");
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
