mod commands;
mod input;
mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

use netpp::consistency_lab::GraphFamily;
use netpp::network_voronoi::RelationKind;

use commands::{CheckArgs, CheckKind, SampleArgs};
use output::{invalid, Format, Invalid, Output, Rendered};

/// Point processes on metric graphs: distances, Voronoi cells, neighbour
/// relations, Markov models and consistency audits.
#[derive(Parser)]
#[command(name = "netpp", version)]
struct Cli {
    /// Tie tolerance for distance comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    eps: f64,
    /// Master seed for sampling and audits.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write results to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Human-readable output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Delaunay,
    #[value(alias = "local-delaunay")]
    Local,
}

impl From<Kind> for RelationKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Delaunay => RelationKind::Delaunay,
            Kind::Local => RelationKind::LocalDelaunay,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Trees,
    Cyclic,
}

#[derive(Args)]
struct GraphArg {
    /// Graph JSON file.
    graph: PathBuf,
}

#[derive(Args)]
struct ConfigArg {
    /// Graph JSON file.
    graph: PathBuf,
    /// Configuration JSON file.
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file and print its summary.
    Validate(GraphArg),
    /// Shortest-path distance between two points (`EDGE@t` or `VERTEX`).
    Dist {
        graph: PathBuf,
        p: String,
        q: String,
    },
    /// Shortest path between two points, with its midpoint.
    Path {
        graph: PathBuf,
        p: String,
        q: String,
    },
    /// Voronoi partition of a configuration.
    Voronoi(ConfigArg),
    /// Related pairs of a configuration.
    Neighbors {
        #[command(flatten)]
        input: ConfigArg,
        #[arg(long, value_enum, default_value_t = Kind::Delaunay)]
        kind: Kind,
    },
    /// Log density of a configuration under a model.
    Density {
        #[command(flatten)]
        input: ConfigArg,
        #[arg(long)]
        model: PathBuf,
    },
    /// Conditional intensity of adding a point to a configuration.
    Papangelou {
        #[command(flatten)]
        input: ConfigArg,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        at: String,
    },
    /// Draw configurations, directly for Poisson or by birth-death MCMC.
    Sample {
        graph: PathBuf,
        #[arg(long, conflicts_with = "model", required_unless_present = "model")]
        poisson: Option<f64>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        iterations: u64,
        #[arg(long, default_value_t = 1_000)]
        burn_in: u64,
        #[arg(long, default_value_t = 10)]
        thin: u64,
        #[arg(long, default_value_t = 1)]
        replicates: u64,
    },
    /// Run an audit over random instances.
    Check {
        #[arg(value_enum)]
        what: CheckKind,
        #[arg(long, value_enum, default_value_t = Kind::Delaunay)]
        kind: Kind,
        /// Defaults to trees for delaunay and cyclic graphs for local.
        #[arg(long, value_enum)]
        family: Option<Family>,
        #[arg(long, default_value_t = 1_000)]
        instances: usize,
        /// Per-instance details as NDJSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Grid spacing for the oracle check.
        #[arg(long, default_value_t = 1e-3)]
        spacing: f64,
        /// Chains (hereditary), point pairs (distance) or triples
        /// (trichotomy) per instance.
        #[arg(long, default_value_t = 10)]
        chains: usize,
    },
    /// Canonical JSON of a graph, or of a configuration with --config.
    Export {
        graph: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

enum Outcome {
    Ok,
    Flagged,
}

fn run(cli: &Cli) -> Result<Outcome> {
    if !(cli.eps > 0.0 && cli.eps.is_finite()) {
        return Err(invalid("eps", format!("--eps must be positive, got {}", cli.eps)));
    }
    let mut out = Output::new(cli.format, cli.pretty, cli.out.as_deref())?;
    let eps = cli.eps;
    let rendered: Rendered = match &cli.command {
        Command::Validate(a) => commands::validate(&input::graph(&a.graph, eps)?),
        Command::Dist { graph, p, q } => {
            let g = input::graph(graph, eps)?;
            commands::dist(&g, &input::point(&g, p)?, &input::point(&g, q)?)?
        }
        Command::Path { graph, p, q } => {
            let g = input::graph(graph, eps)?;
            commands::path(&g, &input::point(&g, p)?, &input::point(&g, q)?)?
        }
        Command::Voronoi(a) => {
            let g = input::graph(&a.graph, eps)?;
            commands::voronoi(&g, &input::configuration(&g, &a.config)?)?
        }
        Command::Neighbors { input: a, kind } => {
            let g = input::graph(&a.graph, eps)?;
            commands::neighbors(&g, &input::configuration(&g, &a.config)?, (*kind).into())
        }
        Command::Density { input: a, model } => {
            let g = input::graph(&a.graph, eps)?;
            let m = input::model(model)?;
            commands::density(&m, &g, &input::configuration(&g, &a.config)?)
        }
        Command::Papangelou { input: a, model, at } => {
            let g = input::graph(&a.graph, eps)?;
            let m = input::model(model)?;
            let x = input::configuration(&g, &a.config)?;
            commands::papangelou(&m, &g, &x, input::point(&g, at)?)?
        }
        Command::Sample {
            graph,
            poisson,
            model,
            iterations,
            burn_in,
            thin,
            replicates,
        } => {
            let g = input::graph(graph, eps)?;
            let (r, summary) = match (poisson, model) {
                (Some(rate), _) => commands::sample_poisson(&g, *rate, *replicates, cli.seed)?,
                (None, Some(path)) => {
                    let args = SampleArgs {
                        iterations: *iterations,
                        burn_in: *burn_in,
                        thin: *thin,
                        replicates: *replicates,
                    };
                    commands::sample_model(&input::model(path)?, &g, &args, cli.seed)?
                }
                (None, None) => unreachable!("clap requires one of --poisson, --model"),
            };
            if !cli.pretty {
                eprintln!("{summary}");
            }
            r
        }
        Command::Check {
            what,
            kind,
            family,
            instances,
            report,
            spacing,
            chains,
        } => {
            if *instances == 0 {
                return Err(invalid("instances", "--instances must be at least 1"));
            }
            if !(*spacing > 0.0) {
                return Err(invalid("spacing", "--spacing must be positive"));
            }
            let args = CheckArgs {
                what: *what,
                kind: (*kind).into(),
                family: family.map(|f| match f {
                    Family::Trees => GraphFamily::Trees,
                    Family::Cyclic => GraphFamily::Cyclic,
                }),
                instances: *instances,
                seed: cli.seed,
                spacing: *spacing,
                per_instance: *chains,
            };
            let (r, flagged) = commands::check(&args, report.as_deref())?;
            out.emit(&r)?;
            return Ok(if flagged { Outcome::Flagged } else { Outcome::Ok });
        }
        Command::Export { graph, config } => {
            let g = input::graph(graph, eps)?;
            let x = config.as_deref().map(|c| input::configuration(&g, c)).transpose()?;
            let text = commands::export(&g, x.as_ref(), cli.pretty)?;
            write_raw(cli.out.as_deref(), &text)?;
            return Ok(Outcome::Ok);
        }
    };
    out.emit(&rendered)?;
    Ok(Outcome::Ok)
}

fn write_raw(path: Option<&Path>, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Flagged) => ExitCode::from(3),
        Err(e) => match e.downcast_ref::<Invalid>() {
            Some(bad) => {
                // validate reports bad graphs as a diagnostic document
                if matches!(cli.command, Command::Validate(_)) {
                    if let Ok(mut out) = Output::new(cli.format, cli.pretty, cli.out.as_deref()) {
                        let _ = out.emit(&commands::invalid_graph(bad.code, &bad.message));
                    }
                }
                eprintln!("error: {bad}");
                ExitCode::from(2)
            }
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
    }
}
