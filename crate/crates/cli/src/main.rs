mod models;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::json;

use gspx_core::experiments::{
    pollution_graphon, pollution_signal, run_movielens_experiment, run_pollution_experiment,
    run_theorem1_check, Imputation, PollutionConfig, Theorem1Config, TransferConfig,
};
use gspx_core::homomorphism::{
    check_norm_sandwich, closed_walk_count, cut_norm_step, cycle_density_graph,
    cycle_density_graphon, hom_density_graph, hom_density_graphon_mc, Motif,
};
use gspx_core::io::{
    coefficients_to_csv, coefficients_to_json, format_number, graph_from_json, motif_from_json,
    movielens_csv, parse_movielens, pollution_csv, sampled_graph_to_json, signal_from_json,
    theorem1_csv, RunManifest,
};
use gspx_core::sampling::sample_w_random_graph;
use gspx_core::spectral::{gft, step_spectrum, wft_step, FourierCoefficients};
use gspx_core::{Error, Graph, Graphon};

use models::{parse_graphon, parse_signal, resolution, usage, UsageError};

const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(name = "gspx", version, about = "Graph and graphon signal processing")]
struct Cli {
    /// Master seed for every random draw
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the result here instead of standard output
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// JSON file with command parameters; flags given explicitly take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Log progress to standard error (-v info, -vv debug)
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a W-random graph and dump it with its latent labels
    SampleGraph {
        #[arg(long)]
        graphon: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
    /// Graph Fourier transform of a signal on a graph
    Gft {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        signal: PathBuf,
    },
    /// Graphon Fourier transform through discretization
    Wft {
        #[arg(long)]
        graphon: String,
        #[arg(long)]
        signal: String,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Homomorphism density of a motif in a graph, or a Monte-Carlo estimate for a graphon
    HomDensity {
        /// edge, triangle, C<k> or a motif JSON file
        #[arg(long)]
        motif: String,
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Density of the k-cycle
    CycleDensity {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Exact cut norm of a step graphon
    CutNorm {
        #[arg(long)]
        graphon: String,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Check the cut norm / operator norm sandwich on a step graphon
    NormSandwich {
        #[arg(long)]
        graphon: String,
        #[arg(long)]
        resolution: Option<usize>,
    },
    #[command(subcommand)]
    Experiment(Experiment),
    #[command(subcommand)]
    Check(Check),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Graph JSON file
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Graphon descriptor
    #[arg(long)]
    graphon: Option<String>,
}

#[derive(Subcommand)]
enum Experiment {
    /// Concentration of GFTs of sampled sensor networks
    Pollution(PollutionArgs),
    /// Transferability of the GFT across MovieLens user subsamples
    Movielens(MovielensArgs),
}

#[derive(Subcommand)]
enum Check {
    /// Convergence of sampled graph transforms to the graphon transform
    Theorem1(Theorem1Args),
}

#[derive(Args)]
struct PollutionArgs {
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    sigma_y: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct MovielensArgs {
    /// Tab-separated ratings file (user, item, rating, timestamp)
    #[arg(long)]
    ratings: PathBuf,
    /// 1-based movie id of the reference signal
    #[arg(long)]
    movie: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    /// user-mean or item-mean
    #[arg(long)]
    imputation: Option<String>,
}

#[derive(Args)]
struct Theorem1Args {
    /// Graphon descriptor; defaults to the pollution kernel with --beta
    #[arg(long)]
    graphon: Option<String>,
    /// Signal descriptor; defaults to the pollution profile with --sigma-y
    #[arg(long)]
    signal: Option<String>,
    #[arg(long, default_value_t = 3.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.3)]
    sigma_y: f64,
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    n_ref: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(path: &Path) -> Result<Graph> {
    graph_from_json(&read(path)?).with_context(|| format!("parsing graph {}", path.display()))
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => serde_json::from_str(&read(p)?)
            .map_err(|e| usage(format!("invalid config {}: {e}", p.display()))),
    }
}

fn parse_motif(desc: &str) -> Result<Motif> {
    if let Some(m) = Motif::builtin(desc) {
        return Ok(m);
    }
    if Path::new(desc).is_file() {
        return motif_from_json(&read(Path::new(desc))?)
            .with_context(|| format!("parsing motif {desc}"));
    }
    Err(usage(format!(
        "unknown motif {desc:?}; expected edge, triangle, C<k> or a JSON file"
    )))
}

fn scalar(x: f64, format: Format) -> String {
    match format {
        Format::Csv => format!("{}\n", format_number(x)),
        Format::Json => format!("{}\n", json!({ "value": x })),
    }
}

fn coefficients(c: &FourierCoefficients, format: Format) -> Result<String> {
    Ok(match format {
        Format::Csv => coefficients_to_csv(c),
        Format::Json => coefficients_to_json(c)? + "\n",
    })
}

fn rows_json(rows: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)? + "\n")
}

struct Emitted {
    text: String,
    manifest: Option<RunManifest>,
}

impl From<String> for Emitted {
    fn from(text: String) -> Self {
        Self {
            text,
            manifest: None,
        }
    }
}

fn emit(cli: &Cli, out: Emitted) -> Result<()> {
    match &cli.output {
        None => print!("{}", out.text),
        Some(path) => {
            fs::write(path, &out.text).with_context(|| format!("writing {}", path.display()))?;
            if let Some(m) = out.manifest {
                let mut name = path.as_os_str().to_owned();
                name.push(".manifest.json");
                fs::write(PathBuf::from(name), m.to_json()?)?;
            }
        }
    }
    Ok(())
}

fn step_from(desc: &str, res: Option<usize>) -> Result<gspx_core::StepGraphon> {
    let w = parse_graphon(desc)?;
    let n = resolution(&w, res)?;
    Ok(w.discretize(n)?)
}

fn run(cli: &Cli) -> Result<()> {
    let seed = cli.seed;
    let format = cli.format;
    let out: Emitted = match &cli.command {
        Command::SampleGraph { graphon, n, stream } => {
            let w = parse_graphon(graphon)?;
            let (g, labels) = sample_w_random_graph(&w, *n, seed.unwrap_or(DEFAULT_SEED), *stream)?;
            (sampled_graph_to_json(&g, &labels)? + "\n").into()
        }
        Command::Gft { graph, signal } => {
            let g = load_graph(graph)?;
            let x = signal_from_json(&read(signal)?)?.on(&g)?;
            coefficients(&gft(&g, &x)?, format)?.into()
        }
        Command::Wft {
            graphon,
            signal,
            resolution: res,
        } => {
            let w = parse_graphon(graphon)?;
            let n = resolution(&w, *res)?;
            let x = parse_signal(signal)?;
            let (_, c) = wft_step(&w.discretize(n)?, &x.discretize(n)?)?;
            coefficients(&c, format)?.into()
        }
        Command::HomDensity {
            motif,
            source,
            samples,
        } => {
            let f = parse_motif(motif)?;
            if let Some(path) = &source.graph {
                scalar(hom_density_graph(&f, &load_graph(path)?)?, format).into()
            } else {
                let w = parse_graphon(source.graphon.as_deref().expect("clap group"))?;
                let est = hom_density_graphon_mc(&f, &w, *samples, seed.unwrap_or(DEFAULT_SEED))?;
                match format {
                    Format::Csv => format!(
                        "estimate,stderr,samples\n{},{},{}\n",
                        format_number(est.estimate),
                        format_number(est.stderr),
                        est.samples
                    ),
                    Format::Json => format!(
                        "{}\n",
                        json!({
                            "estimate": est.estimate,
                            "stderr": est.stderr,
                            "samples": est.samples,
                            "signed_kernel": est.signed_kernel,
                        })
                    ),
                }
                .into()
            }
        }
        Command::CycleDensity {
            k,
            source,
            resolution: res,
        } => {
            let value = if let Some(path) = &source.graph {
                let g = load_graph(path)?;
                // exact enumeration when affordable, the spectrum otherwise
                match closed_walk_count(*k, &g) {
                    Ok(count) => count / (g.n() as f64).powi(*k as i32),
                    Err(Error::BudgetExceeded(_)) => cycle_density_graph(*k, &g)?,
                    Err(e) => return Err(e.into()),
                }
            } else {
                let w = step_from(source.graphon.as_deref().expect("clap group"), *res)?;
                cycle_density_graphon(*k, &step_spectrum(&w)?)?
            };
            scalar(value, format).into()
        }
        Command::CutNorm {
            graphon,
            resolution: res,
        } => {
            let cn = cut_norm_step(&step_from(graphon, *res)?)?;
            match format {
                Format::Csv => scalar(cn.value, format),
                Format::Json => format!(
                    "{}\n",
                    json!({ "value": cn.value, "rows": cn.rows, "cols": cn.cols })
                ),
            }
            .into()
        }
        Command::NormSandwich {
            graphon,
            resolution: res,
        } => {
            let r = check_norm_sandwich(&step_from(graphon, *res)?)?;
            match format {
                Format::Csv => format!(
                    "cut_norm,operator_norm,lower_holds,upper_holds\n{},{},{},{}\n",
                    format_number(r.cut),
                    format_number(r.opnorm),
                    r.lower_holds,
                    r.upper_holds
                ),
                Format::Json => format!(
                    "{}\n",
                    json!({
                        "cut_norm": r.cut,
                        "operator_norm": r.opnorm,
                        "lower_holds": r.lower_holds,
                        "upper_holds": r.upper_holds,
                    })
                ),
            }
            .into()
        }
        Command::Experiment(Experiment::Pollution(a)) => {
            let mut cfg: PollutionConfig = load_config(cli.config.as_deref())?;
            if let Some(v) = a.beta {
                cfg.beta = v;
            }
            if let Some(v) = a.sigma_y {
                cfg.sigma_y = v;
            }
            if let Some(v) = &a.n_grid {
                cfg.n_grid = v.clone();
            }
            if let Some(v) = a.trials {
                cfg.trials = v;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            cfg.validate().map_err(|e| usage(e.to_string()))?;
            let t = run_pollution_experiment(&cfg)?;
            Emitted {
                text: match format {
                    Format::Csv => pollution_csv(&t),
                    Format::Json => rows_json(&t.rows)?,
                },
                manifest: Some(RunManifest::new(
                    "experiment pollution",
                    &cfg,
                    cfg.master_seed,
                )?),
            }
        }
        Command::Experiment(Experiment::Movielens(a)) => {
            let mut cfg: TransferConfig = load_config(cli.config.as_deref())?;
            if let Some(v) = a.movie {
                cfg.movie = v;
            }
            if let Some(v) = &a.n_grid {
                cfg.n_grid = v.clone();
            }
            if let Some(v) = a.trials {
                cfg.trials = v;
            }
            if let Some(v) = &a.imputation {
                cfg.imputation = v.parse::<Imputation>().map_err(|e| usage(e.to_string()))?;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            let r = parse_movielens(&a.ratings)
                .with_context(|| format!("loading {}", a.ratings.display()))?;
            let rows = run_movielens_experiment(&cfg, &r)?;
            Emitted {
                text: match format {
                    Format::Csv => movielens_csv(&rows),
                    Format::Json => rows_json(&rows)?,
                },
                manifest: Some(RunManifest::new(
                    "experiment movielens",
                    &cfg,
                    cfg.master_seed,
                )?),
            }
        }
        Command::Check(Check::Theorem1(a)) => {
            let mut cfg: Theorem1Config = load_config(cli.config.as_deref())?;
            if let Some(v) = a.cutoff {
                cfg.cutoff = v;
            }
            if let Some(v) = &a.n_grid {
                cfg.n_grid = v.clone();
            }
            if let Some(v) = a.trials {
                cfg.trials = v;
            }
            if a.n_ref.is_some() {
                cfg.n_ref = a.n_ref;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            cfg.validate().map_err(|e| usage(e.to_string()))?;
            let w: Graphon = match &a.graphon {
                Some(d) => parse_graphon(d)?,
                None => pollution_graphon(a.beta).map_err(|e| usage(e.to_string()))?,
            };
            let x = match &a.signal {
                Some(d) => parse_signal(d)?,
                None => pollution_signal(a.sigma_y).map_err(|e| usage(e.to_string()))?,
            };
            let t = run_theorem1_check(&w, &x, &cfg)?;
            Emitted {
                text: match format {
                    Format::Csv => theorem1_csv(&t),
                    Format::Json => rows_json(&t.rows)?,
                },
                manifest: Some(RunManifest::new("check theorem1", &cfg, cfg.master_seed)?),
            }
        }
    };
    emit(cli, out)
}
