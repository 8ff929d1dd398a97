//! Argument parsing and dispatch. Exit codes: 0 success / all checks
//! pass, 1 check violation, 2 usage error, 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ranking_core::checks::Lemma;
use ranking_core::experiments::default_alpha_grid;
use ranking_core::generators::GeneratorSpec;
use ranking_core::oracles::DEFAULT_BRUTE_FORCE_CAP;
use ranking_core::Engine;

use crate::commands;
use crate::config::{ExperimentConfig, InstanceSource};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "ranking",
    version,
    about = "Ranking-family online matching: instance generators, exact oracles, engine runs, structural check suites, and Monte Carlo concentration experiments"
)]
pub struct Cli {
    /// Results format (CSV is the only format).
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an instance file from a named family
    Generate {
        #[command(subcommand)]
        family: FamilyCommand,
    },
    /// Print exact offline optima for an instance file
    Oracle {
        instance: PathBuf,
        /// Edge cap for the exhaustive fully-online oracle
        #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_CAP)]
        cap: usize,
    },
    /// Execute one engine run with pinned randomness
    Run(RunArgs),
    /// Run a randomized structural check suite (one CSV row per case)
    Check(CheckArgs),
    /// Monte Carlo tail experiment against the analytic bounds
    Concentrate(ConcentrateArgs),
}

#[derive(Debug, Args)]
pub struct GenerateCommon {
    /// Instance file to write; the generator spec goes to
    /// <output>.spec.json alongside it
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also print the offline oracle objective(s)
    #[arg(long)]
    pub with_oracle: bool,
}

#[derive(Debug, Subcommand)]
pub enum FamilyCommand {
    /// Buyer i adjacent to sellers i..n-1; admits the diagonal perfect matching
    UpperTriangular {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: GenerateCommon,
    },
    /// Erdős–Rényi bipartite instance with optional log-uniform weights
    RandomBipartite {
        /// Number of sellers
        #[arg(long)]
        ns: usize,
        /// Number of buyers
        #[arg(long)]
        nb: usize,
        /// Edge probability
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Low end of the log-uniform weight range
        #[arg(long, requires = "w_hi")]
        w_lo: Option<f64>,
        /// High end of the log-uniform weight range
        #[arg(long, requires = "w_lo")]
        w_hi: Option<f64>,
        #[command(flatten)]
        common: GenerateCommon,
    },
    /// Two sellers of weight 1 and 1e10 sharing one buyer
    Figure1 {
        #[command(flatten)]
        common: GenerateCommon,
    },
    /// Random arrival/departure intervals with Erdős–Rényi edges
    RandomFullyOnline {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: GenerateCommon,
    },
    /// n disjoint (buyer i, seller i) edges
    DisjointPerfect {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: GenerateCommon,
    },
}

impl FamilyCommand {
    fn split(self) -> Result<(GeneratorSpec, GenerateCommon)> {
        Ok(match self {
            FamilyCommand::UpperTriangular { n, common } => {
                (GeneratorSpec::UpperTriangular { n }, common)
            }
            FamilyCommand::RandomBipartite {
                ns,
                nb,
                p,
                seed,
                w_lo,
                w_hi,
                common,
            } => {
                let weight_range = match (w_lo, w_hi) {
                    (Some(lo), Some(hi)) => Some((lo, hi)),
                    (None, None) => None,
                    _ => unreachable!("clap enforces the pairing"),
                };
                (
                    GeneratorSpec::RandomBipartite {
                        n_sellers: ns,
                        n_buyers: nb,
                        p,
                        seed,
                        weight_range,
                    },
                    common,
                )
            }
            FamilyCommand::Figure1 { common } => (GeneratorSpec::Figure1, common),
            FamilyCommand::RandomFullyOnline { n, p, seed, common } => {
                (GeneratorSpec::RandomFullyOnline { n, p, seed }, common)
            }
            FamilyCommand::DisjointPerfect { n, common } => {
                (GeneratorSpec::DisjointPerfect { n }, common)
            }
        })
    }
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("randomness").required(true).args(["seed", "ranks"])))]
pub struct RunArgs {
    pub instance: PathBuf,
    /// ranking | fully_online | vertex_weighted | eps_ranking | single_valued
    #[arg(long)]
    pub engine: Engine,
    /// Smoothing for eps_ranking
    #[arg(long)]
    pub eps: Option<f64>,
    /// Derive ranks from this seed (trial index 0 of the seed's stream)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Read ranks from a file of whitespace-separated decimal literals
    #[arg(long)]
    pub ranks: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// L3 | L4 | L5 | L6 | L7 | L8 | L8u | L9
    pub suite: Lemma,
    #[arg(long)]
    pub cases: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fixed eps for the weighted suites (default: cycle 0.1, 0.25, 0.5)
    #[arg(long)]
    pub eps: Option<f64>,
    /// Trials per case (L9 only)
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// CSV destination (stdout when omitted)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConcentrateArgs {
    /// Experiment config JSON; conflicts with the inline flags
    #[arg(
        long,
        conflicts_with_all = ["instance", "generator", "engine", "eps", "trials", "master_seed", "alphas", "rho", "output"]
    )]
    pub config: Option<PathBuf>,
    /// Instance file path
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Inline generator spec JSON, e.g. '{"family":"upper_triangular","n":20}'
    #[arg(long)]
    pub generator: Option<String>,
    #[arg(long)]
    pub engine: Option<Engine>,
    /// Smoothing for eps_ranking (default: alpha/2 per grid row)
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub master_seed: u64,
    /// Comma-separated alpha grid (default 0.05..0.5 step 0.05)
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    /// Competitive-ratio constant for the fully-online comparison
    #[arg(long)]
    pub rho: Option<f64>,
    /// Results CSV path
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

impl ConcentrateArgs {
    fn into_config(self) -> Result<ExperimentConfig> {
        if let Some(path) = self.config {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
            return ExperimentConfig::from_json(&text);
        }
        let instance = match (self.instance, self.generator) {
            (Some(path), None) => InstanceSource::Path(path),
            (None, Some(spec)) => InstanceSource::Generator(
                serde_json::from_str(&spec)
                    .map_err(|e| CliError::usage(format!("--generator: {e}")))?,
            ),
            (Some(_), Some(_)) => {
                return Err(CliError::usage("--instance conflicts with --generator"))
            }
            (None, None) => {
                return Err(CliError::usage(
                    "concentrate needs --config, --instance, or --generator",
                ))
            }
        };
        Ok(ExperimentConfig {
            instance,
            engine: self
                .engine
                .ok_or_else(|| CliError::usage("concentrate needs --engine"))?,
            eps: self.eps,
            trials: self
                .trials
                .ok_or_else(|| CliError::usage("concentrate needs --trials"))?,
            master_seed: self.master_seed,
            alpha_grid: self.alphas.unwrap_or_else(default_alpha_grid),
            rho: self.rho,
            output: self
                .output
                .ok_or_else(|| CliError::usage("concentrate needs --output"))?,
        })
    }
}

fn try_dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate { family } => {
            let (spec, common) = family.split()?;
            commands::cmd_generate(&spec, &common.output, common.with_oracle)?;
            Ok(true)
        }
        Command::Oracle { instance, cap } => {
            commands::cmd_oracle(&instance, cap)?;
            Ok(true)
        }
        Command::Run(args) => {
            let source = match (args.seed, args.ranks) {
                (Some(seed), None) => commands::RankSource::Seed(seed),
                (None, Some(path)) => commands::RankSource::File(path),
                _ => unreachable!("clap enforces the group"),
            };
            commands::cmd_run(&args.instance, args.engine, args.eps, &source)?;
            Ok(true)
        }
        Command::Check(args) => commands::cmd_check(
            args.suite,
            args.cases,
            args.seed,
            args.eps,
            args.trials,
            args.output.as_deref(),
        ),
        Command::Concentrate(args) => {
            commands::cmd_concentrate(&args.into_config()?)?;
            Ok(true)
        }
    }
}

/// Run a parsed command line, mapping outcomes to process exit codes.
pub fn dispatch(cli: Cli) -> ExitCode {
    match try_dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
