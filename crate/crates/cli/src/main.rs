//! `morop`: run the robust optimization pipeline from the command line.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 model failure,
//! 4 no feasible solution. Errors are printed to stderr as one JSON object.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use morop_core::model::DepVector;
use morop_core::pipeline::{self, RunConfig, ScenarioConfig};
use morop_core::robustness::{bin_normal, BinningMethod};
use morop_core::{MoropError, Result};

#[derive(Parser)]
#[command(name = "morop", version, about = "Multi-objective robust optimization pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize, then assess robustness of the resulting archive.
    Run(RunArgs),
    /// Assess robustness of an existing archive (skips optimization).
    Analyze {
        #[command(flatten)]
        run: RunArgs,
        /// CSV with column `id` followed by the design variables.
        #[arg(long, env = "MOROP_ARCHIVE")]
        archive: PathBuf,
    },
    /// Scenario-set helpers.
    #[command(subcommand)]
    Scenarios(ScenarioCommand),
    /// Re-derive summary.json from the CSVs in an output directory.
    Report {
        #[arg(long, env = "MOROP_OUT")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, env = "MOROP_CONFIG")]
    config: PathBuf,
    #[arg(long, env = "MOROP_SEED")]
    seed: Option<u64>,
    /// Noise samples per solution.
    #[arg(long, env = "MOROP_SAMPLES")]
    samples: Option<usize>,
    /// Worker-thread cap.
    #[arg(long, env = "MOROP_THREADS")]
    threads: Option<usize>,
    /// Output directory (default: the config's out_dir, else ./morop-out).
    #[arg(long, env = "MOROP_OUT")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// Bin a normal distribution of one environment parameter into a scenario table (JSON on stdout).
    BinNormal {
        #[arg(long)]
        mean: f64,
        #[arg(long)]
        std: f64,
        /// Centre of the first cell.
        #[arg(long)]
        lower: f64,
        /// Centre of the last cell.
        #[arg(long)]
        upper: f64,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        dep_index: usize,
        /// Comma-separated values of the other environment parameters (default: just the binned one).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        template: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = Method::Density)]
        method: Method,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Density,
    CellMass,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.samples {
            cfg.samples = n;
        }
        if let Some(t) = self.threads {
            cfg.threads = Some(t);
        }
        cfg.out_dir = self.out.clone().or(cfg.out_dir).or_else(|| Some(PathBuf::from("morop-out")));
        Ok(cfg)
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| MoropError::Io(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.load()?;
            print_json(&pipeline::run_pipeline(&cfg)?.summary)
        }
        Command::Analyze { run, archive } => {
            let cfg = run.load()?;
            print_json(&pipeline::analyze_archive(archive, &cfg)?.summary)
        }
        Command::Scenarios(ScenarioCommand::BinNormal { mean, std, lower, upper, count, dep_index, template, method }) => {
            let template = DepVector(template.unwrap_or_else(|| vec![mean]));
            let method = match method {
                Method::Density => BinningMethod::Density,
                Method::CellMass => BinningMethod::CellMass,
            };
            let set = bin_normal(&template, dep_index, mean, std, lower, upper, count, method)?;
            print_json(&ScenarioConfig::Table { entries: set.scenarios().to_vec() })
        }
        Command::Report { out } => print_json(&pipeline::write_report(out)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
