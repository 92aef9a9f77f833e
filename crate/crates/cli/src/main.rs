use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use dibalance::{BalanceParams, SetupPreset};
use dibalance_cli::commands::{self, describe_plan, PlanTarget};
use dibalance_cli::RunConfig;

#[derive(Parser)]
#[command(name = "dibalance", version, about = "Fairness-aware resampling and parameter search")]
struct Cli {
    /// Run configuration (TOML, JSON, or a previous command's manifest).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the configured synthetic dataset.
    Generate,
    /// Sampling ratios, size bounds and restriction checks for one parameter point.
    Plan(PlanArgs),
    /// Metrics of each classifier trained on the unsampled training split.
    Baseline,
    /// Metrics of each classifier under the four preset setups.
    Setups,
    /// Two-level grid search and Pareto selection per classifier.
    Search,
    /// Re-evaluate stored optima on another test collection.
    Report(ReportArgs),
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long, requires_all = ["beta", "gamma"], conflicts_with = "preset")]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// double-balanced, unfavourable-balanced, privilege-balanced or double-imbalanced.
    #[arg(long)]
    preset: Option<SetupPreset>,
    /// Lattice step for the global size bound.
    #[arg(long, default_value_t = 0.01)]
    step: f64,
}

#[derive(Args)]
struct ReportArgs {
    /// results.json written by `search`.
    #[arg(long)]
    results: PathBuf,
    /// Test collection CSV with the searched dataset's schema.
    #[arg(long)]
    test: PathBuf,
    /// External scores as NAME=PATH; PATH holds (index, score) rows.
    #[arg(long, value_parser = parse_scores)]
    scores: Vec<(String, PathBuf)>,
}

fn parse_scores(s: &str) -> Result<(String, PathBuf), String> {
    let (name, path) = s.split_once('=').ok_or("expected NAME=PATH")?;
    Ok((name.to_string(), PathBuf::from(path)))
}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| anyhow!("--config is required for this command"))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    cfg.validate().context("invalid configuration")?;
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Generate => {
            let path = commands::cmd_generate(&load_config(&cli)?)?;
            println!("wrote {}", path.display());
        }
        Command::Plan(a) => {
            let target = match (a.preset, a.alpha, a.beta, a.gamma) {
                (Some(p), ..) => PlanTarget::Preset(p),
                (None, Some(al), Some(be), Some(ga)) => PlanTarget::Params(BalanceParams::new(al, be, ga)?),
                _ => return Err(anyhow!("give --alpha, --beta and --gamma, or --preset")),
            };
            let report = commands::cmd_plan(&load_config(&cli)?, target, a.step)?;
            println!("{}", describe_plan(&report));
        }
        Command::Baseline => print_rows(&commands::cmd_baseline(&load_config(&cli)?)?),
        Command::Setups => print_rows(&commands::cmd_setups(&load_config(&cli)?)?),
        Command::Search => {
            let run = commands::cmd_search(&load_config(&cli)?)?;
            for m in &run.results.models {
                match &m.optimum {
                    Some(p) => println!(
                        "{}: alpha={} beta={} gamma={} threshold={} C.Loss={}",
                        m.name,
                        p.params.alpha,
                        p.params.beta,
                        p.params.gamma,
                        p.threshold,
                        dibalance::metrics::format_cell(p.combined_loss())
                    ),
                    None => println!("{}: {}", m.name, m.error.as_deref().unwrap_or("no optimum")),
                }
            }
        }
        Command::Report(a) => {
            let rows = commands::cmd_report(&a.results, &a.test, &a.scores, cli.out.as_deref())?;
            print_rows(&rows);
        }
    }
    Ok(())
}

fn print_rows(rows: &[commands::ModelRow]) {
    println!("{}", dibalance::MetricReport::TABLE_HEADER.join("\t"));
    for r in rows {
        let label = match &r.setup {
            Some(s) => format!("{s}/{}", r.model),
            None => r.model.clone(),
        };
        match &r.report {
            Some(rep) => println!("{}", rep.table_row(&label).join("\t")),
            None => println!("{label}\t{}", r.status),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
