use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use statbandit::abc::{RunDocument, Sampler};
use statbandit::bandit::{rank_arms, Phase, RewardLedger};
use statbandit_bench::{generate_observed, run_experiment, ExperimentConfig, Report};

#[derive(Parser)]
#[command(
    name = "statbandit",
    version,
    about = "Bandit-driven ABC experiment harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate and store the observed trajectories for a config.
    GenerateObserved {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run every (method, pool size, repetition) cell and write reports.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-render the tables of a finished run directory.
    Report { run_dir: PathBuf },
    /// Print the arm ranking of each bandit run in a run directory.
    Rank {
        run_dir: PathBuf,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
}

fn load(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn rank(run_dir: &Path, top: usize) -> Result<()> {
    let mut docs = Vec::new();
    collect_runs(&run_dir.join("runs"), &mut docs)?;
    docs.sort();
    if docs.is_empty() {
        println!("no bandit runs found under {}", run_dir.display());
    }
    for dir in docs {
        let doc = RunDocument::from_json(&fs::read_to_string(dir.join("run.json"))?)?;
        if !matches!(doc.sampler, Sampler::Dynamic { .. }) {
            continue;
        }
        let ledger =
            RewardLedger::read_csv(doc.pool.len(), fs::File::open(dir.join("ledger.csv"))?)
                .with_context(|| format!("reading ledger in {}", dir.display()))?;
        let mut exploit = vec![0usize; ledger.k()];
        for row in ledger
            .rows()
            .iter()
            .filter(|r| r.phase == Phase::Exploitation)
        {
            exploit[row.selected] += 1;
        }
        println!("{}", dir.strip_prefix(run_dir).unwrap_or(&dir).display());
        println!(
            "  {:>4}  {:<44} {:>12} {:>7} {:>9}",
            "rank", "statistic", "mean reward", "pulls", "exploited"
        );
        let Ok(ranks) = rank_arms(&ledger) else {
            println!("  (empty ledger)");
            continue;
        };
        for (i, r) in ranks.iter().take(top).enumerate() {
            println!(
                "  {:>4}  {:<44} {:>12} {:>7} {:>9}",
                i + 1,
                doc.pool[r.arm],
                r.mean_reward.map_or("-".into(), |m| format!("{m:.4}")),
                r.pulls,
                exploit[r.arm]
            );
        }
    }
    Ok(())
}

fn collect_runs(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    if !dir.is_dir() {
        return Ok(());
    }
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            if path.join("run.json").is_file() && path.join("ledger.csv").is_file() {
                out.push(path.clone());
            }
            collect_runs(&path, out)?;
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::GenerateObserved { config, seed } => {
            let cfg = load(&config, seed)?;
            let trajectories = generate_observed(&cfg)?;
            println!(
                "wrote {} trajectories to {}",
                trajectories.len(),
                cfg.output_dir().join("observed").display()
            );
        }
        Command::Run { config, seed } => {
            let cfg = load(&config, seed)?;
            let report = run_experiment(&cfg)?;
            print!("{}", report.render());
            println!("reports written to {}", cfg.output_dir().display());
        }
        Command::Report { run_dir } => {
            let stored = Report::load(&run_dir)?;
            // aggregates are recomputed from the stored rows
            let report = Report::new(stored.config, stored.rows);
            print!("{}", report.render());
        }
        Command::Rank { run_dir, top } => rank(&run_dir, top)?,
    }
    Ok(())
}
