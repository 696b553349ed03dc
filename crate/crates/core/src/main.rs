use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tmd_cro::experiment::{self, ExperimentConfig, Mode};
use tmd_cro::{Error, Result, RunReport, SubstrateTag};

#[derive(Parser)]
#[command(name = "tmd-cro", version, about = "Tuned mass damper design with a multi-substrate coral reef optimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Source {
    /// TOML experiment config.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in building: n2-paper, n4-paper or n2-lab.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args, Clone)]
struct SeedArgs {
    /// Run this single seed.
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// Run seeds 0..N.
    #[arg(long)]
    seeds: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Optimise and write one output directory per (mode, seed).
    Run {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        seeds: SeedArgs,
        /// cro-sl or standalone:<HS|DE|2Px|GM|MPx>.
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long, default_value = "runs")]
        out_dir: PathBuf,
    },
    /// Fitness and FRF curves of a design file.
    Evaluate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// cro-sl against single-substrate reefs at equal evaluation budgets.
    Compare {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        seeds: SeedArgs,
        /// Comma-separated substrates to run alone (default: all).
        #[arg(long, value_delimiter = ',')]
        substrates: Option<Vec<SubstrateTag>>,
        #[arg(long, default_value = "runs")]
        out_dir: PathBuf,
    },
    /// Rewrite traces and FRF curves for a saved report.json.
    Export {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn load(source: &Source) -> Result<ExperimentConfig> {
    match (&source.config, &source.preset) {
        (Some(path), _) => experiment::load_config(path),
        (None, Some(name)) => experiment::preset(name),
        (None, None) => experiment::preset("n2-paper"),
    }
}

fn seeds(cfg: &ExperimentConfig, args: &SeedArgs) -> Vec<u64> {
    match (args.seed, args.seeds) {
        (Some(s), _) => vec![s],
        (None, Some(n)) => (0..n).collect(),
        (None, None) => cfg.seeds.clone(),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })
}

fn write_resolved(cfg: &ExperimentConfig, out_dir: &Path) -> Result<()> {
    create_dir(out_dir)?;
    let path = out_dir.join("config.toml");
    fs::write(&path, cfg.to_toml()?).map_err(|e| Error::Io { path, source: e })
}

fn saver<'a>(cfg: &'a ExperimentConfig, out_dir: &'a Path) -> impl FnMut(Mode, &RunReport) -> Result<()> + 'a {
    move |mode, report| {
        let dir = out_dir.join(mode.slug()).join(format!("seed-{}", report.rng_seed));
        experiment::export_traces(report, cfg, &dir)?;
        let best = &report.final_best.fitness;
        eprintln!(
            "{mode} seed {}: {:.4} ({:.2} dB) after {} evaluations",
            report.rng_seed,
            best.value,
            best.db(),
            report.evaluations_used
        );
        Ok(())
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { source, seeds: seed_args, mode, out_dir } => {
            let mut cfg = load(&source)?;
            if let Some(m) = mode {
                cfg.mode = m;
            }
            cfg.seeds = seeds(&cfg, &seed_args);
            write_resolved(&cfg, &out_dir)?;
            let outcome = experiment::run_experiment(&cfg, &cfg.seeds, saver(&cfg, &out_dir))?;
            outcome.table.write_csv(&out_dir.join("comparison.csv"))?;
            print!("{}", outcome.table);
        }
        Command::Evaluate { source, design, out_dir } => {
            let cfg = load(&source)?;
            let d = experiment::load_design(&design)?;
            let result = experiment::evaluate_design(&cfg, &d)?;
            let f = result.fitness;
            println!("fitness      {:.6}", f.value);
            println!("fitness_db   {:.4}", f.db());
            println!("argmax_floor {}", f.argmax_floor);
            println!("argmax_omega {:.6}", f.argmax_omega);
            println!("bare_fitness {:.6} ({:.4} dB, floor {})", result.bare.value, result.bare.db(), result.bare.argmax_floor);
            if let Some(dir) = out_dir {
                create_dir(&dir)?;
                experiment::write_frf(&result.bare_curves, &dir.join("frf_bare.csv"))?;
                experiment::write_frf(&result.design_curves, &dir.join("frf_design.csv"))?;
            }
        }
        Command::Compare { source, seeds: seed_args, substrates, out_dir } => {
            let mut cfg = load(&source)?;
            cfg.seeds = seeds(&cfg, &seed_args);
            let tags = substrates.unwrap_or_else(|| SubstrateTag::ALL.to_vec());
            write_resolved(&cfg, &out_dir)?;
            let outcome = experiment::compare(&cfg, &cfg.seeds, &tags, saver(&cfg, &out_dir))?;
            outcome.table.write_csv(&out_dir.join("comparison.csv"))?;
            print!("{}", outcome.table);
        }
        Command::Export { source, report, out_dir } => {
            let cfg = load(&source)?;
            let r = experiment::read_report(&report)?;
            let files = experiment::export_traces(&r, &cfg, &out_dir)?;
            println!("wrote {}", files.convergence.parent().unwrap_or(&out_dir).display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
