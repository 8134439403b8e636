use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use drea_bench::{load_all, run_experiment, summarize, ExperimentPlan, Profile};

#[derive(Parser)]
#[command(name = "drea", version, about = "Run and summarize robust-optimization experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a plan file or a built-in profile
    Run {
        /// TOML plan; overrides --profile
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "desk")]
        profile: Profile,
        #[command(flatten)]
        common: Common,
    },
    /// Write the summary table of a results directory
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// DREA with N_p = 1..5 on the 10/15/20-D cases
    SweepNp {
        #[command(flatten)]
        common: Common,
    },
    /// F2-F6 at 100-D and 200-D
    Scale {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads, 0 = one per core
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Repetitions per (case, algorithm), replacing the plan's value
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    base_seed: Option<u64>,
}

fn execute(mut plan: ExperimentPlan, common: &Common) -> drea_bench::Result<()> {
    if let Some(r) = common.runs {
        plan.repetitions = r;
    }
    if let Some(s) = common.base_seed {
        plan.base_seed = s;
    }
    let outcome = run_experiment(&plan, &common.out, common.workers)?;
    for (case, why) in &outcome.skipped {
        eprintln!("skipped {case}: {why}");
    }
    for (case, label) in &outcome.resumed {
        eprintln!("kept existing results for {case} / {label}");
    }
    let summary_path = common.out.join("summary.csv");
    summarize(&outcome.reports)?.write(&summary_path)?;
    println!("{} runs, summary in {}", outcome.reports.len(), summary_path.display());
    Ok(())
}

fn summarize_dir(input: &Path, out: &Path) -> drea_bench::Result<()> {
    let reports = load_all(input)?;
    summarize(&reports)?.write(out)?;
    println!("{} runs summarized into {}", reports.len(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Run { plan, profile, common } => match plan {
            Some(p) => ExperimentPlan::load(p).and_then(|plan| execute(plan, common)),
            None => execute(ExperimentPlan::profile(*profile), common),
        },
        Cmd::Summarize { input, out } => summarize_dir(input, out),
        Cmd::SweepNp { common } => execute(ExperimentPlan::np_sweep(), common),
        Cmd::Scale { common } => execute(ExperimentPlan::scale(), common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
