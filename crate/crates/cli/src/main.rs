//! `mfscale` — drives the multi-fidelity dataset scaling study.
//!
//! Subcommands mirror the pipeline stages: `generate` a solver pool,
//! `compose` a budget-constrained selection, `train` one surrogate,
//! `sweep` the full (budget x composition x seed) grid, `analyze` the
//! results, and `plot` the per-field charts.
//!
//! Exit codes: 0 success, 1 runtime failure (including failed sweep
//! cells), 2 configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mfscale_core::compose::{compose_dataset, CompositionMode, DatasetBudgetSpec, Selection};
use mfscale_core::config::FullConfig;
use mfscale_core::solver::{generate_pool, load_pool, save_pool, FidelityLevel, SamplePool};
use mfscale_core::surrogate::{save_model, train};
use mfscale_core::sweep::{read_results, run_sweep, split_pool};
use mfscale_core::Error as CoreError;

mod analyze;

#[derive(Parser)]
#[command(name = "mfscale", version, about = "Multi-fidelity dataset scaling study")]
struct Cli {
    /// TOML experiment config; defaults apply for every omitted field.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides MFSCALE_OUT; default "out").
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker thread count (overrides MFSCALE_WORKERS; default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BudgetArgs {
    /// Dataset budget D_b in work units.
    #[arg(long)]
    budget: f64,

    /// High-fidelity composition share D_c in [0, 1].
    #[arg(long)]
    dc: f64,

    /// Composition mode: budget_share or count_share.
    #[arg(long)]
    mode: Option<String>,

    /// Selection draw seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the solver sample pool into <out>/pool/.
    Generate {
        /// Pool RNG seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,

        /// Number of cases to draw (overrides the config).
        #[arg(long)]
        cases: Option<usize>,
    },
    /// Compose a budget-constrained selection from <out>/pool/ and print it as JSON.
    Compose {
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Train one surrogate on a composed selection; writes <out>/model.bin.
    Train {
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run the full sweep grid; writes <out>/results.csv (resumable).
    Sweep,
    /// Aggregate <out>/results.csv into <out>/analysis/ (CSVs + summary.txt).
    Analyze,
    /// Render <out>/results.csv into <out>/plots/*.svg.
    Plot,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if e
                .downcast_ref::<CoreError>()
                .is_some_and(|c| matches!(c, CoreError::Config(_)))
            {
                2
            } else {
                1
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    let out = out_dir(cli);
    if let Some(n) = workers(cli) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CoreError::Config(format!("worker pool: {e}")))?;
    }
    let cfg = match &cli.config {
        Some(path) => FullConfig::load(path)?,
        None => FullConfig::default(),
    };
    cfg.validate()?;

    match &cli.command {
        Command::Generate { seed, cases } => {
            let n = cases.unwrap_or(cfg.pool.n_cases);
            let seed = seed.unwrap_or(cfg.pool.seed);
            let pool = generate_pool(n, seed)?;
            let dir = out.join("pool");
            save_pool(&pool, &dir)?;
            println!(
                "pool: {} pairs (of {} requested, seed {}) -> {}",
                pool.len(),
                n,
                seed,
                dir.display()
            );
            println!(
                "mean cost ratio {:.4} (low {:.1}, high {:.1} work units/sample)",
                pool.mean_cost_ratio(),
                pool.cost_model.avg_cost_low,
                pool.cost_model.avg_cost_high
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Compose { budget } => {
            let pool = load_pool(&pool_dir(&out)?)?;
            let (selection, _) = compose_cmd(&cfg, &pool, budget)?;
            println!("{}", selection_json(&selection, &pool));
            Ok(ExitCode::SUCCESS)
        }
        Command::Train { budget } => {
            let pool = load_pool(&pool_dir(&out)?)?;
            let (train_pool, _) = split_pool(&pool, cfg.sweep.test_pairs)?;
            let (selection, seed) = compose_cmd(&cfg, &train_pool, budget)?;
            let mut net_cfg = cfg.network.clone();
            net_cfg.seed ^= seed;
            let mut train_cfg = cfg.train.clone();
            train_cfg.seed ^= seed;
            let model = train(&selection, &train_pool, &net_cfg, &train_cfg)?;
            let path = out.join("model.bin");
            save_model(&model, &path)?;
            println!(
                "trained on {} low + {} high samples (cost {:.1}, achieved dc {:.4})",
                selection.low_ids.len(),
                selection.high_ids.len(),
                selection.total_cost,
                selection.achieved_dc
            );
            println!(
                "best val loss {:.6e} after {} epochs -> {}",
                model.best_val_loss,
                model.epochs_run,
                path.display()
            );
            for flag in &model.flags {
                println!("note: {flag}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep => {
            let outcome = run_sweep(&cfg, &out)?;
            println!(
                "sweep: {} rows ({} reused) -> {}",
                outcome.n_rows,
                outcome.n_reused,
                outcome.results_path.display()
            );
            if outcome.n_failed > 0 {
                eprintln!("{} cell(s) failed; see status column", outcome.n_failed);
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze => {
            let rows = read_results(&results_file(&out)?)?;
            let dir = out.join("analysis");
            let written = analyze::emit_analysis(&rows, &dir)?;
            for p in written {
                println!("wrote {}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Plot => {
            let paths = mfscale_core::plot::emit_plots_from_file(
                &results_file(&out)?,
                &out.join("plots"),
            )?;
            for p in paths {
                println!("wrote {}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn pool_dir(out: &PathBuf) -> anyhow::Result<PathBuf> {
    let dir = out.join("pool");
    anyhow::ensure!(
        dir.join("manifest.json").is_file(),
        "no pool at {}; run `mfscale generate` first",
        dir.display()
    );
    Ok(dir)
}

fn results_file(out: &PathBuf) -> anyhow::Result<PathBuf> {
    let path = out.join("results.csv");
    anyhow::ensure!(
        path.is_file(),
        "no results at {}; run `mfscale sweep` first",
        path.display()
    );
    Ok(path)
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os("MFSCALE_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn workers(cli: &Cli) -> Option<usize> {
    cli.workers.or_else(|| {
        std::env::var("MFSCALE_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

fn compose_cmd(
    cfg: &FullConfig,
    pool: &SamplePool,
    args: &BudgetArgs,
) -> anyhow::Result<(Selection, u64)> {
    let mode = match &args.mode {
        Some(text) => text
            .parse::<CompositionMode>()
            .map_err(|e| CoreError::Config(e.to_string()))?,
        None => cfg.sweep.mode,
    };
    let spec = DatasetBudgetSpec::new(args.budget, args.dc, mode)?;
    let seed = args.seed.unwrap_or_else(|| cfg.sweep.seeds[0]);
    Ok((compose_dataset(pool, &spec, seed)?, seed))
}

fn selection_json(selection: &Selection, pool: &SamplePool) -> String {
    let mut samples = Vec::new();
    let mut push = |ids: &[u32], fidelity: FidelityLevel| {
        for &id in ids {
            let cost = pool
                .pair(id)
                .map(|p| p.solution(fidelity).work_units as f64)
                .unwrap_or(f64::NAN);
            samples.push(serde_json::json!({
                "case_id": id,
                "fidelity": fidelity.tag(),
                "cost": cost,
            }));
        }
    };
    push(&selection.low_ids, FidelityLevel::Low);
    push(&selection.high_ids, FidelityLevel::High);
    let doc = serde_json::json!({
        "samples": samples,
        "n_low": selection.low_ids.len(),
        "n_high": selection.high_ids.len(),
        "total_cost": selection.total_cost,
        "achieved_dc": selection.achieved_dc,
    });
    serde_json::to_string_pretty(&doc).expect("json encoding cannot fail")
}
