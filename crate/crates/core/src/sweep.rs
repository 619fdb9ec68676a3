//! Sweep orchestration: runs the (budget x composition x seed) grid over a
//! cached pool, evaluates each trained surrogate on the held-out pairs, and
//! owns the results.csv format. Finished sweeps are resumable: completed
//! cells are reused verbatim and a complete file is left untouched.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::compose::{compose_dataset, DatasetBudgetSpec};
use crate::config::FullConfig;
use crate::error::{Error, Result};
use crate::metrics::normalized_mse;
use crate::scaling::RunRecord;
use crate::solver::{generate_pool, load_pool, save_pool, FidelityLevel, PoolPair, SamplePool};
use crate::surrogate::{predict, train};

pub const RESULTS_HEADER: &str =
    "budget_db,composition_dc,mode,seed,n_low,n_high,total_cost,mse_u,mse_tau,epochs_run,status";

pub const STATUS_OK: &str = "ok";
pub const STATUS_BASELINE: &str = "baseline";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub results_path: PathBuf,
    pub n_rows: usize,
    /// Cells whose status starts with "error:".
    pub n_failed: usize,
    /// Rows reused from an earlier partial run.
    pub n_reused: usize,
}

/// Splits off the `test_pairs` highest case ids as the held-out set. The
/// training pool keeps the full pool's cost model: composition budgets are
/// quoted against the pool-wide calibration.
pub fn split_pool(pool: &SamplePool, test_pairs: usize) -> Result<(SamplePool, Vec<PoolPair>)> {
    if pool.len() < test_pairs + 2 {
        return Err(Error::Config(format!(
            "pool of {} pairs cannot hold out {test_pairs} and keep 2 for training",
            pool.len()
        )));
    }
    let split = pool.len() - test_pairs;
    let train = SamplePool {
        pairs: pool.pairs[..split].to_vec(),
        cost_model: pool.cost_model.clone(),
        requested_cases: pool.requested_cases,
        seed: pool.seed,
    };
    Ok((train, pool.pairs[split..].to_vec()))
}

fn sanitize_status(msg: &str) -> String {
    msg.replace([',', '\n', '\r'], ";")
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct CellKey {
    budget_db: f64,
    composition_dc: f64,
    seed: u64,
    baseline: bool,
}

fn record_key(r: &RunRecord) -> (u64, u64, u64, bool) {
    (
        r.budget_db.to_bits(),
        r.composition_dc.to_bits(),
        r.seed,
        r.status == STATUS_BASELINE,
    )
}

fn cell_key_bits(k: &CellKey) -> (u64, u64, u64, bool) {
    (
        k.budget_db.to_bits(),
        k.composition_dc.to_bits(),
        k.seed,
        k.baseline,
    )
}

fn run_cell(
    cfg: &FullConfig,
    train_pool: &SamplePool,
    test: &[PoolPair],
    key: &CellKey,
) -> RunRecord {
    let mut rec = RunRecord {
        budget_db: key.budget_db,
        composition_dc: key.composition_dc,
        mode: cfg.sweep.mode,
        seed: key.seed,
        n_low: 0,
        n_high: 0,
        total_cost: 0.0,
        mse_u: f64::NAN,
        mse_tau: f64::NAN,
        epochs_run: 0,
        status: String::new(),
    };
    let outcome = (|| -> Result<()> {
        let selection = if key.baseline {
            // every high-fidelity sample of the training pool
            let high_ids: Vec<u32> =
                train_pool.pairs.iter().map(|p| p.case.case_id).collect();
            crate::compose::Selection {
                low_ids: Vec::new(),
                total_cost: train_pool.total_cost(FidelityLevel::High),
                achieved_dc: 1.0,
                high_ids,
            }
        } else {
            let spec = DatasetBudgetSpec::new(key.budget_db, key.composition_dc, cfg.sweep.mode)?;
            compose_dataset(train_pool, &spec, key.seed)?
        };
        debug_assert!(
            selection
                .low_ids
                .iter()
                .chain(&selection.high_ids)
                .all(|id| train_pool.pair(*id).is_some()),
            "selection must stay inside the training pool"
        );
        rec.n_low = selection.low_ids.len();
        rec.n_high = selection.high_ids.len();
        rec.total_cost = selection.total_cost;

        let mut net_cfg = cfg.network.clone();
        net_cfg.seed ^= key.seed;
        let mut train_cfg = cfg.train.clone();
        train_cfg.seed ^= key.seed;
        let model = train(&selection, train_pool, &net_cfg, &train_cfg)?;
        rec.epochs_run = model.epochs_run;

        let mut sum_u = 0.0;
        let mut sum_tau = 0.0;
        for pair in test {
            let pred = predict(&model, &pair.case, &pair.high.mesh.node_y)?;
            sum_u += normalized_mse(&pred.u, &pair.high.u, &model.norm.field_out)?;
            sum_tau += normalized_mse(&[pred.tau_w], &[pair.high.tau_w], &model.norm.scalar_out)?;
        }
        rec.mse_u = sum_u / test.len() as f64;
        rec.mse_tau = sum_tau / test.len() as f64;
        Ok(())
    })();
    rec.status = match outcome {
        Ok(()) if key.baseline => STATUS_BASELINE.into(),
        Ok(()) => STATUS_OK.into(),
        Err(e) => {
            rec.mse_u = f64::NAN;
            rec.mse_tau = f64::NAN;
            format!("error: {}", sanitize_status(&e.to_string()))
        }
    };
    rec
}

/// Runs (or resumes) the full sweep under `out_dir`, returning the path of
/// the results file. The pool is generated once and cached in
/// `out_dir/pool/`; an existing cache must match the configured generation
/// settings.
pub fn run_sweep(cfg: &FullConfig, out_dir: &Path) -> Result<SweepOutcome> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let pool_dir = out_dir.join("pool");
    let pool = if pool_dir.join("manifest.json").exists() {
        let pool = load_pool(&pool_dir)?;
        if pool.requested_cases != cfg.pool.n_cases || pool.seed != cfg.pool.seed {
            return Err(Error::Config(format!(
                "cached pool in {} was generated with (n_cases={}, seed={}), config wants ({}, {})",
                pool_dir.display(),
                pool.requested_cases,
                pool.seed,
                cfg.pool.n_cases,
                cfg.pool.seed
            )));
        }
        pool
    } else {
        let pool = generate_pool(cfg.pool.n_cases, cfg.pool.seed)?;
        save_pool(&pool, &pool_dir)?;
        pool
    };
    let (train_pool, test) = split_pool(&pool, cfg.sweep.test_pairs)?;

    let high_total = train_pool.total_cost(FidelityLevel::High);
    let budgets: Vec<f64> = match &cfg.sweep.budgets {
        Some(b) => b.clone(),
        None => cfg
            .sweep
            .budget_fractions
            .iter()
            .map(|f| f * high_total)
            .collect(),
    };

    let mut cells = Vec::new();
    for &budget in &budgets {
        for &dc in &cfg.sweep.compositions {
            for &seed in &cfg.sweep.seeds {
                cells.push(CellKey { budget_db: budget, composition_dc: dc, seed, baseline: false });
            }
        }
    }
    cells.push(CellKey {
        budget_db: high_total,
        composition_dc: 1.0,
        seed: cfg.sweep.seeds[0],
        baseline: true,
    });

    // resume: reuse finished rows (errors are recomputed), never rewrite a
    // complete file
    let results_path = out_dir.join("results.csv");
    let mut reused: Vec<RunRecord> = Vec::new();
    if results_path.exists() {
        for r in read_results(&results_path)? {
            let done = r.status == STATUS_OK || r.status == STATUS_BASELINE;
            let wanted = cells.iter().any(|c| cell_key_bits(c) == record_key(&r));
            if done && wanted {
                reused.push(r);
            }
        }
    }
    let pending: Vec<CellKey> = cells
        .iter()
        .filter(|c| !reused.iter().any(|r| record_key(r) == cell_key_bits(c)))
        .copied()
        .collect();
    let n_reused = reused.len();
    if pending.is_empty() && reused.len() == cells.len() {
        return Ok(SweepOutcome {
            results_path,
            n_rows: n_reused,
            n_failed: 0,
            n_reused,
        });
    }

    let fresh: Vec<RunRecord> = pending
        .par_iter()
        .map(|key| run_cell(cfg, &train_pool, &test, key))
        .collect();

    let mut rows = reused;
    rows.extend(fresh);
    rows.sort_by(|a, b| {
        let ka = (a.status == STATUS_BASELINE, a.budget_db, a.composition_dc, a.seed);
        let kb = (b.status == STATUS_BASELINE, b.budget_db, b.composition_dc, b.seed);
        ka.0.cmp(&kb.0)
            .then(ka.1.total_cmp(&kb.1))
            .then(ka.2.total_cmp(&kb.2))
            .then(ka.3.cmp(&kb.3))
    });
    let n_failed = rows.iter().filter(|r| r.status.starts_with("error:")).count();
    write_results(&results_path, &rows)?;
    Ok(SweepOutcome {
        results_path,
        n_rows: rows.len(),
        n_failed,
        n_reused,
    })
}

/// Writes rows atomically: the payload lands in `<path>.tmp` and is renamed
/// into place, so a crash never leaves a half-written results file.
pub fn write_results(path: &Path, rows: &[RunRecord]) -> Result<()> {
    let mut body = String::with_capacity(64 * (rows.len() + 1));
    body.push_str(RESULTS_HEADER);
    body.push('\n');
    for r in rows {
        body.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.budget_db,
            r.composition_dc,
            r.mode,
            r.seed,
            r.n_low,
            r.n_high,
            r.total_cost,
            r.mse_u,
            r.mse_tau,
            r.epochs_run,
            r.status
        ));
    }
    let tmp = path.with_extension("csv.tmp");
    fs::write(&tmp, body)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<RunRecord>> {
    let text = fs::read_to_string(path)?;
    parse_results(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_results(text: &str) -> Result<Vec<RunRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == RESULTS_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "line 1: expected results header, got {:?}",
                other.map(|(_, l)| l)
            )))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let cols: Vec<&str> = line.splitn(11, ',').collect();
        if cols.len() != 11 {
            return Err(Error::Parse(format!(
                "line {lineno}: expected 11 columns, got {}",
                cols.len()
            )));
        }
        let fval = |i: usize, what: &str| -> Result<f64> {
            cols[i]
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("line {lineno}: bad {what} {:?}", cols[i])))
        };
        let ival = |i: usize, what: &str| -> Result<u64> {
            cols[i]
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("line {lineno}: bad {what} {:?}", cols[i])))
        };
        rows.push(RunRecord {
            budget_db: fval(0, "budget_db")?,
            composition_dc: fval(1, "composition_dc")?,
            mode: cols[2]
                .parse()
                .map_err(|_| Error::Parse(format!("line {lineno}: bad mode {:?}", cols[2])))?,
            seed: ival(3, "seed")?,
            n_low: ival(4, "n_low")? as usize,
            n_high: ival(5, "n_high")? as usize,
            total_cost: fval(6, "total_cost")?,
            mse_u: fval(7, "mse_u")?,
            mse_tau: fval(8, "mse_tau")?,
            epochs_run: ival(9, "epochs_run")? as usize,
            status: cols[10].to_string(),
        });
    }
    Ok(rows)
}
