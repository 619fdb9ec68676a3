//! Post-hoc analysis of a sweep results file: aggregate cells, scaling
//! fits, and transfer verdicts, written as CSVs plus a plain-text summary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use mfscale_core::scaling::{
    aggregate_runs, fit_power_law, optimal_composition, transfer_verdicts, AggregateCell, Field,
    RunRecord, ScalingFit,
};
use mfscale_core::Error as CoreError;

/// Scaling fits are computed twice per field: once following the pure
/// high-fidelity policy (dc = 1.0 cells) and once following the
/// per-budget optimal composition.
const POLICIES: [&str; 2] = ["pure_high", "optimal"];

pub fn emit_analysis(rows: &[RunRecord], dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let cells = aggregate_runs(rows);
    if cells.is_empty() {
        return Err(CoreError::Parse("no aggregatable rows in results".into()).into());
    }
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let mut agg = String::from(
        "budget_db,composition_dc,mean_mse_u,std_mse_u,mean_mse_tau,std_mse_tau,n_seeds\n",
    );
    for c in &cells {
        writeln!(
            agg,
            "{},{},{},{},{},{},{}",
            c.budget_db,
            c.composition_dc,
            c.mean_mse_u,
            c.std_mse_u,
            c.mean_mse_tau,
            c.std_mse_tau,
            c.n_seeds
        )?;
    }
    written.push(write_file(dir.join("aggregates.csv"), &agg)?);

    let mut fits = String::from("field,policy,a,alpha,l_inf,residual,fit_ok,warning\n");
    let mut fit_table = Vec::new();
    for field in Field::ALL {
        for policy in POLICIES {
            let pts = policy_points(&cells, field, policy)?;
            let fit = fit_power_law(&pts);
            writeln!(
                fits,
                "{},{},{},{},{},{},{},{}",
                field.tag(),
                policy,
                fit.a,
                fit.alpha,
                fit.l_inf,
                fit.residual,
                fit.fit_ok,
                fit.warning.as_deref().unwrap_or("").replace(',', ";"),
            )?;
            fit_table.push((field, policy, pts, fit));
        }
    }
    written.push(write_file(dir.join("fits.csv"), &fits)?);

    let verdicts = transfer_verdicts(&cells);
    let mut vcsv = String::from("field,budget_db,positive_transfer,best_dc,best_mean\n");
    for v in &verdicts {
        writeln!(
            vcsv,
            "{},{},{},{},{}",
            v.field, v.budget_db, v.positive_transfer, v.best_dc, v.best_mean
        )?;
    }
    written.push(write_file(dir.join("verdicts.csv"), &vcsv)?);

    written.push(write_file(
        dir.join("summary.txt"),
        &summary(rows, &cells, &fit_table, &verdicts)?,
    )?);
    Ok(written)
}

fn policy_points(
    cells: &[AggregateCell],
    field: Field,
    policy: &str,
) -> anyhow::Result<Vec<(f64, f64)>> {
    let mut budgets: Vec<f64> = cells.iter().map(|c| c.budget_db).collect();
    budgets.dedup_by(|a, b| a == b);
    let mut pts = Vec::new();
    for b in budgets {
        let per_budget: Vec<AggregateCell> = cells
            .iter()
            .filter(|c| c.budget_db == b)
            .cloned()
            .collect();
        match policy {
            "pure_high" => {
                if let Some(c) = per_budget
                    .iter()
                    .find(|c| (c.composition_dc - 1.0).abs() < 1e-12)
                {
                    pts.push((b, c.mean(field)));
                }
            }
            "optimal" => {
                let (_, best_mean) = optimal_composition(&per_budget, b, field)?;
                pts.push((b, best_mean));
            }
            other => unreachable!("unknown policy {other}"),
        }
    }
    Ok(pts)
}

fn summary(
    rows: &[RunRecord],
    cells: &[AggregateCell],
    fits: &[(Field, &str, Vec<(f64, f64)>, ScalingFit)],
    verdicts: &[mfscale_core::scaling::TransferVerdict],
) -> anyhow::Result<String> {
    let mut s = String::new();
    let failed = rows.iter().filter(|r| r.status.starts_with("error")).count();
    writeln!(
        s,
        "{} result rows ({} failed), {} aggregate cells",
        rows.len(),
        failed,
        cells.len()
    )?;

    let mut budgets: Vec<f64> = cells.iter().map(|c| c.budget_db).collect();
    budgets.dedup_by(|a, b| a == b);
    writeln!(s, "\nOptimal composition per budget:")?;
    for &b in &budgets {
        let per_budget: Vec<AggregateCell> = cells
            .iter()
            .filter(|c| c.budget_db == b)
            .cloned()
            .collect();
        for field in Field::ALL {
            let (dc, mean) = optimal_composition(&per_budget, b, field)?;
            writeln!(s, "  D_b {b:>12.1}  {:>3}: best D_c {dc:.2} (mean MSE {mean:.4e})", field.tag())?;
        }
    }

    writeln!(s, "\nScaling fits L(D_b) = a * D_b^-alpha + l_inf:")?;
    for (field, policy, pts, fit) in fits {
        if fit.fit_ok {
            writeln!(
                s,
                "  {:>3} [{policy}]: a {:.4e}  alpha {:.4}  l_inf {:.4e}  residual {:.3e}{}",
                field.tag(),
                fit.a,
                fit.alpha,
                fit.l_inf,
                fit.residual,
                fit.warning
                    .as_deref()
                    .map(|w| format!("  ({w})"))
                    .unwrap_or_default(),
            )?;
        } else {
            writeln!(
                s,
                "  {:>3} [{policy}]: no fit over {} budget(s){}",
                field.tag(),
                pts.len(),
                fit.warning
                    .as_deref()
                    .map(|w| format!(" ({w})"))
                    .unwrap_or_default(),
            )?;
        }
    }

    writeln!(s, "\nTransfer verdicts (low- to high-fidelity):")?;
    for v in verdicts {
        writeln!(
            s,
            "  D_b {:>12.1}  {:>3}: positive transfer {}  best D_c {:.2}",
            v.budget_db, v.field, v.positive_transfer, v.best_dc
        )?;
    }
    Ok(s)
}

fn write_file(path: PathBuf, body: &str) -> anyhow::Result<PathBuf> {
    fs::write(&path, body)?;
    Ok(path)
}
