//! Aggregation of sweep runs into (budget, composition) cells, saturating
//! power-law fits L(D_b) = a * D_b^-alpha + L_inf over budget, and the
//! positive-transfer test comparing mixed compositions against pure
//! high fidelity.

use serde::{Deserialize, Serialize};

use crate::compose::CompositionMode;
use crate::error::{Error, Result};

/// One sweep cell result; mirrors a results.csv row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub budget_db: f64,
    pub composition_dc: f64,
    pub mode: CompositionMode,
    pub seed: u64,
    pub n_low: usize,
    pub n_high: usize,
    pub total_cost: f64,
    pub mse_u: f64,
    pub mse_tau: f64,
    pub epochs_run: usize,
    pub status: String,
}

/// Which surrogate output an analysis refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    U,
    Tau,
}

impl Field {
    pub const ALL: [Field; 2] = [Field::U, Field::Tau];

    pub fn tag(self) -> &'static str {
        match self {
            Field::U => "u",
            Field::Tau => "tau",
        }
    }
}

/// Seed statistics for one (budget, composition) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCell {
    pub budget_db: f64,
    pub composition_dc: f64,
    pub mean_mse_u: f64,
    pub std_mse_u: f64,
    pub mean_mse_tau: f64,
    pub std_mse_tau: f64,
    pub n_seeds: usize,
}

impl AggregateCell {
    pub fn mean(&self, field: Field) -> f64 {
        match field {
            Field::U => self.mean_mse_u,
            Field::Tau => self.mean_mse_tau,
        }
    }

    pub fn std(&self, field: Field) -> f64 {
        match field {
            Field::U => self.std_mse_u,
            Field::Tau => self.std_mse_tau,
        }
    }
}

fn population_stats(vals: &[f64]) -> (f64, f64) {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Groups `status == "ok"` rows by exact (budget, composition) value and
/// reduces over seeds with population statistics. Cells come back sorted by
/// budget then composition; input order never matters.
pub fn aggregate_runs(records: &[RunRecord]) -> Vec<AggregateCell> {
    let mut keys: Vec<(u64, u64)> = Vec::new();
    for r in records {
        if r.status != "ok" {
            continue;
        }
        let k = (r.budget_db.to_bits(), r.composition_dc.to_bits());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.sort_by(|a, b| {
        let (ba, ca) = (f64::from_bits(a.0), f64::from_bits(a.1));
        let (bb, cb) = (f64::from_bits(b.0), f64::from_bits(b.1));
        ba.total_cmp(&bb).then(ca.total_cmp(&cb))
    });
    keys.iter()
        .map(|&(bk, ck)| {
            let (mut us, mut taus) = (Vec::new(), Vec::new());
            for r in records {
                if r.status == "ok"
                    && r.budget_db.to_bits() == bk
                    && r.composition_dc.to_bits() == ck
                {
                    us.push(r.mse_u);
                    taus.push(r.mse_tau);
                }
            }
            let (mean_u, std_u) = population_stats(&us);
            let (mean_tau, std_tau) = population_stats(&taus);
            AggregateCell {
                budget_db: f64::from_bits(bk),
                composition_dc: f64::from_bits(ck),
                mean_mse_u: mean_u,
                std_mse_u: std_u,
                mean_mse_tau: mean_tau,
                std_mse_tau: std_tau,
                n_seeds: us.len(),
            }
        })
        .collect()
}

/// Saturating power-law fit result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub a: f64,
    pub alpha: f64,
    pub l_inf: f64,
    /// Sum of squared residuals at the returned parameters.
    pub residual: f64,
    pub fit_ok: bool,
    pub warning: Option<String>,
}

fn sse(points: &[(f64, f64)], a: f64, alpha: f64, l_inf: f64) -> f64 {
    points
        .iter()
        .map(|&(x, y)| {
            let r = a * x.powf(-alpha) + l_inf - y;
            r * r
        })
        .sum()
}

/// Closed-form least squares for (a, l_inf) at fixed alpha, solving the
/// 2x2 normal equations over the basis {x^-alpha, 1}.
fn linear_sub_fit(points: &[(f64, f64)], alpha: f64) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    let (mut s_bb, mut s_b, mut s_by, mut s_y) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let b = x.powf(-alpha);
        s_bb += b * b;
        s_b += b;
        s_by += b * y;
        s_y += y;
    }
    let det = s_bb * n - s_b * s_b;
    if det.abs() < 1e-300 {
        return None;
    }
    let a = (s_by * n - s_b * s_y) / det;
    let l_inf = (s_bb * s_y - s_b * s_by) / det;
    Some((a, l_inf))
}

const ALPHA_FLOOR: f64 = 1e-6;

fn clamp_params(a: f64, alpha: f64, l_inf: f64) -> (f64, f64, f64) {
    (a.max(1e-12), alpha.max(ALPHA_FLOOR), l_inf.max(0.0))
}

/// Levenberg-Marquardt refinement from a start, parameters clamped to the
/// admissible region (a > 0, alpha >= 1e-6, l_inf >= 0). `fix_l_inf` pins
/// the offset at zero for the pure power-law candidate.
fn lm_refine(points: &[(f64, f64)], start: (f64, f64, f64), fix_l_inf: bool) -> (f64, f64, f64, f64) {
    let (mut a, mut alpha, mut l_inf) = clamp_params(start.0, start.1, start.2);
    if fix_l_inf {
        l_inf = 0.0;
    }
    let mut best_sse = sse(points, a, alpha, l_inf);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        // residuals and 3-column Jacobian (a, alpha, l_inf)
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for &(x, y) in points {
            let b = x.powf(-alpha);
            let r = a * b + l_inf - y;
            let j = [b, -a * x.ln() * b, if fix_l_inf { 0.0 } else { 1.0 }];
            for p in 0..3 {
                jtr[p] += j[p] * r;
                for q in 0..3 {
                    jtj[p][q] += j[p] * j[q];
                }
            }
        }
        if fix_l_inf {
            jtj[2][2] = 1.0; // keep the system nonsingular; jtr[2] is 0
        }
        let mut m = jtj;
        for p in 0..3 {
            m[p][p] += lambda * jtj[p][p].max(1e-12);
        }
        let step = match solve3(&m, &jtr) {
            Some(s) => s,
            None => break,
        };
        let (na, nalpha, nl) = clamp_params(a - step[0], alpha - step[1], l_inf - step[2]);
        let nl = if fix_l_inf { 0.0 } else { nl };
        let new_sse = sse(points, na, nalpha, nl);
        if new_sse < best_sse {
            let gain = best_sse - new_sse;
            a = na;
            alpha = nalpha;
            l_inf = nl;
            best_sse = new_sse;
            lambda = (lambda * 0.3).max(1e-12);
            if gain < 1e-16 * (1.0 + best_sse) {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    (a, alpha, l_inf, best_sse)
}

fn solve3(m: &[[f64; 3]; 3], rhs: &[f64; 3]) -> Option<[f64; 3]> {
    let mut a = *m;
    let mut b = *rhs;
    for col in 0..3 {
        let mut piv = col;
        for r in col + 1..3 {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..3 {
            if r == col {
                continue;
            }
            let f = a[r][col] / a[col][col];
            for c in col..3 {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    Some([b[0] / a[0][0], b[1] / a[1][1], b[2] / a[2][2]])
}

/// Fits L(D_b) = a * D_b^-alpha + L_inf to (budget, loss) points by
/// multi-start damped Gauss-Newton. A pure power law (L_inf = 0) is always
/// among the candidates, so the returned residual never exceeds the best
/// pure power law's.
pub fn fit_power_law(points: &[(f64, f64)]) -> ScalingFit {
    let mut distinct: Vec<u64> = points.iter().map(|p| p.0.to_bits()).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        return ScalingFit {
            a: f64::NAN,
            alpha: f64::NAN,
            l_inf: f64::NAN,
            residual: f64::NAN,
            fit_ok: false,
            warning: Some(format!(
                "need at least 4 distinct budgets, got {}",
                distinct.len()
            )),
        };
    }
    if points.iter().any(|&(x, y)| !(x > 0.0) || !y.is_finite()) {
        return ScalingFit {
            a: f64::NAN,
            alpha: f64::NAN,
            l_inf: f64::NAN,
            residual: f64::NAN,
            fit_ok: false,
            warning: Some("budgets must be positive and losses finite".into()),
        };
    }

    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let y_spread = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let y_scale = ys.iter().map(|y| y.abs()).fold(0.0, f64::max).max(1e-300);
    if y_spread <= 1e-9 * y_scale {
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        return ScalingFit {
            a: 1e-12,
            alpha: ALPHA_FLOOR,
            l_inf: mean.max(0.0),
            residual: sse(points, 1e-12, ALPHA_FLOOR, mean.max(0.0)),
            fit_ok: true,
            warning: Some("losses are flat across budgets; returning a constant fit".into()),
        };
    }

    let mut starts: Vec<f64> = vec![
        ALPHA_FLOOR,
        0.05,
        0.1,
        0.2,
        0.35,
        0.5,
        0.75,
        1.0,
        1.5,
        2.0,
        3.0,
    ];
    // log-log slope over positive losses as an extra data-driven start
    if ys.iter().all(|&y| y > 0.0) {
        let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
        let n = logs.len() as f64;
        let sx: f64 = logs.iter().map(|p| p.0).sum();
        let sy: f64 = logs.iter().map(|p| p.1).sum();
        let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
        let det = n * sxx - sx * sx;
        if det.abs() > 1e-12 {
            let slope = (n * sxy - sx * sy) / det;
            if slope < -ALPHA_FLOOR {
                starts.push(-slope);
            }
        }
    }

    let mut best: Option<(f64, f64, f64, f64)> = None;
    let mut consider = |cand: (f64, f64, f64, f64)| {
        if best.map_or(true, |b| cand.3 < b.3) {
            best = Some(cand);
        }
    };
    for &alpha in &starts {
        if let Some((a, l_inf)) = linear_sub_fit(points, alpha) {
            let (a, alpha_c, l_inf) = clamp_params(a, alpha, l_inf);
            consider(lm_refine(points, (a, alpha_c, l_inf), false));
        }
        // pure power-law candidate at the same start
        let a0 = {
            let (mut num, mut den) = (0.0, 0.0);
            for &(x, y) in points {
                let b = x.powf(-alpha);
                num += b * y;
                den += b * b;
            }
            if den > 0.0 {
                num / den
            } else {
                1.0
            }
        };
        consider(lm_refine(points, (a0, alpha, 0.0), true));
    }
    let (a, alpha, l_inf, residual) = best.expect("start grid is nonempty");
    ScalingFit { a, alpha, l_inf, residual, fit_ok: true, warning: None }
}

/// Lowest-mean composition for one budget; exact ties resolve to the lower
/// composition fraction.
pub fn optimal_composition(
    cells: &[AggregateCell],
    budget_db: f64,
    field: Field,
) -> Result<(f64, f64)> {
    let mut at_budget: Vec<&AggregateCell> = cells
        .iter()
        .filter(|c| c.budget_db.to_bits() == budget_db.to_bits())
        .collect();
    if at_budget.is_empty() {
        return Err(Error::Contract(format!(
            "no aggregate cells at budget {budget_db}"
        )));
    }
    at_budget.sort_by(|a, b| {
        a.mean(field)
            .total_cmp(&b.mean(field))
            .then(a.composition_dc.total_cmp(&b.composition_dc))
    });
    Ok((at_budget[0].composition_dc, at_budget[0].mean(field)))
}

/// True when some mixed composition beats pure high fidelity by at least
/// one standard error of the pure-high cell at the same budget.
pub fn detect_positive_transfer(
    cells: &[AggregateCell],
    budget_db: f64,
    field: Field,
) -> Result<bool> {
    let baseline = cells
        .iter()
        .find(|c| c.budget_db.to_bits() == budget_db.to_bits() && c.composition_dc == 1.0)
        .ok_or_else(|| {
            Error::Contract(format!(
                "no pure high-fidelity cell at budget {budget_db} to compare against"
            ))
        })?;
    let margin = baseline.std(field) / (baseline.n_seeds.max(1) as f64).sqrt();
    Ok(cells.iter().any(|c| {
        c.budget_db.to_bits() == budget_db.to_bits()
            && c.composition_dc < 1.0
            && c.mean(field) < baseline.mean(field) - margin
    }))
}

/// Per-budget, per-field transfer summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferVerdict {
    pub field: String,
    pub budget_db: f64,
    pub positive_transfer: bool,
    pub best_dc: f64,
    pub best_mean: f64,
}

/// Builds verdicts for every budget that has a pure high-fidelity cell.
pub fn transfer_verdicts(cells: &[AggregateCell]) -> Vec<TransferVerdict> {
    let mut budgets: Vec<u64> = cells
        .iter()
        .filter(|c| c.composition_dc == 1.0)
        .map(|c| c.budget_db.to_bits())
        .collect();
    budgets.sort_by(|a, b| f64::from_bits(*a).total_cmp(&f64::from_bits(*b)));
    budgets.dedup();
    let mut out = Vec::new();
    for bk in budgets {
        let budget = f64::from_bits(bk);
        for field in Field::ALL {
            let (best_dc, best_mean) =
                optimal_composition(cells, budget, field).expect("budget has cells");
            let positive = detect_positive_transfer(cells, budget, field).expect("baseline exists");
            out.push(TransferVerdict {
                field: field.tag().to_string(),
                budget_db: budget,
                positive_transfer: positive,
                best_dc,
                best_mean,
            });
        }
    }
    out
}
