//! Cross-mesh interpolation and the error measures used throughout:
//! nMAE for quantifying the fidelity gap and normalized MSE for scoring
//! surrogate predictions against held-out high-fidelity solutions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::SamplePool;

/// Mean/standard deviation pair used for z-scoring a single quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormStat {
    pub mean: f64,
    pub std: f64,
}

impl NormStat {
    /// Population statistics. A spread below 1e-12 is flattened to std = 1
    /// so constant features pass through unscaled.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len().max(1) as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        NormStat { mean, std: if std < 1e-12 { 1.0 } else { std } }
    }

    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.mean) / self.std
    }

    pub fn denormalize(&self, z: f64) -> f64 {
        z * self.std + self.mean
    }
}

/// Maps `source_field` sampled at `source_mesh` onto `target_mesh` by
/// nearest neighbor. Equidistant targets resolve to the lower source index,
/// so values never leave the source range and no new extrema appear.
pub fn nearest_neighbor_interpolate(
    source_mesh: &[f64],
    source_field: &[f64],
    target_mesh: &[f64],
) -> Result<Vec<f64>> {
    if source_mesh.is_empty() || target_mesh.is_empty() {
        return Err(Error::Contract("interpolation meshes must be nonempty".into()));
    }
    if source_mesh.len() != source_field.len() {
        return Err(Error::Contract(format!(
            "source mesh has {} nodes but field has {} values",
            source_mesh.len(),
            source_field.len()
        )));
    }
    if source_mesh.iter().chain(target_mesh).any(|y| !y.is_finite()) {
        return Err(Error::Contract("interpolation coordinates must be finite".into()));
    }
    let out = target_mesh
        .iter()
        .map(|&t| {
            let mut best = 0usize;
            let mut best_d = (source_mesh[0] - t).abs();
            for (i, &s) in source_mesh.iter().enumerate().skip(1) {
                let d = (s - t).abs();
                if d < best_d {
                    best = i;
                    best_d = d;
                }
            }
            source_field[best]
        })
        .collect();
    Ok(out)
}

/// Normalized mean absolute error: sum |lf - hf| / sum |hf|. The inputs are
/// assumed already aligned on a common mesh.
pub fn nmae(lf: &[f64], hf: &[f64]) -> Result<f64> {
    if lf.len() != hf.len() || lf.is_empty() {
        return Err(Error::Contract(format!(
            "nmae needs equal nonempty lengths, got {} and {}",
            lf.len(),
            hf.len()
        )));
    }
    let denom: f64 = hf.iter().map(|v| v.abs()).sum();
    if denom <= 0.0 || !denom.is_finite() {
        return Err(Error::DegenerateDenominator(format!(
            "sum |reference| = {denom}"
        )));
    }
    let num: f64 = lf.iter().zip(hf).map(|(a, b)| (a - b).abs()).sum();
    Ok(num / denom)
}

/// Mean squared error in z-space: both arrays are transformed with the same
/// stats (the training normalization) before differencing.
pub fn normalized_mse(pred: &[f64], reference: &[f64], stat: &NormStat) -> Result<f64> {
    if pred.len() != reference.len() || pred.is_empty() {
        return Err(Error::Contract(format!(
            "normalized_mse needs equal nonempty lengths, got {} and {}",
            pred.len(),
            reference.len()
        )));
    }
    let n = pred.len() as f64;
    let sse: f64 = pred
        .iter()
        .zip(reference)
        .map(|(p, r)| (stat.normalize(*p) - stat.normalize(*r)).powi(2))
        .sum();
    Ok(sse / n)
}

/// Per-field surrogate test error averaged over held-out samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldErrorReport {
    pub mse_u: f64,
    pub mse_tau: f64,
    pub n_test_samples: usize,
}

/// Pool-level low-versus-high discrepancy, the engineered fidelity gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityGapReport {
    pub nmae_u: f64,
    pub nmae_tau: f64,
    pub n_pairs: usize,
    /// Pairs dropped because a denominator degenerated; nonzero values are
    /// surfaced rather than silently averaged over.
    pub skipped_degenerate: usize,
}

/// Gap over the whole pool: per pair, the low-fidelity velocity is mapped
/// onto the high-fidelity mesh by nearest neighbor before nMAE.
pub fn fidelity_gap_report(pool: &SamplePool) -> Result<FidelityGapReport> {
    let ids: Vec<u32> = pool.pairs.iter().map(|p| p.case.case_id).collect();
    fidelity_gap_report_on(pool, &ids)
}

/// Same report restricted to a subset of case ids.
pub fn fidelity_gap_report_on(pool: &SamplePool, case_ids: &[u32]) -> Result<FidelityGapReport> {
    let mut sum_u = 0.0;
    let mut sum_tau = 0.0;
    let mut n = 0usize;
    let mut skipped = 0usize;
    for &id in case_ids {
        let pair = pool.pair(id).ok_or_else(|| {
            Error::Contract(format!("case {id} not present in pool"))
        })?;
        let mapped = nearest_neighbor_interpolate(
            &pair.low.mesh.node_y,
            &pair.low.u,
            &pair.high.mesh.node_y,
        )?;
        let gu = nmae(&mapped, &pair.high.u);
        let gt = nmae(&[pair.low.tau_w], &[pair.high.tau_w]);
        match (gu, gt) {
            (Ok(gu), Ok(gt)) => {
                sum_u += gu;
                sum_tau += gt;
                n += 1;
            }
            _ => skipped += 1,
        }
    }
    if n == 0 {
        return Err(Error::DegenerateDenominator(
            "every pair in the gap report degenerated".into(),
        ));
    }
    Ok(FidelityGapReport {
        nmae_u: sum_u / n as f64,
        nmae_tau: sum_tau / n as f64,
        n_pairs: n,
        skipped_degenerate: skipped,
    })
}
