use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RE_DELTA_MIN: f64 = 1e4;
pub const RE_DELTA_MAX: f64 = 1e6;
pub const BETA_P_MIN: f64 = -0.2;
pub const BETA_P_MAX: f64 = 0.5;

/// Physical parameters of one simulation sample.
///
/// `re_delta` is the Reynolds number based on slice height and edge
/// velocity; `beta_p` is the dimensionless streamwise pressure-gradient
/// coefficient (positive = adverse). The admissible box keeps the analog
/// in the attached turbulent regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowCase {
    pub re_delta: f64,
    pub beta_p: f64,
    pub case_id: u32,
}

impl FlowCase {
    pub fn new(re_delta: f64, beta_p: f64, case_id: u32) -> Result<Self> {
        if !re_delta.is_finite() || !(RE_DELTA_MIN..=RE_DELTA_MAX).contains(&re_delta) {
            return Err(Error::Domain(format!(
                "re_delta = {re_delta} outside turbulent range [{RE_DELTA_MIN:e}, {RE_DELTA_MAX:e}]"
            )));
        }
        if !beta_p.is_finite() || !(BETA_P_MIN..=BETA_P_MAX).contains(&beta_p) {
            return Err(Error::Domain(format!(
                "beta_p = {beta_p} outside [{BETA_P_MIN}, {BETA_P_MAX}]"
            )));
        }
        Ok(Self { re_delta, beta_p, case_id })
    }
}

/// The two modeling fidelities; distinguished solely by wall treatment
/// and mesh resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FidelityLevel {
    Low,
    High,
}

impl FidelityLevel {
    pub const ALL: [FidelityLevel; 2] = [FidelityLevel::Low, FidelityLevel::High];

    /// Stable short tag used in file names and manifests.
    pub fn tag(self) -> &'static str {
        match self {
            FidelityLevel::Low => "low",
            FidelityLevel::High => "high",
        }
    }

    pub fn other(self) -> FidelityLevel {
        match self {
            FidelityLevel::Low => FidelityLevel::High,
            FidelityLevel::High => FidelityLevel::Low,
        }
    }
}

impl std::fmt::Display for FidelityLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}
