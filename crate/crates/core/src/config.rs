//! Experiment configuration: a single TOML document covering pool
//! generation, sweep geometry, and trainer settings. Every field has a
//! default, so an empty document is a valid full-scale experiment.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::compose::CompositionMode;
use crate::error::{Error, Result};
use crate::surrogate::{NetworkConfig, TrainConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoolConfig {
    pub n_cases: usize,
    pub seed: u64,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig { n_cases: 611, seed: 7 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    /// Absolute budgets in work units. When set, `budget_fractions` is
    /// ignored.
    pub budgets: Option<Vec<f64>>,
    /// Budgets as fractions of the training pool's total high-fidelity
    /// cost.
    pub budget_fractions: Vec<f64>,
    pub compositions: Vec<f64>,
    pub seeds: Vec<u64>,
    pub mode: CompositionMode,
    /// Held-out pairs: the highest case ids of the pool.
    pub test_pairs: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            budgets: None,
            budget_fractions: vec![0.1, 0.3, 0.6],
            compositions: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            seeds: vec![0, 1, 2, 3],
            mode: CompositionMode::BudgetShare,
            test_pairs: 120,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FullConfig {
    pub pool: PoolConfig,
    pub sweep: SweepSettings,
    pub train: TrainConfig,
    pub network: NetworkConfig,
}

impl FullConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: FullConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pool.n_cases < 2 {
            return Err(Error::Config(format!(
                "pool.n_cases must be at least 2, got {}",
                self.pool.n_cases
            )));
        }
        let check_ascending = |vals: &[f64], what: &str| -> Result<()> {
            if vals.is_empty() {
                return Err(Error::Config(format!("{what} must be nonempty")));
            }
            if vals.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config(format!(
                    "{what} must be strictly ascending, got {vals:?}"
                )));
            }
            Ok(())
        };
        match &self.sweep.budgets {
            Some(b) => {
                check_ascending(b, "sweep.budgets")?;
                if b.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
                    return Err(Error::Config(format!(
                        "sweep.budgets must be positive, got {b:?}"
                    )));
                }
            }
            None => {
                check_ascending(&self.sweep.budget_fractions, "sweep.budget_fractions")?;
                if self
                    .sweep
                    .budget_fractions
                    .iter()
                    .any(|&v| v <= 0.0 || v > 1.0)
                {
                    return Err(Error::Config(format!(
                        "sweep.budget_fractions must lie in (0, 1], got {:?}",
                        self.sweep.budget_fractions
                    )));
                }
            }
        }
        check_ascending(&self.sweep.compositions, "sweep.compositions")?;
        if self
            .sweep
            .compositions
            .iter()
            .any(|&v| !(0.0..=1.0).contains(&v))
        {
            return Err(Error::Config(format!(
                "sweep.compositions must lie in [0, 1], got {:?}",
                self.sweep.compositions
            )));
        }
        if self.sweep.seeds.is_empty() {
            return Err(Error::Config("sweep.seeds must be nonempty".into()));
        }
        let mut seeds = self.sweep.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() != self.sweep.seeds.len() {
            return Err(Error::Config(format!(
                "sweep.seeds must be distinct, got {:?}",
                self.sweep.seeds
            )));
        }
        if self.sweep.test_pairs == 0 {
            return Err(Error::Config("sweep.test_pairs must be positive".into()));
        }
        if self.pool.n_cases < self.sweep.test_pairs + 2 {
            return Err(Error::Config(format!(
                "pool.n_cases = {} leaves fewer than 2 training pairs after holding out {}",
                self.pool.n_cases, self.sweep.test_pairs
            )));
        }
        self.train.validate()?;
        if self.network.hidden_widths.iter().any(|&w| w == 0) {
            return Err(Error::Config(format!(
                "network.hidden_widths must be positive, got {:?}",
                self.network.hidden_widths
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_default_experiment() {
        let cfg = FullConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, FullConfig::default());
        assert_eq!(cfg.pool.n_cases, 611);
        assert_eq!(cfg.sweep.test_pairs, 120);
        assert_eq!(cfg.sweep.seeds, vec![0, 1, 2, 3]);
        assert_eq!(cfg.train.epochs, 500);
        assert_eq!(cfg.network.hidden_widths, vec![64, 64]);
    }

    #[test]
    fn partial_overrides_merge_with_defaults() {
        let cfg = FullConfig::from_toml_str(
            r#"
            [pool]
            n_cases = 64
            seed = 5

            [sweep]
            budget_fractions = [0.2, 0.5]
            seeds = [0, 1]
            test_pairs = 16

            [train]
            epochs = 40
            warmup_epochs = 4
            "#,
        )
        .unwrap();
        assert_eq!(cfg.pool.n_cases, 64);
        assert_eq!(cfg.sweep.budget_fractions, vec![0.2, 0.5]);
        assert_eq!(cfg.train.epochs, 40);
        assert_eq!(cfg.train.peak_lr, 5e-4, "untouched fields keep defaults");
        assert_eq!(cfg.sweep.compositions, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(FullConfig::from_toml_str("pool = 3").is_err());
        assert!(FullConfig::from_toml_str("[pool]\nn_cases = -1").is_err());
        assert!(FullConfig::from_toml_str("[sweep]\nunknown_field = 1").is_err());
    }

    #[test]
    fn rejects_inconsistent_geometry() {
        let bad = [
            "[sweep]\nbudget_fractions = [0.5, 0.2]",
            "[sweep]\nbudget_fractions = [0.0, 0.5]",
            "[sweep]\ncompositions = [0.2, 0.2]",
            "[sweep]\ncompositions = [0.2, 1.4]",
            "[sweep]\nseeds = [1, 1]",
            "[sweep]\nseeds = []",
            "[sweep]\ntest_pairs = 0",
            "[pool]\nn_cases = 10\n[sweep]\ntest_pairs = 9",
            "[train]\nepochs = 5\nwarmup_epochs = 10",
            "[network]\nhidden_widths = [64, 0]",
        ];
        for doc in bad {
            assert!(FullConfig::from_toml_str(doc).is_err(), "accepted: {doc}");
        }
    }

    #[test]
    fn absolute_budgets_bypass_fraction_checks() {
        let cfg = FullConfig::from_toml_str(
            "[sweep]\nbudgets = [100.0, 300.0]\nbudget_fractions = [0.9]\n",
        )
        .unwrap();
        assert_eq!(cfg.sweep.budgets, Some(vec![100.0, 300.0]));
    }

    #[test]
    fn roundtrips_through_toml() {
        let cfg = FullConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back = FullConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
