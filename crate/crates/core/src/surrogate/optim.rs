//! AdamW with decoupled weight decay, global-norm gradient clipping, and
//! the warmup-plus-cosine learning-rate schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub early_stop_patience: usize,
    pub warmup_epochs: usize,
    pub peak_lr: f64,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub grad_clip_norm: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 500,
            early_stop_patience: 250,
            warmup_epochs: 10,
            peak_lr: 5e-4,
            weight_decay: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            grad_clip_norm: 1.0,
            batch_size: 256,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// epochs = 0 is allowed and means "return the initialization"; the
    /// warmup bound only binds once training actually runs.
    pub fn validate(&self) -> Result<()> {
        if self.epochs > 0 && self.warmup_epochs >= self.epochs {
            return Err(Error::Config(format!(
                "warmup_epochs {} must be below epochs {}",
                self.warmup_epochs, self.epochs
            )));
        }
        if !(self.peak_lr.is_finite() && self.peak_lr > 0.0) {
            return Err(Error::Config(format!("peak_lr must be positive, got {}", self.peak_lr)));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::Config(format!(
                "betas must lie in [0, 1), got ({}, {})",
                self.beta1, self.beta2
            )));
        }
        if self.weight_decay < 0.0 || !self.weight_decay.is_finite() {
            return Err(Error::Config(format!(
                "weight_decay must be nonnegative, got {}",
                self.weight_decay
            )));
        }
        if self.grad_clip_norm <= 0.0 {
            return Err(Error::Config(format!(
                "grad_clip_norm must be positive, got {}",
                self.grad_clip_norm
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be positive".into()));
        }
        Ok(())
    }
}

/// Linear warmup from zero over `warmup_epochs`, then cosine decay that
/// reaches zero exactly at `epochs`.
pub fn learning_rate(cfg: &TrainConfig, epoch: usize) -> f64 {
    if epoch < cfg.warmup_epochs {
        return cfg.peak_lr * epoch as f64 / cfg.warmup_epochs as f64;
    }
    let span = (cfg.epochs - cfg.warmup_epochs) as f64;
    let t = (epoch - cfg.warmup_epochs) as f64 / span;
    cfg.peak_lr * 0.5 * (1.0 + (std::f64::consts::PI * t).cos())
}

/// Scales `grads` in place so the global L2 norm does not exceed
/// `max_norm`; returns the pre-clip norm.
pub fn clip_grad_norm(grads: &mut [f64], max_norm: f64) -> f64 {
    let norm = grads.iter().map(|g| g * g).sum::<f64>().sqrt();
    if norm > max_norm {
        let s = max_norm / norm;
        for g in grads.iter_mut() {
            *g *= s;
        }
    }
    norm
}

const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct AdamW {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamW {
    pub fn new(n_params: usize) -> Self {
        AdamW { m: vec![0.0; n_params], v: vec![0.0; n_params], t: 0 }
    }

    /// One decoupled step: the decay term multiplies the raw parameter and
    /// the learning rate, never entering the moment estimates.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64, cfg: &TrainConfig) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grads.len(), self.m.len());
        self.t += 1;
        let bc1 = 1.0 - cfg.beta1.powi(self.t as i32);
        let bc2 = 1.0 - cfg.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = cfg.beta1 * self.m[i] + (1.0 - cfg.beta1) * g;
            self.v[i] = cfg.beta2 * self.v[i] + (1.0 - cfg.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= lr * (m_hat / (v_hat.sqrt() + ADAM_EPS) + cfg.weight_decay * params[i]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_exact_values() {
        let cfg = TrainConfig { epochs: 500, warmup_epochs: 10, peak_lr: 5e-4, ..Default::default() };
        assert_eq!(learning_rate(&cfg, 0), 0.0);
        assert_eq!(learning_rate(&cfg, 5), 5e-4 * 0.5);
        assert_eq!(learning_rate(&cfg, 10), 5e-4);
        // midpoint of the cosine span: (255 - 10) / 490 = 0.5
        let mid = learning_rate(&cfg, 255);
        assert!((mid - 2.5e-4).abs() < 1e-18);
        // one epoch before the end the rate is tiny but positive
        let tail = learning_rate(&cfg, 499);
        assert!(tail > 0.0 && tail < 1e-8);
    }

    #[test]
    fn schedule_monotone_through_warmup_then_decaying() {
        let cfg = TrainConfig { epochs: 60, warmup_epochs: 6, ..Default::default() };
        for e in 0..5 {
            assert!(learning_rate(&cfg, e) < learning_rate(&cfg, e + 1));
        }
        for e in 6..59 {
            assert!(learning_rate(&cfg, e) >= learning_rate(&cfg, e + 1));
        }
    }

    #[test]
    fn adamw_single_step_hand_computed() {
        let cfg = TrainConfig {
            beta1: 0.9,
            beta2: 0.999,
            weight_decay: 0.1,
            ..Default::default()
        };
        let mut opt = AdamW::new(1);
        let mut params = [1.0];
        opt.step(&mut params, &[0.5], 0.1, &cfg);
        // m = 0.05, v = 2.5e-4; m_hat = 0.5, v_hat = 0.25
        // update = 0.1 * (0.5 / (0.5 + 1e-8) + 0.1 * 1.0)
        let expected = 1.0 - 0.1 * (0.5 / (0.5 + ADAM_EPS) + 0.1);
        assert!((params[0] - expected).abs() < 1e-15, "{} vs {expected}", params[0]);
    }

    #[test]
    fn decay_is_decoupled_from_moments() {
        // with zero gradient the only motion is the decay term
        let cfg = TrainConfig { weight_decay: 0.5, ..Default::default() };
        let mut opt = AdamW::new(1);
        let mut params = [2.0];
        opt.step(&mut params, &[0.0], 0.1, &cfg);
        assert!((params[0] - (2.0 - 0.1 * 0.5 * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn clip_scales_only_above_threshold() {
        let mut g = [3.0, 4.0];
        let norm = clip_grad_norm(&mut g, 10.0);
        assert_eq!(norm, 5.0);
        assert_eq!(g, [3.0, 4.0]);
        let norm = clip_grad_norm(&mut g, 1.0);
        assert_eq!(norm, 5.0);
        assert!((g[0] - 0.6).abs() < 1e-15 && (g[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        assert!(TrainConfig { epochs: 0, ..Default::default() }.validate().is_ok());
        assert!(TrainConfig { epochs: 10, warmup_epochs: 10, ..Default::default() }
            .validate()
            .is_err());
        assert!(TrainConfig { peak_lr: 0.0, ..Default::default() }.validate().is_err());
        assert!(TrainConfig { batch_size: 0, ..Default::default() }.validate().is_err());
    }
}
