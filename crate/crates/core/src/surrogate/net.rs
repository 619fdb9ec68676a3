//! Dense feed-forward network in f64 with hand-rolled reverse-mode
//! gradients. Hidden layers share one activation; the output layer is
//! linear. Parameters flatten to a single vector in [W0, b0, W1, b1, ...]
//! order with row-major weights, the layout the optimizer, the gradient
//! check, and the serializer all share.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    /// Smooth GELU-style gate: x * sigmoid(1.702 x).
    Gelu,
    Relu,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Gelu => {
                let s = sigmoid(1.702 * x);
                x * s
            }
            Activation::Relu => x.max(0.0),
        }
    }

    fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Gelu => {
                let s = sigmoid(1.702 * x);
                s + x * s * (1.0 - s) * 1.702
            }
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Architecture request shared by both surrogate heads: hidden widths only,
/// input and output dimensions are fixed by the head that instantiates it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub hidden_widths: Vec<usize>,
    pub activation: Activation,
    pub seed: u64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            hidden_widths: vec![64, 64],
            activation: Activation::Gelu,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub widths: Vec<usize>,
    pub activation: Activation,
    /// weights[l] is widths[l+1] x widths[l], row-major.
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

impl Mlp {
    /// Xavier-uniform initialization, biases zero, deterministic in `seed`.
    pub fn new(
        input_dim: usize,
        output_dim: usize,
        hidden: &[usize],
        activation: Activation,
        seed: u64,
    ) -> Result<Self> {
        let mut widths = Vec::with_capacity(hidden.len() + 2);
        widths.push(input_dim);
        widths.extend_from_slice(hidden);
        widths.push(output_dim);
        if widths.iter().any(|&w| w == 0) {
            return Err(Error::Config(format!("zero-width layer in {widths:?}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..widths.len() - 1 {
            let (fan_in, fan_out) = (widths[l], widths[l + 1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let w: Vec<f64> = (0..fan_in * fan_out)
                .map(|_| rng.random_range(-limit..limit))
                .collect();
            weights.push(w);
            biases.push(vec![0.0; fan_out]);
        }
        Ok(Mlp { widths, activation, weights, biases })
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().unwrap()
    }

    pub fn n_params(&self) -> usize {
        self.widths
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }

    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::Contract(format!(
                "expected {} parameters, got {}",
                self.n_params(),
                params.len()
            )));
        }
        let mut at = 0;
        for (w, b) in self.weights.iter_mut().zip(&mut self.biases) {
            let nw = w.len();
            w.copy_from_slice(&params[at..at + nw]);
            at += nw;
            let nb = b.len();
            b.copy_from_slice(&params[at..at + nb]);
            at += nb;
        }
        Ok(())
    }

    /// Single-row forward pass.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::Contract(format!(
                "input has {} features, net expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        let n_layers = self.weights.len();
        let mut a = x.to_vec();
        for l in 0..n_layers {
            let (n_out, n_in) = (self.widths[l + 1], self.widths[l]);
            let mut z = self.biases[l].clone();
            for (i, zi) in z.iter_mut().enumerate() {
                let row = &self.weights[l][i * n_in..(i + 1) * n_in];
                *zi += row.iter().zip(&a).map(|(w, ai)| w * ai).sum::<f64>();
            }
            if l + 1 < n_layers {
                for zi in z.iter_mut() {
                    *zi = self.activation.apply(*zi);
                }
            }
            debug_assert_eq!(z.len(), n_out);
            a = z;
        }
        Ok(a)
    }

    /// MSE over a flat row-major batch: `xs` is batch x input_dim, `ys` is
    /// batch x output_dim. The mean runs over batch * output_dim entries.
    pub fn mse(&self, xs: &[f64], ys: &[f64], batch: usize) -> Result<f64> {
        self.check_batch(xs, ys, batch)?;
        let (d_in, d_out) = (self.input_dim(), self.output_dim());
        let mut sse = 0.0;
        for r in 0..batch {
            let pred = self.forward(&xs[r * d_in..(r + 1) * d_in])?;
            for (p, y) in pred.iter().zip(&ys[r * d_out..(r + 1) * d_out]) {
                sse += (p - y) * (p - y);
            }
        }
        Ok(sse / (batch * d_out) as f64)
    }

    fn check_batch(&self, xs: &[f64], ys: &[f64], batch: usize) -> Result<()> {
        if batch == 0 || xs.len() != batch * self.input_dim() || ys.len() != batch * self.output_dim()
        {
            return Err(Error::Contract(format!(
                "batch of {batch} rows does not match {} inputs / {} targets",
                xs.len(),
                ys.len()
            )));
        }
        Ok(())
    }

    /// Batch MSE plus its gradient in the flat parameter layout.
    pub fn loss_and_grad(&self, xs: &[f64], ys: &[f64], batch: usize) -> Result<(f64, Vec<f64>)> {
        self.check_batch(xs, ys, batch)?;
        let n_layers = self.weights.len();
        let (d_in, d_out) = (self.input_dim(), self.output_dim());
        let mut grad_w: Vec<Vec<f64>> =
            self.weights.iter().map(|w| vec![0.0; w.len()]).collect();
        let mut grad_b: Vec<Vec<f64>> = self.biases.iter().map(|b| vec![0.0; b.len()]).collect();
        let mut loss = 0.0;
        let scale = 2.0 / (batch * d_out) as f64;

        // per-row forward caches
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(n_layers + 1);
        let mut pre: Vec<Vec<f64>> = Vec::with_capacity(n_layers);
        for r in 0..batch {
            acts.clear();
            pre.clear();
            acts.push(xs[r * d_in..(r + 1) * d_in].to_vec());
            for l in 0..n_layers {
                let n_in = self.widths[l];
                let mut z = self.biases[l].clone();
                for (i, zi) in z.iter_mut().enumerate() {
                    let row = &self.weights[l][i * n_in..(i + 1) * n_in];
                    *zi += row.iter().zip(&acts[l]).map(|(w, a)| w * a).sum::<f64>();
                }
                pre.push(z.clone());
                if l + 1 < n_layers {
                    for zi in z.iter_mut() {
                        *zi = self.activation.apply(*zi);
                    }
                }
                acts.push(z);
            }

            let y = &ys[r * d_out..(r + 1) * d_out];
            let out = &acts[n_layers];
            let mut delta: Vec<f64> = out
                .iter()
                .zip(y)
                .map(|(p, t)| {
                    loss += (p - t) * (p - t);
                    scale * (p - t)
                })
                .collect();
            for l in (0..n_layers).rev() {
                let n_in = self.widths[l];
                for (i, &d) in delta.iter().enumerate() {
                    grad_b[l][i] += d;
                    let row = &mut grad_w[l][i * n_in..(i + 1) * n_in];
                    for (g, a) in row.iter_mut().zip(&acts[l]) {
                        *g += d * a;
                    }
                }
                if l > 0 {
                    let mut prev = vec![0.0; n_in];
                    for (i, &d) in delta.iter().enumerate() {
                        let row = &self.weights[l][i * n_in..(i + 1) * n_in];
                        for (p, w) in prev.iter_mut().zip(row) {
                            *p += d * w;
                        }
                    }
                    for (p, z) in prev.iter_mut().zip(&pre[l - 1]) {
                        *p *= self.activation.derivative(*z);
                    }
                    delta = prev;
                }
            }
        }

        let mut flat = Vec::with_capacity(self.n_params());
        for (w, b) in grad_w.iter().zip(&grad_b) {
            flat.extend_from_slice(w);
            flat.extend_from_slice(b);
        }
        Ok((loss / (batch * d_out) as f64, flat))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    /// Deliberately independent forward pass used as an oracle: dense loops
    /// over explicit index arithmetic, no shared helpers.
    fn oracle_forward(net: &Mlp, x: &[f64]) -> Vec<f64> {
        let params = net.params();
        let mut offset = 0usize;
        let mut a: Vec<f64> = x.to_vec();
        for l in 0..net.widths.len() - 1 {
            let (n_in, n_out) = (net.widths[l], net.widths[l + 1]);
            let w = &params[offset..offset + n_in * n_out];
            offset += n_in * n_out;
            let b = &params[offset..offset + n_out];
            offset += n_out;
            let mut next = vec![0.0; n_out];
            for o in 0..n_out {
                let mut acc = b[o];
                for i in 0..n_in {
                    acc += w[o * n_in + i] * a[i];
                }
                next[o] = if l + 2 < net.widths.len() {
                    net.activation.apply(acc)
                } else {
                    acc
                };
            }
            a = next;
        }
        a
    }

    #[test]
    fn forward_matches_independent_matmul() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..10 {
            let net = Mlp::new(3, 2, &[7, 5], Activation::Gelu, trial).unwrap();
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let ours = net.forward(&x).unwrap();
            let oracle = oracle_forward(&net, &x);
            for (a, b) in ours.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn single_linear_neuron_gradient_closed_form() {
        let mut net = Mlp::new(1, 1, &[], Activation::Relu, 0).unwrap();
        net.set_params(&[0.7, -0.2]).unwrap(); // w, b
        let (x, y) = (1.3, 2.0);
        let (loss, grad) = net.loss_and_grad(&[x], &[y], 1).unwrap();
        let resid = 0.7 * x - 0.2 - y;
        assert!((loss - resid * resid).abs() < 1e-14);
        assert!((grad[0] - 2.0 * resid * x).abs() < 1e-14);
        assert!((grad[1] - 2.0 * resid).abs() < 1e-14);
    }

    fn finite_difference_check(net: &mut Mlp, xs: &[f64], ys: &[f64], batch: usize) {
        let (_, grad) = net.loss_and_grad(xs, ys, batch).unwrap();
        let theta = net.params();
        let h = 1e-5;
        for k in 0..theta.len() {
            let mut plus = theta.clone();
            plus[k] += h;
            net.set_params(&plus).unwrap();
            let lp = net.mse(xs, ys, batch).unwrap();
            let mut minus = theta.clone();
            minus[k] -= h;
            net.set_params(&minus).unwrap();
            let lm = net.mse(xs, ys, batch).unwrap();
            let fd = (lp - lm) / (2.0 * h);
            let analytic = grad[k];
            if fd.abs() < 1e-8 && analytic.abs() < 1e-8 {
                continue;
            }
            let rel = (fd - analytic).abs() / fd.abs().max(analytic.abs());
            assert!(
                rel < 1e-5,
                "param {k}: analytic {analytic} vs fd {fd} (rel {rel})"
            );
        }
        net.set_params(&theta).unwrap();
    }

    #[test]
    fn gradients_match_finite_differences_across_configs() {
        let shapes: [&[usize]; 5] = [&[4], &[6], &[5, 4], &[8, 8], &[3, 5, 3]];
        let mut config = 0u64;
        for &hidden in &shapes {
            for activation in [Activation::Gelu, Activation::Relu] {
                for &(d_in, batch) in &[(2usize, 3usize), (3, 5)] {
                    let mut rng = ChaCha8Rng::seed_from_u64(1000 + config);
                    let mut net = Mlp::new(d_in, 1, hidden, activation, config).unwrap();
                    // check at a generic point: fresh zero biases can park a
                    // ReLU preactivation exactly on the kink, where the
                    // one-sided derivative and the FD probe rightly disagree
                    let theta: Vec<f64> = (0..net.n_params())
                        .map(|_| rng.random_range(-0.6..0.6))
                        .collect();
                    net.set_params(&theta).unwrap();
                    let xs: Vec<f64> = (0..batch * d_in)
                        .map(|_| rng.random_range(-1.5..1.5))
                        .collect();
                    let ys: Vec<f64> = (0..batch).map(|_| rng.random_range(-1.0..1.0)).collect();
                    finite_difference_check(&mut net, &xs, &ys, batch);
                    config += 1;
                }
            }
        }
        assert_eq!(config, 20, "gradient check must cover 20 configurations");
    }

    #[test]
    fn param_roundtrip_and_count() {
        let net = Mlp::new(3, 1, &[64, 64], Activation::Gelu, 9).unwrap();
        assert_eq!(net.n_params(), 3 * 64 + 64 + 64 * 64 + 64 + 64 + 1);
        let p = net.params();
        assert_eq!(p.len(), net.n_params());
        let mut other = Mlp::new(3, 1, &[64, 64], Activation::Gelu, 10).unwrap();
        other.set_params(&p).unwrap();
        assert_eq!(other.params(), p);
    }

    #[test]
    fn init_deterministic_in_seed() {
        let a = Mlp::new(2, 1, &[16], Activation::Relu, 7).unwrap();
        let b = Mlp::new(2, 1, &[16], Activation::Relu, 7).unwrap();
        let c = Mlp::new(2, 1, &[16], Activation::Relu, 8).unwrap();
        assert_eq!(a.params(), b.params());
        assert_ne!(a.params(), c.params());
    }

    #[test]
    fn rejects_shape_misuse() {
        assert!(Mlp::new(3, 1, &[0], Activation::Relu, 0).is_err());
        let net = Mlp::new(3, 1, &[4], Activation::Relu, 0).unwrap();
        assert!(net.forward(&[1.0, 2.0]).is_err());
        let mut net = net;
        assert!(net.set_params(&[0.0; 3]).is_err());
    }
}
