//! Training loop shared by the field and scalar heads, prediction on query
//! meshes, and the model file format.
//!
//! Inputs are (y, ln Re, beta_p) -> u for the field head and
//! (ln Re, beta_p) -> tau_w for the scalar head. Low- and high-fidelity
//! samples enter identically; the fidelity label never reaches the nets.
//! Everything is z-scored with statistics taken over the training
//! selection, and those statistics travel with the model.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::compose::Selection;
use crate::error::{Error, Result};
use crate::metrics::NormStat;
use crate::solver::{FidelityLevel, FieldSolution, FlowCase, SamplePool};

use super::net::{Activation, Mlp, NetworkConfig};
use super::optim::{clip_grad_norm, learning_rate, AdamW, TrainConfig};

/// Stream separator so the two heads never share an init stream.
const SCALAR_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;
/// Separator between the validation split draw and epoch shuffles.
const SPLIT_SEED_SALT: u64 = 0x517c_c1b7_2722_0a95;

pub const FIELD_INPUT_DIM: usize = 3;
pub const SCALAR_INPUT_DIM: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub field_in: [NormStat; FIELD_INPUT_DIM],
    pub field_out: NormStat,
    pub scalar_in: [NormStat; SCALAR_INPUT_DIM],
    pub scalar_out: NormStat,
    /// Observed training ranges per input, used to flag extrapolation.
    pub field_in_range: [(f64, f64); FIELD_INPUT_DIM],
    pub scalar_in_range: [(f64, f64); SCALAR_INPUT_DIM],
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub field_net: Mlp,
    pub scalar_net: Mlp,
    pub norm: Normalization,
    pub best_val_loss: f64,
    pub epochs_run: usize,
    /// Degenerate-data conditions hit during training, e.g. a constant
    /// input feature or a single-sample selection.
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub u: Vec<f64>,
    pub tau_w: f64,
    /// True when any query input leaves the training range.
    pub extrapolated: bool,
}

fn field_inputs(case: &FlowCase, y: f64) -> [f64; FIELD_INPUT_DIM] {
    [y, case.re_delta.ln(), case.beta_p]
}

fn scalar_inputs(case: &FlowCase) -> [f64; SCALAR_INPUT_DIM] {
    [case.re_delta.ln(), case.beta_p]
}

struct Dataset {
    /// flat rows, already z-scored
    xs: Vec<f64>,
    ys: Vec<f64>,
    rows: usize,
    dim: usize,
}

impl Dataset {
    fn row(&self, i: usize) -> (&[f64], &[f64]) {
        (&self.xs[i * self.dim..(i + 1) * self.dim], &self.ys[i..i + 1])
    }
}

fn stat_columns<const D: usize>(rows: &[[f64; D]]) -> ([NormStat; D], [(f64, f64); D], Vec<usize>) {
    let mut stats = [NormStat { mean: 0.0, std: 1.0 }; D];
    let mut ranges = [(f64::INFINITY, f64::NEG_INFINITY); D];
    let mut constant = Vec::new();
    for d in 0..D {
        let col: Vec<f64> = rows.iter().map(|r| r[d]).collect();
        stats[d] = NormStat::from_values(&col);
        if col.iter().all(|v| (v - col[0]).abs() <= 1e-12) {
            constant.push(d);
        }
        for v in col {
            ranges[d].0 = ranges[d].0.min(v);
            ranges[d].1 = ranges[d].1.max(v);
        }
    }
    (stats, ranges, constant)
}

fn gather<'p>(selection: &Selection, pool: &'p SamplePool) -> Result<Vec<&'p FieldSolution>> {
    if selection.is_empty() {
        return Err(Error::Contract("cannot train on an empty selection".into()));
    }
    let mut samples = Vec::with_capacity(selection.n_samples());
    for &(fidelity, ids) in &[
        (FidelityLevel::Low, &selection.low_ids),
        (FidelityLevel::High, &selection.high_ids),
    ] {
        for &id in ids {
            let pair = pool
                .pair(id)
                .ok_or_else(|| Error::Contract(format!("selection case {id} missing from pool")))?;
            samples.push(pair.solution(fidelity));
        }
    }
    Ok(samples)
}

/// Trains both heads on the selected samples. Deterministic given the two
/// config seeds; the optimizer state, shuffles, and early stopping all run
/// on seeded streams.
pub fn train(
    selection: &Selection,
    pool: &SamplePool,
    net_cfg: &NetworkConfig,
    train_cfg: &TrainConfig,
) -> Result<TrainedModel> {
    train_cfg.validate()?;
    let samples = gather(selection, pool)?;
    let mut flags = Vec::new();

    // sample-level validation split so whole profiles stay together
    let n = samples.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut split_rng = ChaCha8Rng::seed_from_u64(train_cfg.seed ^ SPLIT_SEED_SALT);
    order.shuffle(&mut split_rng);
    let n_val = (n / 10).max(1);
    let (val_idx, train_idx): (Vec<usize>, Vec<usize>) = if n == 1 {
        flags.push("single-sample selection: validation reuses the training sample".into());
        (vec![0], vec![0])
    } else {
        (order[..n_val].to_vec(), order[n_val..].to_vec())
    };

    // normalization statistics over the whole training selection
    let mut field_rows: Vec<[f64; FIELD_INPUT_DIM]> = Vec::new();
    let mut field_targets: Vec<f64> = Vec::new();
    let mut scalar_rows: Vec<[f64; SCALAR_INPUT_DIM]> = Vec::new();
    let mut scalar_targets: Vec<f64> = Vec::new();
    for s in &samples {
        for (y, u) in s.mesh.node_y.iter().zip(&s.u) {
            field_rows.push(field_inputs(&s.case, *y));
            field_targets.push(*u);
        }
        scalar_rows.push(scalar_inputs(&s.case));
        scalar_targets.push(s.tau_w);
    }
    let (field_in, field_in_range, const_f) = stat_columns(&field_rows);
    let (scalar_in, scalar_in_range, const_s) = stat_columns(&scalar_rows);
    let field_out = NormStat::from_values(&field_targets);
    let scalar_out = NormStat::from_values(&scalar_targets);
    for d in const_f {
        flags.push(format!("field input {d} is constant over the selection"));
    }
    for d in const_s {
        flags.push(format!("scalar input {d} is constant over the selection"));
    }
    let norm = Normalization {
        field_in,
        field_out,
        scalar_in,
        scalar_out,
        field_in_range,
        scalar_in_range,
    };

    let build = |idx: &[usize], field: bool| -> Dataset {
        let dim = if field { FIELD_INPUT_DIM } else { SCALAR_INPUT_DIM };
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut rows = 0usize;
        for &i in idx {
            let s = samples[i];
            if field {
                for (y, u) in s.mesh.node_y.iter().zip(&s.u) {
                    let raw = field_inputs(&s.case, *y);
                    for d in 0..dim {
                        xs.push(norm.field_in[d].normalize(raw[d]));
                    }
                    ys.push(norm.field_out.normalize(*u));
                    rows += 1;
                }
            } else {
                let raw = scalar_inputs(&s.case);
                for d in 0..dim {
                    xs.push(norm.scalar_in[d].normalize(raw[d]));
                }
                ys.push(norm.scalar_out.normalize(s.tau_w));
                rows += 1;
            }
        }
        Dataset { xs, ys, rows, dim }
    };
    let field_train = build(&train_idx, true);
    let field_val = build(&val_idx, true);
    let scalar_train = build(&train_idx, false);
    let scalar_val = build(&val_idx, false);

    let mut field_net = Mlp::new(
        FIELD_INPUT_DIM,
        1,
        &net_cfg.hidden_widths,
        net_cfg.activation,
        net_cfg.seed,
    )?;
    let mut scalar_net = Mlp::new(
        SCALAR_INPUT_DIM,
        1,
        &net_cfg.hidden_widths,
        net_cfg.activation,
        net_cfg.seed ^ SCALAR_SEED_SALT,
    )?;

    let val_loss = |fnet: &Mlp, snet: &Mlp| -> Result<f64> {
        let fv = fnet.mse(&field_val.xs, &field_val.ys, field_val.rows)?;
        let sv = snet.mse(&scalar_val.xs, &scalar_val.ys, scalar_val.rows)?;
        Ok(fv + sv)
    };

    if train_cfg.epochs == 0 {
        let best_val_loss = val_loss(&field_net, &scalar_net)?;
        return Ok(TrainedModel {
            field_net,
            scalar_net,
            norm,
            best_val_loss,
            epochs_run: 0,
            flags,
        });
    }

    let mut opt_f = AdamW::new(field_net.n_params());
    let mut opt_s = AdamW::new(scalar_net.n_params());
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(train_cfg.seed);
    let mut best = f64::INFINITY;
    let mut best_epoch = 0usize;
    let mut best_params: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut epochs_run = 0usize;

    for epoch in 0..train_cfg.epochs {
        let lr = learning_rate(train_cfg, epoch);
        for (net, opt, data) in [
            (&mut field_net, &mut opt_f, &field_train),
            (&mut scalar_net, &mut opt_s, &scalar_train),
        ] {
            let mut idx: Vec<usize> = (0..data.rows).collect();
            idx.shuffle(&mut shuffle_rng);
            let mut params = net.params();
            for chunk in idx.chunks(train_cfg.batch_size) {
                let mut xs = Vec::with_capacity(chunk.len() * data.dim);
                let mut ys = Vec::with_capacity(chunk.len());
                for &r in chunk {
                    let (x, y) = data.row(r);
                    xs.extend_from_slice(x);
                    ys.extend_from_slice(y);
                }
                let (_, mut grad) = net.loss_and_grad(&xs, &ys, chunk.len())?;
                clip_grad_norm(&mut grad, train_cfg.grad_clip_norm);
                opt.step(&mut params, &grad, lr, train_cfg);
                net.set_params(&params)?;
            }
        }
        epochs_run = epoch + 1;
        let vl = val_loss(&field_net, &scalar_net)?;
        if vl < best {
            best = vl;
            best_epoch = epoch;
            best_params = Some((field_net.params(), scalar_net.params()));
        }
        if epoch >= best_epoch + train_cfg.early_stop_patience {
            break;
        }
    }

    if let Some((fp, sp)) = best_params {
        field_net.set_params(&fp)?;
        scalar_net.set_params(&sp)?;
    }
    Ok(TrainedModel {
        field_net,
        scalar_net,
        norm,
        best_val_loss: best,
        epochs_run,
        flags,
    })
}

/// Evaluates the surrogate for one case on an arbitrary query mesh.
pub fn predict(model: &TrainedModel, case: &FlowCase, query_y: &[f64]) -> Result<Prediction> {
    if query_y.is_empty() {
        return Err(Error::Contract("query mesh is empty".into()));
    }
    if query_y.iter().any(|&y| !(y > 0.0 && y <= 1.0)) {
        return Err(Error::Contract(format!(
            "query coordinates must lie in (0, 1], got {query_y:?}"
        )));
    }
    let outside = |v: f64, (lo, hi): (f64, f64)| v < lo - 1e-12 || v > hi + 1e-12;
    let mut extrapolated = false;
    let mut u = Vec::with_capacity(query_y.len());
    for &y in query_y {
        let raw = field_inputs(case, y);
        for d in 0..FIELD_INPUT_DIM {
            extrapolated |= outside(raw[d], model.norm.field_in_range[d]);
        }
        let x: Vec<f64> = (0..FIELD_INPUT_DIM)
            .map(|d| model.norm.field_in[d].normalize(raw[d]))
            .collect();
        let out = model.field_net.forward(&x)?;
        u.push(model.norm.field_out.denormalize(out[0]));
    }
    let raw = scalar_inputs(case);
    for d in 0..SCALAR_INPUT_DIM {
        extrapolated |= outside(raw[d], model.norm.scalar_in_range[d]);
    }
    let x: Vec<f64> = (0..SCALAR_INPUT_DIM)
        .map(|d| model.norm.scalar_in[d].normalize(raw[d]))
        .collect();
    let tau_w = model.norm.scalar_out.denormalize(model.scalar_net.forward(&x)?[0]);
    Ok(Prediction { u, tau_w, extrapolated })
}

// ---------------------------------------------------------------------------
// Binary model format: magic, version, shapes, then little-endian f64
// payloads. The header fully determines every length that follows.
// ---------------------------------------------------------------------------

const MAGIC: &[u8; 4] = b"MFS1";
const VERSION: u32 = 1;

struct Cursor<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.at + n > self.buf.len() {
            return Err(Error::Parse(format!(
                "model file truncated at byte {} (wanted {n} more)",
                self.at
            )));
        }
        let s = &self.buf[self.at..self.at + n];
        self.at += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }
}

fn put_widths(buf: &mut Vec<u8>, widths: &[usize]) {
    buf.extend((widths.len() as u32).to_le_bytes());
    for &w in widths {
        buf.extend((w as u32).to_le_bytes());
    }
}

fn put_f64s(buf: &mut Vec<u8>, vals: &[f64]) {
    for v in vals {
        buf.extend(v.to_le_bytes());
    }
}

fn put_stat(buf: &mut Vec<u8>, s: &NormStat) {
    put_f64s(buf, &[s.mean, s.std]);
}

fn put_string(buf: &mut Vec<u8>, s: &str) {
    buf.extend((s.len() as u32).to_le_bytes());
    buf.extend(s.as_bytes());
}

pub fn serialize_model(model: &TrainedModel) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend(MAGIC);
    buf.extend(VERSION.to_le_bytes());
    buf.push(match model.field_net.activation {
        Activation::Gelu => 0,
        Activation::Relu => 1,
    });
    put_widths(&mut buf, &model.field_net.widths);
    put_widths(&mut buf, &model.scalar_net.widths);
    put_f64s(&mut buf, &model.field_net.params());
    put_f64s(&mut buf, &model.scalar_net.params());
    for s in &model.norm.field_in {
        put_stat(&mut buf, s);
    }
    put_stat(&mut buf, &model.norm.field_out);
    for s in &model.norm.scalar_in {
        put_stat(&mut buf, s);
    }
    put_stat(&mut buf, &model.norm.scalar_out);
    for (lo, hi) in model.norm.field_in_range.iter().chain(&model.norm.scalar_in_range) {
        put_f64s(&mut buf, &[*lo, *hi]);
    }
    put_f64s(&mut buf, &[model.best_val_loss]);
    buf.extend((model.epochs_run as u64).to_le_bytes());
    buf.extend((model.flags.len() as u32).to_le_bytes());
    for f in &model.flags {
        put_string(&mut buf, f);
    }
    buf
}

pub fn deserialize_model(bytes: &[u8]) -> Result<TrainedModel> {
    let mut c = Cursor { buf: bytes, at: 0 };
    if c.take(4)? != MAGIC {
        return Err(Error::Parse("not a model file (bad magic)".into()));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(Error::Parse(format!(
            "model file version {version}, this build reads {VERSION}"
        )));
    }
    let activation = match c.take(1)?[0] {
        0 => Activation::Gelu,
        1 => Activation::Relu,
        other => return Err(Error::Parse(format!("unknown activation tag {other}"))),
    };
    let read_widths = |c: &mut Cursor| -> Result<Vec<usize>> {
        let n = c.u32()? as usize;
        if !(2..=64).contains(&n) {
            return Err(Error::Parse(format!("implausible layer count {n}")));
        }
        (0..n)
            .map(|_| {
                let w = c.u32()? as usize;
                if w == 0 || w > 65_536 {
                    return Err(Error::Parse(format!("implausible layer width {w}")));
                }
                Ok(w)
            })
            .collect()
    };
    let field_widths = read_widths(&mut c)?;
    let scalar_widths = read_widths(&mut c)?;
    let mk = |widths: &[usize], seed| -> Result<Mlp> {
        let hidden = &widths[1..widths.len() - 1];
        Mlp::new(widths[0], widths[widths.len() - 1], hidden, activation, seed)
    };
    let mut field_net = mk(&field_widths, 0)?;
    let mut scalar_net = mk(&scalar_widths, 0)?;
    field_net.set_params(&c.f64s(field_net.n_params())?)?;
    scalar_net.set_params(&c.f64s(scalar_net.n_params())?)?;
    let stat = |c: &mut Cursor| -> Result<NormStat> {
        Ok(NormStat { mean: c.f64()?, std: c.f64()? })
    };
    let field_in = [stat(&mut c)?, stat(&mut c)?, stat(&mut c)?];
    let field_out = stat(&mut c)?;
    let scalar_in = [stat(&mut c)?, stat(&mut c)?];
    let scalar_out = stat(&mut c)?;
    let range = |c: &mut Cursor| -> Result<(f64, f64)> { Ok((c.f64()?, c.f64()?)) };
    let field_in_range = [range(&mut c)?, range(&mut c)?, range(&mut c)?];
    let scalar_in_range = [range(&mut c)?, range(&mut c)?];
    let best_val_loss = c.f64()?;
    let epochs_run = c.u64()? as usize;
    let n_flags = c.u32()? as usize;
    let mut flags = Vec::with_capacity(n_flags.min(1024));
    for _ in 0..n_flags {
        let len = c.u32()? as usize;
        let raw = c.take(len)?;
        flags.push(
            String::from_utf8(raw.to_vec())
                .map_err(|_| Error::Parse("flag is not valid UTF-8".into()))?,
        );
    }
    if c.at != bytes.len() {
        return Err(Error::Parse(format!(
            "{} trailing bytes after model payload",
            bytes.len() - c.at
        )));
    }
    Ok(TrainedModel {
        field_net,
        scalar_net,
        norm: Normalization {
            field_in,
            field_out,
            scalar_in,
            scalar_out,
            field_in_range,
            scalar_in_range,
        },
        best_val_loss,
        epochs_run,
        flags,
    })
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    fs::write(path, serialize_model(model))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    deserialize_model(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compose::Selection;
    use crate::solver::generate_pool;

    fn tiny_net() -> NetworkConfig {
        NetworkConfig { hidden_widths: vec![16, 16], activation: Activation::Gelu, seed: 3 }
    }

    fn quick_cfg(epochs: usize) -> TrainConfig {
        TrainConfig {
            epochs,
            early_stop_patience: epochs,
            warmup_epochs: if epochs > 5 { 5 } else { 0 },
            peak_lr: 3e-3,
            batch_size: 128,
            ..Default::default()
        }
    }

    fn small_selection(pool: &SamplePool) -> Selection {
        let ids: Vec<u32> = pool.pairs.iter().map(|p| p.case.case_id).collect();
        Selection {
            low_ids: ids.clone(),
            high_ids: ids,
            total_cost: 0.0,
            achieved_dc: 0.5,
        }
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let pool = generate_pool(4, 21).unwrap();
        let sel = small_selection(&pool);
        let model = train(&sel, &pool, &tiny_net(), &quick_cfg(0)).unwrap();
        let init = Mlp::new(3, 1, &[16, 16], Activation::Gelu, 3).unwrap();
        assert_eq!(model.field_net.params(), init.params());
        assert_eq!(model.epochs_run, 0);
    }

    #[test]
    fn training_is_deterministic() {
        let pool = generate_pool(4, 22).unwrap();
        let sel = small_selection(&pool);
        let a = train(&sel, &pool, &tiny_net(), &quick_cfg(12)).unwrap();
        let b = train(&sel, &pool, &tiny_net(), &quick_cfg(12)).unwrap();
        assert_eq!(a.best_val_loss, b.best_val_loss);
        assert_eq!(a.field_net.params(), b.field_net.params());
        assert_eq!(a.epochs_run, b.epochs_run);
    }

    #[test]
    fn loss_decreases_on_learnable_target() {
        let pool = generate_pool(6, 23).unwrap();
        let sel = small_selection(&pool);
        let start = train(&sel, &pool, &tiny_net(), &quick_cfg(0)).unwrap();
        let done = train(&sel, &pool, &tiny_net(), &quick_cfg(60)).unwrap();
        assert!(
            done.best_val_loss < start.best_val_loss,
            "{} !< {}",
            done.best_val_loss,
            start.best_val_loss
        );
    }

    #[test]
    fn early_stopping_respects_patience() {
        let pool = generate_pool(4, 24).unwrap();
        let sel = small_selection(&pool);
        let cfg = TrainConfig {
            epochs: 400,
            early_stop_patience: 3,
            warmup_epochs: 2,
            peak_lr: 3e-3,
            ..Default::default()
        };
        let model = train(&sel, &pool, &tiny_net(), &cfg).unwrap();
        assert!(model.epochs_run < 400, "patience 3 must stop well before the cap");
    }

    #[test]
    fn single_sample_selection_is_flagged() {
        let pool = generate_pool(4, 25).unwrap();
        let sel = Selection {
            low_ids: vec![pool.pairs[0].case.case_id],
            high_ids: vec![],
            total_cost: 0.0,
            achieved_dc: 0.0,
        };
        let model = train(&sel, &pool, &tiny_net(), &quick_cfg(2)).unwrap();
        assert!(model.flags.iter().any(|f| f.contains("single-sample")));
        // with one case, ln Re and beta are constant inputs
        assert!(model.flags.iter().any(|f| f.contains("constant")));
    }

    #[test]
    fn predict_shape_and_extrapolation_flag() {
        let pool = generate_pool(4, 26).unwrap();
        let sel = small_selection(&pool);
        let model = train(&sel, &pool, &tiny_net(), &quick_cfg(4)).unwrap();
        let case = pool.pairs[0].case;
        let mesh = &pool.pairs[0].high.mesh.node_y;
        let pred = predict(&model, &case, mesh).unwrap();
        assert_eq!(pred.u.len(), mesh.len());
        assert!(!pred.extrapolated, "training case must not flag extrapolation");
        let outside = FlowCase::new(9.9e5, 0.499, 999).unwrap();
        let pred2 = predict(&model, &outside, mesh).unwrap();
        assert!(pred2.extrapolated);
        assert!(predict(&model, &case, &[1.5]).is_err());
        assert!(predict(&model, &case, &[]).is_err());
    }

    #[test]
    fn serialization_roundtrip_exact() {
        let pool = generate_pool(4, 27).unwrap();
        let sel = small_selection(&pool);
        let model = train(&sel, &pool, &tiny_net(), &quick_cfg(3)).unwrap();
        let bytes = serialize_model(&model);
        let back = deserialize_model(&bytes).unwrap();
        assert_eq!(back, model);
        // corrupted magic and truncation both surface as parse errors
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(deserialize_model(&bad).is_err());
        assert!(deserialize_model(&bytes[..bytes.len() - 3]).is_err());
    }

    #[test]
    fn final_val_no_worse_than_first_epoch() {
        let pool = generate_pool(5, 28).unwrap();
        let sel = small_selection(&pool);
        let one = train(&sel, &pool, &tiny_net(), &quick_cfg(1)).unwrap();
        let many = train(&sel, &pool, &tiny_net(), &quick_cfg(40)).unwrap();
        assert!(many.best_val_loss <= one.best_val_loss + 1e-15);
    }
}
