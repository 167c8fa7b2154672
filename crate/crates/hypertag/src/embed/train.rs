//! Skip-gram negative-sampling trainers.
//!
//! Both spaces run the same loop: for every (center, context) pair draw k
//! noise tokens, compute the loss gradients with respect to the center input
//! vector and every touched context vector, then step. Hyperbolic mode steps
//! with RSGD (inverse-metric rescaling plus ball projection), Euclidean mode
//! with plain SGD; the space enum is the only behavioral difference.
//!
//! All gradients of one pair are computed from the state before the pair's
//! updates, then written back; if the same context row is touched twice in
//! one pair the last write wins. The serial trainer is deterministic: epoch
//! e draws negatives from the stream keyed (seed', e+1, 0). The parallel
//! trainer splits the pair stream across workers that update the shared
//! tables lock-free (relaxed per-component atomics, last write wins); rows
//! read torn are rescaled into the ball before use, so results vary run to
//! run but every write keeps the ball invariant.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use rayon::prelude::*;

use super::ball::{project_into_ball, rsgd_update};
use super::{sigmoid, softplus, EmbeddingModel, Space};
use crate::corpus::{NoiseDistribution, PairStream};
use crate::error::{Error, Result};

/// Domain tag separating training streams from walk streams under one seed.
const TRAIN_DOMAIN: u64 = 0x7472_6169_6e65_7221;

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    pub space: Space,
    pub dim: usize,
    pub learning_rate: f64,
    /// Negatives drawn per pair.
    pub negatives: usize,
    pub epochs: usize,
    /// Learning-rate factor for the first epoch; 1.0 disables burn-in.
    pub burn_in: f64,
    /// Ball margin: hyperbolic vectors keep norm <= 1 - eps_ball.
    pub eps_ball: f64,
    pub rng_seed: u64,
}

impl TrainConfig {
    /// Engineering defaults per space.
    pub fn for_space(space: Space) -> Self {
        let (dim, learning_rate) = match space {
            Space::Hyperbolic => (10, 0.05),
            Space::Euclidean => (64, 0.025),
        };
        TrainConfig {
            space,
            dim,
            learning_rate,
            negatives: 5,
            epochs: 5,
            burn_in: 0.1,
            eps_ball: 1e-5,
            rng_seed: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::invalid(format!("dimension must be >= 2, got {}", self.dim)));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::invalid(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(0.0 < self.burn_in && self.burn_in <= 1.0) {
            return Err(Error::invalid(format!("burn_in must be in (0,1], got {}", self.burn_in)));
        }
        if !(self.eps_ball > 0.0 && self.eps_ball < 0.5) {
            return Err(Error::invalid(format!("eps_ball must be in (0,0.5), got {}", self.eps_ball)));
        }
        Ok(())
    }

    fn epoch_lr(&self, epoch: usize) -> f64 {
        if epoch == 0 && self.epochs > 1 {
            self.learning_rate * self.burn_in
        } else {
            self.learning_rate
        }
    }
}

/// Working memory for one training event: copies of the touched rows and
/// their gradients.
struct StepBuffers {
    w: Vec<f64>,
    pos: Vec<f64>,
    negs: Vec<f64>,
    neg_idx: Vec<usize>,
    gu: Vec<f64>,
    gv: Vec<f64>,
    grad_w: Vec<f64>,
    grad_pos: Vec<f64>,
    grad_negs: Vec<f64>,
}

impl StepBuffers {
    fn new(dim: usize, k: usize) -> Self {
        StepBuffers {
            w: vec![0.0; dim],
            pos: vec![0.0; dim],
            negs: vec![0.0; dim * k],
            neg_idx: Vec::with_capacity(k),
            gu: vec![0.0; dim],
            gv: vec![0.0; dim],
            grad_w: vec![0.0; dim],
            grad_pos: vec![0.0; dim],
            grad_negs: vec![0.0; dim * k],
        }
    }
}

fn draw_negatives<R: Rng>(noise: &NoiseDistribution, context: usize, k: usize, rng: &mut R, out: &mut Vec<usize>) {
    out.clear();
    for _ in 0..k {
        let mut n = noise.sample(rng);
        let mut tries = 0;
        while n == context && tries < 10 {
            n = noise.sample(rng);
            tries += 1;
        }
        out.push(n);
    }
}

/// Fills grad_w / grad_pos / grad_negs from the buffered vectors and returns
/// the pair loss. Coincident points contribute softplus(0) with zero
/// gradient (the u = v singularity is skipped).
fn compute_gradients(space: Space, buf: &mut StepBuffers, k: usize) -> f64 {
    let dim = buf.w.len();
    buf.grad_w.fill(0.0);
    let dpos = space.dist_grad_into(&buf.w, &buf.pos, &mut buf.gu, &mut buf.gv);
    let mut loss = softplus(dpos);
    if dpos > 0.0 {
        let c = sigmoid(dpos);
        for i in 0..dim {
            buf.grad_w[i] += c * buf.gu[i];
            buf.grad_pos[i] = c * buf.gv[i];
        }
    } else {
        buf.grad_pos.fill(0.0);
    }
    for t in 0..k {
        let hn = &buf.negs[t * dim..(t + 1) * dim];
        let dn = space.dist_grad_into(&buf.w, hn, &mut buf.gu, &mut buf.gv);
        loss += softplus(-dn);
        let slot = &mut buf.grad_negs[t * dim..(t + 1) * dim];
        if dn > 0.0 {
            let c = sigmoid(dn) - 1.0;
            for i in 0..dim {
                buf.grad_w[i] += c * buf.gu[i];
                slot[i] = c * buf.gv[i];
            }
        } else {
            slot.fill(0.0);
        }
    }
    loss
}

fn apply_updates(space: Space, buf: &mut StepBuffers, k: usize, lr: f64, eps_ball: f64) {
    let dim = buf.w.len();
    match space {
        Space::Hyperbolic => {
            rsgd_update(&mut buf.w, &buf.grad_w, lr, eps_ball);
            rsgd_update(&mut buf.pos, &buf.grad_pos, lr, eps_ball);
            for t in 0..k {
                rsgd_update(
                    &mut buf.negs[t * dim..(t + 1) * dim],
                    &buf.grad_negs[t * dim..(t + 1) * dim],
                    lr,
                    eps_ball,
                );
            }
        }
        Space::Euclidean => {
            for i in 0..dim {
                buf.w[i] -= lr * buf.grad_w[i];
                buf.pos[i] -= lr * buf.grad_pos[i];
            }
            for t in 0..k {
                for i in 0..dim {
                    buf.negs[t * dim + i] -= lr * buf.grad_negs[t * dim + i];
                }
            }
        }
    }
}

/// Loss and analytic gradients of one negative-sampling event, for
/// diagnostics and gradient checking. Indices must be valid; repeated
/// context rows get one gradient entry each.
pub struct PairGradients {
    pub loss: f64,
    pub center: Vec<f64>,
    pub context: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

pub fn sgns_gradients(
    model: &EmbeddingModel,
    center: usize,
    context: usize,
    negatives: &[usize],
) -> PairGradients {
    let dim = model.dim();
    let k = negatives.len();
    let mut buf = StepBuffers::new(dim, k);
    buf.w.copy_from_slice(model.input_vector(center));
    buf.pos.copy_from_slice(model.context_vector(context));
    for (t, &n) in negatives.iter().enumerate() {
        buf.negs[t * dim..(t + 1) * dim].copy_from_slice(model.context_vector(n));
    }
    let loss = compute_gradients(model.space(), &mut buf, k);
    PairGradients {
        loss,
        center: buf.grad_w,
        context: buf.grad_pos,
        negatives: buf.grad_negs.chunks(dim).map(<[f64]>::to_vec).collect(),
    }
}

fn validate_run(model: &EmbeddingModel, pairs: &PairStream, noise: &NoiseDistribution, cfg: &TrainConfig) -> Result<usize> {
    cfg.validate()?;
    if model.space() != cfg.space || model.dim() != cfg.dim {
        return Err(Error::invalid(format!(
            "model is {} d={}, config wants {} d={}",
            model.space(),
            model.dim(),
            cfg.space,
            cfg.dim
        )));
    }
    if noise.len() != model.len() {
        return Err(Error::invalid(format!(
            "noise distribution covers {} tokens, model has {}",
            noise.len(),
            model.len()
        )));
    }
    let total = pairs.count();
    if total == 0 {
        return Err(Error::invalid("no training pairs"));
    }
    Ok(total)
}

/// Deterministic serial training. Returns the mean loss per epoch.
pub fn train(
    model: &mut EmbeddingModel,
    pairs: &PairStream,
    noise: &NoiseDistribution,
    cfg: &TrainConfig,
) -> Result<Vec<f64>> {
    let total = validate_run(model, pairs, noise, cfg)?;
    let dim = model.dim();
    let k = cfg.negatives;
    let mut buf = StepBuffers::new(dim, k);
    let mut trace = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let lr = cfg.epoch_lr(epoch);
        let mut rng = crate::rng::stream(cfg.rng_seed ^ TRAIN_DOMAIN, epoch as u64 + 1, 0);
        let mut sum = 0.0;
        for (wi, hi) in pairs.iter() {
            draw_negatives(noise, hi, k, &mut rng, &mut buf.neg_idx);
            buf.w.copy_from_slice(model.input_vector(wi));
            buf.pos.copy_from_slice(model.context_vector(hi));
            for t in 0..k {
                buf.negs[t * dim..(t + 1) * dim].copy_from_slice(model.context_vector(buf.neg_idx[t]));
            }
            let loss = compute_gradients(cfg.space, &mut buf, k);
            if !loss.is_finite() {
                return Err(non_finite(model, epoch, wi, hi));
            }
            apply_updates(cfg.space, &mut buf, k, lr, cfg.eps_ball);
            model.input_mut(wi).copy_from_slice(&buf.w);
            model.context_mut(hi).copy_from_slice(&buf.pos);
            for t in 0..k {
                let n = buf.neg_idx[t];
                model.context_mut(n).copy_from_slice(&buf.negs[t * dim..(t + 1) * dim]);
            }
            sum += loss;
        }
        trace.push(sum / total as f64);
    }
    Ok(trace)
}

fn non_finite(model: &EmbeddingModel, epoch: usize, wi: usize, hi: usize) -> Error {
    Error::NonFinite {
        what: "loss",
        epoch,
        center: model.tokens()[wi].to_string(),
        context: model.tokens()[hi].to_string(),
    }
}

/// Reinterprets an exclusively borrowed f64 table as relaxed atomics for
/// lock-free sharing across workers.
fn atomic_view(data: &mut [f64]) -> &[AtomicU64] {
    const {
        assert!(std::mem::size_of::<f64>() == std::mem::size_of::<AtomicU64>());
        assert!(std::mem::align_of::<f64>() == std::mem::align_of::<AtomicU64>());
    }
    // Safety: exclusive borrow guarantees no other f64 access for the view's
    // lifetime; sizes and alignments match; AtomicU64 allows shared mutation.
    unsafe { std::slice::from_raw_parts(data.as_mut_ptr() as *const AtomicU64, data.len()) }
}

fn load_row(atoms: &[AtomicU64], row: usize, out: &mut [f64]) {
    let dim = out.len();
    for i in 0..dim {
        out[i] = f64::from_bits(atoms[row * dim + i].load(Ordering::Relaxed));
    }
}

fn store_row(atoms: &[AtomicU64], row: usize, val: &[f64]) {
    let dim = val.len();
    for i in 0..dim {
        atoms[row * dim + i].store(val[i].to_bits(), Ordering::Relaxed);
    }
}

/// Lock-free parallel training over `threads` workers. Not deterministic;
/// every written row still satisfies the ball invariant in hyperbolic mode.
pub fn train_parallel(
    model: &mut EmbeddingModel,
    pairs: &PairStream,
    noise: &NoiseDistribution,
    cfg: &TrainConfig,
    threads: usize,
) -> Result<Vec<f64>> {
    let total = validate_run(model, pairs, noise, cfg)?;
    let dim = model.dim();
    let k = cfg.negatives;
    let space = cfg.space;
    let eps = cfg.eps_ball;
    let tokens = model.tokens().to_vec();
    let parts = pairs.partition(threads.max(1));
    let (input, context) = model.tables_mut();
    let input_atoms = atomic_view(input);
    let context_atoms = atomic_view(context);
    let mut trace = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let lr = cfg.epoch_lr(epoch);
        let sums: Result<Vec<f64>> = parts
            .par_iter()
            .enumerate()
            .map(|(pi, part)| {
                let mut rng = crate::rng::stream(cfg.rng_seed ^ TRAIN_DOMAIN, epoch as u64 + 1, pi as u64 + 1);
                let mut buf = StepBuffers::new(dim, k);
                let mut sum = 0.0;
                for (wi, hi) in part.iter() {
                    draw_negatives(noise, hi, k, &mut rng, &mut buf.neg_idx);
                    load_row(input_atoms, wi, &mut buf.w);
                    load_row(context_atoms, hi, &mut buf.pos);
                    for t in 0..k {
                        load_row(context_atoms, buf.neg_idx[t], &mut buf.negs[t * dim..(t + 1) * dim]);
                    }
                    if space == Space::Hyperbolic {
                        // torn reads may mix two in-ball vectors into an
                        // out-of-ball one; rescale before computing
                        project_into_ball(&mut buf.w, eps);
                        project_into_ball(&mut buf.pos, eps);
                        for t in 0..k {
                            project_into_ball(&mut buf.negs[t * dim..(t + 1) * dim], eps);
                        }
                    }
                    let loss = compute_gradients(space, &mut buf, k);
                    if !loss.is_finite() {
                        return Err(Error::NonFinite {
                            what: "loss",
                            epoch,
                            center: tokens[wi].to_string(),
                            context: tokens[hi].to_string(),
                        });
                    }
                    apply_updates(space, &mut buf, k, lr, eps);
                    store_row(input_atoms, wi, &buf.w);
                    store_row(context_atoms, hi, &buf.pos);
                    for t in 0..k {
                        store_row(context_atoms, buf.neg_idx[t], &buf.negs[t * dim..(t + 1) * dim]);
                    }
                    sum += loss;
                }
                Ok(sum)
            })
            .collect();
        trace.push(sums?.iter().sum::<f64>() / total as f64);
    }
    Ok(trace)
}
