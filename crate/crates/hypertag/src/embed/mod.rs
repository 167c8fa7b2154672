//! Embedding spaces, the two-table Skip-gram model, and its loss.
//!
//! Both modes share one distance-based loss shape: for a center w, true
//! context h and negatives h_n,
//!
//!   L = -log sigma(-d(w, h)) - sum_n log sigma(d(w, h_n))
//!
//! with d the geodesic ball distance in hyperbolic mode and |w - h| in
//! Euclidean mode. Input (center) and context vectors live in separate
//! tables; reported embeddings come from the input table.

pub mod ball;
mod train;

pub use train::{sgns_gradients, train, train_parallel, PairGradients, TrainConfig};

use rand::Rng;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::graph::Vertex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Euclidean,
    Hyperbolic,
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Space::Euclidean => write!(f, "euclidean"),
            Space::Hyperbolic => write!(f, "hyperbolic"),
        }
    }
}

impl std::str::FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Space::Euclidean),
            "hyperbolic" => Ok(Space::Hyperbolic),
            other => Err(Error::invalid(format!(
                "unknown space `{other}` (expected euclidean or hyperbolic)"
            ))),
        }
    }
}

impl Space {
    /// Distance between two vectors of this space. Hyperbolic inputs must be
    /// inside the unit ball (model vectors always are).
    pub fn distance(&self, u: &[f64], v: &[f64]) -> f64 {
        match self {
            Space::Euclidean => ball::euclidean_distance(u, v),
            Space::Hyperbolic => ball::hyperbolic_distance_unchecked(u, v),
        }
    }

    pub(crate) fn dist_grad_into(&self, u: &[f64], v: &[f64], gu: &mut [f64], gv: &mut [f64]) -> f64 {
        match self {
            Space::Euclidean => ball::euclidean_dist_grad_into(u, v, gu, gv),
            Space::Hyperbolic => ball::hyperbolic_dist_grad_into(u, v, gu, gv),
        }
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// -log sigma(x) = softplus(-x), computed without overflow.
pub(crate) fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Skip-gram model: one input and one context vector per vocabulary token.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel {
    space: Space,
    dim: usize,
    tokens: Vec<Vertex>,
    input: Vec<f64>,
    context: Vec<f64>,
}

impl EmbeddingModel {
    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of tokens.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Vertex] {
        &self.tokens
    }

    pub fn index_of(&self, token: Vertex) -> Option<usize> {
        self.tokens.iter().position(|&t| t == token)
    }

    pub fn input_vector(&self, i: usize) -> &[f64] {
        &self.input[i * self.dim..(i + 1) * self.dim]
    }

    pub fn context_vector(&self, i: usize) -> &[f64] {
        &self.context[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn input_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.input[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn context_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.context[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn tables_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.input, &mut self.context)
    }

    /// Replaces a token's input vector, enforcing the ball invariant in
    /// hyperbolic mode.
    pub fn set_input_vector(&mut self, i: usize, coords: &[f64]) -> Result<()> {
        self.check_row(coords)?;
        self.input_mut(i).copy_from_slice(coords);
        Ok(())
    }

    pub fn set_context_vector(&mut self, i: usize, coords: &[f64]) -> Result<()> {
        self.check_row(coords)?;
        self.context_mut(i).copy_from_slice(coords);
        Ok(())
    }

    fn check_row(&self, coords: &[f64]) -> Result<()> {
        if coords.len() != self.dim {
            return Err(Error::invalid(format!(
                "vector has dimension {}, model expects {}",
                coords.len(),
                self.dim
            )));
        }
        if self.space == Space::Hyperbolic {
            let n2 = ball::sq_norm(coords);
            if n2 >= 1.0 {
                return Err(Error::OutsideBall { norm: n2.sqrt() });
            }
        }
        Ok(())
    }

    /// Distance between two tokens' input vectors in the model's space.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.space.distance(self.input_vector(i), self.input_vector(j))
    }

    /// Diagnostic softmax over contexts: P(h | w) proportional to
    /// exp(-d(w, h)) across the whole vocabulary. Never used in training.
    pub fn context_distribution(&self, center: usize) -> Vec<f64> {
        let w = self.input_vector(center);
        let scores: Vec<f64> = (0..self.len())
            .map(|h| -self.space.distance(w, self.context_vector(h)))
            .collect();
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let total: f64 = exps.iter().sum();
        exps.iter().map(|e| e / total).collect()
    }
}

/// Fresh model: hyperbolic coordinates uniform in [-1e-3, 1e-3] (near the
/// origin), Euclidean uniform in [-0.5/d, 0.5/d]. Input rows are drawn first,
/// then context rows, from one ChaCha8 stream seeded with `seed`.
pub fn init_model(vocab: &Vocabulary, space: Space, dim: usize, seed: u64) -> Result<EmbeddingModel> {
    if dim < 2 {
        return Err(Error::invalid(format!("dimension must be >= 2, got {dim}")));
    }
    if vocab.is_empty() {
        return Err(Error::invalid("cannot initialize a model over an empty vocabulary"));
    }
    let bound = match space {
        Space::Hyperbolic => 1e-3,
        Space::Euclidean => 0.5 / dim as f64,
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    use rand::SeedableRng;
    let n = vocab.len() * dim;
    let mut draw = |len: usize| -> Vec<f64> {
        (0..len).map(|_| rng.random_range(-bound..bound)).collect()
    };
    Ok(EmbeddingModel {
        space,
        dim,
        tokens: vocab.tokens().to_vec(),
        input: draw(n),
        context: draw(n),
    })
}

/// Rebuilds a model from exported vectors, e.g. after [`crate::io::load_embeddings`].
/// `input` is row-major, one `dim`-sized row per token. The context table is
/// seeded with a copy of the input rows, since exports carry only the
/// reported (input) vectors.
pub fn from_vectors(
    space: Space,
    dim: usize,
    tokens: Vec<Vertex>,
    input: Vec<f64>,
) -> Result<EmbeddingModel> {
    if dim < 2 {
        return Err(Error::invalid(format!("dimension must be >= 2, got {dim}")));
    }
    if tokens.is_empty() {
        return Err(Error::invalid("cannot build a model without tokens"));
    }
    if input.len() != tokens.len() * dim {
        return Err(Error::invalid(format!(
            "expected {} coordinates for {} tokens of dimension {dim}, got {}",
            tokens.len() * dim,
            tokens.len(),
            input.len()
        )));
    }
    let mut seen = std::collections::HashSet::new();
    for &t in &tokens {
        if !seen.insert(t) {
            return Err(Error::invalid(format!("duplicate token {t}")));
        }
    }
    for row in input.chunks_exact(dim) {
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite coordinate"));
        }
        if space == Space::Hyperbolic {
            let n2 = ball::sq_norm(row);
            if n2 >= 1.0 {
                return Err(Error::OutsideBall { norm: n2.sqrt() });
            }
        }
    }
    let context = input.clone();
    Ok(EmbeddingModel { space, dim, tokens, input, context })
}

/// Negative-sampling loss for one training event.
pub fn sgns_loss(model: &EmbeddingModel, center: usize, context: usize, negatives: &[usize]) -> f64 {
    let w = model.input_vector(center);
    let mut loss = softplus(model.space.distance(w, model.context_vector(context)));
    for &n in negatives {
        loss += softplus(-model.space.distance(w, model.context_vector(n)));
    }
    loss
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_vocab;
    use crate::graph::Vertex;

    fn toy_vocab(n: usize) -> Vocabulary {
        build_vocab(&[(0..n).map(Vertex::Node).collect()]).unwrap()
    }

    #[test]
    fn init_bounds_and_determinism() {
        let vocab = toy_vocab(30);
        let m = init_model(&vocab, Space::Hyperbolic, 10, 9).unwrap();
        assert_eq!(m.len(), 30);
        for i in 0..m.len() {
            assert!(ball::norm(m.input_vector(i)) < 1e-2);
            assert!(ball::norm(m.context_vector(i)) < 1e-2);
        }
        let m2 = init_model(&vocab, Space::Hyperbolic, 10, 9).unwrap();
        assert_eq!(m, m2);
        let m3 = init_model(&vocab, Space::Hyperbolic, 10, 10).unwrap();
        assert_ne!(m, m3);

        let e = init_model(&vocab, Space::Euclidean, 25, 9).unwrap();
        let bound = 0.5 / 25.0;
        for i in 0..e.len() {
            assert!(e.input_vector(i).iter().all(|c| c.abs() < bound));
        }
    }

    #[test]
    fn init_rejects_tiny_dimension() {
        let vocab = toy_vocab(3);
        assert!(init_model(&vocab, Space::Euclidean, 1, 0).is_err());
        assert!(init_model(&vocab, Space::Euclidean, 2, 0).is_ok());
    }

    #[test]
    fn loss_at_coincident_pair_is_ln2() {
        let vocab = toy_vocab(2);
        let mut m = init_model(&vocab, Space::Hyperbolic, 2, 1).unwrap();
        m.set_input_vector(0, &[0.0, 0.0]).unwrap();
        m.set_context_vector(0, &[0.0, 0.0]).unwrap();
        let l = sgns_loss(&m, 0, 0, &[]);
        assert!((l - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn loss_limit_far_negatives() {
        // d(w, h+) = 0 and far negatives: loss -> ln 2 from above
        let vocab = toy_vocab(3);
        let mut m = init_model(&vocab, Space::Hyperbolic, 2, 1).unwrap();
        m.set_input_vector(0, &[0.0, 0.0]).unwrap();
        m.set_context_vector(1, &[0.0, 0.0]).unwrap();
        m.set_context_vector(2, &[0.9995, 0.0]).unwrap();
        let l = sgns_loss(&m, 0, 1, &[2, 2]);
        assert!(l >= std::f64::consts::LN_2);
        assert!((l - std::f64::consts::LN_2).abs() < 0.01);
    }

    #[test]
    fn loss_nonnegative_and_finite_on_random_models() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let vocab = toy_vocab(6);
        for space in [Space::Euclidean, Space::Hyperbolic] {
            let mut m = init_model(&vocab, space, 3, 2).unwrap();
            for i in 0..6 {
                let v: Vec<f64> = (0..3).map(|_| rng.random_range(-0.5..0.5)).collect();
                m.set_input_vector(i, &v).unwrap();
                let v: Vec<f64> = (0..3).map(|_| rng.random_range(-0.5..0.5)).collect();
                m.set_context_vector(i, &v).unwrap();
            }
            for _ in 0..200 {
                let c = rng.random_range(0..6);
                let h = rng.random_range(0..6);
                let negs: Vec<usize> = (0..4).map(|_| rng.random_range(0..6)).collect();
                let l = sgns_loss(&m, c, h, &negs);
                assert!(l.is_finite() && l >= 0.0);
            }
        }
    }

    #[test]
    fn set_vector_enforces_ball() {
        let vocab = toy_vocab(2);
        let mut m = init_model(&vocab, Space::Hyperbolic, 2, 1).unwrap();
        assert!(m.set_input_vector(0, &[1.0, 0.0]).is_err());
        assert!(m.set_input_vector(0, &[0.3, 0.1]).is_ok());
        assert!(m.set_input_vector(0, &[0.3]).is_err());
        // Euclidean mode waives the norm constraint
        let mut e = init_model(&vocab, Space::Euclidean, 2, 1).unwrap();
        assert!(e.set_input_vector(0, &[5.0, 0.0]).is_ok());
    }

    #[test]
    fn context_distribution_prefers_near_contexts() {
        let vocab = toy_vocab(3);
        let mut m = init_model(&vocab, Space::Hyperbolic, 2, 1).unwrap();
        m.set_input_vector(0, &[0.1, 0.0]).unwrap();
        m.set_context_vector(0, &[0.1, 0.0]).unwrap();
        m.set_context_vector(1, &[0.2, 0.0]).unwrap();
        m.set_context_vector(2, &[0.8, 0.0]).unwrap();
        let p = m.context_distribution(0);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[0] > p[1] && p[1] > p[2]);
    }

    #[test]
    fn softplus_is_stable() {
        assert_eq!(softplus(800.0), 800.0);
        assert_eq!(softplus(-800.0), 0.0);
        assert!((softplus(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((softplus(1.0) - (1.0f64.exp() + 1.0).ln()).abs() < 1e-12);
    }
}
