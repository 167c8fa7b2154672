//! End-to-end embedding pipeline: hybrid graph, walks, pairs, training.

use crate::corpus::{build_vocab, extract_pairs, noise_distribution, Vocabulary};
use crate::embed::{init_model, train, train_parallel, EmbeddingModel, Space, TrainConfig};
use crate::error::Result;
use crate::graph::{build_hybrid, Centrality, TaggedNetwork};
use crate::walk::{generate_corpus, generate_corpus_parallel, WalkConfig};

/// Everything between a tagged network and its embedding.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct PipelineConfig {
    pub centrality: Centrality,
    pub walk: WalkConfig,
    /// Skip-gram context window over walk positions.
    pub window: usize,
    /// Exponent of the negative-sampling noise distribution.
    pub noise_exponent: f64,
    pub train: TrainConfig,
    /// Worker count for lock-free parallel training; 0 = deterministic serial.
    pub train_threads: usize,
}

impl PipelineConfig {
    pub fn new(space: Space) -> Self {
        PipelineConfig {
            centrality: Centrality::Degree,
            walk: WalkConfig::default(),
            window: 5,
            noise_exponent: 0.75,
            train: TrainConfig::for_space(space),
            train_threads: 0,
        }
    }
}

pub struct EmbedOutput {
    pub vocab: Vocabulary,
    pub model: EmbeddingModel,
    pub loss_trace: Vec<f64>,
}

/// Runs the full pipeline on one network. Serial unless `train_threads` > 0;
/// walk generation is parallel either way since its output is order-stable.
pub fn embed_network(g: &TaggedNetwork, cfg: &PipelineConfig) -> Result<EmbedOutput> {
    let hybrid = build_hybrid(g, cfg.centrality);
    let walks = if g.num_nodes() >= 256 {
        generate_corpus_parallel(&hybrid, &cfg.walk)?
    } else {
        generate_corpus(&hybrid, &cfg.walk)?
    };
    let vocab = build_vocab(&walks)?;
    let pairs = extract_pairs(&walks, &vocab, cfg.window)?;
    let noise = noise_distribution(&vocab, cfg.noise_exponent)?;
    let mut model = init_model(&vocab, cfg.train.space, cfg.train.dim, cfg.train.rng_seed)?;
    let loss_trace = if cfg.train_threads > 0 {
        train_parallel(&mut model, &pairs, &noise, &cfg.train, cfg.train_threads)?
    } else {
        train(&mut model, &pairs, &noise, &cfg.train)?
    };
    Ok(EmbedOutput { vocab, model, loss_trace })
}
