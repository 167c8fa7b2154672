//! Walk corpora as training data: vocabulary, context pairs, noise sampler.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Vertex;
use crate::walk::Walk;

/// Bijective token <-> dense index map with corpus frequencies. Indices are
/// assigned by first occurrence, so a fixed corpus always yields the same
/// vocabulary.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    token_to_index: HashMap<Vertex, usize>,
    index_to_token: Vec<Vertex>,
    frequency: Vec<u64>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.index_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_to_token.is_empty()
    }

    pub fn index_of(&self, token: Vertex) -> Option<usize> {
        self.token_to_index.get(&token).copied()
    }

    pub fn token(&self, index: usize) -> Vertex {
        self.index_to_token[index]
    }

    pub fn tokens(&self) -> &[Vertex] {
        &self.index_to_token
    }

    pub fn frequency(&self, index: usize) -> u64 {
        self.frequency[index]
    }

    /// Indices of all tag tokens (ascending).
    pub fn tag_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.token(i).is_tag()).collect()
    }
}

/// Counts every token in the corpus. Errors on a corpus with no tokens.
pub fn build_vocab(walks: &[Walk]) -> Result<Vocabulary> {
    let mut vocab = Vocabulary {
        token_to_index: HashMap::new(),
        index_to_token: Vec::new(),
        frequency: Vec::new(),
    };
    for walk in walks {
        for &token in walk {
            match vocab.token_to_index.get(&token) {
                Some(&i) => vocab.frequency[i] += 1,
                None => {
                    vocab.token_to_index.insert(token, vocab.index_to_token.len());
                    vocab.index_to_token.push(token);
                    vocab.frequency.push(1);
                }
            }
        }
    }
    if vocab.is_empty() {
        return Err(Error::invalid("empty corpus"));
    }
    Ok(vocab)
}

/// Lazy view of all (center, context) index pairs within `window` positions
/// of each other in some walk. Pairs are never materialized; iteration order
/// is walk, then center position, then context position ascending.
#[derive(Clone, Copy)]
pub struct PairStream<'a> {
    walks: &'a [Walk],
    vocab: &'a Vocabulary,
    window: usize,
}

/// Builds the pair view, validating the window and that every corpus token is
/// in the vocabulary.
pub fn extract_pairs<'a>(walks: &'a [Walk], vocab: &'a Vocabulary, window: usize) -> Result<PairStream<'a>> {
    if window == 0 {
        return Err(Error::invalid("window must be >= 1"));
    }
    for walk in walks {
        for &token in walk {
            if vocab.index_of(token).is_none() {
                return Err(Error::invalid(format!("token {token} missing from vocabulary")));
            }
        }
    }
    Ok(PairStream { walks, vocab, window })
}

impl<'a> PairStream<'a> {
    pub fn window(&self) -> usize {
        self.window
    }

    /// Number of pairs per full pass.
    pub fn count(&self) -> usize {
        self.walks
            .iter()
            .map(|walk| {
                let len = walk.len();
                (0..len)
                    .map(|i| (i + self.window).min(len.saturating_sub(1)) - i.saturating_sub(self.window))
                    .sum::<usize>()
            })
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + 'a {
        let window = self.window;
        let vocab = self.vocab;
        self.walks.iter().flat_map(move |walk| {
            (0..walk.len()).flat_map(move |i| {
                let lo = i.saturating_sub(window);
                let hi = (i + window).min(walk.len() - 1);
                (lo..=hi)
                    .filter(move |&j| j != i)
                    .map(move |j| (vocab.index_of(walk[i]).unwrap(), vocab.index_of(walk[j]).unwrap()))
            })
        })
    }

    /// Splits into `parts` views over disjoint contiguous walk ranges whose
    /// concatenated iteration equals a full pass.
    pub fn partition(&self, parts: usize) -> Vec<PairStream<'a>> {
        let parts = parts.max(1);
        let chunk = self.walks.len().div_ceil(parts).max(1);
        self.walks
            .chunks(chunk)
            .map(|walks| PairStream { walks, vocab: self.vocab, window: self.window })
            .collect()
    }
}

/// Alias-method sampler over token indices with probability proportional to
/// frequency^exponent. Construction is deterministic (Vose's method with
/// index-ordered worklists); draws cost O(1).
#[derive(Clone, Debug)]
pub struct NoiseDistribution {
    prob: Vec<f64>,
    alias: Vec<usize>,
    analytic: Vec<f64>,
}

/// Builds the negative-sampling noise distribution.
pub fn noise_distribution(vocab: &Vocabulary, exponent: f64) -> Result<NoiseDistribution> {
    if exponent < 0.0 || !exponent.is_finite() {
        return Err(Error::invalid(format!("noise exponent must be >= 0, got {exponent}")));
    }
    let weights: Vec<f64> = (0..vocab.len())
        .map(|i| (vocab.frequency(i) as f64).powf(exponent))
        .collect();
    let total: f64 = weights.iter().sum();
    let n = weights.len();
    let analytic: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let mut prob: Vec<f64> = analytic.iter().map(|p| p * n as f64).collect();
    let mut alias = vec![0usize; n];
    let mut small: Vec<usize> = (0..n).filter(|&i| prob[i] < 1.0).collect();
    let mut large: Vec<usize> = (0..n).filter(|&i| prob[i] >= 1.0).collect();
    while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
        small.pop();
        alias[s] = l;
        prob[l] -= 1.0 - prob[s];
        if prob[l] < 1.0 {
            large.pop();
            small.push(l);
        }
    }
    for &i in small.iter().chain(large.iter()) {
        prob[i] = 1.0;
    }
    Ok(NoiseDistribution { prob, alias, analytic })
}

impl NoiseDistribution {
    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.analytic[index]
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let k = rng.random_range(0..self.prob.len());
        if rng.random::<f64>() < self.prob[k] {
            k
        } else {
            self.alias[k]
        }
    }
}
