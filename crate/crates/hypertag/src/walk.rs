//! Parameterized random walks over the hybrid network.
//!
//! A walk alternates between plain nodes and tag nodes. From a plain node the
//! walker steps to one of the node's tags with probability `p` (mixing
//! member-similarity-driven and social-closeness-driven context patterns) and
//! otherwise to a plain neighbor proportional to interaction edge weight.
//! From a tag node it steps to a community member proportional to the
//! member's degree centrality. Tag selection itself is biased by community
//! size relative to the previously visited tag: with probability `q` the
//! walker favors similar-size tags (transverse, weight exp(-delta^2)) and
//! otherwise different-size tags (vertical, weight exp(+delta^2)), where
//! delta is the size difference divided by `size_scale`.
//!
//! Every walk owns an independent random stream: a ChaCha8 generator seeded
//! with splitmix64(splitmix64(splitmix64(rng_seed) ^ start_node) ^ walk_index).
//! Serial and parallel corpus generation therefore produce byte-identical
//! output, walks ordered by start node then walk index.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{HybridNetwork, NodeId, TagId, Vertex};

/// Parameters of corpus generation.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct WalkConfig {
    /// Probability of stepping plain -> tag when both neighbor kinds exist.
    pub p: f64,
    /// Probability of transverse (similar-size) weighting in tag selection.
    pub q: f64,
    /// Maximum number of vertices per walk.
    pub walk_length: usize,
    pub walks_per_node: usize,
    /// Normalizer for community-size differences; `None` uses the largest
    /// community size in the hybrid network.
    pub size_scale: Option<f64>,
    pub rng_seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            p: 0.5,
            q: 0.5,
            walk_length: 40,
            walks_per_node: 10,
            size_scale: None,
            rng_seed: 1,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::invalid(format!("p must be in [0,1], got {}", self.p)));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::invalid(format!("q must be in [0,1], got {}", self.q)));
        }
        if self.walk_length < 2 {
            return Err(Error::invalid(format!(
                "walk_length must be >= 2, got {}",
                self.walk_length
            )));
        }
        if self.walks_per_node == 0 {
            return Err(Error::invalid("walks_per_node must be positive"));
        }
        if let Some(s) = self.size_scale {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::invalid(format!("size_scale must be positive, got {s}")));
            }
        }
        Ok(())
    }

    /// Size-difference normalizer against a concrete hybrid network.
    pub fn scale_for(&self, h: &HybridNetwork) -> f64 {
        self.size_scale
            .unwrap_or_else(|| h.max_community_size().max(1) as f64)
    }
}

/// A walk: vertex sequence of length <= walk_length, consecutive vertices
/// adjacent in the hybrid network, never two tags in a row.
pub type Walk = Vec<Vertex>;

fn walk_rng(rng_seed: u64, start: NodeId, walk_index: usize) -> ChaCha8Rng {
    crate::rng::stream(rng_seed, start as u64, walk_index as u64)
}

fn weighted_choice<R: Rng>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        u -= w;
        if u < 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

/// Steps tag -> member, sampling proportional to the member's degree
/// centrality (uniform when every member is isolated). `None` on a
/// memberless tag, which terminates the walk.
pub fn step_from_tag<R: Rng>(h: &HybridNetwork, t: TagId, rng: &mut R) -> Option<NodeId> {
    let members = h.members(t);
    if members.is_empty() {
        return None;
    }
    if members.len() == 1 {
        return Some(members[0].0);
    }
    let total: f64 = members.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return Some(members[rng.random_range(0..members.len())].0);
    }
    let mut u = rng.random::<f64>() * total;
    for &(m, w) in members {
        u -= w;
        if u < 0.0 {
            return Some(m);
        }
    }
    Some(members[members.len() - 1].0)
}

/// Steps plain node -> next vertex: a tag via [`select_tag`] with probability
/// `p` (when tags exist), else a plain neighbor proportional to edge weight.
/// A single neighbor kind forces that kind; an isolated vertex returns `None`.
pub fn step_from_plain<R: Rng>(
    h: &HybridNetwork,
    v: NodeId,
    t_last: Option<TagId>,
    cfg: &WalkConfig,
    rng: &mut R,
) -> Option<Vertex> {
    let plains = h.plain_neighbors(v);
    let tags = h.tag_neighbors(v);
    let take_tag = match (plains.is_empty(), tags.is_empty()) {
        (true, true) => return None,
        (true, false) => true,
        (false, true) => false,
        (false, false) => rng.random::<f64>() < cfg.p,
    };
    if take_tag {
        Some(Vertex::Tag(select_tag(h, tags, t_last, cfg, rng)))
    } else {
        let weights: Vec<f64> = plains.iter().map(|(_, w)| *w).collect();
        Some(Vertex::Node(plains[weighted_choice(&weights, rng)].0))
    }
}

/// Chooses one of `candidates`. Without a previous tag the choice is uniform.
/// Otherwise, with probability `q` the transverse weighting exp(-delta^2)
/// applies and with probability `1-q` the vertical weighting exp(+delta^2),
/// delta = (|C_t| - |C_t_last|) / size_scale, normalized over the candidates
/// by a max-shifted softmax.
pub fn select_tag<R: Rng>(
    h: &HybridNetwork,
    candidates: &[TagId],
    t_last: Option<TagId>,
    cfg: &WalkConfig,
    rng: &mut R,
) -> TagId {
    debug_assert!(!candidates.is_empty());
    if candidates.len() == 1 {
        return candidates[0];
    }
    let Some(last) = t_last else {
        return candidates[rng.random_range(0..candidates.len())];
    };
    let transverse = rng.random::<f64>() < cfg.q;
    let scale = cfg.scale_for(h);
    let last_size = h.community_size(last) as f64;
    let exponents: Vec<f64> = candidates
        .iter()
        .map(|&t| {
            let delta = (h.community_size(t) as f64 - last_size) / scale;
            let d2 = delta * delta;
            if transverse {
                -d2
            } else {
                d2
            }
        })
        .collect();
    let shift = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = exponents.iter().map(|e| (e - shift).exp()).collect();
    candidates[weighted_choice(&weights, rng)]
}

/// One walk from `start`, at most `cfg.walk_length` vertices. `t_last`
/// updates at every tag visit and persists across plain nodes in between.
pub fn generate_walk<R: Rng>(h: &HybridNetwork, start: NodeId, cfg: &WalkConfig, rng: &mut R) -> Walk {
    let mut walk = Vec::with_capacity(cfg.walk_length);
    let mut cur = Vertex::Node(start);
    walk.push(cur);
    let mut t_last: Option<TagId> = None;
    while walk.len() < cfg.walk_length {
        let next = match cur {
            Vertex::Node(v) => match step_from_plain(h, v, t_last, cfg, rng) {
                Some(x) => x,
                None => break,
            },
            Vertex::Tag(t) => match step_from_tag(h, t, rng) {
                Some(m) => Vertex::Node(m),
                None => break,
            },
        };
        if let Vertex::Tag(t) = next {
            t_last = Some(t);
        }
        walk.push(next);
        cur = next;
    }
    walk
}

fn corpus_starts(h: &HybridNetwork, cfg: &WalkConfig) -> Result<Vec<(NodeId, usize)>> {
    cfg.validate()?;
    if h.num_nodes() == 0 {
        return Err(Error::invalid("cannot walk an empty hybrid network"));
    }
    Ok((0..h.num_nodes())
        .flat_map(|v| (0..cfg.walks_per_node).map(move |i| (v, i)))
        .collect())
}

/// Serial corpus: `walks_per_node` walks from every plain node, deterministic
/// per seed.
pub fn generate_corpus(h: &HybridNetwork, cfg: &WalkConfig) -> Result<Vec<Walk>> {
    Ok(corpus_starts(h, cfg)?
        .into_iter()
        .map(|(v, i)| generate_walk(h, v, cfg, &mut walk_rng(cfg.rng_seed, v, i)))
        .collect())
}

/// Parallel corpus; byte-identical to [`generate_corpus`] because every walk
/// owns its own seed-derived stream and output keeps start-node order.
pub fn generate_corpus_parallel(h: &HybridNetwork, cfg: &WalkConfig) -> Result<Vec<Walk>> {
    Ok(corpus_starts(h, cfg)?
        .into_par_iter()
        .map(|(v, i)| generate_walk(h, v, cfg, &mut walk_rng(cfg.rng_seed, v, i)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_hybrid, network_from_parts, Centrality};
    use proptest::prelude::*;
    use rand::SeedableRng;

    const TRIALS: usize = 100_000;
    const TOL: f64 = 0.01;

    fn freq(hits: usize) -> f64 {
        hits as f64 / TRIALS as f64
    }

    #[test]
    fn tag_step_uniform_over_equal_degrees() {
        // two members, degree 2 each
        let g = network_from_parts(
            4,
            &[(0, 2), (0, 3), (1, 2), (1, 3)],
            &[(0, "t"), (1, "t")],
        )
        .unwrap();
        let h = build_hybrid(&g, Centrality::Degree);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut zero = 0;
        for _ in 0..TRIALS {
            if step_from_tag(&h, 0, &mut rng).unwrap() == 0 {
                zero += 1;
            }
        }
        assert!((freq(zero) - 0.5).abs() < TOL);
    }

    #[test]
    fn tag_step_weighted_by_degree() {
        // members with degrees 3 and 1 -> probabilities 0.75 / 0.25
        let g = network_from_parts(
            5,
            &[(0, 1), (0, 2), (0, 3), (4, 1)],
            &[(0, "t"), (4, "t")],
        )
        .unwrap();
        let h = build_hybrid(&g, Centrality::Degree);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut first = 0;
        for _ in 0..TRIALS {
            if step_from_tag(&h, 0, &mut rng).unwrap() == 0 {
                first += 1;
            }
        }
        assert!((freq(first) - 0.75).abs() < TOL);
    }

    #[test]
    fn tag_step_single_member() {
        let g = network_from_parts(2, &[(0, 1)], &[(1, "t")]).unwrap();
        let h = build_hybrid(&g, Centrality::Degree);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            assert_eq!(step_from_tag(&h, 0, &mut rng), Some(1));
        }
    }

    #[test]
    fn tag_step_isolated_members_fall_back_to_uniform() {
        let mut g = network_from_parts(1, &[], &[(0, "t")]).unwrap();
        let b = g.add_node("b");
        let t = 0;
        g.tag_node(b, t).unwrap();
        let h = build_hybrid(&g, Centrality::Degree);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut zero = 0;
        for _ in 0..TRIALS {
            if step_from_tag(&h, t, &mut rng).unwrap() == 0 {
                zero += 1;
            }
        }
        assert!((freq(zero) - 0.5).abs() < TOL);
    }

    /// Node 0 with 2 plain and 2 tag neighbors.
    fn mixed_neighborhood() -> HybridNetwork {
        let g = network_from_parts(3, &[(0, 1), (0, 2)], &[(0, "a"), (0, "b")]).unwrap();
        build_hybrid(&g, Centrality::Degree)
    }

    #[test]
    fn plain_step_boundary_p() {
        let h = mixed_neighborhood();
        let mut cfg = WalkConfig { p: 1.0, ..WalkConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            assert!(step_from_plain(&h, 0, None, &cfg, &mut rng).unwrap().is_tag());
        }
        cfg.p = 0.0;
        for _ in 0..1000 {
            assert!(!step_from_plain(&h, 0, None, &cfg, &mut rng).unwrap().is_tag());
        }
    }

    #[test]
    fn plain_step_mixes_at_p_half() {
        let h = mixed_neighborhood();
        let cfg = WalkConfig { p: 0.5, ..WalkConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut tags = 0;
        for _ in 0..TRIALS {
            if step_from_plain(&h, 0, None, &cfg, &mut rng).unwrap().is_tag() {
                tags += 1;
            }
        }
        assert!((freq(tags) - 0.5).abs() < TOL);
    }

    #[test]
    fn plain_step_forced_kinds() {
        // node 1 has only the plain neighbor 0; node 2 has only tag c
        let mut g = network_from_parts(2, &[(0, 1)], &[(0, "a")]).unwrap();
        let lone = g.add_node("2");
        let t = g.add_tag("c");
        g.tag_node(lone, t).unwrap();
        let h = build_hybrid(&g, Centrality::Degree);
        let cfg = WalkConfig { p: 0.0, ..WalkConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(step_from_plain(&h, 1, None, &cfg, &mut rng), Some(Vertex::Node(0)));
        // p=0 but tags are the only option
        assert_eq!(step_from_plain(&h, lone, None, &cfg, &mut rng), Some(Vertex::Tag(t)));
    }

    #[test]
    fn plain_step_isolated_vertex_terminates() {
        let mut g = network_from_parts(2, &[(0, 1)], &[]).unwrap();
        let iso = g.add_node("iso");
        let h = build_hybrid(&g, Centrality::Degree);
        let cfg = WalkConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(step_from_plain(&h, iso, None, &cfg, &mut rng), None);
        let w = generate_walk(&h, iso, &cfg, &mut rng);
        assert_eq!(w, vec![Vertex::Node(iso)]);
    }

    /// Sizes |C_a|=1, |C_b|=2, |C_last|=1 so that with size_scale=1 the
    /// candidates a, b sit at delta 0 and 1 relative to the last tag.
    fn delta_testbed() -> (HybridNetwork, Vec<TagId>, TagId) {
        let g = network_from_parts(
            3,
            &[],
            &[(0, "a"), (0, "b"), (1, "b"), (2, "last")],
        )
        .unwrap();
        let h = build_hybrid(&g, Centrality::Degree);
        (h, vec![0, 1], 2)
    }

    #[test]
    fn select_tag_transverse_ratio() {
        // exp(0) : exp(-1) -> e/(1+e) for the delta-0 candidate
        let (h, cands, last) = delta_testbed();
        let cfg = WalkConfig { q: 1.0, size_scale: Some(1.0), ..WalkConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut a = 0;
        for _ in 0..TRIALS {
            if select_tag(&h, &cands, Some(last), &cfg, &mut rng) == 0 {
                a += 1;
            }
        }
        assert!((freq(a) - 0.7310585786300049).abs() < TOL);
    }

    #[test]
    fn select_tag_vertical_ratio() {
        // exp(0) : exp(+1) -> 1/(1+e) for the delta-0 candidate
        let (h, cands, last) = delta_testbed();
        let cfg = WalkConfig { q: 0.0, size_scale: Some(1.0), ..WalkConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut a = 0;
        for _ in 0..TRIALS {
            if select_tag(&h, &cands, Some(last), &cfg, &mut rng) == 0 {
                a += 1;
            }
        }
        assert!((freq(a) - 0.2689414213699951).abs() < TOL);
    }

    #[test]
    fn select_tag_uniform_without_history_or_on_equal_sizes() {
        let (h, cands, last) = delta_testbed();
        for (t_last, q) in [(None, 0.3), (Some(last), 0.0), (Some(last), 1.0)] {
            // equal-size case: candidates {a, last} both have one member
            let cs = if t_last.is_none() { cands.clone() } else { vec![0, 2] };
            let cfg = WalkConfig { q, size_scale: Some(1.0), ..WalkConfig::default() };
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            let mut first = 0;
            for _ in 0..TRIALS {
                if select_tag(&h, &cs, t_last, &cfg, &mut rng) == cs[0] {
                    first += 1;
                }
            }
            assert!((freq(first) - 0.5).abs() < TOL, "t_last {t_last:?} q {q}");
        }
    }

    #[test]
    fn select_tag_huge_sizes_stay_finite() {
        // raw exp((big size difference)^2) would overflow without scaling
        let mut g = network_from_parts(0, &[], &[]).unwrap();
        for i in 0..2000 {
            g.add_node(i.to_string());
        }
        let (big, small) = (g.add_tag("big"), g.add_tag("small"));
        for v in 0..1999 {
            g.tag_node(v, big).unwrap();
        }
        g.tag_node(1999, small).unwrap();
        g.tag_node(1999, big).unwrap();
        let h = build_hybrid(&g, Centrality::Degree);
        let cfg = WalkConfig { q: 0.0, ..WalkConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let t = select_tag(&h, &[big, small], Some(small), &cfg, &mut rng);
            assert!(t == big || t == small);
        }
    }

    #[test]
    fn corpus_walk_count() {
        let edges: Vec<(usize, usize)> = (0..9).map(|i| (i, i + 1)).collect();
        let g = network_from_parts(10, &edges, &[]).unwrap();
        let h = build_hybrid(&g, Centrality::Degree);
        let cfg = WalkConfig { walks_per_node: 2, ..WalkConfig::default() };
        let walks = generate_corpus(&h, &cfg).unwrap();
        assert_eq!(walks.len(), 20);
    }

    #[test]
    fn two_node_walk_alternates() {
        let g = network_from_parts(2, &[(0, 1)], &[]).unwrap();
        let h = build_hybrid(&g, Centrality::Degree);
        let cfg = WalkConfig { walk_length: 4, ..WalkConfig::default() };
        for walk in generate_corpus(&h, &cfg).unwrap() {
            assert_eq!(walk.len(), 4);
            for (i, v) in walk.iter().enumerate() {
                let expect = (i + usize::from(walk[0] == Vertex::Node(1))) % 2;
                assert_eq!(*v, Vertex::Node(expect));
            }
        }
    }

    #[test]
    fn p_one_gives_single_plain_gaps() {
        // fully tagged graph, p=1: tag visits at every alternate position
        let g = network_from_parts(
            4,
            &[(0, 1), (1, 2), (2, 3), (3, 0)],
            &[(0, "a"), (1, "a"), (2, "b"), (3, "b")],
        )
        .unwrap();
        let h = build_hybrid(&g, Centrality::Degree);
        let cfg = WalkConfig { p: 1.0, walk_length: 21, ..WalkConfig::default() };
        for walk in generate_corpus(&h, &cfg).unwrap() {
            let tag_positions: Vec<usize> = walk
                .iter()
                .enumerate()
                .filter_map(|(i, v)| v.is_tag().then_some(i))
                .collect();
            assert!(!tag_positions.is_empty());
            for pair in tag_positions.windows(2) {
                assert_eq!(pair[1] - pair[0], 2);
            }
        }
    }

    #[test]
    fn intermediate_p_yields_multi_plain_gaps() {
        let g = network_from_parts(
            4,
            &[(0, 1), (1, 2), (2, 3), (3, 0)],
            &[(0, "a"), (1, "a"), (2, "b"), (3, "b")],
        )
        .unwrap();
        let h = build_hybrid(&g, Centrality::Degree);
        let cfg = WalkConfig { p: 0.4, walk_length: 40, walks_per_node: 20, ..WalkConfig::default() };
        let mut long_gap = false;
        for walk in generate_corpus(&h, &cfg).unwrap() {
            let tag_positions: Vec<usize> = walk
                .iter()
                .enumerate()
                .filter_map(|(i, v)| v.is_tag().then_some(i))
                .collect();
            if tag_positions.windows(2).any(|p| p[1] - p[0] > 2) {
                long_gap = true;
            }
        }
        assert!(long_gap);
    }

    #[test]
    fn corpus_deterministic_and_parallel_identical() {
        let g = network_from_parts(
            6,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)],
            &[(0, "a"), (1, "a"), (2, "b"), (3, "b"), (4, "c"), (5, "c")],
        )
        .unwrap();
        let h = build_hybrid(&g, Centrality::Degree);
        let cfg = WalkConfig { walks_per_node: 4, walk_length: 12, rng_seed: 42, ..WalkConfig::default() };
        let a = generate_corpus(&h, &cfg).unwrap();
        let b = generate_corpus(&h, &cfg).unwrap();
        let c = generate_corpus_parallel(&h, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let other = WalkConfig { rng_seed: 43, ..cfg };
        assert_ne!(a, generate_corpus(&h, &other).unwrap());
    }

    proptest! {
        #[test]
        fn walk_structure_invariants(g in crate::graph::tests::arb_network(), seed in any::<u64>()) {
            let h = build_hybrid(&g, Centrality::Degree);
            let cfg = WalkConfig {
                p: 0.6, q: 0.5, walk_length: 10, walks_per_node: 2,
                size_scale: None, rng_seed: seed,
            };
            let walks = generate_corpus(&h, &cfg).unwrap();
            prop_assert_eq!(walks.len(), h.num_nodes() * 2);
            for walk in &walks {
                prop_assert!(!walk.is_empty() && walk.len() <= 10);
                prop_assert!(!walk[0].is_tag());
                for pair in walk.windows(2) {
                    prop_assert!(!(pair[0].is_tag() && pair[1].is_tag()));
                    // adjacency check
                    match (pair[0], pair[1]) {
                        (Vertex::Node(u), Vertex::Node(v)) => {
                            prop_assert!(h.plain_neighbors(u).iter().any(|(n, _)| *n == v));
                        }
                        (Vertex::Node(u), Vertex::Tag(t)) => {
                            prop_assert!(h.tag_neighbors(u).contains(&t));
                        }
                        (Vertex::Tag(t), Vertex::Node(v)) => {
                            prop_assert!(h.members(t).iter().any(|(m, _)| *m == v));
                        }
                        (Vertex::Tag(_), Vertex::Tag(_)) => unreachable!(),
                    }
                }
            }
        }
    }
}
