//! Tagged networks, ground-truth communities and the node-tag hybrid graph.
//!
//! A tagged network is an undirected weighted graph whose nodes carry sets of
//! categorical tags. Every tag induces a ground-truth community (the set of
//! nodes carrying it); two similarity measures between communities are
//! defined here, member similarity and social closeness. The hybrid network
//! unites plain nodes and tag nodes so random walks can traverse both
//! interaction edges (node-node) and affiliation edges (node-tag).

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type TagId = usize;

/// A vertex of the hybrid network: either a plain node or a tag node.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Vertex {
    Node(NodeId),
    Tag(TagId),
}

impl Vertex {
    pub fn is_tag(&self) -> bool {
        matches!(self, Vertex::Tag(_))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Node(id) => write!(f, "n{id}"),
            Vertex::Tag(id) => write!(f, "t{id}"),
        }
    }
}

impl std::str::FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_at(1.min(s.len()));
        let id: usize = rest
            .parse()
            .map_err(|_| Error::invalid(format!("bad vertex token `{s}`")))?;
        match kind {
            "n" => Ok(Vertex::Node(id)),
            "t" => Ok(Vertex::Tag(id)),
            _ => Err(Error::invalid(format!("bad vertex token `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeKind {
    Interaction,
    Affiliation,
}

/// Undirected weighted graph with per-node tag sets.
///
/// Node and tag ids are dense integers assigned at ingestion; human-readable
/// names live in side tables. Edges are stored once per unordered pair with
/// `u < v`, no self-loops.
#[derive(Clone, Debug, Default)]
pub struct TaggedNetwork {
    node_names: Vec<String>,
    tag_names: Vec<String>,
    edges: Vec<(NodeId, NodeId, f64)>,
    adjacency: Vec<Vec<(NodeId, f64)>>,
    tags_of: Vec<Vec<TagId>>,
}

impl TaggedNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a node with the given name, returning its dense id.
    pub fn add_node(&mut self, name: impl Into<String>) -> NodeId {
        let id = self.node_names.len();
        self.node_names.push(name.into());
        self.adjacency.push(Vec::new());
        self.tags_of.push(Vec::new());
        id
    }

    /// Registers a tag name, returning its dense id.
    pub fn add_tag(&mut self, name: impl Into<String>) -> TagId {
        let id = self.tag_names.len();
        self.tag_names.push(name.into());
        id
    }

    /// Adds an undirected edge. A repeated pair merges by summing weights and
    /// returns `true` so callers can surface a warning. Self-loops and
    /// non-positive weights are rejected.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId, weight: f64) -> Result<bool> {
        if u == v {
            return Err(Error::invalid(format!("self-loop on node {u}")));
        }
        if u >= self.node_names.len() || v >= self.node_names.len() {
            return Err(Error::invalid(format!("edge ({u},{v}) references unknown node")));
        }
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::invalid(format!("edge ({u},{v}) has non-positive weight {weight}")));
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        if let Some(e) = self.edges.iter_mut().find(|(x, y, _)| *x == a && *y == b) {
            e.2 += weight;
            for (n, w) in &mut self.adjacency[a] {
                if *n == b {
                    *w += weight;
                }
            }
            for (n, w) in &mut self.adjacency[b] {
                if *n == a {
                    *w += weight;
                }
            }
            return Ok(true);
        }
        self.edges.push((a, b, weight));
        self.adjacency[a].push((b, weight));
        self.adjacency[b].push((a, weight));
        Ok(false)
    }

    /// Attaches tag `t` to node `v` (idempotent).
    pub fn tag_node(&mut self, v: NodeId, t: TagId) -> Result<()> {
        if v >= self.node_names.len() {
            return Err(Error::invalid(format!("unknown node {v}")));
        }
        if t >= self.tag_names.len() {
            return Err(Error::invalid(format!("unknown tag {t}")));
        }
        if let Err(pos) = self.tags_of[v].binary_search(&t) {
            self.tags_of[v].insert(pos, t);
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.node_names.len()
    }

    pub fn num_tags(&self) -> usize {
        self.tag_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list: one entry per unordered pair, `u < v`, insertion order.
    pub fn edges(&self) -> &[(NodeId, NodeId, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, f64)] {
        &self.adjacency[v]
    }

    /// Tags of a node, sorted ascending.
    pub fn tags_of(&self, v: NodeId) -> &[TagId] {
        &self.tags_of[v]
    }

    pub fn node_name(&self, v: NodeId) -> &str {
        &self.node_names[v]
    }

    pub fn tag_name(&self, t: TagId) -> &str {
        &self.tag_names[t]
    }

    /// Weighted degree (strength) of a node: sum of incident interaction edge
    /// weights. Equals plain degree on unit-weight graphs.
    pub fn degree(&self, v: NodeId) -> f64 {
        self.adjacency[v].iter().map(|(_, w)| w).sum()
    }

    /// Ground-truth community of a tag. Errors if no node carries it.
    pub fn community(&self, t: TagId) -> Result<Community> {
        let members: Vec<NodeId> = (0..self.num_nodes())
            .filter(|&v| self.tags_of[v].binary_search(&t).is_ok())
            .collect();
        if members.is_empty() {
            return Err(Error::invalid(format!("tag {t} has no members")));
        }
        Ok(Community { tag: t, members })
    }

    /// Subgraph induced by `keep` (sorted, deduped inside). Node ids are
    /// re-densified in ascending order of the original ids; `keep_tags`
    /// controls whether tag assignments survive. Tag ids and names are
    /// preserved verbatim so vectors from different subgraphs stay aligned.
    pub fn induced_subgraph(&self, keep: &[NodeId], keep_tags: bool) -> Result<(TaggedNetwork, Vec<NodeId>)> {
        let mut ids: Vec<NodeId> = keep.to_vec();
        ids.sort_unstable();
        ids.dedup();
        if ids.is_empty() {
            return Err(Error::invalid("induced subgraph over an empty node set"));
        }
        if let Some(&bad) = ids.iter().find(|&&v| v >= self.num_nodes()) {
            return Err(Error::invalid(format!("unknown node {bad} in subgraph request")));
        }
        let mut new_id = vec![usize::MAX; self.num_nodes()];
        let mut sub = TaggedNetwork::new();
        for &v in &ids {
            new_id[v] = sub.add_node(self.node_names[v].clone());
        }
        for name in &self.tag_names {
            sub.add_tag(name.clone());
        }
        for &(u, v, w) in &self.edges {
            if new_id[u] != usize::MAX && new_id[v] != usize::MAX {
                sub.add_edge(new_id[u], new_id[v], w)?;
            }
        }
        if keep_tags {
            for &v in &ids {
                for &t in &self.tags_of[v] {
                    sub.tag_node(new_id[v], t)?;
                }
            }
        }
        Ok((sub, ids))
    }
}

/// The set of nodes labeled by one tag.
#[derive(Clone, Debug)]
pub struct Community {
    pub tag: TagId,
    pub members: Vec<NodeId>,
}

impl Community {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members.contains(&v)
    }
}

/// Value of a community similarity metric plus a degeneracy flag for the
/// zero-denominator case of social closeness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricValue {
    pub value: f64,
    pub degenerate: bool,
}

#[inline]
pub(crate) fn ratio_squared(common: usize, a: usize, b: usize) -> f64 {
    let c = common as f64;
    c * c / (a as f64 * b as f64)
}

/// Member similarity: squared common-member count over the product of the
/// community sizes. Symmetric, in [0, 1], equal to 1 iff the member sets match.
pub fn member_similarity(c1: &Community, c2: &Community) -> Result<f64> {
    if c1.is_empty() || c2.is_empty() {
        return Err(Error::invalid("member similarity of an empty community"));
    }
    let common = c1.members.iter().filter(|v| c2.contains(**v)).count();
    Ok(ratio_squared(common, c1.len(), c2.len()))
}

/// Social closeness: squared count of edges joining the two communities over
/// the product of each community's external edge counts. An edge counts
/// toward `Edge(C1,C2)` when one endpoint lies in C1 and the other in C2
/// (edges between shared members count once); `Edge(C,V-C)` counts edges with
/// exactly one endpoint in C. A zero denominator yields 0 with the
/// `degenerate` flag set.
pub fn social_closeness(c1: &Community, c2: &Community, g: &TaggedNetwork) -> Result<MetricValue> {
    if c1.is_empty() || c2.is_empty() {
        return Err(Error::invalid("social closeness of an empty community"));
    }
    let in1: Vec<bool> = membership_mask(c1, g.num_nodes());
    let in2: Vec<bool> = membership_mask(c2, g.num_nodes());
    let mut between = 0usize;
    let mut ext1 = 0usize;
    let mut ext2 = 0usize;
    for &(u, v, _) in g.edges() {
        if (in1[u] && in2[v]) || (in1[v] && in2[u]) {
            between += 1;
        }
        if in1[u] != in1[v] {
            ext1 += 1;
        }
        if in2[u] != in2[v] {
            ext2 += 1;
        }
    }
    if ext1 == 0 || ext2 == 0 {
        return Ok(MetricValue { value: 0.0, degenerate: true });
    }
    Ok(MetricValue {
        value: ratio_squared(between, ext1, ext2),
        degenerate: false,
    })
}

fn membership_mask(c: &Community, n: usize) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &v in &c.members {
        mask[v] = true;
    }
    mask
}

/// Centrality used to weight tag-to-member steps in the hybrid network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum Centrality {
    #[default]
    Degree,
}

/// Metric selector for ground-truth similarity matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimilarityMetric {
    MemberSimilarity,
    SocialCloseness,
}

impl std::fmt::Display for SimilarityMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SimilarityMetric::MemberSimilarity => write!(f, "member-similarity"),
            SimilarityMetric::SocialCloseness => write!(f, "social-closeness"),
        }
    }
}

impl std::str::FromStr for SimilarityMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "member-similarity" => Ok(SimilarityMetric::MemberSimilarity),
            "social-closeness" => Ok(SimilarityMetric::SocialCloseness),
            other => Err(Error::invalid(format!(
                "unknown similarity metric {other:?} (expected member-similarity or social-closeness)"
            ))),
        }
    }
}

/// Symmetric tag-by-tag similarity matrix with the list of degenerate pairs.
#[derive(Clone, Debug)]
pub struct SimilarityMatrix {
    pub n: usize,
    values: Vec<f64>,
    pub degenerate_pairs: Vec<(TagId, TagId)>,
}

impl SimilarityMatrix {
    /// Wraps an externally computed matrix, row-major with `n * n` entries.
    pub fn from_values(n: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), n * n, "similarity matrix must be square");
        SimilarityMatrix { n, values, degenerate_pairs: Vec::new() }
    }

    pub fn get(&self, i: TagId, j: TagId) -> f64 {
        self.values[i * self.n + j]
    }

    /// Row of similarities for tag `i`.
    pub fn row(&self, i: TagId) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

/// Ground-truth similarity between every pair of tags (the Theta(|T|^2)
/// oracle used by the evaluation protocols). Tags without members make the
/// input invalid.
pub fn pairwise_similarity_matrix(g: &TaggedNetwork, metric: SimilarityMetric) -> Result<SimilarityMatrix> {
    let n = g.num_tags();
    if n < 2 {
        return Err(Error::invalid("similarity matrix needs at least 2 tags"));
    }
    let communities: Vec<Community> = (0..n).map(|t| g.community(t)).collect::<Result<_>>()?;
    let mut values = vec![0.0; n * n];
    let mut degenerate_pairs = Vec::new();
    for i in 0..n {
        for j in i..n {
            let v = match metric {
                SimilarityMetric::MemberSimilarity => member_similarity(&communities[i], &communities[j])?,
                SimilarityMetric::SocialCloseness => {
                    let mv = social_closeness(&communities[i], &communities[j], g)?;
                    if mv.degenerate {
                        degenerate_pairs.push((i, j));
                    }
                    mv.value
                }
            };
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    Ok(SimilarityMatrix { n, values, degenerate_pairs })
}

/// Node-tag hybrid graph: interaction edges mirror the source network, one
/// affiliation edge joins each (member, tag) pair. The tag-side adjacency
/// carries the member's centrality as sampling weight for tag-to-plain steps.
#[derive(Clone, Debug)]
pub struct HybridNetwork {
    num_nodes: usize,
    num_tags: usize,
    plain_neighbors: Vec<Vec<(NodeId, f64)>>,
    tag_neighbors: Vec<Vec<TagId>>,
    members: Vec<Vec<(NodeId, f64)>>,
    community_size: Vec<usize>,
    max_community_size: usize,
}

impl HybridNetwork {
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_tags(&self) -> usize {
        self.num_tags
    }

    pub fn num_vertices(&self) -> usize {
        self.num_nodes + self.num_tags
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.num_nodes)
            .map(Vertex::Node)
            .chain((0..self.num_tags).map(Vertex::Tag))
    }

    /// Interaction neighbors of a plain node with edge weights.
    pub fn plain_neighbors(&self, v: NodeId) -> &[(NodeId, f64)] {
        &self.plain_neighbors[v]
    }

    /// Tag neighbors of a plain node (its tags), sorted ascending.
    pub fn tag_neighbors(&self, v: NodeId) -> &[TagId] {
        &self.tag_neighbors[v]
    }

    /// Members of a tag with their centrality sampling weights.
    pub fn members(&self, t: TagId) -> &[(NodeId, f64)] {
        &self.members[t]
    }

    pub fn community_size(&self, t: TagId) -> usize {
        self.community_size[t]
    }

    pub fn max_community_size(&self) -> usize {
        self.max_community_size
    }

    /// Full edge list: interaction edges first (mirroring the source network),
    /// then affiliation edges in (node, tag) order.
    pub fn edge_list(&self) -> Vec<(Vertex, Vertex, f64, EdgeKind)> {
        let mut out = Vec::new();
        for (u, nbrs) in self.plain_neighbors.iter().enumerate() {
            for &(v, w) in nbrs {
                if u < v {
                    out.push((Vertex::Node(u), Vertex::Node(v), w, EdgeKind::Interaction));
                }
            }
        }
        for (v, tags) in self.tag_neighbors.iter().enumerate() {
            for &t in tags {
                let w = self.members[t]
                    .iter()
                    .find(|(m, _)| *m == v)
                    .map(|(_, w)| *w)
                    .unwrap_or(0.0);
                out.push((Vertex::Node(v), Vertex::Tag(t), w, EdgeKind::Affiliation));
            }
        }
        out
    }
}

/// Derives the hybrid network. Interaction edges are copied verbatim; each
/// (node, tag) membership becomes one affiliation edge whose tag-to-plain
/// sampling weight is the member's centrality in the source network.
pub fn build_hybrid(g: &TaggedNetwork, centrality: Centrality) -> HybridNetwork {
    let Centrality::Degree = centrality;
    let num_nodes = g.num_nodes();
    let num_tags = g.num_tags();
    let mut members: Vec<Vec<(NodeId, f64)>> = vec![Vec::new(); num_tags];
    let mut tag_neighbors: Vec<Vec<TagId>> = vec![Vec::new(); num_nodes];
    for v in 0..num_nodes {
        let deg = g.degree(v);
        for &t in g.tags_of(v) {
            members[t].push((v, deg));
            tag_neighbors[v].push(t);
        }
    }
    let community_size: Vec<usize> = members.iter().map(Vec::len).collect();
    HybridNetwork {
        num_nodes,
        num_tags,
        plain_neighbors: (0..num_nodes).map(|v| g.neighbors(v).to_vec()).collect(),
        tag_neighbors,
        max_community_size: community_size.iter().copied().max().unwrap_or(0),
        community_size,
        members,
    }
}

/// Convenience constructor used across tests and the synthetic generators:
/// nodes named by index, unit-weight edges, tags as (node, tag-name) pairs.
pub fn network_from_parts(
    num_nodes: usize,
    edges: &[(NodeId, NodeId)],
    tags: &[(NodeId, &str)],
) -> Result<TaggedNetwork> {
    let mut g = TaggedNetwork::new();
    for i in 0..num_nodes {
        g.add_node(i.to_string());
    }
    for &(u, v) in edges {
        g.add_edge(u, v, 1.0)?;
    }
    let mut tag_ids: HashMap<&str, TagId> = HashMap::new();
    for &(v, name) in tags {
        let t = *tag_ids.entry(name).or_insert_with(|| g.add_tag(name));
        g.tag_node(v, t)?;
    }
    Ok(g)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn community_of(ids: &[NodeId]) -> Community {
        Community { tag: 0, members: ids.to_vec() }
    }

    #[test]
    fn member_similarity_matches_definition() {
        // C1={0,1}, C2={1,2} -> 1^2 / (2*2)
        let c1 = community_of(&[0, 1]);
        let c2 = community_of(&[1, 2]);
        assert_eq!(member_similarity(&c1, &c2).unwrap(), 0.25);
        assert_eq!(member_similarity(&c2, &c1).unwrap(), 0.25);
    }

    #[test]
    fn member_similarity_identical_and_disjoint() {
        let c1 = community_of(&[3, 5, 9]);
        assert_eq!(member_similarity(&c1, &c1).unwrap(), 1.0);
        let c2 = community_of(&[1, 2]);
        assert_eq!(member_similarity(&c1, &c2).unwrap(), 0.0);
    }

    #[test]
    fn member_similarity_rejects_empty() {
        let c1 = community_of(&[]);
        let c2 = community_of(&[1]);
        assert!(member_similarity(&c1, &c2).is_err());
    }

    #[test]
    fn social_closeness_path_graph() {
        // a-b-c with C1={a}, C2={c}: no direct edge, numerator 0
        let g = network_from_parts(3, &[(0, 1), (1, 2)], &[]).unwrap();
        let v = social_closeness(&community_of(&[0]), &community_of(&[2]), &g).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(!v.degenerate);
    }

    #[test]
    fn social_closeness_triangle() {
        let g = network_from_parts(3, &[(0, 1), (1, 2), (0, 2)], &[]).unwrap();
        let v = social_closeness(&community_of(&[0]), &community_of(&[1]), &g).unwrap();
        assert_eq!(v.value, 0.25);
    }

    #[test]
    fn social_closeness_degenerate_denominator() {
        // node 2 is isolated: C1={2} has no external edges
        let mut g = network_from_parts(2, &[(0, 1)], &[]).unwrap();
        g.add_node("2");
        let v = social_closeness(&community_of(&[2]), &community_of(&[0]), &g).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(v.degenerate);
    }

    #[test]
    fn hybrid_small_construction() {
        let g = network_from_parts(2, &[(0, 1)], &[(1, "t")]).unwrap();
        let h = build_hybrid(&g, Centrality::Degree);
        assert_eq!(h.num_vertices(), 3);
        let edges = h.edge_list();
        let interactions = edges.iter().filter(|e| e.3 == EdgeKind::Interaction).count();
        let affiliations = edges.iter().filter(|e| e.3 == EdgeKind::Affiliation).count();
        assert_eq!(interactions, 1);
        assert_eq!(affiliations, 1);
        assert_eq!(h.community_size(0), 1);
    }

    #[test]
    fn hybrid_weights_follow_degree() {
        // tag members with degrees 3 and 1 -> sampling weights 3:1
        let g = network_from_parts(
            5,
            &[(0, 1), (0, 2), (0, 3), (4, 1)],
            &[(0, "t"), (4, "t")],
        )
        .unwrap();
        let h = build_hybrid(&g, Centrality::Degree);
        let m = h.members(0);
        assert_eq!(m, &[(0, 3.0), (4, 1.0)]);
    }

    #[test]
    fn hybrid_without_tags_mirrors_source() {
        let g = network_from_parts(3, &[(0, 1), (1, 2)], &[]).unwrap();
        let h = build_hybrid(&g, Centrality::Degree);
        assert_eq!(h.num_tags(), 0);
        assert_eq!(h.edge_list().len(), g.num_edges());
    }

    #[test]
    fn isolated_untagged_node_is_retained() {
        let mut g = network_from_parts(2, &[(0, 1)], &[]).unwrap();
        let iso = g.add_node("iso");
        let h = build_hybrid(&g, Centrality::Degree);
        assert_eq!(h.num_nodes(), 3);
        assert!(h.plain_neighbors(iso).is_empty());
        assert!(h.tag_neighbors(iso).is_empty());
    }

    #[test]
    fn duplicate_edge_merges_weight() {
        let mut g = TaggedNetwork::new();
        g.add_node("a");
        g.add_node("b");
        assert!(!g.add_edge(0, 1, 1.0).unwrap());
        assert!(g.add_edge(1, 0, 1.0).unwrap());
        assert_eq!(g.edges(), &[(0, 1, 2.0)]);
        assert_eq!(g.degree(0), 2.0);
    }

    #[test]
    fn self_loop_rejected() {
        let mut g = TaggedNetwork::new();
        g.add_node("a");
        assert!(g.add_edge(0, 0, 1.0).is_err());
    }

    #[test]
    fn matrix_disjoint_tags_ms() {
        let g = network_from_parts(4, &[(0, 1), (2, 3)], &[(0, "a"), (1, "a"), (2, "b"), (3, "b")]).unwrap();
        let m = pairwise_similarity_matrix(&g, SimilarityMetric::MemberSimilarity).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.get(0, 0), 1.0);
        assert_eq!(m.get(1, 1), 1.0);
    }

    #[test]
    fn matrix_matches_per_pair_brute_force() {
        let g = network_from_parts(
            5,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)],
            &[(0, "x"), (1, "x"), (2, "y"), (3, "y"), (4, "z"), (0, "z")],
        )
        .unwrap();
        for metric in [SimilarityMetric::MemberSimilarity, SimilarityMetric::SocialCloseness] {
            let m = pairwise_similarity_matrix(&g, metric).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let (oi, oj) = (g.community(i).unwrap(), g.community(j).unwrap());
                    let expect = match metric {
                        SimilarityMetric::MemberSimilarity => brute_force_ms(&oi, &oj),
                        SimilarityMetric::SocialCloseness => brute_force_sc(&oi, &oj, &g),
                    };
                    assert_eq!(m.get(i, j), expect, "metric {metric:?} pair ({i},{j})");
                }
            }
        }
    }

    /// Independent oracle: direct set arithmetic over all nodes.
    pub(crate) fn brute_force_ms(c1: &Community, c2: &Community) -> f64 {
        let s1: std::collections::HashSet<_> = c1.members.iter().collect();
        let s2: std::collections::HashSet<_> = c2.members.iter().collect();
        let common = s1.intersection(&s2).count();
        ratio_squared(common, s1.len(), s2.len())
    }

    /// Independent oracle: per-edge membership tests straight from Def. 4.
    pub(crate) fn brute_force_sc(c1: &Community, c2: &Community, g: &TaggedNetwork) -> f64 {
        let s1: std::collections::HashSet<_> = c1.members.iter().copied().collect();
        let s2: std::collections::HashSet<_> = c2.members.iter().copied().collect();
        let mut between = 0usize;
        let mut ext1 = 0usize;
        let mut ext2 = 0usize;
        for &(u, v, _) in g.edges() {
            if (s1.contains(&u) && s2.contains(&v)) || (s1.contains(&v) && s2.contains(&u)) {
                between += 1;
            }
            if s1.contains(&u) ^ s1.contains(&v) {
                ext1 += 1;
            }
            if s2.contains(&u) ^ s2.contains(&v) {
                ext2 += 1;
            }
        }
        if ext1 == 0 || ext2 == 0 {
            0.0
        } else {
            ratio_squared(between, ext1, ext2)
        }
    }

    /// Random small tagged network for property tests.
    pub(crate) fn arb_network() -> impl Strategy<Value = TaggedNetwork> {
        (2usize..12, any::<u64>()).prop_map(|(n, seed)| {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut g = TaggedNetwork::new();
            for i in 0..n {
                g.add_node(i.to_string());
            }
            let num_tags = rng.random_range(1..=4usize);
            for t in 0..num_tags {
                g.add_tag(format!("t{t}"));
            }
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.random::<f64>() < 0.3 {
                        g.add_edge(u, v, 1.0).unwrap();
                    }
                }
            }
            for v in 0..n {
                for t in 0..num_tags {
                    if rng.random::<f64>() < 0.4 {
                        g.tag_node(v, t).unwrap();
                    }
                }
            }
            // every tag gets at least one member so communities exist
            for t in 0..num_tags {
                let v = rng.random_range(0..n);
                g.tag_node(v, t).unwrap();
            }
            g
        })
    }

    proptest! {
        #[test]
        fn metrics_are_symmetric(g in arb_network()) {
            for i in 0..g.num_tags() {
                for j in 0..g.num_tags() {
                    let (ci, cj) = (g.community(i).unwrap(), g.community(j).unwrap());
                    prop_assert_eq!(
                        member_similarity(&ci, &cj).unwrap(),
                        member_similarity(&cj, &ci).unwrap()
                    );
                    let a = social_closeness(&ci, &cj, &g).unwrap();
                    let b = social_closeness(&cj, &ci, &g).unwrap();
                    prop_assert_eq!(a, b);
                }
            }
        }

        #[test]
        fn member_similarity_bounded_by_one(g in arb_network()) {
            for i in 0..g.num_tags() {
                for j in 0..g.num_tags() {
                    let (ci, cj) = (g.community(i).unwrap(), g.community(j).unwrap());
                    let v = member_similarity(&ci, &cj).unwrap();
                    prop_assert!(v <= 1.0);
                    let same: bool = {
                        let a: std::collections::BTreeSet<_> = ci.members.iter().collect();
                        let b: std::collections::BTreeSet<_> = cj.members.iter().collect();
                        a == b
                    };
                    prop_assert_eq!(v == 1.0, same);
                }
            }
        }

        #[test]
        fn hybrid_structure_invariants(g in arb_network()) {
            let h = build_hybrid(&g, Centrality::Degree);
            let edges = h.edge_list();
            // no tag-tag edge, affiliation edges join exactly one node and one tag
            for (u, v, _, kind) in &edges {
                prop_assert!(!(u.is_tag() && v.is_tag()));
                match kind {
                    EdgeKind::Affiliation => prop_assert!(u.is_tag() != v.is_tag()),
                    EdgeKind::Interaction => prop_assert!(!u.is_tag() && !v.is_tag()),
                }
            }
            let interactions = edges.iter().filter(|e| e.3 == EdgeKind::Interaction).count();
            let affiliations = edges.iter().filter(|e| e.3 == EdgeKind::Affiliation).count();
            prop_assert_eq!(interactions, g.num_edges());
            let expected: usize = (0..g.num_nodes()).map(|v| g.tags_of(v).len()).sum();
            prop_assert_eq!(affiliations, expected);
        }
    }
}
