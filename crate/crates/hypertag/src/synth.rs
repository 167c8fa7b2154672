//! Synthetic tagged networks with planted structure, for benchmarks and the
//! acceptance suite. Both generators are deterministic in their seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{NodeId, TaggedNetwork};

/// Hard ceiling on generated node counts; the quadratic pair sweep below is
/// meant for desk-scale data.
const MAX_SYNTH_NODES: usize = 10_000;

/// Parameters of the hierarchical tree benchmark.
///
/// Nodes are the leaves of a complete `branching`-ary tree of the given
/// `depth`. Every leaf is tagged with its `tag_orders` nearest ancestors, so
/// order-1 tags are leaf parents, order-2 tags are grandparents, and so on.
/// Leaf pairs connect with probability `p_sibling` when they share a parent;
/// otherwise with `p_cross * decay_base^-(tree_distance - 4)`, where the tree
/// distance between two leaves is twice the number of levels up to their
/// lowest common ancestor. The nearest non-sibling tier (distance 4) thus
/// connects with exactly `p_cross`, and each tier further out is attenuated
/// by another factor of `decay_base` squared.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct TreeSpec {
    pub branching: usize,
    pub depth: usize,
    /// How many ancestor generations become tags (1 = parents only).
    pub tag_orders: usize,
    pub p_sibling: f64,
    pub p_cross: f64,
    pub decay_base: f64,
    pub seed: u64,
}

impl Default for TreeSpec {
    fn default() -> Self {
        TreeSpec {
            branching: 3,
            depth: 4,
            tag_orders: 2,
            p_sibling: 0.9,
            p_cross: 0.1,
            decay_base: 2.0,
            seed: 1,
        }
    }
}

impl TreeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.branching < 2 {
            return Err(Error::invalid("branching must be at least 2"));
        }
        if self.depth < 2 {
            return Err(Error::invalid("depth must be at least 2"));
        }
        if self.tag_orders == 0 || self.tag_orders >= self.depth {
            return Err(Error::invalid(format!(
                "tag_orders must lie in 1..depth, got {} for depth {}",
                self.tag_orders, self.depth
            )));
        }
        for (name, p) in [("p_sibling", self.p_sibling), ("p_cross", self.p_cross)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if !(self.decay_base > 1.0) {
            return Err(Error::invalid(format!(
                "decay_base must exceed 1, got {}",
                self.decay_base
            )));
        }
        Ok(())
    }

    fn leaves(&self) -> Result<usize> {
        self.branching
            .checked_pow(self.depth as u32)
            .filter(|&n| n <= MAX_SYNTH_NODES)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "tree with branching {} and depth {} exceeds {MAX_SYNTH_NODES} leaves",
                    self.branching, self.depth
                ))
            })
    }
}

/// A generated tree benchmark with its planted ground truth.
#[derive(Debug)]
pub struct TreeData {
    pub network: TaggedNetwork,
    /// Ancestor order of each tag (1 = leaf parent).
    pub tag_order: Vec<usize>,
    /// For each tag, the top-level subtree (child of the root) it sits in.
    pub tag_branch: Vec<usize>,
    /// For each leaf, its top-level subtree.
    pub node_branch: Vec<usize>,
}

/// Builds the tree benchmark. Tag ids are tier-major: all order-1 tags in
/// ancestor order, then all order-2 tags, and so on.
pub fn gen_tree_dataset(spec: &TreeSpec) -> Result<TreeData> {
    spec.validate()?;
    let leaves = spec.leaves()?;
    let b = spec.branching;

    let mut g = TaggedNetwork::new();
    for i in 0..leaves {
        g.add_node(format!("leaf{i}"));
    }

    let mut tag_order = Vec::new();
    let mut tag_branch = Vec::new();
    let mut tier_offset = Vec::with_capacity(spec.tag_orders);
    for order in 1..=spec.tag_orders {
        tier_offset.push(tag_order.len());
        let count = b.pow((spec.depth - order) as u32);
        let per_branch = b.pow((spec.depth - order - 1) as u32);
        for idx in 0..count {
            g.add_tag(format!("anc{order}_{idx}"));
            tag_order.push(order);
            tag_branch.push(idx / per_branch);
        }
    }
    for leaf in 0..leaves {
        for order in 1..=spec.tag_orders {
            let tag = tier_offset[order - 1] + leaf / b.pow(order as u32);
            g.tag_node(leaf, tag)?;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for i in 0..leaves {
        for j in (i + 1)..leaves {
            let up = levels_to_lca(i, j, b);
            let prob = if up == 1 {
                spec.p_sibling
            } else {
                spec.p_cross * spec.decay_base.powi(-(2 * up as i32 - 4))
            };
            if rng.random::<f64>() < prob {
                g.add_edge(i, j, 1.0)?;
            }
        }
    }

    let node_branch = (0..leaves).map(|i| i / b.pow((spec.depth - 1) as u32)).collect();
    Ok(TreeData { network: g, tag_order, tag_branch, node_branch })
}

/// Number of levels from the leaves up to the lowest common ancestor of two
/// distinct leaves of a complete `b`-ary tree.
fn levels_to_lca(mut i: usize, mut j: usize, b: usize) -> usize {
    let mut up = 0;
    while i != j {
        i /= b;
        j /= b;
        up += 1;
    }
    up
}

/// Parameters of the nested community benchmark.
///
/// Nodes come in `categories * subcats_per_cat * nodes_per_subcat` and every
/// node carries two tags: its subcategory and its category. Edge probability
/// has three tiers: `p_in` inside a subcategory, the midpoint
/// `(p_in + p_cross) / 2` across subcategories of one category, and `p_cross`
/// across categories.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct CommunitySpec {
    pub categories: usize,
    pub subcats_per_cat: usize,
    pub nodes_per_subcat: usize,
    pub p_in: f64,
    pub p_cross: f64,
    pub seed: u64,
}

impl Default for CommunitySpec {
    fn default() -> Self {
        CommunitySpec {
            categories: 6,
            subcats_per_cat: 5,
            nodes_per_subcat: 20,
            p_in: 0.3,
            p_cross: 0.01,
            seed: 1,
        }
    }
}

impl CommunitySpec {
    pub fn validate(&self) -> Result<()> {
        if self.categories < 2 {
            return Err(Error::invalid("need at least 2 categories"));
        }
        if self.subcats_per_cat == 0 || self.nodes_per_subcat == 0 {
            return Err(Error::invalid("subcats_per_cat and nodes_per_subcat must be positive"));
        }
        for (name, p) in [("p_in", self.p_in), ("p_cross", self.p_cross)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if self.p_in <= self.p_cross {
            return Err(Error::invalid(format!(
                "p_in must exceed p_cross, got {} <= {}",
                self.p_in, self.p_cross
            )));
        }
        Ok(())
    }

    fn nodes(&self) -> Result<usize> {
        self.categories
            .checked_mul(self.subcats_per_cat)
            .and_then(|n| n.checked_mul(self.nodes_per_subcat))
            .filter(|&n| n <= MAX_SYNTH_NODES)
            .ok_or_else(|| Error::invalid(format!("more than {MAX_SYNTH_NODES} nodes requested")))
    }
}

/// A generated community benchmark with its planted ground truth.
#[derive(Debug)]
pub struct CommunityData {
    pub network: TaggedNetwork,
    /// Category of every node.
    pub node_category: Vec<usize>,
    /// Category each tag belongs to.
    pub tag_category: Vec<usize>,
    /// Ancestor order of each tag: 1 for subcategory tags, 2 for category
    /// tags (mirrors the tree generator's convention).
    pub tag_order: Vec<usize>,
}

/// Builds the community benchmark. Subcategory tags come first
/// (category-major), then one tag per category; node ids are category-major
/// too.
pub fn gen_community_dataset(spec: &CommunitySpec) -> Result<CommunityData> {
    spec.validate()?;
    let n = spec.nodes()?;
    let (cats, subs, per) = (spec.categories, spec.subcats_per_cat, spec.nodes_per_subcat);

    let mut g = TaggedNetwork::new();
    for i in 0..n {
        g.add_node(format!("v{i}"));
    }
    let mut tag_category = Vec::new();
    let mut tag_order = Vec::new();
    for c in 0..cats {
        for s in 0..subs {
            g.add_tag(format!("sub{c}_{s}"));
            tag_category.push(c);
            tag_order.push(1);
        }
    }
    for c in 0..cats {
        g.add_tag(format!("cat{c}"));
        tag_category.push(c);
        tag_order.push(2);
    }

    let cat_of = |v: NodeId| v / (subs * per);
    let sub_of = |v: NodeId| (v / per) % subs;
    for v in 0..n {
        let (c, s) = (cat_of(v), sub_of(v));
        g.tag_node(v, c * subs + s)?;
        g.tag_node(v, cats * subs + c)?;
    }

    let mid = (spec.p_in + spec.p_cross) / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for i in 0..n {
        for j in (i + 1)..n {
            let prob = if cat_of(i) != cat_of(j) {
                spec.p_cross
            } else if sub_of(i) != sub_of(j) {
                mid
            } else {
                spec.p_in
            };
            if rng.random::<f64>() < prob {
                g.add_edge(i, j, 1.0)?;
            }
        }
    }

    let node_category = (0..n).map(cat_of).collect();
    Ok(CommunityData { network: g, node_category, tag_category, tag_order })
}
