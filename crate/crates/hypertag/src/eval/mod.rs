//! Evaluation protocols over trained embeddings: node classification,
//! community similarity ranking, cluster purity, and a two-phase stability
//! experiment for unseen nodes.

pub mod kmedoids;
mod logreg;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embed::EmbeddingModel;
use crate::error::{Error, Result};
use crate::graph::{NodeId, SimilarityMatrix, TaggedNetwork, Vertex};
use crate::pipeline::{embed_network, PipelineConfig};
use kmedoids::{k_medoids, DistanceMatrix};

/// Outcome of one evaluation run: named metric values in [0, 1] plus an echo
/// of the settings that produced them.
#[derive(Clone, Debug, serde::Serialize)]
pub struct EvalReport {
    pub task: String,
    pub metrics: BTreeMap<String, f64>,
    pub config: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl EvalReport {
    fn new(task: &str) -> Self {
        EvalReport {
            task: task.to_string(),
            metrics: BTreeMap::new(),
            config: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }

    fn set(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.to_string(), value.to_string());
    }
}

/// Area under the ROC curve by the rank statistic, with midranks for tied
/// scores. Needs at least one positive and one negative label.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::invalid("scores and labels differ in length"));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::invalid(format!("non-finite score {bad}")));
    }
    let num_pos = labels.iter().filter(|&&l| l).count();
    let num_neg = labels.len() - num_pos;
    if num_pos == 0 || num_neg == 0 {
        return Err(Error::invalid("auc needs both positive and negative examples"));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut pos_rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            if labels[idx] {
                pos_rank_sum += midrank;
            }
        }
        i = j + 1;
    }
    let np = num_pos as f64;
    let nn = num_neg as f64;
    Ok((pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn))
}

/// How a node's tag memberships enter its classification features.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TagFeature {
    /// Node vector only.
    None,
    /// Node vector concatenated with the mean of its tags' vectors
    /// (zero block for untagged nodes).
    MeanVector,
    /// Node vector concatenated with a tag-membership indicator block;
    /// ignores tag geometry entirely, useful as a baseline.
    OneHot,
}

impl std::fmt::Display for TagFeature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TagFeature::None => write!(f, "none"),
            TagFeature::MeanVector => write!(f, "mean-vector"),
            TagFeature::OneHot => write!(f, "one-hot"),
        }
    }
}

impl std::str::FromStr for TagFeature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(TagFeature::None),
            "mean-vector" => Ok(TagFeature::MeanVector),
            "one-hot" => Ok(TagFeature::OneHot),
            other => Err(Error::invalid(format!(
                "unknown tag feature {other:?} (expected none, mean-vector, or one-hot)"
            ))),
        }
    }
}

/// Classification feature row for one node.
#[derive(Clone, Debug)]
pub struct NodeFeature {
    pub node: NodeId,
    pub vector: Vec<f64>,
}

/// Mean of the model's vectors for `tags`, skipping tags the model has never
/// seen; all-skipped or empty input gives the zero vector.
fn mean_tag_vector(model: &EmbeddingModel, tags: &[usize]) -> Vec<f64> {
    let mut acc = vec![0.0; model.dim()];
    let mut count = 0usize;
    for &t in tags {
        if let Some(idx) = model.index_of(Vertex::Tag(t)) {
            for (a, x) in acc.iter_mut().zip(model.input_vector(idx)) {
                *a += x;
            }
            count += 1;
        }
    }
    if count > 0 {
        for a in &mut acc {
            *a /= count as f64;
        }
    }
    acc
}

/// Builds one feature row per node of `g` from its embedding vector plus the
/// chosen tag block. Every node must be present in the model.
pub fn node_features(
    model: &EmbeddingModel,
    g: &TaggedNetwork,
    tag_feature: TagFeature,
) -> Result<Vec<NodeFeature>> {
    let mut rows = Vec::with_capacity(g.num_nodes());
    for node in 0..g.num_nodes() {
        let idx = model
            .index_of(Vertex::Node(node))
            .ok_or_else(|| Error::invalid(format!("node {node} has no embedding vector")))?;
        let mut vector = model.input_vector(idx).to_vec();
        match tag_feature {
            TagFeature::None => {}
            TagFeature::MeanVector => {
                vector.extend(mean_tag_vector(model, g.tags_of(node)));
            }
            TagFeature::OneHot => {
                let base = vector.len();
                vector.resize(base + g.num_tags(), 0.0);
                for &t in g.tags_of(node) {
                    vector[base + t] = 1.0;
                }
            }
        }
        rows.push(NodeFeature { node, vector });
    }
    Ok(rows)
}

/// Trains a one-vs-rest logistic regression on a seeded stratified split of
/// the feature rows and reports micro and macro F1 on the held-out part.
///
/// `labels` is indexed by node id. Classes with fewer than two members are
/// dropped with a warning; at least two classes must survive. Each surviving
/// class contributes at least one row to both sides of the split.
pub fn classify_nodes(
    features: &[NodeFeature],
    labels: &[usize],
    train_fraction: f64,
    seed: u64,
) -> Result<EvalReport> {
    if features.is_empty() {
        return Err(Error::invalid("no feature rows"));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "train_fraction must lie strictly between 0 and 1, got {train_fraction}"
        )));
    }
    let dim = features[0].vector.len();
    for f in features {
        if f.node >= labels.len() {
            return Err(Error::invalid(format!("node {} has no label", f.node)));
        }
        if f.vector.len() != dim {
            return Err(Error::invalid("feature rows differ in dimension"));
        }
    }

    let mut report = EvalReport::new("classify");
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (row, f) in features.iter().enumerate() {
        by_class.entry(labels[f.node]).or_default().push(row);
    }
    by_class.retain(|&class, members| {
        if members.len() < 2 {
            report
                .warnings
                .push(format!("class {class} excluded: fewer than 2 members"));
            false
        } else {
            true
        }
    });
    if by_class.len() < 2 {
        return Err(Error::invalid("classification needs at least 2 usable classes"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_rows = Vec::new();
    let mut test_rows = Vec::new();
    for members in by_class.values_mut() {
        members.shuffle(&mut rng);
        let take = ((train_fraction * members.len() as f64).round() as usize)
            .clamp(1, members.len() - 1);
        train_rows.extend_from_slice(&members[..take]);
        test_rows.extend_from_slice(&members[take..]);
    }

    let classes: Vec<usize> = by_class.keys().copied().collect();
    let x_train: Vec<&[f64]> = train_rows.iter().map(|&r| features[r].vector.as_slice()).collect();
    let y_train: Vec<usize> = train_rows.iter().map(|&r| labels[features[r].node]).collect();
    let model = logreg::fit(&x_train, &y_train, &classes, &logreg::FitConfig::default());

    let mut correct = 0usize;
    let mut tp: BTreeMap<usize, usize> = BTreeMap::new();
    let mut fp: BTreeMap<usize, usize> = BTreeMap::new();
    let mut fn_: BTreeMap<usize, usize> = BTreeMap::new();
    for &r in &test_rows {
        let truth = labels[features[r].node];
        let predicted = model.predict(&features[r].vector);
        if predicted == truth {
            correct += 1;
            *tp.entry(truth).or_default() += 1;
        } else {
            *fp.entry(predicted).or_default() += 1;
            *fn_.entry(truth).or_default() += 1;
        }
    }
    // single-label task: micro-averaged F1 equals plain accuracy
    let micro = correct as f64 / test_rows.len() as f64;
    let macro_f1 = classes
        .iter()
        .map(|c| {
            let tp = *tp.get(c).unwrap_or(&0) as f64;
            let fp = *fp.get(c).unwrap_or(&0) as f64;
            let fn_ = *fn_.get(c).unwrap_or(&0) as f64;
            let denom = 2.0 * tp + fp + fn_;
            if denom == 0.0 {
                0.0
            } else {
                2.0 * tp / denom
            }
        })
        .sum::<f64>()
        / classes.len() as f64;

    report.metrics.insert("micro_f1".into(), micro);
    report.metrics.insert("macro_f1".into(), macro_f1);
    report.set("train_fraction", train_fraction);
    report.set("rng_seed", seed);
    report.set("classes", classes.len());
    report.set("feature_dim", dim);
    report.set("train_rows", train_rows.len());
    report.set("test_rows", test_rows.len());
    Ok(report)
}

/// Ranks, for every tag, all other tags by embedding distance and scores how
/// well the nearest ones coincide with the most similar communities under the
/// ground-truth matrix. Over all ordered tag pairs (t, t'), the pair is
/// positive when t' attains the row maximum of t (ties all count); the score
/// is the negated model distance, and the result is the AUC of that ranking.
///
/// Tags without an embedding vector and tags whose similarity row is all zero
/// are excluded with a warning.
pub fn similar_community_auc(
    model: &EmbeddingModel,
    ground_truth: &SimilarityMatrix,
) -> Result<EvalReport> {
    let t = ground_truth.n;
    if t < 3 {
        return Err(Error::invalid("similarity ranking needs at least 3 tags"));
    }
    let mut report = EvalReport::new("similar-community");
    let mut included = Vec::new();
    for tag in 0..t {
        match model.index_of(Vertex::Tag(tag)) {
            Some(idx) => included.push((tag, idx)),
            None => report
                .warnings
                .push(format!("tag {tag} excluded: no embedding vector")),
        }
    }
    if included.len() < 3 {
        return Err(Error::invalid("fewer than 3 tags have embedding vectors"));
    }

    let mut scores = Vec::new();
    let mut labels = Vec::new();
    for &(a, ia) in &included {
        let row_max = (0..t)
            .filter(|&b| b != a)
            .map(|b| ground_truth.get(a, b))
            .fold(f64::NEG_INFINITY, f64::max);
        if row_max <= 0.0 {
            report
                .warnings
                .push(format!("tag {a} excluded: similarity row is all zero"));
            continue;
        }
        for &(b, ib) in &included {
            if b == a {
                continue;
            }
            scores.push(-model.distance(ia, ib));
            labels.push(ground_truth.get(a, b) == row_max);
        }
    }
    let value = auc(&scores, &labels)?;
    report.metrics.insert("auc".into(), value);
    report.set("tags", t);
    report.set("tags_included", included.len());
    report.set("pairs", scores.len());
    Ok(report)
}

/// Fraction of points whose cluster's dominant true class matches their own:
/// sum over clusters of the majority-class count, divided by the number of
/// points. Invariant under relabeling of either side.
pub fn purity(assignment: &[usize], classes: &[usize]) -> Result<f64> {
    if assignment.len() != classes.len() {
        return Err(Error::invalid("assignment and classes differ in length"));
    }
    if assignment.is_empty() {
        return Err(Error::invalid("purity of an empty clustering is undefined"));
    }
    let mut counts: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for (&a, &c) in assignment.iter().zip(classes) {
        *counts.entry(a).or_default().entry(c).or_default() += 1;
    }
    let majority_total: usize = counts
        .values()
        .map(|per_class| per_class.values().copied().max().unwrap_or(0))
        .sum();
    Ok(majority_total as f64 / assignment.len() as f64)
}

/// Clusters the tag vectors into `k` groups with K-medoids under the model's
/// own distance and reports the purity against `tag_classes` (indexed by tag
/// id). Tags without an embedding vector are excluded with a warning.
pub fn reconstruction_purity(
    model: &EmbeddingModel,
    tag_classes: &[usize],
    k: usize,
    seed: u64,
) -> Result<EvalReport> {
    if tag_classes.is_empty() {
        return Err(Error::invalid("no tags to cluster"));
    }
    let mut report = EvalReport::new("reconstruction-purity");
    let mut included = Vec::new();
    for tag in 0..tag_classes.len() {
        match model.index_of(Vertex::Tag(tag)) {
            Some(idx) => included.push((tag, idx)),
            None => report
                .warnings
                .push(format!("tag {tag} excluded: no embedding vector")),
        }
    }
    let dist = DistanceMatrix::tabulate(included.len(), |i, j| {
        model.distance(included[i].1, included[j].1)
    });
    let assignment = k_medoids(&dist, k, seed)?;
    let truth: Vec<usize> = included.iter().map(|&(tag, _)| tag_classes[tag]).collect();
    let value = purity(&assignment, &truth)?;
    report.metrics.insert("purity".into(), value);
    report.set("k", k);
    report.set("rng_seed", seed);
    report.set("tags", tag_classes.len());
    report.set("tags_included", included.len());
    Ok(report)
}

/// Settings for [`stability_experiment`]: one embedding pipeline shared by
/// both phases plus the classifier's split fraction.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct StabilityConfig {
    pub pipeline: PipelineConfig,
    pub train_fraction: f64,
}

/// Result of the stability experiment, keeping the phase-1 model around so
/// callers can verify the frozen tag vectors or export them.
#[derive(Debug)]
pub struct StabilityOutput {
    pub report: EvalReport,
    /// Model trained on the known subgraph with its tags; phase 2 never
    /// touches it, so its tag vectors are the frozen ones used as features.
    pub phase1: EmbeddingModel,
    /// Original ids of the sampled known nodes, ascending.
    pub known: Vec<NodeId>,
}

/// Measures how well embeddings survive the arrival of new nodes. A seeded
/// sample of `known_fraction` of the nodes is embedded together with all tags
/// (phase 1); the remaining nodes are embedded from scratch without tags on
/// their own induced subgraph (phase 2). Every node is then classified from
/// its node vector concatenated with the frozen phase-1 mean tag vector of
/// its tags, and the report carries the held-out F1 scores.
pub fn stability_experiment(
    g: &TaggedNetwork,
    labels: &[usize],
    known_fraction: f64,
    cfg: &StabilityConfig,
    seed: u64,
) -> Result<StabilityOutput> {
    let n = g.num_nodes();
    if n < 2 {
        return Err(Error::invalid("stability experiment needs at least 2 nodes"));
    }
    if labels.len() != n {
        return Err(Error::invalid("labels must cover every node"));
    }
    if !(known_fraction > 0.0 && known_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "known_fraction must lie strictly between 0 and 1, got {known_fraction}"
        )));
    }

    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let take = ((known_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let mut known = order[..take].to_vec();
    let mut unknown = order[take..].to_vec();
    known.sort_unstable();
    unknown.sort_unstable();

    let (g1, ids1) = g.induced_subgraph(&known, true)?;
    let phase1 = embed_network(&g1, &cfg.pipeline)?;
    let (g2, ids2) = g.induced_subgraph(&unknown, false)?;
    let phase2 = embed_network(&g2, &cfg.pipeline)?;

    let node_vector = |out: &crate::pipeline::EmbedOutput, sub: NodeId, orig: NodeId| {
        out.model
            .index_of(Vertex::Node(sub))
            .map(|idx| out.model.input_vector(idx).to_vec())
            .ok_or_else(|| Error::invalid(format!("node {orig} has no embedding vector")))
    };
    let mut features = Vec::with_capacity(n);
    for (sub, &orig) in ids1.iter().enumerate() {
        let mut vector = node_vector(&phase1, sub, orig)?;
        vector.extend(mean_tag_vector(&phase1.model, g.tags_of(orig)));
        features.push(NodeFeature { node: orig, vector });
    }
    for (sub, &orig) in ids2.iter().enumerate() {
        let mut vector = node_vector(&phase2, sub, orig)?;
        vector.extend(mean_tag_vector(&phase1.model, g.tags_of(orig)));
        features.push(NodeFeature { node: orig, vector });
    }
    features.sort_by_key(|f| f.node);

    let mut report = classify_nodes(
        &features,
        labels,
        cfg.train_fraction,
        crate::rng::splitmix64(seed),
    )?;
    report.task = "stability".to_string();
    report.set("known_fraction", known_fraction);
    report.set("known_nodes", known.len());
    report.set("new_nodes", unknown.len());
    report.set("sample_seed", seed);
    Ok(StabilityOutput { report, phase1: phase1.model, known })
}
