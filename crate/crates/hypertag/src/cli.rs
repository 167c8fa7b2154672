//! Command-line surface. Every subcommand resolves its settings from flags
//! over an optional flat key=value config file, writes its declared outputs
//! into `--out`, and drops a `manifest.txt` echoing the full resolved
//! configuration; rerunning a subcommand from its own manifest reproduces the
//! outputs byte for byte (serial mode).

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::corpus::{build_vocab, extract_pairs, noise_distribution};
use crate::embed::{ball, init_model, train, train_parallel, Space, TrainConfig};
use crate::error::{Error, Result};
use crate::eval::{
    classify_nodes, node_features, reconstruction_purity, similar_community_auc,
    stability_experiment, EvalReport, StabilityConfig, TagFeature,
};
use crate::graph::{
    build_hybrid, pairwise_similarity_matrix, Centrality, SimilarityMetric, TaggedNetwork, Vertex,
};
use crate::io;
use crate::pipeline::PipelineConfig;
use crate::synth::{gen_community_dataset, gen_tree_dataset, CommunitySpec, TreeSpec};
use crate::walk::{generate_corpus, generate_corpus_parallel, WalkConfig};

#[derive(Parser)]
#[command(
    name = "hypertag",
    version,
    about = "Tag and node embeddings for tagged networks, in Euclidean space or the Poincare ball"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Flat key=value config file; explicit flags override file entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WalkFlags {
    /// Probability of stepping from a plain node to one of its tags
    #[arg(long)]
    p: Option<f64>,
    /// Probability of transverse (similar-size) tag selection
    #[arg(long)]
    q: Option<f64>,
    /// Maximum vertices per walk
    #[arg(long)]
    walk_length: Option<usize>,
    #[arg(long)]
    walks_per_node: Option<usize>,
    /// Community-size normalizer for tag selection (default: largest community)
    #[arg(long)]
    size_scale: Option<f64>,
}

#[derive(Args)]
struct TrainFlags {
    /// Embedding space: euclidean or hyperbolic
    #[arg(long)]
    space: Option<Space>,
    /// Embedding dimension (default 10 hyperbolic, 64 euclidean)
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Negative samples per training pair
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Learning-rate factor applied to the first epoch
    #[arg(long)]
    burn_in: Option<f64>,
    /// Margin keeping hyperbolic vectors strictly inside the unit ball
    #[arg(long)]
    eps_ball: Option<f64>,
    /// Skip-gram context window
    #[arg(long)]
    window: Option<usize>,
    /// Exponent of the negative-sampling noise distribution
    #[arg(long)]
    noise_exponent: Option<f64>,
    /// Worker threads for lock-free parallel updates (0 = deterministic serial)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the hierarchical tree benchmark (leaves of a b-ary tree,
    /// ancestor tags, distance-decaying edges)
    SynthTree {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        branching: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
        /// Ancestor generations used as tags
        #[arg(long)]
        tag_orders: Option<usize>,
        #[arg(long)]
        p_sibling: Option<f64>,
        #[arg(long)]
        p_cross: Option<f64>,
        #[arg(long)]
        decay_base: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generate the nested community benchmark (categories over
    /// subcategories, two tags per node)
    SynthCommunities {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        categories: Option<usize>,
        #[arg(long)]
        subcats_per_cat: Option<usize>,
        #[arg(long)]
        nodes_per_subcat: Option<usize>,
        #[arg(long)]
        p_in: Option<f64>,
        #[arg(long)]
        p_cross: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Validate a network and write its canonical serialization
    Build {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        tags: Option<PathBuf>,
    },
    /// Sample a random-walk corpus over the node-tag hybrid graph
    Walk {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        tags: Option<PathBuf>,
        #[command(flatten)]
        walk: WalkFlags,
        /// Generate walks across start nodes in parallel (same output)
        #[arg(long)]
        parallel: Option<bool>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train embeddings on a walk corpus
    Train {
        #[command(flatten)]
        common: CommonArgs,
        /// Walk corpus from the `walk` subcommand
        #[arg(long)]
        walks: Option<PathBuf>,
        #[command(flatten)]
        train: TrainFlags,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Node classification from embedding features, reporting F1
    EvalClassify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        tags: Option<PathBuf>,
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Per-node class table: `node<TAB>class`
        #[arg(long)]
        node_labels: Option<PathBuf>,
        /// Tag block in the features: none, mean-vector, or one-hot
        #[arg(long)]
        tag_feature: Option<TagFeature>,
        #[arg(long)]
        train_fraction: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Similar-community detection AUC against a graph-derived ground truth
    EvalCommunity {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        tags: Option<PathBuf>,
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Ground truth: member-similarity or social-closeness
        #[arg(long)]
        metric: Option<SimilarityMetric>,
    },
    /// Cluster tag vectors with K-medoids and score purity against classes
    EvalPurity {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        tags: Option<PathBuf>,
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Per-tag class table: `tag<TAB>class[<TAB>order]`
        #[arg(long)]
        tag_labels: Option<PathBuf>,
        /// Cluster count (default: number of distinct classes)
        #[arg(long)]
        clusters: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Two-phase stability experiment over a sweep of known fractions
    EvalStability {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        tags: Option<PathBuf>,
        #[arg(long)]
        node_labels: Option<PathBuf>,
        /// Comma-separated fractions of nodes treated as known
        #[arg(long)]
        known_fractions: Option<String>,
        #[command(flatten)]
        walk: WalkFlags,
        #[command(flatten)]
        train: TrainFlags,
        #[arg(long)]
        train_fraction: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Dump embedding coordinates and norms as plot-ready TSV
    Export {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        embeddings: Option<PathBuf>,
    },
}

/// Flag-over-file-over-default settings resolution that remembers every
/// resolved value for the manifest.
struct Resolver {
    file: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Resolver {
    fn new(config: Option<&Path>) -> Result<Self> {
        let file = match config {
            Some(path) => io::load_kv(path)?,
            None => BTreeMap::new(),
        };
        Ok(Resolver { file, resolved: BTreeMap::new() })
    }

    fn parse_file_value<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.file.get(key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| Error::invalid(format!("config key {key}: {e} (value {raw:?})"))),
            None => Ok(None),
        }
    }

    fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + ToString,
        T::Err: std::fmt::Display,
    {
        let value = match flag {
            Some(v) => v,
            None => self.parse_file_value(key)?.unwrap_or(default),
        };
        self.resolved.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    fn get_opt<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr + ToString,
        T::Err: std::fmt::Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => self.parse_file_value(key)?,
        };
        if let Some(v) = &value {
            self.resolved.insert(key.to_string(), v.to_string());
        }
        Ok(value)
    }

    fn path(&mut self, key: &str, flag: Option<PathBuf>) -> Result<PathBuf> {
        let value = flag
            .or_else(|| self.file.get(key).map(PathBuf::from))
            .ok_or_else(|| Error::invalid(format!("missing --{key} (or config key {key})")))?;
        self.resolved.insert(key.to_string(), value.display().to_string());
        Ok(value)
    }

    fn path_opt(&mut self, key: &str, flag: Option<PathBuf>) -> Option<PathBuf> {
        let value = flag.or_else(|| self.file.get(key).map(PathBuf::from));
        if let Some(v) = &value {
            self.resolved.insert(key.to_string(), v.display().to_string());
        }
        value
    }

    fn out_dir(&mut self, flag: Option<PathBuf>) -> Result<PathBuf> {
        let out = self.path("out", flag)?;
        std::fs::create_dir_all(&out)
            .map_err(|e| Error::invalid(format!("cannot create {}: {e}", out.display())))?;
        Ok(out)
    }

    fn write_manifest(&self, command: &str, out: &Path) -> Result<()> {
        let mut map = self.resolved.clone();
        map.insert("command".to_string(), command.to_string());
        io::write_text(&out.join("manifest.txt"), &io::format_kv(&map))
    }
}

fn resolve_walk(r: &mut Resolver, f: &WalkFlags, seed: Option<u64>) -> Result<WalkConfig> {
    let defaults = WalkConfig::default();
    let cfg = WalkConfig {
        p: r.get("p", f.p, defaults.p)?,
        q: r.get("q", f.q, defaults.q)?,
        walk_length: r.get("walk-length", f.walk_length, defaults.walk_length)?,
        walks_per_node: r.get("walks-per-node", f.walks_per_node, defaults.walks_per_node)?,
        size_scale: r.get_opt("size-scale", f.size_scale)?,
        rng_seed: r.get("seed", seed, 1)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

struct ResolvedTrain {
    cfg: TrainConfig,
    window: usize,
    noise_exponent: f64,
    threads: usize,
}

fn resolve_train(r: &mut Resolver, f: &TrainFlags, seed: Option<u64>) -> Result<ResolvedTrain> {
    let space = r.get("space", f.space, Space::Hyperbolic)?;
    let defaults = TrainConfig::for_space(space);
    let cfg = TrainConfig {
        space,
        dim: r.get("dim", f.dim, defaults.dim)?,
        learning_rate: r.get("learning-rate", f.learning_rate, defaults.learning_rate)?,
        negatives: r.get("negatives", f.negatives, defaults.negatives)?,
        epochs: r.get("epochs", f.epochs, defaults.epochs)?,
        burn_in: r.get("burn-in", f.burn_in, defaults.burn_in)?,
        eps_ball: r.get("eps-ball", f.eps_ball, defaults.eps_ball)?,
        rng_seed: r.get("seed", seed, 1)?,
    };
    cfg.validate()?;
    let window = r.get("window", f.window, 5)?;
    if window == 0 {
        return Err(Error::invalid("window must be at least 1"));
    }
    let noise_exponent = r.get("noise-exponent", f.noise_exponent, 0.75)?;
    let threads = r.get("threads", f.threads, 0)?;
    Ok(ResolvedTrain { cfg, window, noise_exponent, threads })
}

fn load_network_reporting(edges: &Path, tags: Option<&Path>) -> Result<TaggedNetwork> {
    let (g, warnings) = io::load_network(edges, tags)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    Ok(g)
}

fn node_id_by_name(g: &TaggedNetwork) -> HashMap<String, usize> {
    (0..g.num_nodes()).map(|v| (g.node_name(v).to_string(), v)).collect()
}

fn tag_id_by_name(g: &TaggedNetwork) -> HashMap<String, usize> {
    (0..g.num_tags()).map(|t| (g.tag_name(t).to_string(), t)).collect()
}

fn save_report(out: &Path, report: &EvalReport) -> Result<()> {
    io::write_text(&out.join("report.txt"), &io::report_kv(report))?;
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::invalid(format!("cannot serialize report: {e}")))?;
    io::write_text(&out.join("report.json"), &format!("{json}\n"))
}

fn print_report(report: &EvalReport) {
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for (name, value) in &report.metrics {
        println!("{name}={value}");
    }
}

pub fn run() -> Result<()> {
    match Cli::parse().command {
        Command::SynthTree {
            common,
            branching,
            depth,
            tag_orders,
            p_sibling,
            p_cross,
            decay_base,
            seed,
        } => {
            let mut r = Resolver::new(common.config.as_deref())?;
            let out = r.out_dir(common.out)?;
            let defaults = TreeSpec::default();
            let spec = TreeSpec {
                branching: r.get("branching", branching, defaults.branching)?,
                depth: r.get("depth", depth, defaults.depth)?,
                tag_orders: r.get("tag-orders", tag_orders, defaults.tag_orders)?,
                p_sibling: r.get("p-sibling", p_sibling, defaults.p_sibling)?,
                p_cross: r.get("p-cross", p_cross, defaults.p_cross)?,
                decay_base: r.get("decay-base", decay_base, defaults.decay_base)?,
                seed: r.get("seed", seed, defaults.seed)?,
            };
            let data = gen_tree_dataset(&spec)?;
            let g = &data.network;
            io::save_network(g, &out.join("edges.tsv"), &out.join("tags.tsv"))?;
            let node_rows: Vec<(String, usize, Option<usize>)> = (0..g.num_nodes())
                .map(|v| (g.node_name(v).to_string(), data.node_branch[v], None))
                .collect();
            io::save_labels(&node_rows, &out.join("node_labels.tsv"))?;
            let tag_rows: Vec<(String, usize, Option<usize>)> = (0..g.num_tags())
                .map(|t| (g.tag_name(t).to_string(), data.tag_branch[t], Some(data.tag_order[t])))
                .collect();
            io::save_labels(&tag_rows, &out.join("tag_labels.tsv"))?;
            r.write_manifest("synth-tree", &out)?;
            println!(
                "synth-tree: {} nodes, {} tags, {} edges -> {}",
                g.num_nodes(),
                g.num_tags(),
                g.num_edges(),
                out.display()
            );
        }

        Command::SynthCommunities {
            common,
            categories,
            subcats_per_cat,
            nodes_per_subcat,
            p_in,
            p_cross,
            seed,
        } => {
            let mut r = Resolver::new(common.config.as_deref())?;
            let out = r.out_dir(common.out)?;
            let defaults = CommunitySpec::default();
            let spec = CommunitySpec {
                categories: r.get("categories", categories, defaults.categories)?,
                subcats_per_cat: r.get("subcats-per-cat", subcats_per_cat, defaults.subcats_per_cat)?,
                nodes_per_subcat: r.get(
                    "nodes-per-subcat",
                    nodes_per_subcat,
                    defaults.nodes_per_subcat,
                )?,
                p_in: r.get("p-in", p_in, defaults.p_in)?,
                p_cross: r.get("p-cross", p_cross, defaults.p_cross)?,
                seed: r.get("seed", seed, defaults.seed)?,
            };
            let data = gen_community_dataset(&spec)?;
            let g = &data.network;
            io::save_network(g, &out.join("edges.tsv"), &out.join("tags.tsv"))?;
            let node_rows: Vec<(String, usize, Option<usize>)> = (0..g.num_nodes())
                .map(|v| (g.node_name(v).to_string(), data.node_category[v], None))
                .collect();
            io::save_labels(&node_rows, &out.join("node_labels.tsv"))?;
            let tag_rows: Vec<(String, usize, Option<usize>)> = (0..g.num_tags())
                .map(|t| (g.tag_name(t).to_string(), data.tag_category[t], Some(data.tag_order[t])))
                .collect();
            io::save_labels(&tag_rows, &out.join("tag_labels.tsv"))?;
            r.write_manifest("synth-communities", &out)?;
            println!(
                "synth-communities: {} nodes, {} tags, {} edges -> {}",
                g.num_nodes(),
                g.num_tags(),
                g.num_edges(),
                out.display()
            );
        }

        Command::Build { common, edges, tags } => {
            let mut r = Resolver::new(common.config.as_deref())?;
            let out = r.out_dir(common.out)?;
            let edges = r.path("edges", edges)?;
            let tags = r.path_opt("tags", tags);
            let g = load_network_reporting(&edges, tags.as_deref())?;
            io::save_network(&g, &out.join("edges.tsv"), &out.join("tags.tsv"))?;
            let hybrid = build_hybrid(&g, Centrality::Degree);
            r.write_manifest("build", &out)?;
            println!(
                "build: {} nodes, {} tags, {} interaction edges, {} affiliation edges -> {}",
                g.num_nodes(),
                g.num_tags(),
                g.num_edges(),
                (0..g.num_nodes()).map(|v| g.tags_of(v).len()).sum::<usize>(),
                out.display()
            );
            let _ = hybrid;
        }

        Command::Walk { common, edges, tags, walk, parallel, seed } => {
            let mut r = Resolver::new(common.config.as_deref())?;
            let out = r.out_dir(common.out)?;
            let edges = r.path("edges", edges)?;
            let tags = r.path_opt("tags", tags);
            let cfg = resolve_walk(&mut r, &walk, seed)?;
            let parallel = r.get("parallel", parallel, false)?;
            let g = load_network_reporting(&edges, tags.as_deref())?;
            let hybrid = build_hybrid(&g, Centrality::Degree);
            let walks = if parallel {
                generate_corpus_parallel(&hybrid, &cfg)?
            } else {
                generate_corpus(&hybrid, &cfg)?
            };
            io::save_walks(&walks, &out.join("walks.txt"))?;
            r.write_manifest("walk", &out)?;
            let tokens: usize = walks.iter().map(Vec::len).sum();
            println!("walk: {} walks, {tokens} tokens -> {}", walks.len(), out.display());
        }

        Command::Train { common, walks, train: flags, seed } => {
            let mut r = Resolver::new(common.config.as_deref())?;
            let out = r.out_dir(common.out)?;
            let walks_path = r.path("walks", walks)?;
            let resolved = resolve_train(&mut r, &flags, seed)?;
            let walks = io::load_walks(&walks_path)?;
            let vocab = build_vocab(&walks)?;
            let pairs = extract_pairs(&walks, &vocab, resolved.window)?;
            let noise = noise_distribution(&vocab, resolved.noise_exponent)?;
            let cfg = &resolved.cfg;
            let mut model = init_model(&vocab, cfg.space, cfg.dim, cfg.rng_seed)?;
            let trace = if resolved.threads > 0 {
                train_parallel(&mut model, &pairs, &noise, cfg, resolved.threads)?
            } else {
                train(&mut model, &pairs, &noise, cfg)?
            };
            io::save_embeddings(&model, &out.join("embeddings.tsv"))?;
            io::save_vocab(&vocab, &out.join("vocab.tsv"))?;
            io::save_loss_trace(&trace, &out.join("loss.tsv"))?;
            r.write_manifest("train", &out)?;
            println!(
                "train: {} vectors of dimension {} in {} space, final mean loss {} -> {}",
                model.len(),
                cfg.dim,
                cfg.space,
                trace.last().copied().unwrap_or(f64::NAN),
                out.display()
            );
        }

        Command::EvalClassify {
            common,
            edges,
            tags,
            embeddings,
            node_labels,
            tag_feature,
            train_fraction,
            seed,
        } => {
            let mut r = Resolver::new(common.config.as_deref())?;
            let out = r.out_dir(common.out)?;
            let edges = r.path("edges", edges)?;
            let tags = r.path_opt("tags", tags);
            let embeddings = r.path("embeddings", embeddings)?;
            let labels_path = r.path("node-labels", node_labels)?;
            let tag_feature = r.get("tag-feature", tag_feature, TagFeature::MeanVector)?;
            let train_fraction = r.get("train-fraction", train_fraction, 0.8)?;
            let seed = r.get("seed", seed, 1)?;

            let g = load_network_reporting(&edges, tags.as_deref())?;
            let model = io::load_embeddings(&embeddings)?;
            let names = node_id_by_name(&g);
            let (labels, _) =
                io::load_labels(&labels_path, g.num_nodes(), |n| names.get(n).copied())?;
            let features = node_features(&model, &g, tag_feature)?;
            let mut report = classify_nodes(&features, &labels, train_fraction, seed)?;
            report.config.insert("tag_feature".to_string(), tag_feature.to_string());
            save_report(&out, &report)?;
            r.write_manifest("eval-classify", &out)?;
            print_report(&report);
        }

        Command::EvalCommunity { common, edges, tags, embeddings, metric } => {
            let mut r = Resolver::new(common.config.as_deref())?;
            let out = r.out_dir(common.out)?;
            let edges = r.path("edges", edges)?;
            let tags = r.path("tags", tags.clone())?;
            let embeddings = r.path("embeddings", embeddings)?;
            let metric = r.get("metric", metric, SimilarityMetric::MemberSimilarity)?;

            let g = load_network_reporting(&edges, Some(&tags))?;
            let model = io::load_embeddings(&embeddings)?;
            let gt = pairwise_similarity_matrix(&g, metric)?;
            if !gt.degenerate_pairs.is_empty() {
                eprintln!(
                    "warning: {} tag pairs had a degenerate (all-external-edges-zero) closeness",
                    gt.degenerate_pairs.len()
                );
            }
            let mut report = similar_community_auc(&model, &gt)?;
            report.config.insert("metric".to_string(), metric.to_string());
            save_report(&out, &report)?;
            r.write_manifest("eval-community", &out)?;
            print_report(&report);
        }

        Command::EvalPurity { common, edges, tags, embeddings, tag_labels, clusters, seed } => {
            let mut r = Resolver::new(common.config.as_deref())?;
            let out = r.out_dir(common.out)?;
            let edges = r.path("edges", edges)?;
            let tags = r.path("tags", tags.clone())?;
            let embeddings = r.path("embeddings", embeddings)?;
            let labels_path = r.path("tag-labels", tag_labels)?;
            let seed = r.get("seed", seed, 1)?;

            let g = load_network_reporting(&edges, Some(&tags))?;
            let model = io::load_embeddings(&embeddings)?;
            let names = tag_id_by_name(&g);
            let (classes, _) =
                io::load_labels(&labels_path, g.num_tags(), |n| names.get(n).copied())?;
            let distinct = classes.iter().collect::<std::collections::BTreeSet<_>>().len();
            let k = r.get("clusters", clusters, distinct)?;
            let report = reconstruction_purity(&model, &classes, k, seed)?;
            save_report(&out, &report)?;
            r.write_manifest("eval-purity", &out)?;
            print_report(&report);
        }

        Command::EvalStability {
            common,
            edges,
            tags,
            node_labels,
            known_fractions,
            walk,
            train: train_flags,
            train_fraction,
            seed,
        } => {
            let mut r = Resolver::new(common.config.as_deref())?;
            let out = r.out_dir(common.out)?;
            let edges = r.path("edges", edges)?;
            let tags = r.path_opt("tags", tags);
            let labels_path = r.path("node-labels", node_labels)?;
            let fractions_raw =
                r.get("known-fractions", known_fractions, "0.2,0.4,0.6,0.8".to_string())?;
            let walk_cfg = resolve_walk(&mut r, &walk, seed)?;
            let resolved = resolve_train(&mut r, &train_flags, seed)?;
            let train_fraction = r.get("train-fraction", train_fraction, 0.8)?;

            let mut fractions = Vec::new();
            for token in fractions_raw.split(',') {
                let token = token.trim();
                let f: f64 = token
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad known fraction {token:?}")))?;
                fractions.push((token.to_string(), f));
            }
            if fractions.is_empty() {
                return Err(Error::invalid("known-fractions must list at least one value"));
            }

            let g = load_network_reporting(&edges, tags.as_deref())?;
            let names = node_id_by_name(&g);
            let (labels, _) =
                io::load_labels(&labels_path, g.num_nodes(), |n| names.get(n).copied())?;
            let sample_seed = walk_cfg.rng_seed;
            let cfg = StabilityConfig {
                pipeline: PipelineConfig {
                    centrality: Centrality::Degree,
                    walk: walk_cfg,
                    window: resolved.window,
                    noise_exponent: resolved.noise_exponent,
                    train: resolved.cfg,
                    train_threads: resolved.threads,
                },
                train_fraction,
            };

            let mut sweep = String::from("# known_fraction\tmicro_f1\n");
            for (token, fraction) in &fractions {
                let result = stability_experiment(&g, &labels, *fraction, &cfg, sample_seed)?;
                let micro = result
                    .report
                    .metric("micro_f1")
                    .expect("classification reports carry micro_f1");
                let _ = writeln!(sweep, "{token}\t{micro}");
                io::write_text(
                    &out.join(format!("report_{token}.txt")),
                    &io::report_kv(&result.report),
                )?;
                println!("known_fraction={token} micro_f1={micro}");
            }
            io::write_text(&out.join("sweep.tsv"), &sweep)?;
            r.write_manifest("eval-stability", &out)?;
        }

        Command::Export { common, embeddings } => {
            let mut r = Resolver::new(common.config.as_deref())?;
            let out = r.out_dir(common.out)?;
            let embeddings = r.path("embeddings", embeddings)?;
            let model = io::load_embeddings(&embeddings)?;
            let mut text = String::from("# token\tkind\tnorm");
            for i in 0..model.dim() {
                let _ = write!(text, "\tx{i}");
            }
            text.push('\n');
            let mut max_norm: f64 = 0.0;
            for (i, token) in model.tokens().iter().enumerate() {
                let kind = match token {
                    Vertex::Node(_) => "node",
                    Vertex::Tag(_) => "tag",
                };
                let norm = ball::norm(model.input_vector(i));
                max_norm = max_norm.max(norm);
                let _ = write!(text, "{token}\t{kind}\t{norm}");
                for x in model.input_vector(i) {
                    let _ = write!(text, "\t{x}");
                }
                text.push('\n');
            }
            io::write_text(&out.join("points.tsv"), &text)?;
            r.write_manifest("export", &out)?;
            println!(
                "export: {} points in {} space, max norm {max_norm} -> {}",
                model.len(),
                model.space(),
                out.display()
            );
        }
    }
    Ok(())
}
