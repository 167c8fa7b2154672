//! Text formats: network edge/tag files, walk corpora, embedding exports,
//! vocabulary and loss-trace tables, and flat key=value configuration.
//!
//! All writers are deterministic, and `save_network`'s output is canonical:
//! saving, loading, and saving again reproduces the first file byte for byte.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::embed::{from_vectors, EmbeddingModel, Space};
use crate::error::{Error, Result};
use crate::graph::{NodeId, TagId, TaggedNetwork, Vertex};
use crate::walk::Walk;

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.display().to_string(), line, msg: msg.into() }
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

/// Writes `content` to `path`, with the path in any error message.
pub fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)
        .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
}

/// Non-empty, non-comment lines of a file with their 1-based line numbers.
/// A line whose first non-blank character is `#` is a comment.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim_end_matches('\r');
        let lead = line.trim_start();
        if lead.is_empty() || lead.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

/// Loads a tagged network from an edge file and an optional tag file.
///
/// Edge file, tab-separated: `src<TAB>dst[<TAB>weight]` adds an edge (weight
/// defaults to 1), while a single-field line just declares an isolated node.
/// Nodes are interned in order of first appearance. Duplicate edges merge by
/// weight sum and are reported in the returned warnings.
///
/// Tag file: `node<TAB>tag1,tag2,...` per line; every node must already
/// exist, unlisted nodes stay untagged.
pub fn load_network(
    edge_path: &Path,
    tag_path: Option<&Path>,
) -> Result<(TaggedNetwork, Vec<String>)> {
    let mut g = TaggedNetwork::new();
    let mut warnings = Vec::new();
    let mut node_ids: HashMap<String, NodeId> = HashMap::new();

    let edge_text = read_to_string(edge_path)?;
    for (lineno, line) in content_lines(&edge_text) {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.iter().any(|f| f.is_empty()) {
            return Err(parse_err(edge_path, lineno, "empty field"));
        }
        let mut intern = |g: &mut TaggedNetwork, name: &str| -> NodeId {
            *node_ids
                .entry(name.to_string())
                .or_insert_with(|| g.add_node(name))
        };
        match fields.len() {
            1 => {
                intern(&mut g, fields[0]);
            }
            2 | 3 => {
                let u = intern(&mut g, fields[0]);
                let v = intern(&mut g, fields[1]);
                let weight: f64 = if fields.len() == 3 {
                    fields[2].parse().map_err(|_| {
                        parse_err(edge_path, lineno, format!("bad weight {:?}", fields[2]))
                    })?
                } else {
                    1.0
                };
                let merged = g
                    .add_edge(u, v, weight)
                    .map_err(|e| parse_err(edge_path, lineno, e.to_string()))?;
                if merged {
                    warnings.push(format!(
                        "{}:{lineno}: duplicate edge {}-{} merged",
                        edge_path.display(),
                        fields[0],
                        fields[1]
                    ));
                }
            }
            n => {
                return Err(parse_err(
                    edge_path,
                    lineno,
                    format!("expected 1 to 3 tab-separated fields, got {n}"),
                ));
            }
        }
    }

    if let Some(tag_path) = tag_path {
        let mut tag_ids: HashMap<String, TagId> = HashMap::new();
        let tag_text = read_to_string(tag_path)?;
        for (lineno, line) in content_lines(&tag_text) {
            let (node_name, tag_list) = line.split_once('\t').ok_or_else(|| {
                parse_err(tag_path, lineno, "expected `node<TAB>tag1,tag2,...`")
            })?;
            let &node = node_ids.get(node_name).ok_or_else(|| {
                parse_err(tag_path, lineno, format!("unknown node {node_name:?}"))
            })?;
            for tag_name in tag_list.split(',') {
                let tag_name = tag_name.trim();
                if tag_name.is_empty() {
                    return Err(parse_err(tag_path, lineno, "empty tag name"));
                }
                let tag = *tag_ids
                    .entry(tag_name.to_string())
                    .or_insert_with(|| g.add_tag(tag_name));
                g.tag_node(node, tag)
                    .map_err(|e| parse_err(tag_path, lineno, e.to_string()))?;
            }
        }
    }

    Ok((g, warnings))
}

/// Rejects names the line-oriented formats cannot carry back.
fn check_name(kind: &str, name: &str, comma: bool) -> Result<()> {
    let bad = name.is_empty()
        || name.starts_with('#')
        || name.contains('\t')
        || name.contains('\n')
        || name.contains('\r')
        || (comma && name.contains(','));
    if bad {
        return Err(Error::invalid(format!("{kind} name {name:?} is not serializable")));
    }
    Ok(())
}

/// Writes the canonical form of a network: every node declared on its own
/// line (so isolated nodes survive), then all edges with explicit weights;
/// the tag file lists each tagged node's tags sorted by name.
pub fn save_network(g: &TaggedNetwork, edge_path: &Path, tag_path: &Path) -> Result<()> {
    let mut edges = String::new();
    for v in 0..g.num_nodes() {
        check_name("node", g.node_name(v), false)?;
        let _ = writeln!(edges, "{}", g.node_name(v));
    }
    for &(u, v, w) in g.edges() {
        let _ = writeln!(edges, "{}\t{}\t{w}", g.node_name(u), g.node_name(v));
    }

    let mut tags = String::new();
    for v in 0..g.num_nodes() {
        if g.tags_of(v).is_empty() {
            continue;
        }
        let mut names: Vec<&str> = g.tags_of(v).iter().map(|&t| g.tag_name(t)).collect();
        for name in &names {
            check_name("tag", name, true)?;
        }
        names.sort_unstable();
        let _ = writeln!(tags, "{}\t{}", g.node_name(v), names.join(","));
    }

    write_text(edge_path, &edges)?;
    write_text(tag_path, &tags)
}

/// One walk per line, vertex tokens space-separated (`n<id>` / `t<id>`).
pub fn save_walks(walks: &[Walk], path: &Path) -> Result<()> {
    let mut out = String::new();
    for walk in walks {
        for (i, v) in walk.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    write_text(path, &out)
}

pub fn load_walks(path: &Path) -> Result<Vec<Walk>> {
    let text = read_to_string(path)?;
    let mut walks = Vec::new();
    for (lineno, line) in content_lines(&text) {
        let walk = line
            .split(' ')
            .map(|token| {
                Vertex::from_str(token)
                    .map_err(|e| parse_err(path, lineno, format!("{e}: {token:?}")))
            })
            .collect::<Result<Walk>>()?;
        walks.push(walk);
    }
    if walks.is_empty() {
        return Err(Error::invalid(format!("{}: no walks", path.display())));
    }
    Ok(walks)
}

/// Embedding export: header `count dim space`, then one line per token with
/// its input vector, all space-separated at full precision.
pub fn save_embeddings(model: &EmbeddingModel, path: &Path) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", model.len(), model.dim(), model.space());
    for (i, token) in model.tokens().iter().enumerate() {
        let _ = write!(out, "{token}");
        for x in model.input_vector(i) {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    write_text(path, &out)
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingModel> {
    let text = read_to_string(path)?;
    let mut lines = content_lines(&text);
    let (lineno, header) = lines
        .next()
        .ok_or_else(|| Error::invalid(format!("{}: empty embedding file", path.display())))?;
    let parts: Vec<&str> = header.split(' ').collect();
    if parts.len() != 3 {
        return Err(parse_err(path, lineno, "header must be `count dim space`"));
    }
    let count: usize = parts[0]
        .parse()
        .map_err(|_| parse_err(path, lineno, format!("bad token count {:?}", parts[0])))?;
    let dim: usize = parts[1]
        .parse()
        .map_err(|_| parse_err(path, lineno, format!("bad dimension {:?}", parts[1])))?;
    let space = Space::from_str(parts[2]).map_err(|e| parse_err(path, lineno, e.to_string()))?;

    let mut tokens = Vec::with_capacity(count);
    let mut input = Vec::with_capacity(count * dim);
    for (lineno, line) in lines {
        let mut fields = line.split(' ');
        let token = fields.next().expect("split yields at least one field");
        let token = Vertex::from_str(token)
            .map_err(|e| parse_err(path, lineno, format!("{e}: {token:?}")))?;
        let mut row = 0usize;
        for field in fields {
            let x: f64 = field
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("bad coordinate {field:?}")))?;
            input.push(x);
            row += 1;
        }
        if row != dim {
            return Err(parse_err(path, lineno, format!("expected {dim} coordinates, got {row}")));
        }
        tokens.push(token);
    }
    if tokens.len() != count {
        return Err(Error::invalid(format!(
            "{}: header promised {count} tokens, found {}",
            path.display(),
            tokens.len()
        )));
    }
    from_vectors(space, dim, tokens, input)
}

/// Vocabulary table: `token<TAB>frequency`, in index order.
pub fn save_vocab(vocab: &crate::corpus::Vocabulary, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (i, token) in vocab.tokens().iter().enumerate() {
        let _ = writeln!(out, "{token}\t{}", vocab.frequency(i));
    }
    write_text(path, &out)
}

/// Loss trace: `epoch<TAB>mean_loss`, epochs numbered from 0.
pub fn save_loss_trace(trace: &[f64], path: &Path) -> Result<()> {
    let mut out = String::new();
    for (epoch, loss) in trace.iter().enumerate() {
        let _ = writeln!(out, "{epoch}\t{loss}");
    }
    write_text(path, &out)
}

/// Key=value rendering of an evaluation report: task first, then metrics,
/// then `config.*` entries, then one `warning=` line per warning.
pub fn report_kv(report: &crate::eval::EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "task={}", report.task);
    for (name, value) in &report.metrics {
        let _ = writeln!(out, "{name}={value}");
    }
    for (key, value) in &report.config {
        let _ = writeln!(out, "config.{key}={value}");
    }
    for warning in &report.warnings {
        let _ = writeln!(out, "warning={warning}");
    }
    out
}

/// Flat `key=value` text, `#` comments and blank lines ignored; later
/// occurrences of a key override earlier ones.
pub fn load_kv(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = read_to_string(path)?;
    parse_kv(&text, path)
}

pub fn parse_kv(text: &str, path: &Path) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, line) in content_lines(text) {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(path, lineno, "expected `key=value`"))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(parse_err(path, lineno, "empty key"));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

pub fn format_kv(map: &BTreeMap<String, String>) -> String {
    let mut out = String::new();
    for (key, value) in map {
        let _ = writeln!(out, "{key}={value}");
    }
    out
}

/// Ground-truth label table: `name<TAB>label[<TAB>order]`; `kind` selects the
/// name column's universe ("node" or "tag") purely for error messages.
pub fn save_labels(rows: &[(String, usize, Option<usize>)], path: &Path) -> Result<()> {
    let mut out = String::new();
    for (name, label, order) in rows {
        match order {
            Some(o) => {
                let _ = writeln!(out, "{name}\t{label}\t{o}");
            }
            None => {
                let _ = writeln!(out, "{name}\t{label}");
            }
        }
    }
    write_text(path, &out)
}

/// Parses a label table into per-id labels using `lookup` to resolve names;
/// returns (labels, orders) where orders holds any third-column values.
pub fn load_labels(
    path: &Path,
    universe: usize,
    mut lookup: impl FnMut(&str) -> Option<usize>,
) -> Result<(Vec<usize>, Vec<Option<usize>>)> {
    let text = read_to_string(path)?;
    let mut labels: Vec<Option<usize>> = vec![None; universe];
    let mut orders: Vec<Option<usize>> = vec![None; universe];
    for (lineno, line) in content_lines(&text) {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(parse_err(path, lineno, "expected `name<TAB>label[<TAB>order]`"));
        }
        let id = lookup(fields[0])
            .ok_or_else(|| parse_err(path, lineno, format!("unknown name {:?}", fields[0])))?;
        let label: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad label {:?}", fields[1])))?;
        if labels[id].is_some() {
            return Err(parse_err(path, lineno, format!("duplicate entry for {:?}", fields[0])));
        }
        labels[id] = Some(label);
        if fields.len() == 3 {
            let order: usize = fields[2]
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("bad order {:?}", fields[2])))?;
            orders[id] = Some(order);
        }
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(id, l)| l.ok_or_else(|| Error::invalid(format!("{}: no label for id {id}", path.display()))))
        .collect::<Result<Vec<usize>>>()?;
    Ok((labels, orders))
}
