//! Multiplex network data model: node registry, layers, partitions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// Maps external node ids to dense indices `0..len()`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeRegistry {
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl NodeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of `id`, registering it if unseen.
    pub fn intern(&mut self, id: &str) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len();
        self.ids.push(id.to_owned());
        self.index.insert(id.to_owned(), i);
        i
    }

    pub fn get(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn id(&self, index: usize) -> &str {
        &self.ids[index]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Registry holding only the nodes flagged in `keep`, in original order.
    pub fn retain(&self, keep: &[bool]) -> NodeRegistry {
        let mut out = NodeRegistry::new();
        for (i, id) in self.ids.iter().enumerate() {
            if keep[i] {
                out.intern(id);
            }
        }
        out
    }
}

/// One directed link inside a layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    pub date: Option<NaiveDate>,
}

impl Link {
    pub fn new(source: usize, target: usize) -> Self {
        Link {
            source,
            target,
            weight: 1.0,
            date: None,
        }
    }

    pub fn weighted(source: usize, target: usize, weight: f64) -> Self {
        Link {
            weight,
            ..Link::new(source, target)
        }
    }

    pub fn on(mut self, date: NaiveDate) -> Self {
        self.date = Some(date);
        self
    }

    pub fn is_self_link(&self) -> bool {
        self.source == self.target
    }

    fn touches(&self, node: usize) -> bool {
        self.source == node || self.target == node
    }
}

/// A named directed layer.
///
/// Construction normalizes duplicate rows. Unweighted layers are link sets:
/// repeated `(source, target)` pairs collapse to one unit link that keeps
/// the earliest date. Weighted layers accumulate the weights of rows that
/// share `(source, target, date)`; rows on different dates stay separate so
/// that time windows can slice them.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    name: String,
    weighted: bool,
    links: Vec<Link>,
}

impl Layer {
    pub fn new(name: impl Into<String>, weighted: bool, links: Vec<Link>) -> Result<Self> {
        let name = name.into();
        for l in &links {
            if !(l.weight > 0.0 && l.weight.is_finite()) {
                return Err(Error::validation(format!(
                    "layer {name}: link {}->{} has non-positive weight {}",
                    l.source, l.target, l.weight
                )));
            }
        }
        let links = if weighted {
            accumulate(links)
        } else {
            deduplicate(links)
        };
        Ok(Layer { name, weighted, links })
    }

    /// Unweighted layer from `(source, target)` pairs.
    pub fn from_pairs(name: impl Into<String>, pairs: &[(usize, usize)]) -> Self {
        let links = pairs.iter().map(|&(s, t)| Link::new(s, t)).collect();
        Layer::new(name, false, links).expect("unit weights are valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// Largest node index referenced, if any.
    pub fn max_node(&self) -> Option<usize> {
        self.links.iter().map(|l| l.source.max(l.target)).max()
    }

    /// Sum of weights over non-self links.
    pub fn total_weight(&self) -> f64 {
        self.links.iter().filter(|l| !l.is_self_link()).map(|l| l.weight).sum()
    }

    /// Distinct `(source, target)` pairs with `source != target`, sorted.
    pub fn binary_pairs(&self) -> Vec<(usize, usize)> {
        let set: BTreeSet<(usize, usize)> = self
            .links
            .iter()
            .filter(|l| !l.is_self_link())
            .map(|l| (l.source, l.target))
            .collect();
        set.into_iter().collect()
    }

    pub fn is_timestamped(&self) -> bool {
        self.links.iter().all(|l| l.date.is_some())
    }

    /// Same layer with a subset of its links, in original order.
    pub fn with_links(&self, links: Vec<Link>) -> Layer {
        Layer {
            name: self.name.clone(),
            weighted: self.weighted,
            links,
        }
    }

    /// Links not incident to `node`. Indices are left unchanged.
    pub fn without_node(&self, node: usize) -> Layer {
        self.with_links(self.links.iter().filter(|l| !l.touches(node)).copied().collect())
    }

    /// Links with both endpoints kept, re-indexed through `remap`.
    pub fn remapped(&self, remap: &[Option<usize>]) -> Layer {
        let links = self
            .links
            .iter()
            .filter_map(|l| {
                Some(Link {
                    source: remap[l.source]?,
                    target: remap[l.target]?,
                    ..*l
                })
            })
            .collect();
        self.with_links(links)
    }
}

fn deduplicate(links: Vec<Link>) -> Vec<Link> {
    let mut slot: HashMap<(usize, usize), usize> = HashMap::with_capacity(links.len());
    let mut out: Vec<Link> = Vec::with_capacity(links.len());
    for l in links {
        match slot.get(&(l.source, l.target)) {
            Some(&i) => {
                let kept = &mut out[i];
                kept.date = match (kept.date, l.date) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                };
            }
            None => {
                slot.insert((l.source, l.target), out.len());
                out.push(Link { weight: 1.0, ..l });
            }
        }
    }
    out
}

fn accumulate(links: Vec<Link>) -> Vec<Link> {
    let mut slot: HashMap<(usize, usize, Option<NaiveDate>), usize> = HashMap::with_capacity(links.len());
    let mut out: Vec<Link> = Vec::with_capacity(links.len());
    for l in links {
        match slot.get(&(l.source, l.target, l.date)) {
            Some(&i) => out[i].weight += l.weight,
            None => {
                slot.insert((l.source, l.target, l.date), out.len());
                out.push(l);
            }
        }
    }
    out
}

/// Shared node set plus named layers. Every node belongs to every layer,
/// possibly as an isolated node.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MultiplexNetwork {
    registry: NodeRegistry,
    layers: Vec<Layer>,
}

impl MultiplexNetwork {
    pub fn new(registry: NodeRegistry) -> Self {
        MultiplexNetwork {
            registry,
            layers: Vec::new(),
        }
    }

    /// Network over nodes `0..n` named by their index.
    pub fn with_nodes(n: usize) -> Self {
        let mut registry = NodeRegistry::new();
        for i in 0..n {
            registry.intern(&i.to_string());
        }
        Self::new(registry)
    }

    pub fn registry(&self) -> &NodeRegistry {
        &self.registry
    }

    pub fn registry_mut(&mut self) -> &mut NodeRegistry {
        &mut self.registry
    }

    pub fn node_count(&self) -> usize {
        self.registry.len()
    }

    /// Adds or replaces the layer with the same name.
    pub fn insert_layer(&mut self, layer: Layer) -> Result<()> {
        if let Some(max) = layer.max_node() {
            if max >= self.registry.len() {
                return Err(Error::validation(format!(
                    "layer {} references node index {max} outside the registry ({} nodes)",
                    layer.name(),
                    self.registry.len()
                )));
            }
        }
        match self.layers.iter_mut().find(|l| l.name() == layer.name()) {
            Some(slot) => *slot = layer,
            None => self.layers.push(layer),
        }
        Ok(())
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer(&self, name: &str) -> Option<&Layer> {
        self.layers.iter().find(|l| l.name() == name)
    }

    pub fn layer_names(&self) -> Vec<&str> {
        self.layers.iter().map(|l| l.name()).collect()
    }

    /// Subnetwork on the flagged nodes, re-indexed densely in original
    /// order, together with the old-to-new index map.
    pub fn retain_nodes(&self, keep: &[bool]) -> (MultiplexNetwork, Vec<Option<usize>>) {
        assert_eq!(keep.len(), self.node_count(), "mask length must equal node count");
        let mut next = 0;
        let remap: Vec<Option<usize>> = keep
            .iter()
            .map(|&k| {
                k.then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        let net = MultiplexNetwork {
            registry: self.registry.retain(keep),
            layers: self.layers.iter().map(|l| l.remapped(&remap)).collect(),
        };
        (net, remap)
    }

    /// Network without `node` and its incident links in every layer.
    pub fn without_node(&self, node: usize) -> MultiplexNetwork {
        let mut keep = vec![true; self.node_count()];
        keep[node] = false;
        self.retain_nodes(&keep).0
    }
}

/// Total assignment of nodes to group labels.
///
/// `membership[i]` indexes into `labels`. Labels may be empty groups after
/// node filtering; [`Partition::compact`] drops those.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<String>,
    membership: Vec<usize>,
}

impl Partition {
    pub fn new(labels: Vec<String>, membership: Vec<usize>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::validation("a partition needs at least one label"));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::validation("partition labels must be distinct"));
        }
        if let Some(&g) = membership.iter().find(|&&g| g >= labels.len()) {
            return Err(Error::validation(format!(
                "group index {g} has no label ({} labels)",
                labels.len()
            )));
        }
        Ok(Partition { labels, membership })
    }

    /// Partition from one label per node; label order is lexicographic.
    pub fn from_node_labels<S: AsRef<str>>(node_labels: &[S]) -> Self {
        let labels: Vec<String> = node_labels
            .iter()
            .map(|s| s.as_ref().to_owned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let lookup: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let membership = node_labels.iter().map(|s| lookup[s.as_ref()]).collect();
        Partition {
            labels: if labels.is_empty() { vec!["all".into()] } else { labels },
            membership,
        }
    }

    /// Partition from arbitrary group ids. Groups are renumbered by first
    /// appearance and labelled `prefix0`, `prefix1`, ...
    pub fn from_membership(membership: &[usize], prefix: &str) -> Self {
        let mut renumber: HashMap<usize, usize> = HashMap::new();
        let membership: Vec<usize> = membership
            .iter()
            .map(|g| {
                let next = renumber.len();
                *renumber.entry(*g).or_insert(next)
            })
            .collect();
        let count = renumber.len().max(1);
        let labels = (0..count).map(|g| format!("{prefix}{g}")).collect();
        Partition { labels, membership }
    }

    pub fn single_group(n: usize) -> Self {
        Partition {
            labels: vec!["all".into()],
            membership: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.membership.len()
    }

    pub fn is_empty(&self) -> bool {
        self.membership.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    pub fn membership(&self) -> &[usize] {
        &self.membership
    }

    pub fn group_of(&self, node: usize) -> usize {
        self.membership[node]
    }

    pub fn label_of(&self, node: usize) -> &str {
        &self.labels[self.membership[node]]
    }

    pub fn group_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.labels.len()];
        for &g in &self.membership {
            sizes[g] += 1;
        }
        sizes
    }

    /// Node indices of every group, in label order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.labels.len()];
        for (i, &g) in self.membership.iter().enumerate() {
            out[g].push(i);
        }
        out
    }

    /// Restriction to the flagged nodes, re-indexed densely. Labels are kept.
    pub fn retain(&self, keep: &[bool]) -> Partition {
        Partition {
            labels: self.labels.clone(),
            membership: self
                .membership
                .iter()
                .zip(keep)
                .filter(|(_, &k)| k)
                .map(|(&g, _)| g)
                .collect(),
        }
    }

    /// Restriction to the listed original node indices, in that order.
    pub fn select(&self, nodes: &[usize]) -> Partition {
        Partition {
            labels: self.labels.clone(),
            membership: nodes.iter().map(|&i| self.membership[i]).collect(),
        }
    }

    /// Same partition with empty groups removed; label order preserved.
    pub fn compact(&self) -> Partition {
        let sizes = self.group_sizes();
        let mut remap = vec![usize::MAX; self.labels.len()];
        let mut labels = Vec::new();
        for (g, label) in self.labels.iter().enumerate() {
            if sizes[g] > 0 {
                remap[g] = labels.len();
                labels.push(label.clone());
            }
        }
        if labels.is_empty() {
            return Partition::single_group(0);
        }
        Partition {
            labels,
            membership: self.membership.iter().map(|&g| remap[g]).collect(),
        }
    }

    /// Number of non-empty groups.
    pub fn occupied_groups(&self) -> usize {
        self.group_sizes().iter().filter(|&&s| s > 0).count()
    }

    /// Whether two partitions group nodes identically, ignoring labels.
    pub fn same_grouping(&self, other: &Partition) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut fwd: HashMap<usize, usize> = HashMap::new();
        let mut back: HashMap<usize, usize> = HashMap::new();
        self.membership
            .iter()
            .zip(&other.membership)
            .all(|(&a, &b)| *fwd.entry(a).or_insert(b) == b && *back.entry(b).or_insert(a) == a)
    }
}

/// Restricts `network` and `partition` to nodes whose label is not
/// `drop_label`. Dropped nodes lose all incident links in every layer.
pub fn filter_partition(
    network: &MultiplexNetwork,
    partition: &Partition,
    drop_label: &str,
) -> Result<(MultiplexNetwork, Partition)> {
    if partition.len() != network.node_count() {
        return Err(Error::validation(format!(
            "partition covers {} nodes but the network has {}",
            partition.len(),
            network.node_count()
        )));
    }
    let Some(drop) = partition.group_index(drop_label) else {
        return Ok((network.clone(), partition.clone()));
    };
    let keep: Vec<bool> = partition.membership().iter().map(|&g| g != drop).collect();
    let (net, _) = network.retain_nodes(&keep);
    Ok((net, partition.retain(&keep).compact()))
}

/// Mapping from raw self-reported affiliations to canonical party labels.
///
/// Text form, one rule per line:
///
/// ```text
/// # youth and local sections fold into the main party
/// SP-Jugend = SP
/// EDU = SVP
/// * = unaligned
/// ```
///
/// `*` names the label for everything unmapped. A raw string that equals a
/// canonical label maps to itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartyMergeConfig {
    mapping: BTreeMap<String, String>,
    unaligned: String,
}

pub const DEFAULT_UNALIGNED: &str = "unaligned";

impl Default for PartyMergeConfig {
    fn default() -> Self {
        PartyMergeConfig {
            mapping: BTreeMap::new(),
            unaligned: DEFAULT_UNALIGNED.to_owned(),
        }
    }
}

impl PartyMergeConfig {
    pub fn new(mapping: impl IntoIterator<Item = (String, String)>, unaligned: impl Into<String>) -> Self {
        PartyMergeConfig {
            mapping: mapping.into_iter().collect(),
            unaligned: unaligned.into(),
        }
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut config = PartyMergeConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    path: origin.to_owned(),
                    line: n + 1,
                    message: format!("expected `raw = canonical`, got `{line}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(Error::Parse {
                    path: origin.to_owned(),
                    line: n + 1,
                    message: "empty canonical label".into(),
                });
            }
            if key == "*" {
                config.unaligned = value.to_owned();
            } else {
                config.mapping.insert(key.to_owned(), value.to_owned());
            }
        }
        Ok(config)
    }

    pub fn unaligned_label(&self) -> &str {
        &self.unaligned
    }

    pub fn canonical_labels(&self) -> BTreeSet<&str> {
        self.mapping.values().map(String::as_str).collect()
    }

    /// Canonical label for one raw affiliation string.
    pub fn resolve(&self, raw: &str) -> &str {
        let raw = raw.trim();
        if let Some(label) = self.mapping.get(raw) {
            return label;
        }
        if !raw.is_empty() && self.mapping.values().any(|v| v == raw) {
            return self.mapping.values().find(|v| *v == raw).unwrap();
        }
        &self.unaligned
    }

    /// Labels every registered node; nodes without a raw entry are unaligned.
    pub fn apply(&self, registry: &NodeRegistry, raw: &HashMap<String, String>) -> Partition {
        let labels: Vec<&str> = registry
            .ids()
            .iter()
            .map(|id| raw.get(id).map_or(self.unaligned.as_str(), |r| self.resolve(r)))
            .collect();
        Partition::from_node_labels(&labels)
    }
}
