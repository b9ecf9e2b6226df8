//! Social-structure metrics of a group's internal network.
//!
//! All metrics here look at the binarized subgraph: a link counts once no
//! matter its weight or how often it was repeated, and self-links are
//! ignored.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{Layer, Partition};
use crate::par;

/// Simple directed graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
}

impl Digraph {
    /// Graph from arcs; duplicates and self-loops are dropped.
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for (s, t) in arcs {
            if s != t {
                out[s].push(t);
                inn[t].push(s);
            }
        }
        for list in out.iter_mut().chain(inn.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Digraph { out, inn }
    }

    /// Subgraph of `layer` induced by `members`; node `i` of the result is
    /// `members[i]`.
    pub fn induced(layer: &Layer, members: &[usize]) -> Self {
        let size = layer
            .max_node()
            .map_or(0, |m| m + 1)
            .max(members.iter().max().map_or(0, |m| m + 1));
        let mut local = vec![usize::MAX; size];
        for (i, &v) in members.iter().enumerate() {
            local[v] = i;
        }
        let arcs = layer.links().iter().filter_map(|l| {
            let (s, t) = (local[l.source], local[l.target]);
            (s != usize::MAX && t != usize::MAX).then_some((s, t))
        });
        Digraph::new(members.len(), arcs)
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn link_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.inn[v]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.inn[v].len()
    }

    /// Neighbors ignoring direction; a mutual pair appears once.
    pub fn undirected_neighbors(&self, v: usize) -> Vec<usize> {
        let mut all: Vec<usize> = self.out[v].iter().chain(&self.inn[v]).copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

/// `Σ_i (max_j k_in_j - k_in_i) / (n - 1)²`: 1 for an in-star, 0 when all
/// in-degrees agree.
pub fn in_degree_centralization(g: &Digraph) -> Result<f64> {
    let n = g.len();
    if n < 2 {
        return Err(Error::undefined(format!(
            "centralization needs at least 2 nodes, got {n}"
        )));
    }
    let degrees: Vec<usize> = (0..n).map(|v| g.in_degree(v)).collect();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let spread: usize = degrees.iter().map(|&d| max - d).sum();
    Ok(spread as f64 / ((n - 1) * (n - 1)) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    #[default]
    Directed,
    /// Links are traversable both ways.
    Symmetrized,
}

/// Mean shortest-path length over the ordered pairs that are connected.
/// `None` when no pair is.
pub fn average_path_length(g: &Digraph, mode: PathMode) -> Option<f64> {
    let n = g.len();
    let adjacency: Vec<Vec<usize>> = match mode {
        PathMode::Directed => g.out.clone(),
        PathMode::Symmetrized => (0..n).map(|v| g.undirected_neighbors(v)).collect(),
    };
    let per_source = par::map_range(n, |s| {
        let mut dist = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::from([s]);
        dist[s] = 0;
        let (mut total, mut pairs) = (0u64, 0u64);
        while let Some(v) = queue.pop_front() {
            for &u in &adjacency[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    total += dist[u] as u64;
                    pairs += 1;
                    queue.push_back(u);
                }
            }
        }
        (total, pairs)
    });
    let (total, pairs) = per_source
        .into_iter()
        .fold((0u64, 0u64), |(t, p), (a, b)| (t + a, p + b));
    (pairs > 0).then(|| total as f64 / pairs as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoreMode {
    /// Direction is dropped and mutual links merge into one edge.
    #[default]
    Undirected,
    /// Degree is in-degree plus out-degree, so mutual links count twice.
    TotalDegree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KCores {
    pub core: Vec<usize>,
    pub max_kcore: usize,
}

/// Neighbor lists used by the k-core computation, with multiplicity.
pub fn core_adjacency(g: &Digraph, mode: CoreMode) -> Vec<Vec<usize>> {
    (0..g.len())
        .map(|v| match mode {
            CoreMode::Undirected => g.undirected_neighbors(v),
            CoreMode::TotalDegree => g.out[v].iter().chain(&g.inn[v]).copied().collect(),
        })
        .collect()
}

/// Core numbers by bucket-ordered pruning.
pub fn kcore_decomposition(g: &Digraph, mode: CoreMode) -> KCores {
    let adj = core_adjacency(g, mode);
    let n = adj.len();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    // Nodes sorted by degree, with the start of each degree bucket.
    let mut bin = vec![0usize; max_degree + 2];
    for &d in &degree {
        bin[d + 1] += 1;
    }
    for d in 1..bin.len() {
        bin[d] += bin[d - 1];
    }
    let mut order = vec![0usize; n];
    let mut pos = vec![0usize; n];
    let mut next = bin.clone();
    for v in 0..n {
        pos[v] = next[degree[v]];
        order[pos[v]] = v;
        next[degree[v]] += 1;
    }
    for i in 0..n {
        let v = order[i];
        for &u in &adj[v] {
            if degree[u] > degree[v] {
                // Swap u to the front of its bucket, then shrink it.
                let du = degree[u];
                let first = bin[du];
                let w = order[first];
                if w != u {
                    order.swap(pos[u], first);
                    pos[w] = pos[u];
                    pos[u] = first;
                }
                bin[du] += 1;
                degree[u] -= 1;
            }
        }
    }
    let max_kcore = degree.iter().copied().max().unwrap_or(0);
    KCores {
        core: degree,
        max_kcore,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub group: String,
    pub n: usize,
    pub links: usize,
    pub in_degree_centralization: Option<f64>,
    pub avg_path_length: Option<f64>,
    pub max_kcore: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StructureOptions {
    pub paths: PathMode,
    pub cores: CoreMode,
}

/// Smallest group reported by default.
pub const DEFAULT_MIN_GROUP_SIZE: usize = 200;

/// One report per group with at least `min_group_size` members, in label
/// order.
pub fn structure_report(
    layer: &Layer,
    partition: &Partition,
    min_group_size: usize,
    options: StructureOptions,
) -> Vec<StructureReport> {
    let members = partition.members();
    let selected: Vec<usize> = (0..members.len())
        .filter(|&g| !members[g].is_empty() && members[g].len() >= min_group_size)
        .collect();
    par::map_slice(&selected, |&g| {
        let sub = Digraph::induced(layer, &members[g]);
        StructureReport {
            group: partition.labels()[g].clone(),
            n: sub.len(),
            links: sub.link_count(),
            in_degree_centralization: in_degree_centralization(&sub).ok(),
            avg_path_length: average_path_length(&sub, options.paths),
            max_kcore: kcore_decomposition(&sub, options.cores).max_kcore,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Digraph {
        Digraph::new(n, (0..n).flat_map(|i| (0..n).map(move |j| (i, j))))
    }

    #[test]
    fn centralization_fixed_points() {
        let star = Digraph::new(4, [(1, 0), (2, 0), (3, 0)]);
        assert_eq!(in_degree_centralization(&star).unwrap(), 1.0);
        assert_eq!(in_degree_centralization(&complete(5)).unwrap(), 0.0);
        // In-degrees (2, 1, 1, 0).
        let g = Digraph::new(4, [(1, 0), (2, 0), (0, 1), (3, 2)]);
        assert!((in_degree_centralization(&g).unwrap() - 4.0 / 9.0).abs() < 1e-15);
        assert!(in_degree_centralization(&Digraph::new(1, []))
            .unwrap_err()
            .is_undefined());
    }

    #[test]
    fn path_lengths() {
        let cycle = Digraph::new(3, [(0, 1), (1, 2), (2, 0)]);
        assert_eq!(average_path_length(&cycle, PathMode::Directed), Some(1.5));
        assert_eq!(average_path_length(&cycle, PathMode::Symmetrized), Some(1.0));
        assert_eq!(average_path_length(&complete(4), PathMode::Directed), Some(1.0));
        assert_eq!(average_path_length(&Digraph::new(3, []), PathMode::Directed), None);
    }

    #[test]
    fn cores() {
        let tri = [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0), (2, 3)];
        let k = kcore_decomposition(&Digraph::new(4, tri), CoreMode::Undirected);
        assert_eq!(k.core, vec![2, 2, 2, 1]);
        assert_eq!(k.max_kcore, 2);
        let k = kcore_decomposition(&Digraph::new(4, tri), CoreMode::TotalDegree);
        assert_eq!(k.core, vec![4, 4, 4, 1]);
        assert_eq!(
            kcore_decomposition(&Digraph::new(3, []), CoreMode::Undirected).core,
            vec![0, 0, 0]
        );
        assert_eq!(kcore_decomposition(&complete(6), CoreMode::Undirected).max_kcore, 5);
    }

    #[test]
    fn report_filters_by_size() {
        let layer = Layer::from_pairs("s", &[(0, 1), (1, 2), (3, 4)]);
        let p = Partition::from_membership(&[0, 0, 0, 1, 1], "g");
        let r = structure_report(&layer, &p, 3, StructureOptions::default());
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].group, "g0");
        assert_eq!(r[0].links, 2);
        assert_eq!(structure_report(&layer, &p, 2, StructureOptions::default()).len(), 2);
        assert!(structure_report(&layer, &p, 10, StructureOptions::default()).is_empty());
    }
}
