//! Modularity-maximizing community detection.
//!
//! Four heuristics operate on a current partition:
//!
//! | tag | heuristic | from scratch starts at |
//! |-----|-----------|------------------------|
//! | `e` | extremal optimization, recursive bisection of every group | one group |
//! | `s` | leading-eigenvector bisection of every group | one group |
//! | `f` | greedy agglomeration of groups | singletons |
//! | `r` | single-node repositioning | singletons |
//!
//! A [`ComboScript`] such as `esrfr-30` chains them left to right. The
//! repetition count binds to every stochastic stage (`e`, `s`): the stage
//! runs that many independently seeded times from the current partition
//! and the best result is kept. `f` and `r` are deterministic and run once.
//! A portfolio runs several scripts and keeps the overall best.
//!
//! Heuristics only see nodes with at least one non-self link in the layer.
//! All other nodes form one extra group labelled [`ISOLATED_LABEL`], which
//! does not affect Q and is not counted in [`DetectionResult::group_count`].

mod agglomerate;
mod extremal;
mod graph;
mod reposition;
mod spectral;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modularity::q_modularity;
use crate::network::{Layer, Partition};
use crate::{par, seed};

use graph::{canonical, groups_of, membership_of, SymGraph};

pub const ISOLATED_LABEL: &str = "isolated";

/// The combination list applied to every layer by default.
pub const DEFAULT_PORTFOLIO: &[&str] = &["e-1", "esrfr-30", "r-1", "f-1", "s-10", "rfr-1", "rsrfr-30"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Heuristic {
    Extremal,
    Spectral,
    Fast,
    Reposition,
}

impl Heuristic {
    fn tag(self) -> char {
        match self {
            Heuristic::Extremal => 'e',
            Heuristic::Spectral => 's',
            Heuristic::Fast => 'f',
            Heuristic::Reposition => 'r',
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Heuristic::Extremal | Heuristic::Spectral)
    }
}

/// A chain of heuristics with a repetition count for the stochastic ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComboScript {
    stages: Vec<Heuristic>,
    repetitions: usize,
}

impl ComboScript {
    pub fn new(stages: Vec<Heuristic>, repetitions: usize) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::validation("combo script needs at least one stage"));
        }
        if repetitions == 0 {
            return Err(Error::validation("combo script repetitions must be positive"));
        }
        Ok(ComboScript { stages, repetitions })
    }

    pub fn stages(&self) -> &[Heuristic] {
        &self.stages
    }

    pub fn repetitions(&self) -> usize {
        self.repetitions
    }

    /// Runs of each stage, in order.
    pub fn runs(&self) -> impl Iterator<Item = (Heuristic, usize)> + '_ {
        self.stages
            .iter()
            .map(|&h| (h, if h.is_stochastic() { self.repetitions } else { 1 }))
    }
}

impl FromStr for ComboScript {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (letters, reps) = match s.split_once('-') {
            Some((l, r)) => (
                l,
                r.parse::<usize>()
                    .map_err(|_| Error::validation(format!("bad repetition count in `{s}`")))?,
            ),
            None => (s, 1),
        };
        let stages = letters
            .chars()
            .map(|c| match c {
                'e' => Ok(Heuristic::Extremal),
                's' => Ok(Heuristic::Spectral),
                'f' => Ok(Heuristic::Fast),
                'r' => Ok(Heuristic::Reposition),
                other => Err(Error::validation(format!("unknown heuristic `{other}` in `{s}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        ComboScript::new(stages, reps)
    }
}

impl fmt::Display for ComboScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in &self.stages {
            write!(f, "{}", h.tag())?;
        }
        write!(f, "-{}", self.repetitions)
    }
}

impl Serialize for ComboScript {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses a comma-separated list of scripts.
pub fn parse_portfolio(spec: &str) -> Result<Vec<ComboScript>> {
    let scripts = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<ComboScript>>>()?;
    if scripts.is_empty() {
        return Err(Error::validation("empty detection portfolio"));
    }
    Ok(scripts)
}

pub fn default_portfolio() -> Vec<ComboScript> {
    DEFAULT_PORTFOLIO
        .iter()
        .map(|s| s.parse().expect("valid builtin script"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionResult {
    #[serde(skip)]
    pub partition: Partition,
    /// Directed modularity of `partition`, recomputed by
    /// [`crate::modularity::q_modularity`].
    pub q: f64,
    pub script: ComboScript,
    pub seed: u64,
    /// Groups among nodes that have links in the layer.
    pub group_count: usize,
    /// Eigen-solves that did not converge and left their group unsplit.
    pub unconverged: usize,
}

/// Internal working state: membership over active nodes.
struct Run<'a> {
    graph: &'a SymGraph,
    membership: Option<Vec<usize>>,
    unconverged: usize,
}

impl<'a> Run<'a> {
    fn q(&self) -> f64 {
        match &self.membership {
            Some(m) => self.graph.modularity(m),
            None => f64::NEG_INFINITY,
        }
    }

    fn apply(&self, h: Heuristic, seed: u64) -> (Vec<usize>, usize) {
        let g = self.graph;
        let n = g.len();
        let current = self.membership.as_deref();
        match h {
            Heuristic::Fast => (agglomerate::agglomerate(g, current), 0),
            Heuristic::Reposition => {
                let mut m = current.map_or_else(|| (0..n).collect(), <[usize]>::to_vec);
                reposition::reposition(g, &mut m);
                (m, 0)
            }
            Heuristic::Extremal | Heuristic::Spectral => {
                let groups = match current {
                    Some(m) => groups_of(m),
                    None => vec![(0..n).collect()],
                };
                let mut rng = seed::rng(seed);
                let (groups, unconverged) = if h == Heuristic::Extremal {
                    (extremal::extremal(g, groups, &mut rng), 0)
                } else {
                    let mut stats = spectral::SpectralStats::default();
                    let out = spectral::spectral(g, groups, &mut rng, &mut stats);
                    (out, stats.unconverged)
                };
                (membership_of(&groups, n), unconverged)
            }
        }
    }
}

fn ranked(a: (f64, &[usize]), b: (f64, &[usize])) -> std::cmp::Ordering {
    // Higher Q first, then the lexicographically smaller canonical labeling.
    b.0.total_cmp(&a.0).then_with(|| canonical(a.1).cmp(&canonical(b.1)))
}

fn run_script(graph: &SymGraph, script: &ComboScript, seed: u64) -> (Vec<usize>, usize) {
    let mut run = Run {
        graph,
        membership: None,
        unconverged: 0,
    };
    let label = script.to_string();
    for (stage, (h, reps)) in script.runs().enumerate() {
        let trials = par::map_range(reps, |rep| {
            let s = seed::derive(seed, &label, (stage * 1_000_003 + rep) as u64);
            let (m, unconverged) = run.apply(h, s);
            (graph.modularity(&m), m, unconverged)
        });
        let mut best: Option<(f64, Vec<usize>)> = None;
        for (q, m, unconverged) in trials {
            run.unconverged += unconverged;
            let keep = match &best {
                None => true,
                Some((bq, bm)) => ranked((q, &m), (*bq, bm)).is_lt(),
            };
            if keep {
                best = Some((q, m));
            }
        }
        let (q, m) = best.expect("at least one repetition");
        // Stages never make the chain worse.
        if q >= run.q() {
            run.membership = Some(m);
        }
    }
    let membership = run.membership.unwrap_or_else(|| vec![0; graph.len()]);
    (membership, run.unconverged)
}

/// Expands active-node membership to a partition over all nodes.
fn finish(
    layer: &Layer,
    node_count: usize,
    graph: &SymGraph,
    membership: &[usize],
    script: ComboScript,
    seed: u64,
    unconverged: usize,
) -> Result<DetectionResult> {
    let labels = canonical(membership);
    let group_count = labels.iter().max().map_or(0, |g| g + 1);
    let mut full = vec![group_count; node_count];
    for (v, &node) in graph.nodes.iter().enumerate() {
        full[node] = labels[v];
    }
    let mut names: Vec<String> = (0..group_count).map(|g| format!("c{g}")).collect();
    if graph.len() < node_count {
        names.push(ISOLATED_LABEL.to_owned());
    }
    let partition = Partition::new(names, full)?;
    let q = q_modularity(layer, &partition)?;
    Ok(DetectionResult {
        partition,
        q,
        script,
        seed,
        group_count,
        unconverged,
    })
}

fn working_graph(layer: &Layer, node_count: usize) -> Result<SymGraph> {
    if let Some(max) = layer.max_node() {
        if max >= node_count {
            return Err(Error::validation(format!(
                "layer {} references node {max} beyond node count {node_count}",
                layer.name()
            )));
        }
    }
    let graph = SymGraph::new(layer, node_count);
    if graph.m <= 0.0 {
        return Err(Error::undefined(format!(
            "community detection on empty layer {}",
            layer.name()
        )));
    }
    Ok(graph)
}

/// Runs one combo script.
pub fn run_combo(layer: &Layer, node_count: usize, script: &ComboScript, seed: u64) -> Result<DetectionResult> {
    let graph = working_graph(layer, node_count)?;
    let (membership, unconverged) = run_script(&graph, script, seed);
    finish(
        layer,
        node_count,
        &graph,
        &membership,
        script.clone(),
        seed,
        unconverged,
    )
}

/// Runs every script and keeps the best partition. Script `k` uses the
/// seed derived from `seed` and the script's text.
pub fn run_portfolio(
    layer: &Layer,
    node_count: usize,
    portfolio: &[ComboScript],
    seed: u64,
) -> Result<DetectionResult> {
    if portfolio.is_empty() {
        return Err(Error::validation("empty detection portfolio"));
    }
    let graph = working_graph(layer, node_count)?;
    let runs = par::map_slice(portfolio, |script| {
        let s = seed::derive(seed, &script.to_string(), 0);
        let (m, unconverged) = run_script(&graph, script, s);
        (graph.modularity(&m), m, unconverged, script.clone(), s)
    });
    let best = runs
        .iter()
        .min_by(|a, b| ranked((a.0, &a.1), (b.0, &b.1)))
        .expect("non-empty portfolio");
    let unconverged = runs.iter().map(|r| r.2).sum();
    finish(layer, node_count, &graph, &best.1, best.3.clone(), best.4, unconverged)
}

pub fn detect_fast(layer: &Layer, node_count: usize, seed: u64) -> Result<DetectionResult> {
    run_combo(layer, node_count, &ComboScript::new(vec![Heuristic::Fast], 1)?, seed)
}

pub fn detect_spectral(layer: &Layer, node_count: usize, seed: u64) -> Result<DetectionResult> {
    run_combo(
        layer,
        node_count,
        &ComboScript::new(vec![Heuristic::Spectral], 1)?,
        seed,
    )
}

pub fn detect_extremal(layer: &Layer, node_count: usize, seed: u64) -> Result<DetectionResult> {
    run_combo(
        layer,
        node_count,
        &ComboScript::new(vec![Heuristic::Extremal], 1)?,
        seed,
    )
}

/// Repositions nodes of `start` until no single move raises Q.
///
/// Nodes without links keep their starting group.
pub fn refine_reposition(layer: &Layer, start: &Partition) -> Result<DetectionResult> {
    let n = start.len();
    let graph = working_graph(layer, n)?;
    let mut membership: Vec<usize> = graph.nodes.iter().map(|&v| start.group_of(v)).collect();
    reposition::reposition(&graph, &mut membership);
    let mut full = start.membership().to_vec();
    let offset = start.label_count();
    // Ids at or beyond `offset` are freshly opened groups.
    for (v, &node) in graph.nodes.iter().enumerate() {
        full[node] = membership[v];
    }
    let _ = offset;
    let partition = Partition::from_membership(&full, "c");
    let q = q_modularity(layer, &partition)?;
    let active: Vec<usize> = graph.nodes.iter().map(|&v| partition.group_of(v)).collect();
    let group_count = active.iter().collect::<std::collections::BTreeSet<_>>().len();
    Ok(DetectionResult {
        partition,
        q,
        script: ComboScript::new(vec![Heuristic::Reposition], 1)?,
        seed: 0,
        group_count,
        unconverged: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clique_pair(bridge: bool) -> Layer {
        let mut pairs = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                for j in 0..5 {
                    if i != j {
                        pairs.push((base + i, base + j));
                    }
                }
            }
        }
        if bridge {
            pairs.push((0, 5));
        }
        Layer::from_pairs("cliques", &pairs)
    }

    fn components() -> Partition {
        Partition::from_membership(&[0, 0, 0, 0, 0, 1, 1, 1, 1, 1], "c")
    }

    #[test]
    fn script_parsing() {
        let s: ComboScript = "esrfr-30".parse().unwrap();
        assert_eq!(s.stages().len(), 5);
        assert_eq!(s.repetitions(), 30);
        let runs: Vec<usize> = s.runs().map(|(_, r)| r).collect();
        assert_eq!(runs, vec![30, 30, 1, 1, 1]);
        assert_eq!(s.to_string(), "esrfr-30");
        assert!("x-1".parse::<ComboScript>().is_err());
        assert!("e-0".parse::<ComboScript>().is_err());
        assert!("-3".parse::<ComboScript>().is_err());
        assert!(parse_portfolio(" , ").is_err());
        assert_eq!(default_portfolio().len(), 7);
    }

    #[test]
    fn each_heuristic_splits_disconnected_cliques() {
        let layer = clique_pair(false);
        for r in [
            detect_fast(&layer, 10, 1).unwrap(),
            detect_spectral(&layer, 10, 1).unwrap(),
            detect_extremal(&layer, 10, 1).unwrap(),
        ] {
            assert!(
                r.partition.same_grouping(&components()),
                "{}: {:?}",
                r.script,
                r.partition
            );
            assert_eq!(r.group_count, 2);
            assert_eq!(r.q, q_modularity(&layer, &r.partition).unwrap());
        }
    }

    #[test]
    fn reposition_from_singletons_finds_cliques() {
        let layer = clique_pair(true);
        let start = Partition::from_membership(&(0..10).collect::<Vec<_>>(), "s");
        let before = q_modularity(&layer, &start).unwrap();
        let r = refine_reposition(&layer, &start).unwrap();
        assert!(r.q >= before);
        assert!(r.partition.same_grouping(&components()));
        let again = refine_reposition(&layer, &r.partition).unwrap();
        assert!(again.partition.same_grouping(&r.partition));
    }

    #[test]
    fn isolated_nodes_are_grouped_apart() {
        let layer = clique_pair(false);
        let r = detect_fast(&layer, 13, 3).unwrap();
        assert_eq!(r.group_count, 2);
        assert_eq!(r.partition.label_of(12), ISOLATED_LABEL);
        assert_eq!(r.partition.label_of(11), ISOLATED_LABEL);
    }

    #[test]
    fn empty_layer_is_undefined() {
        let layer = Layer::from_pairs("e", &[]);
        assert!(detect_fast(&layer, 4, 0).unwrap_err().is_undefined());
        assert!(run_portfolio(&layer, 4, &default_portfolio(), 0)
            .unwrap_err()
            .is_undefined());
        assert!(run_portfolio(&clique_pair(false), 10, &[], 0).is_err());
    }

    #[test]
    fn portfolio_is_reproducible() {
        let layer = clique_pair(true);
        let a = run_portfolio(&layer, 10, &default_portfolio(), 42).unwrap();
        let b = run_portfolio(&layer, 10, &default_portfolio(), 42).unwrap();
        assert_eq!(a, b);
    }
}
