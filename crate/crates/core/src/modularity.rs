//! Q-modularity and demodularity of directed, optionally weighted layers.
//!
//! For adjacency `A`, out/in strengths `k_out`, `k_in` and total weight `m`:
//!
//! ```text
//! Q      = 1/m   Σ_ij [A_ij - k_out_i k_in_j / m] δ(C(i), C(j))
//! Q̄_ft  = 1/m_f Σ_ij [A_ij - k_out_i k_in_j / m] δ(C(i), f) δ(C(j), t)
//! ```
//!
//! Self-links never enter `A`, the strengths or `m`. The null-model term
//! runs over all pairs including `i = j`, so a one-group partition scores
//! exactly zero and `Σ_{f≠t} m_f Q̄_ft + m Q = 0`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{Layer, Partition};

/// Modularity at or above which a layer counts as polarized.
pub const POLARIZATION_THRESHOLD: f64 = 0.3;

const RANGE_SLACK: f64 = 1e-9;

/// Per-node out- and in-strengths of a layer.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVectors {
    pub k_out: Vec<f64>,
    pub k_in: Vec<f64>,
    pub m: f64,
}

impl DegreeVectors {
    pub fn new(layer: &Layer, node_count: usize) -> Self {
        let mut k_out = vec![0.0; node_count];
        let mut k_in = vec![0.0; node_count];
        let mut m = 0.0;
        for l in layer.links().iter().filter(|l| !l.is_self_link()) {
            k_out[l.source] += l.weight;
            k_in[l.target] += l.weight;
            m += l.weight;
        }
        DegreeVectors { k_out, k_in, m }
    }
}

/// Link weight aggregated to group level.
struct GroupFlows {
    groups: usize,
    m: f64,
    within: f64,
    out: Vec<f64>,
    inn: Vec<f64>,
    out_links: Vec<usize>,
    /// Row-major `groups x groups` weight from group f to group t.
    flow: Vec<f64>,
}

impl GroupFlows {
    fn new(layer: &Layer, partition: &Partition, excluded: Option<usize>, with_flow: bool) -> Result<Self> {
        if let Some(max) = layer.max_node() {
            if max >= partition.len() {
                return Err(Error::validation(format!(
                    "layer {} references node {max} but the partition covers {} nodes",
                    layer.name(),
                    partition.len()
                )));
            }
        }
        let groups = partition.label_count();
        let mut f = GroupFlows {
            groups,
            m: 0.0,
            within: 0.0,
            out: vec![0.0; groups],
            inn: vec![0.0; groups],
            out_links: vec![0; groups],
            flow: if with_flow {
                vec![0.0; groups * groups]
            } else {
                Vec::new()
            },
        };
        let member = partition.membership();
        for l in layer.links() {
            if l.is_self_link() || excluded.is_some_and(|v| l.source == v || l.target == v) {
                continue;
            }
            let (gs, gt) = (member[l.source], member[l.target]);
            f.m += l.weight;
            f.out[gs] += l.weight;
            f.inn[gt] += l.weight;
            f.out_links[gs] += 1;
            if gs == gt {
                f.within += l.weight;
            }
            if with_flow {
                f.flow[gs * groups + gt] += l.weight;
            }
        }
        Ok(f)
    }

    fn q(&self) -> Result<f64> {
        if self.m <= 0.0 {
            return Err(Error::undefined("modularity of a layer without links"));
        }
        let expected: f64 = self
            .out
            .iter()
            .zip(&self.inn)
            .map(|(o, i)| (o / self.m) * (i / self.m))
            .sum();
        let q = self.within / self.m - expected;
        if !(-1.0 - RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&q) {
            return Err(Error::Consistency(format!("modularity {q} outside [-1, 1]")));
        }
        Ok(q)
    }

    fn demod(&self, f: usize, t: usize, norm: DemodNormalization) -> Result<f64> {
        if self.m <= 0.0 {
            return Err(Error::undefined("demodularity of a layer without links"));
        }
        let denom = match norm {
            DemodNormalization::GroupOutWeight => self.out[f],
            DemodNormalization::GroupLinkCount => self.out_links[f] as f64,
            DemodNormalization::TotalWeight => self.m,
        };
        if denom <= 0.0 {
            return Err(Error::undefined(format!("group {f} has no outgoing links")));
        }
        let excess = self.flow[f * self.groups + t] - self.out[f] * self.inn[t] / self.m;
        Ok(excess / denom)
    }
}

pub fn q_modularity(layer: &Layer, partition: &Partition) -> Result<f64> {
    q_modularity_without(layer, partition, None)
}

/// Q with `excluded` and its incident links removed; the partition of the
/// remaining nodes is unchanged.
pub fn q_modularity_without(layer: &Layer, partition: &Partition, excluded: Option<usize>) -> Result<f64> {
    GroupFlows::new(layer, partition, excluded, false)?.q()
}

/// Normalizer `m_f` of a demodularity row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum DemodNormalization {
    /// Total outgoing weight of the source group.
    #[default]
    GroupOutWeight,
    /// Number of links leaving the source group's nodes.
    GroupLinkCount,
    /// Total layer weight `m`.
    TotalWeight,
}

impl std::str::FromStr for DemodNormalization {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "out-weight" => Ok(Self::GroupOutWeight),
            "link-count" => Ok(Self::GroupLinkCount),
            "total" => Ok(Self::TotalWeight),
            _ => Err(format!("unknown normalization `{s}` (out-weight, link-count, total)")),
        }
    }
}

fn group_pair(partition: &Partition, from: &str, to: &str) -> Result<(usize, usize)> {
    let find = |l: &str| {
        partition
            .group_index(l)
            .ok_or_else(|| Error::validation(format!("unknown group `{l}`")))
    };
    let (f, t) = (find(from)?, find(to)?);
    if f == t {
        return Err(Error::validation("demodularity needs two distinct groups"));
    }
    Ok((f, t))
}

pub fn demodularity(layer: &Layer, partition: &Partition, from: &str, to: &str) -> Result<f64> {
    demodularity_with(layer, partition, from, to, DemodNormalization::default())
}

pub fn demodularity_with(
    layer: &Layer,
    partition: &Partition,
    from: &str,
    to: &str,
    norm: DemodNormalization,
) -> Result<f64> {
    let (f, t) = group_pair(partition, from, to)?;
    GroupFlows::new(layer, partition, None, true)?.demod(f, t, norm)
}

/// Demodularity for every ordered pair of distinct groups. Entries whose
/// source group has no outgoing links are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemodularityMatrix {
    pub labels: Vec<String>,
    entries: Vec<Option<f64>>,
}

impl DemodularityMatrix {
    pub fn get(&self, from: usize, to: usize) -> Option<f64> {
        if from == to {
            return None;
        }
        self.entries[from * self.labels.len() + to]
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    /// Number of defined off-diagonal entries.
    pub fn defined_entries(&self) -> usize {
        self.entries.iter().flatten().count()
    }

    /// Row = from-group, column = to-group, blank diagonal, `NA` for
    /// undefined rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("from\\to");
        for l in &self.labels {
            out.push(',');
            out.push_str(&crate::io::csv_field(l));
        }
        out.push('\n');
        for (f, lf) in self.labels.iter().enumerate() {
            out.push_str(&crate::io::csv_field(lf));
            for t in 0..self.labels.len() {
                out.push(',');
                if f != t {
                    match self.get(f, t) {
                        Some(v) => {
                            let _ = write!(out, "{v}");
                        }
                        None => out.push_str("NA"),
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn demodularity_matrix(
    layer: &Layer,
    partition: &Partition,
    norm: DemodNormalization,
) -> Result<DemodularityMatrix> {
    let g = partition.label_count();
    if g < 2 {
        return Err(Error::validation("demodularity matrix needs at least two groups"));
    }
    let flows = GroupFlows::new(layer, partition, None, true)?;
    let mut entries = vec![None; g * g];
    for f in 0..g {
        for t in 0..g {
            if f != t {
                entries[f * g + t] = match flows.demod(f, t, norm) {
                    Ok(v) => Some(v),
                    Err(e) if e.is_undefined() => None,
                    Err(e) => return Err(e),
                };
            }
        }
    }
    Ok(DemodularityMatrix {
        labels: partition.labels().to_vec(),
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    Polarized,
    NotPolarized,
}

pub fn classify_polarization(q: f64) -> Result<Polarization> {
    if !(-1.0..=1.0).contains(&q) {
        return Err(Error::validation(format!("modularity {q} outside [-1, 1]")));
    }
    Ok(if q >= POLARIZATION_THRESHOLD {
        Polarization::Polarized
    } else {
        Polarization::NotPolarized
    })
}
