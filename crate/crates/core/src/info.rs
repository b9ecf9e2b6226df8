//! Set overlap and information-theoretic comparison of layers and
//! partitions. Entropies are in bits.

use crate::error::{Error, Result};
use crate::network::{Layer, Partition};

/// Entropy estimator used by [`mutual_information`] and [`nmi`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyEstimator {
    /// Plug-in estimate from observed frequencies.
    MaximumLikelihood,
    /// Plug-in estimate plus `(observed outcomes - 1) / 2n`.
    #[default]
    MillerMadow,
}

impl std::str::FromStr for EntropyEstimator {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ml" => Ok(EntropyEstimator::MaximumLikelihood),
            "mm" => Ok(EntropyEstimator::MillerMadow),
            _ => Err(format!("unknown entropy estimator `{s}` (expected ml or mm)")),
        }
    }
}

pub fn jaccard(x: &Layer, y: &Layer) -> Result<f64> {
    let (xs, ys) = (x.binary_pairs(), y.binary_pairs());
    let inter = sorted_intersection(&xs, &ys);
    let union = xs.len() + ys.len() - inter;
    if union == 0 {
        return Err(Error::undefined("Jaccard of two empty layers"));
    }
    Ok(inter as f64 / union as f64)
}

/// `|X ∩ Y| / |Y|`: the share of `y`'s links that also appear in `x`.
pub fn partial_jaccard(x: &Layer, y: &Layer) -> Result<f64> {
    let (xs, ys) = (x.binary_pairs(), y.binary_pairs());
    if ys.is_empty() {
        return Err(Error::undefined(format!(
            "partial Jaccard over empty layer {}",
            y.name()
        )));
    }
    Ok(sorted_intersection(&xs, &ys) as f64 / ys.len() as f64)
}

fn sorted_intersection(a: &[(usize, usize)], b: &[(usize, usize)]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn total(counts: &[u64]) -> Result<u64> {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::undefined("entropy of an all-zero count vector"));
    }
    Ok(n)
}

pub fn entropy_ml(counts: &[u64]) -> Result<f64> {
    let n = total(counts)? as f64;
    Ok(-counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>())
}

pub fn entropy_mm(counts: &[u64]) -> Result<f64> {
    Ok(entropy_ml(counts)? + miller_madow_correction(counts)?)
}

/// `(p_{>0} - 1) / 2n`.
pub fn miller_madow_correction(counts: &[u64]) -> Result<f64> {
    let n = total(counts)? as f64;
    let observed = counts.iter().filter(|&&c| c > 0).count() as f64;
    Ok((observed - 1.0) / (2.0 * n))
}

pub fn entropy(counts: &[u64], estimator: EntropyEstimator) -> Result<f64> {
    match estimator {
        EntropyEstimator::MaximumLikelihood => entropy_ml(counts),
        EntropyEstimator::MillerMadow => entropy_mm(counts),
    }
}

/// Joint count table of two discrete variables: rows index X, columns Y.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    cells: Vec<u64>,
}

impl ContingencyTable {
    pub fn new(rows: usize, cols: usize, cells: Vec<u64>) -> Result<Self> {
        if rows == 0 || cols == 0 || cells.len() != rows * cols {
            return Err(Error::validation(format!(
                "table of {rows}x{cols} needs {} cells, got {}",
                rows * cols,
                cells.len()
            )));
        }
        Ok(ContingencyTable { rows, cols, cells })
    }

    /// Cross-tabulation of two labelings of the same items.
    pub fn from_labels(x: &[usize], y: &[usize]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::validation("labelings differ in length"));
        }
        let rows = x.iter().max().map_or(1, |m| m + 1);
        let cols = y.iter().max().map_or(1, |m| m + 1);
        let mut cells = vec![0; rows * cols];
        for (&a, &b) in x.iter().zip(y) {
            cells[a * cols + b] += 1;
        }
        ContingencyTable::new(rows, cols, cells)
    }

    pub fn from_partitions(x: &Partition, y: &Partition) -> Result<Self> {
        ContingencyTable::from_labels(x.membership(), y.membership())
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.cells[r * self.cols + c]
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().sum()
    }

    pub fn row_margin(&self) -> Vec<u64> {
        (0..self.rows)
            .map(|r| self.cells[r * self.cols..(r + 1) * self.cols].iter().sum())
            .collect()
    }

    pub fn col_margin(&self) -> Vec<u64> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.get(r, c)).sum())
            .collect()
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    pub fn transposed(&self) -> ContingencyTable {
        let mut cells = vec![0; self.cells.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                cells[c * self.rows + r] = self.get(r, c);
            }
        }
        ContingencyTable {
            rows: self.cols,
            cols: self.rows,
            cells,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualInformation {
    /// `H(X) + H(Y) - H(X,Y)` as estimated; may dip below zero under
    /// bias correction.
    pub raw: f64,
    /// `max(raw, 0)`.
    pub clamped: f64,
    /// The table has a single non-empty cell, so there is nothing to share.
    pub degenerate: bool,
}

pub fn mutual_information(table: &ContingencyTable, estimator: EntropyEstimator) -> Result<MutualInformation> {
    if table.total() == 0 {
        return Err(Error::undefined("mutual information of an empty table"));
    }
    if table.cells.iter().filter(|&&c| c > 0).count() <= 1 {
        return Ok(MutualInformation {
            raw: 0.0,
            clamped: 0.0,
            degenerate: true,
        });
    }
    let hx = entropy(&table.row_margin(), estimator)?;
    let hy = entropy(&table.col_margin(), estimator)?;
    let hxy = entropy(&table.cells, estimator)?;
    let raw = hx + hy - hxy;
    Ok(MutualInformation {
        raw,
        clamped: raw.max(0.0),
        degenerate: false,
    })
}

/// Which variable's entropy normalizes the mutual information.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Margin {
    /// `I(X;Y) / H(X)`, the rows' share explained by the columns.
    Rows,
    /// `I(X;Y) / H(Y)`.
    Cols,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nmi {
    pub raw: f64,
    /// `raw` clipped to `[0, 1]`.
    pub clamped: f64,
}

/// Uncertainty coefficient of the chosen margin.
pub fn nmi(table: &ContingencyTable, respect_to: Margin, estimator: EntropyEstimator) -> Result<Nmi> {
    let margin = match respect_to {
        Margin::Rows => table.row_margin(),
        Margin::Cols => table.col_margin(),
    };
    let h = entropy(&margin, estimator)?;
    if h <= 0.0 {
        return Err(Error::undefined("normalizing variable has zero entropy"));
    }
    let raw = mutual_information(table, estimator)?.raw / h;
    Ok(Nmi {
        raw,
        clamped: raw.clamp(0.0, 1.0),
    })
}

/// Joint link-presence counts of two layers over all ordered node pairs
/// `(i, j)` with `i != j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkIndicatorPair {
    pub n11: u64,
    pub n10: u64,
    pub n01: u64,
    pub n00: u64,
}

impl LinkIndicatorPair {
    pub fn new(x: &Layer, y: &Layer, node_count: usize) -> Self {
        let (xs, ys) = (x.binary_pairs(), y.binary_pairs());
        Self::from_sizes(xs.len(), ys.len(), sorted_intersection(&xs, &ys), node_count)
    }

    fn from_sizes(x: usize, y: usize, both: usize, node_count: usize) -> Self {
        let universe = (node_count * node_count.saturating_sub(1)) as u64;
        let (x, y, both) = (x as u64, y as u64, both as u64);
        LinkIndicatorPair {
            n11: both,
            n10: x - both,
            n01: y - both,
            n00: universe + both - x - y,
        }
    }

    /// 2x2 table, rows = X present/absent, columns = Y present/absent.
    pub fn table(&self) -> ContingencyTable {
        ContingencyTable {
            rows: 2,
            cols: 2,
            cells: vec![self.n11, self.n10, self.n01, self.n00],
        }
    }
}

/// `(NMI(X|Y), NMI(Y|X))` of the link-presence indicators.
pub fn link_nmi(x: &Layer, y: &Layer, node_count: usize, estimator: EntropyEstimator) -> Result<(Nmi, Nmi)> {
    if node_count < 2 {
        return Err(Error::validation("link NMI needs at least two nodes"));
    }
    let table = LinkIndicatorPair::new(x, y, node_count).table();
    Ok((
        nmi(&table, Margin::Rows, estimator)?,
        nmi(&table, Margin::Cols, estimator)?,
    ))
}

/// Overlap counts of two layers with per-node incidence, so that the
/// counts of every leave-one-node-out subnetwork come in O(1).
#[derive(Debug, Clone)]
pub struct LayerOverlap {
    node_count: usize,
    x: usize,
    y: usize,
    both: usize,
    x_at: Vec<usize>,
    y_at: Vec<usize>,
    both_at: Vec<usize>,
}

impl LayerOverlap {
    pub fn new(x: &Layer, y: &Layer, node_count: usize) -> Self {
        let (xs, ys) = (x.binary_pairs(), y.binary_pairs());
        let mut x_at = vec![0; node_count];
        let mut y_at = vec![0; node_count];
        let mut both_at = vec![0; node_count];
        for &(s, t) in &xs {
            x_at[s] += 1;
            x_at[t] += 1;
        }
        for &(s, t) in &ys {
            y_at[s] += 1;
            y_at[t] += 1;
        }
        let (mut i, mut j, mut both) = (0, 0, 0);
        while i < xs.len() && j < ys.len() {
            match xs[i].cmp(&ys[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    both += 1;
                    both_at[xs[i].0] += 1;
                    both_at[xs[i].1] += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        LayerOverlap {
            node_count,
            x: xs.len(),
            y: ys.len(),
            both,
            x_at,
            y_at,
            both_at,
        }
    }

    /// Counts with `excluded` removed along with its incident pairs.
    pub fn indicators(&self, excluded: Option<usize>) -> LinkIndicatorPair {
        match excluded {
            None => LinkIndicatorPair::from_sizes(self.x, self.y, self.both, self.node_count),
            Some(v) => LinkIndicatorPair::from_sizes(
                self.x - self.x_at[v],
                self.y - self.y_at[v],
                self.both - self.both_at[v],
                self.node_count - 1,
            ),
        }
    }

    /// `|X ∩ Y| / |Y|` with `excluded` removed.
    pub fn partial_jaccard(&self, excluded: Option<usize>) -> Result<f64> {
        let c = self.indicators(excluded);
        let y = c.n11 + c.n01;
        if y == 0 {
            return Err(Error::undefined("partial Jaccard over an empty layer"));
        }
        Ok(c.n11 as f64 / y as f64)
    }

    pub fn nmi(&self, excluded: Option<usize>, respect_to: Margin, estimator: EntropyEstimator) -> Result<f64> {
        Ok(nmi(&self.indicators(excluded).table(), respect_to, estimator)?.raw)
    }
}
