//! Leave-one-node-out resampling.
//!
//! Each replicate removes one node, with its links in every layer, and
//! re-evaluates the metric. Replicates are independent and run through
//! [`crate::par`]; aggregation walks them in node order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::MultiplexNetwork;
use crate::par;

/// Share of undefined replicates above which an estimate is flagged.
pub const MAX_SKIPPED_SHARE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricEstimate {
    /// Metric on the full network.
    pub point: f64,
    /// Mean over the defined replicates.
    pub jack_mean: f64,
    /// Twice the sample standard deviation of the defined replicates.
    pub two_sigma: f64,
    /// Number of replicates, one per node.
    pub samples: usize,
    /// Replicates on which the metric was undefined.
    pub skipped: usize,
    pub unreliable: bool,
}

impl MetricEstimate {
    /// Aggregates replicate values; `None` marks an undefined replicate.
    pub fn from_replicates(point: f64, replicates: &[Option<f64>]) -> Result<Self> {
        let defined: Vec<f64> = replicates.iter().flatten().copied().collect();
        let skipped = replicates.len() - defined.len();
        let Some(&anchor) = defined.first() else {
            return Err(Error::undefined("metric undefined on every jackknife replicate"));
        };
        // Deviations are taken from the first replicate so that identical
        // replicates give an exact mean and an exact zero spread.
        let k = defined.len() as f64;
        let shift = defined.iter().map(|v| v - anchor).sum::<f64>() / k;
        let mean = anchor + shift;
        let var = if defined.len() > 1 {
            defined.iter().map(|v| (v - anchor - shift).powi(2)).sum::<f64>() / (k - 1.0)
        } else {
            0.0
        };
        Ok(MetricEstimate {
            point,
            jack_mean: mean,
            two_sigma: 2.0 * var.sqrt(),
            samples: replicates.len(),
            skipped,
            unreliable: skipped as f64 > MAX_SKIPPED_SHARE * replicates.len() as f64,
        })
    }
}

fn classify(value: Result<f64>) -> Result<Option<f64>> {
    match value {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_undefined() => Ok(None),
        Err(e) => Err(e),
    }
}

/// Jackknife over a metric that knows how to leave a node out by itself.
///
/// `metric(None)` is the full-sample value and `metric(Some(v))` the value
/// without node `v`. Undefined replicates are skipped and counted; any other
/// error aborts.
pub fn jackknife_indexed<F>(node_count: usize, metric: F) -> Result<MetricEstimate>
where
    F: Fn(Option<usize>) -> Result<f64> + Sync + Send,
{
    let point = metric(None)?;
    let replicates = par::map_range(node_count, |v| classify(metric(Some(v))));
    let replicates: Vec<Option<f64>> = replicates.into_iter().collect::<Result<_>>()?;
    MetricEstimate::from_replicates(point, &replicates)
}

/// Jackknife over a metric evaluated on materialized subnetworks.
///
/// The metric receives the subnetwork and, for each of its nodes, the
/// index that node had in `network`, so per-node context such as a
/// partition can be restricted with [`crate::Partition::select`].
pub fn jackknife<F>(network: &MultiplexNetwork, metric: F) -> Result<MetricEstimate>
where
    F: Fn(&MultiplexNetwork, &[usize]) -> Result<f64> + Sync + Send,
{
    let n = network.node_count();
    let all: Vec<usize> = (0..n).collect();
    let point = metric(network, &all)?;
    let replicates = par::map_range(n, |v| {
        let sub = network.without_node(v);
        let kept: Vec<usize> = (0..n).filter(|&i| i != v).collect();
        classify(metric(&sub, &kept))
    });
    let replicates: Vec<Option<f64>> = replicates.into_iter().collect::<Result<_>>()?;
    MetricEstimate::from_replicates(point, &replicates)
}
