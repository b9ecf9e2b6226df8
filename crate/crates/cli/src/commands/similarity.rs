use std::path::PathBuf;

use anyhow::Result;
use polarnet::info::{EntropyEstimator, LayerOverlap, Margin};
use polarnet::jackknife::jackknife_indexed;

use super::{defined, estimate_cells, estimator_name};
use crate::context::{Inputs, RunConfig};
use crate::table::{Cell, Table};

/// For every ordered pair (X, Y): the share of Y's links also present in X
/// and the share of X's link information explained by Y, both with
/// leave-one-node-out error bars.
pub fn run(config: &RunConfig, inputs: &Inputs, estimator: EntropyEstimator) -> Result<Vec<PathBuf>> {
    let scope = inputs.scope(config.default_scope())?;
    let net = &scope.network;
    let n = net.node_count();
    let mut table = Table::new(&[
        "layer_x",
        "layer_y",
        "nodes",
        "links_x",
        "links_y",
        "shared",
        "overlap",
        "overlap_jack_mean",
        "overlap_two_sigma",
        "nmi",
        "nmi_clamped",
        "nmi_jack_mean",
        "nmi_two_sigma",
        "samples",
        "unreliable",
        "estimator",
    ]);
    for x in net.layers() {
        for y in net.layers() {
            if x.name() == y.name() {
                continue;
            }
            let overlap = LayerOverlap::new(x, y, n);
            let counts = overlap.indicators(None);
            let jaccard = defined(jackknife_indexed(n, |v| overlap.partial_jaccard(v)))?;
            let nmi = defined(jackknife_indexed(n, |v| overlap.nmi(v, Margin::Rows, estimator)))?;
            let mut row: Vec<Cell> = vec![
                x.name().into(),
                y.name().into(),
                n.into(),
                (counts.n11 + counts.n10).into(),
                (counts.n11 + counts.n01).into(),
                counts.n11.into(),
            ];
            row.extend(estimate_cells(jaccard.as_ref()));
            let [point, mean, sigma] = estimate_cells(nmi.as_ref());
            row.extend([point, nmi.map(|e| e.point.clamp(0.0, 1.0)).into(), mean, sigma]);
            let samples = jaccard.as_ref().or(nmi.as_ref()).map(|e| e.samples);
            let unreliable = [jaccard, nmi].iter().flatten().any(|e| e.unreliable);
            row.extend([samples.into(), unreliable.into(), estimator_name(estimator).into()]);
            table.push(row);
        }
    }
    Ok(vec![table.write(
        config.out_dir()?,
        "layer_similarity",
        config.common.format,
    )?])
}
