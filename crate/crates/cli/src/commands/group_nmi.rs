use std::path::PathBuf;

use anyhow::Result;
use polarnet::community::ISOLATED_LABEL;
use polarnet::info::{entropy, mutual_information, nmi, ContingencyTable, EntropyEstimator, Margin};
use polarnet::Partition;

use super::{defined, estimator_name};
use crate::context::{Inputs, RunConfig};
use crate::table::{Cell, Table};

/// Both uncertainty coefficients of two labelings over the nodes where both
/// are meaningful.
fn nmi_row(
    x: (&str, &Partition),
    y: (&str, &Partition),
    nodes: &[usize],
    estimator: EntropyEstimator,
) -> Result<Vec<Cell>> {
    let mut row: Vec<Cell> = vec![x.0.into(), y.0.into(), nodes.len().into()];
    let table = defined(ContingencyTable::from_partitions(
        &x.1.select(nodes),
        &y.1.select(nodes),
    ))?;
    let Some(table) = table.filter(|t| t.total() > 0) else {
        row.extend(std::iter::repeat_n(Cell::Missing, 5));
        return Ok(row);
    };
    let hx = defined(entropy(&table.row_margin(), estimator))?;
    let hy = defined(entropy(&table.col_margin(), estimator))?;
    let mi = defined(mutual_information(&table, estimator))?.map(|m| m.raw);
    // NMI(Y|X) normalizes by H(Y), NMI(X|Y) by H(X).
    let y_given_x = defined(nmi(&table, Margin::Cols, estimator))?.map(|n| n.raw);
    let x_given_y = defined(nmi(&table, Margin::Rows, estimator))?.map(|n| n.raw);
    row.extend([hx.into(), hy.into(), mi.into(), y_given_x.into(), x_given_y.into()]);
    Ok(row)
}

/// NMI between party labels and each layer's detected communities, and
/// between the communities of every pair of layers.
pub fn run(config: &RunConfig, inputs: &Inputs, estimator: EntropyEstimator) -> Result<Vec<PathBuf>> {
    let scope = inputs.scope(config.default_scope())?;
    let parties = scope.parties()?;
    let mut detected = Vec::new();
    for layer in scope.network.layers() {
        if let Some(d) = config.detect(&scope, layer.name())? {
            detected.push((layer.name(), d.partition));
        }
    }
    // Nodes with links in the layer; the rest share the isolated label.
    let active: Vec<Vec<bool>> = detected
        .iter()
        .map(|(_, p)| (0..p.len()).map(|v| p.label_of(v) != ISOLATED_LABEL).collect())
        .collect();

    let mut table = Table::new(&[
        "x",
        "y",
        "nodes",
        "h_x",
        "h_y",
        "mi",
        "nmi_y_given_x",
        "nmi_x_given_y",
        "estimator",
    ]);
    let n = scope.network.node_count();
    let est = Cell::from(estimator_name(estimator));
    for (i, (name, p)) in detected.iter().enumerate() {
        let nodes: Vec<usize> = (0..n).filter(|&v| active[i][v]).collect();
        let mut row = nmi_row(("parties", parties), (name, p), &nodes, estimator)?;
        row.push(est.clone());
        table.push(row);
    }
    for i in 0..detected.len() {
        for j in i + 1..detected.len() {
            let nodes: Vec<usize> = (0..n).filter(|&v| active[i][v] && active[j][v]).collect();
            let (a, b) = (&detected[i], &detected[j]);
            let mut row = nmi_row((a.0, &a.1), (b.0, &b.1), &nodes, estimator)?;
            row.push(est.clone());
            table.push(row);
        }
    }
    Ok(vec![table.write(
        config.out_dir()?,
        "group_nmi",
        config.common.format,
    )?])
}
