use std::path::PathBuf;

use anyhow::Result;
use polarnet::jackknife::{jackknife_indexed, MetricEstimate};
use polarnet::modularity::{classify_polarization, q_modularity_without, Polarization};
use polarnet::{Layer, Partition};

use super::{defined, estimate_cells};
use crate::context::{Inputs, RunConfig, Scope, ScopeKind};
use crate::table::{Cell, Table};

fn q_estimate(layer: &Layer, partition: &Partition) -> Result<Option<MetricEstimate>> {
    defined(jackknife_indexed(partition.len(), |v| {
        q_modularity_without(layer, partition, v)
    }))
}

fn classification(e: Option<&MetricEstimate>) -> Result<Cell> {
    let Some(e) = e else { return Ok(Cell::Missing) };
    Ok(match classify_polarization(e.point)? {
        Polarization::Polarized => "polarized",
        Polarization::NotPolarized => "not_polarized",
    }
    .into())
}

/// Party-label modularity against the best detected partition, with and
/// without unaligned nodes. Writes the detected communities alongside.
pub fn run(config: &RunConfig, inputs: &Inputs) -> Result<Vec<PathBuf>> {
    let out = config.out_dir()?;
    let format = config.common.format;
    let mut written = Vec::new();
    let mut table = Table::new(&[
        "layer",
        "scope",
        "nodes",
        "links",
        "parties",
        "q_party",
        "q_party_jack_mean",
        "q_party_two_sigma",
        "polarization_party",
        "q_comp",
        "q_comp_jack_mean",
        "q_comp_two_sigma",
        "polarization_comp",
        "groups",
        "script",
        "unconverged",
    ]);
    for kind in [ScopeKind::All, ScopeKind::Aligned] {
        let scope: Scope = inputs.scope(kind)?;
        let parties = scope.parties()?;
        for layer in scope.network.layers() {
            let party = q_estimate(layer, parties)?;
            let detected = config.detect(&scope, layer.name())?;
            let comp = match &detected {
                Some(d) => q_estimate(layer, &d.partition)?,
                None => None,
            };
            let mut row: Vec<Cell> = vec![
                layer.name().into(),
                kind.name().into(),
                scope.network.node_count().into(),
                layer.len().into(),
                parties.occupied_groups().into(),
            ];
            row.extend(estimate_cells(party.as_ref()));
            row.push(classification(party.as_ref())?);
            row.extend(estimate_cells(comp.as_ref()));
            row.push(classification(comp.as_ref())?);
            row.extend([
                detected.as_ref().map(|d| d.group_count).into(),
                detected.as_ref().map(|d| d.script.to_string()).into(),
                detected.as_ref().map(|d| d.unconverged).into(),
            ]);
            table.push(row);

            if let Some(d) = &detected {
                let mut groups = Table::new(&["node_id", "group"]);
                for (v, id) in scope.network.registry().ids().iter().enumerate() {
                    groups.push(vec![id.as_str().into(), d.partition.label_of(v).into()]);
                }
                let stem = format!("communities_{}_{}", layer.name(), kind.name());
                written.push(groups.write(out, &stem, format)?);
            }
        }
    }
    written.insert(0, table.write(out, "polarization", format)?);
    Ok(written)
}
