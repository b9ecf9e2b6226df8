use std::collections::HashMap;
use std::path::PathBuf;

use anyhow::Result;
use polarnet::io::read_positions;
use polarnet::structure::{structure_report, CoreMode, PathMode, StructureOptions};

use crate::args::{Cores, Paths};
use crate::context::{Inputs, RunConfig};
use crate::table::Table;

/// Internal network metrics of every party above the size threshold,
/// joined with the party's position when one is known.
pub fn run(
    config: &RunConfig,
    inputs: &Inputs,
    min_group_size: usize,
    paths: Paths,
    cores: Cores,
) -> Result<Vec<PathBuf>> {
    let scope = inputs.scope(config.default_scope())?;
    let parties = scope.parties()?;
    let positions: HashMap<String, (f64, f64)> = match &config.common.positions {
        Some(path) => read_positions(path)?
            .into_iter()
            .map(|p| (p.party, (p.lr, p.cl)))
            .collect(),
        None => HashMap::new(),
    };
    let options = StructureOptions {
        paths: match paths {
            Paths::Directed => PathMode::Directed,
            Paths::Symmetrized => PathMode::Symmetrized,
        },
        cores: match cores {
            Cores::Undirected => CoreMode::Undirected,
            Cores::TotalDegree => CoreMode::TotalDegree,
        },
    };
    let mut table = Table::new(&[
        "layer",
        "group",
        "n",
        "links",
        "in_degree_centralization",
        "avg_path_length",
        "max_kcore",
        "lr",
        "cl",
    ]);
    for layer in scope.network.layers() {
        for r in structure_report(layer, parties, min_group_size, options) {
            let pos = positions.get(&r.group);
            table.push(vec![
                layer.name().into(),
                r.group.as_str().into(),
                r.n.into(),
                r.links.into(),
                r.in_degree_centralization.into(),
                r.avg_path_length.into(),
                r.max_kcore.into(),
                pos.map(|p| p.0).into(),
                pos.map(|p| p.1).into(),
            ]);
        }
    }
    Ok(vec![table.write(
        config.out_dir()?,
        "structure",
        config.common.format,
    )?])
}
