use std::path::PathBuf;

use anyhow::Result;
use polarnet::generate::{synthetic_fixture, FixtureSpec};
use polarnet::io::{layer_to_csv, to_graphml, write_atomic};

use crate::context::{Inputs, RunConfig};

/// GraphML of the whole multiplex plus one edge list per layer.
pub fn run(config: &RunConfig, inputs: &Inputs) -> Result<Vec<PathBuf>> {
    let scope = inputs.scope(config.default_scope())?;
    let out = config.out_dir()?;
    let net = &scope.network;
    let groups: Option<Vec<String>> = scope
        .parties
        .as_ref()
        .map(|p| (0..p.len()).map(|v| p.label_of(v).to_owned()).collect());
    let graph = out.join("network.graphml");
    write_atomic(&graph, to_graphml(net, groups.as_deref()).as_bytes())?;
    let mut written = vec![graph];
    for layer in net.layers() {
        let path = out.join(format!("edges_{}.csv", layer.name()));
        write_atomic(&path, layer_to_csv(layer, net.registry()).as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

/// Synthetic inputs for every command.
pub fn generate(config: &RunConfig, nodes: usize, links_per_layer: usize, comments: usize) -> Result<Vec<PathBuf>> {
    let spec = FixtureSpec {
        nodes,
        links_per_layer,
        comments,
        seed: config.seed(),
        ..FixtureSpec::default()
    };
    let paths = synthetic_fixture(&spec)?.write(config.out_dir()?)?;
    let mut written: Vec<PathBuf> = paths.layers.into_iter().map(|(_, p)| p).collect();
    written.extend([paths.nodes, paths.merge, paths.positions, paths.comments, paths.events]);
    Ok(written)
}
