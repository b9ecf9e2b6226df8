use std::path::PathBuf;

use anyhow::Result;
use polarnet::ideology::{demod_distance_analysis, Pairing};
use polarnet::io::{read_positions, write_atomic};
use polarnet::modularity::{demodularity_matrix, DemodNormalization};

use super::defined;
use crate::args::{Format, Normalization, PairingArg};
use crate::context::{Inputs, RunConfig};
use crate::table::{Cell, Table};

/// Party-to-party demodularity of every layer and, given positions, its
/// correlation with ideological distance among the large parties.
pub fn run(
    config: &RunConfig,
    inputs: &Inputs,
    min_group_size: usize,
    pairing: PairingArg,
    normalization: Normalization,
) -> Result<Vec<PathBuf>> {
    let scope = inputs.scope(config.default_scope())?;
    let parties = scope.parties()?;
    let norm = match normalization {
        Normalization::OutWeight => DemodNormalization::GroupOutWeight,
        Normalization::LinkCount => DemodNormalization::GroupLinkCount,
        Normalization::Total => DemodNormalization::TotalWeight,
    };
    let (pairing, pairing_name) = match pairing {
        PairingArg::Ordered => (Pairing::Ordered, "ordered"),
        PairingArg::Unordered => (Pairing::Unordered, "unordered"),
    };
    let (out, format) = (config.out_dir()?, config.common.format);
    let mut written = Vec::new();

    for layer in scope.network.layers() {
        let Some(matrix) = defined(demodularity_matrix(layer, parties, norm))? else {
            continue;
        };
        let stem = format!("demodularity_{}", layer.name());
        match format {
            // Row = from-group, column = to-group.
            Format::Csv => {
                let path = out.join(format!("{stem}.csv"));
                write_atomic(&path, matrix.to_csv().as_bytes())?;
                written.push(path);
            }
            Format::Json => {
                let mut table = Table::new(&["from", "to", "demod"]);
                for f in 0..matrix.size() {
                    for t in (0..matrix.size()).filter(|&t| t != f) {
                        table.push(vec![
                            matrix.labels[f].as_str().into(),
                            matrix.labels[t].as_str().into(),
                            matrix.get(f, t).into(),
                        ]);
                    }
                }
                written.push(table.write(out, &stem, format)?);
            }
        }
    }

    let Some(path) = &config.common.positions else {
        return Ok(written);
    };
    // Only parties large enough to be analysed take part; groups without a
    // position, such as the unaligned, drop out on their own.
    let sizes = parties.group_sizes();
    let positions: Vec<_> = read_positions(path)?
        .into_iter()
        .filter(|p| {
            parties
                .group_index(&p.party)
                .is_some_and(|g| sizes[g] >= min_group_size)
        })
        .collect();
    let mut summary = Table::new(&["layer", "pairing", "pairs", "r", "p"]);
    for layer in scope.network.layers() {
        let analysis = defined(demod_distance_analysis(layer, parties, &positions, pairing, norm))?;
        let mut pairs = Table::new(&["from", "to", "distance", "demod"]);
        if let Some(a) = &analysis {
            for p in &a.pairs {
                pairs.push(vec![
                    p.from.as_str().into(),
                    p.to.as_str().into(),
                    p.distance.into(),
                    p.demod.into(),
                ]);
            }
        }
        summary.push(vec![
            layer.name().into(),
            pairing_name.into(),
            analysis.as_ref().map_or(0, |a| a.pairs.len()).into(),
            analysis.as_ref().map(|a| a.r).into(),
            analysis.as_ref().map(|a| a.p).map_or(Cell::Missing, Cell::Float),
        ]);
        written.push(pairs.write(out, &format!("demod_pairs_{}", layer.name()), format)?);
    }
    written.push(summary.write(out, "demod_correlation", format)?);
    Ok(written)
}
