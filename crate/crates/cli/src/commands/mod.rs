//! One function per report.

mod demodularity;
mod export;
mod group_nmi;
mod polarization;
mod similarity;
mod structure;
mod timeseries;
mod topics;

use std::path::PathBuf;

use anyhow::Result;
use polarnet::info::EntropyEstimator;
use polarnet::jackknife::MetricEstimate;

use crate::args::{Cli, Command, Estimator};
use crate::context::{Inputs, RunConfig};
use crate::table::Cell;

/// Runs the parsed command line and returns the files written, in the
/// order they were produced.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let config = RunConfig::new(cli.common, &cli.command)?;
    if let Command::Generate {
        node_count,
        links_per_layer,
        comment_count,
    } = cli.command
    {
        return export::generate(&config, node_count, links_per_layer, comment_count);
    }
    let inputs = Inputs::load(&config.common)?;
    match cli.command {
        Command::LayerSimilarity { estimator } => similarity::run(&config, &inputs, estimator.into()),
        Command::Polarization => polarization::run(&config, &inputs),
        Command::GroupNmi { estimator } => group_nmi::run(&config, &inputs, estimator.into()),
        Command::Timeseries { events, skip_undated } => timeseries::run(&config, &inputs, events, skip_undated),
        Command::Structure {
            min_group_size,
            paths,
            cores,
        } => structure::run(&config, &inputs, min_group_size, paths, cores),
        Command::Demodularity {
            min_group_size,
            pairing,
            normalization,
        } => demodularity::run(&config, &inputs, min_group_size, pairing, normalization),
        Command::Topics { .. } => topics::run(&config, &inputs, &cli.command),
        Command::Export => export::run(&config, &inputs),
        Command::Generate { .. } => unreachable!("handled above"),
    }
}

impl From<Estimator> for EntropyEstimator {
    fn from(e: Estimator) -> Self {
        match e {
            Estimator::Mm => EntropyEstimator::MillerMadow,
            Estimator::Ml => EntropyEstimator::MaximumLikelihood,
        }
    }
}

fn estimator_name(e: EntropyEstimator) -> &'static str {
    match e {
        EntropyEstimator::MillerMadow => "mm",
        EntropyEstimator::MaximumLikelihood => "ml",
    }
}

/// `Some(v)` for a value, `None` for an undefined metric; other errors
/// propagate.
pub(crate) fn defined<T>(r: polarnet::Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_undefined() => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Point value, replicate mean and 2σ of a jackknife estimate.
fn estimate_cells(e: Option<&MetricEstimate>) -> [Cell; 3] {
    match e {
        Some(e) => [e.point.into(), e.jack_mean.into(), e.two_sigma.into()],
        None => [Cell::Missing, Cell::Missing, Cell::Missing],
    }
}
