use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polarnet::community::DEFAULT_PORTFOLIO;
use polarnet::structure::DEFAULT_MIN_GROUP_SIZE;
use polarnet::temporal::{DEFAULT_STEP_DAYS, DEFAULT_WINDOW_DAYS};
use polarnet::topics::{DEFAULT_ALPHA, DEFAULT_TOP_K};

#[derive(Debug, Parser)]
#[command(
    name = "polarnet",
    version,
    about = "Polarization reports for multiplex social networks"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every analysis.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Layer edge list as NAME=PATH; repeat for each layer.
    #[arg(long = "layer", value_name = "NAME=PATH", global = true, value_parser = parse_layer_arg)]
    pub layers: Vec<(String, PathBuf)>,
    /// Node table with `node_id,affiliation` columns.
    #[arg(long, global = true)]
    pub nodes: Option<PathBuf>,
    /// Merge rules mapping raw affiliations to party labels.
    #[arg(long, global = true)]
    pub merge: Option<PathBuf>,
    /// Party positions with `party,lr,cl` columns.
    #[arg(long, global = true)]
    pub positions: Option<PathBuf>,
    /// Comment corpus with `author,date,text` columns.
    #[arg(long, global = true)]
    pub comments: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_WINDOW_DAYS)]
    pub window_days: u32,
    #[arg(long, global = true, default_value_t = DEFAULT_STEP_DAYS)]
    pub step_days: u32,
    /// Comma-separated combo scripts tried by community detection.
    #[arg(long, global = true, default_value_t = DEFAULT_PORTFOLIO.join(","))]
    pub portfolio: String,
    /// Significance level of the topic word filter.
    #[arg(long, global = true, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Drop nodes whose party label is the unaligned label.
    #[arg(long, global = true)]
    pub exclude_unaligned: bool,
    /// Root seed; required by commands that run community detection.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Always rerun community detection instead of reusing partitions
    /// stored in the output directory.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Estimator {
    /// Miller-Madow corrected.
    #[default]
    Mm,
    /// Plain maximum likelihood.
    Ml,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Paths {
    #[default]
    Directed,
    Symmetrized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Cores {
    #[default]
    Undirected,
    TotalDegree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum PairingArg {
    #[default]
    Ordered,
    Unordered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Normalization {
    /// Outgoing weight of the source group.
    #[default]
    OutWeight,
    /// Links leaving the source group.
    LinkCount,
    /// Total weight of the layer.
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum TestArg {
    /// Likelihood-ratio test.
    #[default]
    G,
    Pearson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Groups {
    /// Communities detected on one layer.
    #[default]
    Detected,
    Party,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Link overlap and link-level NMI for every ordered pair of layers.
    LayerSimilarity {
        #[arg(long, value_enum, default_value_t)]
        estimator: Estimator,
    },
    /// Modularity of party labels and of detected communities.
    Polarization,
    /// NMI between party labels and the communities of each layer.
    GroupNmi {
        #[arg(long, value_enum, default_value_t)]
        estimator: Estimator,
    },
    /// Sliding-window modularity of party labels.
    Timeseries {
        /// Event list with `date,label` columns.
        #[arg(long)]
        events: Option<PathBuf>,
        /// Ignore links without a date instead of failing.
        #[arg(long)]
        skip_undated: bool,
    },
    /// Centralization, path length and k-core of each large party.
    Structure {
        #[arg(long, default_value_t = DEFAULT_MIN_GROUP_SIZE)]
        min_group_size: usize,
        #[arg(long, value_enum, default_value_t)]
        paths: Paths,
        #[arg(long, value_enum, default_value_t)]
        cores: Cores,
    },
    /// Demodularity matrices and their correlation with party distance.
    Demodularity {
        /// Smallest party included in the correlation.
        #[arg(long, default_value_t = DEFAULT_MIN_GROUP_SIZE)]
        min_group_size: usize,
        #[arg(long, value_enum, default_value_t)]
        pairing: PairingArg,
        #[arg(long, value_enum, default_value_t)]
        normalization: Normalization,
    },
    /// Characteristic words of each group by PMI.
    Topics {
        #[arg(long, value_enum, default_value_t)]
        groups: Groups,
        /// Layer whose communities define the groups.
        #[arg(long, default_value = "comments")]
        group_layer: String,
        /// Report only this many of the largest groups; 0 keeps all.
        #[arg(long, default_value_t = 5)]
        largest: usize,
        #[arg(long, default_value_t = DEFAULT_TOP_K)]
        top_k: usize,
        #[arg(long, value_enum, default_value_t)]
        test: TestArg,
        /// Stopword file, one word per line; a German list is built in.
        #[arg(long)]
        stopwords: Option<PathBuf>,
    },
    /// GraphML export of all layers with party labels.
    Export,
    /// Writes a synthetic party-structured input set.
    Generate {
        #[arg(long, default_value_t = 3500)]
        node_count: usize,
        #[arg(long, default_value_t = 25_000)]
        links_per_layer: usize,
        #[arg(long, default_value_t = 7000)]
        comment_count: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::LayerSimilarity { .. } => "layer-similarity",
            Command::Polarization => "polarization",
            Command::GroupNmi { .. } => "group-nmi",
            Command::Timeseries { .. } => "timeseries",
            Command::Structure { .. } => "structure",
            Command::Demodularity { .. } => "demodularity",
            Command::Topics { .. } => "topics",
            Command::Export => "export",
            Command::Generate { .. } => "generate",
        }
    }
}

fn parse_layer_arg(s: &str) -> Result<(String, PathBuf), String> {
    let (name, path) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=PATH, got `{s}`"))?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Err(format!(
            "layer name `{name}` must be non-empty ASCII letters, digits, `_` or `-`"
        ));
    }
    if path.is_empty() {
        return Err(format!("layer `{name}` has an empty path"));
    }
    Ok((name.to_owned(), PathBuf::from(path)))
}
