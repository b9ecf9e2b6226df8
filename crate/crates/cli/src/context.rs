//! Input loading shared by the commands.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{bail, Context as _, Result};
use polarnet::community::{parse_portfolio, run_portfolio, ComboScript, DetectionResult};
use polarnet::io::{read_layer, read_merge_config, read_node_table};
use polarnet::network::{filter_partition, DEFAULT_UNALIGNED};
use polarnet::{seed, Layer, MultiplexNetwork, NodeRegistry, Partition, PartyMergeConfig};

use crate::args::{Command, Common};
use crate::cache;

/// Which nodes an analysis sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScopeKind {
    All,
    /// Unaligned nodes and their links removed.
    Aligned,
}

impl ScopeKind {
    pub fn name(self) -> &'static str {
        match self {
            ScopeKind::All => "all",
            ScopeKind::Aligned => "aligned",
        }
    }
}

/// Network and party labels restricted to one scope.
#[derive(Debug, Clone)]
pub struct Scope {
    pub kind: ScopeKind,
    pub network: MultiplexNetwork,
    pub parties: Option<Partition>,
    /// Original node index to index in `network`.
    pub remap: Vec<Option<usize>>,
}

impl Scope {
    pub fn layer(&self, name: &str) -> &Layer {
        self.network.layer(name).expect("scope keeps every layer")
    }

    pub fn parties(&self) -> Result<&Partition> {
        self.parties
            .as_ref()
            .context("this command needs party labels; pass --nodes")
    }
}

/// Everything read from the input files.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub network: MultiplexNetwork,
    pub parties: Option<Partition>,
    pub unaligned: String,
}

impl Inputs {
    pub fn load(common: &Common) -> Result<Self> {
        let mut registry = NodeRegistry::new();
        // Node table first so its order fixes the node indices.
        let raw = match &common.nodes {
            Some(path) => Some(read_node_table(path, &mut registry)?),
            None => None,
        };
        let mut layers = Vec::with_capacity(common.layers.len());
        for (name, path) in &common.layers {
            if layers.iter().any(|l: &Layer| l.name() == name) {
                bail!("layer `{name}` given twice");
            }
            layers.push(read_layer(path, name, &mut registry)?);
        }
        let mut network = MultiplexNetwork::new(registry);
        for layer in layers {
            network.insert_layer(layer)?;
        }
        let config = match &common.merge {
            Some(path) => read_merge_config(path)?,
            None => raw.as_ref().map(identity_merge).unwrap_or_default(),
        };
        let parties = raw.map(|raw| config.apply(network.registry(), &raw));
        Ok(Inputs {
            network,
            parties,
            unaligned: config.unaligned_label().to_owned(),
        })
    }

    pub fn scope(&self, kind: ScopeKind) -> Result<Scope> {
        let n = self.network.node_count();
        match (kind, &self.parties) {
            (ScopeKind::All, parties) => Ok(Scope {
                kind,
                network: self.network.clone(),
                parties: parties.clone(),
                remap: (0..n).map(Some).collect(),
            }),
            (ScopeKind::Aligned, None) => bail!("excluding unaligned nodes needs party labels; pass --nodes"),
            (ScopeKind::Aligned, Some(parties)) => {
                let (network, filtered) = filter_partition(&self.network, parties, &self.unaligned)?;
                let drop = parties.group_index(&self.unaligned);
                let mut next = 0;
                let remap = parties
                    .membership()
                    .iter()
                    .map(|&g| {
                        (Some(g) != drop).then(|| {
                            next += 1;
                            next - 1
                        })
                    })
                    .collect();
                Ok(Scope {
                    kind,
                    network,
                    parties: Some(filtered),
                    remap,
                })
            }
        }
    }
}

/// Every non-empty raw affiliation is its own party.
fn identity_merge(raw: &HashMap<String, String>) -> PartyMergeConfig {
    let labels = raw
        .values()
        .map(|r| r.trim())
        .filter(|r| !r.is_empty())
        .map(|r| (r.to_owned(), r.to_owned()));
    PartyMergeConfig::new(labels, DEFAULT_UNALIGNED)
}

/// Settings resolved from the command line.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub common: Common,
    pub portfolio: Vec<ComboScript>,
}

impl RunConfig {
    /// Checks that every referenced file exists and that the command has the
    /// inputs it needs.
    pub fn new(common: Common, command: &Command) -> Result<Self> {
        let mut files: Vec<(&str, &Path)> = common.layers.iter().map(|(_, p)| ("layer", p.as_path())).collect();
        let optional = [
            ("node table", &common.nodes),
            ("merge config", &common.merge),
            ("positions", &common.positions),
            ("comments", &common.comments),
        ];
        files.extend(optional.iter().filter_map(|(what, p)| p.as_deref().map(|p| (*what, p))));
        match command {
            Command::Timeseries { events: Some(p), .. } => files.push(("events", p)),
            Command::Topics { stopwords: Some(p), .. } => files.push(("stopwords", p)),
            _ => {}
        }
        for (what, path) in files {
            if !path.is_file() {
                bail!("{what} file {} does not exist", path.display());
            }
        }

        let generating = matches!(command, Command::Generate { .. });
        if !generating && common.layers.is_empty() {
            bail!("no input layers; pass --layer NAME=PATH");
        }
        let needs_parties = !matches!(
            command,
            Command::LayerSimilarity { .. } | Command::Export | Command::Generate { .. }
        );
        if (needs_parties || common.exclude_unaligned) && common.nodes.is_none() {
            bail!("{} needs party labels; pass --nodes", command.name());
        }
        if common.merge.is_some() && common.nodes.is_none() {
            bail!("--merge needs --nodes");
        }
        let stochastic = match command {
            Command::Polarization | Command::GroupNmi { .. } | Command::Generate { .. } => true,
            Command::Topics { groups, .. } => *groups == crate::args::Groups::Detected,
            _ => false,
        };
        if stochastic && common.seed.is_none() {
            bail!("{} is randomized and needs --seed", command.name());
        }
        if matches!(command, Command::Topics { .. }) && common.comments.is_none() {
            bail!("topics needs --comments");
        }
        let portfolio = parse_portfolio(&common.portfolio).context("invalid --portfolio")?;
        Ok(RunConfig { common, portfolio })
    }

    pub fn out_dir(&self) -> Result<&Path> {
        let dir = self.common.out.as_path();
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(dir)
    }

    pub fn seed(&self) -> u64 {
        self.common.seed.expect("seed checked by RunConfig::new")
    }

    pub fn default_scope(&self) -> ScopeKind {
        if self.common.exclude_unaligned {
            ScopeKind::Aligned
        } else {
            ScopeKind::All
        }
    }

    /// Best portfolio partition of one layer, `None` if the layer has no
    /// links. The seed depends only on the root seed, the layer and the
    /// scope, so every command that detects communities on the same layer
    /// and scope gets the same partition; unless `--no-cache` is given, it
    /// is computed once and reused from the output directory.
    pub fn detect(&self, scope: &Scope, layer: &str) -> Result<Option<DetectionResult>> {
        let label = format!("detect/{layer}/{}", scope.kind.name());
        let s = seed::derive(self.seed(), &label, 0);
        let (layer_data, n) = (scope.layer(layer), scope.network.node_count());
        let path = cache::path(
            &self.common.out,
            &format!("{layer}-{}", scope.kind.name()),
            cache::key(layer_data, n, &self.portfolio, s),
        );
        if !self.common.no_cache {
            if let Some(hit) = cache::load(&path, layer_data, n) {
                return Ok(Some(hit));
            }
        }
        let Some(result) = crate::commands::defined(run_portfolio(layer_data, n, &self.portfolio, s))? else {
            return Ok(None);
        };
        if !self.common.no_cache {
            self.out_dir()?;
            cache::store(&path, &result).context("cannot write the detection cache")?;
        }
        Ok(Some(result))
    }
}
