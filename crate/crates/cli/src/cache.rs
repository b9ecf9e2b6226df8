//! On-disk reuse of detected partitions.
//!
//! Detection dominates the run time and several commands detect the same
//! layer with the same seed. Results are stored under the output directory,
//! keyed by a hash of everything the detection depends on: the layer's
//! links, the node count, the portfolio, the seed and the crate version.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Result;
use polarnet::community::{ComboScript, DetectionResult};
use polarnet::io::write_atomic;
use polarnet::modularity::q_modularity;
use polarnet::{Layer, Partition};
use serde::{Deserialize, Serialize};

pub const CACHE_DIR: &str = ".polarnet-cache";

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

struct Fnv(u64);

impl Fnv {
    fn bytes(&mut self, bytes: &[u8]) -> &mut Self {
        for &b in bytes {
            self.0 = (self.0 ^ u64::from(b)).wrapping_mul(FNV_PRIME);
        }
        self
    }

    fn u64(&mut self, v: u64) -> &mut Self {
        self.bytes(&v.to_le_bytes())
    }
}

/// Cache key of one detection.
pub fn key(layer: &Layer, node_count: usize, portfolio: &[ComboScript], seed: u64) -> u64 {
    let mut h = Fnv(FNV_OFFSET);
    h.bytes(env!("CARGO_PKG_VERSION").as_bytes())
        .u64(node_count as u64)
        .u64(seed);
    for script in portfolio {
        h.bytes(script.to_string().as_bytes()).bytes(b",");
    }
    h.u64(layer.links().len() as u64);
    for l in layer.links() {
        let day = l
            .date
            .map_or(i64::MIN, |d| i64::from(chrono::Datelike::num_days_from_ce(&d)));
        h.u64(l.source as u64)
            .u64(l.target as u64)
            .u64(l.weight.to_bits())
            .u64(day as u64);
    }
    h.0
}

#[derive(Serialize, Deserialize)]
struct Entry {
    labels: Vec<String>,
    membership: Vec<usize>,
    script: String,
    seed: u64,
    group_count: usize,
    unconverged: usize,
}

pub fn path(out: &Path, stem: &str, key: u64) -> PathBuf {
    out.join(CACHE_DIR).join(format!("{stem}-{key:016x}.json"))
}

/// The stored result, if there is a readable one for `layer`.
pub fn load(path: &Path, layer: &Layer, node_count: usize) -> Option<DetectionResult> {
    let entry: Entry = serde_json::from_str(&fs::read_to_string(path).ok()?).ok()?;
    if entry.membership.len() != node_count {
        return None;
    }
    let partition = Partition::new(entry.labels, entry.membership).ok()?;
    Some(DetectionResult {
        q: q_modularity(layer, &partition).ok()?,
        partition,
        script: entry.script.parse().ok()?,
        seed: entry.seed,
        group_count: entry.group_count,
        unconverged: entry.unconverged,
    })
}

pub fn store(path: &Path, result: &DetectionResult) -> Result<()> {
    let entry = Entry {
        labels: result.partition.labels().to_vec(),
        membership: result.partition.membership().to_vec(),
        script: result.script.to_string(),
        seed: result.seed,
        group_count: result.group_count,
        unconverged: result.unconverged,
    };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    write_atomic(path, serde_json::to_string(&entry)?.as_bytes())?;
    Ok(())
}
