//! Synthetic networks: planted partitions for detection checks and a
//! party-structured multiplex fixture with timestamps, affiliations,
//! positions and comments.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate};
use rand::Rng;

use crate::error::{Error, Result};
use crate::ideology::PartyPosition;
use crate::io::{csv_field, layer_to_csv, write_atomic, DATE_FORMAT};
use crate::network::{Layer, Link, MultiplexNetwork, NodeRegistry, Partition};
use crate::seed;
use crate::temporal::Event;
use crate::topics::CommentRecord;

/// Directed planted-partition graph on `groups * size` nodes, as a network
/// with the single layer `planted`. Node `i` belongs to group `i / size`.
pub fn generate_planted_partition(
    groups: usize,
    size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(MultiplexNetwork, Partition)> {
    if !(0.0 <= p_out && p_out < p_in && p_in <= 1.0) {
        return Err(Error::validation(format!(
            "planted partition needs 0 <= p_out < p_in <= 1, got p_in {p_in}, p_out {p_out}"
        )));
    }
    if groups == 0 || size == 0 {
        return Err(Error::validation(
            "planted partition needs at least one non-empty group",
        ));
    }
    let n = groups * size;
    let mut registry = NodeRegistry::new();
    for i in 0..n {
        registry.intern(&format!("n{i}"));
    }
    let mut rng = seed::rng(seed::derive(seed, "planted", 0));
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let p = if i / size == j / size { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                pairs.push((i, j));
            }
        }
    }
    let mut net = MultiplexNetwork::new(registry);
    net.insert_layer(Layer::from_pairs("planted", &pairs))?;
    let membership: Vec<usize> = (0..n).map(|i| i / size).collect();
    Ok((net, Partition::from_membership(&membership, "g")))
}

/// A party with its raw affiliation spellings, share of nodes and position.
struct PartySpec {
    label: &'static str,
    spellings: &'static [&'static str],
    share: f64,
    lr: f64,
    cl: f64,
}

const PARTIES: &[PartySpec] = &[
    PartySpec {
        label: "SVP",
        spellings: &["SVP", "JSVP", "EDU"],
        share: 0.22,
        lr: 8.1,
        cl: -3.9,
    },
    PartySpec {
        label: "SP",
        spellings: &["SP", "JUSO"],
        share: 0.18,
        lr: -7.4,
        cl: 4.1,
    },
    PartySpec {
        label: "FDP",
        spellings: &["FDP", "Jungfreisinnige"],
        share: 0.15,
        lr: 4.6,
        cl: 5.3,
    },
    PartySpec {
        label: "CVP",
        spellings: &["CVP", "JCVP"],
        share: 0.12,
        lr: 1.2,
        cl: -0.8,
    },
    PartySpec {
        label: "GPS",
        spellings: &["GPS", "Junge Grüne"],
        share: 0.09,
        lr: -8.0,
        cl: 6.2,
    },
    PartySpec {
        label: "GLP",
        spellings: &["GLP"],
        share: 0.06,
        lr: -0.9,
        cl: 6.9,
    },
    PartySpec {
        label: "BDP",
        spellings: &["BDP"],
        share: 0.05,
        lr: 2.3,
        cl: 1.1,
    },
    PartySpec {
        label: "EVP",
        spellings: &["EVP"],
        share: 0.04,
        lr: -0.3,
        cl: -4.6,
    },
];

const UNALIGNED_SHARE: f64 = 0.09;

const TOPIC_WORDS: &[&str] = &[
    "Asyl",
    "Armee",
    "Zuwanderung",
    "Grenze",
    "Souveränität",
    "Bauern",
    "Mindestlohn",
    "Rente",
    "Gerechtigkeit",
    "Mieten",
    "Bildung",
    "Gleichstellung",
    "Wirtschaft",
    "Steuern",
    "Unternehmen",
    "Freihandel",
    "Wettbewerb",
    "Bürokratie",
    "Familie",
    "Gemeinden",
    "Kompromiss",
    "Föderalismus",
    "Solidarität",
    "Werte",
    "Klima",
    "Atomausstieg",
    "Velo",
    "Biodiversität",
    "Solarenergie",
    "Gewässer",
    "Innovation",
    "Energiewende",
    "Effizienz",
    "Landschaft",
    "Digitalisierung",
    "Mittelstand",
    "Bankgeheimnis",
    "Ehe",
    "Glaube",
    "Alkohol",
];

const COMMON_WORDS: &[&str] = &[
    "Schweiz",
    "Politik",
    "Abstimmung",
    "Vorlage",
    "Parlament",
    "Kanton",
    "Bundesrat",
    "Initiative",
    "Volk",
    "Zukunft",
    "Frage",
    "Meinung",
    "Danke",
    "Gratulation",
    "Artikel",
    "wichtig",
    "gut",
    "richtig",
    "leider",
    "heute",
    "und",
    "die",
    "der",
    "ist",
    "nicht",
    "wir",
];

/// Parameters of [`synthetic_fixture`].
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureSpec {
    pub nodes: usize,
    /// Distinct links per layer.
    pub links_per_layer: usize,
    pub comments: usize,
    pub start: NaiveDate,
    pub days: u32,
    /// Day offset of the event after which homophily drops.
    pub event_day: u32,
    pub seed: u64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        FixtureSpec {
            nodes: 3500,
            links_per_layer: 25_000,
            comments: 7000,
            start: NaiveDate::from_ymd_opt(2010, 1, 1).expect("valid date"),
            days: 730,
            event_day: 650,
            seed: 2011,
        }
    }
}

/// Generated inputs of a full analysis run.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub registry: NodeRegistry,
    /// Raw affiliation string per node.
    pub affiliations: Vec<String>,
    pub merge_config: String,
    pub layers: Vec<Layer>,
    pub positions: Vec<PartyPosition>,
    pub comments: Vec<CommentRecord>,
    pub events: Vec<Event>,
}

/// Paths written by [`Fixture::write`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixturePaths {
    pub layers: Vec<(String, PathBuf)>,
    pub nodes: PathBuf,
    pub merge: PathBuf,
    pub positions: PathBuf,
    pub comments: PathBuf,
    pub events: PathBuf,
}

/// Layer name, weighted flag and within-party link probability before the
/// event.
const LAYERS: &[(&str, bool, f64)] = &[("supports", false, 0.92), ("likes", true, 0.8), ("comments", true, 0.6)];
const HOMOPHILY_DROP: f64 = 0.35;

/// Party-structured multiplex network. Links mostly stay within a party
/// until `event_day` and cross party lines more often afterwards; targets
/// are skewed towards a few popular members of each party.
pub fn synthetic_fixture(spec: &FixtureSpec) -> Result<Fixture> {
    if spec.nodes < 2 || spec.days == 0 {
        return Err(Error::validation("fixture needs at least 2 nodes and 1 day"));
    }
    let mut rng = seed::rng(seed::derive(spec.seed, "fixture-nodes", 0));
    let mut registry = NodeRegistry::new();
    let mut affiliations = Vec::with_capacity(spec.nodes);
    // Party index per node; `None` for unaligned.
    let mut party_of: Vec<Option<usize>> = Vec::with_capacity(spec.nodes);
    let total_share: f64 = PARTIES.iter().map(|p| p.share).sum::<f64>() + UNALIGNED_SHARE;
    for i in 0..spec.nodes {
        registry.intern(&format!("p{i:04}"));
        let mut u = rng.gen::<f64>() * total_share;
        let mut chosen = None;
        for (k, p) in PARTIES.iter().enumerate() {
            if u < p.share {
                chosen = Some(k);
                break;
            }
            u -= p.share;
        }
        affiliations.push(match chosen {
            Some(k) => {
                let s = PARTIES[k].spellings;
                s[rng.gen_range(0..s.len())].to_owned()
            }
            None => String::new(),
        });
        party_of.push(chosen);
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); PARTIES.len()];
    for (i, p) in party_of.iter().enumerate() {
        if let Some(k) = p {
            members[*k].push(i);
        }
    }

    let mut layers = Vec::new();
    for (index, &(name, weighted, homophily)) in LAYERS.iter().enumerate() {
        let mut rng = seed::rng(seed::derive(spec.seed, name, index as u64));
        let mut seen = HashSet::new();
        let mut links = Vec::with_capacity(spec.links_per_layer);
        let mut attempts = 0usize;
        while links.len() < spec.links_per_layer && attempts < 20 * spec.links_per_layer {
            attempts += 1;
            let s = rng.gen_range(0..spec.nodes);
            let day = rng.gen_range(0..spec.days);
            let p_within = if day < spec.event_day {
                homophily
            } else {
                homophily - HOMOPHILY_DROP
            };
            let pool = match party_of[s] {
                Some(k) if rng.gen::<f64>() < p_within => &members[k],
                _ => &members[rng.gen_range(0..members.len())],
            };
            if pool.is_empty() {
                continue;
            }
            // Squaring the uniform draw favors the first members.
            let u: f64 = rng.gen();
            let t = pool[((u * u) * pool.len() as f64) as usize];
            if s == t || !seen.insert((s, t)) {
                continue;
            }
            let weight = if weighted {
                f64::from(rng.gen_range(1..=3u8))
            } else {
                1.0
            };
            links.push(Link::weighted(s, t, weight).on(spec.start + Duration::days(i64::from(day))));
        }
        layers.push(Layer::new(name, weighted, links)?);
    }

    let mut merge_config = String::from("# raw affiliation = party\n");
    for p in PARTIES {
        for s in p.spellings {
            let _ = writeln!(merge_config, "{s} = {}", p.label);
        }
    }
    merge_config.push_str("* = unaligned\n");

    let positions = PARTIES
        .iter()
        .map(|p| PartyPosition::new(p.label, p.lr, p.cl))
        .collect();

    let per_party = TOPIC_WORDS.len() / PARTIES.len();
    let mut rng = seed::rng(seed::derive(spec.seed, "fixture-comments", 0));
    let mut comments = Vec::with_capacity(spec.comments);
    for _ in 0..spec.comments {
        let author = rng.gen_range(0..spec.nodes);
        let len = rng.gen_range(6..=12);
        let mut words = Vec::with_capacity(len);
        for _ in 0..len {
            let word = match party_of[author] {
                Some(k) if rng.gen::<f64>() < 0.4 => TOPIC_WORDS[k * per_party + rng.gen_range(0..per_party)],
                _ if rng.gen::<f64>() < 0.2 => TOPIC_WORDS[rng.gen_range(0..TOPIC_WORDS.len())],
                _ => COMMON_WORDS[rng.gen_range(0..COMMON_WORDS.len())],
            };
            words.push(word);
        }
        let date = spec.start + Duration::days(i64::from(rng.gen_range(0..spec.days)));
        comments.push(CommentRecord {
            author,
            date,
            text: format!("{}.", words.join(" ")),
        });
    }

    let events = vec![Event {
        date: spec.start + Duration::days(i64::from(spec.event_day)),
        label: "election".into(),
    }];

    Ok(Fixture {
        registry,
        affiliations,
        merge_config,
        layers,
        positions,
        comments,
        events,
    })
}

impl Fixture {
    pub fn network(&self) -> Result<MultiplexNetwork> {
        let mut net = MultiplexNetwork::new(self.registry.clone());
        for l in &self.layers {
            net.insert_layer(l.clone())?;
        }
        Ok(net)
    }

    /// Writes every input file into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<FixturePaths> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut layers = Vec::new();
        for l in &self.layers {
            let path = dir.join(format!("{}.csv", l.name()));
            write_atomic(&path, layer_to_csv(l, &self.registry).as_bytes())?;
            layers.push((l.name().to_owned(), path));
        }

        let mut nodes = String::from("node_id,affiliation\n");
        for (id, aff) in self.registry.ids().iter().zip(&self.affiliations) {
            let _ = writeln!(nodes, "{},{}", csv_field(id), csv_field(aff));
        }
        let mut positions = String::from("party,lr,cl\n");
        for p in &self.positions {
            let _ = writeln!(positions, "{},{},{}", csv_field(&p.party), p.lr, p.cl);
        }
        let mut comments = String::from("author,date,text\n");
        for c in &self.comments {
            let _ = writeln!(
                comments,
                "{},{},{}",
                csv_field(self.registry.id(c.author)),
                c.date.format(DATE_FORMAT),
                csv_field(&c.text)
            );
        }
        let mut events = String::from("date,label\n");
        for e in &self.events {
            let _ = writeln!(events, "{},{}", e.date.format(DATE_FORMAT), csv_field(&e.label));
        }

        let paths = FixturePaths {
            layers,
            nodes: dir.join("nodes.csv"),
            merge: dir.join("merge.txt"),
            positions: dir.join("positions.csv"),
            comments: dir.join("comment_texts.csv"),
            events: dir.join("events.csv"),
        };
        write_atomic(&paths.nodes, nodes.as_bytes())?;
        write_atomic(&paths.merge, self.merge_config.as_bytes())?;
        write_atomic(&paths.positions, positions.as_bytes())?;
        write_atomic(&paths.comments, comments.as_bytes())?;
        write_atomic(&paths.events, events.as_bytes())?;
        Ok(paths)
    }
}
