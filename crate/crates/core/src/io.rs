//! File formats: layer edge lists, node tables, merge configs, party
//! positions, comment corpora, and graph export.
//!
//! All tabular inputs are UTF-8 CSV with a header row.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::ideology::PartyPosition;
use crate::network::{Layer, Link, MultiplexNetwork, NodeRegistry, PartyMergeConfig};
use crate::temporal::Event;
use crate::topics::CommentRecord;

pub const DATE_FORMAT: &str = "%Y-%m-%d";

/// Column layout of a layer file. Optional columns that are `None` are
/// absent from the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSchema {
    pub source: usize,
    pub target: usize,
    pub weight: Option<usize>,
    pub date: Option<usize>,
}

impl LayerSchema {
    /// Reads the layout from a header row naming `source`, `target` and
    /// optionally `weight` and `date` (case-insensitive, any order).
    pub fn from_header(header: &csv::StringRecord) -> std::result::Result<Self, String> {
        let find = |name: &str| header.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
        Ok(LayerSchema {
            source: find("source").ok_or("header lacks a `source` column")?,
            target: find("target").ok_or("header lacks a `target` column")?,
            weight: find("weight"),
            date: find("date"),
        })
    }
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(path)
        .map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.display().to_string(),
            line,
            message: format!("{other:?}"),
        },
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s, DATE_FORMAT).ok()
}

/// Reads one layer, registering unseen node ids. The layer is weighted iff
/// the file has a `weight` column.
pub fn read_layer(path: &Path, name: &str, registry: &mut NodeRegistry) -> Result<Layer> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let schema = LayerSchema::from_header(&header).map_err(|m| parse_err(path, 1, m))?;
    read_layer_with(rdr, path, name, &schema, registry)
}

pub fn read_layer_with<R: std::io::Read>(
    mut rdr: csv::Reader<R>,
    path: &Path,
    name: &str,
    schema: &LayerSchema,
    registry: &mut NodeRegistry,
) -> Result<Layer> {
    let mut links = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| record.get(i).unwrap_or("");
        let (s, t) = (field(schema.source), field(schema.target));
        if s.is_empty() || t.is_empty() {
            return Err(parse_err(path, line, "empty source or target"));
        }
        let mut link = Link::new(registry.intern(s), registry.intern(t));
        if let Some(col) = schema.weight {
            let raw = field(col);
            let w: f64 = raw
                .parse()
                .map_err(|_| parse_err(path, line, format!("weight `{raw}` is not a number")))?;
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::validation(format!(
                    "{}:{line}: weight must be positive, got {raw}",
                    path.display()
                )));
            }
            link.weight = w;
        }
        if let Some(col) = schema.date {
            let raw = field(col);
            if !raw.is_empty() {
                link.date = Some(parse_date(raw).ok_or_else(|| {
                    Error::validation(format!("{}:{line}: date `{raw}` is not YYYY-MM-DD", path.display()))
                })?);
            }
        }
        links.push(link);
    }
    Layer::new(name, schema.weight.is_some(), links)
}

/// Writes a layer in the format [`read_layer`] accepts.
pub fn layer_to_csv(layer: &Layer, registry: &NodeRegistry) -> String {
    let dated = layer.links().iter().any(|l| l.date.is_some());
    let mut out = String::from("source,target");
    if layer.is_weighted() {
        out.push_str(",weight");
    }
    if dated {
        out.push_str(",date");
    }
    out.push('\n');
    for l in layer.links() {
        out.push_str(&csv_field(registry.id(l.source)));
        out.push(',');
        out.push_str(&csv_field(registry.id(l.target)));
        if layer.is_weighted() {
            let _ = write!(out, ",{}", l.weight);
        }
        if dated {
            out.push(',');
            if let Some(d) = l.date {
                let _ = write!(out, "{}", d.format(DATE_FORMAT));
            }
        }
        out.push('\n');
    }
    out
}

/// Quotes a CSV field when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Node table `node_id,affiliation`. Registers every id and returns the raw
/// affiliation strings.
pub fn read_node_table(path: &Path, registry: &mut NodeRegistry) -> Result<HashMap<String, String>> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let col = |name: &str| header.iter().position(|h| h.eq_ignore_ascii_case(name));
    let id_col = col("node_id").ok_or_else(|| parse_err(path, 1, "header lacks `node_id`"))?;
    let aff_col = col("affiliation").ok_or_else(|| parse_err(path, 1, "header lacks `affiliation`"))?;
    let mut out = HashMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let id = record.get(id_col).unwrap_or("");
        if id.is_empty() {
            return Err(parse_err(path, line, "empty node_id"));
        }
        registry.intern(id);
        out.insert(id.to_owned(), record.get(aff_col).unwrap_or("").to_owned());
    }
    Ok(out)
}

pub fn read_merge_config(path: &Path) -> Result<PartyMergeConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    PartyMergeConfig::parse(&text, &path.display().to_string())
}

/// Party positions `party,lr,cl`.
pub fn read_positions(path: &Path) -> Result<Vec<PartyPosition>> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| parse_err(path, 1, format!("header lacks `{name}`")))
    };
    let (p, lr, cl) = (col("party")?, col("lr")?, col("cl")?);
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let num = |i: usize| -> Result<f64> {
            let raw = record.get(i).unwrap_or("");
            raw.parse()
                .map_err(|_| parse_err(path, line, format!("`{raw}` is not a number")))
        };
        out.push(PartyPosition::new(record.get(p).unwrap_or(""), num(lr)?, num(cl)?));
    }
    Ok(out)
}

/// Comment corpus `author,date,text`. Authors must already be registered.
pub fn read_comments(path: &Path, registry: &NodeRegistry) -> Result<Vec<CommentRecord>> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| parse_err(path, 1, format!("header lacks `{name}`")))
    };
    let (a, d, t) = (col("author")?, col("date")?, col("text")?);
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let author_id = record.get(a).unwrap_or("");
        let author = registry
            .get(author_id)
            .ok_or_else(|| parse_err(path, line, format!("unknown author `{author_id}`")))?;
        let raw_date = record.get(d).unwrap_or("");
        let date = parse_date(raw_date)
            .ok_or_else(|| parse_err(path, line, format!("date `{raw_date}` is not YYYY-MM-DD")))?;
        out.push(CommentRecord {
            author,
            date,
            text: record.get(t).unwrap_or("").to_owned(),
        });
    }
    Ok(out)
}

/// Event list `date,label` for time-series annotation.
pub fn read_events(path: &Path) -> Result<Vec<Event>> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| parse_err(path, 1, format!("header lacks `{name}`")))
    };
    let (d, l) = (col("date")?, col("label")?);
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let raw = record.get(d).unwrap_or("");
        let date = parse_date(raw).ok_or_else(|| parse_err(path, line, format!("date `{raw}` is not YYYY-MM-DD")))?;
        out.push(Event {
            date,
            label: record.get(l).unwrap_or("").to_owned(),
        });
    }
    Ok(out)
}

/// GraphML document with every layer as a set of typed edges.
///
/// Nodes carry their id and, when given, a `group` attribute; edges carry
/// `layer`, `weight` and, when present, `date`.
pub fn to_graphml(network: &MultiplexNetwork, groups: Option<&[String]>) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"group\" for=\"node\" attr.name=\"group\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"layer\" for=\"edge\" attr.name=\"layer\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    out.push_str("  <key id=\"date\" for=\"edge\" attr.name=\"date\" attr.type=\"string\"/>\n");
    out.push_str("  <graph id=\"multiplex\" edgedefault=\"directed\">\n");
    let reg = network.registry();
    for (i, id) in reg.ids().iter().enumerate() {
        match groups {
            Some(g) => {
                let _ = writeln!(
                    out,
                    "    <node id=\"{}\"><data key=\"group\">{}</data></node>",
                    xml_escape(id),
                    xml_escape(&g[i])
                );
            }
            None => {
                let _ = writeln!(out, "    <node id=\"{}\"/>", xml_escape(id));
            }
        }
    }
    let mut edge = 0usize;
    for layer in network.layers() {
        for l in layer.links() {
            let _ = write!(
                out,
                "    <edge id=\"e{edge}\" source=\"{}\" target=\"{}\"><data key=\"layer\">{}</data><data key=\"weight\">{}</data>",
                xml_escape(reg.id(l.source)),
                xml_escape(reg.id(l.target)),
                xml_escape(layer.name()),
                l.weight
            );
            if let Some(d) = l.date {
                let _ = write!(out, "<data key=\"date\">{}</data>", d.format(DATE_FORMAT));
            }
            out.push_str("</edge>\n");
            edge += 1;
        }
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Writes `contents` to `path` through a sibling temp file and a rename, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(contents).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn temp_csv(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reads_unweighted_rows() {
        let f = temp_csv("source,target\na,b\nb,a\na,c\n");
        let mut reg = NodeRegistry::new();
        let layer = read_layer(f.path(), "supports", &mut reg).unwrap();
        assert_eq!(layer.len(), 3);
        assert_eq!(reg.len(), 3);
        assert!(!layer.is_weighted());
        assert!(layer.links().iter().all(|l| l.weight == 1.0));
    }

    #[test]
    fn reads_weight_and_date() {
        let f = temp_csv("source,target,weight,date\na,b,2,2011-10-23\n");
        let mut reg = NodeRegistry::new();
        let layer = read_layer(f.path(), "likes", &mut reg).unwrap();
        let l = layer.links()[0];
        assert_eq!(l.weight, 2.0);
        assert_eq!(l.date, NaiveDate::from_ymd_opt(2011, 10, 23));
        assert!(layer.is_weighted());
    }

    #[test]
    fn rejects_negative_weight() {
        let f = temp_csv("source,target,weight\na,b,1\na,b,-1\n");
        let err = read_layer(f.path(), "likes", &mut NodeRegistry::new()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains(":3"), "{err}");
    }

    #[test]
    fn rejects_bad_date_and_malformed_rows() {
        let f = temp_csv("source,target,date\na,b,2011-13-45\n");
        let err = read_layer(f.path(), "x", &mut NodeRegistry::new()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));

        let f = temp_csv("source,target\na,b\na,b,c\n");
        let err = read_layer(f.path(), "x", &mut NodeRegistry::new()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other}"),
        }

        let f = temp_csv("source,target,weight\na,b,heavy\n");
        let err = read_layer(f.path(), "x", &mut NodeRegistry::new()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn graphml_escapes_ids() {
        let mut net = MultiplexNetwork::new(NodeRegistry::new());
        let a = net.registry_mut().intern("a&b");
        let b = net.registry_mut().intern("<c>");
        net.insert_layer(Layer::from_pairs("supports", &[(a, b)])).unwrap();
        let xml = to_graphml(&net, None);
        assert!(xml.contains("a&amp;b"));
        assert!(xml.contains("&lt;c&gt;"));
        assert!(xml.contains("<data key=\"layer\">supports</data>"));
    }
}
