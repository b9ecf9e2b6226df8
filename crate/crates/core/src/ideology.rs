//! Party positions, political distance and its correlation with
//! demodularity.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modularity::{demodularity_matrix, DemodNormalization};
use crate::network::{Layer, Partition};
use crate::stats::student_t_two_sided;

/// Position of a party on the left-right and conservative-liberal axes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartyPosition {
    pub party: String,
    pub lr: f64,
    pub cl: f64,
}

impl PartyPosition {
    pub fn new(party: impl Into<String>, lr: f64, cl: f64) -> Self {
        PartyPosition {
            party: party.into(),
            lr,
            cl,
        }
    }
}

pub fn euclidean_distance(a: &PartyPosition, b: &PartyPosition) -> f64 {
    (a.lr - b.lr).hypot(a.cl - b.cl)
}

/// Product-moment correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::validation(format!(
            "pearson needs equal lengths, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::undefined(format!(
            "pearson needs at least 3 points, got {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::undefined("pearson of a constant sequence"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Two-sided p-value of `r` over `n` points, from the t statistic on
/// `n - 2` degrees of freedom.
pub fn pearson_p_value(r: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::undefined("p-value needs at least 3 points"));
    }
    if r.abs() >= 1.0 {
        return Ok(0.0);
    }
    let df = (n - 2) as f64;
    student_t_two_sided(r * (df / (1.0 - r * r)).sqrt(), df)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Every ordered pair `(f, t)` is one data point.
    #[default]
    Ordered,
    /// One point per unordered pair, demodularity averaged over both
    /// directions.
    Unordered,
}

impl std::str::FromStr for Pairing {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ordered" => Ok(Pairing::Ordered),
            "unordered" => Ok(Pairing::Unordered),
            _ => Err(format!("unknown pairing `{s}` (ordered, unordered)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceDemodPair {
    pub from: String,
    pub to: String,
    pub distance: f64,
    pub demod: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemodDistanceAnalysis {
    pub pairs: Vec<DistanceDemodPair>,
    pub r: f64,
    pub p: f64,
}

/// Correlates demodularity with political distance over all pairs of
/// groups that have a position and a defined demodularity.
pub fn demod_distance_analysis(
    layer: &Layer,
    partition: &Partition,
    positions: &[PartyPosition],
    pairing: Pairing,
    norm: DemodNormalization,
) -> Result<DemodDistanceAnalysis> {
    let matrix = demodularity_matrix(layer, partition, norm)?;
    let by_label: HashMap<&str, &PartyPosition> = positions.iter().map(|p| (p.party.as_str(), p)).collect();
    let labels = &matrix.labels;
    let mut pairs = Vec::new();
    for f in 0..labels.len() {
        for t in 0..labels.len() {
            if f == t || (pairing == Pairing::Unordered && t < f) {
                continue;
            }
            let (Some(pf), Some(pt)) = (by_label.get(labels[f].as_str()), by_label.get(labels[t].as_str())) else {
                continue;
            };
            let demod = match pairing {
                Pairing::Ordered => matrix.get(f, t),
                Pairing::Unordered => match (matrix.get(f, t), matrix.get(t, f)) {
                    (Some(a), Some(b)) => Some((a + b) / 2.0),
                    _ => None,
                },
            };
            if let Some(demod) = demod {
                pairs.push(DistanceDemodPair {
                    from: labels[f].clone(),
                    to: labels[t].clone(),
                    distance: euclidean_distance(pf, pt),
                    demod,
                });
            }
        }
    }
    if pairs.len() < 3 {
        return Err(Error::undefined(format!(
            "only {} usable group pairs, need at least 3",
            pairs.len()
        )));
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.distance).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.demod).collect();
    let r = pearson(&xs, &ys)?;
    let p = pearson_p_value(r, pairs.len())?;
    Ok(DemodDistanceAnalysis { pairs, r, p })
}
