//! Greedy agglomeration: repeatedly merge the pair of groups with the
//! largest modularity gain until no merge gains.

use std::collections::BTreeMap;

use super::graph::{canonical, SymGraph};

/// Merges groups of `membership` (or singletons when `None`).
///
/// Ties between equal gains go to the pair with the smallest lower label,
/// then the smallest upper label; the merged group keeps the lower label.
pub(crate) fn agglomerate(graph: &SymGraph, membership: Option<&[usize]>) -> Vec<usize> {
    let n = graph.len();
    let start: Vec<usize> = match membership {
        Some(m) => canonical(m),
        None => (0..n).collect(),
    };
    let groups = start.iter().max().map_or(0, |g| g + 1);
    let m = graph.m;
    let mut out = vec![0.0; groups];
    let mut inn = vec![0.0; groups];
    let mut nb: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); groups];
    for v in 0..n {
        let a = start[v];
        out[a] += graph.k_out[v];
        inn[a] += graph.k_in[v];
        for (u, w) in graph.neighbors(v) {
            let b = start[u];
            if a != b {
                *nb[a].entry(b).or_insert(0.0) += w;
            }
        }
    }
    let gain = |a: usize, b: usize, e: f64, out: &[f64], inn: &[f64]| (e - (out[a] * inn[b] + out[b] * inn[a]) / m) / m;
    let best_of = |c: usize, nb: &[BTreeMap<usize, f64>], out: &[f64], inn: &[f64]| {
        let mut best: Option<(f64, usize)> = None;
        for (&d, &e) in &nb[c] {
            let g = gain(c, d, e, out, inn);
            if best.is_none_or(|(bg, _)| g > bg) {
                best = Some((g, d));
            }
        }
        best
    };
    let mut alive = vec![true; groups];
    let mut best: Vec<Option<(f64, usize)>> = (0..groups).map(|c| best_of(c, &nb, &out, &inn)).collect();
    let mut parent: Vec<usize> = (0..groups).collect();

    loop {
        let mut pick: Option<(f64, usize, usize)> = None;
        for c in 0..groups {
            if !alive[c] {
                continue;
            }
            if let Some((g, d)) = best[c] {
                let (lo, hi) = (c.min(d), c.max(d));
                let better = match pick {
                    None => true,
                    Some((pg, plo, phi)) => g > pg || (g == pg && (lo, hi) < (plo, phi)),
                };
                if better {
                    pick = Some((g, lo, hi));
                }
            }
        }
        let Some((g, a, b)) = pick else { break };
        if g <= 0.0 {
            break;
        }
        // Merge b into a.
        alive[b] = false;
        parent[b] = a;
        out[a] += out[b];
        inn[a] += inn[b];
        let moved = std::mem::take(&mut nb[b]);
        nb[a].remove(&b);
        for (c, w) in moved {
            if c == a {
                continue;
            }
            *nb[a].entry(c).or_insert(0.0) += w;
            let row = &mut nb[c];
            row.remove(&b);
            *row.entry(a).or_insert(0.0) += w;
        }
        best[b] = None;
        best[a] = best_of(a, &nb, &out, &inn);
        let neighbors: Vec<usize> = nb[a].keys().copied().collect();
        for c in neighbors {
            best[c] = best_of(c, &nb, &out, &inn);
        }
    }

    let root = |mut c: usize| {
        while parent[c] != c {
            c = parent[c];
        }
        c
    };
    start.iter().map(|&g| root(g)).collect()
}
