//! Brute-force oracles and random instances shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use polarnet::{Layer, Link, Partition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random digraph without self-links. Weighted layers draw weights from
/// `[0.5, 3)`.
pub fn random_layer(rng: &mut ChaCha8Rng, n: usize, p: f64, weighted: bool) -> Layer {
    let mut links = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.gen::<f64>() < p {
                let w = if weighted { rng.gen_range(0.5..3.0) } else { 1.0 };
                links.push(Link::weighted(s, t, w));
            }
        }
    }
    Layer::new("random", weighted, links).unwrap()
}

pub fn random_membership(rng: &mut ChaCha8Rng, n: usize, groups: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..groups)).collect()
}

/// Dense weight matrix with self-links dropped.
pub fn adjacency(layer: &Layer, n: usize) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for l in layer.links() {
        if l.source != l.target {
            a[l.source][l.target] += l.weight;
        }
    }
    a
}

/// Double loop over every ordered pair, including `i == j` in the null term.
pub fn q_brute(layer: &Layer, n: usize, membership: &[usize]) -> f64 {
    let a = adjacency(layer, n);
    let k_out: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let k_in: Vec<f64> = (0..n).map(|j| a.iter().map(|r| r[j]).sum()).collect();
    let m: f64 = k_out.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if membership[i] == membership[j] {
                q += a[i][j] - k_out[i] * k_in[j] / m;
            }
        }
    }
    q / m
}

/// Demodularity from group `f` to group `t`, normalized by the out-weight of `f`.
pub fn demod_brute(layer: &Layer, n: usize, membership: &[usize], f: usize, t: usize) -> f64 {
    let a = adjacency(layer, n);
    let k_out: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let k_in: Vec<f64> = (0..n).map(|j| a.iter().map(|r| r[j]).sum()).collect();
    let m: f64 = k_out.iter().sum();
    let m_f: f64 = (0..n).filter(|&i| membership[i] == f).map(|i| k_out[i]).sum();
    let mut sum = 0.0;
    for i in (0..n).filter(|&i| membership[i] == f) {
        for j in (0..n).filter(|&j| membership[j] == t) {
            sum += a[i][j] - k_out[i] * k_in[j] / m;
        }
    }
    sum / m_f
}

/// Best Q over every set partition of `0..n`, enumerated as restricted
/// growth strings.
pub fn exhaustive_best_q(layer: &Layer, n: usize) -> f64 {
    let a = adjacency(layer, n);
    let k_out: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let k_in: Vec<f64> = (0..n).map(|j| a.iter().map(|r| r[j]).sum()).collect();
    let m: f64 = k_out.iter().sum();
    let b: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (a[i][j] - k_out[i] * k_in[j] / m) / m).collect())
        .collect();
    let mut best = f64::NEG_INFINITY;
    let mut labels = vec![0usize; n];
    fn rec(v: usize, groups: usize, labels: &mut [usize], b: &[Vec<f64>], best: &mut f64) {
        let n = labels.len();
        if v == n {
            let mut q = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if labels[i] == labels[j] {
                        q += b[i][j];
                    }
                }
            }
            *best = best.max(q);
            return;
        }
        for g in 0..=groups {
            labels[v] = g;
            rec(v + 1, groups.max(g + 1), labels, b, best);
        }
    }
    rec(0, 0, &mut labels, &b, &mut best);
    best
}

/// Mean over connected ordered pairs of the Floyd-Warshall distance.
#[allow(clippy::needless_range_loop)]
pub fn apl_floyd_warshall(n: usize, arcs: &[(usize, usize)]) -> Option<f64> {
    const INF: usize = usize::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(s, t) in arcs {
        if s != t {
            d[s][t] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let (mut total, mut pairs) = (0usize, 0usize);
    for i in 0..n {
        for j in 0..n {
            if i != j && d[i][j] < INF {
                total += d[i][j];
                pairs += 1;
            }
        }
    }
    (pairs > 0).then(|| total as f64 / pairs as f64)
}

/// Core numbers by literal peeling: for each k, repeatedly delete nodes of
/// degree below k; a node's core number is the largest k it survives.
pub fn kcore_brute(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut core = vec![0; n];
    for k in 1..=n {
        let mut alive = vec![true; n];
        loop {
            let degree = |v: usize, alive: &[bool]| adj[v].iter().filter(|&&u| alive[u]).count();
            let doomed: Vec<usize> = (0..n).filter(|&v| alive[v] && degree(v, &alive) < k).collect();
            if doomed.is_empty() {
                break;
            }
            for v in doomed {
                alive[v] = false;
            }
        }
        if !alive.iter().any(|&a| a) {
            break;
        }
        for v in (0..n).filter(|&v| alive[v]) {
            core[v] = k;
        }
    }
    core
}

/// Hop distances from `s` by breadth-first search.
pub fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[s] = Some(0);
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if dist[u].is_none() {
                dist[u] = Some(dist[v].unwrap() + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Upper tail of χ²₁ from the series of the lower incomplete gamma
/// function, `P(1/2, x/2) = e^{-x/2} (x/2)^{1/2} Σ (x/2)^k / Γ(k + 3/2)`.
pub fn chi2_1_sf_series(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let z = x / 2.0;
    // Γ(3/2) = √π / 2, then Γ(k + 3/2) = (k + 1/2) Γ(k + 1/2).
    let mut term = 1.0 / (std::f64::consts::PI.sqrt() / 2.0);
    let mut sum = term;
    for k in 1..2000 {
        term *= z / (k as f64 + 0.5);
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    let lower = (-z).exp() * z.sqrt() * sum;
    1.0 - lower
}

pub fn partition(membership: &[usize]) -> Partition {
    Partition::from_membership(membership, "g")
}
