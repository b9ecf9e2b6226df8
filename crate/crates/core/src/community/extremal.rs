//! τ-extremal optimization by recursive bisection.
//!
//! A group is cut into two random halves. Node `i` on side `r` has fitness
//! `λ_i = κ_i / k_i - K_r / 2m`, where `κ_i` is its link weight to its own
//! side, `k_i` its degree and `K_r` the degree total of side `r`. At every
//! step a node is drawn by fitness rank `q` with probability `∝ q^-τ`
//! (rank 1 = worst) and moved to the other side. The cut with the best
//! exact modularity seen is kept if it raises Q, and both halves are
//! processed the same way.
//!
//! Within a side the offset `K_r / 2m` is shared, so each side keeps its
//! nodes ordered by `κ_i / k_i` and a move only re-keys the moved node's
//! neighbors.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::graph::{split_members, SymGraph};

pub(crate) const TAU: f64 = 1.4;

/// Steps without improvement before a bisection stops:
/// `PATIENCE_BASE + size / PATIENCE_DIVISOR`.
const PATIENCE_BASE: usize = 30;
const PATIENCE_DIVISOR: usize = 2;
/// Hard cap on steps per bisection: `STEP_CAP_BASE + STEP_CAP_FACTOR * size`.
const STEP_CAP_BASE: usize = 100;
const STEP_CAP_FACTOR: usize = 3;

pub(crate) fn extremal<R: Rng>(graph: &SymGraph, groups: Vec<Vec<usize>>, rng: &mut R) -> Vec<Vec<usize>> {
    let mut scratch = Vec::new();
    let mut ranks = RankSampler::default();
    let mut pending: Vec<Vec<usize>> = groups.into_iter().rev().collect();
    let mut done = Vec::new();
    while let Some(members) = pending.pop() {
        match bisect(graph, &members, rng, &mut ranks, &mut scratch) {
            Some((a, b)) => {
                pending.push(b);
                pending.push(a);
            }
            None => done.push(members),
        }
    }
    done
}

/// Draws ranks `1..=n` with probability `∝ q^-τ`.
#[derive(Default)]
struct RankSampler {
    cumulative: Vec<f64>,
}

impl RankSampler {
    fn sample<R: Rng>(&mut self, n: usize, rng: &mut R) -> usize {
        while self.cumulative.len() < n {
            let q = self.cumulative.len() + 1;
            let last = self.cumulative.last().copied().unwrap_or(0.0);
            self.cumulative.push(last + (q as f64).powf(-TAU));
        }
        let total = self.cumulative[n - 1];
        let u = rng.gen::<f64>() * total;
        self.cumulative[..n].partition_point(|&c| c <= u).min(n - 1)
    }
}

/// Sort key: fitness without the side offset, then node index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Node with 0-based fitness rank `q` over both sides.
fn nth_worst(sides: &[BTreeSet<Key>; 2], offset: [f64; 2], q: usize) -> usize {
    let mut a = sides[0].iter().peekable();
    let mut b = sides[1].iter().peekable();
    let pick = |a: &mut std::iter::Peekable<_>, b: &mut std::iter::Peekable<_>| -> usize {
        let take_a = match (a.peek(), b.peek()) {
            (Some(&&Key(x, i)), Some(&&Key(y, j))) => {
                (x - offset[0]).total_cmp(&(y - offset[1])).then(i.cmp(&j)).is_lt()
            }
            (Some(_), None) => true,
            _ => false,
        };
        let key: &Key = if take_a { a.next() } else { b.next() }.expect("rank within node count");
        key.1
    };
    for _ in 0..q {
        pick(&mut a, &mut b);
    }
    pick(&mut a, &mut b)
}

fn bisect<R: Rng>(
    graph: &SymGraph,
    members: &[usize],
    rng: &mut R,
    ranks: &mut RankSampler,
    scratch: &mut Vec<usize>,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = members.len();
    if n < 2 {
        return None;
    }
    let sub = graph.induced(members, scratch);
    let m = sub.m;

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut side = vec![0u8; n];
    for &v in &order[n / 2..] {
        side[v] = 1;
    }

    let degree: Vec<f64> = (0..n).map(|v| sub.k_out[v] + sub.k_in[v]).collect();
    let mut a = vec![[0.0f64; 2]; n];
    let mut tot = [[0.0f64; 2]; 2];
    for v in 0..n {
        let s = side[v] as usize;
        tot[s][0] += sub.k_out[v];
        tot[s][1] += sub.k_in[v];
        for (u, w) in sub.neighbors(v) {
            a[v][side[u] as usize] += w;
        }
    }
    let key_of = |v: usize, side: &[u8], a: &[[f64; 2]]| Key(a[v][side[v] as usize] / degree[v], v);
    let mut keys: Vec<Key> = (0..n).map(|v| key_of(v, &side, &a)).collect();
    let mut sides: [BTreeSet<Key>; 2] = [BTreeSet::new(), BTreeSet::new()];
    for v in 0..n {
        sides[side[v] as usize].insert(keys[v]);
    }

    let mut cross = sub.cross(&side);
    let mut best_cross = cross;
    let mut best_side = side.clone();

    let patience = PATIENCE_BASE + n / PATIENCE_DIVISOR;
    let cap = STEP_CAP_BASE + STEP_CAP_FACTOR * n;
    let eps = 1e-12 * m.max(1.0);
    let two_m = 2.0 * m;
    let mut stall = 0;

    for _ in 0..cap {
        let offset = [(tot[0][0] + tot[0][1]) / two_m, (tot[1][0] + tot[1][1]) / two_m];
        let q = ranks.sample(n, rng);
        let v = nth_worst(&sides, offset, q);

        let s = side[v] as usize;
        let t = 1 - s;
        let (ko, ki) = (sub.k_out[v], sub.k_in[v]);
        // Exact change of the cross term, excluding the self pair.
        let stay = a[v][s] - (ko * (tot[s][1] - ki) + ki * (tot[s][0] - ko)) / m;
        let join = a[v][t] - (ko * tot[t][1] + ki * tot[t][0]) / m;
        cross += stay - join;

        sides[s].remove(&keys[v]);
        side[v] = t as u8;
        keys[v] = key_of(v, &side, &a);
        sides[t].insert(keys[v]);
        tot[s][0] -= ko;
        tot[s][1] -= ki;
        tot[t][0] += ko;
        tot[t][1] += ki;
        for (u, w) in sub.neighbors(v) {
            a[u][s] -= w;
            a[u][t] += w;
            let su = side[u] as usize;
            sides[su].remove(&keys[u]);
            keys[u] = key_of(u, &side, &a);
            sides[su].insert(keys[u]);
        }

        if cross < best_cross - eps {
            best_cross = cross;
            best_side.copy_from_slice(&side);
            stall = 0;
        } else {
            stall += 1;
            if stall > patience {
                break;
            }
        }
    }

    let mut side = best_side;
    let cross = sub.polish_split(&mut side);
    if -cross / m <= 1e-12 || side.iter().all(|&s| s == side[0]) {
        return None;
    }
    Some(split_members(members, &side))
}
