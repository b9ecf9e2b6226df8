//! Fine-tuning by node repositioning.
//!
//! Greedy sweeps move single nodes while that strictly raises Q. Once they
//! stall, a Kernighan-Lin pass forces up to [`KL_DEPTH`] moves, each the
//! best available (possibly negative) move of a node not yet moved in the
//! pass, then keeps the prefix of moves with the largest total gain. The
//! same pass confined to a linked pair of groups plus an empty one (or to
//! one group plus an empty one) re-splits their union, which covers merges
//! and splits that no sequence of individually chosen moves reaches. While
//! a work budget lasts, passes are also opened with every possible single
//! move, since the pass's own first choice can lock the node that matters.

use std::collections::BTreeSet;

use super::graph::{groups_of, SymGraph};

/// Forced moves per Kernighan-Lin pass. Each move scans every edge, so a
/// pass costs `O(KL_DEPTH * m)`.
const KL_DEPTH: usize = 48;

/// Edge scans allowed for forced-start Kernighan-Lin passes in one
/// repositioning. Small graphs get every forced start; on large ones the
/// budget does not cover a single pass and the step is skipped.
const FORCED_BUDGET: usize = 4_000_000;

const EPS: f64 = 1e-13;

/// Target of a move: an existing group or a fresh empty one.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Target {
    Group(usize),
    Fresh,
}

struct State<'a> {
    graph: &'a SymGraph,
    membership: Vec<usize>,
    out: Vec<f64>,
    inn: Vec<f64>,
    size: Vec<usize>,
    /// Groups that became empty; may hold stale entries.
    free: Vec<usize>,
    link_to: Vec<f64>,
    touched: Vec<usize>,
}

impl<'a> State<'a> {
    fn new(graph: &'a SymGraph, membership: Vec<usize>) -> Self {
        let groups = membership.iter().max().map_or(0, |g| g + 1);
        let mut s = State {
            graph,
            membership,
            out: vec![0.0; groups],
            inn: vec![0.0; groups],
            size: vec![0; groups],
            free: Vec::new(),
            link_to: vec![0.0; groups],
            touched: Vec::new(),
        };
        for v in 0..graph.len() {
            let g = s.membership[v];
            s.out[g] += graph.k_out[v];
            s.inn[g] += graph.k_in[v];
            s.size[g] += 1;
        }
        s.free = (0..groups).filter(|&g| s.size[g] == 0).rev().collect();
        s
    }

    /// Best move of `v` and its modularity gain; `None` if `v` has nowhere
    /// to go. With `positive_only`, only strictly improving moves count.
    fn best_move(&mut self, v: usize, positive_only: bool) -> Option<(f64, Target)> {
        let g = self.graph;
        let m = g.m;
        let s = self.membership[v];
        let (ko, ki) = (g.k_out[v], g.k_in[v]);
        self.touched.clear();
        for (u, w) in g.neighbors(v) {
            let t = self.membership[u];
            if self.link_to[t] == 0.0 {
                self.touched.push(t);
            }
            self.link_to[t] += w;
        }
        let stay = self.link_to[s] - (ko * (self.inn[s] - ki) + ki * (self.out[s] - ko)) / m;
        let mut best: Option<(f64, Target)> = None;
        let floor = if positive_only { EPS } else { f64::NEG_INFINITY };
        self.touched.sort_unstable();
        for &t in &self.touched {
            if t == s {
                continue;
            }
            let gain = (self.link_to[t] - (ko * self.inn[t] + ki * self.out[t]) / m - stay) / m;
            if gain > floor && best.is_none_or(|(b, _)| gain > b + EPS) {
                best = Some((gain, Target::Group(t)));
            }
        }
        if self.size[s] > 1 {
            // Fresh group: no links, no expected weight.
            let gain = -stay / m;
            if gain > floor && best.is_none_or(|(b, _)| gain > b + EPS) {
                best = Some((gain, Target::Fresh));
            }
        }
        for &t in &self.touched {
            self.link_to[t] = 0.0;
        }
        best
    }

    fn fresh_group(&mut self) -> usize {
        while let Some(g) = self.free.pop() {
            if self.size[g] == 0 {
                return g;
            }
        }
        self.out.push(0.0);
        self.inn.push(0.0);
        self.size.push(0);
        self.link_to.push(0.0);
        self.size.len() - 1
    }

    /// Moves `v` and returns the group it left.
    fn apply(&mut self, v: usize, target: Target) -> usize {
        let t = match target {
            Target::Group(t) => t,
            Target::Fresh => self.fresh_group(),
        };
        let s = self.membership[v];
        let (ko, ki) = (self.graph.k_out[v], self.graph.k_in[v]);
        self.membership[v] = t;
        self.out[s] -= ko;
        self.inn[s] -= ki;
        self.size[s] -= 1;
        self.out[t] += ko;
        self.inn[t] += ki;
        self.size[t] += 1;
        if self.size[s] == 0 {
            self.free.push(s);
        }
        s
    }

    /// Sweeps in node order until no single move strictly raises Q.
    fn greedy(&mut self) {
        loop {
            let mut moved = false;
            for v in 0..self.graph.len() {
                if let Some((_, target)) = self.best_move(v, true) {
                    self.apply(v, target);
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
    }

    /// One Kernighan-Lin pass, optionally opening with a forced move of
    /// known gain; true if it raised Q.
    fn kernighan_lin(&mut self, forced: Option<(usize, Target, f64)>) -> bool {
        let n = self.graph.len();
        let mut locked = vec![false; n];
        let mut log: Vec<(usize, usize)> = Vec::new();
        let (mut total, mut best, mut best_len) = (0.0, 0.0, 0);
        if let Some((v, target, gain)) = forced {
            let from = self.apply(v, target);
            locked[v] = true;
            log.push((v, from));
            total = gain;
        }
        for _ in log.len()..KL_DEPTH.min(n) {
            let mut pick: Option<(f64, usize, Target)> = None;
            for v in (0..n).filter(|&v| !locked[v]) {
                if let Some((gain, target)) = self.best_move(v, false) {
                    if pick.is_none_or(|(b, _, _)| gain > b + EPS) {
                        pick = Some((gain, v, target));
                    }
                }
            }
            let Some((gain, v, target)) = pick else { break };
            let from = self.apply(v, target);
            locked[v] = true;
            log.push((v, from));
            total += gain;
            if total > best + EPS {
                best = total;
                best_len = log.len();
            }
        }
        for &(v, from) in log[best_len..].iter().rev() {
            self.apply(v, Target::Group(from));
        }
        best_len > 0
    }

    /// Every move of `v` to a neighboring group or, unless `v` is alone, to
    /// a fresh group, with its gain.
    fn moves_of(&self, v: usize) -> Vec<(usize, Target, f64)> {
        let mut targets: Vec<usize> = self.graph.neighbors(v).map(|(u, _)| self.membership[u]).collect();
        targets.sort_unstable();
        targets.dedup();
        let s = self.membership[v];
        let mut moves: Vec<(usize, Target, f64)> = targets
            .into_iter()
            .filter(|&t| t != s)
            .map(|t| (v, Target::Group(t), self.gain_to(v, t)))
            .collect();
        if self.size[s] > 1 {
            moves.push((v, Target::Fresh, self.gain_to_empty(v)));
        }
        moves
    }

    fn gain_to_empty(&self, v: usize) -> f64 {
        let g = self.graph;
        let s = self.membership[v];
        let (ko, ki) = (g.k_out[v], g.k_in[v]);
        let to_s: f64 = g
            .neighbors(v)
            .filter(|&(u, _)| self.membership[u] == s)
            .map(|(_, w)| w)
            .sum();
        -(to_s - (ko * (self.inn[s] - ki) + ki * (self.out[s] - ko)) / g.m) / g.m
    }

    /// Kernighan-Lin passes opened by every possible single move, while
    /// `budget` (in edge scans) lasts. True at the first pass that raised Q.
    fn forced_kernighan_lin(&mut self, budget: &mut usize) -> bool {
        let n = self.graph.len();
        let pass_cost = self.graph.adjacency_len().max(1) * KL_DEPTH.min(n);
        for v in 0..n {
            for forced in self.moves_of(v) {
                if *budget < pass_cost {
                    return false;
                }
                *budget -= pass_cost;
                if self.kernighan_lin(Some(forced)) {
                    return true;
                }
            }
        }
        false
    }

    /// Gain of moving `v` from its group to group `t`.
    fn gain_to(&self, v: usize, t: usize) -> f64 {
        let g = self.graph;
        let s = self.membership[v];
        let (ko, ki) = (g.k_out[v], g.k_in[v]);
        let (mut to_s, mut to_t) = (0.0, 0.0);
        for (u, w) in g.neighbors(v) {
            let x = self.membership[u];
            if x == s {
                to_s += w;
            } else if x == t {
                to_t += w;
            }
        }
        let stay = to_s - (ko * (self.inn[s] - ki) + ki * (self.out[s] - ko)) / g.m;
        (to_t - (ko * self.inn[t] + ki * self.out[t]) / g.m - stay) / g.m
    }

    /// Kernighan-Lin pass over the members of `groups`, each move taking a
    /// node to the best of the other listed groups. True if it raised Q.
    fn group_kl(&mut self, members: &[usize], groups: &[usize]) -> bool {
        let mut locked = vec![false; members.len()];
        let mut log: Vec<(usize, usize)> = Vec::new();
        let (mut total, mut best, mut best_len) = (0.0, 0.0, 0);
        for _ in 0..KL_DEPTH.min(members.len()) {
            let mut pick: Option<(f64, usize, usize)> = None;
            for (i, &v) in members.iter().enumerate() {
                if locked[i] {
                    continue;
                }
                for &t in groups.iter().filter(|&&t| t != self.membership[v]) {
                    let gain = self.gain_to(v, t);
                    if pick.is_none_or(|(g, _, _)| gain > g + EPS) {
                        pick = Some((gain, i, t));
                    }
                }
            }
            let Some((gain, i, t)) = pick else { break };
            let from = self.apply(members[i], Target::Group(t));
            locked[i] = true;
            log.push((members[i], from));
            total += gain;
            if total > best + EPS {
                best = total;
                best_len = log.len();
            }
        }
        for &(v, from) in log[best_len..].iter().rev() {
            self.apply(v, Target::Group(from));
        }
        best_len > 0
    }

    /// One round of re-splits: every group with an empty one, and every
    /// linked pair of groups with an empty third. True if any raised Q.
    fn resplit_pairs(&mut self) -> bool {
        let g = self.graph;
        let mut pairs = BTreeSet::new();
        for v in 0..g.len() {
            for (u, _) in g.neighbors(v) {
                let (x, y) = (self.membership[v], self.membership[u]);
                if x < y {
                    pairs.insert((x, y));
                }
            }
        }
        let mut improved = false;
        for (a, b) in pairs {
            if self.size[a] == 0 || self.size[b] == 0 {
                continue;
            }
            let members: Vec<usize> = (0..g.len())
                .filter(|&v| self.membership[v] == a || self.membership[v] == b)
                .collect();
            let fresh = self.fresh_group();
            improved |= self.group_kl(&members, &[a, b, fresh]);
            if self.size[fresh] == 0 {
                self.free.push(fresh);
            }
        }
        for members in groups_of(&self.membership) {
            if members.len() < 2 {
                continue;
            }
            let a = self.membership[members[0]];
            let fresh = self.fresh_group();
            improved |= self.group_kl(&members, &[a, fresh]);
            if self.size[fresh] == 0 {
                self.free.push(fresh);
            }
        }
        improved
    }
}

/// Repositions nodes until no single move, Kernighan-Lin pass or pair
/// re-split raises Q, and no forced-start pass does within the budget.
///
/// Group ids in the result may be sparse.
pub(crate) fn reposition(graph: &SymGraph, membership: &mut Vec<usize>) {
    if graph.len() == 0 {
        return;
    }
    let mut state = State::new(graph, std::mem::take(membership));
    let mut budget = FORCED_BUDGET;
    loop {
        state.greedy();
        if !state.kernighan_lin(None) && !state.resplit_pairs() && !state.forced_kernighan_lin(&mut budget) {
            break;
        }
    }
    *membership = state.membership;
}
