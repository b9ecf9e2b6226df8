//! Symmetrized working graph shared by the detection heuristics.
//!
//! The directed modularity equals the modularity of the symmetric matrix
//! `B + Bᵀ` with `B_ij = A_ij - k_out_i k_in_j / m`, scaled by `1 / 2m`, so
//! every heuristic works on `Aw = A + Aᵀ` and the two strength vectors.
//! Only nodes with at least one non-self link ("active" nodes) take part.

use crate::modularity::DegreeVectors;
use crate::network::Layer;

#[derive(Debug, Clone)]
pub(crate) struct SymGraph {
    /// Active node -> node index in the layer's network.
    pub nodes: Vec<usize>,
    offsets: Vec<usize>,
    nbrs: Vec<usize>,
    wts: Vec<f64>,
    pub k_out: Vec<f64>,
    pub k_in: Vec<f64>,
    pub m: f64,
}

impl SymGraph {
    pub fn new(layer: &Layer, node_count: usize) -> Self {
        let deg = DegreeVectors::new(layer, node_count);
        let mut local = vec![usize::MAX; node_count];
        let mut nodes = Vec::new();
        for (i, slot) in local.iter_mut().enumerate() {
            if deg.k_out[i] + deg.k_in[i] > 0.0 {
                *slot = nodes.len();
                nodes.push(i);
            }
        }
        let n = nodes.len();
        let mut pairs: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * layer.len());
        for l in layer.links().iter().filter(|l| !l.is_self_link()) {
            let (s, t) = (local[l.source], local[l.target]);
            pairs.push((s, t, l.weight));
            pairs.push((t, s, l.weight));
        }
        pairs.sort_by_key(|p| (p.0, p.1));
        let mut offsets = vec![0; n + 1];
        let mut nbrs = Vec::with_capacity(pairs.len());
        let mut wts: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut row = 0;
        for (s, t, w) in pairs {
            while row < s {
                row += 1;
                offsets[row] = nbrs.len();
            }
            if nbrs.len() > offsets[s] && *nbrs.last().unwrap() == t {
                *wts.last_mut().unwrap() += w;
            } else {
                nbrs.push(t);
                wts.push(w);
            }
        }
        while row < n {
            row += 1;
            offsets[row] = nbrs.len();
        }
        SymGraph {
            k_out: nodes.iter().map(|&i| deg.k_out[i]).collect(),
            k_in: nodes.iter().map(|&i| deg.k_in[i]).collect(),
            nodes,
            offsets,
            nbrs,
            wts,
            m: deg.m,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Total length of the neighbor lists.
    pub fn adjacency_len(&self) -> usize {
        self.nbrs.len()
    }

    /// Neighbors of `v` with symmetrized weights `A_vj + A_jv`.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.nbrs[r.clone()].iter().copied().zip(self.wts[r].iter().copied())
    }

    /// Directed modularity of `membership` (group ids, any range).
    pub fn modularity(&self, membership: &[usize]) -> f64 {
        let groups = membership.iter().max().map_or(0, |g| g + 1);
        let mut out = vec![0.0; groups];
        let mut inn = vec![0.0; groups];
        let mut within = 0.0;
        for v in 0..self.len() {
            let g = membership[v];
            out[g] += self.k_out[v];
            inn[g] += self.k_in[v];
            for (u, w) in self.neighbors(v) {
                if membership[u] == g {
                    within += w;
                }
            }
        }
        let expected: f64 = out.iter().zip(&inn).map(|(o, i)| o * i).sum::<f64>() / (self.m * self.m);
        within / (2.0 * self.m) - expected
    }

    /// Subgraph induced by `members` (local indices follow the slice order).
    pub fn induced(&self, members: &[usize], scratch: &mut Vec<usize>) -> Induced {
        if scratch.len() < self.len() {
            scratch.resize(self.len(), usize::MAX);
        }
        for (i, &v) in members.iter().enumerate() {
            scratch[v] = i;
        }
        let mut offsets = Vec::with_capacity(members.len() + 1);
        let mut nbrs = Vec::new();
        let mut wts = Vec::new();
        offsets.push(0);
        for &v in members {
            for (u, w) in self.neighbors(v) {
                let lu = scratch[u];
                if lu != usize::MAX {
                    nbrs.push(lu);
                    wts.push(w);
                }
            }
            offsets.push(nbrs.len());
        }
        for &v in members {
            scratch[v] = usize::MAX;
        }
        Induced {
            offsets,
            nbrs,
            wts,
            k_out: members.iter().map(|&v| self.k_out[v]).collect(),
            k_in: members.iter().map(|&v| self.k_in[v]).collect(),
            m: self.m,
        }
    }
}

/// Adjacency restricted to one group, with global strengths and `m`.
pub(crate) struct Induced {
    offsets: Vec<usize>,
    nbrs: Vec<usize>,
    wts: Vec<f64>,
    pub k_out: Vec<f64>,
    pub k_in: Vec<f64>,
    pub m: f64,
}

impl Induced {
    pub fn len(&self) -> usize {
        self.k_out.len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.nbrs[r.clone()].iter().copied().zip(self.wts[r].iter().copied())
    }

    /// `Σ_{i in side 0, j in side 1} (B + Bᵀ)_ij` for a two-way split.
    pub fn cross(&self, side: &[u8]) -> f64 {
        let mut aw = 0.0;
        let mut tot = [[0.0f64; 2]; 2]; // [side][out, in]
        for v in 0..self.len() {
            let s = side[v] as usize;
            tot[s][0] += self.k_out[v];
            tot[s][1] += self.k_in[v];
            if s == 0 {
                for (u, w) in self.neighbors(v) {
                    if side[u] == 1 {
                        aw += w;
                    }
                }
            }
        }
        aw - (tot[0][0] * tot[1][1] + tot[0][1] * tot[1][0]) / self.m
    }

    /// Single-node moves across a two-way split while any strictly lowers
    /// the cross term. Returns the final cross term.
    pub fn polish_split(&self, side: &mut [u8]) -> f64 {
        let n = self.len();
        let mut a = vec![[0.0f64; 2]; n];
        let mut tot = [[0.0f64; 2]; 2];
        for v in 0..n {
            let s = side[v] as usize;
            tot[s][0] += self.k_out[v];
            tot[s][1] += self.k_in[v];
            for (u, w) in self.neighbors(v) {
                a[v][side[u] as usize] += w;
            }
        }
        let mut cross = self.cross(side);
        let eps = 1e-12 * self.m.max(1.0);
        loop {
            let mut moved = false;
            for v in 0..n {
                let s = side[v] as usize;
                let t = 1 - s;
                let (ko, ki) = (self.k_out[v], self.k_in[v]);
                let own = a[v][s] - (ko * (tot[s][1] - ki) + ki * (tot[s][0] - ko)) / self.m;
                let other = a[v][t] - (ko * tot[t][1] + ki * tot[t][0]) / self.m;
                let delta = own - other;
                if delta < -eps {
                    side[v] = t as u8;
                    cross += delta;
                    tot[s][0] -= ko;
                    tot[s][1] -= ki;
                    tot[t][0] += ko;
                    tot[t][1] += ki;
                    for (u, w) in self.neighbors(v) {
                        a[u][s] -= w;
                        a[u][t] += w;
                    }
                    moved = true;
                }
            }
            if !moved {
                return cross;
            }
        }
    }
}

/// Splits `members` of one group by `side`.
pub(crate) fn split_members(members: &[usize], side: &[u8]) -> (Vec<usize>, Vec<usize>) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, &v) in members.iter().enumerate() {
        if side[i] == 0 {
            a.push(v);
        } else {
            b.push(v);
        }
    }
    (a, b)
}

/// Groups of a membership vector as member lists, ordered by group id.
pub(crate) fn groups_of(membership: &[usize]) -> Vec<Vec<usize>> {
    let count = membership.iter().max().map_or(0, |g| g + 1);
    let mut out = vec![Vec::new(); count];
    for (v, &g) in membership.iter().enumerate() {
        out[g].push(v);
    }
    out.retain(|g| !g.is_empty());
    out
}

/// Membership vector from member lists.
pub(crate) fn membership_of(groups: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut m = vec![0; n];
    for (g, members) in groups.iter().enumerate() {
        for &v in members {
            m[v] = g;
        }
    }
    m
}

/// Renumbers groups by first appearance.
pub(crate) fn canonical(membership: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    membership
        .iter()
        .map(|g| {
            let next = map.len();
            *map.entry(*g).or_insert(next)
        })
        .collect()
}
