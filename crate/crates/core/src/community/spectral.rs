//! Recursive leading-eigenvector bisection.
//!
//! Each group is split by the sign pattern of the leading eigenvector of its
//! generalized modularity matrix `B(g)_ij = Bs_ij - δ_ij Σ_{k∈g} Bs_ik`,
//! where `Bs = B + Bᵀ`. The eigenpair comes from restarted Lanczos
//! iteration with full reorthogonalization, started from a seeded random
//! vector. Splits are kept only when they raise Q.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use super::graph::{split_members, Induced, SymGraph};

/// Convergence threshold on the Ritz residual, relative to a bound on the
/// spectral radius of `B(g)`.
pub(crate) const EIGEN_TOLERANCE: f64 = 1e-10;
/// Matrix-vector budget per eigenpair: this many times the group size, but
/// never fewer than [`MIN_EIGEN_ITERATIONS`].
pub(crate) const EIGEN_ITERATIONS_PER_NODE: usize = 10;
pub(crate) const MIN_EIGEN_ITERATIONS: usize = 1000;
/// Krylov subspace dimension before a restart.
const KRYLOV_DIM: usize = 32;

/// Outcome counters of one spectral run.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub(crate) struct SpectralStats {
    /// Eigen-solves that hit the iteration budget; those groups stay whole.
    pub unconverged: usize,
}

/// Splits every group of `membership` recursively. Returns new group lists.
pub(crate) fn spectral<R: Rng>(
    graph: &SymGraph,
    groups: Vec<Vec<usize>>,
    rng: &mut R,
    stats: &mut SpectralStats,
) -> Vec<Vec<usize>> {
    let mut scratch = Vec::new();
    let mut pending: Vec<Vec<usize>> = groups.into_iter().rev().collect();
    let mut done = Vec::new();
    while let Some(members) = pending.pop() {
        match bisect(graph, &members, rng, stats, &mut scratch) {
            Some((a, b)) => {
                pending.push(b);
                pending.push(a);
            }
            None => done.push(members),
        }
    }
    done
}

fn bisect<R: Rng>(
    graph: &SymGraph,
    members: &[usize],
    rng: &mut R,
    stats: &mut SpectralStats,
    scratch: &mut Vec<usize>,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = members.len();
    if n < 2 {
        return None;
    }
    let sub = graph.induced(members, scratch);
    let m = sub.m;
    let kin_g: f64 = sub.k_in.iter().sum();
    let kout_g: f64 = sub.k_out.iter().sum();
    // Row sums of Bs restricted to the group, and a spectral bound.
    let mut row = vec![0.0; n];
    let mut bound: f64 = 0.0;
    for (v, r) in row.iter_mut().enumerate() {
        let aw: f64 = sub.neighbors(v).map(|(_, w)| w).sum();
        let null = (sub.k_out[v] * kin_g + sub.k_in[v] * kout_g) / m;
        *r = aw - null;
        bound = bound.max(aw + null + r.abs());
    }
    if bound <= 0.0 {
        return None;
    }

    let start: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let budget = (EIGEN_ITERATIONS_PER_NODE * n).max(MIN_EIGEN_ITERATIONS);
    let Some((lambda, x)) = leading_eigenpair(&sub, &row, start, bound, budget) else {
        stats.unconverged += 1;
        return None;
    };
    if lambda <= EIGEN_TOLERANCE * bound {
        return None;
    }
    let mut side: Vec<u8> = x.iter().map(|&v| u8::from(v < 0.0)).collect();
    let cross = sub.polish_split(&mut side);
    // Splitting changes Q by -cross / m.
    if -cross / m <= 1e-12 || side.iter().all(|&s| s == side[0]) {
        return None;
    }
    Some(split_members(members, &side))
}

/// Largest eigenvalue of `B(g)` and a unit eigenvector, or `None` when the
/// residual is still above tolerance after `budget` products.
fn leading_eigenpair(
    sub: &Induced,
    row: &[f64],
    start: Vec<f64>,
    scale: f64,
    budget: usize,
) -> Option<(f64, Vec<f64>)> {
    let n = start.len();
    let dim = KRYLOV_DIM.min(n);
    let mut v0 = start;
    if normalize(&mut v0) == 0.0 {
        v0 = vec![1.0; n];
        normalize(&mut v0);
    }
    let mut used = 0;
    let mut w = vec![0.0; n];
    while used < budget {
        let mut basis: Vec<Vec<f64>> = vec![v0];
        let mut alpha = Vec::with_capacity(dim);
        let mut beta: Vec<f64> = Vec::with_capacity(dim);
        loop {
            let j = basis.len() - 1;
            apply(sub, row, &basis[j], &mut w);
            used += 1;
            alpha.push(dot(&w, &basis[j]));
            // Two Gram-Schmidt passes keep the basis orthogonal.
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(&w, v);
                    w.iter_mut().zip(v).for_each(|(a, b)| *a -= c * b);
                }
            }
            let b = dot(&w, &w).sqrt();
            if basis.len() == dim || b <= f64::EPSILON * scale || used >= budget {
                beta.push(b);
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let top = (0..k)
            .max_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
            .expect("non-empty tridiagonal");
        let theta = eig.eigenvalues[top];
        let s = eig.eigenvectors.column(top);
        let mut x = vec![0.0; n];
        for (i, v) in basis.iter().enumerate() {
            x.iter_mut().zip(v).for_each(|(a, b)| *a += s[i] * b);
        }
        normalize(&mut x);
        let residual = (beta[k - 1] * s[k - 1]).abs();
        let invariant = beta[k - 1] <= f64::EPSILON * scale;
        if invariant || residual <= EIGEN_TOLERANCE * scale {
            return Some((theta, x));
        }
        v0 = x;
    }
    None
}

/// `y = B(g) x`.
fn apply(sub: &Induced, row: &[f64], x: &[f64], y: &mut [f64]) {
    let kin_x: f64 = sub.k_in.iter().zip(x).map(|(k, v)| k * v).sum();
    let kout_x: f64 = sub.k_out.iter().zip(x).map(|(k, v)| k * v).sum();
    for v in 0..x.len() {
        let adj: f64 = sub.neighbors(v).map(|(u, w)| w * x[u]).sum();
        y[v] = adj - (sub.k_out[v] * kin_x + sub.k_in[v] * kout_x) / sub.m - row[v] * x[v];
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}
