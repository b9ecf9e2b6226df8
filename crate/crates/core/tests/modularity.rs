mod common;

use common::{demod_brute, partition, q_brute, random_layer, random_membership, rng};
use polarnet::modularity::{
    classify_polarization, demodularity, demodularity_matrix, demodularity_with, q_modularity, DemodNormalization,
    Polarization,
};
use polarnet::{Layer, Link, Partition};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn single_group_has_zero_modularity(seed in any::<u64>(), n in 2usize..=50, p in 0.05f64..0.6) {
        let mut r = rng(seed);
        let layer = random_layer(&mut r, n, p, false);
        prop_assume!(!layer.is_empty());
        let q = q_modularity(&layer, &Partition::single_group(n)).unwrap();
        prop_assert!(q.abs() <= 1e-12, "q = {q}");
    }

    #[test]
    fn matches_double_loop_oracle(seed in any::<u64>(), n in 2usize..=30, groups in 1usize..6, weighted: bool) {
        let mut r = rng(seed);
        let layer = random_layer(&mut r, n, 0.2, weighted);
        prop_assume!(!layer.is_empty());
        let membership = random_membership(&mut r, n, groups);
        let q = q_modularity(&layer, &partition(&membership)).unwrap();
        let oracle = q_brute(&layer, n, &membership);
        prop_assert!((q - oracle).abs() <= 1e-12, "{q} vs {oracle}");
        prop_assert!((-1.0..=1.0).contains(&q));
    }

    #[test]
    fn invariant_under_weight_scaling(seed in any::<u64>(), n in 2usize..=30, scale in 0.01f64..100.0) {
        let mut r = rng(seed);
        let layer = random_layer(&mut r, n, 0.2, true);
        prop_assume!(!layer.is_empty());
        let scaled: Vec<Link> = layer.links().iter().map(|l| Link { weight: l.weight * scale, ..*l }).collect();
        let scaled = Layer::new("scaled", true, scaled).unwrap();
        let p = partition(&random_membership(&mut r, n, 3));
        let (a, b) = (q_modularity(&layer, &p).unwrap(), q_modularity(&scaled, &p).unwrap());
        prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn singletons_give_minus_the_null_term(seed in any::<u64>(), n in 2usize..=30) {
        // With every node alone only the i == j pairs count, and there are no
        // self-links: Q = -Σ k_out_i k_in_i / m².
        let mut r = rng(seed);
        let layer = random_layer(&mut r, n, 0.25, false);
        prop_assume!(!layer.is_empty());
        let membership: Vec<usize> = (0..n).collect();
        let a = common::adjacency(&layer, n);
        let m = layer.len() as f64;
        let expected = -(0..n)
            .map(|i| a[i].iter().sum::<f64>() * a.iter().map(|row| row[i]).sum::<f64>())
            .sum::<f64>() / (m * m);
        let q = q_modularity(&layer, &partition(&membership)).unwrap();
        prop_assert!((q - expected).abs() <= 1e-12);
    }

    #[test]
    fn demodularity_matches_oracle(seed in any::<u64>(), n in 4usize..=30, groups in 2usize..5, weighted: bool) {
        let mut r = rng(seed);
        let layer = random_layer(&mut r, n, 0.2, weighted);
        prop_assume!(!layer.is_empty());
        let membership = random_membership(&mut r, n, groups);
        let p = partition(&membership);
        let first = |g: usize| membership.iter().position(|&x| x == g);
        for f in 0..groups {
            for t in (0..groups).filter(|&t| t != f) {
                let (Some(fi), Some(ti)) = (first(f), first(t)) else { continue };
                let got = demodularity(&layer, &p, p.label_of(fi), p.label_of(ti));
                let out_f: f64 = layer.links().iter().filter(|l| membership[l.source] == f).map(|l| l.weight).sum();
                if out_f == 0.0 {
                    prop_assert!(got.unwrap_err().is_undefined());
                    continue;
                }
                let oracle = demod_brute(&layer, n, &membership, f, t);
                let got = got.unwrap();
                prop_assert!((got - oracle).abs() <= 1e-12, "{got} vs {oracle}");
            }
        }
    }

    #[test]
    fn demodularity_decomposes_modularity(seed in any::<u64>(), n in 4usize..=30, groups in 2usize..6) {
        // Every ordered pair sum is zero over the whole matrix, so
        // Q = -Σ_{f≠t} (m_f / m) demod(f, t).
        let mut r = rng(seed);
        let layer = random_layer(&mut r, n, 0.2, true);
        prop_assume!(!layer.is_empty());
        let p = partition(&random_membership(&mut r, n, groups));
        prop_assume!(p.label_count() >= 2);
        let q = q_modularity(&layer, &p).unwrap();
        let matrix = demodularity_matrix(&layer, &p, DemodNormalization::GroupOutWeight).unwrap();
        let m = layer.total_weight();
        let mut off = 0.0;
        for f in 0..matrix.size() {
            let m_f: f64 = layer.links().iter().filter(|l| p.group_of(l.source) == f).map(|l| l.weight).sum();
            for t in (0..matrix.size()).filter(|&t| t != f) {
                if let Some(d) = matrix.get(f, t) {
                    off += m_f / m * d;
                }
            }
        }
        prop_assert!((q + off).abs() <= 1e-12, "{q} vs {}", -off);
    }
}

#[test]
fn two_reciprocal_pairs() {
    let layer = Layer::from_pairs("l", &[(0, 1), (1, 0), (2, 3), (3, 2)]);
    let p = Partition::from_node_labels(&["a", "a", "b", "b"]);
    assert!((q_modularity(&layer, &p).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn demodularity_normalizations_share_the_excess() {
    let mut r = rng(3);
    let layer = random_layer(&mut r, 20, 0.2, false);
    let membership = random_membership(&mut r, 20, 3);
    let p = partition(&membership);
    let (f, t) = (p.labels()[0].clone(), p.labels()[1].clone());
    let by_out = demodularity_with(&layer, &p, &f, &t, DemodNormalization::GroupOutWeight).unwrap();
    let by_links = demodularity_with(&layer, &p, &f, &t, DemodNormalization::GroupLinkCount).unwrap();
    // Unweighted: out-weight equals the number of outgoing links.
    assert!((by_out - by_links).abs() < 1e-15);
    let by_total = demodularity_with(&layer, &p, &f, &t, DemodNormalization::TotalWeight).unwrap();
    let out_f = layer.links().iter().filter(|l| p.label_of(l.source) == f).count() as f64;
    assert!((by_total * layer.len() as f64 - by_out * out_f).abs() < 1e-12);
}

#[test]
fn mirror_symmetric_groups_have_equal_demodularity() {
    // Swapping the groups maps the graph onto itself.
    let layer = Layer::from_pairs("l", &[(0, 1), (2, 3), (0, 2), (2, 0), (1, 3), (3, 1), (0, 3), (2, 1)]);
    let p = Partition::from_node_labels(&["F", "F", "T", "T"]);
    let ft = demodularity(&layer, &p, "F", "T").unwrap();
    let tf = demodularity(&layer, &p, "T", "F").unwrap();
    assert!((ft - tf).abs() < 1e-15);
}

#[test]
fn polarization_thresholds() {
    assert_eq!(classify_polarization(0.74).unwrap(), Polarization::Polarized);
    assert_eq!(classify_polarization(0.3).unwrap(), Polarization::Polarized);
    assert_eq!(classify_polarization(0.29999).unwrap(), Polarization::NotPolarized);
    assert_eq!(classify_polarization(-0.009).unwrap(), Polarization::NotPolarized);
    assert!(classify_polarization(1.5).is_err());
}

#[test]
fn empty_layer_is_undefined() {
    let layer = Layer::from_pairs("l", &[]);
    assert!(q_modularity(&layer, &Partition::single_group(3))
        .unwrap_err()
        .is_undefined());
}
