use polarnet::jackknife::{jackknife, jackknife_indexed, MetricEstimate};
use polarnet::modularity::{q_modularity, q_modularity_without};
use polarnet::{Layer, MultiplexNetwork, Partition};
use proptest::prelude::*;

fn toy() -> MultiplexNetwork {
    // 3 nodes: 0 -> 1, 1 -> 2, 2 -> 0, 0 -> 2.
    let mut net = MultiplexNetwork::with_nodes(3);
    net.insert_layer(Layer::from_pairs("l", &[(0, 1), (1, 2), (2, 0), (0, 2)]))
        .unwrap();
    net
}

#[test]
fn constant_metric_has_zero_spread() {
    let est = jackknife(&toy(), |_, _| Ok(0.37)).unwrap();
    assert_eq!(est.two_sigma, 0.0);
    assert_eq!(est.jack_mean, 0.37);
    assert_eq!(est.samples, 3);
    let est = jackknife_indexed(500, |_| Ok(-1.25)).unwrap();
    assert_eq!(est.two_sigma, 0.0);
}

#[test]
fn replicate_mean_on_a_three_node_toy() {
    // Links left after removing node 0, 1, 2: {1->2}, {2->0, 0->2}, {0->1}.
    let est = jackknife(&toy(), |net, _| Ok(net.layers()[0].len() as f64)).unwrap();
    assert_eq!(est.point, 4.0);
    assert!((est.jack_mean - 4.0 / 3.0).abs() < 1e-15);
    // Sample SD of (1, 2, 1) is sqrt(1/3).
    assert!((est.two_sigma - 2.0 * (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
}

#[test]
fn subnetworks_carry_original_indices() {
    let est = jackknife(&toy(), |net, original| {
        assert_eq!(net.node_count(), original.len());
        Ok(original.iter().sum::<usize>() as f64)
    })
    .unwrap();
    // Index sums without 0, 1, 2: 3, 2, 1.
    assert!((est.jack_mean - 2.0).abs() < 1e-15);
}

#[test]
fn undefined_replicates_are_skipped_and_flagged() {
    let est = jackknife_indexed(10, |v| match v {
        Some(0) | Some(1) => Err(polarnet::Error::Undefined("gone".into())),
        _ => Ok(1.0),
    })
    .unwrap();
    assert_eq!(est.skipped, 2);
    assert!(est.unreliable);
    let ok = MetricEstimate::from_replicates(
        1.0,
        &[
            Some(1.0),
            None,
            Some(1.0),
            Some(1.0),
            Some(1.0),
            Some(1.0),
            Some(1.0),
            Some(1.0),
            Some(1.0),
            Some(1.0),
            Some(1.0),
        ],
    )
    .unwrap();
    assert!(!ok.unreliable);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn indexed_modularity_matches_materialized_subnetworks(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = r.gen_range(4..15);
        let mut pairs = Vec::new();
        for s in 0..n {
            for t in 0..n {
                if s != t && r.gen::<f64>() < 0.3 {
                    pairs.push((s, t));
                }
            }
        }
        let layer = Layer::from_pairs("l", &pairs);
        let membership: Vec<usize> = (0..n).map(|_| r.gen_range(0..3)).collect();
        let p = Partition::from_membership(&membership, "g");
        for v in 0..n {
            let fast = q_modularity_without(&layer, &p, Some(v));
            let slow = q_modularity(&layer.without_node(v), &p);
            match (fast, slow) {
                (Ok(a), Ok(b)) => prop_assert!((a - b).abs() <= 1e-12),
                (Err(a), Err(b)) => prop_assert!(a.is_undefined() && b.is_undefined()),
                (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
            }
        }
    }
}
