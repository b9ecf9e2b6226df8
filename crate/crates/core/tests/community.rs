mod common;

use common::{exhaustive_best_q, random_layer, rng};
use polarnet::community::{
    default_portfolio, detect_extremal, detect_fast, detect_spectral, parse_portfolio, refine_reposition, run_portfolio,
};
use polarnet::generate::generate_planted_partition;
use polarnet::info::{nmi, ContingencyTable, EntropyEstimator, Margin};
use polarnet::modularity::q_modularity;
use polarnet::seed::derive;
use polarnet::Partition;

#[test]
fn portfolio_reaches_the_exhaustive_optimum_on_small_graphs() {
    let portfolio = default_portfolio();
    let mut r = rng(20);
    let mut checked = 0;
    while checked < 50 {
        let n = 4 + checked % 7;
        let layer = random_layer(&mut r, n, 0.3, checked % 2 == 1);
        if layer.is_empty() {
            continue;
        }
        let best = exhaustive_best_q(&layer, n);
        let found = run_portfolio(&layer, n, &portfolio, derive(9, "small", checked as u64)).unwrap();
        assert!(
            (found.q - best).abs() <= 1e-9,
            "graph {checked} (n = {n}): portfolio {} ({}) vs optimum {best}",
            found.q,
            found.script
        );
        checked += 1;
    }
}

fn planted_nmi(seed: u64) -> f64 {
    let (net, truth) = generate_planted_partition(2, 20, 0.5, 0.02, seed).unwrap();
    let found = run_portfolio(&net.layers()[0], net.node_count(), &default_portfolio(), seed).unwrap();
    let table = ContingencyTable::from_partitions(&truth, &found.partition).unwrap();
    nmi(&table, Margin::Rows, EntropyEstimator::MaximumLikelihood)
        .map(|v| v.raw)
        .unwrap_or(0.0)
}

#[test]
fn planted_partitions_are_recovered() {
    let good = (0..100).filter(|&s| planted_nmi(s) >= 0.9).count();
    assert!(good >= 95, "{good}/100 seeds reached NMI 0.9");
}

#[test]
fn reported_q_is_the_partition_modularity() {
    let (net, _) = generate_planted_partition(3, 15, 0.4, 0.03, 5).unwrap();
    let layer = &net.layers()[0];
    let n = net.node_count();
    for found in [
        detect_fast(layer, n, 1).unwrap(),
        detect_spectral(layer, n, 1).unwrap(),
        detect_extremal(layer, n, 1).unwrap(),
        run_portfolio(layer, n, &default_portfolio(), 1).unwrap(),
    ] {
        let q = q_modularity(layer, &found.partition).unwrap();
        assert!((q - found.q).abs() < 1e-12, "{}: {q} vs {}", found.script, found.q);
        assert_eq!(found.partition.len(), n);
    }
}

#[test]
fn repositioning_never_lowers_modularity() {
    let mut r = rng(8);
    for _ in 0..20 {
        let layer = random_layer(&mut r, 25, 0.15, false);
        let start = common::partition(&common::random_membership(&mut r, 25, 4));
        let before = q_modularity(&layer, &start).unwrap();
        let after = refine_reposition(&layer, &start).unwrap().q;
        assert!(after >= before - 1e-12, "{after} < {before}");
    }
}

#[test]
fn detection_is_deterministic_per_seed() {
    let (net, _) = generate_planted_partition(4, 15, 0.3, 0.05, 2).unwrap();
    let layer = &net.layers()[0];
    let a = run_portfolio(layer, 60, &default_portfolio(), 77).unwrap();
    let b = run_portfolio(layer, 60, &default_portfolio(), 77).unwrap();
    assert_eq!(a.partition, b.partition);
    assert_eq!(a.q.to_bits(), b.q.to_bits());
}

#[test]
fn isolated_nodes_share_one_group() {
    // Nodes 4 and 5 have no links.
    let layer = polarnet::Layer::from_pairs("l", &[(0, 1), (1, 0), (2, 3), (3, 2)]);
    let found = run_portfolio(&layer, 6, &default_portfolio(), 1).unwrap();
    let p: &Partition = &found.partition;
    assert_eq!(p.group_of(4), p.group_of(5));
    assert_eq!(p.label_of(4), polarnet::community::ISOLATED_LABEL);
    assert_eq!(found.group_count, 2);
}

#[test]
fn portfolio_syntax() {
    assert_eq!(parse_portfolio("e-1,esrfr-30").unwrap().len(), 2);
    assert!(parse_portfolio("x-1").is_err());
    assert!(parse_portfolio("e-0").is_err());
    assert!(parse_portfolio("").is_err());
}
