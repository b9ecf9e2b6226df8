mod common;

use std::collections::BTreeSet;

use common::{random_layer, rng};
use polarnet::info::{
    entropy_ml, entropy_mm, jaccard, link_nmi, mutual_information, nmi, partial_jaccard, ContingencyTable,
    EntropyEstimator, LayerOverlap, Margin,
};
use polarnet::Layer;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #[test]
    fn miller_madow_adds_the_outcome_correction(counts in prop::collection::vec(0u64..50, 1..20)) {
        let n: u64 = counts.iter().sum();
        prop_assume!(n > 0);
        let observed = counts.iter().filter(|&&c| c > 0).count() as f64;
        let diff = entropy_mm(&counts).unwrap() - entropy_ml(&counts).unwrap();
        prop_assert!((diff - (observed - 1.0) / (2.0 * n as f64)).abs() <= 1e-12);
    }

    #[test]
    fn entropy_is_at_most_log_of_support(counts in prop::collection::vec(0u64..50, 1..20)) {
        let n: u64 = counts.iter().sum();
        prop_assume!(n > 0);
        let observed = counts.iter().filter(|&&c| c > 0).count() as f64;
        let h = entropy_ml(&counts).unwrap();
        prop_assert!(h >= -1e-12 && h <= observed.log2() + 1e-12);
    }

    #[test]
    fn nmi_of_a_variable_with_itself_is_one(labels in prop::collection::vec(0usize..6, 2..200)) {
        prop_assume!(labels.iter().collect::<BTreeSet<_>>().len() > 1);
        let table = ContingencyTable::from_labels(&labels, &labels).unwrap();
        for est in [EntropyEstimator::MaximumLikelihood, EntropyEstimator::MillerMadow] {
            for margin in [Margin::Rows, Margin::Cols] {
                let v = nmi(&table, margin, est).unwrap().raw;
                prop_assert!((v - 1.0).abs() <= 1e-12, "{v}");
            }
        }
    }

    #[test]
    fn mutual_information_is_symmetric(x in prop::collection::vec(0usize..4, 50), y in prop::collection::vec(0usize..5, 50)) {
        let t = ContingencyTable::from_labels(&x, &y).unwrap();
        let a = mutual_information(&t, EntropyEstimator::MillerMadow).unwrap().raw;
        let b = mutual_information(&t.transposed(), EntropyEstimator::MillerMadow).unwrap().raw;
        prop_assert!((a - b).abs() <= 1e-12);
    }
}

#[test]
fn independent_tables_have_no_shared_information() {
    // Cells are products of the margins, so X and Y are exactly independent.
    let rows = [3u64, 5, 2];
    let cols = [4u64, 1, 7, 2];
    let cells: Vec<u64> = rows.iter().flat_map(|r| cols.iter().map(move |c| r * c * 10)).collect();
    let t = ContingencyTable::new(3, 4, cells).unwrap();
    for margin in [Margin::Rows, Margin::Cols] {
        let v = nmi(&t, margin, EntropyEstimator::MaximumLikelihood).unwrap().raw;
        assert!(v.abs() < 1e-6, "{v}");
    }
}

fn pairs(layer: &Layer) -> BTreeSet<(usize, usize)> {
    layer
        .links()
        .iter()
        .filter(|l| l.source != l.target)
        .map(|l| (l.source, l.target))
        .collect()
}

#[test]
fn partial_jaccard_matches_set_arithmetic() {
    let mut r = rng(11);
    for _ in 0..100 {
        let n = r.gen_range(3..25);
        let (px, py) = (r.gen_range(0.05..0.5), r.gen_range(0.05..0.5));
        let x = random_layer(&mut r, n, px, false);
        let y = random_layer(&mut r, n, py, false);
        let (xs, ys) = (pairs(&x), pairs(&y));
        let both = xs.intersection(&ys).count();
        if ys.is_empty() {
            assert!(partial_jaccard(&x, &y).unwrap_err().is_undefined());
            continue;
        }
        let expected = both as f64 / ys.len() as f64;
        assert!((partial_jaccard(&x, &y).unwrap() - expected).abs() < 1e-15);
        let overlap = LayerOverlap::new(&x, &y, n);
        assert!((overlap.partial_jaccard(None).unwrap() - expected).abs() < 1e-15);
        let union = xs.union(&ys).count();
        assert!((jaccard(&x, &y).unwrap() - both as f64 / union as f64).abs() < 1e-15);

        // Leaving a node out equals recomputing on the remaining pairs.
        let v = r.gen_range(0..n);
        let keep = |s: &BTreeSet<(usize, usize)>| -> BTreeSet<(usize, usize)> {
            s.iter().filter(|&&(a, b)| a != v && b != v).copied().collect()
        };
        let (xv, yv) = (keep(&xs), keep(&ys));
        match overlap.partial_jaccard(Some(v)) {
            Ok(got) => assert!((got - xv.intersection(&yv).count() as f64 / yv.len() as f64).abs() < 1e-15),
            Err(e) => assert!(e.is_undefined() && yv.is_empty()),
        }
    }
}

#[test]
fn partial_jaccard_hand_case() {
    let x = Layer::from_pairs("x", &[(1, 2), (2, 3)]);
    let y = Layer::from_pairs("y", &[(2, 3), (3, 4), (4, 5)]);
    assert!((partial_jaccard(&x, &y).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert!((partial_jaccard(&y, &x).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn link_nmi_uses_all_ordered_pairs() {
    // Brute force over the 2x2 indicator table of every ordered pair i != j.
    let mut r = rng(4);
    let n = 12;
    let x = random_layer(&mut r, n, 0.2, false);
    let y = random_layer(&mut r, n, 0.2, false);
    let (xs, ys) = (pairs(&x), pairs(&y));
    let mut xl = Vec::new();
    let mut yl = Vec::new();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            xl.push(usize::from(xs.contains(&(i, j))));
            yl.push(usize::from(ys.contains(&(i, j))));
        }
    }
    let t = ContingencyTable::from_labels(&xl, &yl).unwrap();
    let est = EntropyEstimator::MillerMadow;
    let (x_given_y, y_given_x) = link_nmi(&x, &y, n, est).unwrap();
    assert!((x_given_y.raw - nmi(&t, Margin::Rows, est).unwrap().raw).abs() < 1e-12);
    assert!((y_given_x.raw - nmi(&t, Margin::Cols, est).unwrap().raw).abs() < 1e-12);
    let overlap = LayerOverlap::new(&x, &y, n);
    assert!((overlap.nmi(None, Margin::Rows, est).unwrap() - x_given_y.raw).abs() < 1e-12);
}
