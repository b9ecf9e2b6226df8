//! Rayon pool versus a single worker on the data-parallel hot paths.
//!
//! Build with `--no-default-features` to measure the plain-iterator
//! fallback instead; the `one_thread` group then matches `pool`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use polarnet::generate::{synthetic_fixture, FixtureSpec};
use polarnet::jackknife::jackknife_indexed;
use polarnet::modularity::q_modularity_without;
use polarnet::temporal::{sweep, Undated, WindowSpec};
use polarnet::{Partition, PartyMergeConfig};

fn fixture() -> (polarnet::MultiplexNetwork, Partition) {
    let spec = FixtureSpec {
        nodes: 800,
        links_per_layer: 6000,
        comments: 10,
        ..FixtureSpec::default()
    };
    let fx = synthetic_fixture(&spec).expect("fixture");
    let net = fx.network().expect("network");
    let merge = PartyMergeConfig::parse(&fx.merge_config, "fixture").expect("merge config");
    let raw = fx
        .registry
        .ids()
        .iter()
        .cloned()
        .zip(fx.affiliations.iter().cloned())
        .collect();
    let partition = merge.apply(net.registry(), &raw);
    (net, partition)
}

fn run_in(threads: Option<usize>, f: impl FnOnce() + Send) {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

fn benches(c: &mut Criterion) {
    let (net, partition) = fixture();
    let supports = net.layer("supports").expect("supports layer");
    let n = net.node_count();

    let mut group = c.benchmark_group("jackknife_q");
    group.sample_size(10);
    for (name, threads) in [("pool", None), ("one_thread", Some(1))] {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                run_in(threads, || {
                    jackknife_indexed(n, |v| q_modularity_without(supports, &partition, v)).expect("jackknife");
                })
            })
        });
    }
    group.finish();

    let mut group = c.benchmark_group("window_sweep");
    group.sample_size(10);
    let spec = WindowSpec::default();
    for (name, threads) in [("pool", None), ("one_thread", Some(1))] {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                run_in(threads, || {
                    sweep(supports, spec, Undated::Reject, |w| {
                        polarnet::modularity::q_modularity(w, &partition)
                    })
                    .expect("sweep");
                })
            })
        });
    }
    group.finish();
}

criterion_group!(parallel, benches);
criterion_main!(parallel);
