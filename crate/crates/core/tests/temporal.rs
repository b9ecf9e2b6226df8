mod common;

use chrono::{Duration, NaiveDate};
use common::rng;
use polarnet::modularity::q_modularity;
use polarnet::temporal::{event_annotation, sweep, window_count, window_slice, Event, Undated, WindowSpec};
use polarnet::{Layer, Link, Partition};
use rand::Rng;

fn day(offset: i64) -> NaiveDate {
    NaiveDate::from_ymd_opt(2019, 1, 1).unwrap() + Duration::days(offset)
}

fn random_dated(r: &mut rand_chacha::ChaCha8Rng, n: usize, links: usize, span: i64) -> Layer {
    let links = (0..links)
        .map(|_| {
            let s = r.gen_range(0..n);
            let t = (s + r.gen_range(1..n)) % n;
            Link::new(s, t).on(day(r.gen_range(0..span)))
        })
        .collect();
    Layer::new("dated", false, links).unwrap()
}

#[test]
fn window_over_the_whole_span_equals_the_global_value() {
    let mut r = rng(41);
    for _ in 0..10 {
        let layer = random_dated(&mut r, 12, 80, 300);
        let p = common::partition(&common::random_membership(&mut r, 12, 3));
        let spec = WindowSpec::new(300, 300).unwrap();
        let series = sweep(&layer, spec, Undated::Reject, |l| q_modularity(l, &p)).unwrap();
        assert_eq!(series.records.len(), 1);
        let global = q_modularity(&layer, &p).unwrap();
        assert!((series.records[0].value.unwrap() - global).abs() <= 1e-12);
        assert_eq!(series.records[0].links_in_window, layer.len());
    }
}

#[test]
fn windows_match_date_filtering() {
    let mut r = rng(42);
    for _ in 0..20 {
        let span = r.gen_range(1..200);
        let count = r.gen_range(1..150);
        let layer = random_dated(&mut r, 8, count, span);
        let step = r.gen_range(1..15);
        let width = step + r.gen_range(0..30);
        let series = sweep(&layer, WindowSpec::new(width, step).unwrap(), Undated::Reject, |l| {
            Ok(l.len() as f64)
        })
        .unwrap();
        let dates: Vec<NaiveDate> = layer.links().iter().map(|l| l.date.unwrap()).collect();
        let (first, last) = (*dates.iter().min().unwrap(), *dates.iter().max().unwrap());
        let expected_windows = (last - first).num_days() as usize / step as usize + 1;
        assert_eq!(series.records.len(), expected_windows);
        assert_eq!(window_count(first, last, step), expected_windows);
        for (w, rec) in series.records.iter().enumerate() {
            let start = first + Duration::days((w * step as usize) as i64);
            let end = start + Duration::days(i64::from(width));
            let inside = dates.iter().filter(|&&d| d >= start && d < end).count();
            assert_eq!(rec.window_start, start);
            assert_eq!(rec.links_in_window, inside);
            assert_eq!(rec.value, (inside > 0).then_some(inside as f64));
            assert_eq!(
                window_slice(&layer, start, width, Undated::Reject).unwrap().len(),
                inside
            );
        }
    }
}

#[test]
fn undated_links_are_rejected_or_skipped() {
    let layer = Layer::new("l", false, vec![Link::new(0, 1).on(day(0)), Link::new(1, 0)]).unwrap();
    let spec = WindowSpec::new(5, 1).unwrap();
    assert!(sweep(&layer, spec, Undated::Reject, |l| Ok(l.len() as f64)).is_err());
    let series = sweep(&layer, spec, Undated::Skip, |l| Ok(l.len() as f64)).unwrap();
    assert_eq!(series.records[0].links_in_window, 1);
    assert!(WindowSpec::new(3, 4).is_err());
    assert!(WindowSpec::new(3, 0).is_err());
}

#[test]
fn modularity_changes_sign_across_an_event() {
    // Two groups {0..4} and {5..9}: talk stays inside the groups for 30
    // days, then only crosses between them. Weighted, so repeats on later
    // days stay separate links.
    let p = Partition::from_membership(&(0..10).map(|v| v / 5).collect::<Vec<_>>(), "g");
    let mut links = Vec::new();
    for d in 0..60 {
        for s in 0..10 {
            let t = if d < 30 {
                (s / 5) * 5 + (s + 1) % 5
            } else {
                (s + 5) % 10
            };
            links.push(Link::new(s, t).on(day(d)));
        }
    }
    let layer = Layer::new("l", true, links).unwrap();
    let series = sweep(&layer, WindowSpec::new(10, 10).unwrap(), Undated::Reject, |l| {
        q_modularity(l, &p)
    })
    .unwrap();
    let values: Vec<f64> = series.records.iter().map(|r| r.value.unwrap()).collect();
    assert_eq!(values.len(), 6);
    assert!(values[..3].iter().all(|&q| q > 0.0), "{values:?}");
    assert!(values[3..].iter().all(|&q| q < 0.0), "{values:?}");

    let events = [
        Event {
            date: day(30),
            label: "split".into(),
        },
        Event {
            date: day(-5),
            label: "early".into(),
        },
    ];
    let annotated = event_annotation(series, &events);
    assert_eq!(annotated.annotations[0].window_start, Some(day(30)));
    assert!(!annotated.annotations[1].in_span);
    assert!(annotated.to_csv().contains("2019-01-31,"));
}
