//! Sliding-window time series of layer metrics.
//!
//! Windows are half-open day ranges `[start, start + width)`. The first
//! window starts on the earliest link date and windows advance by `step`
//! days until the start passes the latest link date.

use std::fmt::Write as _;

use chrono::{Duration, NaiveDate};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{csv_field, DATE_FORMAT};
use crate::network::{Layer, Link};
use crate::par;

pub const DEFAULT_WINDOW_DAYS: u32 = 60;
pub const DEFAULT_STEP_DAYS: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WindowSpec {
    width: u32,
    step: u32,
}

impl WindowSpec {
    pub fn new(width: u32, step: u32) -> Result<Self> {
        if step < 1 || width < step {
            return Err(Error::validation(format!(
                "window needs width >= step >= 1 days, got width {width}, step {step}"
            )));
        }
        Ok(WindowSpec { width, step })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn step(&self) -> u32 {
        self.step
    }
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            width: DEFAULT_WINDOW_DAYS,
            step: DEFAULT_STEP_DAYS,
        }
    }
}

/// What to do with links that carry no date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Undated {
    #[default]
    Reject,
    Skip,
}

fn undated_error(layer: &Layer) -> Error {
    Error::validation(format!("layer {} has links without a date", layer.name()))
}

/// Links dated in `[start, start + width)`.
pub fn window_slice(layer: &Layer, start: NaiveDate, width: u32, undated: Undated) -> Result<Layer> {
    let end = start + Duration::days(i64::from(width));
    let mut links = Vec::new();
    for l in layer.links() {
        match l.date {
            Some(d) if d >= start && d < end => links.push(*l),
            Some(_) => {}
            None if undated == Undated::Skip => {}
            None => return Err(undated_error(layer)),
        }
    }
    Ok(layer.with_links(links))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowRecord {
    pub window_start: NaiveDate,
    /// `None` when the metric is undefined on the window.
    pub value: Option<f64>,
    pub links_in_window: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowedSeries {
    pub spec: WindowSpec,
    pub records: Vec<WindowRecord>,
}

/// Evaluates `metric` on every window of `layer`.
///
/// Empty windows and windows where the metric reports an undefined value
/// get `value = None`; other metric errors abort the sweep.
pub fn sweep<F>(layer: &Layer, spec: WindowSpec, undated: Undated, metric: F) -> Result<WindowedSeries>
where
    F: Fn(&Layer) -> Result<f64> + Sync + Send,
{
    let mut dated: Vec<Link> = Vec::with_capacity(layer.len());
    for l in layer.links() {
        match l.date {
            Some(_) => dated.push(*l),
            None if undated == Undated::Skip => {}
            None => return Err(undated_error(layer)),
        }
    }
    if dated.is_empty() {
        return Err(Error::validation(format!("layer {} has no dated links", layer.name())));
    }
    // Stable sort keeps the layer's link order within a day.
    dated.sort_by_key(|l| l.date);
    let first = dated[0].date.expect("dated");
    let last = dated[dated.len() - 1].date.expect("dated");
    let count = window_count(first, last, spec.step);

    let records = par::map_range(count, |w| -> Result<WindowRecord> {
        let start = first + Duration::days(w as i64 * i64::from(spec.step));
        let end = start + Duration::days(i64::from(spec.width));
        let lo = dated.partition_point(|l| l.date.expect("dated") < start);
        let hi = dated.partition_point(|l| l.date.expect("dated") < end);
        let links = dated[lo..hi].to_vec();
        let links_in_window = links.len();
        let value = if links.is_empty() {
            None
        } else {
            match metric(&layer.with_links(links)) {
                Ok(v) => Some(v),
                Err(e) if e.is_undefined() => None,
                Err(e) => return Err(e),
            }
        };
        Ok(WindowRecord {
            window_start: start,
            value,
            links_in_window,
        })
    });
    Ok(WindowedSeries {
        spec,
        records: records.into_iter().collect::<Result<_>>()?,
    })
}

/// `floor((last - first) / step) + 1`.
pub fn window_count(first: NaiveDate, last: NaiveDate, step: u32) -> usize {
    let span = (last - first).num_days().max(0) as usize;
    span / step as usize + 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub date: NaiveDate,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Annotation {
    pub event: Event,
    /// Start of the latest window that begins on or before the event.
    pub window_start: Option<NaiveDate>,
    pub in_span: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnotatedSeries {
    pub series: WindowedSeries,
    pub annotations: Vec<Annotation>,
}

/// Attaches events to the series. Events before the first window or after
/// the last window's end are kept with `in_span = false`.
pub fn event_annotation(series: WindowedSeries, events: &[Event]) -> AnnotatedSeries {
    let span = series.records.first().zip(series.records.last()).map(|(a, b)| {
        (
            a.window_start,
            b.window_start + Duration::days(i64::from(series.spec.width)),
        )
    });
    let annotations = events
        .iter()
        .map(|e| {
            let in_span = span.is_some_and(|(lo, hi)| e.date >= lo && e.date < hi);
            let window_start = in_span.then(|| {
                let i = series.records.partition_point(|r| r.window_start <= e.date);
                series.records[i - 1].window_start
            });
            Annotation {
                event: e.clone(),
                window_start,
                in_span,
            }
        })
        .collect();
    AnnotatedSeries { series, annotations }
}

fn format_value(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl AnnotatedSeries {
    /// `window_start,value,links_in_window,annotations`; undefined values are
    /// blank and several annotations on one window are joined with `;`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("window_start,value,links_in_window,annotations\n");
        for r in &self.series.records {
            let labels: Vec<&str> = self
                .annotations
                .iter()
                .filter(|a| a.window_start == Some(r.window_start))
                .map(|a| a.event.label.as_str())
                .collect();
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.window_start.format(DATE_FORMAT),
                format_value(r.value),
                r.links_in_window,
                csv_field(&labels.join(";"))
            );
        }
        out
    }

    /// `date,label,window_start,in_span`, one row per event.
    pub fn events_csv(&self) -> String {
        let mut out = String::from("date,label,window_start,in_span\n");
        for a in &self.annotations {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                a.event.date.format(DATE_FORMAT),
                csv_field(&a.event.label),
                a.window_start
                    .map(|d| d.format(DATE_FORMAT).to_string())
                    .unwrap_or_default(),
                a.in_span
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, DATE_FORMAT).unwrap()
    }

    fn dated_layer() -> Layer {
        let links = vec![
            Link::new(0, 1).on(day("2011-01-01")),
            Link::new(1, 2).on(day("2011-01-05")),
            Link::new(2, 0).on(day("2011-01-11")),
        ];
        Layer::new("c", false, links).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(WindowSpec::new(5, 6).is_err());
        assert!(WindowSpec::new(5, 0).is_err());
        assert!(WindowSpec::new(5, 5).is_ok());
        assert_eq!(WindowSpec::default().width(), 60);
    }

    #[test]
    fn slices_are_half_open() {
        let l = dated_layer();
        assert_eq!(
            window_slice(&l, day("2011-01-01"), 4, Undated::Reject).unwrap().len(),
            1
        );
        assert_eq!(
            window_slice(&l, day("2011-01-01"), 5, Undated::Reject).unwrap().len(),
            2
        );
        assert_eq!(
            window_slice(&l, day("2010-01-01"), 10, Undated::Reject).unwrap().len(),
            0
        );
        assert_eq!(
            window_slice(&l, day("2011-01-01"), 365, Undated::Reject)
                .unwrap()
                .links(),
            l.links()
        );
    }

    #[test]
    fn undated_links() {
        let mut links = dated_layer().links().to_vec();
        links.push(Link::new(0, 2));
        let l = Layer::new("c", false, links).unwrap();
        assert!(window_slice(&l, day("2011-01-01"), 4, Undated::Reject).is_err());
        assert_eq!(window_slice(&l, day("2011-01-01"), 4, Undated::Skip).unwrap().len(), 1);
        assert!(sweep(&l, WindowSpec::default(), Undated::Reject, |x| Ok(x.len() as f64)).is_err());
    }

    #[test]
    fn sweep_counts_and_gaps() {
        let l = dated_layer();
        let s = sweep(&l, WindowSpec::new(3, 2).unwrap(), Undated::Reject, |x| {
            Ok(x.len() as f64)
        })
        .unwrap();
        // Starts Jan 1, 3, 5, 7, 9, 11.
        assert_eq!(s.records.len(), 6);
        let counts: Vec<usize> = s.records.iter().map(|r| r.links_in_window).collect();
        assert_eq!(counts, vec![1, 1, 1, 0, 1, 1]);
        assert_eq!(s.records[3].value, None);
        assert_eq!(s.records[0].value, Some(1.0));
    }

    #[test]
    fn annotations() {
        let l = dated_layer();
        let s = sweep(&l, WindowSpec::new(3, 2).unwrap(), Undated::Reject, |x| {
            Ok(x.len() as f64)
        })
        .unwrap();
        let same = event_annotation(s.clone(), &[]);
        assert_eq!(same.series, s);
        assert!(same.annotations.is_empty());
        let events = [
            Event {
                date: day("2011-01-04"),
                label: "vote".into(),
            },
            Event {
                date: day("2012-01-01"),
                label: "later".into(),
            },
        ];
        let a = event_annotation(s, &events);
        assert_eq!(a.annotations[0].window_start, Some(day("2011-01-03")));
        assert!(a.annotations[0].in_span);
        assert!(!a.annotations[1].in_span);
        let csv = a.to_csv();
        assert!(csv.contains("2011-01-03,1,1,vote\n"));
        assert!(csv.contains("2011-01-07,,0,\n"));
        assert!(a.events_csv().contains("2012-01-01,later,,false"));
    }
}
