use std::path::PathBuf;

use anyhow::Result;
use polarnet::io::{read_events, DATE_FORMAT};
use polarnet::modularity::q_modularity;
use polarnet::temporal::{event_annotation, sweep, Undated, WindowSpec};

use crate::context::{Inputs, RunConfig};
use crate::table::{Cell, Table};

/// Party-label modularity over sliding windows, one series per layer.
pub fn run(config: &RunConfig, inputs: &Inputs, events: Option<PathBuf>, skip_undated: bool) -> Result<Vec<PathBuf>> {
    let scope = inputs.scope(config.default_scope())?;
    let parties = scope.parties()?;
    let spec = WindowSpec::new(config.common.window_days, config.common.step_days)?;
    let undated = if skip_undated { Undated::Skip } else { Undated::Reject };
    let events = match &events {
        Some(path) => read_events(path)?,
        None => Vec::new(),
    };
    let (out, format) = (config.out_dir()?, config.common.format);
    let mut written = Vec::new();
    for layer in scope.network.layers() {
        let series = sweep(layer, spec, undated, |w| q_modularity(w, parties))?;
        let annotated = event_annotation(series, &events);

        let mut table = Table::new(&["window_start", "value", "links_in_window", "annotations"]);
        for r in &annotated.series.records {
            let labels: Vec<&str> = annotated
                .annotations
                .iter()
                .filter(|a| a.window_start == Some(r.window_start))
                .map(|a| a.event.label.as_str())
                .collect();
            table.push(vec![
                r.window_start.format(DATE_FORMAT).to_string().into(),
                r.value.into(),
                r.links_in_window.into(),
                labels.join(";").into(),
            ]);
        }
        written.push(table.write(out, &format!("timeseries_{}", layer.name()), format)?);

        if !events.is_empty() {
            let mut table = Table::new(&["date", "label", "window_start", "in_span"]);
            for a in &annotated.annotations {
                table.push(vec![
                    a.event.date.format(DATE_FORMAT).to_string().into(),
                    a.event.label.as_str().into(),
                    a.window_start.map(|d| d.format(DATE_FORMAT).to_string()).into(),
                    Cell::Bool(a.in_span),
                ]);
            }
            written.push(table.write(out, &format!("timeseries_{}_events", layer.name()), format)?);
        }
    }
    Ok(written)
}
