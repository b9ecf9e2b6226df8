use std::cmp::Reverse;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context as _, Result};
use polarnet::community::ISOLATED_LABEL;
use polarnet::io::read_comments;
use polarnet::topics::{topic_report, CommentRecord, SignificanceTest, Stopwords, TopicOptions};
use polarnet::Partition;

use crate::args::{Command, Groups, TestArg};
use crate::context::{Inputs, RunConfig};
use crate::table::Table;

/// Significant words of the largest groups, ranked by PMI.
pub fn run(config: &RunConfig, inputs: &Inputs, command: &Command) -> Result<Vec<PathBuf>> {
    let Command::Topics {
        groups,
        group_layer,
        largest,
        top_k,
        test,
        stopwords,
    } = command
    else {
        unreachable!("dispatched on the topics command");
    };
    let scope = inputs.scope(config.default_scope())?;
    let partition: Partition = match groups {
        Groups::Party => scope.parties()?.clone(),
        Groups::Detected => {
            if scope.network.layer(group_layer).is_none() {
                bail!("no layer named `{group_layer}`; choose one with --group-layer");
            }
            config
                .detect(&scope, group_layer)?
                .with_context(|| format!("layer `{group_layer}` has no links to detect groups in"))?
                .partition
        }
    };
    let path = config.common.comments.as_ref().expect("checked by RunConfig");
    let comments: Vec<CommentRecord> = read_comments(path, inputs.network.registry())?
        .into_iter()
        .filter_map(|c| scope.remap[c.author].map(|author| CommentRecord { author, ..c }))
        .collect();
    let stopwords = match stopwords {
        Some(p) => Stopwords::parse(&fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?),
        None => Stopwords::german(),
    };
    let options = TopicOptions {
        top_k: *top_k,
        alpha: config.common.alpha,
        test: match test {
            TestArg::G => SignificanceTest::GTest,
            TestArg::Pearson => SignificanceTest::PearsonChi2,
        },
        stopwords,
    };
    let report = topic_report(&comments, &partition, &options)?;

    // Largest groups by member count, ties by label; the isolated nodes of
    // a detected partition are not a group.
    let sizes = partition.group_sizes();
    let size_of = |label: &str| partition.group_index(label).map_or(0, |g| sizes[g]);
    let mut kept: Vec<_> = report.groups.iter().filter(|g| g.group != ISOLATED_LABEL).collect();
    kept.sort_by_key(|g| (Reverse(size_of(&g.group)), g.group.clone()));
    if *largest > 0 {
        kept.truncate(*largest);
    }

    let mut words = Table::new(&[
        "group",
        "rank",
        "word",
        "pmi",
        "p_value",
        "count_in_group",
        "count_total",
    ]);
    let mut summary = Table::new(&["group", "members", "words", "tokens", "comments", "users"]);
    for g in kept {
        for (rank, w) in g.words.iter().enumerate() {
            words.push(vec![
                g.group.as_str().into(),
                (rank + 1).into(),
                w.word.as_str().into(),
                w.pmi.into(),
                w.p_value.into(),
                w.count_in_group.into(),
                w.count_total.into(),
            ]);
        }
        summary.push(vec![
            g.group.as_str().into(),
            size_of(&g.group).into(),
            g.significant_words.into(),
            g.token_count.into(),
            g.comment_count.into(),
            g.user_count.into(),
        ]);
    }
    let (out, format) = (config.out_dir()?, config.common.format);
    Ok(vec![
        words.write(out, "topics_words", format)?,
        summary.write(out, "topics_summary", format)?,
    ])
}
