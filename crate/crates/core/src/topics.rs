//! Characteristic words of comment groups.
//!
//! Each group's word rate is compared with the corpus rate by pointwise
//! mutual information `log2(p(w|g) / p(w))`. A word is kept only when a
//! 2x2 test of its in-group rate against the rate in the rest of the corpus
//! rejects equality at level `alpha`. Counts are token counts.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::csv_field;
use crate::network::Partition;
use crate::par;
use crate::stats::chi2_1_sf;

const GERMAN_STOPWORDS: &str = include_str!("stopwords_de.txt");

pub const DEFAULT_ALPHA: f64 = 0.01;
pub const DEFAULT_TOP_K: usize = 20;
const MIN_TOKEN_CHARS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommentRecord {
    pub author: usize,
    pub date: NaiveDate,
    pub text: String,
}

/// Case-folded stopword set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn german() -> Self {
        Stopwords::parse(GERMAN_STOPWORDS)
    }

    pub fn contains(&self, folded: &str) -> bool {
        self.0.contains(folded)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Stopwords(iter.into_iter().map(|s| s.into().to_lowercase()).collect())
    }
}

/// Splits `text` on every non-alphanumeric character and drops stopwords
/// and one-character tokens. Tokens keep their case.
pub fn tokenize<'a>(text: &'a str, stopwords: &Stopwords) -> Vec<&'a str> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= MIN_TOKEN_CHARS && !stopwords.contains(&t.to_lowercase()))
        .collect()
}

/// `log2((in_group / group_total) / (global / global_total))`.
pub fn pmi(in_group: u64, group_total: u64, global: u64, global_total: u64) -> Result<f64> {
    if group_total == 0 || global == 0 || global_total == 0 {
        return Err(Error::validation(
            "pmi needs positive totals and a positive global count",
        ));
    }
    if in_group == 0 {
        return Err(Error::undefined("pmi of a word absent from the group"));
    }
    let ratio = (in_group as f64 * global_total as f64) / (group_total as f64 * global as f64);
    Ok(ratio.log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignificanceTest {
    /// Likelihood-ratio statistic `G = 2 Σ O ln(O/E)`.
    #[default]
    GTest,
    /// Pearson's `Σ (O-E)² / E`.
    PearsonChi2,
}

impl std::str::FromStr for SignificanceTest {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "g" | "g-test" => Ok(SignificanceTest::GTest),
            "pearson" | "chi2" => Ok(SignificanceTest::PearsonChi2),
            _ => Err(format!("unknown test `{s}` (g-test, pearson)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Significance {
    pub statistic: f64,
    pub p_value: f64,
    /// A margin of the 2x2 table was zero; `p_value` is 1.
    pub degenerate: bool,
}

/// Tests the word's in-group rate against its rate in the complement of
/// the group (one degree of freedom).
pub fn significance(
    in_group: u64,
    group_total: u64,
    global: u64,
    global_total: u64,
    test: SignificanceTest,
) -> Result<Significance> {
    if in_group > group_total || in_group > global || group_total > global_total {
        return Err(Error::validation(format!(
            "inconsistent counts: {in_group}/{group_total} in group, {global}/{global_total} overall"
        )));
    }
    let outside = global - in_group;
    let rest_total = global_total - group_total;
    if outside > rest_total {
        return Err(Error::validation(format!(
            "word occurs {outside} times outside the group but only {rest_total} tokens are there"
        )));
    }
    let cells = [
        [in_group as f64, (group_total - in_group) as f64],
        [outside as f64, (rest_total - outside) as f64],
    ];
    let rows = [group_total as f64, rest_total as f64];
    let cols = [global as f64, (global_total - global) as f64];
    let n = global_total as f64;
    if rows.contains(&0.0) || cols.contains(&0.0) {
        return Ok(Significance {
            statistic: 0.0,
            p_value: 1.0,
            degenerate: true,
        });
    }
    let mut statistic = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let expected = rows[r] * cols[c] / n;
            let observed = cells[r][c];
            statistic += match test {
                SignificanceTest::GTest if observed > 0.0 => 2.0 * observed * (observed / expected).ln(),
                SignificanceTest::GTest => 0.0,
                SignificanceTest::PearsonChi2 => (observed - expected).powi(2) / expected,
            };
        }
    }
    let statistic = statistic.max(0.0);
    Ok(Significance {
        statistic,
        p_value: chi2_1_sf(statistic),
        degenerate: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordGroupStat {
    pub word: String,
    pub group: String,
    pub count_in_group: u64,
    pub count_total: u64,
    pub pmi: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupTopics {
    pub group: String,
    /// Significant words by descending PMI, ties by word.
    pub words: Vec<WordGroupStat>,
    /// Significant words before truncation to the top `k`.
    pub significant_words: usize,
    /// Tokens written by the group after stopword removal.
    pub token_count: u64,
    pub comment_count: usize,
    pub user_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicReport {
    pub groups: Vec<GroupTopics>,
    /// Groups of the partition without any comment.
    pub omitted: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct TopicOptions {
    pub top_k: usize,
    pub alpha: f64,
    pub test: SignificanceTest,
    pub stopwords: Stopwords,
}

impl Default for TopicOptions {
    fn default() -> Self {
        TopicOptions {
            top_k: DEFAULT_TOP_K,
            alpha: DEFAULT_ALPHA,
            test: SignificanceTest::default(),
            stopwords: Stopwords::german(),
        }
    }
}

/// Word counts of one comment, keyed by folded form, plus surface forms.
type CommentCounts = (HashMap<String, u64>, Vec<(String, String)>);

pub fn topic_report(comments: &[CommentRecord], partition: &Partition, options: &TopicOptions) -> Result<TopicReport> {
    if comments.is_empty() {
        return Err(Error::validation("topic report needs at least one comment"));
    }
    if !(options.alpha > 0.0 && options.alpha <= 1.0) {
        return Err(Error::validation(format!(
            "alpha must lie in (0, 1], got {}",
            options.alpha
        )));
    }
    if let Some(c) = comments.iter().find(|c| c.author >= partition.len()) {
        return Err(Error::validation(format!(
            "comment author {} is outside the partition",
            c.author
        )));
    }
    let per_comment: Vec<CommentCounts> = par::map_slice(comments, |c| {
        let mut counts = HashMap::new();
        let mut surfaces = Vec::new();
        for token in tokenize(&c.text, &options.stopwords) {
            let folded = token.to_lowercase();
            *counts.entry(folded.clone()).or_insert(0) += 1;
            surfaces.push((folded, token.to_owned()));
        }
        (counts, surfaces)
    });

    let groups = partition.label_count();
    let mut by_group: Vec<HashMap<String, u64>> = vec![HashMap::new(); groups];
    let mut group_tokens = vec![0u64; groups];
    let mut comment_count = vec![0usize; groups];
    let mut users: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); groups];
    let mut global: HashMap<String, u64> = HashMap::new();
    let mut surface: HashMap<String, BTreeMap<String, u64>> = HashMap::new();
    for (c, (counts, surfaces)) in comments.iter().zip(per_comment) {
        let g = partition.group_of(c.author);
        comment_count[g] += 1;
        users[g].insert(c.author);
        for (word, k) in counts {
            group_tokens[g] += k;
            *global.entry(word.clone()).or_insert(0) += k;
            *by_group[g].entry(word).or_insert(0) += k;
        }
        for (folded, form) in surfaces {
            *surface.entry(folded).or_default().entry(form).or_insert(0) += 1;
        }
    }
    let total: u64 = group_tokens.iter().sum();
    // Most frequent spelling, ties to the smallest.
    let display = |folded: &str| -> String {
        surface[folded]
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(form, _)| form.clone())
            .unwrap_or_else(|| folded.to_owned())
    };

    let mut report = TopicReport {
        groups: Vec::new(),
        omitted: Vec::new(),
    };
    for g in 0..groups {
        let label = &partition.labels()[g];
        if comment_count[g] == 0 {
            report.omitted.push(label.clone());
            continue;
        }
        let mut words = Vec::new();
        if group_tokens[g] > 0 {
            for (word, &k) in &by_group[g] {
                let count_total = global[word];
                let sig = significance(k, group_tokens[g], count_total, total, options.test)?;
                if sig.p_value < options.alpha {
                    words.push(WordGroupStat {
                        word: display(word),
                        group: label.clone(),
                        count_in_group: k,
                        count_total,
                        pmi: pmi(k, group_tokens[g], count_total, total)?,
                        p_value: sig.p_value,
                    });
                }
            }
        }
        words.sort_by(|a, b| b.pmi.total_cmp(&a.pmi).then_with(|| a.word.cmp(&b.word)));
        let significant_words = words.len();
        words.truncate(options.top_k);
        report.groups.push(GroupTopics {
            group: label.clone(),
            words,
            significant_words,
            token_count: group_tokens[g],
            comment_count: comment_count[g],
            user_count: users[g].len(),
        });
    }
    Ok(report)
}

impl TopicReport {
    /// `group,rank,word,pmi,p_value,count_in_group,count_total`.
    pub fn words_csv(&self) -> String {
        let mut out = String::from("group,rank,word,pmi,p_value,count_in_group,count_total\n");
        for g in &self.groups {
            for (rank, w) in g.words.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    csv_field(&g.group),
                    rank + 1,
                    csv_field(&w.word),
                    w.pmi,
                    w.p_value,
                    w.count_in_group,
                    w.count_total
                );
            }
        }
        out
    }

    /// `group,words,tokens,comments,users`, where `words` counts the
    /// significant words.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("group,words,tokens,comments,users\n");
        for g in &self.groups {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                csv_field(&g.group),
                g.significant_words,
                g.token_count,
                g.comment_count,
                g.user_count
            );
        }
        out
    }
}
