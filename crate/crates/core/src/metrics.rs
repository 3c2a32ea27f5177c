//! trec_eval-compatible evaluation: qrels, per-topic average precision,
//! precision at k, 11-point interpolated precision, and their means.

use crate::bm25::RunEntry;
use crate::document::pmid_order;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

/// Recall levels for interpolated precision.
pub const RECALL_LEVELS: [f64; 11] =
    [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// Binary relevance judgments keyed by topic, then pmid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeMap<String, u8>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QrelsParseError {
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for QrelsParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "qrels line {}: {}", self.line, self.reason)
    }
}

impl core::error::Error for QrelsParseError {}

impl Qrels {
    /// Parses whitespace-separated `topic iteration pmid relevance` lines.
    /// The iteration column is ignored; duplicate (topic, pmid) pairs keep
    /// the last judgment.
    pub fn parse(text: &str) -> Result<Qrels, QrelsParseError> {
        let mut judgments: BTreeMap<String, BTreeMap<String, u8>> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = raw.split_whitespace().collect();
            if cols.len() != 4 {
                return Err(QrelsParseError {
                    line,
                    reason: format!("expected 4 columns, found {}", cols.len()),
                });
            }
            let relevance = match cols[3] {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(QrelsParseError {
                        line,
                        reason: format!("relevance must be 0 or 1, found {other:?}"),
                    })
                }
            };
            judgments
                .entry(cols[0].to_string())
                .or_default()
                .insert(cols[2].to_string(), relevance);
        }
        Ok(Qrels { judgments })
    }

    /// Number of relevant documents R(topic); 0 for unknown topics.
    pub fn relevant_count(&self, topic: &str) -> usize {
        self.judgments
            .get(topic)
            .map(|docs| docs.values().filter(|&&r| r == 1).count())
            .unwrap_or(0)
    }

    pub fn is_relevant(&self, topic: &str, pmid: &str) -> bool {
        self.judgments
            .get(topic)
            .and_then(|docs| docs.get(pmid))
            .is_some_and(|&r| r == 1)
    }

    /// True when the topic has any judgment line, relevant or not.
    pub fn contains_topic(&self, topic: &str) -> bool {
        self.judgments.contains_key(topic)
    }

    pub fn topics(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }
}

/// `(1/R) Σ rel_so_far(i)/i` over the ranks holding relevant documents.
/// Unjudged documents count as non-relevant. None when R(topic) = 0.
pub fn average_precision<S: AsRef<str>>(
    ranked: &[S],
    qrels: &Qrels,
    topic: &str,
) -> Option<f64> {
    let r = qrels.relevant_count(topic);
    if r == 0 {
        return None;
    }
    let mut rel_so_far = 0usize;
    let mut sum = 0.0;
    for (i, pmid) in ranked.iter().enumerate() {
        if qrels.is_relevant(topic, pmid.as_ref()) {
            rel_so_far += 1;
            sum += rel_so_far as f64 / (i + 1) as f64;
        }
    }
    Some(sum / r as f64)
}

/// Relevant documents among the first k retrieved, divided by k even when
/// fewer than k were retrieved.
pub fn precision_at_k<S: AsRef<str>>(
    ranked: &[S],
    qrels: &Qrels,
    topic: &str,
    k: usize,
) -> f64 {
    let hits = ranked
        .iter()
        .take(k)
        .filter(|pmid| qrels.is_relevant(topic, pmid.as_ref()))
        .count();
    hits as f64 / k as f64
}

/// For each level r: max precision(i) over ranks with recall(i) ≥ r, or 0
/// when no rank reaches the level. None when R(topic) = 0.
pub fn interpolated_precision<S: AsRef<str>>(
    ranked: &[S],
    qrels: &Qrels,
    topic: &str,
) -> Option<[f64; 11]> {
    let r = qrels.relevant_count(topic);
    if r == 0 {
        return None;
    }
    // Precision peaks only at relevant ranks, so those points suffice.
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut rel_so_far = 0usize;
    for (i, pmid) in ranked.iter().enumerate() {
        if qrels.is_relevant(topic, pmid.as_ref()) {
            rel_so_far += 1;
            points.push((rel_so_far as f64 / r as f64, rel_so_far as f64 / (i + 1) as f64));
        }
    }
    // Suffix maxima make each level a single lookup.
    let mut suffix_max = points.iter().map(|&(_, p)| p).collect::<Vec<f64>>();
    for i in (0..suffix_max.len().saturating_sub(1)).rev() {
        suffix_max[i] = suffix_max[i].max(suffix_max[i + 1]);
    }
    let mut out = [0.0; 11];
    for (slot, &level) in out.iter_mut().zip(RECALL_LEVELS.iter()) {
        if let Some(idx) = points.iter().position(|&(recall, _)| recall >= level) {
            *slot = suffix_max[idx];
        }
    }
    Some(out)
}

/// Metrics for one topic, or means over topics in the aggregate slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopicMetrics {
    pub ap: f64,
    pub p10: f64,
    pub p20: f64,
    pub p30: f64,
    pub iprec: [f64; 11],
}

impl TopicMetrics {
    pub const ZERO: TopicMetrics =
        TopicMetrics { ap: 0.0, p10: 0.0, p20: 0.0, p30: 0.0, iprec: [0.0; 11] };
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub per_topic: BTreeMap<String, TopicMetrics>,
    /// Arithmetic means over the evaluated topics; zeros when none.
    pub aggregate: TopicMetrics,
    pub evaluated_topic_count: usize,
    /// Run entries whose topic has no qrels judgments at all.
    pub ignored_run_entries: usize,
}

/// Scores a run against qrels. Every topic judged with R > 0 is evaluated;
/// topics absent from the run score 0. Entries are re-sorted by
/// (score desc, pmid asc) within each topic, so run-file line order is
/// irrelevant. Entries for topics without judgments are counted and ignored.
pub fn evaluate(run: &[RunEntry], qrels: &Qrels) -> MetricReport {
    let mut by_topic: BTreeMap<&str, Vec<&RunEntry>> = BTreeMap::new();
    let mut ignored = 0usize;
    for entry in run {
        if qrels.contains_topic(&entry.topic_id) {
            by_topic.entry(&entry.topic_id).or_default().push(entry);
        } else {
            ignored += 1;
        }
    }
    let mut per_topic = BTreeMap::new();
    for topic in qrels.topics() {
        if qrels.relevant_count(topic) == 0 {
            continue;
        }
        let ranked: Vec<&str> = match by_topic.get(topic) {
            Some(entries) => {
                let mut entries = entries.clone();
                entries.sort_by(|a, b| {
                    b.score.total_cmp(&a.score).then_with(|| pmid_order(&a.pmid, &b.pmid))
                });
                entries.iter().map(|e| e.pmid.as_str()).collect()
            }
            None => Vec::new(),
        };
        let metrics = TopicMetrics {
            ap: average_precision(&ranked, qrels, topic).expect("R > 0 checked above"),
            p10: precision_at_k(&ranked, qrels, topic, 10),
            p20: precision_at_k(&ranked, qrels, topic, 20),
            p30: precision_at_k(&ranked, qrels, topic, 30),
            iprec: interpolated_precision(&ranked, qrels, topic).expect("R > 0 checked above"),
        };
        per_topic.insert(topic.to_string(), metrics);
    }
    let count = per_topic.len();
    let aggregate = if count == 0 {
        TopicMetrics::ZERO
    } else {
        let mut sum = TopicMetrics::ZERO;
        for m in per_topic.values() {
            sum.ap += m.ap;
            sum.p10 += m.p10;
            sum.p20 += m.p20;
            sum.p30 += m.p30;
            for (s, v) in sum.iprec.iter_mut().zip(m.iprec.iter()) {
                *s += v;
            }
        }
        let n = count as f64;
        sum.ap /= n;
        sum.p10 /= n;
        sum.p20 /= n;
        sum.p30 /= n;
        for s in sum.iprec.iter_mut() {
            *s /= n;
        }
        sum
    };
    MetricReport { per_topic, aggregate, evaluated_topic_count: count, ignored_run_entries: ignored }
}

const METRIC_NAMES: [&str; 15] = [
    "map",
    "P_10",
    "P_20",
    "P_30",
    "iprec_at_recall_0.00",
    "iprec_at_recall_0.10",
    "iprec_at_recall_0.20",
    "iprec_at_recall_0.30",
    "iprec_at_recall_0.40",
    "iprec_at_recall_0.50",
    "iprec_at_recall_0.60",
    "iprec_at_recall_0.70",
    "iprec_at_recall_0.80",
    "iprec_at_recall_0.90",
    "iprec_at_recall_1.00",
];

fn metric_values(m: &TopicMetrics) -> [f64; 15] {
    let mut out = [0.0; 15];
    out[0] = m.ap;
    out[1] = m.p10;
    out[2] = m.p20;
    out[3] = m.p30;
    out[4..].copy_from_slice(&m.iprec);
    out
}

impl MetricReport {
    /// Rows of `metric<TAB>topic<TAB>value`, per-topic blocks first, then
    /// the `all` block with `num_q` leading it.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (topic, m) in &self.per_topic {
            for (name, value) in METRIC_NAMES.iter().zip(metric_values(m)) {
                let _ = writeln!(out, "{name}\t{topic}\t{value:.4}");
            }
        }
        let _ = writeln!(out, "num_q\tall\t{}", self.evaluated_topic_count);
        for (name, value) in METRIC_NAMES.iter().zip(metric_values(&self.aggregate)) {
            let _ = writeln!(out, "{name}\tall\t{value:.4}");
        }
        out
    }

    /// CSV with a `metric,topic,value` header, same row order as the text
    /// layout.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("metric,topic,value\n");
        for (topic, m) in &self.per_topic {
            for (name, value) in METRIC_NAMES.iter().zip(metric_values(m)) {
                let _ = writeln!(out, "{name},{topic},{value:.4}");
            }
        }
        let _ = writeln!(out, "num_q,all,{}", self.evaluated_topic_count);
        for (name, value) in METRIC_NAMES.iter().zip(metric_values(&self.aggregate)) {
            let _ = writeln!(out, "{name},all,{value:.4}");
        }
        out
    }
}
