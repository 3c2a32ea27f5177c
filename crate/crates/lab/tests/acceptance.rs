//! Acceptance suite: one test per criterion, each printing its own
//! pass/fail line through the harness. Tolerances are part of the
//! criteria and asserted literally.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;
use tarlab::config::ExperimentConfig;
use tarlab::harness::{cmd_eval, cmd_index, cmd_report, cmd_run};
use tarlab::synth;
use tarlab::trec::{read_qrels, read_run};
use tarlab_core::analysis::{porter_stem, AnalysisChain};
use tarlab_core::bm25::{score, search, Bm25Params};
use tarlab_core::index::{build_index, Index};
use tarlab_core::schema::{FieldSchema, SchemaId};
use tarlab_core::stats::{marker, paired_t, student_t_two_sided_p};
use tarlab_core::topic::{clean_query2, Query, QueryVariant};
use tarlab_core::{evaluate, parse_run, ComparisonMatrix, Qrels};

// --- criterion 1: metric oracle equivalence -------------------------------

const FIXTURES: [(&str, &str, &str); 5] = [
    (
        include_str!("data/fixture1.run"),
        include_str!("data/fixture1.qrels"),
        include_str!("data/fixture1.expected"),
    ),
    (
        include_str!("data/fixture2.run"),
        include_str!("data/fixture2.qrels"),
        include_str!("data/fixture2.expected"),
    ),
    (
        include_str!("data/fixture3.run"),
        include_str!("data/fixture3.qrels"),
        include_str!("data/fixture3.expected"),
    ),
    (
        include_str!("data/fixture4.run"),
        include_str!("data/fixture4.qrels"),
        include_str!("data/fixture4.expected"),
    ),
    (
        include_str!("data/fixture5.run"),
        include_str!("data/fixture5.qrels"),
        include_str!("data/fixture5.expected"),
    ),
];

#[test]
fn criterion_1_metrics_match_the_reference_fixtures() {
    let started = Instant::now();
    for (i, (run_text, qrels_text, expected)) in FIXTURES.iter().enumerate() {
        let run = parse_run(run_text).unwrap();
        let qrels = Qrels::parse(qrels_text).unwrap();
        assert!(run.len() >= 200, "fixture{}: {} docs", i + 1, run.len());
        assert!(qrels.topics().count() >= 5, "fixture{}", i + 1);
        let report = evaluate(&run, &qrels);
        for line in expected.lines() {
            let mut fields = line.split('\t');
            let metric = fields.next().unwrap();
            let topic = fields.next().unwrap();
            let want: f64 = fields.next().unwrap().parse().unwrap();
            let got = if topic == "all" {
                let m = &report.aggregate;
                match metric {
                    "map" => m.ap,
                    "P_10" => m.p10,
                    "P_20" => m.p20,
                    "P_30" => m.p30,
                    _ => {
                        let level: usize = metric
                            .strip_prefix("iprec_at_recall_")
                            .map(|s| (s.parse::<f64>().unwrap() * 10.0).round() as usize)
                            .unwrap();
                        m.iprec[level]
                    }
                }
            } else {
                assert_eq!(metric, "map");
                report.per_topic[topic].ap
            };
            assert!(
                (got - want).abs() <= 1e-4,
                "fixture{} {metric}/{topic}: got {got}, want {want}",
                i + 1
            );
        }
    }
    assert!(started.elapsed().as_secs_f64() < 5.0, "took {:?}", started.elapsed());
}

// --- criterion 2: BM25 oracle equivalence ---------------------------------

const VOCAB: &[&str] = &[
    "dementia", "dementias", "donepezil", "placebo", "trial", "trials", "screening", "aspirin",
    "cohort", "therapy", "memory", "cognitive", "woman", "women", "wooden", "randomised",
    "blind", "elderly", "the", "of", "and", "accuracy", "review", "galantamine", "rivastigmine",
];

fn random_corpus(seed: u64, size: usize) -> Vec<tarlab_core::PubMedDocument> {
    use rand::prelude::*;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..size)
        .map(|i| {
            let words = |rng: &mut rand_chacha::ChaCha8Rng, lo: usize, hi: usize| {
                let n = rng.gen_range(lo..=hi);
                (0..n).map(|_| *VOCAB.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
            };
            tarlab_core::PubMedDocument {
                pmid: format!("{}", rng.gen_range(1..10_000_000) * 100 + i as u64),
                title: words(&mut rng, 1, 8),
                abstract_text: words(&mut rng, 0, 60),
                ..Default::default()
            }
        })
        .collect()
}

/// Brute-force BM25 from first principles: re-analyzes every document for
/// every query, computes df/tf/avgdl directly, and expands wildcards over
/// the sorted vocabulary (cap 128, full-pattern glob).
fn brute_force_ranking(
    docs: &[tarlab_core::PubMedDocument],
    schema: &FieldSchema,
    chain: &AnalysisChain,
    raw_terms: &[&str],
    params: Bm25Params,
    cutoff: usize,
) -> Vec<(String, f64)> {
    let analyzed: Vec<Vec<String>> =
        docs.iter().map(|d| chain.analyze(&schema.searchable_text(d))).collect();
    let n = docs.len() as f64;
    let avgdl = analyzed.iter().map(Vec::len).sum::<usize>() as f64 / n;

    let mut dictionary: Vec<&str> = analyzed.iter().flatten().map(String::as_str).collect();
    dictionary.sort_unstable();
    dictionary.dedup();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for terms in &analyzed {
        let mut uniq: Vec<&str> = terms.iter().map(String::as_str).collect();
        uniq.sort_unstable();
        uniq.dedup();
        for t in uniq {
            *df.entry(t).or_insert(0) += 1;
        }
    }

    let mut qtf: BTreeMap<String, u32> = BTreeMap::new();
    for raw in raw_terms {
        if let Some(star) = raw.find('*') {
            let pattern = raw.to_lowercase();
            let prefix = &pattern[..star];
            if prefix.is_empty() {
                continue;
            }
            let candidates: Vec<&&str> =
                dictionary.iter().filter(|t| t.starts_with(prefix)).take(128).collect();
            for t in candidates {
                if wildcard_match(&pattern, t) {
                    *qtf.entry(t.to_string()).or_insert(0) += 1;
                }
            }
        } else {
            for t in chain.analyze(raw) {
                *qtf.entry(t).or_insert(0) += 1;
            }
        }
    }

    let mut scored: Vec<(String, f64)> = Vec::new();
    for (doc, terms) in docs.iter().zip(&analyzed) {
        let mut tf: BTreeMap<&str, f64> = BTreeMap::new();
        for t in terms {
            *tf.entry(t).or_insert(0.0) += 1.0;
        }
        let dl = terms.len() as f64;
        let mut s = 0.0;
        for (term, &q) in &qtf {
            let (Some(&d), Some(&f)) = (df.get(term.as_str()), tf.get(term.as_str())) else {
                continue;
            };
            let idf = (1.0 + (n - d as f64 + 0.5) / (d as f64 + 0.5)).ln();
            s += f64::from(q) * idf * f * (params.k1 + 1.0)
                / (f + params.k1 * (1.0 - params.b + params.b * dl / avgdl));
        }
        if s > 0.0 {
            scored.push((doc.pmid.clone(), s));
        }
    }
    scored.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| a.0.parse::<u64>().unwrap().cmp(&b.0.parse::<u64>().unwrap()))
    });
    scored.truncate(cutoff);
    scored
}

fn wildcard_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    fn rec(p: &[char], t: &[char]) -> bool {
        match p.first() {
            None => t.is_empty(),
            Some('*') => rec(&p[1..], t) || (!t.is_empty() && rec(p, &t[1..])),
            Some(&c) => t.first() == Some(&c) && rec(&p[1..], &t[1..]),
        }
    }
    rec(&p, &t)
}

#[test]
fn criterion_2_bm25_matches_the_brute_force_oracle() {
    use rand::prelude::*;

    // Hand example first: corpus {"a b a", "b c", "c c c"}, query ["a"].
    let chain = AnalysisChain::standard().with_stages(vec![tarlab_core::Stage::Lowercase]);
    let analyzed = vec![
        ("1".to_string(), vec!["a".to_string(), "b".to_string(), "a".to_string()]),
        ("2".to_string(), vec!["b".to_string(), "c".to_string()]),
        ("3".to_string(), vec!["c".to_string(), "c".to_string(), "c".to_string()]),
    ];
    let index =
        Index::from_analyzed(analyzed, FieldSchema::of(SchemaId::Baseline), chain).unwrap();
    let params = Bm25Params::default();
    let hand = score(&index, &["a"], params, 0).unwrap();
    assert!((hand - 1.3028).abs() <= 1e-4, "hand example scored {hand}");
    let query = Query { variant: QueryVariant::Query, terms: vec!["a".to_string()] };
    let entries = search(&index, "T", &query, params, 1000, "acc");
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0].pmid, "1");
    assert_eq!(entries[0].rank, 1);
    assert!((entries[0].score - 1.3028).abs() <= 1e-4);

    // 100-document corpus, 20 queries, exact rank order, scores to 1e-9.
    let docs = random_corpus(2024, 100);
    let schema = FieldSchema::of(SchemaId::Baseline);
    let chain = AnalysisChain::standard();
    let index = build_index(docs.clone(), schema.clone(), chain.clone()).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
    let wildcards = ["dement*", "wom*n", "trial*", "r*ed", "galant*"];
    let mut queries: Vec<Vec<&str>> = Vec::new();
    for _ in 0..15 {
        let n = rng.gen_range(1..6);
        queries.push((0..n).map(|_| *VOCAB.choose(&mut rng).unwrap()).collect());
    }
    for w in wildcards {
        let mut q = vec![w];
        if rng.gen_bool(0.6) {
            q.push(*VOCAB.choose(&mut rng).unwrap());
        }
        queries.push(q);
    }
    assert_eq!(queries.len(), 20);

    for (qi, raw_terms) in queries.iter().enumerate() {
        let expected = brute_force_ranking(&docs, &schema, &chain, raw_terms, params, 1000);
        let query = Query {
            variant: QueryVariant::Query,
            terms: raw_terms.iter().map(|t| t.to_string()).collect(),
        };
        let got = search(&index, "T", &query, params, 1000, "acc");
        assert_eq!(got.len(), expected.len(), "query {qi} {raw_terms:?}");
        for (rank, (entry, (pmid, want))) in got.iter().zip(&expected).enumerate() {
            assert_eq!(entry.pmid, *pmid, "query {qi} {raw_terms:?} rank {}", rank + 1);
            assert!(
                (entry.score - want).abs() <= 1e-9,
                "query {qi} rank {}: {} vs {want}",
                rank + 1,
                entry.score
            );
        }
    }
}

// --- criterion 3: formula identities ---------------------------------------

#[test]
fn criterion_3_formula_identities_hold_exactly() {
    let chain = AnalysisChain::standard().with_stages(vec![]);

    // b = 0: equal tf, very different lengths, identical scores (exact).
    let analyzed = vec![
        ("11".to_string(), vec!["x".to_string(), "y".to_string()]),
        (
            "12".to_string(),
            vec!["x", "z", "z", "z", "z", "z", "z", "z"].into_iter().map(String::from).collect(),
        ),
    ];
    let index = Index::from_analyzed(
        analyzed,
        FieldSchema::of(SchemaId::Baseline),
        chain.clone(),
    )
    .unwrap();
    for k1 in [0.5, 1.2, 2.0] {
        let p = Bm25Params { k1, b: 0.0 };
        let short = score(&index, &["x"], p, 0).unwrap();
        let long = score(&index, &["x"], p, 1).unwrap();
        assert_eq!(short, long, "b=0 length invariance failed at k1={k1}");
    }

    // tf monotonicity: same length, tf 2 vs 1, strictly higher score.
    let analyzed = vec![
        ("11".to_string(), vec!["x".to_string(), "x".to_string(), "y".to_string()]),
        ("12".to_string(), vec!["x".to_string(), "y".to_string(), "y".to_string()]),
    ];
    let index =
        Index::from_analyzed(analyzed, FieldSchema::of(SchemaId::Baseline), chain).unwrap();
    for k1 in [0.5, 1.2, 2.0] {
        for b in [0.0, 0.5, 0.75, 1.0] {
            let p = Bm25Params { k1, b };
            let hi = score(&index, &["x"], p, 0).unwrap();
            let lo = score(&index, &["x"], p, 1).unwrap();
            assert!(hi > lo, "tf monotonicity failed at k1={k1}, b={b}");
        }
    }
}

// --- criterion 4: t-test oracle --------------------------------------------

const TTEST_GRID: &str = include_str!("../../core/tests/data/ttest_grid.tsv");

#[test]
fn criterion_4_ttest_matches_the_statistical_oracle() {
    let a = [1.0, 2.0, 3.0, 4.0, 5.0];
    let b = [2.0, 2.0, 4.0, 4.0, 6.0];
    let r = paired_t(&a, &b).unwrap();
    assert!((r.t_statistic - (-2.4495)).abs() <= 1e-4, "t = {}", r.t_statistic);
    assert!((r.p_value - 0.0705).abs() <= 1e-3, "p = {}", r.p_value);

    let mut rows = 0;
    for line in TTEST_GRID.lines() {
        let mut fields = line.split('\t');
        let t: f64 = fields.next().unwrap().parse().unwrap();
        let df: f64 = fields.next().unwrap().parse().unwrap();
        let want: f64 = fields.next().unwrap().parse().unwrap();
        let got = student_t_two_sided_p(t, df);
        assert!(
            ((got - want) / want).abs() <= 1e-6,
            "p(t={t}, df={df}): got {got}, want {want}"
        );
        rows += 1;
    }
    assert!(rows >= 100, "grid too small: {rows} rows");

    assert_eq!(marker(0.05).unwrap(), "*");
    assert_eq!(marker(0.01).unwrap(), "*");
    assert_eq!(marker(0.009).unwrap(), "+");
    assert_eq!(marker(0.0009).unwrap(), "++");
}

// --- criterion 5: directional reproduction at desk scale -------------------

#[test]
fn criterion_5_fielded_schema_beats_baseline_on_every_variant() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let paths = synth::write(dir.path()).unwrap();
    let config = ExperimentConfig::load(&paths.config_path).unwrap();

    let collection = synth::build();
    assert!(collection.docs.len() >= 200);
    assert!(collection.topics.len() >= 10);

    cmd_index(&config, false).unwrap();
    let outcomes = cmd_run(&config).unwrap();
    let qrels = read_qrels(&paths.qrels_path).unwrap();
    let mut map: BTreeMap<(SchemaId, QueryVariant), f64> = BTreeMap::new();
    for outcome in &outcomes {
        let report = evaluate(&read_run(&outcome.path).unwrap(), &qrels);
        map.insert((outcome.name.schema, outcome.name.variant), report.aggregate.ap);
    }
    for variant in QueryVariant::ALL {
        let fielded = map[&(SchemaId::TwoMhlMta, variant)];
        let baseline = map[&(SchemaId::Baseline, variant)];
        assert!(
            fielded > baseline,
            "{variant}: 2+MHLMTA map {fielded} vs baseline {baseline}"
        );
    }
    assert!(started.elapsed().as_secs_f64() < 10.0, "took {:?}", started.elapsed());
}

// --- criterion 6: query2 transformation goldens ----------------------------

#[test]
fn criterion_6_query2_goldens_hold() {
    let cases: &[(&str, &[&str])] = &[
        ("1. exp Dementia/", &["Dementia"]),
        ("2. exp Alzheimer Disease/", &["Alzheimer", "Disease"]),
        ("3. dement$.ti,ab.", &["dement*"]),
        ("4. alzheimer$.ti,ab.", &["alzheimer*"]),
        ("5. or/1-4", &[]),
        ("6. galantamine.ti,ab.", &["galantamine"]),
        ("7. 5 and 6", &[]),
        ("wom?n.ti,ab.", &["wom*n"]),
        ("#2 mass screening.mp.", &["mass", "screening"]),
        ("8. (CT adj3 colonography).ti,ab.", &["CT", "adj3", "colonography"]),
        ("9. randomized controlled trial.pt.", &["randomized", "controlled", "trial"]),
        ("10. colonoscop$.tw.", &["colonoscop*"]),
        ("dementia[tiab]", &["dementia"]),
        ("11. Mass Screening/", &["Mass", "Screening"]),
        ("12. (dementia or alzheimer$).ti,ab.", &["dementia", "alzheimer*"]),
        ("13. exp *Dementia/", &["*Dementia"]),
        ("14. cognit# impairment.ti,ab.", &["cognit*", "impairment"]),
        ("15. 13 or 14", &[]),
        ("16. Sensitivity and Specificity.sh.", &["Sensitivity", "Specificity"]),
        ("17. letter.pt.", &["letter"]),
        ("18. comment.pt.", &["comment"]),
        ("19. and/17-18", &[]),
        ("exp Early Diagnosis/", &["Early", "Diagnosis"]),
        (
            "20. (exp Dementia/ or dement$.ti,ab.) and galantamine.ti,ab.",
            &["Dementia", "dement*", "galantamine"],
        ),
    ];
    assert!(cases.len() >= 20);

    let qualifiers =
        [".ti,ab.", ".ti.", ".ab.", ".mp.", ".sh.", ".pt.", ".tw.", "[tiab]", "[ti]", "[ab]",
         "[mh]", "[pt]", "[tw]"];
    for (line, want) in cases {
        let got = clean_query2(&[*line]);
        assert_eq!(&got, want, "line {line:?}");
        for token in &got {
            assert!(!token.contains(['?', '#', '$']), "{line:?} -> {token:?}");
            let lower = token.to_lowercase();
            for q in qualifiers {
                assert!(!lower.contains(q), "{line:?} -> {token:?} keeps {q:?}");
            }
        }
    }
}

// --- criterion 7: Porter stemmer vocabulary --------------------------------

const PORTER_PAIRS: &str = include_str!("../../core/tests/data/porter_pairs.tsv");

#[test]
fn criterion_7_porter_vocabulary_matches_completely() {
    let mut total = 0;
    for line in PORTER_PAIRS.lines() {
        let (word, want) = line.split_once('\t').unwrap();
        assert_eq!(porter_stem(word), want, "word {word:?}");
        total += 1;
    }
    assert!(total >= 1000, "only {total} pairs");
}

// --- criterion 8: table re-rendering ----------------------------------------

const TABLE1: &str = include_str!("../data/table1_map.csv");

#[test]
fn criterion_8_published_table_re_renders_verbatim() {
    let matrix = ComparisonMatrix::parse_csv(TABLE1).unwrap();
    assert_eq!(matrix.columns, ["baseline", "1+AJY", "2+MHL", "2+MTA", "2+MHLMTA"]);
    assert_eq!(matrix.row_labels, ["title", "query", "title&query", "query2", "title&query2"]);

    let title_row: Vec<&str> =
        matrix.cells[0].iter().map(|c| c.display.as_str()).collect();
    assert_eq!(title_row, ["0.1211", "0.1237", "0.135", "0.1233", "0.136"]);

    let markdown = matrix.to_markdown();
    let rendered: [[&str; 5]; 5] = [
        ["0.1211", "0.1237", "0.135 +", "0.1233", "0.136 +"],
        ["0.039", "0.0419", "0.048 *", "0.0419", "0.0485 +"],
        ["0.0836", "0.0954 *", "0.0993 *", "0.0942 *", "0.1013 ++"],
        ["0.0775", "0.0846", "0.0906 +", "0.086", "0.0916 +"],
        ["0.1025", "0.1154", "0.1183 +", "0.1154", "0.1197 ++"],
    ];
    for row in rendered {
        for cell in row {
            assert!(markdown.contains(&format!("| {cell} |")), "missing {cell:?}:\n{markdown}");
        }
    }
    // Re-rendered digits stay verbatim: no zero-padding anywhere.
    assert!(!markdown.contains("0.1350"), "{markdown}");
    assert!(!markdown.contains("0.1360"), "{markdown}");
    assert_eq!(matrix.to_csv(), TABLE1);
}

// --- criterion 9: end-to-end determinism ------------------------------------

fn run_pipeline(root: &Path) -> ExperimentConfig {
    let paths = synth::write(root).unwrap();
    let config = ExperimentConfig::load(&paths.config_path).unwrap();
    cmd_index(&config, false).unwrap();
    cmd_run(&config).unwrap();
    cmd_eval(&config, &[]).unwrap();
    cmd_report(&config).unwrap();
    config
}

fn snapshot(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    for sub in ["indexes", "out"] {
        for entry in walkdir::WalkDir::new(root.join(sub)).sort_by_file_name() {
            let entry = entry.unwrap();
            if entry.file_type().is_file() {
                let rel = entry.path().strip_prefix(root).unwrap().to_path_buf();
                files.insert(rel, fs::read(entry.path()).unwrap());
            }
        }
    }
    files
}

#[test]
fn criterion_9_pipeline_is_byte_deterministic() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    run_pipeline(dir_a.path());
    run_pipeline(dir_b.path());
    let a = snapshot(dir_a.path());
    let b = snapshot(dir_b.path());
    let names_a: Vec<_> = a.keys().collect();
    let names_b: Vec<_> = b.keys().collect();
    assert_eq!(names_a, names_b);
    // 5 schemata x 4 index files, 25 runs + 50 eval reports + 3 tables.
    assert_eq!(a.len(), 98, "{names_a:?}");
    for (path, bytes) in &a {
        assert_eq!(bytes, &b[path], "{} differs between runs", path.display());
    }
}
