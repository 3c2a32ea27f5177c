//! Deterministic synthetic mini-collection: 12 condition/drug topics over
//! ~230 citations. Each topic has eight relevant documents split into three
//! groups: full-text (condition and drug in title/abstract), mesh-only
//! (vocabulary only in the heading list), and mta-only (condition only in
//! the journal abbreviation). Schemata that index MHL and MTA therefore
//! retrieve strictly more relevant documents than the baseline.

use crate::ingest::render_pubmed_xml;
use crate::store::write_atomic;
use flate2::write::GzEncoder;
use flate2::Compression;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use tarlab_core::PubMedDocument;

const SEED: u64 = 0x7AB5_1AB0;

/// (condition, drug, truncation prefix). Prefixes are chosen so no filler
/// word matches them.
const TOPICS: [(&str, &str, &str); 12] = [
    ("dementia", "galantamine", "dement"),
    ("asthma", "salbutamol", "asthm"),
    ("migraine", "sumatriptan", "migrain"),
    ("epilepsy", "lamotrigine", "epilep"),
    ("psoriasis", "methotrexate", "psoria"),
    ("glaucoma", "timolol", "glaucom"),
    ("arthritis", "ibuprofen", "arthrit"),
    ("anemia", "epoetin", "anem"),
    ("insomnia", "zolpidem", "insomn"),
    ("obesity", "orlistat", "obes"),
    ("eczema", "tacrolimus", "eczem"),
    ("vertigo", "betahistine", "vertig"),
];

const FILLER_WORDS: [&str; 24] = [
    "cohort", "registry", "hospital", "clinical", "outcomes", "protocol", "screening",
    "longitudinal", "observational", "questionnaire", "incidence", "prevalence", "mortality",
    "biomarker", "imaging", "ultrasound", "renal", "cardiac", "hepatic", "nutrition",
    "exercise", "wellness", "survey", "admission",
];

const LAST_NAMES: [&str; 10] =
    ["Smith", "Chen", "Patel", "Garcia", "Kim", "Novak", "Rossi", "Dubois", "Tanaka", "Olsen"];
const FORE_NAMES: [&str; 10] =
    ["Anna", "James", "Wei", "Priya", "Luis", "Mina", "Ivan", "Clara", "Hiro", "Erik"];
const JOURNALS: [(&str, &str); 4] = [
    ("Clinical Research Quarterly", "Clin Res Q"),
    ("Archives of Internal Studies", "Arch Intern Stud"),
    ("European Trials Review", "Eur Trials Rev"),
    ("Annals of Hospital Medicine", "Ann Hosp Med"),
];

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn filler_sentence(&mut self) -> String {
        let n = self.rng.gen_range(4..9);
        let words: Vec<&str> = (0..n)
            .map(|_| *FILLER_WORDS.choose(&mut self.rng).expect("pool is non-empty"))
            .collect();
        format!("{}.", capitalize(&words.join(" ")))
    }

    fn filler_text(&mut self, sentences: usize) -> String {
        (0..sentences).map(|_| self.filler_sentence()).collect::<Vec<_>>().join(" ")
    }

    fn authors(&mut self) -> Vec<String> {
        let n = self.rng.gen_range(1..4);
        (0..n)
            .map(|_| {
                format!(
                    "{} {}",
                    LAST_NAMES.choose(&mut self.rng).expect("pool is non-empty"),
                    FORE_NAMES.choose(&mut self.rng).expect("pool is non-empty")
                )
            })
            .collect()
    }

    fn journal(&mut self) -> (&'static str, &'static str) {
        *JOURNALS.choose(&mut self.rng).expect("pool is non-empty")
    }

    fn year(&mut self) -> u16 {
        self.rng.gen_range(1995..2018)
    }
}

pub struct SynthCollection {
    pub docs: Vec<PubMedDocument>,
    /// (topic id, topic file text).
    pub topics: Vec<(String, String)>,
    pub qrels: String,
}

/// Builds the collection in memory. Every call returns identical data.
pub fn build() -> SynthCollection {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(SEED) };
    let mut docs = Vec::new();
    let mut topics = Vec::new();
    let mut qrels = String::new();
    let mut noise_pmids: Vec<String> = Vec::new();

    // Noise first so every topic can reference judged non-relevant pmids.
    for j in 0..110 {
        let pmid = format!("{}", 900_000 + j);
        let (journal, ta) = g.journal();
        let sentences = g.rng.gen_range(1..5);
        docs.push(PubMedDocument {
            pmid: pmid.clone(),
            title: capitalize(&g.filler_text(1)).trim_end_matches('.').to_string(),
            abstract_text: g.filler_text(sentences),
            authors: g.authors(),
            journal_title: journal.to_string(),
            year: Some(g.year()),
            mesh_headings: vec!["Humans".to_string()],
            medline_ta: ta.to_string(),
        });
        noise_pmids.push(pmid);
    }

    for (t, &(condition, drug, prefix)) in TOPICS.iter().enumerate() {
        let topic_id = format!("CD{:04}", t + 1);
        let cond_cap = capitalize(condition);
        let drug_cap = capitalize(drug);
        let base = 100_000 + (t as u32) * 100;
        let mut relevant = Vec::new();
        let mut judged_zero = Vec::new();

        let full_titles = [
            format!("{drug_cap} therapy in {condition}: a randomised controlled trial"),
            format!("Long term {drug} treatment of {condition}"),
            format!("{drug_cap} versus placebo for {condition} management"),
        ];
        for (k, title) in full_titles.iter().enumerate() {
            let pmid = format!("{}", base + k as u32 + 1);
            let (journal, ta) = g.journal();
            let mut abstract_text = format!(
                "Patients with {condition} received {drug} over {} weeks.",
                8 + 2 * k
            );
            for _ in 0..k {
                abstract_text.push(' ');
                abstract_text.push_str(&g.filler_sentence());
            }
            if k == 2 {
                abstract_text.push_str(&format!(" Symptoms of {condition} declined."));
            }
            docs.push(PubMedDocument {
                pmid: pmid.clone(),
                title: title.clone(),
                abstract_text,
                authors: g.authors(),
                journal_title: journal.to_string(),
                year: Some(g.year()),
                mesh_headings: vec![
                    cond_cap.clone(),
                    "drug therapy".to_string(),
                    "Humans".to_string(),
                ],
                medline_ta: ta.to_string(),
            });
            relevant.push(pmid);
        }

        for k in 0..3 {
            let pmid = format!("{}", base + 4 + k);
            let (journal, ta) = g.journal();
            docs.push(PubMedDocument {
                pmid: pmid.clone(),
                title: capitalize(&g.filler_text(1)).trim_end_matches('.').to_string(),
                abstract_text: g.filler_text(2 + k as usize),
                authors: g.authors(),
                journal_title: journal.to_string(),
                year: Some(g.year()),
                mesh_headings: vec![
                    cond_cap.clone(),
                    "drug therapy".to_string(),
                    drug_cap.clone(),
                ],
                medline_ta: ta.to_string(),
            });
            relevant.push(pmid);
        }

        for k in 0..2 {
            let pmid = format!("{}", base + 7 + k);
            let (journal, _) = g.journal();
            docs.push(PubMedDocument {
                pmid: pmid.clone(),
                title: capitalize(&g.filler_text(1)).trim_end_matches('.').to_string(),
                abstract_text: g.filler_text(2),
                authors: g.authors(),
                journal_title: journal.to_string(),
                year: Some(g.year()),
                mesh_headings: vec!["Humans".to_string()],
                medline_ta: format!("J {cond_cap} Res"),
            });
            relevant.push(pmid);
        }

        for k in 0..2u32 {
            let pmid = format!("{}", base + 10 + k);
            let (journal, ta) = g.journal();
            docs.push(PubMedDocument {
                pmid: pmid.clone(),
                title: format!("Adverse events of {drug} in healthy volunteers"),
                abstract_text: format!(
                    "{drug_cap} pharmacokinetics were recorded in {} subjects.",
                    12 + k
                ),
                authors: g.authors(),
                journal_title: journal.to_string(),
                year: Some(g.year()),
                mesh_headings: vec!["Humans".to_string(), "Adult".to_string()],
                medline_ta: ta.to_string(),
            });
            judged_zero.push(pmid);
        }

        // Two judged non-relevant noise documents per topic.
        for k in 0..2 {
            judged_zero.push(noise_pmids[(t * 2 + k) % noise_pmids.len()].clone());
        }

        for pmid in &relevant {
            qrels.push_str(&format!("{topic_id} 0 {pmid} 1\n"));
        }
        for pmid in &judged_zero {
            qrels.push_str(&format!("{topic_id} 0 {pmid} 0\n"));
        }

        let mut pids: Vec<&String> = relevant.iter().chain(judged_zero.iter()).collect();
        pids.sort();
        let pid_lines =
            pids.iter().map(|p| p.as_str()).collect::<Vec<_>>().join("\n");
        let text = format!(
            "Topic: {topic_id}\n\n\
             Title: {drug_cap} for {condition}\n\n\
             Query:\n\
             1. exp {cond_cap}/\n\
             2. {prefix}$.ti,ab.\n\
             3. {drug}.ti,ab.\n\
             4. or/1-2\n\
             5. 3 and 4\n\n\
             Pids:\n{pid_lines}\n"
        );
        topics.push((topic_id, text));
    }

    SynthCollection { docs, topics, qrels }
}

pub struct SynthPaths {
    pub corpus_dir: PathBuf,
    pub topics_dir: PathBuf,
    pub qrels_path: PathBuf,
    pub config_path: PathBuf,
}

/// Writes the collection under `root`: a three-file corpus (one of them
/// gzip-compressed), topic files, qrels, and a ready-to-run config whose
/// index and run outputs also land under `root`.
pub fn write(root: &Path) -> std::io::Result<SynthPaths> {
    let collection = build();
    let corpus_dir = root.join("corpus");
    let topics_dir = root.join("topics");
    fs::create_dir_all(&corpus_dir)?;
    fs::create_dir_all(&topics_dir)?;

    let chunk = collection.docs.len().div_ceil(3);
    let parts: Vec<&[PubMedDocument]> = collection.docs.chunks(chunk).collect();
    for (i, part) in parts.iter().enumerate() {
        let xml = render_pubmed_xml(part);
        if i == 2 {
            let path = corpus_dir.join(format!("part{}.xml.gz", i + 1));
            let file = fs::File::create(&path)?;
            let mut enc = GzEncoder::new(file, Compression::default());
            enc.write_all(xml.as_bytes())?;
            enc.finish()?;
        } else {
            fs::write(corpus_dir.join(format!("part{}.xml", i + 1)), xml)?;
        }
    }

    for (topic_id, text) in &collection.topics {
        fs::write(topics_dir.join(format!("{topic_id}.topic")), text)?;
    }

    let qrels_path = root.join("qrels.txt");
    fs::write(&qrels_path, &collection.qrels)?;

    let config_path = root.join("lab.conf");
    let config = format!(
        "corpus_dir = {}\n\
         index_dir = {}\n\
         topics_dir = {}\n\
         qrels_path = {}\n\
         output_dir = {}\n",
        corpus_dir.display(),
        root.join("indexes").display(),
        topics_dir.display(),
        qrels_path.display(),
        root.join("out").display(),
    );
    write_atomic(&config_path, &config)
        .map_err(|e| std::io::Error::other(e.to_string()))?;

    Ok(SynthPaths { corpus_dir, topics_dir, qrels_path, config_path })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;
    use tarlab_core::{make_query, parse_topic_file, QueryVariant};

    #[test]
    fn collection_shape() {
        let c = build();
        assert!(c.docs.len() >= 200, "{} docs", c.docs.len());
        assert_eq!(c.topics.len(), 12);
        let pmids: BTreeSet<&str> = c.docs.iter().map(|d| d.pmid.as_str()).collect();
        assert_eq!(pmids.len(), c.docs.len(), "pmids must be unique");
        // 8 relevant per topic.
        for (topic_id, _) in &c.topics {
            let relevant = c
                .qrels
                .lines()
                .filter(|l| l.starts_with(topic_id.as_str()) && l.ends_with(" 1"))
                .count();
            assert_eq!(relevant, 8, "{topic_id}");
        }
    }

    #[test]
    fn build_is_deterministic() {
        let a = build();
        let b = build();
        assert_eq!(a.docs, b.docs);
        assert_eq!(a.topics, b.topics);
        assert_eq!(a.qrels, b.qrels);
    }

    #[test]
    fn topic_files_parse_and_produce_all_variants() {
        let c = build();
        for (topic_id, text) in &c.topics {
            let topic = parse_topic_file(text).unwrap();
            assert_eq!(&topic.topic_id, topic_id);
            assert_eq!(topic.pids.len(), 12);
            for variant in QueryVariant::ALL {
                let q = make_query(&topic, variant);
                assert!(!q.terms.is_empty(), "{topic_id} {variant}");
            }
            // query2 keeps the explosion heading and turns $ into *.
            let q2 = make_query(&topic, QueryVariant::Query2);
            assert!(q2.terms.iter().any(|t| t.ends_with('*')), "{:?}", q2.terms);
            assert!(q2.terms.iter().all(|t| !t.contains('$') && !t.contains('/')));
        }
    }

    #[test]
    fn vocabulary_separation_holds() {
        // Mesh-only and mta-only relevant docs must not leak condition or
        // drug words into baseline fields (title, abstract, pmid).
        let c = build();
        for (t, (condition, drug, prefix)) in TOPICS.iter().enumerate() {
            let base = 100_000 + (t as u32) * 100;
            for offset in 4..9 {
                let pmid = format!("{}", base + offset);
                let doc = c.docs.iter().find(|d| d.pmid == pmid).unwrap();
                let baseline_text =
                    format!("{} {}", doc.title, doc.abstract_text).to_lowercase();
                assert!(!baseline_text.contains(condition), "{pmid}: {baseline_text}");
                assert!(!baseline_text.contains(drug), "{pmid}");
                assert!(!baseline_text.contains(prefix), "{pmid}");
            }
        }
        // Filler vocabulary never collides with a truncation prefix.
        for word in FILLER_WORDS {
            for (_, _, prefix) in TOPICS {
                assert!(!word.starts_with(prefix), "{word} vs {prefix}");
            }
        }
    }
}
