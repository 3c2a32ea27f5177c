//! Writes the bundled synthetic mini-collection (corpus, topics, qrels, and
//! a ready-to-run config) to a directory, so the CLI can be exercised
//! without external data:
//!
//! ```text
//! cargo run --example make_demo_corpus -- demo
//! cargo run -- --config demo/lab.conf index
//! ```

use std::path::PathBuf;

fn main() -> std::io::Result<()> {
    let root = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("demo"));
    let paths = tarlab::synth::write(&root)?;
    println!("corpus: {}", paths.corpus_dir.display());
    println!("topics: {}", paths.topics_dir.display());
    println!("qrels:  {}", paths.qrels_path.display());
    println!("config: {}", paths.config_path.display());
    Ok(())
}
