//! End-to-end CLI tests over the compiled binary: exit codes (0 success,
//! 1 usage, 2 data), the full index/run/sweep/eval/ttest/report flow, and
//! the documented refusal and error paths.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tarlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tarlab")).args(args).output().unwrap()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("process exited")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn help_and_version_exit_zero() {
    let help = tarlab(&["--help"]);
    assert_eq!(code(&help), 0, "{}", stderr(&help));
    let text = stdout(&help);
    for sub in ["index", "run", "sweep", "eval", "ttest", "report"] {
        assert!(text.contains(sub), "help misses {sub}: {text}");
    }
    assert_eq!(code(&tarlab(&["--version"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    // No arguments, unknown subcommand, missing --config.
    assert_eq!(code(&tarlab(&[])), 1);
    assert_eq!(code(&tarlab(&["frobnicate"])), 1);
    let missing = tarlab(&["index"]);
    assert_eq!(code(&missing), 1);
    assert!(stderr(&missing).contains("--config"), "{}", stderr(&missing));
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");

    fs::write(&config, "schemas = baseline, nosuch\n").unwrap();
    let unknown_schema = tarlab(&["--config", config.to_str().unwrap(), "index"]);
    assert_eq!(code(&unknown_schema), 1, "{}", stderr(&unknown_schema));
    assert!(stderr(&unknown_schema).contains("nosuch"), "{}", stderr(&unknown_schema));

    fs::write(&config, "frobnicate = 1\n").unwrap();
    assert_eq!(code(&tarlab(&["--config", config.to_str().unwrap(), "index"])), 1);

    let absent = dir.path().join("absent.conf");
    assert_eq!(code(&tarlab(&["--config", absent.to_str().unwrap(), "index"])), 1);

    // Config is fine but lacks the paths the command needs.
    fs::write(&config, "tag = t\n").unwrap();
    let no_paths = tarlab(&["--config", config.to_str().unwrap(), "index"]);
    assert_eq!(code(&no_paths), 1, "{}", stderr(&no_paths));
    assert!(stderr(&no_paths).contains("corpus_dir"), "{}", stderr(&no_paths));
}

struct Demo {
    _dir: tempfile::TempDir,
    config: String,
    root: std::path::PathBuf,
}

fn demo() -> Demo {
    let dir = tempfile::tempdir().unwrap();
    let paths = tarlab::synth::write(dir.path()).unwrap();
    let config = paths.config_path.to_str().unwrap().to_string();
    let root = dir.path().to_path_buf();
    Demo { _dir: dir, config, root }
}

#[test]
fn full_pipeline_succeeds_end_to_end() {
    let demo = demo();
    let cfg = demo.config.as_str();
    let out = demo.root.join("out");

    let index = tarlab(&["--config", cfg, "index"]);
    assert_eq!(code(&index), 0, "{}", stderr(&index));
    assert_eq!(stdout(&index).lines().count(), 5);

    // A rerun over existing indexes refuses without --force.
    let again = tarlab(&["--config", cfg, "index"]);
    assert_eq!(code(&again), 2, "{}", stderr(&again));
    assert!(stderr(&again).contains("--force"), "{}", stderr(&again));
    let forced = tarlab(&["--config", cfg, "--force", "index"]);
    assert_eq!(code(&forced), 0, "{}", stderr(&forced));

    let run = tarlab(&["--config", cfg, "--jobs", "2", "run"]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    assert_eq!(stdout(&run).lines().count(), 25);
    assert!(out.join("bm25.2+MHLMTA.title&query2.run").is_file());

    // Sweep needs sweep keys in the config.
    let unswept = tarlab(&["--config", cfg, "sweep"]);
    assert_eq!(code(&unswept), 1, "{}", stderr(&unswept));
    let sweep_cfg = demo.root.join("sweep.conf");
    let mut text = fs::read_to_string(cfg).unwrap();
    text.push_str("variants = title&query2\nsweep_axis = k1\nsweep_values = 1.0, 1.2\n");
    fs::write(&sweep_cfg, text).unwrap();
    let sweep = tarlab(&["--config", sweep_cfg.to_str().unwrap(), "sweep"]);
    assert_eq!(code(&sweep), 0, "{}", stderr(&sweep));
    assert_eq!(stdout(&sweep).lines().count(), 10);
    // The default sweep cell reproduces the plain run byte for byte.
    let plain = fs::read(out.join("bm25.baseline.title&query2.run")).unwrap();
    let cell = fs::read(out.join("bm25.baseline.title&query2.k11.2.run")).unwrap();
    assert_eq!(plain, cell);

    let eval = tarlab(&["--config", cfg, "eval"]);
    assert_eq!(code(&eval), 0, "{}", stderr(&eval));
    assert_eq!(stdout(&eval).lines().count(), 35, "{}", stdout(&eval));
    assert!(out.join("bm25.baseline.title.eval").is_file());
    assert!(out.join("bm25.baseline.title.eval.csv").is_file());

    let run_a = out.join("bm25.baseline.title.run");
    let run_b = out.join("bm25.2+MHLMTA.title.run");
    let ttest = tarlab(&[
        "--config",
        cfg,
        "ttest",
        run_a.to_str().unwrap(),
        run_b.to_str().unwrap(),
    ]);
    assert_eq!(code(&ttest), 0, "{}", stderr(&ttest));
    let ttest_out = stdout(&ttest);
    assert!(ttest_out.contains("n=12"), "{ttest_out}");
    assert!(ttest_out.contains("marker="), "{ttest_out}");

    let report = tarlab(&["--config", cfg, "report"]);
    assert_eq!(code(&report), 0, "{}", stderr(&report));
    let table = fs::read_to_string(out.join("bm25.map.csv")).unwrap();
    assert!(table.starts_with("variant,baseline,1+AJY,2+MHL,2+MTA,2+MHLMTA\n"), "{table}");
    assert_eq!(table.lines().count(), 6);
    assert!(out.join("bm25.map.md").is_file());
    assert!(out.join("bm25.k1.title&query2.map.plotdata").is_file());
}

#[test]
fn data_errors_exit_two() {
    let demo = demo();
    let cfg = demo.config.as_str();

    // Run before index: the index directories are missing.
    let premature = tarlab(&["--config", cfg, "run"]);
    assert_eq!(code(&premature), 2, "{}", stderr(&premature));

    let index = tarlab(&["--config", cfg, "index"]);
    assert_eq!(code(&index), 0, "{}", stderr(&index));

    // Tampered postings fail the checksum.
    let postings = demo.root.join("indexes").join("baseline").join("postings");
    let mut bytes = fs::read(&postings).unwrap();
    bytes.push(b'x');
    fs::write(&postings, bytes).unwrap();
    let tampered = tarlab(&["--config", cfg, "run"]);
    assert_eq!(code(&tampered), 2, "{}", stderr(&tampered));
    assert!(stderr(&tampered).contains("checksum"), "{}", stderr(&tampered));
    let restore = tarlab(&["--config", cfg, "--force", "index"]);
    assert_eq!(code(&restore), 0);

    // Empty topics directory.
    let empty = demo.root.join("no_topics");
    fs::create_dir_all(&empty).unwrap();
    let text: String = fs::read_to_string(cfg)
        .unwrap()
        .lines()
        .map(|l| {
            if l.starts_with("topics_dir") {
                format!("topics_dir = {}\n", empty.display())
            } else {
                format!("{l}\n")
            }
        })
        .collect();
    let empty_cfg = demo.root.join("empty_topics.conf");
    fs::write(&empty_cfg, text).unwrap();
    let no_topics = tarlab(&["--config", empty_cfg.to_str().unwrap(), "run"]);
    assert_eq!(code(&no_topics), 2, "{}", stderr(&no_topics));
    assert!(stderr(&no_topics).contains("no files"), "{}", stderr(&no_topics));

    // Corrupt qrels.
    let run = tarlab(&["--config", cfg, "run"]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    fs::write(demo.root.join("qrels.txt"), "CD0001 0 123\n").unwrap();
    let bad_qrels = tarlab(&["--config", cfg, "eval"]);
    assert_eq!(code(&bad_qrels), 2, "{}", stderr(&bad_qrels));

    // Eval with no runs anywhere.
    let fresh = demo.root.join("fresh_out");
    fs::create_dir_all(&fresh).unwrap();
    let text: String = fs::read_to_string(cfg)
        .unwrap()
        .lines()
        .map(|l| {
            if l.starts_with("output_dir") {
                format!("output_dir = {}\n", fresh.display())
            } else if l.starts_with("qrels_path") {
                format!("qrels_path = {}\n", demo.root.join("qrels2.txt").display())
            } else {
                format!("{l}\n")
            }
        })
        .collect();
    fs::write(demo.root.join("qrels2.txt"), "CD0001 0 123 1\n").unwrap();
    let no_runs_cfg = demo.root.join("no_runs.conf");
    fs::write(&no_runs_cfg, text).unwrap();
    let no_runs = tarlab(&["--config", no_runs_cfg.to_str().unwrap(), "eval"]);
    assert_eq!(code(&no_runs), 2, "{}", stderr(&no_runs));
}

#[test]
fn report_re_renders_an_external_matrix() {
    let demo = demo();
    let cfg = demo.config.as_str();
    let table = Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("table1_map.csv");
    let report =
        tarlab(&["--config", cfg, "report", "--from-csv", table.to_str().unwrap()]);
    assert_eq!(code(&report), 0, "{}", stderr(&report));
    let out = demo.root.join("out");
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(csv, fs::read_to_string(&table).unwrap());
    let md = fs::read_to_string(out.join("report.md")).unwrap();
    assert!(md.contains("| 0.1197 ++ |"), "{md}");
    assert!(md.contains("| 0.135 + |"), "{md}");
    let plotdata = fs::read_to_string(out.join("report.plotdata")).unwrap();
    assert_eq!(plotdata.lines().count(), 25);
    assert!(plotdata.contains("title,2+MHL,0.135\n"), "{plotdata}");
}
