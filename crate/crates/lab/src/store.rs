//! On-disk index directories: `meta`, `docs`, `postings` from the core
//! format plus a `checksums` file. Writes go to a temp directory and land
//! by rename.

use sha2::{Digest, Sha256};
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use tarlab_core::index::{parse as parse_index_files, render as render_index_files, IndexFiles, ParseError};
use tarlab_core::Index;

const INDEX_FILES: [&str; 3] = ["meta", "docs", "postings"];

#[derive(Debug)]
pub enum StoreError {
    /// Target directory already holds an index and --force was not given.
    AlreadyExists { dir: PathBuf },
    MissingFile { path: PathBuf },
    ChecksumMismatch { file: String },
    VersionMismatch { found: u32, expected: u32 },
    Malformed { file: String, line: usize, reason: String },
    Io { path: PathBuf, source: std::io::Error },
}

impl fmt::Display for StoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StoreError::AlreadyExists { dir } => {
                write!(f, "{} already holds an index (use --force to rebuild)", dir.display())
            }
            StoreError::MissingFile { path } => write!(f, "missing file {}", path.display()),
            StoreError::ChecksumMismatch { file } => {
                write!(f, "checksum mismatch in {file}")
            }
            StoreError::VersionMismatch { found, expected } => {
                write!(f, "index format version {found}, this build reads {expected}")
            }
            StoreError::Malformed { file, line, reason } => {
                write!(f, "{file} line {line}: {reason}")
            }
            StoreError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for StoreError {}

impl From<ParseError> for StoreError {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::VersionMismatch { found, expected } => {
                StoreError::VersionMismatch { found, expected }
            }
            ParseError::Malformed { file, line, reason } => {
                StoreError::Malformed { file: file.to_string(), line, reason }
            }
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// True when the directory already holds an index (a `meta` file exists).
pub fn index_exists(dir: &Path) -> bool {
    dir.join("meta").is_file()
}

/// Writes the index under `dir` atomically: the files appear in a `.tmp`
/// sibling first and the completed directory is renamed into place, so a
/// failed build never leaves a partial index behind.
pub fn write_index(dir: &Path, index: &Index, force: bool) -> Result<(), StoreError> {
    if index_exists(dir) {
        if !force {
            return Err(StoreError::AlreadyExists { dir: dir.to_path_buf() });
        }
        fs::remove_dir_all(dir).map_err(io_err(dir))?;
    }
    let tmp = dir.with_extension("tmp");
    if tmp.exists() {
        fs::remove_dir_all(&tmp).map_err(io_err(&tmp))?;
    }
    fs::create_dir_all(&tmp).map_err(io_err(&tmp))?;
    let result = (|| {
        let files = render_index_files(index);
        let mut checksums = String::new();
        for (name, content) in
            INDEX_FILES.iter().zip([&files.meta, &files.docs, &files.postings])
        {
            let path = tmp.join(name);
            fs::write(&path, content).map_err(io_err(&path))?;
            checksums.push_str(&format!("{}  {name}\n", sha256_hex(content.as_bytes())));
        }
        let checksums_path = tmp.join("checksums");
        fs::write(&checksums_path, &checksums).map_err(io_err(&checksums_path))?;
        fs::rename(&tmp, dir).map_err(io_err(dir))
    })();
    if result.is_err() {
        let _ = fs::remove_dir_all(&tmp);
    }
    result
}

fn read_file(dir: &Path, name: &str) -> Result<String, StoreError> {
    let path = dir.join(name);
    if !path.is_file() {
        return Err(StoreError::MissingFile { path });
    }
    fs::read_to_string(&path).map_err(io_err(&path))
}

/// Reads and verifies an index directory: every file must be present,
/// match its recorded checksum, and parse under the current format version.
pub fn read_index(dir: &Path) -> Result<Index, StoreError> {
    let checksums = read_file(dir, "checksums")?;
    let mut recorded = std::collections::BTreeMap::new();
    for (i, line) in checksums.lines().enumerate() {
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next()) {
            (Some(hex), Some(name)) if parts.next().is_none() => {
                recorded.insert(name.to_string(), hex.to_string());
            }
            _ => {
                return Err(StoreError::Malformed {
                    file: "checksums".to_string(),
                    line: i + 1,
                    reason: "expected \"<sha256>  <file>\"".to_string(),
                })
            }
        }
    }
    let mut contents = Vec::with_capacity(INDEX_FILES.len());
    for name in INDEX_FILES {
        let content = read_file(dir, name)?;
        let expected = recorded.get(name).ok_or_else(|| StoreError::Malformed {
            file: "checksums".to_string(),
            line: 0,
            reason: format!("no checksum recorded for {name}"),
        })?;
        if sha256_hex(content.as_bytes()) != *expected {
            return Err(StoreError::ChecksumMismatch { file: name.to_string() });
        }
        contents.push(content);
    }
    let mut it = contents.into_iter();
    let files = IndexFiles {
        meta: it.next().unwrap(),
        docs: it.next().unwrap(),
        postings: it.next().unwrap(),
    };
    Ok(parse_index_files(&files)?)
}

/// Writes `content` to `path` through a temp file in the same directory,
/// renamed into place once fully written.
pub fn write_atomic(path: &Path, content: &str) -> Result<(), StoreError> {
    let parent = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(parent).map_err(io_err(parent))?;
    let file_name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| StoreError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other("path has no file name"),
        })?;
    let tmp = parent.join(format!(".{file_name}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(content.as_bytes()).map_err(io_err(&tmp))?;
    f.sync_all().map_err(io_err(&tmp))?;
    drop(f);
    fs::rename(&tmp, path).map_err(io_err(path))
}
