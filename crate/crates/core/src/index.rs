//! On-disk dedupe index: one `<digest> <scheme id>` line per normal form.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("index line {line}: {message}")]
    Corrupt { line: usize, message: String },
}

/// Append-only map from normal-form digest (lowercase hex) to the id of the
/// first scheme recorded with that normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DedupeIndex {
    entries: BTreeMap<String, String>,
}

fn is_digest(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}

impl DedupeIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self, IndexError> {
        let mut entries = BTreeMap::new();
        let corrupt = |line: usize, message: &str| IndexError::Corrupt { line, message: message.to_string() };
        if !text.is_empty() && !text.ends_with('\n') {
            return Err(corrupt(text.lines().count(), "truncated line"));
        }
        for (k, line) in text.lines().enumerate() {
            let Some((digest, id)) = line.split_once(' ') else {
                return Err(corrupt(k + 1, "missing scheme id"));
            };
            if !is_digest(digest) {
                return Err(corrupt(k + 1, "bad digest"));
            }
            if id.is_empty() {
                return Err(corrupt(k + 1, "empty scheme id"));
            }
            if entries.insert(digest.to_string(), id.to_string()).is_some() {
                return Err(corrupt(k + 1, "duplicate digest"));
            }
        }
        Ok(DedupeIndex { entries })
    }

    /// Loads an index; a missing file is an empty index.
    pub fn load(path: &Path) -> Result<Self, IndexError> {
        match fs::read_to_string(path) {
            Ok(text) => Self::parse(&text),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Self::new()),
            Err(e) if e.kind() == io::ErrorKind::InvalidData => {
                Err(IndexError::Corrupt { line: 0, message: "not valid UTF-8".into() })
            }
            Err(e) => Err(e.into()),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, digest: &str) -> Option<&str> {
        self.entries.get(digest).map(String::as_str)
    }

    /// Records `id` under `digest` unless the digest is already known.
    /// Returns whether an entry was added.
    pub fn insert(&mut self, digest: &str, id: &str) -> bool {
        assert!(is_digest(digest), "not a digest: {digest}");
        assert!(!id.is_empty() && !id.contains('\n'), "bad scheme id");
        if self.entries.contains_key(digest) {
            return false;
        }
        self.entries.insert(digest.to_string(), id.to_string());
        true
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(d, i)| (d.as_str(), i.as_str()))
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(d, i)| format!("{d} {i}\n")).collect()
    }

    /// Writes through a sibling temporary file and a rename, so readers never
    /// see a partial index.
    pub fn save(&self, path: &Path) -> io::Result<()> {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("index");
        let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(self.to_text().as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path).inspect_err(|_| {
            let _ = fs::remove_file(&tmp);
        })
    }
}
