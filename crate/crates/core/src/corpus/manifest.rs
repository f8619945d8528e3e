//! Labelled file inventories.
//!
//! Grammar (UTF-8, LF or CRLF line endings):
//!
//! ```text
//! manifest := header NL { line NL }
//! header   := "FILERAND-MANIFEST 1"
//! line     := blank | comment | record
//! comment  := "#" any*
//! record   := label TAB type_tag TAB path
//! label    := "encrypted" | "not_encrypted"
//! type_tag := 1*(any except TAB)
//! path     := 1*any                  ; may contain TABs
//! ```
//!
//! Relative paths resolve against the manifest's directory. Comments and
//! blank lines may precede the header.

use std::collections::{BTreeSet, HashSet};
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifier::Verdict;
use crate::error::{Error, Result};

pub const MANIFEST_MAGIC: &str = "FILERAND-MANIFEST";
pub const SCHEMA_VERSION: u32 = 1;
/// Type tags starting with this prefix denote ransomware output.
pub const RANSOMWARE_PREFIX: &str = "RANSOMWARE";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    /// As written in the manifest.
    pub path: PathBuf,
    pub type_tag: String,
    pub label: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub schema_version: u32,
    pub entries: Vec<CorpusEntry>,
    /// Directory relative paths resolve against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_dir: Option<PathBuf>,
}

fn normalize(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in path.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir if matches!(out.components().next_back(), Some(Component::Normal(_))) => {
                out.pop();
            }
            other => out.push(other),
        }
    }
    out
}

impl CorpusManifest {
    /// Builds a manifest, checking the entry invariants.
    pub fn new(entries: Vec<CorpusEntry>, base_dir: Option<PathBuf>) -> Result<Self> {
        let m = Self {
            schema_version: SCHEMA_VERSION,
            entries,
            base_dir,
        };
        let mut seen = HashSet::new();
        for (i, e) in m.entries.iter().enumerate() {
            m.check_entry(e, &mut seen, "<memory>", i + 1)?;
        }
        Ok(m)
    }

    fn check_entry(
        &self,
        e: &CorpusEntry,
        seen: &mut HashSet<PathBuf>,
        source: &str,
        line: usize,
    ) -> Result<()> {
        let fail = |message: String| Error::Validation {
            source_name: source.to_owned(),
            line,
            message,
        };
        if e.type_tag.is_empty() {
            return Err(fail("empty type tag".into()));
        }
        if e.path.as_os_str().is_empty() {
            return Err(fail("empty path".into()));
        }
        if e.type_tag.starts_with(RANSOMWARE_PREFIX) && e.label != Verdict::Encrypted {
            return Err(fail(format!("{} must be labelled encrypted", e.type_tag)));
        }
        if !seen.insert(normalize(&self.resolve(e))) {
            return Err(fail(format!("duplicate path {}", e.path.display())));
        }
        Ok(())
    }

    pub fn parse(text: &str, source: &str, base_dir: Option<PathBuf>) -> Result<Self> {
        let mut m = Self {
            schema_version: 0,
            entries: Vec::new(),
            base_dir,
        };
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let raw = raw.strip_suffix('\r').unwrap_or(raw);
            let raw = if idx == 0 { raw.trim_start_matches('\u{feff}') } else { raw };
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            let fail = |message: String| Error::Validation {
                source_name: source.to_owned(),
                line,
                message,
            };
            if m.schema_version == 0 {
                let version = raw
                    .trim()
                    .strip_prefix(MANIFEST_MAGIC)
                    .map(str::trim)
                    .ok_or_else(|| fail(format!("expected header `{MANIFEST_MAGIC} {SCHEMA_VERSION}`")))?;
                if version != SCHEMA_VERSION.to_string() {
                    return Err(fail(format!("unsupported manifest version {version:?}")));
                }
                m.schema_version = SCHEMA_VERSION;
                continue;
            }
            let mut fields = raw.splitn(3, '\t');
            let (Some(label), Some(type_tag), Some(path)) = (fields.next(), fields.next(), fields.next()) else {
                return Err(fail("expected `label<TAB>type_tag<TAB>path`".into()));
            };
            let label: Verdict = label
                .parse()
                .map_err(|_| fail(format!("label must be encrypted or not_encrypted, found {label:?}")))?;
            let entry = CorpusEntry {
                path: PathBuf::from(path),
                type_tag: type_tag.to_owned(),
                label,
            };
            m.check_entry(&entry, &mut seen, source, line)?;
            m.entries.push(entry);
        }
        if m.schema_version == 0 {
            return Err(Error::Validation {
                source_name: source.to_owned(),
                line: 1,
                message: "missing manifest header".into(),
            });
        }
        Ok(m)
    }

    /// Where the file behind `entry` lives.
    pub fn resolve(&self, entry: &CorpusEntry) -> PathBuf {
        match &self.base_dir {
            Some(dir) if entry.path.is_relative() => dir.join(&entry.path),
            _ => entry.path.clone(),
        }
    }

    pub fn type_tags(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|e| e.type_tag.as_str()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MANIFEST_MAGIC} {}\n", self.schema_version);
        for e in &self.entries {
            out.push_str(&format!("{}\t{}\t{}\n", e.label, e.type_tag, e.path.display()));
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<CorpusManifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    CorpusManifest::parse(&text, &path.display().to_string(), Some(base))
}
