//! Read-only filesystem snapshots of cloud instances and images.

mod access_log;
mod ingest;
mod store;

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::defaults;

pub use access_log::{ingest_access_log, parse_access_log, render_access_log};
pub use ingest::{ingest_directory, ingest_layers, ingest_tar};
pub use store::{load_snapshot, save_snapshot};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} is neither a directory nor a tar archive")]
    UnsupportedRoot(PathBuf),
    #[error("access log line {line}: {message}")]
    AccessLog { line: usize, message: String },
    #[error("snapshot manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("invalid entry {path}: {message}")]
    InvalidEntry { path: String, message: String },
}

impl CorpusError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.into(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    File,
    Directory,
    Symlink,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub kind: EntryKind,
    pub size_bytes: u64,
    pub mtime: i64,
    /// `None` when the source could not supply an access time.
    pub atime: Option<i64>,
    pub mode_bits: u32,
    pub owner_uid: u32,
    pub owner_gid: u32,
    #[serde(skip)]
    pub content: Option<Vec<u8>>,
}

impl FileEntry {
    /// A regular file with retained content and default metadata.
    pub fn text_file(path: impl Into<String>, content: impl Into<Vec<u8>>) -> Self {
        let content = content.into();
        Self {
            path: path.into(),
            kind: EntryKind::File,
            size_bytes: content.len() as u64,
            mtime: 0,
            atime: Some(0),
            mode_bits: 0o644,
            owner_uid: 0,
            owner_gid: 0,
            content: Some(content),
        }
    }

    /// A metadata-only entry.
    pub fn metadata_only(path: impl Into<String>, kind: EntryKind, size_bytes: u64) -> Self {
        Self {
            path: path.into(),
            kind,
            size_bytes,
            mtime: 0,
            atime: Some(0),
            mode_bits: if kind == EntryKind::Directory { 0o755 } else { 0o644 },
            owner_uid: 0,
            owner_gid: 0,
            content: None,
        }
    }

    pub fn with_times(mut self, mtime: i64, atime: Option<i64>) -> Self {
        self.mtime = mtime;
        self.atime = atime;
        self
    }

    pub fn with_owner(mut self, mode_bits: u32, uid: u32, gid: u32) -> Self {
        self.mode_bits = mode_bits;
        self.owner_uid = uid;
        self.owner_gid = gid;
        self
    }

    /// Decoded content, if retained.
    pub fn text(&self) -> Option<Cow<'_, str>> {
        self.content.as_deref().map(crate::parsers::decode_text)
    }

    /// Lower-cased final extension of the path, without the dot.
    pub fn extension(&self) -> Option<String> {
        extension_of(&self.path)
    }

    fn validate(&self) -> Result<(), CorpusError> {
        if !self.path.starts_with('/') {
            return Err(CorpusError::InvalidEntry {
                path: self.path.clone(),
                message: "path is not absolute".into(),
            });
        }
        if let Some(content) = &self.content {
            if content.len() as u64 != self.size_bytes {
                return Err(CorpusError::InvalidEntry {
                    path: self.path.clone(),
                    message: format!(
                        "size_bytes {} disagrees with content length {}",
                        self.size_bytes,
                        content.len()
                    ),
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn extension_of(path: &str) -> Option<String> {
    let name = path.rsplit('/').next().unwrap_or(path);
    let (stem, ext) = name.rsplit_once('.')?;
    if stem.is_empty() || ext.is_empty() {
        return None;
    }
    Some(ext.to_ascii_lowercase())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessFlags {
    Read,
    Write,
    ReadWrite,
}

impl AccessFlags {
    pub fn is_read(self) -> bool {
        matches!(self, AccessFlags::Read | AccessFlags::ReadWrite)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AccessFlags::Read => "r",
            AccessFlags::Write => "w",
            AccessFlags::ReadWrite => "rw",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessEvent {
    pub timestamp: i64,
    pub flags: AccessFlags,
    pub path: String,
}

/// Immutable view of one instance's filesystem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSnapshot {
    instance_id: String,
    entries: BTreeMap<String, FileEntry>,
    access_log: Option<Vec<AccessEvent>>,
    reference_time: i64,
    warnings: Vec<String>,
}

impl InstanceSnapshot {
    pub fn instance_id(&self) -> &str {
        &self.instance_id
    }

    pub fn entries(&self) -> impl Iterator<Item = &FileEntry> {
        self.entries.values()
    }

    pub fn entry(&self, path: &str) -> Option<&FileEntry> {
        self.entries.get(path)
    }

    pub fn contains(&self, path: &str) -> bool {
        self.entries.contains_key(path)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn access_log(&self) -> Option<&[AccessEvent]> {
        self.access_log.as_deref()
    }

    pub fn reference_time(&self) -> i64 {
        self.reference_time
    }

    /// Non-fatal problems recorded during ingestion.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Copy of this snapshot carrying `events` as its access log.
    pub fn with_access_log(&self, events: Vec<AccessEvent>) -> InstanceSnapshot {
        let mut next = self.clone();
        next.access_log = Some(events);
        next
    }

    /// Copy of this snapshot with a different reference time (e.g. last restart).
    pub fn with_reference_time(&self, reference_time: i64) -> InstanceSnapshot {
        let mut next = self.clone();
        next.reference_time = reference_time;
        next
    }

    /// Sum of retained content lengths.
    pub fn retained_bytes(&self) -> u64 {
        self.entries
            .values()
            .filter_map(|e| e.content.as_ref())
            .map(|c| c.len() as u64)
            .sum()
    }
}

/// Accumulates entries for a snapshot; later inserts replace earlier ones.
#[derive(Debug, Clone)]
pub struct SnapshotBuilder {
    instance_id: String,
    entries: BTreeMap<String, FileEntry>,
    access_log: Option<Vec<AccessEvent>>,
    reference_time: Option<i64>,
    warnings: Vec<String>,
}

impl SnapshotBuilder {
    pub fn new(instance_id: impl Into<String>) -> Self {
        Self {
            instance_id: instance_id.into(),
            entries: BTreeMap::new(),
            access_log: None,
            reference_time: None,
            warnings: Vec::new(),
        }
    }

    pub fn insert(&mut self, entry: FileEntry) -> Result<&mut Self, CorpusError> {
        entry.validate()?;
        self.entries.insert(entry.path.clone(), entry);
        Ok(self)
    }

    pub fn remove(&mut self, path: &str) {
        self.entries.remove(path);
    }

    pub fn remove_tree(&mut self, prefix: &str) {
        let dir = format!("{}/", prefix.trim_end_matches('/'));
        self.entries.retain(|p, _| p != prefix && !p.starts_with(&dir));
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        let message = message.into();
        log::warn!("{}: {}", self.instance_id, message);
        self.warnings.push(message);
    }

    pub fn access_log(&mut self, events: Vec<AccessEvent>) -> &mut Self {
        self.access_log = Some(events);
        self
    }

    pub fn reference_time(&mut self, t: i64) -> &mut Self {
        self.reference_time = Some(t);
        self
    }

    pub fn build(self) -> InstanceSnapshot {
        InstanceSnapshot {
            instance_id: self.instance_id,
            entries: self.entries,
            access_log: self.access_log,
            reference_time: self.reference_time.unwrap_or_else(now_epoch),
            warnings: self.warnings,
        }
    }
}

pub(crate) fn now_epoch() -> i64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs() as i64)
        .unwrap_or(0)
}

/// Heuristic text detection: no NUL byte in the first 8KB and at least 95% of
/// those bytes printable or whitespace (bytes >= 0x80 count as printable).
pub fn is_text(bytes: &[u8]) -> bool {
    let head = &bytes[..bytes.len().min(defaults::TEXT_SNIFF_BYTES)];
    if head.is_empty() {
        return true;
    }
    if head.contains(&0) {
        return false;
    }
    let printable = head
        .iter()
        .filter(|&&b| matches!(b, b'\t' | b'\n' | b'\r' | 0x0c) || (0x20..0x7f).contains(&b) || b >= 0x80)
        .count();
    printable as f64 >= defaults::TEXT_PRINTABLE_FRACTION * head.len() as f64
}

/// Decides which files keep their content during ingestion.
#[derive(Debug, Clone, PartialEq)]
pub struct RetainPolicy {
    pub size_cap: u64,
    pub excluded_extensions: BTreeSet<String>,
}

impl Default for RetainPolicy {
    fn default() -> Self {
        Self {
            size_cap: defaults::SIZE_CAP,
            excluded_extensions: defaults::excluded_extensions(),
        }
    }
}

impl RetainPolicy {
    /// Checks that need only the path and size.
    pub fn admits(&self, path: &str, size: u64) -> bool {
        size <= self.size_cap && !self.is_excluded(path)
    }

    pub fn is_excluded(&self, path: &str) -> bool {
        extension_of(path).is_some_and(|e| self.excluded_extensions.contains(&e))
    }

    pub fn retains(&self, path: &str, content: &[u8]) -> bool {
        self.admits(path, content.len() as u64) && is_text(content)
    }
}
