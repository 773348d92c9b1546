//! On-disk snapshot archive: `manifest.jsonl` (a header line followed by one
//! entry object per line), gzip-compressed contents under `content/` named by
//! the SHA-256 of the entry path, and an optional `access.log`.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::access_log::{parse_access_log, render_access_log};
use super::{CorpusError, FileEntry, InstanceSnapshot, SnapshotBuilder};
use crate::defaults::FORMAT_VERSION;

const MANIFEST: &str = "manifest.jsonl";
const ACCESS_LOG: &str = "access.log";
const CONTENT_DIR: &str = "content";

#[derive(Serialize, Deserialize)]
struct Header {
    format_version: u32,
    instance_id: String,
    reference_time: i64,
    #[serde(default)]
    warnings: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct StoredEntry {
    #[serde(flatten)]
    entry: FileEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    content_key: Option<String>,
}

fn content_key(path: &str) -> String {
    hex::encode(Sha256::digest(path.as_bytes()))
}

pub fn save_snapshot(snapshot: &InstanceSnapshot, dir: &Path) -> Result<(), CorpusError> {
    let content_dir = dir.join(CONTENT_DIR);
    fs::create_dir_all(&content_dir).map_err(|e| CorpusError::io(&content_dir, e))?;
    let manifest_path = dir.join(MANIFEST);
    let file = File::create(&manifest_path).map_err(|e| CorpusError::io(&manifest_path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| CorpusError::io(&manifest_path, e);

    let header = Header {
        format_version: FORMAT_VERSION,
        instance_id: snapshot.instance_id().to_string(),
        reference_time: snapshot.reference_time(),
        warnings: snapshot.warnings().to_vec(),
    };
    writeln!(out, "{}", serde_json::to_string(&header).expect("serializable")).map_err(io)?;
    for entry in snapshot.entries() {
        let key = entry.content.as_ref().map(|bytes| {
            let key = content_key(&entry.path);
            let blob = content_dir.join(format!("{key}.gz"));
            let write = || -> std::io::Result<()> {
                let mut enc = GzEncoder::new(File::create(&blob)?, Compression::default());
                enc.write_all(bytes)?;
                enc.finish()?;
                Ok(())
            };
            write().map_err(|e| CorpusError::io(&blob, e)).map(|_| key)
        });
        let content_key = key.transpose()?;
        let stored = StoredEntry {
            entry: FileEntry {
                content: None,
                ..entry.clone()
            },
            content_key,
        };
        writeln!(out, "{}", serde_json::to_string(&stored).expect("serializable")).map_err(io)?;
    }
    out.flush().map_err(io)?;
    if let Some(events) = snapshot.access_log() {
        let log = dir.join(ACCESS_LOG);
        fs::write(&log, render_access_log(events)).map_err(|e| CorpusError::io(&log, e))?;
    }
    Ok(())
}

pub fn load_snapshot(dir: &Path) -> Result<InstanceSnapshot, CorpusError> {
    let manifest_path = dir.join(MANIFEST);
    let file = File::open(&manifest_path).map_err(|e| CorpusError::io(&manifest_path, e))?;
    let mut lines = BufReader::new(file).lines();
    let bad = |line: usize, message: String| CorpusError::Manifest { line, message };

    let first = lines
        .next()
        .ok_or_else(|| bad(1, "empty manifest".into()))?
        .map_err(|e| CorpusError::io(&manifest_path, e))?;
    let header: Header = serde_json::from_str(&first).map_err(|e| bad(1, e.to_string()))?;
    if header.format_version != FORMAT_VERSION {
        return Err(bad(
            1,
            format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                header.format_version
            ),
        ));
    }
    let mut builder = SnapshotBuilder::new(header.instance_id);
    builder.reference_time(header.reference_time);
    for w in header.warnings {
        builder.warnings.push(w);
    }
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line.map_err(|e| CorpusError::io(&manifest_path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let stored: StoredEntry = serde_json::from_str(&line).map_err(|e| bad(lineno, e.to_string()))?;
        let mut entry = stored.entry;
        if let Some(key) = stored.content_key {
            let blob = dir.join(CONTENT_DIR).join(format!("{key}.gz"));
            let mut bytes = Vec::new();
            File::open(&blob)
                .and_then(|f| GzDecoder::new(f).read_to_end(&mut bytes))
                .map_err(|e| CorpusError::io(&blob, e))?;
            entry.content = Some(bytes);
        }
        builder.insert(entry)?;
    }
    let log = dir.join(ACCESS_LOG);
    if log.exists() {
        let text = fs::read_to_string(&log).map_err(|e| CorpusError::io(&log, e))?;
        builder.access_log(parse_access_log(&text)?);
    }
    Ok(builder.build())
}
