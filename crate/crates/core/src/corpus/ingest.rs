use std::fs::File;
use std::io::Read;
use std::os::unix::fs::MetadataExt;
use std::path::{Component, Path};

use flate2::read::GzDecoder;

use super::{CorpusError, EntryKind, FileEntry, InstanceSnapshot, RetainPolicy, SnapshotBuilder};

const WHITEOUT_PREFIX: &str = ".wh.";

/// Ingests a directory tree (or a tar archive, when `root` is a file) into a snapshot.
///
/// Unreadable files are recorded as metadata-only entries with a warning.
/// Symlinks are recorded but never followed.
pub fn ingest_directory(root: &Path, policy: &RetainPolicy) -> Result<InstanceSnapshot, CorpusError> {
    let id = instance_id_for(root);
    ingest_layers(&id, &[root], policy)
}

/// Ingests a tar (optionally gzip-compressed) archive.
pub fn ingest_tar(archive: &Path, policy: &RetainPolicy) -> Result<InstanceSnapshot, CorpusError> {
    let mut builder = SnapshotBuilder::new(instance_id_for(archive));
    ingest_tar_into(&mut builder, archive, policy)?;
    Ok(builder.build())
}

/// Flattens several layers (directories or archives) into one snapshot,
/// later layers overriding earlier ones path by path. `.wh.<name>` whiteout
/// markers delete `<name>` from the lower layers.
pub fn ingest_layers<P: AsRef<Path>>(
    instance_id: &str,
    layers: &[P],
    policy: &RetainPolicy,
) -> Result<InstanceSnapshot, CorpusError> {
    let mut builder = SnapshotBuilder::new(instance_id);
    for layer in layers {
        let layer = layer.as_ref();
        let meta = std::fs::metadata(layer).map_err(|e| CorpusError::io(layer, e))?;
        if meta.is_dir() {
            ingest_dir_into(&mut builder, layer, policy)?;
        } else if meta.is_file() {
            ingest_tar_into(&mut builder, layer, policy)?;
        } else {
            return Err(CorpusError::UnsupportedRoot(layer.to_path_buf()));
        }
    }
    Ok(builder.build())
}

fn instance_id_for(root: &Path) -> String {
    let name = root
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".to_string());
    for suffix in [".tar.gz", ".tgz", ".tar"] {
        if let Some(stem) = name.strip_suffix(suffix) {
            return stem.to_string();
        }
    }
    name
}

/// Converts a path relative to the layer root into an absolute snapshot path.
fn snapshot_path(relative: &Path) -> Option<String> {
    let mut parts = Vec::new();
    for comp in relative.components() {
        match comp {
            Component::Normal(p) => parts.push(p.to_string_lossy().into_owned()),
            Component::CurDir | Component::RootDir => {}
            Component::ParentDir => {
                parts.pop()?;
            }
            Component::Prefix(_) => return None,
        }
    }
    if parts.is_empty() {
        return None;
    }
    Some(format!("/{}", parts.join("/")))
}

/// Handles a whiteout marker; returns true if `path` was one.
fn apply_whiteout(builder: &mut SnapshotBuilder, path: &str) -> bool {
    let (parent, name) = path.rsplit_once('/').unwrap_or(("", path));
    match name.strip_prefix(WHITEOUT_PREFIX) {
        Some(target) if !target.is_empty() && !target.starts_with(".wh.") => {
            builder.remove_tree(&format!("{parent}/{target}"));
            true
        }
        Some(_) => true,
        None => false,
    }
}

fn read_capped(reader: impl Read, cap: u64) -> std::io::Result<Vec<u8>> {
    let mut buf = Vec::new();
    reader.take(cap + 1).read_to_end(&mut buf)?;
    Ok(buf)
}

fn ingest_dir_into(builder: &mut SnapshotBuilder, root: &Path, policy: &RetainPolicy) -> Result<(), CorpusError> {
    // surface an unreadable root as a hard error before walking
    std::fs::read_dir(root).map_err(|e| CorpusError::io(root, e))?;
    let walker = walkdir::WalkDir::new(root)
        .follow_links(false)
        .min_depth(1)
        .sort_by_file_name();
    for item in walker {
        let item = match item {
            Ok(item) => item,
            Err(err) => {
                builder.warn(format!("skipping unreadable path: {err}"));
                continue;
            }
        };
        let Ok(rel) = item.path().strip_prefix(root) else {
            continue;
        };
        let Some(path) = snapshot_path(rel) else { continue };
        if apply_whiteout(builder, &path) {
            continue;
        }
        let meta = match item.path().symlink_metadata() {
            Ok(m) => m,
            Err(err) => {
                builder.warn(format!("{path}: cannot stat: {err}"));
                continue;
            }
        };
        let kind = if meta.file_type().is_symlink() {
            EntryKind::Symlink
        } else if meta.is_dir() {
            EntryKind::Directory
        } else {
            EntryKind::File
        };
        let mut entry = FileEntry::metadata_only(path.clone(), kind, meta.len())
            .with_times(meta.mtime(), Some(meta.atime()))
            .with_owner(meta.mode() & 0o7777, meta.uid(), meta.gid());
        if kind == EntryKind::Directory {
            entry.size_bytes = 0;
        }
        if kind == EntryKind::File && policy.admits(&path, meta.len()) {
            match File::open(item.path()).and_then(|f| read_capped(f, policy.size_cap)) {
                Ok(bytes) => {
                    if policy.retains(&path, &bytes) {
                        entry.size_bytes = bytes.len() as u64;
                        entry.content = Some(bytes);
                    }
                }
                Err(err) => builder.warn(format!("{path}: unreadable, keeping metadata only: {err}")),
            }
        }
        builder.insert(entry)?;
    }
    Ok(())
}

fn ingest_tar_into(builder: &mut SnapshotBuilder, archive: &Path, policy: &RetainPolicy) -> Result<(), CorpusError> {
    let file = File::open(archive).map_err(|e| CorpusError::io(archive, e))?;
    let name = archive.to_string_lossy();
    let reader: Box<dyn Read> = if name.ends_with(".gz") || name.ends_with(".tgz") {
        Box::new(GzDecoder::new(file))
    } else {
        Box::new(file)
    };
    let mut tar = tar::Archive::new(reader);
    let entries = tar.entries().map_err(|e| CorpusError::io(archive, e))?;
    let mut any = false;
    for item in entries {
        let mut item = item.map_err(|e| CorpusError::io(archive, e))?;
        any = true;
        let header = item.header().clone();
        let rel = match item.path() {
            Ok(p) => p.into_owned(),
            Err(err) => {
                builder.warn(format!("skipping entry with unreadable name: {err}"));
                continue;
            }
        };
        let Some(path) = snapshot_path(&rel) else { continue };
        if apply_whiteout(builder, &path) {
            continue;
        }
        let entry_type = header.entry_type();
        let kind = if entry_type.is_dir() {
            EntryKind::Directory
        } else if entry_type.is_symlink() || entry_type.is_hard_link() {
            EntryKind::Symlink
        } else if entry_type.is_file() {
            EntryKind::File
        } else {
            continue;
        };
        let size = header.size().unwrap_or(0);
        let mtime = header.mtime().unwrap_or(0) as i64;
        let atime = header.as_gnu().and_then(|g| g.atime().ok()).map(|t| t as i64);
        let mut entry = FileEntry::metadata_only(path.clone(), kind, if kind == EntryKind::File { size } else { 0 })
            .with_times(mtime, atime)
            .with_owner(
                header.mode().unwrap_or(0) & 0o7777,
                header.uid().unwrap_or(0) as u32,
                header.gid().unwrap_or(0) as u32,
            );
        if kind == EntryKind::File && policy.admits(&path, size) {
            match read_capped(&mut item, policy.size_cap) {
                Ok(bytes) => {
                    if policy.retains(&path, &bytes) {
                        entry.size_bytes = bytes.len() as u64;
                        entry.content = Some(bytes);
                    }
                }
                Err(err) => builder.warn(format!("{path}: unreadable, keeping metadata only: {err}")),
            }
        }
        add_parents(builder, &path)?;
        builder.insert(entry)?;
    }
    if !any {
        log::debug!("{}: archive has no entries", archive.display());
    }
    Ok(())
}

/// Tar listings need not contain every parent directory; add the missing ones.
fn add_parents(builder: &mut SnapshotBuilder, path: &str) -> Result<(), CorpusError> {
    let mut parent = path;
    while let Some((head, _)) = parent.rsplit_once('/') {
        if head.is_empty() {
            break;
        }
        if !builder.has(head) {
            builder.insert(FileEntry::metadata_only(head, EntryKind::Directory, 0))?;
        }
        parent = head;
    }
    Ok(())
}

impl SnapshotBuilder {
    pub(crate) fn has(&self, path: &str) -> bool {
        self.entries.contains_key(path)
    }
}
