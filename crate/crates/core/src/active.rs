//! Narrowing a snapshot to the files running applications actually read.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::{EntryKind, InstanceSnapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveMethod {
    Timestamps,
    AccessEvents,
    /// Offline mode: every entry is passed on.
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveFileReport {
    pub active_paths: BTreeSet<String>,
    pub method: ActiveMethod,
    pub cutoff_time: Option<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ActiveFileReport {
    pub fn contains(&self, path: &str) -> bool {
        self.active_paths.contains(path)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ActiveError {
    #[error("snapshot `{0}` has no access log; use the timestamps method or `none`")]
    MissingAccessLog(String),
    #[error("window must be positive")]
    EmptyWindow,
}

/// Files (not directories) whose atime is at or after `cutoff`.
pub fn active_by_timestamps(snapshot: &InstanceSnapshot, cutoff: i64) -> ActiveFileReport {
    let mut warnings = Vec::new();
    let mut active_paths = BTreeSet::new();
    for entry in snapshot.entries().filter(|e| e.kind != EntryKind::Directory) {
        match entry.atime {
            Some(atime) if atime >= cutoff => {
                active_paths.insert(entry.path.clone());
            }
            Some(_) => {}
            None => {
                log::warn!("{}: no atime, treated as inactive", entry.path);
                warnings.push(format!("{}: no atime, treated as inactive", entry.path));
            }
        }
    }
    ActiveFileReport {
        active_paths,
        method: ActiveMethod::Timestamps,
        cutoff_time: Some(cutoff),
        warnings,
    }
}

/// Paths opened for reading within `window_seconds` of the first logged event
/// (both ends inclusive).
pub fn active_by_events(snapshot: &InstanceSnapshot, window_seconds: u64) -> Result<ActiveFileReport, ActiveError> {
    if window_seconds == 0 {
        return Err(ActiveError::EmptyWindow);
    }
    let log = snapshot
        .access_log()
        .ok_or_else(|| ActiveError::MissingAccessLog(snapshot.instance_id().to_string()))?;
    let active_paths = match log.first() {
        None => BTreeSet::new(),
        Some(first) => {
            let end = first
                .timestamp
                .saturating_add(window_seconds.min(i64::MAX as u64) as i64);
            log.iter()
                .take_while(|e| e.timestamp <= end)
                .filter(|e| e.flags.is_read())
                .map(|e| e.path.clone())
                .collect()
        }
    };
    Ok(ActiveFileReport {
        active_paths,
        method: ActiveMethod::AccessEvents,
        cutoff_time: None,
        warnings: Vec::new(),
    })
}

/// Every entry of the snapshot.
pub fn active_all(snapshot: &InstanceSnapshot) -> ActiveFileReport {
    ActiveFileReport {
        active_paths: snapshot.paths().map(str::to_string).collect(),
        method: ActiveMethod::None,
        cutoff_time: None,
        warnings: Vec::new(),
    }
}

/// Method selection as exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ActiveSelection {
    Timestamps {
        cutoff: Option<i64>,
    },
    Events {
        window_seconds: u64,
    },
    #[default]
    None,
}

impl ActiveSelection {
    /// Timestamp cutoff defaults to the snapshot's reference time.
    pub fn apply(&self, snapshot: &InstanceSnapshot) -> Result<ActiveFileReport, ActiveError> {
        match *self {
            ActiveSelection::Timestamps { cutoff } => Ok(active_by_timestamps(
                snapshot,
                cutoff.unwrap_or(snapshot.reference_time()),
            )),
            ActiveSelection::Events { window_seconds } => active_by_events(snapshot, window_seconds),
            ActiveSelection::None => Ok(active_all(snapshot)),
        }
    }
}
