use std::path::Path;

use super::{AccessEvent, AccessFlags, CorpusError, InstanceSnapshot};

/// Parses the tab-separated access log format: `<epoch>\t<r|w|rw>\t<absolute path>`.
///
/// Blank lines are ignored. Timestamps must be non-decreasing.
pub fn parse_access_log(text: &str) -> Result<Vec<AccessEvent>, CorpusError> {
    let mut events: Vec<AccessEvent> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() {
            continue;
        }
        let err = |message: String| CorpusError::AccessLog { line, message };
        let mut fields = raw.splitn(3, '\t');
        let (Some(ts), Some(flags), Some(path)) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err("expected 3 tab-separated fields".into()));
        };
        let timestamp: i64 = ts.trim().parse().map_err(|_| err(format!("bad timestamp `{ts}`")))?;
        let flags = match flags.trim() {
            "r" => AccessFlags::Read,
            "w" => AccessFlags::Write,
            "rw" => AccessFlags::ReadWrite,
            other => return Err(err(format!("bad flags `{other}`, expected r, w or rw"))),
        };
        if !path.starts_with('/') {
            return Err(err(format!("path `{path}` is not absolute")));
        }
        if let Some(prev) = events.last() {
            if timestamp < prev.timestamp {
                return Err(err(format!(
                    "timestamp {timestamp} is earlier than the previous event ({})",
                    prev.timestamp
                )));
            }
        }
        events.push(AccessEvent {
            timestamp,
            flags,
            path: path.to_string(),
        });
    }
    Ok(events)
}

/// Returns a copy of `snapshot` whose access log is read from `log_path`.
pub fn ingest_access_log(snapshot: &InstanceSnapshot, log_path: &Path) -> Result<InstanceSnapshot, CorpusError> {
    let text = std::fs::read_to_string(log_path).map_err(|e| CorpusError::io(log_path, e))?;
    Ok(snapshot.with_access_log(parse_access_log(&text)?))
}

pub fn render_access_log(events: &[AccessEvent]) -> String {
    events
        .iter()
        .map(|e| format!("{}\t{}\t{}\n", e.timestamp, e.flags.as_str(), e.path))
        .collect()
}
