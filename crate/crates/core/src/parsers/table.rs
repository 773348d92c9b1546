use super::{ConfigFormat, ConfigNode, ConfigTree, SyntaxError};

/// passwd(5) columns.
pub const PASSWD_SCHEMA: &[&str] = &["name", "password", "uid", "gid", "gecos", "home", "shell"];

/// group(5) columns.
pub const GROUP_SCHEMA: &[&str] = &["name", "password", "gid", "members"];

/// Parses an fstab-style table. Each row becomes a node keyed by its first
/// column; the mount options column is split on `,` into flag and `k=v` leaves.
pub fn parse_fstab_table(content: &str) -> Result<ConfigTree, SyntaxError> {
    let mut rows = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let lineno = idx + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = text.split_whitespace().collect();
        if cols.len() < 4 {
            return Err(SyntaxError::new(
                lineno,
                format!("expected at least 4 columns, found {}", cols.len()),
            ));
        }
        if cols.len() > 6 {
            return Err(SyntaxError::new(
                lineno,
                format!("expected at most 6 columns, found {}", cols.len()),
            ));
        }
        let options = cols[3]
            .split(',')
            .filter(|o| !o.is_empty())
            .map(|o| match o.split_once('=') {
                Some((k, v)) => ConfigNode::leaf(k, v),
                None => ConfigNode::new(o, None),
            })
            .collect();
        let mut children = vec![
            ConfigNode::leaf("file", cols[1]),
            ConfigNode::leaf("vfstype", cols[2]),
            ConfigNode::new("options", None).with_children(options),
        ];
        if let Some(dump) = cols.get(4) {
            children.push(ConfigNode::leaf("dump", *dump));
        }
        if let Some(passno) = cols.get(5) {
            children.push(ConfigNode::leaf("passno", *passno));
        }
        rows.push(ConfigNode::new(cols[0], None).with_children(children));
    }
    Ok(ConfigTree::new(ConfigFormat::FstabTable, "", rows))
}

/// Parses a colon-separated table such as `/etc/passwd`. Extra separators in a
/// row are kept inside the last column, so a malformed trailing field is
/// recorded verbatim rather than rejected.
pub fn parse_colon_table(content: &str, schema: &[&str]) -> Result<ConfigTree, SyntaxError> {
    if schema.is_empty() {
        return Err(SyntaxError::new(0, "empty column schema"));
    }
    let mut rows = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.splitn(schema.len(), ':').collect();
        if fields.len() != schema.len() {
            return Err(SyntaxError::new(
                lineno,
                format!("expected {} fields, found {}", schema.len(), fields.len()),
            ));
        }
        let children = schema
            .iter()
            .zip(&fields)
            .map(|(name, value)| ConfigNode::leaf(*name, *value))
            .collect();
        rows.push(ConfigNode::new(fields[0], None).with_children(children));
    }
    Ok(ConfigTree::new(ConfigFormat::ColonTable, "", rows))
}
