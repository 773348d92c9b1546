//! Default pipeline parameters.

/// Minimum keyword-set similarity for a file to be labeled.
pub const CONFIDENCE_THRESHOLD: f64 = 0.9;

/// Files larger than this are never inspected (bytes).
pub const SIZE_CAP: u64 = 200 * 1024;

/// Extensions of files that are never configuration files.
pub const EXCLUDED_EXTENSIONS: &[&str] = &["h", "c", "cpp", "js", "css", "md", "md5sums", "html", "svg"];

/// Access-event window anchored at the first logged event (seconds).
pub const ACTIVE_WINDOW_SECONDS: u64 = 10;

/// Minimum Shannon entropy (bits) of a key's value distribution for type inference.
pub const ENTROPY_THRESHOLD: f64 = 0.5;

pub const SUPPORT_MIN: f64 = 0.10;
pub const CONFIDENCE_MIN: f64 = 0.90;

/// Number of suspects kept per report.
pub const TOP_N: usize = 10;

/// Bytes examined by the text-file heuristic.
pub const TEXT_SNIFF_BYTES: usize = 8 * 1024;

/// Minimum fraction of printable or whitespace bytes for a text file.
pub const TEXT_PRINTABLE_FRACTION: f64 = 0.95;

/// Version stamped into every persisted artifact.
pub const FORMAT_VERSION: u32 = 1;

pub fn excluded_extensions() -> std::collections::BTreeSet<String> {
    EXCLUDED_EXTENSIONS.iter().map(|e| e.to_string()).collect()
}
