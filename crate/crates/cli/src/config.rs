//! Settings shared by the commands: defaults, then a TOML file, then flags.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::ValueEnum;
use confex_core::active::ActiveSelection;
use confex_core::analysis::RuleThresholds;
use confex_core::defaults;
use confex_core::discovery::LabelOptions;
use confex_core::exec::Execution;
use serde::Deserialize;

use crate::output::usage;

pub const HOME_ENV: &str = "CONFEX_HOME";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ActiveMethodArg {
    Timestamps,
    Events,
    None,
}

/// Keys accepted in the settings file; all optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSettings {
    vocab_dir: Option<PathBuf>,
    rule_dir: Option<PathBuf>,
    threshold: Option<f64>,
    size_cap: Option<u64>,
    excluded_extensions: Option<Vec<String>>,
    syntax_check: Option<bool>,
    active_method: Option<ActiveMethodArg>,
    cutoff: Option<String>,
    window_seconds: Option<u64>,
    entropy_threshold: Option<f64>,
    support_min: Option<f64>,
    confidence_min: Option<f64>,
    top_n: Option<usize>,
    jobs: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub vocab_dir: PathBuf,
    pub rule_dir: PathBuf,
    pub threshold: f64,
    pub size_cap: u64,
    pub excluded_extensions: BTreeSet<String>,
    pub syntax_check: bool,
    pub active_method: ActiveMethodArg,
    pub cutoff: Option<i64>,
    pub window_seconds: u64,
    pub entropy_threshold: f64,
    pub support_min: f64,
    pub confidence_min: f64,
    pub top_n: usize,
    pub jobs: Option<usize>,
    pub sequential: bool,
}

fn home() -> PathBuf {
    if let Some(h) = std::env::var_os(HOME_ENV) {
        return PathBuf::from(h);
    }
    std::env::var_os("HOME")
        .map(|h| PathBuf::from(h).join(".confex"))
        .unwrap_or_else(|| PathBuf::from(".confex"))
}

impl Default for Settings {
    fn default() -> Self {
        let home = home();
        Self {
            vocab_dir: home.join("vocab"),
            rule_dir: home.join("rules"),
            threshold: defaults::CONFIDENCE_THRESHOLD,
            size_cap: defaults::SIZE_CAP,
            excluded_extensions: defaults::excluded_extensions(),
            syntax_check: true,
            active_method: ActiveMethodArg::None,
            cutoff: None,
            window_seconds: defaults::ACTIVE_WINDOW_SECONDS,
            entropy_threshold: defaults::ENTROPY_THRESHOLD,
            support_min: defaults::SUPPORT_MIN,
            confidence_min: defaults::CONFIDENCE_MIN,
            top_n: defaults::TOP_N,
            jobs: None,
            sequential: false,
        }
    }
}

/// Epoch seconds or an RFC 3339 timestamp.
pub fn parse_cutoff(text: &str) -> anyhow::Result<i64> {
    if let Ok(n) = text.trim().parse::<i64>() {
        return Ok(n);
    }
    chrono::DateTime::parse_from_rfc3339(text.trim())
        .map(|t| t.timestamp())
        .map_err(|e| usage(format!("cutoff `{text}` is neither epoch seconds nor RFC 3339: {e}")))
}

impl Settings {
    /// Explicit file must exist; otherwise `$CONFEX_HOME/config.toml` is used if present.
    pub fn load(explicit: Option<&Path>) -> anyhow::Result<Settings> {
        let path = match explicit {
            Some(p) if !p.is_file() => return Err(usage(format!("config file {} not found", p.display()))),
            Some(p) => Some(p.to_path_buf()),
            None => Some(home().join("config.toml")).filter(|p| p.is_file()),
        };
        let mut s = Settings::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let file: FileSettings = toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            s.apply_file(file)?;
        }
        s.validate()?;
        Ok(s)
    }

    fn apply_file(&mut self, f: FileSettings) -> anyhow::Result<()> {
        macro_rules! take {
            ($($field:ident),*) => { $( if let Some(v) = f.$field { self.$field = v; } )* };
        }
        take!(
            vocab_dir,
            rule_dir,
            threshold,
            size_cap,
            syntax_check,
            active_method,
            window_seconds,
            entropy_threshold,
            support_min,
            confidence_min,
            top_n
        );
        if let Some(exts) = f.excluded_extensions {
            self.excluded_extensions = exts
                .into_iter()
                .map(|e| e.trim_start_matches('.').to_ascii_lowercase())
                .collect();
        }
        if let Some(c) = f.cutoff {
            self.cutoff = Some(parse_cutoff(&c)?);
        }
        if f.jobs.is_some() {
            self.jobs = f.jobs;
        }
        Ok(())
    }

    pub fn with_execution(mut self, jobs: Option<usize>, sequential: bool) -> Settings {
        if jobs.is_some() {
            self.jobs = jobs;
        }
        self.sequential |= sequential;
        self
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        for (name, v) in [
            ("threshold", self.threshold),
            ("support_min", self.support_min),
            ("confidence_min", self.confidence_min),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(usage(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if self.size_cap == 0 {
            return Err(usage("size_cap must be positive"));
        }
        if self.window_seconds == 0 {
            return Err(usage("window_seconds must be positive"));
        }
        if self.entropy_threshold.is_nan() || self.entropy_threshold < 0.0 {
            return Err(usage("entropy_threshold must be non-negative"));
        }
        if self.jobs == Some(0) {
            return Err(usage("jobs must be at least 1"));
        }
        Ok(())
    }

    pub fn exec(&self) -> Execution {
        if self.sequential || self.jobs == Some(1) {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    /// Bounds the global worker pool when `jobs` is set.
    pub fn install_pool(&self) -> anyhow::Result<()> {
        #[cfg(feature = "parallel")]
        if let Some(n) = self.jobs {
            // a second build in the same process is harmless
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Ok(())
    }

    pub fn label_options(&self) -> LabelOptions {
        LabelOptions {
            threshold: self.threshold,
            size_cap: self.size_cap,
            excluded_extensions: self.excluded_extensions.clone(),
            syntax_check: self.syntax_check,
            ..LabelOptions::default()
        }
    }

    pub fn active_selection(&self) -> ActiveSelection {
        match self.active_method {
            ActiveMethodArg::Timestamps => ActiveSelection::Timestamps { cutoff: self.cutoff },
            ActiveMethodArg::Events => ActiveSelection::Events {
                window_seconds: self.window_seconds,
            },
            ActiveMethodArg::None => ActiveSelection::None,
        }
    }

    pub fn rule_thresholds(&self) -> RuleThresholds {
        RuleThresholds {
            support_min: self.support_min,
            confidence_min: self.confidence_min,
        }
    }
}

/// Discovery flags shared by `discover` and `scan`.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct DiscoveryFlags {
    /// Directory of `<application>.json` vocabularies [default: $CONFEX_HOME/vocab].
    #[arg(long)]
    pub vocab_dir: Option<PathBuf>,
    /// Minimum Jaccard similarity for a label.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Files above this many bytes are never inspected.
    #[arg(long)]
    pub size_cap: Option<u64>,
    /// Label on keyword similarity alone, skipping the parser check.
    #[arg(long)]
    pub no_syntax_check: bool,
}

impl DiscoveryFlags {
    pub fn apply(&self, s: &mut Settings) {
        if let Some(d) = &self.vocab_dir {
            s.vocab_dir = d.clone();
        }
        if let Some(t) = self.threshold {
            s.threshold = t;
        }
        if let Some(c) = self.size_cap {
            s.size_cap = c;
        }
        if self.no_syntax_check {
            s.syntax_check = false;
        }
    }
}
