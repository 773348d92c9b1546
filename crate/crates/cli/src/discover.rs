use std::path::{Path, PathBuf};

use anyhow::Context;
use confex_core::corpus::{ingest_directory, RetainPolicy};
use confex_core::discovery::{label_files, Vocabulary};

use crate::config::{DiscoveryFlags, Settings};
use crate::output::{usage, write_atomic, Outcome};

#[derive(Debug, clap::Args)]
pub struct DiscoverArgs {
    /// Directory trees or tar archives to label.
    #[arg(required = true)]
    roots: Vec<PathBuf>,
    #[command(flatten)]
    discovery: DiscoveryFlags,
    /// Print every inspected file, not only labeled ones.
    #[arg(long)]
    all: bool,
    /// Write JSON lines here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Every `*.json` vocabulary in `dir`, ordered by file name.
pub fn load_vocabularies(dir: &Path) -> anyhow::Result<Vec<Vocabulary>> {
    let read = std::fs::read_dir(dir).map_err(|e| usage(format!("vocabulary directory {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = read
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(usage(format!("no vocabularies in {}", dir.display())));
    }
    paths
        .iter()
        .map(|p| Vocabulary::load(p).map_err(|e| usage(e.to_string())))
        .collect()
}

pub fn retain_policy(settings: &Settings) -> RetainPolicy {
    RetainPolicy {
        size_cap: settings.size_cap,
        excluded_extensions: settings.excluded_extensions.clone(),
    }
}

pub fn run(args: DiscoverArgs, settings: &Settings) -> anyhow::Result<Outcome> {
    let mut settings = settings.clone();
    args.discovery.apply(&mut settings);
    settings.validate()?;
    let vocabularies = load_vocabularies(&settings.vocab_dir)?;
    let options = settings.label_options();

    let mut lines = String::new();
    for root in &args.roots {
        let snapshot = ingest_directory(root, &retain_policy(&settings))
            .with_context(|| format!("ingesting {}", root.display()))?;
        let entries: Vec<_> = snapshot.entries().collect();
        for result in label_files(settings.exec(), &entries, &vocabularies, &options) {
            if args.all || result.is_labeled() {
                lines += &serde_json::to_string(&result)?;
                lines.push('\n');
            }
        }
    }
    match &args.out {
        Some(p) => write_atomic(p, lines.as_bytes())?,
        None => print!("{lines}"),
    }
    Ok(Outcome::Success)
}
