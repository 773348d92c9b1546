use std::path::PathBuf;

use anyhow::Context;
use confex_core::discovery::Vocabulary;

use crate::config::Settings;
use crate::output::{usage, write_atomic, Outcome};

#[derive(Debug, clap::Args)]
pub struct TrainArgs {
    /// Application the training files belong to.
    #[arg(long)]
    app: String,
    /// Glob(s) selecting labeled training files.
    #[arg(long = "files", required = true)]
    files: Vec<String>,
    /// Vocabulary file to create or extend [default: <vocab-dir>/<app>.json].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    vocab_dir: Option<PathBuf>,
}

pub fn run(args: TrainArgs, settings: &Settings) -> anyhow::Result<Outcome> {
    let mut paths = Vec::new();
    for pattern in &args.files {
        let matches = glob::glob(pattern).map_err(|e| usage(format!("bad glob `{pattern}`: {e}")))?;
        for m in matches {
            let p = m.with_context(|| format!("expanding `{pattern}`"))?;
            if p.is_file() {
                paths.push(p);
            }
        }
    }
    paths.sort();
    paths.dedup();
    if paths.is_empty() {
        return Err(usage(format!("no training files match {:?}", args.files)));
    }

    let out = args.out.unwrap_or_else(|| {
        args.vocab_dir
            .unwrap_or_else(|| settings.vocab_dir.clone())
            .join(format!("{}.json", args.app))
    });
    let mut vocab = if out.exists() {
        let v = Vocabulary::load(&out)?;
        if v.application() != args.app {
            return Err(usage(format!(
                "{} holds a vocabulary for `{}`, not `{}`",
                out.display(),
                v.application(),
                args.app
            )));
        }
        v
    } else {
        Vocabulary::new(args.app.as_str())
    };

    let mut files = Vec::with_capacity(paths.len());
    for p in &paths {
        let bytes = std::fs::read(p).with_context(|| format!("reading {}", p.display()))?;
        files.push((p.display().to_string(), String::from_utf8_lossy(&bytes).into_owned()));
    }
    let added = vocab.extend(files);
    write_atomic(&out, (vocab.to_json() + "\n").as_bytes())?;
    println!(
        "{}: {added} file set(s) added, {} total, {} keywords -> {}",
        args.app,
        vocab.file_sets().len(),
        vocab.union_set().len(),
        out.display()
    );
    Ok(Outcome::Success)
}
