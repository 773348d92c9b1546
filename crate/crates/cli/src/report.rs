use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Context;
use confex_core::analysis::{InstanceReport, ViolationKind};

use crate::analyze::REPORT_SUFFIX;
use crate::output::{usage, write_atomic, Outcome};

#[derive(Debug, clap::Args)]
pub struct ReportArgs {
    /// Report directory written by `analyze --out`, or single report files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Only these instances.
    #[arg(long = "instance")]
    instances: Vec<String>,
    /// Write the text here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn render(report: &InstanceReport, out: &mut String) {
    let _ = writeln!(out, "== {}", report.instance_id);
    if report.suspects.is_empty() {
        let _ = writeln!(out, "  no suspects");
    }
    for (i, s) in report.suspects.iter().enumerate() {
        let r = &s.record;
        let _ = writeln!(
            out,
            "  {:>3}. {:.4}  {}:{} = {}  ({}#{})",
            i + 1,
            s.score,
            r.application,
            r.key,
            r.value,
            r.file_path,
            r.entry_ordinal
        );
    }
    for v in &report.violations {
        let what = match &v.kind {
            ViolationKind::Type { value_type } => format!("type {}", value_type.as_str()),
            ViolationKind::Rule { template, .. } => format!("rule {}", template.as_str()),
        };
        let _ = writeln!(
            out,
            "  ! {what}: {}:{} = {} -- {}",
            v.record.application, v.record.key, v.record.value, v.explanation
        );
    }
}

pub fn run(args: ReportArgs) -> anyhow::Result<Outcome> {
    let mut files = Vec::new();
    for input in &args.inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(input)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.to_string_lossy().ends_with(REPORT_SUFFIX))
                .collect();
            found.sort();
            files.extend(found);
        } else if input.is_file() {
            files.push(input.clone());
        } else {
            return Err(usage(format!("{} does not exist", input.display())));
        }
    }
    let mut text = String::new();
    for f in files {
        let raw = std::fs::read_to_string(&f).with_context(|| format!("reading {}", f.display()))?;
        let report: InstanceReport = serde_json::from_str(&raw).map_err(|e| usage(format!("{}: {e}", f.display())))?;
        if report.format_version != confex_core::defaults::FORMAT_VERSION {
            return Err(usage(format!(
                "{}: unsupported format_version {}",
                f.display(),
                report.format_version
            )));
        }
        if args.instances.is_empty() || args.instances.contains(&report.instance_id) {
            render(&report, &mut text);
        }
    }
    match &args.out {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(Outcome::Success)
}
