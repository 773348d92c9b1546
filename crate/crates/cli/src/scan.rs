use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::Context;
use confex_core::corpus::{ingest_access_log, ingest_directory, load_snapshot, InstanceSnapshot};
use confex_core::defaults::FORMAT_VERSION;
use confex_core::disambiguate::{write_records, RuleSet};
use confex_core::exec;
use confex_core::pipeline::{extract_instance, ExtractionSummary, Extractor};
use serde::{Deserialize, Serialize};

use crate::config::{parse_cutoff, ActiveMethodArg, DiscoveryFlags, Settings};
use crate::discover::{load_vocabularies, retain_policy};
use crate::output::{usage, write_atomic, write_json, Outcome};

pub const SUMMARY_FILE: &str = "scan_summary.json";
pub const RECORDS_EXT: &str = "records";
pub const PATHS_EXT: &str = "paths";
const ACCESS_LOG_SUFFIX: &str = ".access.log";

#[derive(Debug, clap::Args)]
pub struct ScanArgs {
    /// Instance roots: directory trees, tar archives or saved snapshots.
    inputs: Vec<PathBuf>,
    /// Treat every directory or archive inside this directory as one instance.
    #[arg(long)]
    instances: Vec<PathBuf>,
    /// Output directory for record files and the scan summary.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    discovery: DiscoveryFlags,
    /// How to narrow each snapshot to files in use.
    #[arg(long, value_enum)]
    active_method: Option<ActiveMethodArg>,
    /// Timestamp cutoff (epoch seconds or RFC 3339) [default: snapshot reference time].
    #[arg(long)]
    cutoff: Option<String>,
    /// Access-event window after the first event.
    #[arg(long)]
    window_seconds: Option<u64>,
    /// Directory of `<application>.json` rule sets overriding the built-ins.
    #[arg(long)]
    rule_dir: Option<PathBuf>,
    /// Skip users, groups and manifest records.
    #[arg(long)]
    no_env: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceScan {
    pub instance_id: String,
    pub source: String,
    pub status: InstanceStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<ExtractionSummary>,
    /// Labeled files per application.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labeled_by_application: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub instances: usize,
    pub failed: usize,
    pub files_scanned: usize,
    pub labeled: usize,
    pub parsed: usize,
    pub records: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub format_version: u32,
    pub totals: Totals,
    pub labeled_by_application: BTreeMap<String, usize>,
    pub instances: Vec<InstanceScan>,
}

fn strip_archive_suffix(name: &str) -> &str {
    [".tar.gz", ".tgz", ".tar"]
        .iter()
        .find_map(|s| name.strip_suffix(s))
        .unwrap_or(name)
}

fn instance_name(root: &Path) -> String {
    let name = root
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    strip_archive_suffix(&name).to_string()
}

fn expand_instances(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let read = std::fs::read_dir(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let mut out: Vec<PathBuf> = read
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            if name.starts_with('.') {
                return false;
            }
            p.is_dir() || [".tar", ".tar.gz", ".tgz"].iter().any(|s| name.ends_with(s))
        })
        .collect();
    out.sort();
    Ok(out)
}

/// A saved snapshot, a directory tree or an archive, plus a sibling access log if any.
fn load_instance(root: &Path, settings: &Settings) -> anyhow::Result<InstanceSnapshot> {
    let snapshot = if root.join("manifest.jsonl").is_file() {
        load_snapshot(root)?
    } else {
        ingest_directory(root, &retain_policy(settings))?
    };
    let log = root.with_file_name(format!("{}{ACCESS_LOG_SUFFIX}", instance_name(root)));
    if snapshot.access_log().is_none() && log.is_file() {
        return Ok(ingest_access_log(&snapshot, &log)?);
    }
    Ok(snapshot)
}

fn load_rules(dir: &Path, explicit: bool) -> anyhow::Result<BTreeMap<String, RuleSet>> {
    let mut rules = BTreeMap::new();
    let read = match std::fs::read_dir(dir) {
        Ok(r) => r,
        Err(e) if explicit => return Err(usage(format!("rule directory {}: {e}", dir.display()))),
        Err(_) => return Ok(rules),
    };
    let mut paths: Vec<PathBuf> = read
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    for p in paths {
        let set = RuleSet::load(&p).map_err(|e| usage(e.to_string()))?;
        rules.insert(set.application().to_string(), set);
    }
    Ok(rules)
}

type Scanned = (ExtractionSummary, BTreeMap<String, usize>);

fn scan_one(root: &Path, id: &str, extractor: &Extractor, settings: &Settings, out: &Path) -> anyhow::Result<Scanned> {
    let snapshot = load_instance(root, settings)?;
    let extraction = extract_instance(&snapshot, extractor)?;
    let mut buf = Vec::new();
    write_records(&mut buf, id, &extraction.records)?;
    write_atomic(&out.join(format!("{id}.{RECORDS_EXT}")), &buf)?;
    let paths: String = snapshot.paths().map(|p| format!("{p}\n")).collect();
    write_atomic(&out.join(format!("{id}.{PATHS_EXT}")), paths.as_bytes())?;
    let mut summary = extraction.summary;
    summary.failures.extend(snapshot.warnings().iter().cloned());
    let mut by_app = BTreeMap::new();
    for label in &extraction.labels {
        *by_app.entry(label.label().to_string()).or_insert(0) += 1;
    }
    Ok((summary, by_app))
}

pub fn run(args: ScanArgs, settings: &Settings) -> anyhow::Result<Outcome> {
    let mut settings = settings.clone();
    args.discovery.apply(&mut settings);
    if let Some(m) = args.active_method {
        settings.active_method = m;
    }
    if let Some(c) = &args.cutoff {
        settings.cutoff = Some(parse_cutoff(c)?);
    }
    if let Some(w) = args.window_seconds {
        settings.window_seconds = w;
    }
    if let Some(d) = &args.rule_dir {
        settings.rule_dir = d.clone();
    }
    settings.validate()?;
    if args.inputs.is_empty() && args.instances.is_empty() {
        return Err(usage("nothing to scan: give instance roots or --instances <dir>"));
    }

    let mut roots = args.inputs.clone();
    for dir in &args.instances {
        roots.extend(expand_instances(dir)?);
    }
    let mut seen = BTreeSet::new();
    let named: Vec<(String, PathBuf)> = roots.into_iter().map(|r| (instance_name(&r), r)).collect();
    for (id, root) in &named {
        if id.is_empty() || !seen.insert(id.clone()) {
            return Err(usage(format!(
                "duplicate or empty instance name for {}",
                root.display()
            )));
        }
    }

    let mut extractor = Extractor::new(load_vocabularies(&settings.vocab_dir)?);
    extractor.rules = load_rules(&settings.rule_dir, args.rule_dir.is_some())?;
    extractor.label = settings.label_options();
    extractor.active = settings.active_selection();
    extractor.include_environment = !args.no_env;
    extractor.exec = settings.exec();

    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let results = exec::map(settings.exec(), &named, |(id, root)| {
        let outcome = scan_one(root, id, &extractor, &settings, &args.out);
        let source = root.display().to_string();
        match outcome {
            Ok((summary, by_app)) => InstanceScan {
                instance_id: id.clone(),
                source,
                status: InstanceStatus::Ok,
                summary: Some(summary),
                labeled_by_application: by_app,
                error: None,
            },
            Err(e) => {
                log::error!("{id}: {e:#}");
                InstanceScan {
                    instance_id: id.clone(),
                    source,
                    status: InstanceStatus::Failed,
                    summary: None,
                    labeled_by_application: BTreeMap::new(),
                    error: Some(format!("{e:#}")),
                }
            }
        }
    });

    let mut totals = Totals {
        instances: results.len(),
        ..Totals::default()
    };
    let mut by_app = BTreeMap::new();
    for r in &results {
        match &r.summary {
            Some(s) => {
                totals.files_scanned += s.files_considered;
                totals.labeled += s.labeled;
                totals.parsed += s.parsed;
                totals.records += s.records;
            }
            None => totals.failed += 1,
        }
        for (app, n) in &r.labeled_by_application {
            *by_app.entry(app.clone()).or_insert(0) += n;
        }
    }
    let summary = ScanSummary {
        format_version: FORMAT_VERSION,
        totals,
        labeled_by_application: by_app,
        instances: results,
    };
    write_json(&args.out.join(SUMMARY_FILE), &summary)?;
    let t = &summary.totals;
    println!(
        "scanned {} instance(s): {} file(s) considered, {} labeled, {} parsed, {} record(s), {} failed",
        t.instances, t.files_scanned, t.labeled, t.parsed, t.records, t.failed
    );
    for r in summary.instances.iter().filter(|r| r.status == InstanceStatus::Failed) {
        println!("  failed {}: {}", r.instance_id, r.error.as_deref().unwrap_or(""));
    }
    Ok(Outcome::from_failures(t.failed))
}
