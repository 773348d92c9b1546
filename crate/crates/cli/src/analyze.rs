use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::Context;
use confex_core::analysis::{AnalysisError, AnalysisModel, InstanceRecords, KnownPaths, PathOracle};
use confex_core::defaults::FORMAT_VERSION;
use confex_core::disambiguate::read_records;
use confex_core::exec;
use serde::{Deserialize, Serialize};

use crate::config::Settings;
use crate::output::{usage, write_json, Outcome};
use crate::scan::{PATHS_EXT, RECORDS_EXT};

pub const SUMMARY_FILE: &str = "analysis_summary.json";
pub const REPORT_SUFFIX: &str = ".report.json";

#[derive(Debug, clap::Args)]
pub struct AnalyzeArgs {
    /// Record directory (as written by `scan`) the model is learned from.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Record directory of instances to check against the model.
    #[arg(long)]
    targets: Option<PathBuf>,
    /// Use a saved model instead of learning one.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Save the learned model here.
    #[arg(long)]
    save_model: Option<PathBuf>,
    /// Check every corpus instance against the model of all the others.
    #[arg(long)]
    leave_one_out: bool,
    /// Restrict the checked instances to these ids.
    #[arg(long = "instance")]
    instances: Vec<String>,
    /// Suspects kept per report.
    #[arg(long)]
    top_n: Option<usize>,
    #[arg(long)]
    entropy_threshold: Option<f64>,
    #[arg(long)]
    support_min: Option<f64>,
    #[arg(long)]
    confidence_min: Option<f64>,
    /// Report directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelStats {
    pub instances: usize,
    pub keys: usize,
    pub types: usize,
    pub rules: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportLine {
    pub instance_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_suspect: Option<String>,
    pub suspects: usize,
    pub violations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSummary {
    pub format_version: u32,
    pub leave_one_out: bool,
    pub model: ModelStats,
    pub reports: Vec<ReportLine>,
}

/// One record file plus, when present, the instance's path listing.
pub struct LoadedInstance {
    pub records: InstanceRecords,
    pub paths: Option<Vec<String>>,
}

impl LoadedInstance {
    fn oracle(&self) -> Option<KnownPaths> {
        self.paths.as_ref().map(|p| p.iter().collect())
    }
}

fn read_instance(records_file: &Path) -> anyhow::Result<LoadedInstance> {
    let text = std::fs::read(records_file).with_context(|| format!("reading {}", records_file.display()))?;
    let (id, records) = read_records(text.as_slice()).with_context(|| format!("{}", records_file.display()))?;
    let paths_file = records_file.with_extension(PATHS_EXT);
    let paths = match std::fs::read_to_string(&paths_file) {
        Ok(t) => Some(t.lines().filter(|l| !l.is_empty()).map(str::to_string).collect()),
        Err(_) => None,
    };
    Ok(LoadedInstance {
        records: InstanceRecords::new(id, records),
        paths,
    })
}

fn record_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let read = std::fs::read_dir(dir).map_err(|e| usage(format!("record directory {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = read
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == RECORDS_EXT))
        .collect();
    files.sort();
    Ok(files)
}

fn analysis_error(e: AnalysisError) -> anyhow::Error {
    match e {
        AnalysisError::Version { .. } | AnalysisError::Format(_) | AnalysisError::EmptyCorpus => usage(e.to_string()),
        other => other.into(),
    }
}

pub fn run(args: AnalyzeArgs, settings: &Settings) -> anyhow::Result<Outcome> {
    let mut settings = settings.clone();
    macro_rules! over {
        ($($f:ident),*) => { $( if let Some(v) = args.$f { settings.$f = v; } )* };
    }
    over!(top_n, entropy_threshold, support_min, confidence_min);
    settings.validate()?;
    if args.leave_one_out && args.corpus.is_none() {
        return Err(usage("--leave-one-out needs --corpus"));
    }
    if args.leave_one_out && args.model.is_some() {
        return Err(usage("--leave-one-out learns its own model; drop --model"));
    }
    if !args.leave_one_out && args.targets.is_none() && args.save_model.is_none() {
        return Err(usage("nothing to do: give --targets, --leave-one-out or --save-model"));
    }

    let corpus: Vec<LoadedInstance> = match &args.corpus {
        Some(dir) => record_files(dir)?
            .iter()
            .map(|f| read_instance(f).map_err(|e| usage(format!("{e:#}"))))
            .collect::<anyhow::Result<_>>()?,
        None => Vec::new(),
    };
    let mut ids = BTreeSet::new();
    for inst in &corpus {
        if !ids.insert(inst.records.instance_id.clone()) {
            return Err(usage(format!(
                "instance `{}` appears twice in the corpus",
                inst.records.instance_id
            )));
        }
    }

    let model = match (&args.model, args.corpus.is_some()) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            AnalysisModel::from_json(&text).map_err(analysis_error)?
        }
        (None, true) => {
            let mut known = KnownPaths::new();
            for inst in &corpus {
                for p in inst.paths.iter().flatten() {
                    known.insert(p);
                }
            }
            let records: Vec<InstanceRecords> = corpus.iter().map(|i| i.records.clone()).collect();
            AnalysisModel::build(
                settings.exec(),
                &records,
                &known,
                settings.entropy_threshold,
                settings.rule_thresholds(),
            )
            .map_err(analysis_error)?
        }
        (None, false) => {
            log::warn!("no corpus or model given; every record scores 0");
            AnalysisModel::empty()
        }
    };
    if let Some(path) = &args.save_model {
        crate::output::write_atomic(path, (model.to_json() + "\n").as_bytes())?;
    }

    // (target, loaded-or-error)
    let targets: Vec<(String, anyhow::Result<LoadedInstance>)> = if args.leave_one_out {
        corpus
            .into_iter()
            .map(|i| (i.records.instance_id.clone(), Ok(i)))
            .collect()
    } else if let Some(dir) = &args.targets {
        record_files(dir)?
            .into_iter()
            .map(|f| {
                let stem = f
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                (stem, read_instance(&f))
            })
            .collect()
    } else {
        Vec::new()
    };
    let wanted: BTreeSet<&str> = args.instances.iter().map(String::as_str).collect();
    let targets: Vec<_> = targets
        .into_iter()
        .filter(|(id, _)| wanted.is_empty() || wanted.contains(id.as_str()))
        .collect();

    let out = args.out.clone();
    let top_n = settings.top_n;
    let lines = exec::map(settings.exec(), &targets, |(id, loaded)| {
        let result = loaded.as_ref().map_err(|e| anyhow::anyhow!("{e:#}")).and_then(|inst| {
            let oracle = inst.oracle();
            let paths = oracle.as_ref().map(|p| p as &dyn PathOracle);
            let report = if args.leave_one_out {
                let mut m = model.clone();
                m.histograms = model.histograms.without(&inst.records);
                m.report(&inst.records, paths, top_n)
            } else {
                model.report(&inst.records, paths, top_n)
            }?;
            if let Some(dir) = &out {
                write_json(
                    &dir.join(format!("{}{REPORT_SUFFIX}", inst.records.instance_id)),
                    &report,
                )?;
            }
            Ok(report)
        });
        match result {
            Ok(r) => ReportLine {
                instance_id: r.instance_id.clone(),
                top_suspect: r
                    .suspects
                    .first()
                    .map(|s| format!("{}:{} = {}", s.record.application, s.record.key, s.record.value)),
                suspects: r.suspects.len(),
                violations: r.violations.len(),
                error: None,
            },
            Err(e) => {
                log::error!("{id}: {e:#}");
                ReportLine {
                    instance_id: id.clone(),
                    top_suspect: None,
                    suspects: 0,
                    violations: 0,
                    error: Some(format!("{e:#}")),
                }
            }
        }
    });

    let failed = lines.iter().filter(|l| l.error.is_some()).count();
    let summary = AnalysisSummary {
        format_version: FORMAT_VERSION,
        leave_one_out: args.leave_one_out,
        model: ModelStats {
            instances: model.histograms.instances.len(),
            keys: model.histograms.len(),
            types: model.types.len(),
            rules: model.rules.len(),
        },
        reports: lines,
    };
    if let Some(dir) = &args.out {
        write_json(&dir.join(SUMMARY_FILE), &summary)?;
    }
    println!(
        "model: {} instance(s), {} key(s), {} type(s), {} rule(s); {} report(s), {} failed",
        summary.model.instances,
        summary.model.keys,
        summary.model.types,
        summary.model.rules,
        summary.reports.len(),
        failed
    );
    for l in &summary.reports {
        match (&l.error, &l.top_suspect) {
            (Some(e), _) => println!("  {}: failed: {e}", l.instance_id),
            (None, Some(top)) => println!("  {}: top suspect {top}; {} violation(s)", l.instance_id, l.violations),
            (None, None) => println!("  {}: no records", l.instance_id),
        }
    }
    Ok(Outcome::from_failures(failed))
}
