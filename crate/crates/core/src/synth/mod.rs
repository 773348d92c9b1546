//! Deterministic synthetic corpora with ground truth: instances carrying
//! planted configuration files (at standard and non-standard paths), decoy
//! text files, an access log with matching atimes, and optionally one
//! injected misconfiguration per flagged instance.

mod decoys;
mod doc;
mod templates;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    render_access_log, AccessEvent, AccessFlags, EntryKind, FileEntry, InstanceSnapshot, SnapshotBuilder,
};
use crate::defaults::{ACTIVE_WINDOW_SECONDS, FORMAT_VERSION};
use crate::envdata::MANIFEST_PATH;
use crate::exec::{self, Execution};

pub use decoys::DecoyKind;
pub use doc::{outlier_value, Doc};
pub use templates::{Family, FAMILIES};

use templates::{nonstandard_name, Ctx, NONSTANDARD_DIRS};

/// Boot time of every generated instance; atimes at or after it mark files
/// read since boot.
pub const BOOT_TIME: i64 = 1_700_000_000;

/// Image build time: every file's mtime, and the atime of untouched files.
pub const BUILD_TIME: i64 = BOOT_TIME - 30 * 86_400;

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("invalid profile setting `{0}`: {1}")]
    Profile(String, String),
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
}

/// Shape of a generated corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub instances: usize,
    /// Planted (active) configuration files per instance, each of a distinct family.
    pub files_per_instance: usize,
    /// Fraction of planted files placed outside default installation paths.
    pub nonstandard: f64,
    /// Text decoys per instance, on top of the fixed system files.
    pub decoys: usize,
    /// Binaries, excluded-extension and oversize files per instance.
    pub filtered: usize,
    /// Unread copies of an instance's configuration at template locations.
    pub passive: usize,
    /// Fraction of instances receiving exactly one injected outlier value.
    pub inject: f64,
}

impl Default for Profile {
    fn default() -> Self {
        Self {
            instances: 20,
            files_per_instance: 3,
            nonstandard: 0.45,
            decoys: 28,
            filtered: 3,
            passive: 0,
            inject: 0.0,
        }
    }
}

impl Profile {
    /// The discovery benchmark: 200 instances, 600 planted files, about 6,000 decoys.
    pub fn discovery() -> Self {
        Self {
            instances: 200,
            ..Self::default()
        }
    }

    /// Configuration only, for statistical analysis experiments.
    pub fn analysis(instances: usize) -> Self {
        Self {
            instances,
            nonstandard: 0.0,
            decoys: 0,
            filtered: 0,
            ..Self::default()
        }
    }

    /// Applies `key=value` pairs separated by commas, e.g. `nonstandard=0.5,instances=10`.
    pub fn with_overrides(mut self, overrides: &str) -> Result<Self, SynthError> {
        for pair in overrides.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| SynthError::Profile(pair.into(), "expected key=value".into()))?;
            let bad = |e: &dyn std::fmt::Display| SynthError::Profile(pair.into(), e.to_string());
            let count = || v.trim().parse::<usize>().map_err(|e| bad(&e));
            let fraction = || {
                let f = v.trim().parse::<f64>().map_err(|e| bad(&e))?;
                if (0.0..=1.0).contains(&f) {
                    Ok(f)
                } else {
                    Err(bad(&"must be within [0, 1]"))
                }
            };
            match k.trim() {
                "instances" => self.instances = count()?,
                "files" | "files_per_instance" => self.files_per_instance = count()?,
                "nonstandard" => self.nonstandard = fraction()?,
                "decoys" => self.decoys = count()?,
                "filtered" => self.filtered = count()?,
                "passive" => self.passive = count()?,
                "inject" => self.inject = fraction()?,
                other => return Err(SynthError::Profile(other.into(), "unknown setting".into())),
            }
        }
        if self.files_per_instance > FAMILIES.len() {
            return Err(SynthError::Profile(
                "files_per_instance".into(),
                format!("at most {} families exist", FAMILIES.len()),
            ));
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedFile {
    pub path: String,
    pub application: String,
    pub family: String,
    /// Matches a default installation path of its application.
    pub standard: bool,
    /// Read by the application at boot (passive templates are not).
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Injection {
    pub path: String,
    pub application: String,
    /// 1-based line of the altered setting.
    pub line: usize,
    pub original: String,
    pub injected: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceTruth {
    pub instance_id: String,
    pub planted: Vec<PlantedFile>,
    pub text_decoys: usize,
    pub filtered_decoys: usize,
    /// Paths opened for reading within the boot window.
    pub window_reads: BTreeSet<String>,
    /// Snapshot files read at any point since boot (atime ≥ boot time).
    pub touched: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub injection: Option<Injection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationManifest {
    pub format_version: u32,
    pub seed: u64,
    pub profile: Profile,
    pub boot_time: i64,
    pub window_seconds: u64,
    pub instances: Vec<InstanceTruth>,
}

impl GenerationManifest {
    pub fn planted(&self) -> impl Iterator<Item = (&str, &PlantedFile)> {
        self.instances
            .iter()
            .flat_map(|t| t.planted.iter().map(move |p| (t.instance_id.as_str(), p)))
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedCorpus {
    pub manifest: GenerationManifest,
    pub snapshots: Vec<InstanceSnapshot>,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn instance_id(index: usize) -> String {
    format!("inst-{index:04}")
}

struct Draft {
    host: String,
    files: Vec<(&'static Family, Doc)>,
    dirs: BTreeSet<String>,
    touch: BTreeSet<String>,
}

fn draft_instance(seed: u64, index: usize, profile: &Profile) -> Draft {
    let mut rng = rng_for(seed, 3 * index as u64 + 1);
    let host = format!("web-{index:04}.example.com");
    let mut order: Vec<usize> = (0..FAMILIES.len()).collect();
    order.shuffle(&mut rng);
    order.truncate(profile.files_per_instance);
    order.sort_unstable();
    let mut ctx = Ctx::new(&mut rng, host.clone());
    let files = order
        .into_iter()
        .map(|i| {
            let family = &FAMILIES[i];
            (family, (family.render)(&mut ctx))
        })
        .collect();
    let (dirs, touch) = (ctx.dirs, ctx.touch);
    Draft {
        host,
        files,
        dirs,
        touch,
    }
}

fn site_name(rng: &mut ChaCha8Rng) -> &'static str {
    const SITES: &[&str] = &["app", "site", "shop", "api", "portal", "blog", "wiki", "status"];
    SITES[rng.random_range(0..SITES.len())]
}

fn standard_path(family: &Family, rng: &mut ChaCha8Rng) -> String {
    family.standard_path.replace("{n}", site_name(rng))
}

fn nonstandard_path(family: &Family, rng: &mut ChaCha8Rng, taken: &BTreeSet<String>) -> String {
    loop {
        let dir = NONSTANDARD_DIRS[rng.random_range(0..NONSTANDARD_DIRS.len())].replace("{n}", site_name(rng));
        let name = nonstandard_name(family.application, family.name, rng);
        let path = format!("{}/{name}", dir.trim_end_matches('/'));
        if !taken.contains(&path) {
            return path;
        }
    }
}

/// Picks an injectable setting in `target` and overwrites it with a value
/// found nowhere else in the corpus. Settings whose value no other instance
/// shares (host names and the like) are never chosen: for them every value is
/// already an outlier.
fn inject(drafts: &mut [Draft], target: usize, rng: &mut ChaCha8Rng) -> Option<(usize, Injection)> {
    let mut all_values: BTreeSet<String> = BTreeSet::new();
    let mut sharing: BTreeMap<(&str, usize, String), BTreeSet<usize>> = BTreeMap::new();
    for (i, d) in drafts.iter().enumerate() {
        for (family, doc) in &d.files {
            for s in 0..doc.slot_count() {
                let v = doc.slot_value(s).0.to_string();
                all_values.insert(v.clone());
                sharing.entry((family.name, s, v)).or_default().insert(i);
            }
        }
    }
    let mut candidates = Vec::new();
    for (f, (family, doc)) in drafts[target].files.iter().enumerate() {
        for s in 0..doc.slot_count() {
            let v = doc.slot_value(s).0.to_string();
            if sharing[&(family.name, s, v)].len() >= 2 {
                candidates.push((f, s));
            }
        }
    }
    let &(f, s) = candidates.get(rng.random_range(0..candidates.len().max(1)))?;
    let (family, doc) = &mut drafts[target].files[f];
    let (original, line) = {
        let (v, l) = doc.slot_value(s);
        (v.to_string(), l)
    };
    let injected = (0..)
        .map(|attempt| outlier_value(&original, attempt))
        .find(|v| !all_values.contains(v))
        .expect("outlier attempts are unbounded");
    doc.replace_slot(s, &injected);
    Some((
        f,
        Injection {
            path: String::new(),
            application: family.application.to_string(),
            line,
            original,
            injected,
        },
    ))
}

fn passive_path(family: &Family, k: usize) -> String {
    format!("/usr/share/{}/templates/{}-{k}.sample", family.application, family.name)
}

fn environment_manifest(host: &str, index: usize, draft: &Draft) -> String {
    let mut ports: BTreeSet<u16> = BTreeSet::new();
    for (family, _) in &draft.files {
        ports.insert(match family.application {
            "mysql" => 3306,
            _ => 80,
        });
    }
    let value = serde_json::json!({
        "env": {
            "HOSTNAME": host,
            "PATH": "/usr/local/sbin:/usr/local/bin:/usr/sbin:/usr/bin:/sbin:/bin",
            "LANG": "C.UTF-8",
        },
        "addresses": [format!("172.17.{}.{}", index / 250, 2 + index % 250)],
        "ports": ports,
    });
    serde_json::to_string_pretty(&value).expect("serializable")
}

/// Boot: system files, then every active configuration file, inside the
/// window; log writes inside it; later reads and pseudo-files after it.
fn access_log(
    rng: &mut ChaCha8Rng,
    active_configs: &[String],
    later_reads: &[String],
    write_targets: &[String],
) -> Vec<AccessEvent> {
    let window = ACTIVE_WINDOW_SECONDS as i64;
    let ev = |t: i64, flags, path: &str| AccessEvent {
        timestamp: t,
        flags,
        path: path.to_string(),
    };
    let mut events = vec![
        ev(BOOT_TIME, AccessFlags::Read, "/etc/ld.so.cache"),
        ev(BOOT_TIME, AccessFlags::Read, "/etc/passwd"),
        ev(BOOT_TIME, AccessFlags::Read, "/etc/group"),
        ev(BOOT_TIME + 1, AccessFlags::Read, "/etc/hosts"),
    ];
    for path in active_configs {
        events.push(ev(BOOT_TIME + rng.random_range(1..window), AccessFlags::Read, path));
    }
    for path in write_targets {
        events.push(ev(BOOT_TIME + rng.random_range(2..=window), AccessFlags::Write, path));
    }
    for path in later_reads {
        events.push(ev(
            BOOT_TIME + window + rng.random_range(1..3600),
            AccessFlags::Read,
            path,
        ));
    }
    events.push(ev(BOOT_TIME + window + 1, AccessFlags::Read, "/proc/self/status"));
    events.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.path.cmp(&b.path)));
    events
}

fn assemble(seed: u64, index: usize, draft: &Draft, truth: &mut InstanceTruth, profile: &Profile) -> InstanceSnapshot {
    let mut rng = rng_for(seed, 3 * index as u64 + 2);
    let mut files: BTreeMap<String, Vec<u8>> = BTreeMap::new();
    let mut taken: BTreeSet<String> = truth.planted.iter().map(|p| p.path.clone()).collect();

    for (p, (_, doc)) in truth.planted.iter().zip(&draft.files) {
        files.insert(p.path.clone(), doc.render().into_bytes());
    }
    for k in 0..profile.passive {
        let (family, doc) = &draft.files[k % draft.files.len()];
        let path = passive_path(family, k);
        taken.insert(path.clone());
        files.insert(path.clone(), doc.render().into_bytes());
        truth.planted.push(PlantedFile {
            path,
            application: family.application.into(),
            family: family.name.into(),
            standard: false,
            active: false,
        });
    }
    for (path, text) in decoys::system_files(&mut rng, &draft.host) {
        taken.insert(path.clone());
        files.insert(path, text.into_bytes());
    }
    let manifest = environment_manifest(&draft.host, index, draft);
    taken.insert(MANIFEST_PATH.to_string());
    files.insert(MANIFEST_PATH.to_string(), manifest.into_bytes());
    for path in &draft.touch {
        taken.insert(path.clone());
        files.entry(path.clone()).or_default();
    }

    let decoys = decoys::decoys(&mut rng, &mut taken, profile.decoys, profile.filtered);
    truth.text_decoys = decoys.iter().filter(|d| d.kind == DecoyKind::Text).count();
    truth.filtered_decoys = decoys.len() - truth.text_decoys;
    let logs: Vec<String> = decoys
        .iter()
        .filter(|d| d.kind == DecoyKind::Text && d.path.ends_with(".log"))
        .map(|d| d.path.clone())
        .collect();
    let readers: Vec<String> = decoys
        .iter()
        .filter(|d| d.kind == DecoyKind::Text && !d.path.ends_with(".log"))
        .take(2)
        .map(|d| d.path.clone())
        .collect();
    for d in decoys {
        files.insert(d.path, d.content);
    }

    let active: Vec<String> = truth
        .planted
        .iter()
        .filter(|p| p.active)
        .map(|p| p.path.clone())
        .collect();
    let events = access_log(&mut rng, &active, &readers, &logs);
    let mut atime: BTreeMap<&str, i64> = BTreeMap::new();
    for e in events.iter().filter(|e| e.flags.is_read()) {
        if files.contains_key(&e.path) {
            atime.entry(&e.path).or_insert(e.timestamp);
        }
    }
    let end = BOOT_TIME + ACTIVE_WINDOW_SECONDS as i64;
    truth.window_reads = events
        .iter()
        .filter(|e| e.flags.is_read() && e.timestamp <= end)
        .map(|e| e.path.clone())
        .collect();
    truth.touched = atime.keys().map(|p| p.to_string()).collect();

    let mut b = SnapshotBuilder::new(truth.instance_id.clone());
    b.reference_time(BOOT_TIME);
    let mut dirs: BTreeSet<String> = draft.dirs.clone();
    for path in files.keys() {
        let mut p = path.as_str();
        while let Some((parent, _)) = p.rsplit_once('/') {
            if parent.is_empty() {
                break;
            }
            dirs.insert(parent.to_string());
            p = parent;
        }
    }
    for dir in dirs {
        b.insert(FileEntry::metadata_only(dir, EntryKind::Directory, 0).with_times(BUILD_TIME, Some(BUILD_TIME)))
            .expect("generated paths are absolute");
    }
    for (path, content) in files {
        let a = atime.get(path.as_str()).copied().unwrap_or(BUILD_TIME);
        let size = content.len() as u64;
        let mut entry = FileEntry::text_file(path, content).with_times(BUILD_TIME, Some(a));
        if size > crate::defaults::SIZE_CAP {
            // as ingestion would have kept it: metadata only
            entry.content = None;
        }
        b.insert(entry.with_owner(0o644, 0, 0))
            .expect("generated paths are absolute");
    }
    b.access_log(events);
    b.build()
}

/// Generates a corpus; identical `seed` and `profile` give identical output
/// regardless of `exec`.
pub fn generate(seed: u64, profile: &Profile, exec: Execution) -> GeneratedCorpus {
    let mut drafts = exec::map_range(exec, profile.instances, |i| draft_instance(seed, i, profile));
    // separate streams so that injecting never moves files around
    let mut rng = rng_for(seed, 0);
    let mut inject_rng = rng_for(seed, u64::MAX - 2);

    let mut flagged: Vec<usize> = (0..profile.instances).collect();
    flagged.shuffle(&mut inject_rng);
    flagged.truncate((profile.inject * profile.instances as f64).round() as usize);
    flagged.sort_unstable();
    let mut injections: BTreeMap<usize, (usize, Injection)> = BTreeMap::new();
    for &i in &flagged {
        if let Some(found) = inject(&mut drafts, i, &mut inject_rng) {
            injections.insert(i, found);
        }
    }

    let total: usize = drafts.iter().map(|d| d.files.len()).sum();
    let mut slots: Vec<(usize, usize)> = drafts
        .iter()
        .enumerate()
        .flat_map(|(i, d)| (0..d.files.len()).map(move |f| (i, f)))
        .collect();
    slots.shuffle(&mut rng);
    let nonstandard: BTreeSet<(usize, usize)> = slots
        .into_iter()
        .take((profile.nonstandard * total as f64).round() as usize)
        .collect();

    let mut truths: Vec<InstanceTruth> = Vec::with_capacity(drafts.len());
    for (i, d) in drafts.iter().enumerate() {
        let mut taken = BTreeSet::new();
        let mut planted = Vec::new();
        for (f, (family, _)) in d.files.iter().enumerate() {
            let standard = !nonstandard.contains(&(i, f));
            let path = if standard {
                standard_path(family, &mut rng)
            } else {
                nonstandard_path(family, &mut rng, &taken)
            };
            taken.insert(path.clone());
            planted.push(PlantedFile {
                path,
                application: family.application.into(),
                family: family.name.into(),
                standard,
                active: true,
            });
        }
        let injection = injections.remove(&i).map(|(f, mut inj)| {
            inj.path = planted[f].path.clone();
            inj
        });
        truths.push(InstanceTruth {
            instance_id: instance_id(i),
            planted,
            text_decoys: 0,
            filtered_decoys: 0,
            window_reads: BTreeSet::new(),
            touched: BTreeSet::new(),
            injection,
        });
    }

    let indices: Vec<usize> = (0..drafts.len()).collect();
    let built = exec::map(exec, &indices, |&i| {
        let mut truth = truths[i].clone();
        let snap = assemble(seed, i, &drafts[i], &mut truth, profile);
        (truth, snap)
    });
    let (instances, snapshots) = built.into_iter().unzip();
    GeneratedCorpus {
        manifest: GenerationManifest {
            format_version: FORMAT_VERSION,
            seed,
            profile: profile.clone(),
            boot_time: BOOT_TIME,
            window_seconds: ACTIVE_WINDOW_SECONDS,
            instances,
        },
        snapshots,
    }
}

/// Known-good training files: `per_family` renderings of every family, from
/// a stream disjoint from any corpus generated with the same seed.
pub fn training_files(seed: u64, per_family: usize) -> BTreeMap<String, Vec<(String, String)>> {
    let mut rng = rng_for(seed, u64::MAX);
    let mut out: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
    for family in &FAMILIES {
        for k in 0..per_family {
            let mut ctx = Ctx::new(&mut rng, format!("train-{k}.example.com"));
            let text = (family.render)(&mut ctx).render();
            out.entry(family.application.to_string())
                .or_default()
                .push((format!("{}-{k:03}.conf", family.name), text));
        }
    }
    out
}

/// One rendering of `family`, as it would appear in an instance generated with `seed`.
pub fn render_sample(family: &Family, seed: u64) -> String {
    let mut rng = rng_for(seed, u64::MAX - 3);
    let mut ctx = Ctx::new(&mut rng, format!("sample-{seed}.example.com"));
    (family.render)(&mut ctx).render()
}

/// Ground truth of the active-file scenario.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveScenario {
    pub cutoff: i64,
    pub window_seconds: u64,
    pub window_reads: BTreeSet<String>,
    pub touched: BTreeSet<String>,
}

/// One instance of `files` regular files of which `window_reads` are opened
/// for reading inside the boot window. The log also holds writes inside the
/// window, reads after it and pseudo-file reads; every read file has its atime
/// at the read, all others keep the build time.
pub fn active_scenario(seed: u64, files: usize, window_reads: usize) -> (InstanceSnapshot, ActiveScenario) {
    assert!(window_reads <= files);
    let mut rng = rng_for(seed, u64::MAX - 1);
    let paths: Vec<String> = (0..files)
        .map(|i| format!("/usr/share/{}/f{i:04}", ["lib", "doc", "etc", "misc"][i % 4]))
        .collect();
    let mut order: Vec<usize> = (0..files).collect();
    order.shuffle(&mut rng);
    let read_now = &order[..window_reads];
    let rest = &order[window_reads..];
    let late_reads = &rest[..rest.len().min(5)];
    let writes = &rest[rest.len().min(5)..rest.len().min(8)];
    let window = ACTIVE_WINDOW_SECONDS as i64;

    let mut events = Vec::new();
    for &i in read_now {
        events.push(AccessEvent {
            timestamp: BOOT_TIME + rng.random_range(0..=window),
            flags: AccessFlags::Read,
            path: paths[i].clone(),
        });
    }
    for &i in writes {
        events.push(AccessEvent {
            timestamp: BOOT_TIME + rng.random_range(0..=window),
            flags: AccessFlags::Write,
            path: paths[i].clone(),
        });
    }
    for &i in late_reads {
        events.push(AccessEvent {
            timestamp: BOOT_TIME + window + rng.random_range(1..600),
            flags: AccessFlags::Read,
            path: paths[i].clone(),
        });
    }
    events.push(AccessEvent {
        timestamp: BOOT_TIME + window + 1,
        flags: AccessFlags::Read,
        path: "/proc/self/mountinfo".into(),
    });
    // the log starts at boot even if no file was read in that very second
    events.push(AccessEvent {
        timestamp: BOOT_TIME,
        flags: AccessFlags::Write,
        path: "/dev/console".into(),
    });
    events.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.path.cmp(&b.path)));

    let mut atime: BTreeMap<usize, i64> = BTreeMap::new();
    for &i in read_now.iter().chain(late_reads) {
        let t = events.iter().find(|e| e.path == paths[i]).expect("logged").timestamp;
        atime.insert(i, t);
    }
    let mut b = SnapshotBuilder::new(format!("scenario-{seed}"));
    b.reference_time(BOOT_TIME);
    for (i, p) in paths.iter().enumerate() {
        let a = atime
            .get(&i)
            .copied()
            .unwrap_or(BUILD_TIME - rng.random_range(0..86_400));
        b.insert(FileEntry::text_file(p.clone(), format!("{i}\n")).with_times(BUILD_TIME, Some(a)))
            .expect("absolute path");
    }
    b.access_log(events);
    let truth = ActiveScenario {
        cutoff: BOOT_TIME,
        window_seconds: ACTIVE_WINDOW_SECONDS,
        window_reads: read_now.iter().map(|&i| paths[i].clone()).collect(),
        touched: atime.keys().map(|&i| paths[i].clone()).collect(),
    };
    (b.build(), truth)
}

/// Directory layout: `manifest.json`, `instances/<id>/` (the root filesystem,
/// with mtimes and atimes set) and `instances/<id>.access.log`.
pub fn write_corpus(corpus: &GeneratedCorpus, dir: &Path) -> Result<(), SynthError> {
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |e| SynthError::Io(p, e)
    };
    let base = dir.join("instances");
    fs::create_dir_all(&base).map_err(io(&base))?;
    for snap in &corpus.snapshots {
        let root = base.join(snap.instance_id());
        let mut dirs = Vec::new();
        for entry in snap.entries() {
            let target = root.join(entry.path.trim_start_matches('/'));
            match entry.kind {
                EntryKind::Directory => {
                    fs::create_dir_all(&target).map_err(io(&target))?;
                    dirs.push((target, entry));
                    continue;
                }
                EntryKind::File => {
                    if let Some(parent) = target.parent() {
                        fs::create_dir_all(parent).map_err(io(parent))?;
                    }
                    let bytes = match &entry.content {
                        Some(b) => b.clone(),
                        None => vec![b'x'; entry.size_bytes as usize],
                    };
                    fs::write(&target, bytes).map_err(io(&target))?;
                }
                EntryKind::Symlink => continue,
            }
            set_times(&target, entry).map_err(io(&target))?;
        }
        // directories last: creating their children bumped their times
        for (target, entry) in dirs.iter().rev() {
            set_times(target, entry).map_err(io(target))?;
        }
        if let Some(events) = snap.access_log() {
            let log = base.join(format!("{}.access.log", snap.instance_id()));
            fs::write(&log, render_access_log(events)).map_err(io(&log))?;
        }
    }
    let manifest = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&corpus.manifest).expect("serializable");
    fs::write(&manifest, text + "\n").map_err(io(&manifest))?;
    Ok(())
}

fn set_times(path: &Path, entry: &FileEntry) -> std::io::Result<()> {
    let mtime = filetime::FileTime::from_unix_time(entry.mtime, 0);
    let atime = filetime::FileTime::from_unix_time(entry.atime.unwrap_or(entry.mtime), 0);
    filetime::set_file_times(path, atime, mtime)
}

/// Writes training files as `<dir>/<application>/<name>`.
pub fn write_training(files: &BTreeMap<String, Vec<(String, String)>>, dir: &Path) -> Result<(), SynthError> {
    for (app, list) in files {
        let d = dir.join(app);
        fs::create_dir_all(&d).map_err(|e| SynthError::Io(d.clone(), e))?;
        for (name, text) in list {
            let p = d.join(name);
            fs::write(&p, text).map_err(|e| SynthError::Io(p.clone(), e))?;
        }
    }
    Ok(())
}
