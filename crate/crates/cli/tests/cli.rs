use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const APPS: [&str; 3] = ["httpd", "mysql", "nginx"];

fn confex(home: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confex"))
        .args(args)
        .env("CONFEX_HOME", home)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn ok(home: &Path, args: &[&str]) -> String {
    let out = confex(home, args);
    assert!(
        out.status.success(),
        "confex {args:?} exited {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Every regular file under `root`, keyed by relative path.
fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for e in fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// A home directory with vocabularies trained on generated known-good files.
fn trained_home(dir: &Path) -> PathBuf {
    let home = dir.join("home");
    let gen = dir.join("train-src");
    ok(
        &home,
        &[
            "generate",
            "--seed",
            "77",
            "--profile",
            "instances=1",
            "--training-per-family",
            "4",
            "--out",
            s(&gen),
        ],
    );
    for app in APPS {
        let pattern = format!("{}/training/{app}/*", gen.display());
        ok(&home, &["train", "--app", app, "--files", &pattern]);
    }
    home
}

#[test]
fn generate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        ok(
            dir.path(),
            &[
                "generate",
                "--seed",
                "1",
                "--profile",
                "instances=8,inject=0.5",
                "--out",
                s(out),
            ],
        );
    }
    let (ta, tb) = (tree(&a), tree(&b));
    assert!(ta.len() > 100);
    assert_eq!(ta, tb);
    // refuses to write into a populated directory
    assert_eq!(confex(dir.path(), &["generate", "--out", s(&a)]).status.code(), Some(2));
}

#[test]
fn generate_profile_controls_nonstandard_fraction_and_injections() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    ok(
        dir.path(),
        &[
            "generate",
            "--seed",
            "2",
            "--profile",
            "instances=20,files=3,nonstandard=0.5,inject=0.25",
            "--out",
            s(&out),
        ],
    );
    let m = json(&out.join("manifest.json"));
    let instances = m["instances"].as_array().unwrap();
    let planted: Vec<&Value> = instances
        .iter()
        .flat_map(|i| i["planted"].as_array().unwrap())
        .collect();
    assert_eq!(planted.len(), 60);
    let nonstandard = planted.iter().filter(|p| p["standard"] == Value::Bool(false)).count();
    assert_eq!(nonstandard, 30);
    let injected = instances.iter().filter(|i| !i["injection"].is_null()).count();
    assert_eq!(injected, 5);
    assert_eq!(
        confex(
            dir.path(),
            &["generate", "--profile", "bogus=1", "--out", s(&dir.path().join("x"))]
        )
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn train_writes_extends_and_rejects_empty_globs() {
    let dir = tempfile::tempdir().unwrap();
    let home = dir.path().join("home");
    let src = dir.path().join("src");
    fs::create_dir_all(&src).unwrap();
    fs::write(src.join("a.conf"), "Listen 80\nUser daemon\n").unwrap();
    fs::write(src.join("b.conf"), "Listen 8080\nGroup daemon\n").unwrap();
    let pattern = format!("{}/*.conf", src.display());
    ok(&home, &["train", "--app", "httpd", "--files", &pattern]);
    let vocab = home.join("vocab/httpd.json");
    assert_eq!(json(&vocab)["file_sets"].as_array().unwrap().len(), 2);

    fs::write(src.join("c.conf"), "ServerName x\n").unwrap();
    ok(&home, &["train", "--app", "httpd", "--files", &pattern]);
    assert_eq!(json(&vocab)["file_sets"].as_array().unwrap().len(), 3);

    let none = format!("{}/*.nothing", src.display());
    let out = confex(&home, &["train", "--app", "httpd", "--files", &none]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no training files"));
}

#[test]
fn scan_of_an_empty_instance_directory_is_an_empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let home = trained_home(dir.path());
    let empty = dir.path().join("empty");
    fs::create_dir_all(&empty).unwrap();
    let out = dir.path().join("rec");
    ok(&home, &["scan", "--instances", s(&empty), "--out", s(&out)]);
    let summary = json(&out.join("scan_summary.json"));
    assert_eq!(summary["totals"]["instances"], 0);
    assert_eq!(summary["totals"]["records"], 0);
}

#[test]
fn scan_finds_the_single_planted_file() {
    let dir = tempfile::tempdir().unwrap();
    let home = trained_home(dir.path());
    let gen = dir.path().join("gen");
    ok(
        &home,
        &[
            "generate",
            "--seed",
            "9",
            "--profile",
            "instances=1,files=1,passive=1",
            "--out",
            s(&gen),
        ],
    );
    let m = json(&gen.join("manifest.json"));
    let app = m["instances"][0]["planted"][0]["application"]
        .as_str()
        .unwrap()
        .to_string();

    let out = dir.path().join("rec");
    ok(
        &home,
        &[
            "scan",
            "--instances",
            s(&gen.join("instances")),
            "--active-method",
            "events",
            "--out",
            s(&out),
        ],
    );
    let summary = json(&out.join("scan_summary.json"));
    assert_eq!(summary["totals"]["labeled"], 1);
    assert_eq!(summary["labeled_by_application"][&app], 1);
    assert!(summary["totals"]["records"].as_u64().unwrap() > 10);

    // without active filtering the unread template copy is labeled as well
    let all = dir.path().join("rec-all");
    ok(
        &home,
        &[
            "scan",
            "--instances",
            s(&gen.join("instances")),
            "--active-method",
            "none",
            "--out",
            s(&all),
        ],
    );
    let summary = json(&all.join("scan_summary.json"));
    assert_eq!(summary["totals"]["labeled"], 2);
}

#[test]
fn a_corrupt_instance_fails_alone() {
    let dir = tempfile::tempdir().unwrap();
    let home = trained_home(dir.path());
    let gen = dir.path().join("gen");
    ok(
        &home,
        &["generate", "--seed", "4", "--profile", "instances=2", "--out", s(&gen)],
    );
    let instances = gen.join("instances");

    let clean = dir.path().join("clean");
    ok(&home, &["scan", "--instances", s(&instances), "--out", s(&clean)]);

    fs::write(instances.join("broken.tar"), b"this is not a tar archive at all").unwrap();
    let mixed = dir.path().join("mixed");
    let out = confex(&home, &["scan", "--instances", s(&instances), "--out", s(&mixed)]);
    assert_eq!(out.status.code(), Some(3));
    let summary = json(&mixed.join("scan_summary.json"));
    assert_eq!(summary["totals"]["failed"], 1);
    let failed: Vec<&Value> = summary["instances"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|i| i["status"] == "failed")
        .collect();
    assert_eq!(failed[0]["instance_id"], "broken");
    for id in ["inst-0000", "inst-0001"] {
        let name = format!("{id}.records");
        assert_eq!(
            fs::read(clean.join(&name)).unwrap(),
            fs::read(mixed.join(&name)).unwrap()
        );
    }
}

#[test]
fn scan_and_analyze_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let home = trained_home(dir.path());
    let gen = dir.path().join("gen");
    ok(
        &home,
        &["generate", "--seed", "6", "--profile", "instances=10", "--out", s(&gen)],
    );
    let instances = gen.join("instances");
    let mut outputs = Vec::new();
    for (k, extra) in [[].as_slice(), ["--sequential"].as_slice()].iter().enumerate() {
        let rec = dir.path().join(format!("rec{k}"));
        let rep = dir.path().join(format!("rep{k}"));
        let mut scan = vec!["scan", "--instances", s(&instances), "--out", s(&rec)];
        scan.extend_from_slice(extra);
        ok(&home, &scan);
        let mut analyze = vec!["analyze", "--corpus", s(&rec), "--leave-one-out", "--out", s(&rep)];
        analyze.extend_from_slice(extra);
        ok(&home, &analyze);
        let mut t = tree(&rec);
        t.remove(Path::new("scan_summary.json"));
        outputs.push((t, tree(&rep)));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn leave_one_out_ranks_the_planted_outlier_first() {
    let dir = tempfile::tempdir().unwrap();
    let home = trained_home(dir.path());
    let gen = dir.path().join("gen");
    ok(
        &home,
        &[
            "generate",
            "--seed",
            "5",
            "--preset",
            "analysis",
            "--profile",
            "instances=100,inject=0.01",
            "--training-per-family",
            "0",
            "--out",
            s(&gen),
        ],
    );
    let m = json(&gen.join("manifest.json"));
    let hit: Vec<&Value> = m["instances"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|i| !i["injection"].is_null())
        .collect();
    assert_eq!(hit.len(), 1);
    let id = hit[0]["instance_id"].as_str().unwrap();
    let injected = hit[0]["injection"]["injected"].as_str().unwrap();

    let rec = dir.path().join("rec");
    ok(
        &home,
        &[
            "scan",
            "--instances",
            s(&gen.join("instances")),
            "--active-method",
            "events",
            "--out",
            s(&rec),
        ],
    );
    let rep = dir.path().join("rep");
    ok(
        &home,
        &[
            "analyze",
            "--corpus",
            s(&rec),
            "--leave-one-out",
            "--top-n",
            "10",
            "--out",
            s(&rep),
        ],
    );
    let report = json(&rep.join(format!("{id}.report.json")));
    let suspects = report["suspects"].as_array().unwrap();
    assert_eq!(suspects.len(), 10);
    assert_eq!(suspects[0]["record"]["value"], injected);

    let text = ok(&home, &["report", s(&rep), "--instance", id]);
    assert!(text.contains(injected));
    assert_eq!(
        text.lines()
            .filter(|l| l.trim_start().starts_with(char::is_numeric))
            .count(),
        10
    );
}

#[test]
fn empty_model_scores_everything_zero() {
    let dir = tempfile::tempdir().unwrap();
    let home = trained_home(dir.path());
    let gen = dir.path().join("gen");
    ok(
        &home,
        &["generate", "--seed", "8", "--profile", "instances=2", "--out", s(&gen)],
    );
    let rec = dir.path().join("rec");
    ok(
        &home,
        &["scan", "--instances", s(&gen.join("instances")), "--out", s(&rec)],
    );
    let rep = dir.path().join("rep");
    ok(
        &home,
        &["analyze", "--targets", s(&rec), "--top-n", "1000", "--out", s(&rep)],
    );
    let report = json(&rep.join("inst-0000.report.json"));
    let suspects = report["suspects"].as_array().unwrap();
    assert!(!suspects.is_empty());
    assert!(suspects.iter().all(|s| s["score"] == 0.0));
}

#[test]
fn model_version_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let home = trained_home(dir.path());
    let gen = dir.path().join("gen");
    ok(
        &home,
        &["generate", "--seed", "8", "--profile", "instances=3", "--out", s(&gen)],
    );
    let rec = dir.path().join("rec");
    ok(
        &home,
        &["scan", "--instances", s(&gen.join("instances")), "--out", s(&rec)],
    );
    let model = dir.path().join("model.json");
    ok(&home, &["analyze", "--corpus", s(&rec), "--save-model", s(&model)]);
    let text = fs::read_to_string(&model)
        .unwrap()
        .replacen("\"format_version\": 1", "\"format_version\": 99", 1);
    fs::write(&model, text).unwrap();
    let out = confex(&home, &["analyze", "--model", s(&model), "--targets", s(&rec)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("format_version"));
}

#[test]
fn flags_override_the_settings_file() {
    let dir = tempfile::tempdir().unwrap();
    let home = trained_home(dir.path());
    let gen = dir.path().join("gen");
    ok(
        &home,
        &["generate", "--seed", "8", "--profile", "instances=3", "--out", s(&gen)],
    );
    let rec = dir.path().join("rec");
    ok(
        &home,
        &["scan", "--instances", s(&gen.join("instances")), "--out", s(&rec)],
    );

    fs::write(home.join("config.toml"), "top_n = 3\n").unwrap();
    let rep = dir.path().join("rep");
    ok(
        &home,
        &["analyze", "--corpus", s(&rec), "--leave-one-out", "--out", s(&rep)],
    );
    assert_eq!(
        json(&rep.join("inst-0000.report.json"))["suspects"]
            .as_array()
            .unwrap()
            .len(),
        3
    );
    ok(
        &home,
        &[
            "analyze",
            "--corpus",
            s(&rec),
            "--leave-one-out",
            "--top-n",
            "5",
            "--out",
            s(&rep),
        ],
    );
    assert_eq!(
        json(&rep.join("inst-0000.report.json"))["suspects"]
            .as_array()
            .unwrap()
            .len(),
        5
    );

    fs::write(home.join("config.toml"), "threshold = 1.5\n").unwrap();
    assert_eq!(
        confex(
            &home,
            &["scan", "--instances", s(&gen.join("instances")), "--out", s(&rec)]
        )
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn missing_vocabularies_are_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = confex(dir.path(), &["scan", s(dir.path()), "--out", s(&dir.path().join("r"))]);
    assert_eq!(out.status.code(), Some(2));
}
