use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use innerspeech_core::trialset::load_trialset;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_innerspeech"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn innerspeech")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(dir: &Path, rel: &str) -> String {
    dir.join(rel).to_string_lossy().into_owned()
}

fn synth(dir: &Path, name: &str, sets: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let mut args = vec!["synth", "-o", out.to_str().unwrap()];
    for s in sets {
        args.push("--set");
        args.push(s);
    }
    ok(&args);
    out.join("trials.eit")
}

#[test]
fn synth_is_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let a = synth(tmp.path(), "a", &["seed=5", "synth.trials=40"]);
    let b = synth(tmp.path(), "b", &["seed=5", "synth.trials=40"]);
    let c = synth(tmp.path(), "c", &["seed=6", "synth.trials=40"]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
    let cfg = fs::read_to_string(tmp.path().join("a/config.txt")).unwrap();
    assert!(cfg.contains("seed = 5"));
    let manifest = fs::read_to_string(tmp.path().join("a/manifest.txt")).unwrap();
    assert!(manifest.contains("output = trials.eit sha256:"));
    assert!(manifest.contains("wall_time_s"));
}

#[test]
fn clean_without_artifacts_is_the_identity() {
    let tmp = tempfile::tempdir().unwrap();
    // Flat trials: a population without outliers of any kind.
    let input = synth(
        tmp.path(),
        "s",
        &["synth.artifact_prob=0", "synth.noise=0", "synth.amplitude=0", "synth.trials=40"],
    );
    let before = fs::read(&input).unwrap();
    ok(&["clean", input.to_str().unwrap(), "-o", &p(tmp.path(), "c")]);
    assert_eq!(fs::read(tmp.path().join("c/clean.eit")).unwrap(), before);
    let report = fs::read_to_string(tmp.path().join("c/artifacts.csv")).unwrap();
    assert_eq!(report.lines().count(), 1, "{report}");
    assert_eq!(fs::read(&input).unwrap(), before);
}

#[test]
fn clean_keeps_unflagged_signals_bit_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let input = synth(tmp.path(), "s", &["synth.artifact_prob=0", "synth.trials=40", "synth.channels=6"]);
    ok(&["clean", input.to_str().unwrap(), "-o", &p(tmp.path(), "c")]);
    let a = load_trialset(&input).unwrap();
    let b = load_trialset(tmp.path().join("c/clean.eit")).unwrap();
    let report = fs::read_to_string(tmp.path().join("c/artifacts.csv")).unwrap();
    let flagged: Vec<(usize, String)> = report
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',');
            (it.next().unwrap().parse().unwrap(), it.next().unwrap().to_string())
        })
        .collect();
    for t in 0..a.n_trials() {
        for (c, name) in a.channel_names().iter().enumerate() {
            if !flagged.contains(&(t, name.clone())) {
                assert_eq!(a.signal(t, c), b.signal(t, c), "trial {t} channel {name}");
            }
        }
    }
}

#[test]
fn full_chain_reaches_ninety_percent() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let trials = synth(d, "s", &[]);
    ok(&["clean", trials.to_str().unwrap(), "-o", &p(d, "c")]);
    ok(&["features", &p(d, "c/clean.eit"), "-o", &p(d, "f")]);
    ok(&["select", &p(d, "f/features.eitf"), "-o", &p(d, "sel")]);
    let ranking = fs::read_to_string(d.join("sel/ranking.csv")).unwrap();
    assert_eq!(ranking.lines().count(), 13);
    let stdout = ok(&["evaluate", &p(d, "f/features.eitf"), "-o", &p(d, "e")]);
    let summary = fs::read_to_string(d.join("e/summary.csv")).unwrap();
    let row: Vec<&str> = summary.lines().nth(1).unwrap().split(',').collect();
    let acc: f64 = row[row.len() - 2].parse().unwrap();
    assert!(acc >= 90.0, "accuracy {acc}: {stdout}");

    ok(&["report", &p(d, "e/predictions.csv"), "-o", &p(d, "r")]);
    assert_eq!(
        fs::read(d.join("r/summary.csv")).unwrap(),
        fs::read(d.join("e/summary.csv")).unwrap()
    );
    ok(&["train", &p(d, "f/features.eitf"), "-o", &p(d, "t")]);
    ok(&["predict", &p(d, "t/model.eim"), &p(d, "f/features.eitf"), "-o", &p(d, "pr")]);
    assert_eq!(fs::read_to_string(d.join("pr/predictions.csv")).unwrap().lines().count(), 161);
    assert!(ok(&["inspect", &p(d, "t/model.eim")]).contains("EIM1"));
}

#[test]
fn topomap_writes_maps_per_class() {
    let tmp = tempfile::tempdir().unwrap();
    let input = synth(tmp.path(), "s", &["synth.trials=40", "synth.artifact_prob=0"]);
    ok(&["topomap", input.to_str().unwrap(), "-o", &p(tmp.path(), "m"), "--set", "topomap.grid=32"]);
    let pgm = fs::read(tmp.path().join("m/topomap_class1.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n32 32\n255\n"));
    assert_eq!(pgm.len(), 13 + 32 * 32);
    let erp = fs::read_to_string(tmp.path().join("m/erp.csv")).unwrap();
    assert_eq!(erp.lines().next().unwrap(), "channel,all,class0,class1,class2,class3");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["synth", "-o", &p(tmp.path(), "x"), "--set", "colour=red"]), 1);
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "seed = 1\nunknown.key = 2\n").unwrap();
    assert_eq!(code(&["synth", "-o", &p(tmp.path(), "y"), "-c", cfg.to_str().unwrap()]), 1);
    let junk = tmp.path().join("junk.eit");
    fs::write(&junk, b"not a trial set").unwrap();
    assert_eq!(code(&["clean", junk.to_str().unwrap(), "-o", &p(tmp.path(), "z")]), 2);
    assert_eq!(code(&["inspect", junk.to_str().unwrap()]), 2);
    assert_eq!(code(&["inspect", &p(tmp.path(), "missing.eit")]), 2);
    assert_eq!(code(&["--help"]), 0);
}
