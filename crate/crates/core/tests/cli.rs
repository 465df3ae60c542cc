//! Drives the `cotflow` binary end to end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cot_flow::flow::CotTrainConfig;
use cot_flow::io::{read_samples, render_config};
use cot_flow::neural_ot::NotTrainConfig;

fn cotflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cotflow")).args(args).output().unwrap()
}

fn ok(args: &[&str]) {
    let out = cotflow(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn fails_with(args: &[&str], code: i32, tag: &str) {
    let out = cotflow(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("error[{tag}]: ")), "{err}");
}

struct Fixture {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        Fixture { _dir: dir, root }
    }

    fn p(&self, name: &str) -> String {
        self.root.join(name).to_string_lossy().into_owned()
    }

    /// Tiny source/target data, configs and trained models.
    fn trained(dist_a: &str, dist_b: &str) -> Self {
        let f = Fixture::new();
        let not = NotTrainConfig {
            map_hidden: vec![8],
            potential_hidden: vec![8],
            n_outer: 5,
            batch_size: 32,
            ..NotTrainConfig::default()
        };
        let cot = CotTrainConfig {
            hidden: vec![8],
            n_iters: 10,
            batch_size: 32,
            ..CotTrainConfig::default()
        };
        fs::write(f.p("not.toml"), render_config(&not)).unwrap();
        fs::write(f.p("cot.toml"), render_config(&cot)).unwrap();
        ok(&["gen-data", "--dist", dist_a, "--n", "64", "--seed", "1", "--out", &f.p("a.csv")]);
        ok(&["gen-data", "--dist", dist_b, "--n", "64", "--seed", "2", "--out", &f.p("b.csv")]);
        ok(&["train-not", "--source", &f.p("a.csv"), "--target", &f.p("b.csv"), "--config", &f.p("not.toml"), "--out", &f.p("not.json")]);
        ok(&["train-cot", "--source", &f.p("a.csv"), "--not", &f.p("not.json"), "--config", &f.p("cot.toml"), "--out", &f.p("cot.json")]);
        f
    }
}

fn bytes(path: &str) -> Vec<u8> {
    fs::read(path).unwrap()
}

#[test]
fn gen_data_is_deterministic() {
    let f = Fixture::new();
    for name in ["a.csv", "b.csv"] {
        ok(&["gen-data", "--dist", "eight_gaussians", "--n", "16", "--seed", "1", "--out", &f.p(name)]);
    }
    assert_eq!(bytes(&f.p("a.csv")), bytes(&f.p("b.csv")));
    assert_eq!(read_samples(f.p("a.csv")).unwrap().len(), 16);
}

#[test]
fn eval_of_identical_files_is_zero() {
    let f = Fixture::new();
    ok(&["gen-data", "--dist", "moons", "--n", "50", "--seed", "4", "--out", &f.p("a.csv")]);
    ok(&["eval", "--gen", &f.p("a.csv"), "--ref", &f.p("a.csv"), "--out", &f.p("m.csv")]);
    let text = fs::read_to_string(f.p("m.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("energy_distance,sliced_w2,w2_1d,n_projections"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0].parse::<f64>().unwrap(), 0.0);
    assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn usage_and_data_errors_are_single_line() {
    let f = Fixture::new();
    fails_with(&["frobnicate"], 2, "usage");
    fails_with(&["gen-data", "--dist", "moons", "--n", "5", "--seed", "1", "--out", &f.p("x.csv"), "--bogus"], 2, "usage");
    fails_with(&["gen-data", "--dist", "nope", "--n", "5", "--seed", "1", "--out", &f.p("x.csv")], 2, "invalid_argument");
    fails_with(&["eval", "--gen", &f.p("missing.csv"), "--ref", &f.p("missing.csv"), "--out", &f.p("m.csv")], 3, "io");
    fs::write(f.p("empty.csv"), "").unwrap();
    fails_with(&["eval", "--gen", &f.p("empty.csv"), "--ref", &f.p("empty.csv"), "--out", &f.p("m.csv")], 3, "empty_batch");
    fs::write(f.p("ragged.csv"), "x0,x1\n1,2\n3\n").unwrap();
    fails_with(&["eval", "--gen", &f.p("ragged.csv"), "--ref", &f.p("ragged.csv"), "--out", &f.p("m.csv")], 3, "parse");
}

#[test]
fn config_keys_are_checked() {
    let f = Trained::get();
    let text = fs::read_to_string(f.p("not.toml")).unwrap();
    fs::write(f.p("extra.toml"), format!("{text}unexpected = 1\n")).unwrap();
    fails_with(&["train-not", "--source", &f.p("a.csv"), "--target", &f.p("b.csv"), "--config", &f.p("extra.toml"), "--out", &f.p("o.json")], 2, "config");
    let missing: String = text.lines().filter(|l| !l.starts_with("lr_map")).map(|l| format!("{l}\n")).collect();
    fs::write(f.p("missing.toml"), missing).unwrap();
    fails_with(&["train-not", "--source", &f.p("a.csv"), "--target", &f.p("b.csv"), "--config", &f.p("missing.toml"), "--out", &f.p("o.json")], 2, "config");
    let cot = fs::read_to_string(f.p("cot.toml")).unwrap().replace("\"forward\"", "\"reverse\"");
    fs::write(f.p("reverse.toml"), cot).unwrap();
    fails_with(&["train-cot", "--source", &f.p("a.csv"), "--not", &f.p("not.json"), "--config", &f.p("reverse.toml"), "--out", &f.p("o.json")], 2, "invalid_argument");
}

/// Shared trained fixture, built once per test binary.
struct Trained;

impl Trained {
    fn get() -> &'static Fixture {
        static CELL: std::sync::OnceLock<Fixture> = std::sync::OnceLock::new();
        CELL.get_or_init(|| Fixture::trained("eight_gaussians", "moons"))
    }
}

#[test]
fn checkpoint_errors_map_to_exit_codes() {
    let f = Trained::get();
    fails_with(&["sample", "--model", &f.p("not.json"), "--input", &f.p("a.csv"), "--seed", "1", "--out", &f.p("o.csv")], 3, "kind_mismatch");
    let text = fs::read_to_string(f.p("cot.json")).unwrap().replace("\"format_version\": 1", "\"format_version\": 9");
    fs::write(f.p("future.json"), text).unwrap();
    fails_with(&["sample", "--model", &f.p("future.json"), "--input", &f.p("a.csv"), "--seed", "1", "--out", &f.p("o.csv")], 5, "version_mismatch");
    fs::write(f.p("three.csv"), "x0,x1,x2\n1,2,3\n").unwrap();
    fails_with(&["sample", "--model", &f.p("cot.json"), "--input", &f.p("three.csv"), "--seed", "1", "--out", &f.p("o.csv")], 3, "dim_mismatch");
}

#[test]
fn sampling_is_deterministic_and_leaves_inputs_alone() {
    let f = Trained::get();
    let before = (bytes(&f.p("a.csv")), bytes(&f.p("cot.json")));
    for (name, steps, sampler) in [("s1", "1", "self-aug"), ("s2", "6", "self-aug"), ("s3", "6", "ancestral")] {
        for rep in ["x", "y"] {
            ok(&["sample", "--model", &f.p("cot.json"), "--input", &f.p("a.csv"), "--steps", steps, "--sampler", sampler, "--seed", "5", "--out", &f.p(&format!("{name}{rep}.csv"))]);
        }
        assert_eq!(bytes(&f.p(&format!("{name}x.csv"))), bytes(&f.p(&format!("{name}y.csv"))));
    }
    assert_ne!(bytes(&f.p("s1x.csv")), bytes(&f.p("s2x.csv")));
    assert_eq!(before, (bytes(&f.p("a.csv")), bytes(&f.p("cot.json"))));
}

#[test]
fn editors_at_full_faithfulness_return_inputs() {
    let f = Trained::get();
    let a = f.p("a.csv");
    let b = f.p("b.csv");
    fs::write(f.p("mask.csv"), "x0,x1\n1,0\n").unwrap();
    ok(&["edit", "compose", "--model", &f.p("cot.json"), "--guidance", &b, "--patch", &a, "--mask", &f.p("mask.csv"), "--t", "1", "--seed", "1", "--out", &f.p("c.csv")]);
    let (base, patch, out) = (read_samples(&b).unwrap(), read_samples(&a).unwrap(), read_samples(f.p("c.csv")).unwrap());
    for i in 0..base.len() {
        assert_eq!(out.row(i), &[patch.row(i)[0], base.row(i)[1]]);
    }
    ok(&["edit", "couple", "--model", &f.p("cot.json"), "--shape", &b, "--texture", &a, "--t", "1", "--seed", "1", "--out", &f.p("k.csv")]);
    assert_eq!(read_samples(f.p("k.csv")).unwrap(), base);
    fs::write(f.p("anchor.csv"), "x0,x1\n0.25,-1.5\n").unwrap();
    ok(&["edit", "augment", "--model", &f.p("cot.json"), "--anchor", &f.p("anchor.csv"), "--drivers", &a, "--t", "1", "--seed", "1", "--out", &f.p("g.csv")]);
    assert!(read_samples(f.p("g.csv")).unwrap().rows().all(|r| r == [0.25, -1.5]));
    fs::write(f.p("badmask.csv"), "x0,x1\n0.5,0\n").unwrap();
    fails_with(&["edit", "compose", "--model", &f.p("cot.json"), "--guidance", &b, "--patch", &a, "--mask", &f.p("badmask.csv"), "--t", "0.5", "--seed", "1", "--out", &f.p("c.csv")], 3, "parse");
    fails_with(&["edit", "couple", "--model", &f.p("cot.json"), "--shape", &b, "--texture", &a, "--t", "1.5", "--seed", "1", "--out", &f.p("k.csv")], 2, "invalid_argument");
}

#[test]
fn ablate_emits_five_rows() {
    let f = Trained::get();
    let args = |out: &str| {
        vec![
            "ablate".to_string(), "--task".into(), "eight_gaussians_to_moons".into(),
            "--not-config".into(), f.p("not.toml"), "--cot-config".into(), f.p("cot.toml"),
            "--n-eval".into(), "64".into(), "--steps".into(), "4".into(), "--out".into(), f.p(out),
        ]
    };
    for out in ["t1.csv", "t2.csv"] {
        let a = args(out);
        ok(&a.iter().map(String::as_str).collect::<Vec<_>>());
    }
    let text = fs::read_to_string(f.p("t1.csv")).unwrap();
    assert_eq!(text, fs::read_to_string(f.p("t2.csv")).unwrap());
    let variants: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(variants, ["adjacent_pairs", "reverse_ot", "ancestral-4", "self-aug-4", "one-step"]);
    assert_eq!(text.lines().next(), Some("variant,nfe,energy_distance,sliced_w2"));
}

#[test]
fn svg_output_for_two_d_batches() {
    let f = Fixture::new();
    ok(&["gen-data", "--dist", "spiral", "--n", "20", "--seed", "1", "--out", &f.p("s.csv"), "--svg", &f.p("s.svg")]);
    let svg = fs::read_to_string(f.p("s.svg")).unwrap();
    assert_eq!(svg.matches("<circle").count(), 20);
    assert!(Path::new(&f.p("s.csv")).exists());
}
