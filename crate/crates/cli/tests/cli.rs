use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

struct Sandbox {
    root: PathBuf,
}

impl Sandbox {
    fn new(name: &str) -> Self {
        let root = std::env::temp_dir().join(format!("ucr-cli-{name}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&root);
        std::fs::create_dir_all(&root).unwrap();
        Sandbox { root }
    }

    fn file(&self, name: &str, body: &str) -> String {
        let p = self.root.join(name);
        std::fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_string()
    }

    fn dir(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn run(&self, out: &str, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_ucr"))
            .arg("--out-dir")
            .arg(self.dir(out))
            .args(args)
            .output()
            .unwrap()
    }
}

impl Drop for Sandbox {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.root);
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn result(dir: &Path, command: &str) -> Value {
    let v: Value = serde_json::from_slice(&std::fs::read(dir.join(format!("{command}.json"))).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], command);
    v["result"].clone()
}

fn h(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

const BSC11: &str = r#"{"kind":"dmc","payload":{"alphabet_in":["0","1"],"alphabet_out":["0","1"],"probs":[0.89,0.11,0.11,0.89]}}"#;
const IDENTITY3: &str = r#"{"kind":"dmc","payload":{"alphabet_in":["a","b","c"],"alphabet_out":["a","b","c"],"probs":[1,0,0,0,1,0,0,0,1]}}"#;
const DSBS01: &str = r#"{"alphabet_x":["0","1"],"alphabet_y":["0","1"],"probs":[0.45,0.05,0.05,0.45]}"#;

#[test]
fn capacity_of_bsc_and_identity() {
    let sb = Sandbox::new("capacity");
    let o = sb.run("bsc", &["capacity", &sb.file("bsc.json", BSC11)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = result(&sb.dir("bsc"), "capacity");
    assert!((r["capacity"].as_f64().unwrap() - (1.0 - h(0.11))).abs() < 1e-6);
    // stdout carries the summary file verbatim
    assert_eq!(o.stdout, std::fs::read(sb.dir("bsc").join("capacity.json")).unwrap());

    let o = sb.run("id", &["capacity", &sb.file("id.json", IDENTITY3)]);
    assert_eq!(code(&o), 0);
    let r = result(&sb.dir("id"), "capacity");
    assert!((r["capacity"].as_f64().unwrap() - 3f64.log2()).abs() < 1e-9);
}

#[test]
fn invalid_inputs_exit_with_validation_code() {
    let sb = Sandbox::new("invalid");
    let bad = sb.file(
        "bad.json",
        r#"{"kind":"dmc","payload":{"alphabet_in":["0","1"],"alphabet_out":["0","1"],"probs":[0.5,0.6,0.1,0.9]}}"#,
    );
    let o = sb.run("bad", &["capacity", &bad]);
    assert_eq!(code(&o), 2);
    assert!(!sb.dir("bad").join("manifest.json").exists());

    let broken = sb.file("broken.json", "{\n  \"kind\": \"dmc\",\n  \"payload\": [1, 2\n}\n");
    let o = sb.run("broken", &["capacity", &broken]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("broken.json:3:15"), "{err}");

    let o = sb.run("missing", &["capacity", "/nonexistent/channel.json"]);
    assert_eq!(code(&o), 2);

    let src = sb.file("src.json", DSBS01);
    let o = sb.run("both", &["ucr", &src, "--C", "0.2", "--channel", &sb.file("bsc.json", BSC11)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn ucr_special_structures() {
    let sb = Sandbox::new("ucr");
    let diag = sb.file(
        "diag.json",
        r#"{"alphabet_x":["a","b","c"],"alphabet_y":["a","b","c"],"probs":[0.2,0,0,0,0.3,0,0,0,0.5]}"#,
    );
    let o = sb.run("diag", &["ucr", &diag, "--C", "0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let hx = -(0.2f64 * 0.2f64.log2() + 0.3 * 0.3f64.log2() + 0.5 * 0.5f64.log2());
    let r = result(&sb.dir("diag"), "ucr");
    assert_eq!(r["solution"]["value"].as_f64().unwrap(), hx);
    assert_eq!(r["u_card"], 4);

    let indep = sb.file(
        "indep.json",
        r#"{"alphabet_x":["0","1"],"alphabet_y":["0","1"],"probs":[0.15,0.35,0.15,0.35]}"#,
    );
    let o = sb.run("indep", &["ucr", &indep, "--C", "0.3", "--restarts", "16"]);
    assert_eq!(code(&o), 0);
    let v = result(&sb.dir("indep"), "ucr")["solution"]["value"].as_f64().unwrap();
    assert!((v - 0.3).abs() <= 5e-3, "{v}");
}

#[test]
fn ucr_through_channel_matches_oracle() {
    let sb = Sandbox::new("ucr-channel");
    let src = sb.file("src.json", r#"{"alphabet_x":["0","1"],"alphabet_y":["0","1"],"probs":[0.4,0.1,0.1,0.4]}"#);
    let bsc = sb.file("bsc.json", BSC11);
    let o = sb.run("solve", &["ucr", &src, "--channel", &bsc]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = sb.run("oracle", &["ucr", &src, "--channel", &bsc, "--oracle", "--u-card", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = result(&sb.dir("solve"), "ucr");
    let r = result(&sb.dir("oracle"), "ucr");
    assert!((s["c"].as_f64().unwrap() - (1.0 - h(0.11))).abs() < 1e-6);
    let (a, b) = (s["solution"]["value"].as_f64().unwrap(), r["solution"]["value"].as_f64().unwrap());
    assert!((a - b).abs() <= 5e-3, "{a} vs {b}");
    assert!(a < 1.0);
}

#[test]
fn ucr_grid_writes_monotone_curve() {
    let sb = Sandbox::new("ucr-grid");
    let src = sb.file("src.json", DSBS01);
    let o = sb.run("grid", &["ucr", &src, "--grid", "0,0.2,0.4,0.6", "--restarts", "16"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut rd = csv::Reader::from_path(sb.dir("grid").join("curve.csv")).unwrap();
    assert_eq!(&rd.headers().unwrap()[1], "value_bits");
    let values: Vec<f64> = rd.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(values.len(), 4);
    assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{values:?}");
    assert!((values[3] - 1.0).abs() < 1e-12);
}

#[test]
fn simulate_guard_and_identical_terminals() {
    let sb = Sandbox::new("simulate");
    let undersized = sb.file(
        "undersized.json",
        &format!(r#"{{"source":{DSBS01},"n":8,"mu":0.3,"theta":0.0,"eps_typ":0.15,"trials":100}}"#),
    );
    let o = sb.run("guard", &["simulate", &undersized, "--exact"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("N2"));

    let long = sb.file(
        "long.json",
        &format!(r#"{{"source":{DSBS01},"n":40,"mu":0.1,"theta":0.0,"eps_typ":0.15,"trials":100}}"#),
    );
    assert_eq!(code(&sb.run("exact-long", &["simulate", &long, "--exact"])), 3);

    let same = sb.file(
        "same.json",
        r#"{"source":{"alphabet_x":["0","1"],"alphabet_y":["0","1"],"probs":[0.5,0,0,0.5]},
            "n":8,"mu":0.05,"theta":0.0,"eps_typ":0.15,"trials":500}"#,
    );
    let o = sb.run("exact", &["simulate", &same, "--exact"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = result(&sb.dir("exact"), "simulate");
    assert_eq!(r["report"]["analysis"], "exact");
    assert_eq!(r["report"]["p_err"].as_f64().unwrap(), 0.0);
    assert_eq!(r["conditions"]["error"]["holds"], true);

    let o = sb.run("mc", &["simulate", &same]);
    assert_eq!(code(&o), 0);
    let r = result(&sb.dir("mc"), "simulate");
    assert_eq!(r["report"]["analysis"], "monte_carlo");
    assert_eq!(r["report"]["mode"], "explicit");
    assert_eq!(r["report"]["p_err"].as_f64().unwrap(), 0.0);
    let trials = std::fs::read_to_string(sb.dir("mc").join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 501);
}

#[test]
fn spectrum_of_identity_channel_is_a_point_mass() {
    let sb = Sandbox::new("spectrum");
    let ch = sb.file("id.json", IDENTITY3);
    let o = sb.run("s", &["spectrum", &ch, "--n", "10,40", "--samples", "500", "--mass-below", "1.5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = result(&sb.dir("s"), "spectrum");
    for b in r["blocks"].as_array().unwrap() {
        assert!((b["mean"].as_f64().unwrap() - 3f64.log2()).abs() < 1e-12);
        assert!(b["std_dev"].as_f64().unwrap() < 1e-12);
        assert_eq!(b["mass_below"][0][1].as_f64().unwrap(), 0.0);
    }
    let csv = std::fs::read_to_string(sb.dir("s").join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "sample_index,n,value_bits");
    assert_eq!(csv.lines().count(), 1001);

    let wrong = sb.file("in.json", r#"{"alphabet":["0","1"],"probs":[0.5,0.5]}"#);
    assert_eq!(code(&sb.run("bad", &["spectrum", &ch, "--n", "10", "--input", &wrong])), 2);
}

#[test]
fn lemmas_report_not_applicable_and_pass() {
    let sb = Sandbox::new("lemmas");
    let o = sb.run("l", &["lemmas", "--instances", "1000", "--telescoping", "10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = result(&sb.dir("l"), "lemmas");
    assert_eq!(r["interval"]["status"], "pass");
    assert_eq!(r["interval"]["passed"], 1000);
    assert_eq!(r["telescoping"]["status"], "pass");
    let statuses: Vec<&str> = r["variance"].as_array().unwrap().iter().map(|v| v["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["pass", "not-applicable"]);
    let protocol = &r["set_bounds"][1];
    assert_eq!(protocol["status_d"], "not-applicable");
    assert!(protocol["p_in_d"].as_f64().unwrap() >= protocol["finite_n_bound_d"].as_f64().unwrap());
}

#[test]
fn csv_summary_format() {
    let sb = Sandbox::new("csv");
    let o = sb.run("c", &["--format", "csv", "capacity", &sb.file("bsc.json", BSC11)]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(sb.dir("c").join("capacity_summary.csv")).unwrap();
    assert!(csv.starts_with("key,value\n"));
    assert!(csv.lines().any(|l| l.starts_with("result.capacity,0.5000")));
}

#[test]
fn replay_is_byte_identical() {
    let sb = Sandbox::new("replay");
    let desc = sb.file(
        "run.json",
        &format!(r#"{{"source":{DSBS01},"n":100,"mu":0.1,"theta":0.05,"eps_typ":0.15,"trials":300}}"#),
    );
    let o = sb.run("first", &["--seed", "11", "simulate", &desc]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = sb.dir("first").join("manifest.json");
    let m: Value = serde_json::from_slice(&std::fs::read(&manifest).unwrap()).unwrap();
    assert_eq!(m["command"], "simulate");
    assert_eq!(m["seed"], 11);
    assert_eq!(m["outputs"], serde_json::json!(["simulate.json", "trials.csv"]));

    let o = sb.run("ignored", &["--threads", "3", "replay", manifest.to_str().unwrap(), "--verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let o = sb.run("second", &["replay", manifest.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    for name in ["simulate.json", "trials.csv"] {
        let a = std::fs::read(sb.dir("first").join(name)).unwrap();
        let b = std::fs::read(sb.dir("second").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }

    // a tampered output is detected
    std::fs::write(sb.dir("first").join("trials.csv"), b"trial\n").unwrap();
    let o = sb.run("ignored", &["replay", manifest.to_str().unwrap(), "--verify"]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("trials.csv"));

    // a different seed gives different trials
    let o = sb.run("other", &["--seed", "12", "simulate", &desc]);
    assert_eq!(code(&o), 0);
    assert_ne!(
        std::fs::read(sb.dir("other").join("trials.csv")).unwrap(),
        std::fs::read(sb.dir("second").join("trials.csv")).unwrap()
    );
}
