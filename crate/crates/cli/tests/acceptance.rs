//! Acceptance run: one PASS/FAIL line per criterion. Runs without the
//! test harness so the lines are always printed.
//!
//! Criterion 7 is blocked: at n = 8 and mu = 0.3 the second codebook level
//! has N2 = floor(2^{n(I(U;Y) - 2 mu)}) = 0 words, so the configuration is
//! rejected before anything can be frozen. The line reports FAIL with the
//! reason and the test checks that it fails for exactly that reason. The
//! neighbouring configuration at mu = 0.1 is reported as 7b.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use ucr_core::channelcap::{
    dmc_capacity, inf_info_rate_estimate, spectrum_samples, ChannelSpec, DmcProduct,
    DEFAULT_DROP_TOL, DEFAULT_GRID_STEP,
};
use ucr_core::converselab::{
    derive_params, interval_lemma, telescoping_identity_check, TelescopingInstance,
};
use ucr_core::probspace::{
    binary_entropy, conditional_entropy_x_given_y, entropy, ConditionalPmf, JointPmf, Pmf,
};
use ucr_core::protocol::{exact_analyze, run_monte_carlo, ProtocolConfig};
use ucr_core::rng::stream_rng;
use ucr_core::ucrcap::{ucr_capacity_oracle, ucr_capacity_solve, AuxiliaryChannel};

const BLOCKED: &[&str] = &["7"];

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn run(id: &'static str, limit: Duration, f: impl FnOnce() -> Result<String, String>) -> Line {
    let start = Instant::now();
    let res = f();
    let elapsed = start.elapsed();
    let (pass, detail) = match res {
        Ok(d) if elapsed <= limit => (true, d),
        Ok(d) => (false, format!("{d}; runtime {elapsed:.2?} over {limit:?}")),
        Err(e) => (false, e),
    };
    Line {
        id,
        pass,
        detail,
        elapsed,
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_source(seed: u64, n: usize) -> JointPmf {
    let mut rng = stream_rng(seed, 0);
    let w: Vec<f64> = (0..n * n).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    JointPmf::new(n, n, w.iter().map(|v| v / s).collect()).unwrap()
}

fn dsbs_config(p: f64, n: usize, mu: f64, theta: f64) -> ucr_core::Result<ProtocolConfig> {
    ProtocolConfig::new(
        JointPmf::dsbs(p)?,
        AuxiliaryChannel::identity(2),
        n,
        mu,
        theta,
        0.15,
        0,
    )
}

fn c1_capacity() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for p in [0.0, 0.05, 0.11, 0.25, 0.5] {
        let c = dmc_capacity(&ConditionalPmf::bsc(p).unwrap(), 1e-9).map_err(|e| e.to_string())?;
        let err = (c.capacity - (1.0 - binary_entropy(p))).abs();
        check(err <= 1e-6, || format!("BSC({p}): {} vs {}", c.capacity, 1.0 - binary_entropy(p)))?;
        worst = worst.max(err);
    }
    for e in [0.0, 0.3, 1.0] {
        let c = dmc_capacity(&ConditionalPmf::bec(e).unwrap(), 1e-9).map_err(|e| e.to_string())?;
        let err = (c.capacity - (1.0 - e)).abs();
        check(err <= 1e-6, || format!("BEC({e}): {}", c.capacity))?;
        worst = worst.max(err);
    }
    Ok(format!("max error {worst:.2e}"))
}

fn c2_endpoints() -> Result<String, String> {
    let mut worst_above: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    for seed in 0..10 {
        let src = random_source(1000 + seed, 2);
        let hx = entropy(&src.marginal_x());
        let hxy = conditional_entropy_x_given_y(&src);
        let above = ucr_capacity_solve(&src, hxy + 0.01, 3).map_err(|e| e.to_string())?;
        let err = (above.value - hx).abs();
        check(err <= 1e-6, || format!("seed {seed}: {} vs H(X) {hx}", above.value))?;
        worst_above = worst_above.max(err);
        if hxy - 0.05 >= 0.0 {
            let below = ucr_capacity_solve(&src, hxy - 0.05, 3).map_err(|e| e.to_string())?;
            check(below.value < hx - 1e-4, || format!("seed {seed}: {} not below {hx}", below.value))?;
            min_gap = min_gap.min(hx - below.value);
        }
    }
    Ok(format!("above: max |v - H(X)| {worst_above:.1e}; below: min H(X) - v {min_gap:.4}"))
}

fn c3_oracle() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    let mut rng = stream_rng(31, 0);
    let cases = (0..20).map(|s| (random_source(2000 + s, 2), 3)).chain(
        // |X| = 3 runs with a binary auxiliary; the ternary grid exceeds
        // the oracle's work guard.
        (0..10).map(|s| (random_source(3000 + s, 3), 2)),
    );
    for (i, (src, u_card)) in cases.enumerate() {
        let c = rng.gen_range(0.0..1.0) * conditional_entropy_x_given_y(&src);
        let o = ucr_capacity_oracle(&src, c, u_card, 0.02, 1).map_err(|e| e.to_string())?;
        let s = ucr_capacity_solve(&src, c, u_card).map_err(|e| e.to_string())?;
        let d = (o.value - s.value).abs();
        check(d <= 5e-3, || format!("case {i}: solver {} oracle {}", s.value, o.value))?;
        worst = worst.max(d);
    }
    Ok(format!("30 sources, max |solve - oracle| {worst:.2e}"))
}

fn c4_structures() -> Result<String, String> {
    for probs in [vec![0.5, 0.5], vec![0.2, 0.3, 0.5], vec![0.1, 0.2, 0.3, 0.4]] {
        let src = JointPmf::diagonal(&Pmf::new(probs).unwrap());
        let hx = entropy(&src.marginal_x());
        for c in [0.0, 0.1, 0.5, 1.0, 3.0] {
            let v = ucr_capacity_solve(&src, c, src.nx() + 1).map_err(|e| e.to_string())?.value;
            check(v == hx, || format!("X = Y, C = {c}: {v} != {hx}"))?;
        }
    }
    let indep = JointPmf::product(&Pmf::uniform(2).unwrap(), &Pmf::bernoulli(0.3).unwrap());
    let mut worst: f64 = 0.0;
    for i in 0..=12 {
        let c = i as f64 * 0.1;
        let v = ucr_capacity_solve(&indep, c, 3).map_err(|e| e.to_string())?.value;
        let d = (v - c.min(1.0)).abs();
        check(d <= 5e-3, || format!("X indep Y, C = {c}: {v}"))?;
        worst = worst.max(d);
    }
    let d0 = ucr_capacity_solve(&JointPmf::dsbs(0.1).unwrap(), 0.0, 3).map_err(|e| e.to_string())?.value;
    check(d0 <= 0.01, || format!("DSBS(0.1) at C = 0: {d0}"))?;
    Ok(format!("X = Y exact; independent max dev {worst:.1e}; DSBS C = 0 gives {d0:.2e}"))
}

fn c5_telescoping() -> Result<String, String> {
    let mut max_gap: f64 = 0.0;
    for k in 0..50u64 {
        let mut rng = stream_rng(55, k);
        let n = 2 + (k as usize % 2);
        let inst = TelescopingInstance::random(n, 2, 2, 2, &mut rng).map_err(|e| e.to_string())?;
        max_gap = max_gap.max(telescoping_identity_check(&inst).map_err(|e| e.to_string())?.gap);
    }
    check(max_gap <= 1e-10, || format!("max gap {max_gap:e}"))?;
    Ok(format!("50 instances, max gap {max_gap:.2e}"))
}

fn c6_interval() -> Result<String, String> {
    let mut rng = stream_rng(66, 0);
    let (mut drawn, mut passed) = (0, 0);
    while drawn < 10_000 {
        let p = derive_params(rng.gen_range(1e-6..0.5), rng.gen_range(1e-9..0.2), rng.gen_range(0.0..4.0))
            .map_err(|e| e.to_string())?;
        if !p.is_valid() {
            continue;
        }
        drawn += 1;
        if interval_lemma(&p).holds {
            passed += 1;
        }
    }
    check(passed == drawn, || format!("{passed}/{drawn} pass"))?;
    Ok(format!("{passed}/{drawn} pass"))
}

/// Exact triple and Monte Carlo agreement for one short-block configuration.
fn exact_vs_mc(mu: f64) -> Result<String, String> {
    let cfg = dsbs_config(0.1, 8, mu, 0.0).map_err(|e| e.to_string())?;
    let rep = exact_analyze(&cfg).map_err(|e| e.to_string())?;
    let mc = run_monte_carlo(&cfg, 100_000).map_err(|e| e.to_string())?.report;
    let se = (rep.p_err * (1.0 - rep.p_err) / 1e5).sqrt();
    check((mc.p_err - rep.p_err).abs() <= 3.0 * se, || {
        format!("MC {} vs exact {} (SE {se:.2e})", mc.p_err, rep.p_err)
    })?;
    Ok(format!(
        "P_err {:.6}, H(K) {:.6}, H(K|Y) {:.6}; MC {:.5} (|d| = {:.2} SE)",
        rep.p_err,
        rep.h_k,
        rep.h_k_given_y,
        mc.p_err,
        (mc.p_err - rep.p_err).abs() / se
    ))
}

fn c7b_golden() -> Result<String, String> {
    let cfg = dsbs_config(0.1, 8, 0.1, 0.0).map_err(|e| e.to_string())?;
    let rep = exact_analyze(&cfg).map_err(|e| e.to_string())?;
    for (name, got, want) in [
        ("P_err", rep.p_err, 0.27343749999997785),
        ("H(K)", rep.h_k, 2.5223299263043204),
        ("H(K|Y)", rep.h_k_given_y, 1.3308369040326706),
    ] {
        check((got - want).abs() < 1e-12, || format!("{name} {got} != golden {want}"))?;
    }
    exact_vs_mc(0.1)
}

fn c8_desk_scale() -> Result<String, String> {
    let cfg = dsbs_config(0.05, 1000, 0.1, 0.01).map_err(|e| e.to_string())?;
    let rep = run_monte_carlo(&cfg, 2000).map_err(|e| e.to_string())?.report;
    check(rep.p_err <= 0.1, || format!("P[K != L] = {}", rep.p_err))?;
    let bound = 1000.0 * (rep.i_ux + 0.1 + 1.0);
    let card = &rep.cardinality;
    check(card.holds && card.log2_k_card <= bound, || {
        format!("log2|K| = {} over {}", card.log2_k_card, bound)
    })?;
    Ok(format!(
        "P[K != L] = {:.4} ({:?} mode), log2|K| {:.1} <= {bound:.1}",
        rep.p_err, rep.mode, card.log2_k_card
    ))
}

fn c9_spectrum() -> Result<String, String> {
    let e = |e: ucr_core::Error| e.to_string();
    let input = Pmf::uniform(2).unwrap();
    let bsc = DmcProduct::new(ConditionalPmf::bsc(0.1).unwrap());
    let s250 = spectrum_samples(&bsc, &input, 250, 10_000, 91).map_err(e)?;
    let s1000 = spectrum_samples(&bsc, &input, 1000, 10_000, 92).map_err(e)?;
    let target = 1.0 - binary_entropy(0.1);
    check((s1000.mean() - target).abs() <= 0.01, || format!("mean {} vs {target}", s1000.mean()))?;
    let ratio = s1000.std_dev() / s250.std_dev();
    check((0.35..=0.65).contains(&ratio), || format!("std ratio {ratio}"))?;

    let mixed = ChannelSpec::mixed(vec![
        (0.5, ChannelSpec::dmc(&ConditionalPmf::bsc(0.0).unwrap())),
        (0.5, ChannelSpec::dmc(&ConditionalPmf::bsc(0.5).unwrap())),
    ])
    .build()
    .map_err(e)?;
    let m250 = spectrum_samples(mixed.as_ref(), &input, 250, 10_000, 93).map_err(e)?;
    let m1000 = spectrum_samples(mixed.as_ref(), &input, 1000, 10_000, 94).map_err(e)?;
    let mass = m1000.mass_below(0.1);
    check((0.4..=0.6).contains(&mass), || format!("mass_below(0.1) = {mass}"))?;
    let inf = inf_info_rate_estimate(&[m250, m1000], DEFAULT_DROP_TOL, DEFAULT_GRID_STEP).map_err(e)?;
    check(inf.estimate <= 0.05, || format!("inf-information rate {}", inf.estimate))?;
    Ok(format!(
        "BSC mean {:.4} (target {target:.4}), std ratio {ratio:.3}; mixed mass {mass:.4}, inf rate {}",
        s1000.mean(),
        inf.estimate
    ))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn ucr(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ucr")).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("ucr {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr).trim()))
    }
}

fn recorded_outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap();
    m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|n| {
            let n = n.as_str().unwrap().to_string();
            let bytes = std::fs::read(dir.join(&n)).unwrap();
            (n, bytes)
        })
        .collect()
}

fn c10_replay() -> Result<String, String> {
    let root = std::env::temp_dir().join(format!("ucr-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&root).map_err(|e| e.to_string())?;
    let bsc = write(
        &root,
        "bsc.json",
        r#"{"kind":"dmc","payload":{"alphabet_in":["0","1"],"alphabet_out":["0","1"],"probs":[0.9,0.1,0.1,0.9]}}"#,
    );
    let src = write(
        &root,
        "dsbs.json",
        r#"{"alphabet_x":["0","1"],"alphabet_y":["0","1"],"probs":[0.45,0.05,0.05,0.45]}"#,
    );
    let desc = write(
        &root,
        "run.json",
        r#"{"source":{"alphabet_x":["0","1"],"alphabet_y":["0","1"],"probs":[0.45,0.05,0.05,0.45]},
            "n":200,"mu":0.1,"theta":0.05,"eps_typ":0.15,"trials":400}"#,
    );
    let (bsc, src, desc) = (bsc.to_str().unwrap(), src.to_str().unwrap(), desc.to_str().unwrap());
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("capacity", vec!["capacity", bsc]),
        ("ucr", vec!["ucr", src, "--grid", "0,0.2,0.4,0.6", "--restarts", "20"]),
        ("simulate", vec!["simulate", desc]),
        ("simulate-csv", vec!["simulate", desc, "--format", "csv"]),
        ("spectrum", vec!["spectrum", bsc, "--n", "100,400", "--samples", "2000"]),
        ("lemmas", vec!["lemmas", "--instances", "2000"]),
    ];
    let mut files = 0;
    for (name, args) in &runs {
        let mut per_threads = Vec::new();
        for threads in ["1", "4"] {
            let dir = root.join(format!("{name}-t{threads}"));
            let d = dir.to_str().unwrap();
            let mut a = vec!["--seed", "7", "--threads", threads, "--out-dir", d];
            a.extend(args.iter().copied());
            ucr(&a)?;
            let manifest = dir.join("manifest.json");
            let m = manifest.to_str().unwrap();
            for t in ["1", "4"] {
                ucr(&["--threads", t, "replay", m, "--verify"])?;
            }
            let again = root.join(format!("{name}-t{threads}-replayed"));
            ucr(&["--threads", threads, "--out-dir", again.to_str().unwrap(), "replay", m])?;
            let first = recorded_outputs(&dir);
            check(first == recorded_outputs(&again), || format!("{name}: replayed outputs differ"))?;
            per_threads.push(first);
        }
        check(per_threads[0] == per_threads[1], || format!("{name}: threads 1 vs 4 differ"))?;
        files += per_threads[0].len();
    }
    std::fs::remove_dir_all(&root).ok();
    Ok(format!("{} runs, {files} output files identical across replays and threads {{1, 4}}", runs.len()))
}

fn main() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let lines = vec![
        run("1", Duration::from_secs(1), c1_capacity),
        run("2", Duration::from_secs(10), c2_endpoints),
        run("3", min(10), c3_oracle),
        run("4", min(10), c4_structures),
        run("5", Duration::from_secs(30), c5_telescoping),
        run("6", min(10), c6_interval),
        run("7", min(2), || exact_vs_mc(0.3)),
        run("7b", min(2), c7b_golden),
        run("8", min(10), c8_desk_scale),
        run("9", min(5), c9_spectrum),
        run("10", min(10), c10_replay),
    ];
    for l in &lines {
        let tag = if l.pass { "PASS" } else { "FAIL" };
        let note = if BLOCKED.contains(&l.id) { " [known blocked]" } else { "" };
        println!("criterion {:>3}: {tag}{note} ({:.2?}) {}", l.id, l.elapsed, l.detail);
    }
    for l in &lines {
        if BLOCKED.contains(&l.id) {
            assert!(!l.pass, "criterion {} is listed as blocked but passed", l.id);
            assert!(l.detail.contains("N2 ="), "criterion {} failed for an unanalyzed reason: {}", l.id, l.detail);
        } else {
            assert!(l.pass, "criterion {} failed: {}", l.id, l.detail);
        }
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    println!("acceptance: {passed} of {} pass, {} known blocked", lines.len(), BLOCKED.len());
}
