use std::path::{Path, PathBuf};
use std::process::{Command, Output};

include!("../../core/tests/golden/ldmc3_bec.rs");

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gracecode-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn gracecode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gracecode")).args(args).output().unwrap()
}

fn run_ok(args: &[&str]) {
    let out = gracecode(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn efun_export_matches_golden_table() {
    let out = scratch("efun").join("e.csv");
    run_ok(&["efun", "--family", "ldmc3-bec", "--dmax", "10", "--out", out.to_str().unwrap()]);
    let table = rows(&out);
    assert_eq!(table.len(), 11);
    for (d, row) in table.iter().enumerate() {
        assert_eq!(row[0], d.to_string());
        let g = golden(d);
        for (i, cell) in row[1..].iter().enumerate() {
            let v: f64 = cell.parse().unwrap();
            let want = g.get(i).copied().unwrap_or(0.0);
            assert!((v - want).abs() <= 1e-6 * want.abs().max(1.0), "d={d} c{i}: {v} vs {want}");
        }
    }
    assert!(Path::new(&format!("{}.manifest.json", out.display())).exists());
}

#[test]
fn repetition_simulation_matches_half_eps_squared() {
    let out = scratch("rep").join("s.csv");
    run_ok(&[
        "simulate", "--ensemble", "repetition:2", "--k", "100000", "--eps-grid", "0.6", "--trials", "50", "--seed", "5",
        "--out", out.to_str().unwrap(),
    ]);
    let row = &rows(&out)[0];
    let (ber, se): (f64, f64) = (row[2].parse().unwrap(), row[3].parse().unwrap());
    assert_eq!(row[5], "50");
    assert!((ber - 0.18).abs() <= 3.0 * se, "ber {ber} stderr {se}");
}

#[test]
fn reruns_and_replays_are_byte_identical() {
    let dir = scratch("replay");
    let (a, b, c) = (dir.join("a.csv"), dir.join("b.csv"), dir.join("c.csv"));
    let base = ["simulate", "--ensemble", "ldmc3", "--k", "2000", "--rate", "0.5", "--alpha-grid", "0.6:1.4:0.4", "--trials", "4", "--seed", "9", "--out"];
    for p in [&a, &b] {
        let mut args = base.to_vec();
        args.push(p.to_str().unwrap());
        run_ok(&args);
    }
    let manifest = format!("{}.manifest.json", a.display());
    run_ok(&["replay", "--manifest", &manifest, "--out", c.to_str().unwrap()]);
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(bytes, std::fs::read(&c).unwrap());
    assert_eq!(rows(&a).len(), 3);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = scratch("threads");
    let mut outputs = Vec::new();
    for t in ["1", "3"] {
        let p = dir.join(format!("t{t}.csv"));
        let st = Command::new(env!("CARGO_BIN_EXE_gracecode"))
            .env("GRACECODE_THREADS", t)
            .args(["simulate", "--ensemble", "ldmc5", "--k", "1000", "--rate", "0.5", "--alpha-grid", "1", "--trials", "6", "--out"])
            .arg(&p)
            .status()
            .unwrap();
        assert!(st.success());
        outputs.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn exit_codes_separate_usage_from_infeasible() {
    let out = scratch("codes").join("x.csv");
    let o = out.to_str().unwrap();
    assert_eq!(gracecode(&["simulate", "--nonsense"]).status.code(), Some(2));
    assert_eq!(gracecode(&["converse", "--bound", "linear2", "--rate", "0.5", "--grid", "0.5", "--out", o]).status.code(), Some(2));
    assert_eq!(gracecode(&["simulate", "--ensemble", "ldmc3", "--k", "10", "--eps-grid", "0:1", "--out", o]).status.code(), Some(2));
    let infeasible = gracecode(&["simulate", "--ensemble", "ldmc5", "--k", "3", "--rate", "0.5", "--eps-grid", "0.5", "--out", o]);
    assert_eq!(infeasible.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&infeasible.stderr).contains("infeasible"));
}

#[test]
fn converse_and_devo_exports() {
    let dir = scratch("curves");
    let c = dir.join("c.csv");
    run_ok(&["converse", "--bound", "shannon", "--rate", "0.5", "--grid", "0:1:0.25", "--out", c.to_str().unwrap()]);
    let t = rows(&c);
    assert_eq!(t.len(), 5);
    assert_eq!(t[0][0], "eps");
    assert_eq!(t[4][3].parse::<f64>().unwrap(), 0.5);
    let d = dir.join("d.csv");
    run_ok(&["devo", "--ensemble", "ldmc3", "--alpha-grid", "0.5:1:0.5", "--iters", "4", "--out", d.to_str().unwrap()]);
    let t = rows(&d);
    assert_eq!(t.len(), 10);
    assert_eq!(t[0][1], "0");
    assert_eq!(t[1][1], "1");
    let q1: f64 = t[1][2].parse().unwrap();
    // One step from zero at alpha = 1/2: 1 - 2 sum_d Poisson(d; 3/2) E_d(0).
    let mut pmf = (-1.5f64).exp();
    let mut e0 = 0.0;
    for d in 0..=10 {
        e0 += pmf * golden(d)[0];
        pmf *= 1.5 / (d + 1) as f64;
    }
    assert!((q1 - (1.0 - 2.0 * e0)).abs() < 1e-6, "{q1}");
}

#[test]
fn optimize_writes_a_reusable_profile() {
    let dir = scratch("opt");
    let p = dir.join("p.txt");
    run_ok(&["optimize", "--components", "XOR:1,XOR:3", "--targets", "1,1.5", "--iters", "10", "--starts", "2", "--out", p.to_str().unwrap()]);
    let d = dir.join("h.csv");
    run_ok(&["histogram", "--ensemble", p.to_str().unwrap(), "--k", "500", "--rate", "0.5", "--alpha", "1", "--bins", "5", "--trials", "2", "--out", d.to_str().unwrap()]);
    let counts: usize = rows(&d).iter().map(|r| r[2].parse::<usize>().unwrap()).sum();
    assert_eq!(counts, 1000);
    assert!(Path::new(&format!("{}.log.csv", p.display())).exists());
}
