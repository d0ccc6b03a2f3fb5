use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nomilp::ilp::SolveStatus;
use nomilp_cli::{nominate, to_json, NominateOptions, NominationDocument};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nomilp"))
}

fn put(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&Path]) -> Output {
    bin().args(args).output().unwrap()
}

const STRICT: &str = "id,d1,d2\na,0.5,0.5\nb,0.4,0.9\nc,0.9,0.4\nd,0.9,0.9\n";

#[test]
fn strict_example_puts_a_first() {
    let dir = TempDir::new().unwrap();
    let m = put(dir.path(), "m.csv", STRICT);
    let s = put(dir.path(), "s.txt", "a\n");
    let out = run(&[Path::new("nominate"), &m, &s]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: NominationDocument = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.objective, 0);
    assert_eq!(doc.status, SolveStatus::Optimal);
    assert_eq!(doc.ranking[0].id, "a");
    assert_eq!(doc.ranking[0].rank, 1);
    assert_eq!(doc.singleton.objective, 1);
    assert_eq!(doc.singleton.column, "d1");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["alpha", "objective", "status", "ranking", "provenance"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn single_column_gets_full_weight() {
    let dir = TempDir::new().unwrap();
    let m = put(dir.path(), "m.csv", "id,d1\nx,0.3\ny,0.1\nz,0.2\n");
    let s = put(dir.path(), "s.txt", "y\n");
    let out = run(&[Path::new("nominate"), &m, &s]);
    let doc: NominationDocument = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.alpha, [1.0]);
    assert_eq!(doc.objective, 0);
}

#[test]
fn bad_input_exits_2_and_names_the_line() {
    let dir = TempDir::new().unwrap();
    let s = put(dir.path(), "s.txt", "a\n");
    let m = put(dir.path(), "bad.csv", "id,d1,d2\na,0.1,0.2\nb,0.3\n");
    let out = run(&[Path::new("nominate"), &m, &s]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let good = put(dir.path(), "m.csv", STRICT);
    let unknown = put(dir.path(), "u.txt", "a\nq\n");
    let out = run(&[Path::new("nominate"), &good, &unknown]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let all = put(dir.path(), "all.txt", "a\nb\nc\nd\n");
    assert_eq!(
        run(&[Path::new("nominate"), &good, &all]).status.code(),
        Some(2)
    );
}

#[test]
fn documents_round_trip_exactly() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut csv = String::from("id,d1,d2,d3\n");
    for i in 0..25 {
        let r: [f64; 3] = [
            rng.random(),
            rng.random::<f64>() * 1e-7,
            rng.random::<f64>() - 0.5,
        ];
        csv.push_str(&format!("v{i},{},{},{}\n", r[0], r[1], r[2]));
    }
    let m = put(dir.path(), "m.csv", &csv);
    let s = put(dir.path(), "s.txt", "v3\nv7\nv11\n");
    let h = put(dir.path(), "h.txt", "v20\n");
    let opts = NominateOptions {
        holdout: Some(h),
        ..NominateOptions::default()
    };
    let out = nominate(&m, &s, &opts, None).unwrap();
    let back: NominationDocument = serde_json::from_str(&out.json).unwrap();
    assert_eq!(back, out.document);
    assert_eq!(to_json(&back), out.json);
    assert!(out.document.provenance.column_shift[2] > 0.0);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let m = put(dir.path(), "m.csv", STRICT);
    let s = put(dir.path(), "s.txt", "b\n");
    let a = run(&[Path::new("nominate"), &m, &s]);
    let b = run(&[Path::new("nominate"), &m, &s]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

fn hard_csv(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from("id,d1,d2,d3,d4\n");
    for i in 0..60 {
        let r: Vec<String> = (0..4).map(|_| rng.random::<f64>().to_string()).collect();
        csv.push_str(&format!("v{i},{}\n", r.join(",")));
    }
    csv
}

#[test]
fn node_limit_exits_3_and_still_writes() {
    let dir = TempDir::new().unwrap();
    let s = put(dir.path(), "s.txt", "v0\nv1\nv2\nv3\nv4\nv5\n");
    let limits = NominateOptions {
        node_limit: 1,
        ..NominateOptions::default()
    };
    let m = (0..20)
        .map(|seed| put(dir.path(), &format!("m{seed}.csv"), &hard_csv(seed)))
        .find(|m| nominate(m, &s, &limits, None).unwrap().exit_code == 3)
        .expect("some instance needs more than one node");
    let out_path = dir.path().join("out.json");
    let out = bin()
        .args(["nominate", "--node-limit", "1", "--trace", "-o"])
        .arg(&out_path)
        .arg(&m)
        .arg(&s)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("depth=0 bound="));
    let doc: NominationDocument = serde_json::from_slice(&fs::read(out_path).unwrap()).unwrap();
    assert_eq!(doc.status, SolveStatus::IterationLimit);
    assert_eq!(doc.ranking.len(), 60);
}

#[test]
fn exported_program_lists_every_constraint() {
    let dir = TempDir::new().unwrap();
    let m = put(dir.path(), "m.csv", STRICT);
    let s = put(dir.path(), "s.txt", "a\n");
    let lp = dir.path().join("p.lp");
    let out = bin()
        .args(["nominate", "--export-lp"])
        .arg(&lp)
        .arg(&m)
        .arg(&s)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(lp).unwrap();
    assert!(text.contains("\nMinimize\n"));
    assert_eq!(text.matches(" r0_").count(), 3);
}

fn scores(dir: &Path, name: &str, values: &[f64]) -> PathBuf {
    let mut text = String::from("case,score\n");
    for (i, v) in values.iter().enumerate() {
        text.push_str(&format!("c{i},{v}\n"));
    }
    put(dir, name, &text)
}

#[test]
fn compare_examples() {
    let dir = TempDir::new().unwrap();
    let a = scores(dir.path(), "ilp.csv", &[0.9, 0.8, 0.7, 0.6, 0.5]);
    let b = scores(dir.path(), "base.csv", &[0.4, 0.4, 0.4, 0.4, 0.4]);
    let out = run(&[Path::new("compare"), &a, &b]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["wilcoxon"]["p_value"].as_f64(), Some(0.03125));
    assert_eq!(v["label_a"], "ilp");

    let swapped = run(&[Path::new("compare"), &b, &a]);
    let w: serde_json::Value = serde_json::from_slice(&swapped.stdout).unwrap();
    for (x, y) in v["differences"]
        .as_array()
        .unwrap()
        .iter()
        .zip(w["differences"].as_array().unwrap())
    {
        assert_eq!(x.as_f64().unwrap(), -y.as_f64().unwrap());
    }

    let same = run(&[Path::new("compare"), &a, &a]);
    assert_ne!(same.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&same.stderr).contains("no nonzero differences"));

    let short = scores(dir.path(), "short.csv", &[0.1, 0.2]);
    assert_eq!(
        run(&[Path::new("compare"), &a, &short]).status.code(),
        Some(2)
    );
}

#[test]
fn simulate_writes_one_row_per_grid_point_and_scheme() {
    let dir = TempDir::new().unwrap();
    let cfg = put(
        dir.path(),
        "sim.cfg",
        "# small run\nn = 21\nalpha_truth_grid = 0, 0.5, 1\nmonte_carlo_reps = 4\nseed = 11\n",
    );
    let table = dir.path().join("t.csv");
    let reps = dir.path().join("r.csv");
    let scores_dir = dir.path().join("scores");
    let out = bin()
        .arg("simulate")
        .arg(&cfg)
        .arg("-o")
        .arg(&table)
        .arg("--replicates")
        .arg(&reps)
        .arg("--scores-dir")
        .arg(&scores_dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&table).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 3 * 3);
    assert!(lines[0].starts_with("alpha_truth,scheme,mean_rr,ci_halfwidth"));
    assert_eq!(
        fs::read_to_string(&reps).unwrap().lines().count(),
        1 + 3 * 4
    );

    let again = bin().arg("simulate").arg(&cfg).output().unwrap();
    assert_eq!(again.stdout, text.as_bytes());

    let cmp = run(&[
        Path::new("compare"),
        &scores_dir.join("ILP.csv"),
        &scores_dir.join("ASE.csv"),
    ]);
    // a tiny run may have too few nonzero differences; either way it must not crash
    assert!(matches!(cmp.status.code(), Some(0) | Some(1)));

    let bad = put(dir.path(), "bad.cfg", "n = 21\nwhat = 1\n");
    let out = bin().arg("simulate").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}
