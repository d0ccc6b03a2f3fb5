//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p nomilp-cli --test acceptance`. The process exits
//! nonzero when any criterion fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::DMatrix;
use nomilp::eval::{
    run_simulation, singleton_baseline, wilcoxon_signed_rank, ExperimentConfig, Scheme,
    SimulationMode, TieBreak,
};
use nomilp::ilp::{build_model, solution_to_ranker, solve, IlpSolution, SolveStatus};
use nomilp::oracle::{breakpoint_oracle_j2, grid_oracle, objective_at};
use nomilp::ranking::max_rank_of;
use nomilp::spectral::{ase, probability_matrix, sample_latents, symmetric_eigh};
use nomilp::{ItemId, PersonalDissimilarityMatrix, SolverConfig, SupervisionInstance};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: u32, ok: bool, what: &str, detail: String) {
        if !ok {
            self.failures += 1;
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id}: {what} ({detail})");
    }
}

fn random_instance(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    s_size: usize,
) -> (PersonalDissimilarityMatrix, SupervisionInstance) {
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.random()).collect();
    let m = PersonalDissimilarityMatrix::from_row_major(rows, cols, data).unwrap();
    let s: Vec<usize> = sample(rng, rows, s_size).into_vec();
    let inst = SupervisionInstance::new(ItemId::new(rows), rows, &s).unwrap();
    (m, inst)
}

fn ilp(m: &PersonalDissimilarityMatrix, inst: &SupervisionInstance) -> IlpSolution {
    solve(&build_model(m, inst).unwrap(), &SolverConfig::default()).unwrap()
}

fn criterion_1(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let start = Instant::now();
    let mut agree = 0;
    let mut optimal = 0;
    for _ in 0..100 {
        let rows = rng.random_range(10..=30);
        let s = rng.random_range(1..=5);
        let (m, inst) = random_instance(&mut rng, rows, 2, s);
        let sol = ilp(&m, &inst);
        optimal += usize::from(sol.status == SolveStatus::Optimal);
        agree += usize::from(sol.objective_value == breakpoint_oracle_j2(&m, &inst).unwrap());
    }
    let secs = start.elapsed().as_secs_f64();
    r.line(
        1,
        agree == 100 && optimal == 100 && secs < 60.0,
        "J=2 branch and bound equals breakpoint oracle",
        format!("{agree}/100 agree, {optimal}/100 optimal, {secs:.2} s"),
    );
}

fn criterion_2(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    let mut singleton_violations = 0;
    let mut grid_violations = 0;
    let mut grid_checked = 0;
    for i in 0..100 {
        let cols = 2 + i % 3;
        let rows = rng.random_range(10..=30);
        let s = rng.random_range(1..=5);
        let (m, inst) = random_instance(&mut rng, rows, cols, s);
        let obj = ilp(&m, &inst).objective_value;
        let single = singleton_baseline(&m, &inst, TieBreak::Index).unwrap();
        singleton_violations += usize::from(obj > single.objective(&inst));
        if cols >= 3 {
            grid_checked += 1;
            grid_violations += usize::from(obj > grid_oracle(&m, &inst, 50).unwrap());
        }
    }
    r.line(
        2,
        singleton_violations == 0 && grid_violations == 0,
        "ILP objective never exceeds Singleton or grid(50)",
        format!(
            "{singleton_violations} singleton violations on 100, \
             {grid_violations} grid violations on {grid_checked}"
        ),
    );
}

fn criterion_3(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let mut violations = 0;
    for _ in 0..100 {
        let cols = rng.random_range(2..=4);
        let rows = rng.random_range(10..=30);
        let s = rng.random_range(1..=5);
        let (m, inst) = random_instance(&mut rng, rows, cols, s);
        let sol = ilp(&m, &inst);
        let list = solution_to_ranker(&m, &sol).unwrap();
        violations += usize::from(max_rank_of(&list, inst.s_set()) != s + sol.objective_value);
    }

    // candidate row 0 duplicates supervised row 1 exactly
    let tie = PersonalDissimilarityMatrix::from_columns(&[
        vec![0.2, 0.2, 0.7, 0.9],
        vec![0.3, 0.3, 0.8, 0.6],
    ])
    .unwrap();
    let tie_inst = SupervisionInstance::new(ItemId::new(4), 4, &[1]).unwrap();
    let tie_sol = ilp(&tie, &tie_inst);
    let tie_ok = tie_sol.objective_value == 0
        && objective_at(&tie, &tie_inst, tie_sol.alpha.as_slice()) == 0;
    r.line(
        3,
        violations == 0 && tie_ok,
        "max rank of S equals |S| + objective; exact ties favour S",
        format!(
            "{violations} violations on 100, tie instance objective {}",
            tie_sol.objective_value
        ),
    );
}

fn criterion_4(r: &mut Report) {
    let m = PersonalDissimilarityMatrix::from_columns(&[
        vec![0.5, 0.4, 0.9, 0.9],
        vec![0.5, 0.9, 0.4, 0.9],
    ])
    .unwrap();
    let inst = SupervisionInstance::new(ItemId::new(4), 4, &[0]).unwrap();
    let obj = ilp(&m, &inst).objective_value;
    let singles: Vec<usize> = (0..2)
        .map(|j| {
            let col = PersonalDissimilarityMatrix::from_columns(&[m.column(j)]).unwrap();
            objective_at(&col, &inst, &[1.0])
        })
        .collect();
    r.line(
        4,
        obj == 0 && singles == [1, 1],
        "strict improvement over both singletons",
        format!("ILP {obj}, singletons {singles:?}"),
    );
}

fn criterion_5(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(5005);
    let raw = DMatrix::from_fn(20, 20, |_, _| rng.random_range(-1.0..1.0));
    let sym = (&raw + raw.transpose()) * 0.5;
    let (vals, vecs) = symmetric_eigh(&sym).unwrap();
    let recon =
        &vecs * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals)) * vecs.transpose();
    let recon_err = (recon - &sym).amax();

    let latents = sample_latents(60, &mut rng).unwrap();
    let p = probability_matrix(&latents);
    let y = ase(p.matrix(), 2).unwrap().y;
    let x = latents.matrix();
    let svd = (y.transpose() * x).svd(true, true);
    let w = svd.u.unwrap() * svd.v_t.unwrap();
    let procrustes = (&y * w - x).norm();
    r.line(
        5,
        recon_err < 1e-8 && procrustes < 1e-6,
        "eigendecomposition and ASE recovery",
        format!("reconstruction {recon_err:.2e}, Procrustes residual {procrustes:.2e}"),
    );
}

fn criterion_6(r: &mut Report) {
    let cfg = ExperimentConfig::default();
    let start = Instant::now();
    let out = run_simulation(&cfg).unwrap();
    let noiseless_secs = start.elapsed().as_secs_f64();
    let mut endpoint_misses = 0;
    for rec in &out.replicates {
        let matching = match rec.alpha_truth {
            0.0 => Scheme::Lse,
            1.0 => Scheme::Ase,
            _ => continue,
        };
        endpoint_misses += usize::from(rec.max_rank_of(Scheme::Ilp) != cfg.s_size);
        endpoint_misses += usize::from(rec.max_rank_of(matching) != cfg.s_size);
    }
    let mut worst_gap = f64::INFINITY;
    for chunk in out.rows.chunks(3) {
        let get = |s: Scheme| chunk.iter().find(|row| row.scheme == s).unwrap().mean_rr;
        let gap = get(Scheme::Ilp) - get(Scheme::Ase).min(get(Scheme::Lse));
        worst_gap = worst_gap.min(gap);
    }
    let limit_hits: usize = out.rows.iter().map(|row| row.limit_hits).sum::<usize>() / 3;

    let noisy = ExperimentConfig {
        mode: SimulationMode::NoisyAbar,
        ..ExperimentConfig::default()
    };
    let start = Instant::now();
    let noisy_ok = run_simulation(&noisy).is_ok();
    let noisy_secs = start.elapsed().as_secs_f64();

    r.line(
        6,
        endpoint_misses == 0 && worst_gap >= -0.02 && noisy_ok && noisy_secs < 900.0,
        "simulation endpoints, ILP vs min(ASE, LSE), noisy run time",
        format!(
            "{endpoint_misses} endpoint misses, worst ILP - min gap {worst_gap:+.4}, \
             {limit_hits} limit hits, NoiselessP {noiseless_secs:.1} s, \
             NoisyAbar k=1000 {noisy_secs:.1} s"
        ),
    );
}

/// Average ranks of `|d|` over nonzero entries, computed by direct counting.
fn reference_ranks(d: &[f64]) -> Vec<(f64, bool)> {
    let nz: Vec<f64> = d.iter().copied().filter(|&x| x != 0.0).collect();
    nz.iter()
        .map(|&x| {
            let below = nz.iter().filter(|y| y.abs() < x.abs()).count() as f64;
            let equal = nz.iter().filter(|y| y.abs() == x.abs()).count() as f64;
            (below + (equal + 1.0) / 2.0, x > 0.0)
        })
        .collect()
}

fn criterion_7(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for _ in 0..500 {
        let n = rng.random_range(5..=10);
        let d: Vec<f64> = (0..n)
            .map(|_| rng.random_range(-5i32..=5) as f64 * 0.5)
            .collect();
        let Ok(res) = wilcoxon_signed_rank(&d) else {
            continue;
        };
        let ranked = reference_ranks(&d);
        let w: f64 = ranked.iter().filter(|x| x.1).map(|x| x.0).sum();
        let k = ranked.len();
        let hits = (0u32..1 << k)
            .filter(|mask| {
                let s: f64 = (0..k)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| ranked[i].0)
                    .sum();
                s >= w - 1e-9
            })
            .count();
        let p = hits as f64 / (1u64 << k) as f64;
        worst = worst.max((p - res.p_value).abs());
        checked += 1;
    }
    let five = wilcoxon_signed_rank(&[0.1, 0.2, 0.3, 0.4, 0.5])
        .unwrap()
        .p_value;
    r.line(
        7,
        worst <= 1e-12 && five == 0.03125,
        "exact Wilcoxon p equals enumeration",
        format!("{checked} cases, max |diff| {worst:.1e}, five positives p = {five}"),
    );
}

fn criterion_8(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(8008);
    let mut violations = 0;
    for _ in 0..50 {
        let rows = rng.random_range(10..=30);
        let s = rng.random_range(1..=5);
        let (m, inst) = random_instance(&mut rng, rows, 2, s);
        let oracle = breakpoint_oracle_j2(&m, &inst).unwrap();
        let cols: Vec<Vec<f64>> = (0..2)
            .map(|j| {
                let scale: f64 = rng.random_range(0.01..100.0);
                let shift: f64 = rng.random_range(-10.0..10.0);
                m.column(j).iter().map(|v| scale * v + shift).collect()
            })
            .collect();
        let moved = PersonalDissimilarityMatrix::from_columns(&cols).unwrap();
        let a = ilp(&m, &inst).objective_value;
        let b = ilp(&moved, &inst).objective_value;
        violations += usize::from(a != oracle || b != oracle);
    }
    r.line(
        8,
        violations == 0,
        "column scaling and shifts leave the objective unchanged",
        format!("{violations} violations on 50"),
    );
}

fn run_bin(args: &[&str], dir: &Path) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_nomilp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    let mut bytes = out.stdout;
    bytes.extend(out.status.code().unwrap_or(-1).to_string().bytes());
    bytes
}

fn criterion_9(r: &mut Report) {
    let dir = tempfile::TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9009);
    let mut csv = String::from("id,d1,d2,d3\n");
    for i in 0..40 {
        let v: Vec<String> = (0..3).map(|_| rng.random::<f64>().to_string()).collect();
        csv.push_str(&format!("item{i},{}\n", v.join(",")));
    }
    fs::write(dir.path().join("m.csv"), csv).unwrap();
    fs::write(dir.path().join("s.txt"), "item1\nitem5\nitem9\nitem13\n").unwrap();
    fs::write(dir.path().join("h.txt"), "item20\nitem30\n").unwrap();
    fs::write(
        dir.path().join("sim.cfg"),
        "n = 31\nk = 50\nmode = NoisyAbar\nmonte_carlo_reps = 8\nseed = 42\n",
    )
    .unwrap();
    let runs: [&[&str]; 2] = [
        &[
            "nominate",
            "m.csv",
            "s.txt",
            "--holdout",
            "h.txt",
            "--tie-break",
            "seeded",
            "--seed",
            "17",
            "--restrict-mrr",
            "candidate",
        ],
        &["simulate", "sim.cfg"],
    ];
    let mut identical = 0;
    for args in runs {
        let first = run_bin(args, dir.path());
        let second = run_bin(args, dir.path());
        identical += usize::from(first == second && first.len() > 10);
    }
    r.line(
        9,
        identical == runs.len(),
        "identical inputs give byte-identical documents",
        format!("{identical}/{} commands reproduced", runs.len()),
    );
}

fn main() {
    let mut report = Report { failures: 0 };
    criterion_1(&mut report);
    criterion_2(&mut report);
    criterion_3(&mut report);
    criterion_4(&mut report);
    criterion_5(&mut report);
    criterion_6(&mut report);
    criterion_7(&mut report);
    criterion_8(&mut report);
    criterion_9(&mut report);
    if report.failures > 0 {
        println!("{} criteria failed", report.failures);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
