use nomilp::eval::{singleton_baseline, TieBreak};
use nomilp::ilp::{build_model, solution_to_ranker, solve, SolveStatus};
use nomilp::oracle::{breakpoint_oracle_j2, grid_oracle};
use nomilp::ranking::max_rank_of;
use nomilp::{ItemId, PersonalDissimilarityMatrix, SolverConfig, SupervisionInstance};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

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

#[test]
fn two_columns_match_breakpoint_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..60 {
        let rows = rng.random_range(10..=30);
        let s = rng.random_range(1..=5);
        let (m, inst) = random_instance(&mut rng, rows, 2, s);
        let sol = solve(&build_model(&m, &inst).unwrap(), &SolverConfig::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_eq!(
            sol.objective_value,
            breakpoint_oracle_j2(&m, &inst).unwrap()
        );
    }
}

#[test]
fn never_worse_than_grid_or_singleton() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for cols in [3, 4] {
        for _ in 0..8 {
            let rows = rng.random_range(10..=20);
            let (m, inst) = random_instance(&mut rng, rows, cols, 3);
            let sol = solve(&build_model(&m, &inst).unwrap(), &SolverConfig::default()).unwrap();
            let single = singleton_baseline(&m, &inst, TieBreak::Index).unwrap();
            assert!(sol.objective_value <= single.objective(&inst));
            assert!(sol.objective_value <= grid_oracle(&m, &inst, 20).unwrap());
        }
    }
}

#[test]
fn strict_ranking_realizes_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let cols = rng.random_range(2..=4);
        let rows = rng.random_range(8..=25);
        let s = rng.random_range(1..=4);
        let (m, inst) = random_instance(&mut rng, rows, cols, s);
        let sol = solve(&build_model(&m, &inst).unwrap(), &SolverConfig::default()).unwrap();
        let list = solution_to_ranker(&m, &sol).unwrap();
        assert_eq!(max_rank_of(&list, inst.s_set()), s + sol.objective_value);
    }
}

#[test]
fn column_scaling_and_shifts_preserve_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..20 {
        let rows = rng.random_range(10..=20);
        let (m, inst) = random_instance(&mut rng, rows, 2, 3);
        let (a, b): (f64, f64) = (rng.random_range(0.1..10.0), rng.random_range(0.1..10.0));
        let (sa, sb): (f64, f64) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let cols = [
            m.column(0).iter().map(|v| a * v + sa).collect::<Vec<_>>(),
            m.column(1).iter().map(|v| b * v + sb).collect::<Vec<_>>(),
        ];
        let t = PersonalDissimilarityMatrix::from_columns(&cols).unwrap();
        let cfg = SolverConfig::default();
        let base = solve(&build_model(&m, &inst).unwrap(), &cfg).unwrap();
        let moved = solve(&build_model(&t, &inst).unwrap(), &cfg).unwrap();
        assert_eq!(base.objective_value, moved.objective_value);
        assert_eq!(
            moved.objective_value,
            breakpoint_oracle_j2(&t, &inst).unwrap()
        );
    }
}

#[test]
fn solving_twice_is_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (m, inst) = random_instance(&mut rng, 40, 3, 5);
    let model = build_model(&m, &inst).unwrap();
    let a = solve(&model, &SolverConfig::default()).unwrap();
    let b = solve(&model, &SolverConfig::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn dropping_a_candidate_never_raises_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..25 {
        let cols = rng.random_range(2..=3);
        let rows = rng.random_range(8..=20);
        let (m, inst) = random_instance(&mut rng, rows, cols, 3);
        let drop = inst.candidates()[rng.random_range(0..inst.candidates().len())];
        let keep: Vec<usize> = (0..rows).filter(|&r| r != drop).collect();
        let data: Vec<f64> = keep.iter().flat_map(|&r| m.row(r).to_vec()).collect();
        let smaller = PersonalDissimilarityMatrix::from_row_major(rows - 1, cols, data).unwrap();
        let s: Vec<usize> = inst
            .s_set()
            .iter()
            .map(|&r| keep.iter().position(|&k| k == r).unwrap())
            .collect();
        let smaller_inst = SupervisionInstance::new(ItemId::new(rows - 1), rows - 1, &s).unwrap();
        let cfg = SolverConfig::default();
        let full = solve(&build_model(&m, &inst).unwrap(), &cfg).unwrap();
        let reduced = solve(&build_model(&smaller, &smaller_inst).unwrap(), &cfg).unwrap();
        assert!(reduced.objective_value <= full.objective_value);
    }
}

#[test]
fn refining_a_lattice_never_hurts() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let (m, inst) = random_instance(&mut rng, 15, 3, 2);
        let coarse = grid_oracle(&m, &inst, 5).unwrap();
        let fine = grid_oracle(&m, &inst, 10).unwrap();
        let finer = grid_oracle(&m, &inst, 40).unwrap();
        assert!(fine <= coarse && finer <= fine);
    }
}
