//! Times the solver on random instances of a given size.
//!
//! `cargo run --release -p nomilp --example scale -- [rows] [cols] [s_size] [count]`

use std::time::Instant;

use nomilp::ilp::{build_model, solve};
use nomilp::{ItemId, PersonalDissimilarityMatrix, SolverConfig, SupervisionInstance};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arg(i: usize, default: usize) -> usize {
    std::env::args()
        .nth(i)
        .and_then(|a| a.parse().ok())
        .unwrap_or(default)
}

fn main() {
    let (rows, cols, s_size, count) = (arg(1, 200), arg(2, 4), arg(3, 10), arg(4, 5));
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..count {
        let data: Vec<f64> = (0..rows * cols).map(|_| rng.random()).collect();
        let m = PersonalDissimilarityMatrix::from_row_major(rows, cols, data).unwrap();
        let s = sample(&mut rng, rows, s_size).into_vec();
        let inst = SupervisionInstance::new(ItemId::new(rows), rows, &s).unwrap();
        let start = Instant::now();
        let sol = solve(&build_model(&m, &inst).unwrap(), &SolverConfig::default()).unwrap();
        println!(
            "instance {i}: objective {} status {} nodes {} lp iterations {} in {:.2} s",
            sol.objective_value,
            sol.status,
            sol.stats.nodes,
            sol.stats.lp_iterations,
            start.elapsed().as_secs_f64()
        );
    }
}
