//! A general system lifted onto the PSD cone: rank-one lifted trajectories are
//! the outer products of ordinary ones, and `trace Z(t) = ‖z(t)‖²`.
//!
//! `cargo run --example lifting`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use conecert::automaton::{arbitrary_switching, sample_walk_with};
use conecert::l2cert::simulate_lifted;
use conecert::linalg::DenseMatrix;
use conecert::models::{random_system, Dimensions, SystemKind};
use conecert::simulate::{random_input, simulate};

fn main() -> conecert::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let system = random_system(&mut rng, SystemKind::Gss, Dimensions { n: 3, q: 2, r: 2 }, arbitrary_switching(2)?, -0.6..0.6)?;
    let walk = sample_walk_with(&system.graph, 0, 12, &mut rng)?;
    let w = random_input(&mut rng, 2, 12, -1.0, 1.0);
    let x0 = [0.5, -1.0, 0.25];
    let traj = simulate(&system, &walk, &w, &x0)?;

    let lifted_inputs: Vec<_> =
        (0..12).map(|t| (DenseMatrix::outer(&traj.x[t], &w[t]), DenseMatrix::outer(&w[t], &w[t]))).collect();
    let lifted = simulate_lifted(&system, &walk.labels(), &DenseMatrix::outer(&x0, &x0), &lifted_inputs)?;

    let mut worst: f64 = 0.0;
    for t in 0..=12 {
        worst = worst.max(lifted.x[t].max_abs_diff(&DenseMatrix::outer(&traj.x[t], &traj.x[t])));
    }
    for t in 0..12 {
        let zz: f64 = traj.z[t].iter().map(|v| v * v).sum();
        worst = worst.max((lifted.z[t].trace() - zz).abs());
    }
    println!("walk {}", walk.describe(&system.graph, &system.mode_names()));
    println!("largest deviation between lifted and squared trajectories: {worst:.2e}");
    Ok(())
}
