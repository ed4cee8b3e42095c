//! The dense two-phase simplex solver on its own.
//!
//! `cargo run --example lp_basics`

use conecert::linalg::DenseMatrix;
use conecert::lp::{solve_lp, LinearProgram, LpOutcome};

fn show(name: &str, lp: &LinearProgram) -> conecert::Result<()> {
    match solve_lp(lp)? {
        LpOutcome::Optimal { x, objective } => println!("{name}: optimum {objective} at {x:?}"),
        LpOutcome::Infeasible => println!("{name}: infeasible"),
        LpOutcome::Unbounded { ray } => println!("{name}: unbounded along {ray:?}"),
    }
    Ok(())
}

fn main() -> conecert::Result<()> {
    // min −x − y  s.t.  x + 2y ≤ 4,  3x + y ≤ 6,  x, y ≥ 0
    let g = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]])?;
    show("production", &LinearProgram::new(vec![-1.0, -1.0], g, vec![4.0, 6.0], vec![0.0, 0.0])?)?;

    // x ≥ 1 and x ≤ 0 together
    let g = DenseMatrix::from_rows(&[vec![-1.0], vec![1.0]])?;
    show("contradiction", &LinearProgram::new(vec![1.0], g, vec![-1.0, 0.0], vec![f64::NEG_INFINITY])?)?;

    // min −x with x free and only x ≥ −3 imposed
    let g = DenseMatrix::from_rows(&[vec![-1.0]])?;
    show("open", &LinearProgram::new(vec![-1.0], g, vec![3.0], vec![f64::NEG_INFINITY])?)?;
    Ok(())
}
