//! Simulates a random admissible trajectory, checks the storage-function
//! decrease at every step and writes a CSV trace to stdout.
//!
//! `cargo run --example lyapunov_trace > trace.csv`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use conecert::automaton::sample_walk_with;
use conecert::io::write_trace;
use conecert::l1cert::{certify_l1, L1Options, L1Outcome};
use conecert::models::{build_virus_example, VirusParams};
use conecert::simulate::{empirical_gain, lyapunov_decrease_check, random_input, simulate, GainKind};

fn main() -> conecert::Result<()> {
    let system = build_virus_example(VirusParams::default())?;
    let L1Outcome::Certified(cert) = certify_l1(&system, L1Options::default())? else {
        unreachable!("the baseline scenario is certifiable");
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let walk = sample_walk_with(&system.graph, 0, 40, &mut rng)?;
    let w = random_input(&mut rng, system.dims.q, 40, 0.0, 1.0);
    let traj = simulate(&system, &walk, &w, &[0.0; 3])?;
    let report = lyapunov_decrease_check(&system, &cert, &traj)?;
    eprintln!(
        "empirical gain {:.2} <= gamma {:.2}; minimum slack {:.3e}; decrease check {}",
        empirical_gain(&traj, GainKind::L1)?,
        cert.gamma,
        report.min_slack().unwrap(),
        if report.passed() { "passed" } else { "FAILED" }
    );
    write_trace(std::io::stdout(), &system, &traj, Some(&report.values))
}
