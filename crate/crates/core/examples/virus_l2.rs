//! ℓ2 certificate for the virus model, bracketed from below by the
//! finite-horizon oracle.
//!
//! `B` is a hundred times larger than `A` here, so the solver rescales the
//! inputs before projecting (see `L2Options::input_scale`). Takes a few
//! seconds in release mode.
//!
//! `cargo run --release --example virus_l2`

use std::time::Instant;

use conecert::l2cert::{certify_l2, check_l2_certificate, default_input_scale, L2Options, L2Outcome};
use conecert::models::{build_virus_example, SystemKind, VirusParams};
use conecert::simulate::worst_case_l2_lower_bound;

fn main() -> conecert::Result<()> {
    let mut system = build_virus_example(VirusParams::default())?;
    // The ℓ2 machinery accepts any sign pattern; relabel to make that explicit.
    system.kind = SystemKind::Gss;
    println!("automatic input scale: {:.1}", default_input_scale(&system));

    let started = Instant::now();
    let cert = match certify_l2(&system, &L2Options::default())? {
        L2Outcome::Certified(c) => c,
        L2Outcome::Infeasible => {
            println!("no certificate found");
            return Ok(());
        }
    };
    println!("gamma = {:.6e} ({:.1?})", cert.gamma, started.elapsed());
    println!("check at margin/2: {}", check_l2_certificate(&system, &cert, cert.margin / 2.0)?.passed());

    for horizon in [5, 10, 15] {
        let oracle = worst_case_l2_lower_bound(&system, horizon)?;
        println!("L={horizon:>2}: oracle² = {:.6e} over {} walks", oracle.value * oracle.value, oracle.walks);
    }
    Ok(())
}
