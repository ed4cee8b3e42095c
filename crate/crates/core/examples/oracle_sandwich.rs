//! Brute-force finite-horizon gains climbing toward the certified bound.
//!
//! `cargo run --release --example oracle_sandwich`

use conecert::automaton::count_walks;
use conecert::l1cert::{certify_l1, L1Options, L1Outcome};
use conecert::models::{build_virus_example, VirusParams};
use conecert::simulate::worst_case_l1_lower_bound;

fn main() -> conecert::Result<()> {
    let system = build_virus_example(VirusParams::default())?;
    let L1Outcome::Certified(cert) = certify_l1(&system, L1Options::default())? else {
        unreachable!("the baseline scenario is certifiable");
    };
    println!("certified gamma = {:.2}", cert.gamma);
    for horizon in [1, 2, 4, 8, 12, 16, 20] {
        let walks: u128 = (0..system.graph.node_count()).map(|v| count_walks(&system.graph, v, horizon).unwrap()).sum();
        let r = worst_case_l1_lower_bound(&system, horizon)?;
        let wit = r.witness.as_ref().unwrap();
        println!(
            "L = {horizon:2}: lower bound {:9.2} ({:5.1}% of gamma) over {walks} walks; impulse on channel {} at t = {}, start {}",
            r.value,
            100.0 * r.value / cert.gamma,
            wit.channel.unwrap() + 1,
            wit.time.unwrap(),
            system.graph.node_name(wit.walk.start),
        );
    }
    Ok(())
}
