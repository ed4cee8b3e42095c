//! Stability under arbitrary versus constrained switching.
//!
//! The virus model's mode `m1` alone is unstable, so no certificate exists
//! when it may be held forever; the automaton forbids that and the linear
//! stability program becomes feasible.
//!
//! `cargo run --example stability`

use conecert::automaton::{arbitrary_switching, Edge, SwitchingGraph};
use conecert::l1cert::{certify_l1_stability, L1Options, StabilityOutcome};
use conecert::l2cert::{certify_l2_stability, L2Options, L2StabilityOutcome};
use conecert::models::{build_virus_example, spectral_radius, SystemKind, VirusParams};

fn describe(o: &StabilityOutcome) -> &'static str {
    match o {
        StabilityOutcome::Stable(_) => "stable (certificate found)",
        StabilityOutcome::Infeasible => "no linear Lyapunov certificate",
    }
}

fn main() -> conecert::Result<()> {
    let virus = build_virus_example(VirusParams::default())?;
    for m in &virus.modes {
        println!("spectral radius of {}: {:.5}", m.name, spectral_radius(&m.a)?);
    }

    let only_m1 = SwitchingGraph::try_new(vec!["v1".into()], vec![Edge::new(0, 0, 0)], 3)?;
    let opts = L1Options::default();
    println!("m1 held forever: {}", describe(&certify_l1_stability(&virus.with_graph(only_m1), opts)?));
    println!("any of m1..m3 at any time: {}", describe(&certify_l1_stability(&virus.with_graph(arbitrary_switching(3)?), opts)?));
    println!("policy automaton: {}", describe(&certify_l1_stability(&virus, opts)?));

    // The quadratic (LMI) test on the same automaton, treating the model as general.
    let mut general = virus.clone();
    general.kind = SystemKind::Gss;
    match certify_l2_stability(&general, &L2Options::default())? {
        L2StabilityOutcome::Stable(c) => println!("quadratic certificate found, P[v1] diagonal = {:.3?}", (0..3).map(|i| c.p[0][(i, i)]).collect::<Vec<_>>()),
        L2StabilityOutcome::NotFound => println!("no quadratic certificate found"),
    }
    Ok(())
}
