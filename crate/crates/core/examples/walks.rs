//! Counting, enumerating and sampling admissible switching sequences.
//!
//! `cargo run --example walks`

use conecert::automaton::{count_walks, enumerate_walks, sample_walk};
use conecert::models::virus_graph;

fn main() -> conecert::Result<()> {
    let g = virus_graph();
    let names: Vec<String> = (1..=g.mode_count()).map(|k| format!("m{k}")).collect();
    for horizon in [1, 4, 8, 16, 32] {
        let counts: Vec<u128> = (0..g.node_count()).map(|v| count_walks(&g, v, horizon).unwrap()).collect();
        println!("walks of length {horizon:2} from v1..v4: {counts:?}");
    }
    println!("length-4 walks from v1:");
    for w in enumerate_walks(&g, 0, 4)? {
        println!("  {}", w.describe(&g, &names));
    }
    println!("a seeded sample: {}", sample_walk(&g, 2, 10, 42)?.describe(&g, &names));
    Ok(())
}
