//! Exact k-cycle counts on a sampled graph, cross-checked against the
//! brute-force counter on a small subgraph, plus canonical cycle listing.
//!
//! ```bash
//! cargo run --release --example cycle_census
//! ```

use grg_cycles::cycles::{
    brute_force_count, candidate_count, count_k_cycles, count_triangles, enumerate_cycles,
    EnumerationMode,
};
use grg_cycles::graph::sample_grg;
use grg_cycles::weights::{sample_weights, WeightSpec, WeightVector};

fn main() -> grg_cycles::Result<()> {
    let spec = WeightSpec::reference_pareto();
    let n = 1500;
    let g = sample_grg(&sample_weights(&spec, n, 11)?, 12)?;
    println!("n = {n}, edges = {}", g.edge_count());
    println!(
        "triangles (adjacency intersection): {}",
        count_triangles(&g)?.count
    );
    for k in 3..=6 {
        let t = std::time::Instant::now();
        let c = count_k_cycles(&g, k)?;
        println!(
            "k = {k}: {:>8} cycles of {:.3e} candidates ({:.2?})",
            c.count,
            candidate_count(n, k)? as f64,
            t.elapsed()
        );
    }

    // A dense 9-vertex graph is small enough to brute force.
    let small = sample_grg(&WeightVector::constant(9, 20.0)?, 3)?;
    println!("\ndense graph on 9 vertices: {} edges", small.edge_count());
    for k in 3..=9 {
        let dfs = count_k_cycles(&small, k)?.count;
        let brute = brute_force_count(&small, k)?.count;
        println!("k = {k}: dfs {dfs:>5}  brute force {brute:>5}");
        assert_eq!(dfs, brute);
    }

    let listed: Vec<String> = enumerate_cycles(&small, 4, EnumerationMode::Present)?
        .take(8)
        .map(|c| c.to_string())
        .collect();
    println!(
        "\nfirst 4-cycles (1-based, canonical): {}",
        listed.join(" ")
    );
    Ok(())
}
