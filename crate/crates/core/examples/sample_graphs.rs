//! Sample a generalized random graph and its Chung–Lu counterpart from the
//! same weights, compare degrees with their expectations, and write the
//! graph as a 1-based edge list.
//!
//! ```bash
//! cargo run --release --example sample_graphs -- 1000
//! ```

use grg_cycles::graph::{edge_probability, sample_chung_lu, sample_grg, GrgGraph};
use grg_cycles::weights::{sample_weights, WeightSpec, WeightVector};

fn expected_degrees(w: &WeightVector) -> Vec<f64> {
    let v = w.values();
    (0..v.len())
        .map(|i| {
            (0..v.len())
                .filter(|&j| j != i)
                .map(|j| edge_probability(v[i], v[j], w.total()).unwrap())
                .sum()
        })
        .collect()
}

fn main() -> grg_cycles::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(1000);
    // A light tail keeps max W² below ΣW, which Chung–Lu needs.
    let spec = WeightSpec::pareto_shifted(6.0, 4.0, 1.0)?;
    let weights = sample_weights(&spec, n, 1)?;

    let grg = sample_grg(&weights, 2)?;
    println!("GRG:      n = {n}, edges = {}", grg.edge_count());
    match sample_chung_lu(&weights, 2) {
        Ok(cl) => println!("Chung-Lu: n = {n}, edges = {}", cl.edge_count()),
        Err(e) => println!("Chung-Lu not applicable: {e}"),
    }

    let expected = expected_degrees(&weights);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights.values()[b].total_cmp(&weights.values()[a]));
    println!(
        "\n{:>6} {:>10} {:>10} {:>8}",
        "vertex", "weight", "E degree", "degree"
    );
    for &v in order.iter().take(5).chain(order.iter().rev().take(3)) {
        println!(
            "{:>6} {:>10.3} {:>10.3} {:>8}",
            v + 1,
            weights.values()[v],
            expected[v],
            grg.degree(v)
        );
    }

    let path = std::env::temp_dir().join(format!("grg_n{n}_seed2.edges"));
    grg.write_edge_list(&path)?;
    let back = GrgGraph::read_edge_list(&path)?;
    assert_eq!(
        back.edges().collect::<Vec<_>>(),
        grg.edges().collect::<Vec<_>>()
    );
    println!("\nwrote {}", path.display());
    Ok(())
}
