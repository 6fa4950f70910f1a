//! Analytic moments of the weight laws, the Poisson parameter λ(k) they
//! imply, and a Monte Carlo sanity check of the first two moments.
//!
//! ```bash
//! cargo run --release --example weight_moments
//! ```

use grg_cycles::poisson::lambda_k;
use grg_cycles::weights::{analytic_moments, sample_weights, tail_condition_holds, WeightSpec};

fn main() -> grg_cycles::Result<()> {
    let specs = [
        WeightSpec::constant(2.0)?,
        WeightSpec::two_point(1.0, 2.0, 0.5)?,
        WeightSpec::empirical(vec![1.0, 3.0, 10.0], vec![0.6, 0.3, 0.1])?,
        WeightSpec::reference_pareto(),
    ];

    println!(
        "{:<16} {:>10} {:>12} {:>10} {:>12} {:>12}",
        "family", "EW", "EW^2", "ratio", "lambda(3)", "lambda(4)"
    );
    for spec in &specs {
        let m = analytic_moments(spec, 2)?;
        println!(
            "{:<16} {:>10.5} {:>12.5} {:>10.5} {:>12.4} {:>12.4}",
            spec.family_name(),
            m.mean,
            m.second_moment,
            m.ratio,
            lambda_k(m.ratio, 3)?.lambda(),
            lambda_k(m.ratio, 4)?.lambda(),
        );
    }

    // Pareto(9.5) has moments of order < 9.5 only.
    let pareto = WeightSpec::reference_pareto();
    let m = analytic_moments(&pareto, 12)?;
    let finite: Vec<_> = (1..=12)
        .zip(&m.finite)
        .map(|(q, f)| format!("{q}:{}", if *f { "y" } else { "n" }))
        .collect();
    println!(
        "\nfinite moments of the pareto weights: {}",
        finite.join(" ")
    );
    for k in 3..=5 {
        println!(
            "tail condition for k = {k}: {}",
            tail_condition_holds(&pareto, k)
        );
    }

    let w = sample_weights(&pareto, 200_000, 7)?;
    let n = w.len() as f64;
    println!(
        "\nsample of {}: mean {:.4} (exact {:.4}), second moment {:.3} (exact {:.3})",
        w.len(),
        w.total() / n,
        m.mean,
        w.sum_of_squares() / n,
        m.second_moment
    );

    // Specs round-trip through the TOML used by config files.
    println!("\n{}", pareto.to_config_text());
    Ok(())
}
