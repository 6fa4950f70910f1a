//! Chen–Stein neighbourhood sums b1, b2 and the conditional mean Λ as n
//! grows, exhaustively for small n and through the closed triangle form
//! beyond the enumeration cap.
//!
//! ```bash
//! cargo run --release --example chen_stein_bounds
//! ```

use grg_cycles::chen_stein::{
    b1_b2_exact, bound_report, lambda_plugin, neighborhood, triangle_sums, LambdaMode, DEFAULT_CAP,
};
use grg_cycles::cycles::CanonicalCycle;
use grg_cycles::ratio::rate_fit;
use grg_cycles::weights::{sample_weights, WeightSpec, WeightVector};

fn main() -> grg_cycles::Result<()> {
    let alpha = CanonicalCycle::canonicalize(&[0, 1, 2])?;
    let around = neighborhood(&alpha, 3, 5, DEFAULT_CAP)?;
    let shown: Vec<String> = around.iter().map(|c| c.to_string()).collect();
    println!(
        "triangles sharing an edge with {alpha} in K5: {}",
        shown.join(" ")
    );

    println!("\nunit weights, k = 3");
    println!("{:>6} {:>12} {:>12} {:>12}", "n", "b1", "b2", "Lambda");
    let mut points = Vec::new();
    for n in [10, 20, 40, 80, 160, 320, 640] {
        let w = WeightVector::constant(n, 1.0)?;
        let s = if n <= 80 {
            b1_b2_exact(&w, 3, DEFAULT_CAP)?
        } else {
            triangle_sums(&w)?
        };
        println!(
            "{n:>6} {:>12.4e} {:>12.4e} {:>12.4e}",
            s.b1, s.b2, s.lambda_capital
        );
        points.push((n as f64, s.b1 + s.b2));
    }
    println!(
        "b1 + b2 fit over the whole grid: {}",
        rate_fit(&points)?.summary()
    );
    println!(
        "b1 + b2 fit over n >= 80:        {}",
        rate_fit(&points[3..])?.summary()
    );

    let spec = WeightSpec::reference_pareto();
    let w = sample_weights(&spec, 300, 5)?;
    let s = triangle_sums(&w)?;
    println!(
        "\nreference Pareto weights, n = 300: b1 {:.4}, b2 {:.4}, Lambda {:.3}, plug-in {:.3}",
        s.b1,
        s.b2,
        s.lambda_capital,
        lambda_plugin(&w, 3)
    );

    let report = bound_report(&spec, 30, 4, 4, 17, DEFAULT_CAP, LambdaMode::Auto)?;
    println!("\naveraged over weight draws, k = 4:\n{}", report.to_json());
    Ok(())
}
