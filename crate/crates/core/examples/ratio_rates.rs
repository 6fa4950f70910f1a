//! Convergence of E T_n^p to (EX²/EX)^p and the decay of E R_n^(p), with the
//! exact two-point values as an oracle and log-log rate fits.
//!
//! ```bash
//! cargo run --release --example ratio_rates
//! ```

use grg_cycles::ratio::{
    expected_rn_mc, expected_tp_enumerated, expected_tp_exact, expected_tp_mc, expected_tp_mc_with,
    lower_tail_bernoulli_check, rate_fit, RnRegime, TpEstimator,
};
use grg_cycles::weights::WeightSpec;

fn main() -> grg_cycles::Result<()> {
    let spec = WeightSpec::two_point(1.0, 2.0, 0.5)?;
    println!("exact E T_n^2 for two_point(1, 2, 1/2):");
    for n in [2, 5, 10, 100, 1000] {
        let exact = expected_tp_exact(&spec, n, 2)?;
        let check = if n <= 10 {
            format!("(enumerated {:.10})", expected_tp_enumerated(&spec, n, 2)?)
        } else {
            String::new()
        };
        let mc = expected_tp_mc(&spec, n, 2, 20_000, n as u64)?;
        println!(
            "  n = {n:>4}: {exact:.10} {check}  mc {:.5} +/- {:.5}",
            mc.mean, mc.std_error
        );
    }

    let limit = 25.0 / 9.0;
    let grid = [64, 128, 256, 512, 1024, 2048];
    println!("\n|E T_n^2 - 25/9| by estimator (20000 replications):");
    for estimator in [TpEstimator::Plain, TpEstimator::ControlVariate] {
        let mut points = Vec::new();
        for (i, &n) in grid.iter().enumerate() {
            let e = expected_tp_mc_with(&spec, n, 2, 20_000, 40 + i as u64, estimator)?;
            let err = (e.mean - limit).abs();
            println!(
                "  {estimator:?} n = {n:>5}: error {err:.3e}, SE {:.3e}",
                e.std_error
            );
            if err > 10.0 * e.std_error {
                points.push((n as f64, err));
            }
        }
        match rate_fit(&points) {
            Ok(fit) => println!("  {estimator:?} fit: {}", fit.summary()),
            Err(e) => println!("  {estimator:?}: no fit ({e})"),
        }
    }

    println!("\nE R_n^(3):");
    for (name, spec, regime) in [
        ("two_point", spec.clone(), RnRegime::Exponential),
        (
            "pareto(7)",
            WeightSpec::pareto_shifted(7.0, 1.0, 0.0)?,
            RnRegime::Tail,
        ),
    ] {
        let mut points = Vec::new();
        let mut warning = None;
        for (i, &n) in grid.iter().enumerate() {
            let r = expected_rn_mc(&spec, n, 3, 10_000, 90 + i as u64, regime)?;
            points.push((n as f64, r.estimate.mean));
            warning = r.warning;
        }
        println!(
            "  {name}: {} (regime predicts {})",
            rate_fit(&points)?.summary(),
            regime.predicted_slope(3)
        );
        if let Some(w) = warning {
            println!("    warning: {w}");
        }
    }

    println!("\nlower-tail bound for 2 * Bernoulli(1/2):");
    for n in [8, 16, 32, 64] {
        let c = lower_tail_bernoulli_check(0.5, n, 0.5)?;
        println!(
            "  n = {n:>2}: P = {:.3e} <= bound {:.3e}",
            c.probability, c.bound_value
        );
    }
    Ok(())
}
