//! Triangle and quadrilateral censuses against their Poisson limits: the
//! triangle histogram and quadrilateral Q-Q data, as CSV.
//!
//! Defaults run n = 2000 with 400 replications; pass
//! smaller values for a quick look.
//!
//! ```bash
//! cargo run --release --example poisson_census -- 2000 400 census
//! ```

use grg_cycles::experiments::{run_census, ExperimentConfig};

fn main() -> grg_cycles::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|a| a.parse().ok()).unwrap_or(2000);
    let replications = args.next().and_then(|a| a.parse().ok()).unwrap_or(400);
    let output = args.next().unwrap_or_else(|| "census".into());

    for k in [3, 4] {
        let config = ExperimentConfig {
            n,
            k,
            replications,
            seed: 2000 + k as u64,
            output: output.clone().into(),
            ..Default::default()
        };
        let result = run_census(&config)?;
        let s = &result.summary;
        println!("k = {k}: lambda(k) = {:.2}", s.lambda_k);
        println!(
            "  mean {:.2} +/- {:.2}, variance/mean {:.3}",
            s.mean, s.std_error, s.dispersion
        );
        if let Some(tv) = s.tv_distance {
            println!("  l1 distance to Poisson {tv:.4} (half: {:.4})", tv / 2.0);
        }
        if let Some(r) = s.qq_correlation {
            println!("  Q-Q correlation {r:.5}");
        }
        for path in result.write(&config)? {
            println!("  wrote {}", path.display());
        }
    }
    Ok(())
}
