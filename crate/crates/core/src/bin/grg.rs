use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use grg_cycles::experiments::{
    run_bounds, run_census, run_moments, run_ratio_study, run_sample, run_threshold,
    ExperimentConfig, GraphModel, RatioStatistic,
};
use grg_cycles::Result;

/// Cycle counts, Poisson approximation and ratio statistics for generalized random graphs.
#[derive(Parser)]
#[command(name = "grg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic weight moments and λ(k).
    Moments(Overrides),
    /// Sample one graph and write it as an edge list.
    Sample(Overrides),
    /// Cycle census over many replications versus Pois(λ(k)).
    Census(Overrides),
    /// Chen–Stein neighbourhood sums over an n grid.
    Bounds(Overrides),
    /// Rate study for E T_n^p or E R_n^(p).
    Ratio(Overrides),
    /// Spectral lower bound and epidemic threshold.
    Threshold(Overrides),
}

/// Flags override values from `--config`.
#[derive(Args)]
struct Overrides {
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    replications: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Worker threads; defaults to $GRG_WORKERS, then to the CPU count.
    #[arg(long)]
    workers: Option<usize>,
    /// Maximum candidate cycles for exhaustive sums.
    #[arg(long)]
    cap: Option<u64>,
    /// Comma-separated n grid for `bounds` and `ratio`.
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    /// `grg` or `chung-lu`.
    #[arg(long)]
    model: Option<String>,
    /// `tp` or `rn` (ratio only).
    #[arg(long)]
    statistic: Option<String>,
    /// Use the plug-in λ for every n (bounds only).
    #[arg(long)]
    plugin_lambda: bool,
    /// Analyze this edge list instead of sampling (threshold only).
    #[arg(long)]
    edge_list: Option<PathBuf>,
}

impl Overrides {
    fn resolve(self, section: &str) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_file(path, section)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(if let Some(v) = self.$field { c.$field = v; })*};
        }
        set!(n, k, p, replications, seed, output, cap, n_grid);
        if self.workers.is_some() {
            c.workers = self.workers;
        }
        if self.edge_list.is_some() {
            c.edge_list = self.edge_list;
        }
        if self.plugin_lambda {
            c.lambda_mode = grg_cycles::chen_stein::LambdaMode::Plugin;
        }
        if let Some(m) = self.model {
            c.model = parse_enum(&m, "model")?;
        }
        if let Some(s) = self.statistic {
            c.statistic = parse_enum::<RatioStatistic>(&s, "statistic")?;
        }
        c.validated()
    }
}

fn parse_enum<T: serde::de::DeserializeOwned>(value: &str, what: &str) -> Result<T> {
    let v = serde_json::Value::String(value.replace('-', "_"));
    serde_json::from_value(v)
        .map_err(|_| grg_cycles::Error::Config(format!("unknown {what} '{value}'")))
}

fn print_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Moments(o) => {
            print!("{}", run_moments(&o.resolve("moments")?)?.to_json());
        }
        Command::Sample(o) => {
            let c = o.resolve("sample")?;
            let (g, path) = run_sample(&c)?;
            let model = if c.model == GraphModel::Grg {
                "grg"
            } else {
                "chung_lu"
            };
            println!("{model} graph: n={} edges={}", g.n(), g.edge_count());
            print_files(&[path]);
        }
        Command::Census(o) => {
            let c = o.resolve("census")?;
            let r = run_census(&c)?;
            let s = &r.summary;
            println!(
                "n={} k={} reps={} mean={:.4} var={:.4} dispersion={:.4} lambda={:.4} tv={}",
                s.n,
                s.k,
                s.replications,
                s.mean,
                s.variance,
                s.dispersion,
                s.lambda_k,
                s.tv_distance.map_or("n/a".into(), |t| format!("{t:.4}"))
            );
            print_files(&r.write(&c)?);
        }
        Command::Bounds(o) => {
            let c = o.resolve("bounds")?;
            let r = run_bounds(&c)?;
            print!("{}", r.summary_csv());
            if let Some(f) = &r.fit {
                println!("b1+b2 fit: {}", f.summary());
            }
            print_files(&r.write(&c)?);
        }
        Command::Ratio(o) => {
            let c = o.resolve("ratio")?;
            let r = run_ratio_study(&c)?;
            print!("{}", r.csv());
            println!("{}", r.fit_summary());
            for note in &r.notes {
                println!("{note}");
            }
            print_files(&r.write(&c)?);
        }
        Command::Threshold(o) => {
            let c = o.resolve("threshold")?;
            let r = run_threshold(&c)?;
            print!("{}", r.csv());
            print_files(&r.write(&c)?);
            r.ensure_bound_holds()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("grg: {e}");
            ExitCode::FAILURE
        }
    }
}
