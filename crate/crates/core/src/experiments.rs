//! Experiment drivers behind the `grg` binary.
//!
//! Each driver takes an [`ExperimentConfig`], runs its replications on a
//! bounded rayon pool and returns plain data; the result types' `write` methods
//! turn that into CSV and JSON files. Replication `r` always draws from the
//! streams [`seed::replication_rng`]`(seed, r, ·)`, and every reduction runs in
//! replication order, so outputs are byte-identical for any worker count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chen_stein::{bound_report, csv_float, BoundReport, LambdaMode, DEFAULT_CAP};
use crate::cycles::count_k_cycles;
use crate::graph::{sample_chung_lu_with, sample_grg_with, GrgGraph};
use crate::poisson::{lambda_k, qq_levels, qq_table, tv_distance, EmpiricalPmf, Law, QqTable};
use crate::ratio::{
    expected_rn_mc, expected_tp_exact, expected_tp_mc, expected_tp_mc_with, rate_fit, McEstimate,
    RateFit, RnRegime, TpEstimator,
};
use crate::seed::{self, Purpose};
use crate::spectral::{threshold_report, ThresholdReport};
use crate::weights::{analytic_moments, sample_weights_with, tail_condition_holds, WeightSpec};
use crate::{Error, Result};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "GRG_WORKERS";

/// Errors below `NOISE_FLOOR_SE` standard errors are excluded from rate fits.
pub const NOISE_FLOOR_SE: f64 = 10.0;

/// Relative floor for errors of zero-variance estimates (pure rounding).
const ROUNDING_FLOOR: f64 = 1e-12;

/// Beyond this `λ(k)` the census skips the Poisson comparison.
pub const MAX_TABULATED_LAMBDA: f64 = 1e7;

const POWER_TOLERANCE: f64 = 1e-10;
const POWER_MAX_ITERS: usize = 100_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphModel {
    #[default]
    Grg,
    ChungLu,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioStatistic {
    /// `E T_n^p` against `(EX²/EX)^p`.
    #[default]
    Tp,
    /// `E R_n^(p)` against 0.
    Rn,
}

/// Settings shared by all drivers; unused fields are ignored by a driver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub weights: WeightSpec,
    pub model: GraphModel,
    pub n: usize,
    pub k: usize,
    pub p: u32,
    pub replications: u64,
    pub seed: u64,
    pub output: PathBuf,
    /// `None` falls back to `GRG_WORKERS`, then to the number of CPUs.
    pub workers: Option<usize>,
    pub cap: u64,
    /// Grid of `n` for `bounds` and `ratio`.
    pub n_grid: Vec<usize>,
    pub lambda_mode: LambdaMode,
    pub statistic: RatioStatistic,
    pub regime: RnRegime,
    pub estimator: TpEstimator,
    /// Number of Q-Q plotting positions; defaults to the replication count.
    pub qq_points: Option<usize>,
    /// Graph to analyze in `threshold` instead of sampling.
    pub edge_list: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            weights: WeightSpec::reference_pareto(),
            model: GraphModel::Grg,
            n: 100,
            k: 3,
            p: 2,
            replications: 100,
            seed: 0,
            output: PathBuf::from("results"),
            workers: None,
            cap: DEFAULT_CAP,
            n_grid: vec![64, 128, 256, 512, 1024],
            lambda_mode: LambdaMode::Auto,
            statistic: RatioStatistic::Tp,
            regime: RnRegime::Tail,
            estimator: TpEstimator::Plain,
            qq_points: None,
            edge_list: None,
        }
    }
}

impl ExperimentConfig {
    /// Parses a config file. Keys come from `[common]`, then from the
    /// `[<section>]` table (which wins); `[weights]` holds the weight law.
    /// Top-level scalar keys are accepted as well.
    pub fn from_toml(text: &str, section: &str) -> Result<Self> {
        let mut root: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let mut merged = toml::Table::new();
        let sections = [
            "common",
            "moments",
            "sample",
            "census",
            "bounds",
            "ratio",
            "threshold",
        ];
        for (key, value) in root.iter() {
            if !sections.contains(&key.as_str()) {
                merged.insert(key.clone(), value.clone());
            }
        }
        for name in ["common", section] {
            match root.remove(name) {
                Some(toml::Value::Table(t)) => merged.extend(t),
                Some(_) => return Err(Error::Config(format!("[{name}] must be a table"))),
                None => {}
            }
        }
        let config: ExperimentConfig = toml::Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        config.validated()
    }

    pub fn from_file(path: impl AsRef<Path>, section: &str) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, section)
    }

    pub fn validated(mut self) -> Result<Self> {
        self.weights = self.weights.validated()?;
        if self.replications == 0 {
            return Err(Error::Config("replications must be >= 1".into()));
        }
        if self.k < 3 {
            return Err(Error::Config(format!("k must be >= 3, got {}", self.k)));
        }
        if self.n < self.k.max(2) {
            return Err(Error::Config(format!(
                "n must be >= max(2, k), got n={} k={}",
                self.n, self.k
            )));
        }
        if self.p < 2 {
            return Err(Error::Config(format!("p must be >= 2, got {}", self.p)));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        Ok(self)
    }

    pub fn worker_count(&self) -> usize {
        self.workers
            .or_else(|| std::env::var(WORKERS_ENV).ok()?.parse().ok())
            .filter(|&w| w > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    /// Runs `f` on a pool with [`Self::worker_count`] threads.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.worker_count())
            .build()
            .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
        Ok(pool.install(f))
    }

    /// `<subcommand>_n<n>_k<k>_seed<seed>`.
    pub fn file_stem(&self, subcommand: &str) -> String {
        format!("{subcommand}_n{}_k{}_seed{}", self.n, self.k, self.seed)
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("summary serializes");
    s.push('\n');
    s
}

/// Weight law summary printed by the `moments` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentsReport {
    pub weights: WeightSpec,
    pub mean: f64,
    pub second_moment: f64,
    pub ratio: f64,
    pub k: usize,
    pub lambda_k: f64,
    pub tail_condition: bool,
    pub finite_moments: Vec<bool>,
}

pub fn run_moments(config: &ExperimentConfig) -> Result<MomentsReport> {
    let m = analytic_moments(&config.weights, 2 * config.k as u32 + 1)?;
    Ok(MomentsReport {
        weights: config.weights.clone(),
        mean: m.mean,
        second_moment: m.second_moment,
        ratio: m.ratio,
        k: config.k,
        lambda_k: lambda_k(m.ratio, config.k)?.lambda(),
        tail_condition: tail_condition_holds(&config.weights, config.k),
        finite_moments: m.finite,
    })
}

impl MomentsReport {
    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// Samples weights and one graph for replication `index`.
pub fn sample_replication(config: &ExperimentConfig, n: usize, index: u64) -> Result<GrgGraph> {
    let mut wrng = seed::replication_rng(config.seed, index, Purpose::Weights);
    let weights = sample_weights_with(&config.weights, n, &mut wrng)?;
    let mut erng = seed::replication_rng(config.seed, index, Purpose::Edges);
    match config.model {
        GraphModel::Grg => sample_grg_with(&weights, &mut erng),
        GraphModel::ChungLu => sample_chung_lu_with(&weights, &mut erng),
    }
}

/// Samples replication 0 and writes it as an edge list.
pub fn run_sample(config: &ExperimentConfig) -> Result<(GrgGraph, PathBuf)> {
    config.install(|| {
        let g = sample_replication(config, config.n, 0)?;
        let name = format!("{}.edges", config.file_stem("sample"));
        let path = write_file(&config.output, &name, &g.to_edge_list())?;
        Ok((g, path))
    })?
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusSummary {
    pub n: usize,
    pub k: usize,
    pub replications: u64,
    pub mean: f64,
    pub variance: f64,
    /// `variance / mean`; 1 for a Poisson law.
    pub dispersion: f64,
    pub std_error: f64,
    pub lambda_k: f64,
    /// Full ℓ1 distance (values in `[0, 2]`). `None` when `λ(k)` is too
    /// large to tabulate the Poisson law.
    pub tv_distance: Option<f64>,
    pub tv_distance_half_l1: Option<f64>,
    pub tv_convention: &'static str,
    pub qq_correlation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusResult {
    pub counts: Vec<u64>,
    pub pmf: EmpiricalPmf,
    pub qq: QqTable,
    pub summary: CensusSummary,
}

impl CensusResult {
    pub const CSV_HEADER: &'static str = "replication_id,k,count";

    pub fn counts_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for (r, c) in self.counts.iter().enumerate() {
            writeln!(out, "{r},{},{c}", self.summary.k).unwrap();
        }
        out
    }

    pub fn write(&self, config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        let stem = config.file_stem("census");
        let dir = &config.output;
        Ok(vec![
            write_file(dir, &format!("{stem}.csv"), &self.counts_csv())?,
            write_file(dir, &format!("{stem}_pmf.csv"), &self.pmf.to_csv())?,
            write_file(dir, &format!("{stem}_qq.csv"), &self.qq.to_csv())?,
            write_file(
                dir,
                &format!("{stem}_summary.json"),
                &to_json(&self.summary),
            )?,
        ])
    }
}

/// Samples `replications` graphs, counts k-cycles in each and compares the
/// empirical law with `Pois(λ(k))`.
pub fn run_census(config: &ExperimentConfig) -> Result<CensusResult> {
    let config = config.clone().validated()?;
    let model = lambda_k(analytic_moments(&config.weights, 2)?.ratio, config.k)?;
    let counts: Vec<u64> = config.install(|| {
        (0..config.replications)
            .into_par_iter()
            .map(|r| {
                let g = sample_replication(&config, config.n, r)?;
                Ok(count_k_cycles(&g, config.k)?.count)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let pmf = EmpiricalPmf::from_samples(counts.iter().copied());
    let (qq, tv) = if model.lambda() <= MAX_TABULATED_LAMBDA {
        let levels = qq_levels(
            config
                .qq_points
                .unwrap_or(config.replications as usize)
                .max(1),
        );
        let qq = qq_table(&pmf, &model, &levels)?;
        (
            qq,
            Some(tv_distance(Law::Empirical(&pmf), Law::Poisson(model))),
        )
    } else {
        (QqTable { rows: Vec::new() }, None)
    };
    let (mean, variance) = (pmf.mean(), pmf.variance());
    let summary = CensusSummary {
        n: config.n,
        k: config.k,
        replications: config.replications,
        mean,
        variance,
        dispersion: if mean > 0.0 {
            variance / mean
        } else {
            f64::NAN
        },
        std_error: (variance / config.replications as f64).sqrt(),
        lambda_k: model.lambda(),
        tv_distance: tv.map(|t| t.value),
        tv_distance_half_l1: tv.map(|t| t.half_l1()),
        tv_convention: "l1 (sup over |h| <= 1), range [0, 2]",
        qq_correlation: qq.correlation(),
    };
    Ok(CensusResult {
        counts,
        pmf,
        qq,
        summary,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsResult {
    pub k: usize,
    pub reports: Vec<BoundReport>,
    /// Fit of `log(E b1 + E b2)` against `log n`; `None` with fewer than four grid points.
    pub fit: Option<RateFit>,
}

impl BoundsResult {
    pub const CSV_HEADER: &'static str =
        "n,k,replications,b1,b2,lambda_capital,lambda_target,gap,rhs";

    pub fn summary_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.reports {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.n,
                r.k,
                r.replications,
                csv_float(r.b1),
                csv_float(r.b2),
                csv_float(r.lambda_capital),
                csv_float(r.lambda_target),
                csv_float(r.gap),
                csv_float(r.rhs)
            )
            .unwrap();
        }
        out
    }

    pub fn replications_csv(&self) -> String {
        let mut out = format!("{}\n", BoundReport::CSV_HEADER);
        for r in &self.reports {
            out.extend(r.to_csv().lines().skip(1).map(|l| format!("{l}\n")));
        }
        out
    }

    pub fn write(&self, config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        let stem = format!("bounds_k{}_seed{}", config.k, config.seed);
        let dir = &config.output;
        Ok(vec![
            write_file(dir, &format!("{stem}.csv"), &self.summary_csv())?,
            write_file(
                dir,
                &format!("{stem}_replications.csv"),
                &self.replications_csv(),
            )?,
            write_file(dir, &format!("{stem}_summary.json"), &to_json(self))?,
        ])
    }
}

/// Chen–Stein quantities over `config.n_grid`, with a rate fit of `b1 + b2`.
pub fn run_bounds(config: &ExperimentConfig) -> Result<BoundsResult> {
    let config = config.clone().validated()?;
    if config.n_grid.is_empty() {
        return Err(Error::Config("bounds needs a nonempty n_grid".into()));
    }
    let reports = config.install(|| {
        config
            .n_grid
            .iter()
            .map(|&n| {
                bound_report(
                    &config.weights,
                    n,
                    config.k,
                    config.replications,
                    config.seed,
                    config.cap,
                    config.lambda_mode,
                )
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let fit = if reports.len() >= 4 {
        let pts: Vec<_> = reports.iter().map(|r| (r.n as f64, r.b1 + r.b2)).collect();
        Some(rate_fit(&pts)?)
    } else {
        None
    };
    Ok(BoundsResult {
        k: config.k,
        reports,
        fit,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub n: usize,
    pub estimate: f64,
    pub std_error: f64,
    pub abs_error: f64,
    /// Whether the error cleared the noise floor and entered the fit.
    pub in_fit: bool,
}

/// Exact-versus-Monte-Carlo rows for two-point laws.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleRow {
    pub n: usize,
    pub p: u32,
    pub exact: f64,
    pub estimate: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioResult {
    pub statistic: RatioStatistic,
    pub p: u32,
    pub limit: f64,
    pub rows: Vec<RatioRow>,
    pub fit: Option<RateFit>,
    pub oracle_rows: Vec<OracleRow>,
    /// Regime warning or noise-floor note.
    pub notes: Vec<String>,
}

impl RatioResult {
    pub const CSV_HEADER: &'static str = "n,estimate,std_error,abs_error";

    pub fn csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            writeln!(
                out,
                "{},{:e},{:e},{:e}",
                r.n, r.estimate, r.std_error, r.abs_error
            )
            .unwrap();
        }
        out
    }

    /// One line: the fit, or why there is none.
    pub fn fit_summary(&self) -> String {
        match &self.fit {
            Some(f) => f.summary(),
            None => format!(
                "no fit: {} of {} points above the noise floor",
                self.rows.iter().filter(|r| r.in_fit).count(),
                self.rows.len()
            ),
        }
    }

    pub fn write(&self, config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        let stat = match self.statistic {
            RatioStatistic::Tp => "tp",
            RatioStatistic::Rn => "rn",
        };
        let stem = format!("ratio_{stat}_p{}_seed{}", self.p, config.seed);
        let dir = &config.output;
        let mut files = vec![
            write_file(dir, &format!("{stem}.csv"), &self.csv())?,
            write_file(
                dir,
                &format!("{stem}_fit.txt"),
                &format!("{}\n", self.fit_summary()),
            )?,
            write_file(dir, &format!("{stem}_summary.json"), &to_json(self))?,
        ];
        if !self.oracle_rows.is_empty() {
            let mut csv = String::from("n,p,exact,estimate,std_error\n");
            for o in &self.oracle_rows {
                writeln!(
                    csv,
                    "{},{},{:e},{:e},{:e}",
                    o.n, o.p, o.exact, o.estimate, o.std_error
                )
                .unwrap();
            }
            files.push(write_file(dir, &format!("{stem}_oracle.csv"), &csv)?);
        }
        Ok(files)
    }
}

fn error_row(n: usize, est: McEstimate, limit: f64) -> RatioRow {
    let abs_error = (est.mean - limit).abs();
    let floor =
        (NOISE_FLOOR_SE * est.std_error).max(ROUNDING_FLOOR * limit.abs().max(est.mean.abs()));
    RatioRow {
        n,
        estimate: est.mean,
        std_error: est.std_error,
        abs_error,
        in_fit: abs_error > floor,
    }
}

/// Rate study of `E T_n^p − (EX²/EX)^p` or `E R_n^(p)` over `config.n_grid`.
///
/// Grid point `i` uses master seed `config.seed + i`.
pub fn run_ratio_study(config: &ExperimentConfig) -> Result<RatioResult> {
    let config = config.clone().validated()?;
    if config.n_grid.is_empty() {
        return Err(Error::Config("ratio study needs a nonempty n_grid".into()));
    }
    let p = config.p;
    let spec = &config.weights;
    let mut notes = Vec::new();
    let (limit, rows) = config.install(|| -> Result<_> {
        match config.statistic {
            RatioStatistic::Tp => {
                let m = analytic_moments(spec, 2)?;
                let limit = m.ratio.powi(p as i32);
                let rows = config
                    .n_grid
                    .iter()
                    .enumerate()
                    .map(|(i, &n)| {
                        let seed = config.seed.wrapping_add(i as u64);
                        let est = expected_tp_mc_with(
                            spec,
                            n,
                            p,
                            config.replications,
                            seed,
                            config.estimator,
                        )?;
                        Ok(error_row(n, est, limit))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((limit, rows))
            }
            RatioStatistic::Rn => {
                let rows = config
                    .n_grid
                    .iter()
                    .enumerate()
                    .map(|(i, &n)| {
                        let seed = config.seed.wrapping_add(i as u64);
                        let est =
                            expected_rn_mc(spec, n, p, config.replications, seed, config.regime)?;
                        Ok(error_row(n, est.estimate, 0.0))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((0.0, rows))
            }
        }
    })??;
    if config.statistic == RatioStatistic::Rn {
        if let Some(w) = crate::ratio::regime_warning(spec, p, config.regime) {
            notes.push(format!("warning: {w}"));
        }
    }
    let pts: Vec<_> = rows
        .iter()
        .filter(|r| r.in_fit)
        .map(|r| (r.n as f64, r.abs_error))
        .collect();
    let fit = if pts.len() >= 4 {
        Some(rate_fit(&pts)?)
    } else {
        None
    };
    if fit.is_none() {
        notes.push(format!(
            "below noise floor: {} of {} errors exceed max({NOISE_FLOOR_SE} SE, rounding)",
            pts.len(),
            rows.len()
        ));
    }
    let oracle_rows =
        if matches!(spec, WeightSpec::TwoPoint { .. }) && config.statistic == RatioStatistic::Tp {
            config.install(|| {
                [2usize, 5, 10]
                    .iter()
                    .map(|&n| {
                        let est = expected_tp_mc(
                            spec,
                            n,
                            p,
                            config.replications.max(2),
                            config.seed ^ 0x5eed,
                        )?;
                        Ok(OracleRow {
                            n,
                            p,
                            exact: expected_tp_exact(spec, n, p)?,
                            estimate: est.mean,
                            std_error: est.std_error,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })??
        } else {
            Vec::new()
        };
    Ok(RatioResult {
        statistic: config.statistic,
        p,
        limit,
        rows,
        fit,
        oracle_rows,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdResult {
    pub reports: Vec<ThresholdReport>,
}

impl ThresholdResult {
    pub const CSV_HEADER: &'static str =
        "graph,n,edges,triangles,lower_bound,lambda1_estimate,tau_estimate,tau_upper_bound,bound_holds";

    pub fn csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for (i, r) in self.reports.iter().enumerate() {
            writeln!(
                out,
                "{i},{},{},{},{},{},{},{},{}",
                r.n,
                r.edges,
                r.triangles,
                r.lower_bound,
                r.lambda1_estimate,
                r.tau_estimate,
                r.tau_upper_bound,
                r.bound_holds
            )
            .unwrap();
        }
        out
    }

    /// Errors naming the first graph whose lower bound exceeds the estimate.
    pub fn ensure_bound_holds(&self) -> Result<()> {
        match self.reports.iter().position(|r| !r.bound_holds) {
            Some(i) => Err(Error::InvalidArgument(format!(
                "graph {i}: spectral lower bound {} exceeds power-iteration estimate {}",
                self.reports[i].lower_bound, self.reports[i].lambda1_estimate
            ))),
            None => Ok(()),
        }
    }

    pub fn write(&self, config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        let stem = config.file_stem("threshold");
        Ok(vec![write_file(
            &config.output,
            &format!("{stem}.csv"),
            &self.csv(),
        )?])
    }
}

/// Spectral bound versus power iteration, either on `config.edge_list` or on
/// `config.replications` sampled graphs.
pub fn run_threshold(config: &ExperimentConfig) -> Result<ThresholdResult> {
    if let Some(path) = &config.edge_list {
        let g = GrgGraph::read_edge_list(path)?;
        let r = threshold_report(&g, POWER_TOLERANCE, POWER_MAX_ITERS)?;
        return Ok(ThresholdResult { reports: vec![r] });
    }
    let config = config.clone().validated()?;
    let reports = config.install(|| {
        (0..config.replications)
            .into_par_iter()
            .map(|r| {
                let g = sample_replication(&config, config.n, r)?;
                threshold_report(&g, POWER_TOLERANCE, POWER_MAX_ITERS)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(ThresholdResult { reports })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_sections_and_defaults() {
        let text = r#"
            [weights]
            family = "two_point"
            x1 = 1.0
            x2 = 2.0
            prob_x1 = 0.5

            [common]
            n = 50
            seed = 7
            replications = 10

            [census]
            k = 4
            replications = 20
        "#;
        let c = ExperimentConfig::from_toml(text, "census").unwrap();
        assert_eq!((c.n, c.k, c.seed, c.replications), (50, 4, 7, 20));
        assert_eq!(c.weights, WeightSpec::two_point(1.0, 2.0, 0.5).unwrap());
        let c = ExperimentConfig::from_toml(text, "bounds").unwrap();
        assert_eq!((c.k, c.replications), (3, 10));
        assert_eq!(c.cap, DEFAULT_CAP);

        assert!(ExperimentConfig::from_toml("[common]\nreplications = 0\n", "census").is_err());
        assert!(ExperimentConfig::from_toml("[common]\nn = 2\nk = 3\n", "census").is_err());
        assert!(ExperimentConfig::from_toml("[common]\nbogus = 1\n", "census").is_err());
    }

    #[test]
    fn file_names_embed_parameters() {
        let c = ExperimentConfig {
            n: 12,
            k: 4,
            seed: 3,
            ..Default::default()
        };
        assert_eq!(c.file_stem("census"), "census_n12_k4_seed3");
    }

    #[test]
    fn census_mean_is_pmf_mean() {
        let c = ExperimentConfig {
            n: 60,
            k: 3,
            replications: 30,
            seed: 5,
            workers: Some(1),
            ..Default::default()
        };
        let r = run_census(&c).unwrap();
        assert_eq!(r.counts.len(), 30);
        let m: f64 = r
            .pmf
            .counts()
            .iter()
            .map(|(&m, _)| m as f64 * r.pmf.prob(m))
            .sum();
        assert_eq!(r.summary.mean, m);
        assert_eq!(r.counts_csv().lines().count(), 31);
    }

    #[test]
    fn huge_weights_give_one_triangle() {
        let c = ExperimentConfig {
            weights: WeightSpec::constant(1e9).unwrap(),
            n: 3,
            k: 3,
            replications: 50,
            workers: Some(1),
            ..Default::default()
        };
        let r = run_census(&c).unwrap();
        assert!(r.counts.iter().all(|&c| c == 1));
        assert_eq!(r.summary.tv_distance, None);
    }

    #[test]
    fn constant_ratio_study_hits_noise_floor() {
        let c = ExperimentConfig {
            weights: WeightSpec::constant(1.5).unwrap(),
            p: 2,
            replications: 100,
            n_grid: vec![8, 16, 32, 64, 128],
            workers: Some(1),
            ..Default::default()
        };
        let r = run_ratio_study(&c).unwrap();
        assert!(r.fit.is_none());
        assert!(r
            .rows
            .iter()
            .all(|row| !row.in_fit && row.abs_error < 1e-12));
        assert!(r.notes.iter().any(|n| n.contains("noise floor")));

        let c = ExperimentConfig {
            statistic: RatioStatistic::Rn,
            regime: RnRegime::Exponential,
            ..c
        };
        let r = run_ratio_study(&c).unwrap();
        assert!((r.fit.unwrap().slope + 1.0).abs() < 1e-9);
    }
}
