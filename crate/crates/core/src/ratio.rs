//! Ratio statistics `T_n = ΣX² / ΣX` and `R_n^(p) = T_n^p M_n² / ΣX`.
//!
//! For i.i.d. positive `X` with finite second moment, `E T_n^p` tends to
//! `(EX²/EX)^p` once the tail is light enough, and `E R_n^(p)` vanishes at a
//! rate set by the tail. This module holds the statistics themselves, exact
//! expectations for two-point laws, Monte Carlo estimators, the exponential
//! lower-tail bound for nonnegative sums, and the log-log rate fit used to
//! read off empirical exponents.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use crate::seed::{self, Purpose};
use crate::weights::{analytic_moments, WeightSpec};
use crate::{Error, Result};

/// Replications per deterministic Monte Carlo chunk.
const CHUNK: u64 = 1024;

/// Largest `n` accepted by [`expected_tp_enumerated`].
pub const ENUMERATION_MAX_N: usize = 12;

fn check_sample(xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    if let Some(x) = xs.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "sample entries must be positive, got {x}"
        )));
    }
    Ok(())
}

fn check_power(p: u32) -> Result<()> {
    if p < 2 {
        return Err(Error::InvalidArgument(format!(
            "power p must be >= 2, got {p}"
        )));
    }
    Ok(())
}

/// `T_n = ΣX² / ΣX`.
pub fn t_statistic(xs: &[f64]) -> Result<f64> {
    check_sample(xs)?;
    Ok(t_unchecked(xs))
}

fn t_unchecked(xs: &[f64]) -> f64 {
    let (s1, s2) = xs.iter().fold((0.0, 0.0), |(a, b), x| (a + x, b + x * x));
    s2 / s1
}

/// `R_n^(p) = T_n^p · M_n² / ΣX` with `M_n = max X_i`.
pub fn r_statistic(xs: &[f64], p: u32) -> Result<f64> {
    check_sample(xs)?;
    check_power(p)?;
    Ok(r_unchecked(xs, p))
}

fn r_unchecked(xs: &[f64], p: u32) -> f64 {
    let (s1, s2, max) = xs.iter().fold((0.0, 0.0, 0.0f64), |(a, b, m), &x| {
        (a + x, b + x * x, m.max(x))
    });
    (s2 / s1).powi(p as i32) * max * max / s1
}

fn two_point_params(spec: &WeightSpec) -> Result<(f64, f64, f64)> {
    match *spec {
        WeightSpec::TwoPoint { x1, x2, prob_x1 } => Ok((x1, x2, prob_x1)),
        _ => Err(Error::InvalidSpec(format!(
            "exact expectation needs a two_point law, got {}",
            spec.family_name()
        ))),
    }
}

/// Exact `E T_n^p` for a two-point law.
///
/// `T_n` depends only on how many of the `n` draws equal `x2`, so the
/// expectation is a binomial mixture over that count.
pub fn expected_tp_exact(spec: &WeightSpec, n: usize, p: u32) -> Result<f64> {
    let (x1, x2, prob_x1) = two_point_params(spec)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let q = 1.0 - prob_x1;
    let sum = (0..=n)
        .map(|j| {
            let lw =
                ln_binomial(n as u64, j as u64) + j as f64 * q.ln() + (n - j) as f64 * prob_x1.ln();
            let (a, b) = (j as f64, (n - j) as f64);
            let t = (a * x2 * x2 + b * x1 * x1) / (a * x2 + b * x1);
            lw.exp() * t.powi(p as i32)
        })
        .sum();
    Ok(sum)
}

/// `E T_n^p` for a two-point law by walking all `2^n` outcomes; a check on
/// [`expected_tp_exact`] for `n ≤ 12`.
pub fn expected_tp_enumerated(spec: &WeightSpec, n: usize, p: u32) -> Result<f64> {
    let (x1, x2, prob_x1) = two_point_params(spec)?;
    if n == 0 || n > ENUMERATION_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "enumeration needs 1 <= n <= {ENUMERATION_MAX_N}, got {n}"
        )));
    }
    let mut xs = vec![0.0; n];
    let mut sum = 0.0;
    for mask in 0u32..1 << n {
        let mut prob = 1.0;
        for (i, x) in xs.iter_mut().enumerate() {
            if mask >> i & 1 == 1 {
                *x = x2;
                prob *= 1.0 - prob_x1;
            } else {
                *x = x1;
                prob *= prob_x1;
            }
        }
        sum += prob * t_unchecked(&xs).powi(p as i32);
    }
    Ok(sum)
}

/// Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub replications: u64,
}

/// Estimator used for `E T_n^p`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TpEstimator {
    /// Sample mean of `T_n^p`.
    #[default]
    Plain,
    /// Sample mean of `T_n^p − c`, where `c` is the first-order expansion of
    /// `(A/B)^p` around `(EX², EX)` in the sample moments `A = ΣX²/n`,
    /// `B = ΣX/n`. `E c = 0`, so the target is unchanged, but the
    /// `O(n^{-1/2})` fluctuation is removed and the `O(1/n)` bias becomes
    /// resolvable. Needs `EX²` finite and known.
    ControlVariate,
}

/// Chan/Welford accumulator; merging in a fixed order keeps results
/// independent of the thread count.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * other.count as f64 / count as f64,
            m2: self.m2 + other.m2 + d * d * (self.count * other.count) as f64 / count as f64,
        }
    }

    fn estimate(&self) -> McEstimate {
        let var = if self.count > 1 {
            self.m2 / (self.count - 1) as f64
        } else {
            0.0
        };
        McEstimate {
            mean: self.mean,
            std_error: (var / self.count as f64).sqrt(),
            replications: self.count,
        }
    }
}

/// Runs `f` once per replication on its own seeded stream and averages.
pub fn monte_carlo<F>(replications: u64, master_seed: u64, f: F) -> McEstimate
where
    F: Fn(&mut seed::Rng) -> f64 + Sync,
{
    let chunks = replications.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Moments::default();
            for r in c * CHUNK..((c + 1) * CHUNK).min(replications) {
                let mut rng = seed::replication_rng(master_seed, r, Purpose::Statistic);
                acc.push(f(&mut rng));
            }
            acc
        })
        .collect();
    parts
        .into_iter()
        .fold(Moments::default(), Moments::merge)
        .estimate()
}

fn draw_sample<R: Rng + ?Sized>(spec: &WeightSpec, buf: &mut [f64], rng: &mut R) {
    for x in buf.iter_mut() {
        *x = spec.draw(rng);
    }
}

fn check_mc(spec: &WeightSpec, n: usize, p: u32, replications: u64) -> Result<WeightSpec> {
    check_power(p)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if replications < 2 {
        return Err(Error::InvalidArgument(
            "need at least 2 replications".into(),
        ));
    }
    spec.clone().validated()
}

/// Monte Carlo `E T_n^p` with the plain sample-mean estimator.
pub fn expected_tp_mc(
    spec: &WeightSpec,
    n: usize,
    p: u32,
    replications: u64,
    seed: u64,
) -> Result<McEstimate> {
    expected_tp_mc_with(spec, n, p, replications, seed, TpEstimator::Plain)
}

pub fn expected_tp_mc_with(
    spec: &WeightSpec,
    n: usize,
    p: u32,
    replications: u64,
    seed: u64,
    estimator: TpEstimator,
) -> Result<McEstimate> {
    let spec = check_mc(spec, n, p, replications)?;
    let moments = analytic_moments(&spec, 2)?;
    let (m1, m2, r) = (moments.mean, moments.second_moment, moments.ratio);
    let pi = p as i32;
    // ∂(A/B)^p/∂A and ∂(A/B)^p/∂B at (EX², EX)
    let (ga, gb) = (
        p as f64 * r.powi(pi - 1) / m1,
        -(p as f64) * r.powi(pi) / m1,
    );
    Ok(monte_carlo(replications, seed, |rng| {
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = spec.draw(rng);
            s1 += x;
            s2 += x * x;
        }
        let tp = (s2 / s1).powi(pi);
        match estimator {
            TpEstimator::Plain => tp,
            TpEstimator::ControlVariate => {
                let (a, b) = (s2 / n as f64, s1 / n as f64);
                tp - (ga * (a - m2) + gb * (b - m1))
            }
        }
    }))
}

/// Moment regime targeted by an `E R_n^(p)` study.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RnRegime {
    /// `P(X ≥ x) = O(x^{-p-7/2})`; rate `n^{-1/2}`.
    Tail,
    /// `p > 8` and `EX^{p+4} < ∞`; rate `n^{-(p-2)/(p+4)}`.
    Moment,
    /// `E e^{εX} < ∞`; rate `(log n)² / n`.
    Exponential,
}

impl RnRegime {
    /// Exponent the regime predicts for `E R_n^(p)` (log factors dropped).
    pub fn predicted_slope(&self, p: u32) -> f64 {
        match self {
            RnRegime::Tail => -0.5,
            RnRegime::Moment => -(p as f64 - 2.0) / (p as f64 + 4.0),
            RnRegime::Exponential => -1.0,
        }
    }
}

/// `None` if `spec` meets the regime's assumption, otherwise a warning.
pub fn regime_warning(spec: &WeightSpec, p: u32, regime: RnRegime) -> Option<String> {
    let shape = match *spec {
        WeightSpec::ParetoShifted { shape, .. } => Some(shape),
        _ => None,
    };
    let pa = p as f64;
    match regime {
        RnRegime::Tail => shape.filter(|&a| a < pa + 3.5).map(|a| {
            format!(
                "tail regime needs P(X >= x) = O(x^-{}), pareto shape is {a}",
                pa + 3.5
            )
        }),
        RnRegime::Moment if p <= 8 => Some(format!("moment regime needs p > 8, got p = {p}")),
        RnRegime::Moment => shape.filter(|&a| a <= pa + 4.0).map(|a| {
            format!(
                "moment regime needs E X^{} finite, pareto shape is {a}",
                p + 4
            )
        }),
        RnRegime::Exponential => shape.map(|a| {
            format!("exponential regime needs an exponential moment, pareto shape {a} has none")
        }),
    }
}

/// Monte Carlo `E R_n^(p)` plus a warning when the spec does not meet the
/// targeted regime's assumption.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RnEstimate {
    pub estimate: McEstimate,
    pub warning: Option<String>,
}

pub fn expected_rn_mc(
    spec: &WeightSpec,
    n: usize,
    p: u32,
    replications: u64,
    seed: u64,
    regime: RnRegime,
) -> Result<RnEstimate> {
    let spec = check_mc(spec, n, p, replications)?;
    let warning = regime_warning(&spec, p, regime);
    let estimate = monte_carlo(replications, seed, |rng| {
        let mut buf = vec![0.0; n];
        draw_sample(&spec, &mut buf, rng);
        r_unchecked(&buf, p)
    });
    Ok(RnEstimate { estimate, warning })
}

/// Exponential bound on the lower tail of a normalized nonnegative sum.
///
/// For independent `η_k ≥ 0` with `E S_n = n` and `Var S_n = σ² n`,
/// `P(S_n ≤ λn) ≤ exp(−(1−λ)² n / (2(σ² + max_k (Eη_k)²)))`. The inputs must
/// already be normalized so that `E S_n = n`.
pub fn lower_tail_bound(lambda_frac: f64, sigma2: f64, max_mean_sq: f64, n: u64) -> Result<f64> {
    if !(lambda_frac > 0.0 && lambda_frac < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda must lie in (0, 1), got {lambda_frac}"
        )));
    }
    if !(sigma2 >= 0.0 && max_mean_sq >= 0.0) || sigma2 + max_mean_sq == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "need sigma2 >= 0, max_mean_sq >= 0, not both zero; got {sigma2}, {max_mean_sq}"
        )));
    }
    let d = 1.0 - lambda_frac;
    Ok((-(d * d) * n as f64 / (2.0 * (sigma2 + max_mean_sq))).exp())
}

/// Exact lower-tail probability next to its exponential bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailBoundCheck {
    pub lambda_frac: f64,
    pub n: u64,
    pub bound_value: f64,
    pub probability: f64,
}

impl TailBoundCheck {
    pub fn holds(&self) -> bool {
        self.probability <= self.bound_value
    }
}

/// Checks the bound for `η = Bernoulli(q) / q` (so `Eη = 1`, `Var η = (1−q)/q`),
/// where `P(S_n ≤ λn)` is an exact binomial sum.
pub fn lower_tail_bernoulli_check(q: f64, n: u64, lambda_frac: f64) -> Result<TailBoundCheck> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "q must lie in (0, 1), got {q}"
        )));
    }
    let bound_value = lower_tail_bound(lambda_frac, (1.0 - q) / q, 1.0, n)?;
    // S_n = J / q with J ~ Bin(n, q); S_n ≤ λn ⇔ J ≤ λnq
    let jmax = (lambda_frac * n as f64 * q + 1e-9).floor() as u64;
    let probability = (0..=jmax.min(n))
        .map(|j| (ln_binomial(n, j) + j as f64 * q.ln() + (n - j) as f64 * (1.0 - q).ln()).exp())
        .sum();
    Ok(TailBoundCheck {
        lambda_frac,
        n,
        bound_value,
        probability,
    })
}

/// Least-squares line through `(log n, log error)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub points: Vec<(f64, f64)>,
    /// Points dropped because their error was not positive.
    pub excluded: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl RateFit {
    pub fn summary(&self) -> String {
        format!(
            "slope={:.6} intercept={:.6} r_squared={:.6} points={} excluded={}",
            self.slope,
            self.intercept,
            self.r_squared,
            self.points.len(),
            self.excluded.len()
        )
    }
}

/// Fits `log error = intercept + slope · log n`. Nonpositive errors are set
/// aside in `excluded`; at least four usable points are required.
pub fn rate_fit(points: &[(f64, f64)]) -> Result<RateFit> {
    let (used, excluded): (Vec<_>, Vec<_>) = points
        .iter()
        .copied()
        .partition(|&(n, e)| n > 0.0 && e > 0.0 && e.is_finite());
    if used.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "rate fit needs at least 4 positive points, got {} ({} excluded)",
            used.len(),
            excluded.len()
        )));
    }
    let xs: Vec<f64> = used.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|(_, e)| e.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "rate fit needs distinct n values".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(RateFit {
        points: used,
        excluded,
        slope,
        intercept,
        r_squared,
    })
}
