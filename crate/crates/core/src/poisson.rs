//! Poisson reference laws, empirical count distributions and their distance.
//!
//! Distances follow the `sup_{‖h‖≤1} |E h(Y) − E h(Z)|` convention, which is
//! the full ℓ1 distance `Σ_m |P(m) − Q(m)|` and therefore ranges over `[0, 2]`.
//! [`TvDistance::half_l1`] gives the more common `[0, 1]`-valued number.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use statrs::function::factorial::ln_factorial;

use crate::{Error, Result};

/// Poisson support is truncated once the cumulative mass reaches `1 - TAIL_MASS`.
pub const TAIL_MASS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PoissonModel {
    lambda: f64,
}

impl PoissonModel {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "poisson parameter must be finite and nonnegative, got {lambda}"
            )));
        }
        Ok(PoissonModel { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn pmf(&self, m: u64) -> f64 {
        poisson_pmf(self, m)
    }

    /// Smallest `M` with `P(Z ≤ M) ≥ 1 − TAIL_MASS`, along with the pmf
    /// values `0..=M` and the leftover mass beyond `M`.
    fn truncated(&self) -> (Vec<f64>, f64) {
        let l = self.lambda;
        let hard_stop = (l + 40.0 * l.sqrt() + 100.0).ceil() as u64;
        let mut pmf = Vec::new();
        let mut cdf = 0.0;
        for m in 0..=hard_stop {
            let p = self.pmf(m);
            pmf.push(p);
            cdf += p;
            if cdf >= 1.0 - TAIL_MASS && m as f64 >= l {
                break;
            }
        }
        (pmf, (1.0 - cdf).max(0.0))
    }

    /// Left-continuous inverse CDF: smallest `m` with `P(Z ≤ m) ≥ level`.
    pub fn quantile(&self, level: f64) -> u64 {
        let (pmf, _) = self.truncated();
        quantile_from_pmf(&pmf, level)
    }
}

fn quantile_from_pmf(pmf: &[f64], level: f64) -> u64 {
    let mut cdf = 0.0;
    for (m, p) in pmf.iter().enumerate() {
        cdf += p;
        if cdf >= level {
            return m as u64;
        }
    }
    pmf.len().saturating_sub(1) as u64
}

/// `λ(k) = ratio^k / (2k)` with `ratio = EW²/EW`.
pub fn lambda_k(ratio: f64, k: usize) -> Result<PoissonModel> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "moment ratio must be positive, got {ratio}"
        )));
    }
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "cycle length must be >= 3, got {k}"
        )));
    }
    PoissonModel::new(ratio.powi(k as i32) / (2 * k) as f64)
}

/// `e^{-λ} λ^m / m!`, evaluated in log space.
pub fn poisson_pmf(model: &PoissonModel, m: u64) -> f64 {
    pmf_at(model.lambda, m)
}

fn pmf_at(lambda: f64, m: u64) -> f64 {
    if lambda == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    (m as f64 * lambda.ln() - lambda - ln_factorial(m)).exp()
}

/// Mixed Poisson probability `E[e^{-Λ} Λ^m / m!]`, averaging over the
/// supplied realizations of `Λ`.
pub fn mixed_poisson_pmf(lambda_samples: &[f64], m: u64) -> Result<f64> {
    if lambda_samples.is_empty() {
        return Err(Error::InvalidArgument("no mixing samples".into()));
    }
    if let Some(l) = lambda_samples
        .iter()
        .find(|l| !(**l >= 0.0 && l.is_finite()))
    {
        return Err(Error::InvalidArgument(format!("invalid mixing sample {l}")));
    }
    let sum: f64 = lambda_samples.iter().map(|&l| pmf_at(l, m)).sum();
    Ok(sum / lambda_samples.len() as f64)
}

/// Occurrence counts of nonnegative integer outcomes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmpiricalPmf {
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl EmpiricalPmf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_samples<I: IntoIterator<Item = u64>>(samples: I) -> Self {
        let mut pmf = Self::new();
        for s in samples {
            pmf.add(s);
        }
        pmf
    }

    pub fn add(&mut self, outcome: u64) {
        *self.counts.entry(outcome).or_default() += 1;
        self.total += 1;
    }

    /// Order-independent merge.
    pub fn merge(&mut self, other: &EmpiricalPmf) {
        for (&m, &c) in &other.counts {
            *self.counts.entry(m).or_default() += c;
        }
        self.total += other.total;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn prob(&self, m: u64) -> f64 {
        self.counts
            .get(&m)
            .map_or(0.0, |&c| c as f64 / self.total as f64)
    }

    pub fn max_outcome(&self) -> Option<u64> {
        self.counts.keys().next_back().copied()
    }

    /// `Σ m · pmf(m)`.
    pub fn mean(&self) -> f64 {
        self.counts
            .iter()
            .map(|(&m, _)| m as f64 * self.prob(m))
            .sum()
    }

    /// Unbiased sample variance (divisor `total - 1`).
    pub fn variance(&self) -> f64 {
        if self.total < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let ss: f64 = self
            .counts
            .iter()
            .map(|(&m, &c)| c as f64 * (m as f64 - mean).powi(2))
            .sum();
        ss / (self.total - 1) as f64
    }

    /// Smallest outcome with empirical CDF `≥ level`.
    pub fn quantile(&self, level: f64) -> Result<u64> {
        if self.is_empty() {
            return Err(Error::InvalidArgument("empty empirical law".into()));
        }
        let target = level * self.total as f64;
        let mut cum = 0u64;
        for (&m, &c) in &self.counts {
            cum += c;
            if cum as f64 >= target {
                return Ok(m);
            }
        }
        Ok(self.max_outcome().unwrap())
    }

    /// `outcome,count` rows in increasing outcome order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("outcome,count\n");
        for (m, c) in &self.counts {
            writeln!(out, "{m},{c}").unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut pmf = Self::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let parsed = line
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
            let (m, c): (u64, u64) = parsed.ok_or_else(|| {
                Error::InvalidArgument(format!("bad pmf csv row {}: {line:?}", i + 1))
            })?;
            *pmf.counts.entry(m).or_default() += c;
            pmf.total += c;
        }
        Ok(pmf)
    }
}

/// Either side of a distance computation.
#[derive(Clone, Copy, Debug)]
pub enum Law<'a> {
    Empirical(&'a EmpiricalPmf),
    Poisson(PoissonModel),
}

impl Law<'_> {
    fn upper(&self) -> u64 {
        match self {
            Law::Empirical(e) => e.max_outcome().unwrap_or(0),
            Law::Poisson(p) => p.truncated().0.len() as u64 - 1,
        }
    }

    fn prob(&self, m: u64) -> f64 {
        match self {
            Law::Empirical(e) => e.prob(m),
            Law::Poisson(p) => p.pmf(m),
        }
    }

    /// Mass strictly above `m`.
    fn tail_above(&self, m: u64) -> f64 {
        match self {
            Law::Empirical(e) => {
                e.counts.range(m + 1..).map(|(_, &c)| c).sum::<u64>() as f64 / e.total.max(1) as f64
            }
            Law::Poisson(p) => {
                let head: f64 = (0..=m).map(|j| p.pmf(j)).sum();
                (1.0 - head).max(0.0)
            }
        }
    }
}

/// Distance between two laws on `{0, 1, 2, …}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TvDistance {
    /// `Σ_m |P(m) − Q(m)|` plus `truncation_slack`; an upper bound on the
    /// exact ℓ1 distance, tight to within `truncation_slack`.
    pub value: f64,
    /// Poisson mass beyond the summation range, added to `value`.
    pub truncation_slack: f64,
}

impl TvDistance {
    /// The `[0, 1]` convention, `value / 2`.
    pub fn half_l1(&self) -> f64 {
        self.value / 2.0
    }
}

/// Full ℓ1 distance between two laws (the sup-over-`‖h‖ ≤ 1` convention).
pub fn tv_distance(p: Law<'_>, q: Law<'_>) -> TvDistance {
    let top = p.upper().max(q.upper());
    let head: f64 = (0..=top).map(|m| (p.prob(m) - q.prob(m)).abs()).sum();
    let truncation_slack = p.tail_above(top) + q.tail_above(top);
    TvDistance {
        value: (head + truncation_slack).min(2.0),
        truncation_slack,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QqRow {
    pub level: f64,
    pub empirical_q: u64,
    pub poisson_q: u64,
}

/// Quantile-quantile table of an empirical law against a Poisson model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QqTable {
    pub rows: Vec<QqRow>,
}

impl QqTable {
    /// Pearson correlation between the two quantile columns. `None` when a
    /// column is constant.
    pub fn correlation(&self) -> Option<f64> {
        let n = self.rows.len() as f64;
        if self.rows.len() < 2 {
            return None;
        }
        let xs: Vec<f64> = self.rows.iter().map(|r| r.empirical_q as f64).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| r.poisson_q as f64).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for (x, y) in xs.iter().zip(&ys) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx).powi(2);
            syy += (y - my).powi(2);
        }
        if sxx == 0.0 || syy == 0.0 {
            return None;
        }
        Some(sxy / (sxx * syy).sqrt())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,empirical_q,poisson_q\n");
        for r in &self.rows {
            writeln!(out, "{},{},{}", r.level, r.empirical_q, r.poisson_q).unwrap();
        }
        out
    }
}

/// Plotting positions `(i − 1/2) / count`, `i = 1..=count`.
pub fn qq_levels(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|i| (i as f64 - 0.5) / count as f64)
        .collect()
}

pub fn qq_table(emp: &EmpiricalPmf, model: &PoissonModel, levels: &[f64]) -> Result<QqTable> {
    if emp.is_empty() {
        return Err(Error::InvalidArgument("empty empirical law".into()));
    }
    if let Some(l) = levels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
        return Err(Error::InvalidArgument(format!(
            "quantile level {l} outside (0, 1)"
        )));
    }
    let (pmf, _) = model.truncated();
    let rows = levels
        .iter()
        .map(|&level| {
            Ok(QqRow {
                level,
                empirical_q: emp.quantile(level)?,
                poisson_q: quantile_from_pmf(&pmf, level),
            })
        })
        .collect::<Result<_>>()?;
    Ok(QqTable { rows })
}
