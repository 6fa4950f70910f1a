//! Vertex weight laws.
//!
//! A [`WeightSpec`] describes the common law of the i.i.d. weights
//! `W_1, …, W_n`; [`sample_weights`] draws a [`WeightVector`] from it and
//! [`analytic_moments`] gives the closed-form moments that feed the Poisson
//! parameter `λ(k) = (EW²/EW)^k / 2k`.

use rand::distributions::{Distribution, Open01};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{seed, Error, Result};

/// Tolerance on `Σp = 1` for empirical laws, checked before renormalizing.
const EMPIRICAL_SUM_TOL: f64 = 1e-12;

/// Parametric law of a single vertex weight.
///
/// Serialized as a flat key-value block tagged by `family`, e.g.
///
/// ```toml
/// family = "pareto_shifted"
/// shape = 9.5
/// scale = 10.0
/// loc = 1.0
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    /// Degenerate law at `value`.
    Constant { value: f64 },
    /// `W = scale * Y + loc` with `Y` Pareto of shape `shape` and unit minimum,
    /// i.e. `P(Y > y) = y^{-shape}` for `y ≥ 1`.
    ParetoShifted { shape: f64, scale: f64, loc: f64 },
    /// `W = x1` with probability `prob_x1`, else `x2`.
    TwoPoint { x1: f64, x2: f64, prob_x1: f64 },
    /// Finite discrete law.
    Empirical { values: Vec<f64>, probs: Vec<f64> },
}

impl WeightSpec {
    pub fn constant(value: f64) -> Result<Self> {
        WeightSpec::Constant { value }.validated()
    }

    pub fn pareto_shifted(shape: f64, scale: f64, loc: f64) -> Result<Self> {
        WeightSpec::ParetoShifted { shape, scale, loc }.validated()
    }

    pub fn two_point(x1: f64, x2: f64, prob_x1: f64) -> Result<Self> {
        WeightSpec::TwoPoint { x1, x2, prob_x1 }.validated()
    }

    /// Empirical law; `probs` must sum to one within `1e-12` and is then
    /// renormalized exactly.
    pub fn empirical(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        WeightSpec::Empirical { values, probs }.validated()
    }

    /// Reference heavy-tailed law used by the census defaults:
    /// `10 * Pareto(9.5) + 1`.
    pub fn reference_pareto() -> Self {
        WeightSpec::ParetoShifted {
            shape: 9.5,
            scale: 10.0,
            loc: 1.0,
        }
    }

    /// Checks the parameter invariants and renormalizes empirical laws.
    pub fn validated(self) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match self {
            WeightSpec::Constant { value } => {
                if !(value > 0.0 && value.is_finite()) {
                    return bad(format!("constant value must be positive, got {value}"));
                }
                Ok(self)
            }
            WeightSpec::ParetoShifted { shape, scale, loc } => {
                if !(shape > 0.0 && shape.is_finite()) {
                    return bad(format!("pareto shape must be positive, got {shape}"));
                }
                if !(scale > 0.0 && scale.is_finite()) {
                    return bad(format!("pareto scale must be positive, got {scale}"));
                }
                if !(loc >= 0.0 && loc.is_finite()) {
                    return bad(format!("pareto loc must be nonnegative, got {loc}"));
                }
                Ok(self)
            }
            WeightSpec::TwoPoint { x1, x2, prob_x1 } => {
                if !(x1 > 0.0 && x2 > 0.0 && x1.is_finite() && x2.is_finite()) {
                    return bad(format!(
                        "two-point support must be positive, got {x1}, {x2}"
                    ));
                }
                if x1 == x2 {
                    return bad("two-point support points must differ".into());
                }
                if !(prob_x1 > 0.0 && prob_x1 < 1.0) {
                    return bad(format!("prob_x1 must lie in (0, 1), got {prob_x1}"));
                }
                Ok(self)
            }
            WeightSpec::Empirical { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return bad(format!(
                        "empirical law needs matching nonempty values/probs ({} vs {})",
                        values.len(),
                        probs.len()
                    ));
                }
                if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                    return bad(format!("empirical support must be positive, got {v}"));
                }
                if let Some(p) = probs.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
                    return bad(format!(
                        "empirical probabilities must be nonnegative, got {p}"
                    ));
                }
                let sum: f64 = probs.iter().sum();
                if (sum - 1.0).abs() > EMPIRICAL_SUM_TOL {
                    return bad(format!("empirical probabilities sum to {sum}, not 1"));
                }
                let probs = probs.into_iter().map(|p| p / sum).collect();
                Ok(WeightSpec::Empirical { values, probs })
            }
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            WeightSpec::Constant { .. } => "constant",
            WeightSpec::ParetoShifted { .. } => "pareto_shifted",
            WeightSpec::TwoPoint { .. } => "two_point",
            WeightSpec::Empirical { .. } => "empirical",
        }
    }

    /// Parses a structured text block (TOML key-value pairs).
    pub fn from_config_text(text: &str) -> Result<Self> {
        let spec: WeightSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validated()
    }

    pub fn to_config_text(&self) -> String {
        toml::to_string(self).expect("weight spec is always representable as TOML")
    }

    /// Draws a single weight.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            WeightSpec::Constant { value } => value,
            WeightSpec::ParetoShifted { shape, scale, loc } => {
                let u: f64 = Open01.sample(rng);
                scale * u.powf(-1.0 / shape) + loc
            }
            WeightSpec::TwoPoint { x1, x2, prob_x1 } => {
                if rng.gen::<f64>() < prob_x1 {
                    x1
                } else {
                    x2
                }
            }
            WeightSpec::Empirical {
                ref values,
                ref probs,
            } => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *v;
                    }
                }
                // rounding left `acc` just below 1
                *values.last().unwrap()
            }
        }
    }

    /// Raw moment `E W^order`, or an error when it is infinite.
    pub fn raw_moment(&self, order: u32) -> Result<f64> {
        let q = order as i32;
        Ok(match *self {
            WeightSpec::Constant { value } => value.powi(q),
            WeightSpec::ParetoShifted { shape, scale, loc } => {
                if shape <= order as f64 {
                    return Err(Error::InfiniteMoment { order, shape });
                }
                // E(scale Y + loc)^q = Σ_j C(q, j) scale^j loc^{q-j} E Y^j
                let mut binom = 1.0;
                let mut sum = 0.0;
                for j in 0..=order {
                    let ey = shape / (shape - j as f64);
                    sum += binom * scale.powi(j as i32) * loc.powi(q - j as i32) * ey;
                    binom = binom * (order - j) as f64 / (j + 1) as f64;
                }
                sum
            }
            WeightSpec::TwoPoint { x1, x2, prob_x1 } => {
                prob_x1 * x1.powi(q) + (1.0 - prob_x1) * x2.powi(q)
            }
            WeightSpec::Empirical {
                ref values,
                ref probs,
            } => values.iter().zip(probs).map(|(v, p)| p * v.powi(q)).sum(),
        })
    }

    /// Whether `E W^order` is finite.
    pub fn moment_is_finite(&self, order: u32) -> bool {
        match *self {
            WeightSpec::ParetoShifted { shape, .. } => shape > order as f64,
            _ => true,
        }
    }
}

/// A sampled weight sequence `W_1, …, W_n` with its total `L_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    values: Vec<f64>,
    total: f64,
}

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument(
                "weight vector must be nonempty".into(),
            ));
        }
        if let Some((i, w)) = values
            .iter()
            .enumerate()
            .find(|(_, w)| !(**w > 0.0 && w.is_finite()))
        {
            return Err(Error::InvalidArgument(format!(
                "weight {} of vertex {i} is not a positive finite number",
                w
            )));
        }
        let total = values.iter().sum();
        Ok(WeightVector { values, total })
    }

    /// `n` copies of `value`.
    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `L_n = Σ W_i`.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.values.iter().map(|w| w * w).sum()
    }
}

/// Closed-form moment summary of a weight law.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub second_moment: f64,
    /// `EW² / EW`.
    pub ratio: f64,
    /// `finite[q - 1]` tells whether `E W^q` is finite, for `q = 1..=max_order`.
    pub finite: Vec<bool>,
}

/// Draws `n` i.i.d. weights from `spec`; the result depends only on
/// `(spec, n, seed)`.
pub fn sample_weights(spec: &WeightSpec, n: usize, seed: u64) -> Result<WeightVector> {
    let mut rng = seed::rng(seed);
    sample_weights_with(spec, n, &mut rng)
}

/// Same as [`sample_weights`] but drawing from a caller-supplied generator.
pub fn sample_weights_with<R: Rng + ?Sized>(
    spec: &WeightSpec,
    n: usize,
    rng: &mut R,
) -> Result<WeightVector> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let spec = spec.clone().validated()?;
    let values = (0..n).map(|_| spec.draw(rng)).collect();
    WeightVector::new(values)
}

/// Mean, second moment and ratio `EW²/EW`, plus finiteness flags for orders
/// `1..=max_order`. Fails when the mean or second moment is infinite.
pub fn analytic_moments(spec: &WeightSpec, max_order: u32) -> Result<MomentSummary> {
    let spec = spec.clone().validated()?;
    let mean = spec.raw_moment(1)?;
    let second_moment = spec.raw_moment(2)?;
    let finite = (1..=max_order).map(|q| spec.moment_is_finite(q)).collect();
    Ok(MomentSummary {
        mean,
        second_moment,
        ratio: second_moment / mean,
        finite,
    })
}

/// Whether `P(W > x) = o(x^{-2k-1})`, the tail condition under which the
/// k-cycle count is within `O(n^{-1/2})` of its Poisson limit.
pub fn tail_condition_holds(spec: &WeightSpec, k: usize) -> bool {
    match *spec {
        WeightSpec::ParetoShifted { shape, .. } => shape > (2 * k + 1) as f64,
        _ => true,
    }
}
