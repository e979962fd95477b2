//! Index-to-probability model: an index score on a 10-point scale is turned
//! into a selection coefficient through the upper tail of a centred Gaussian.
//!
//! `k(score) = (1 - P(X > √score)) / 3` with `X ~ N(0, variance)`, and the
//! selection probability is `weight · k(score)`.
//!
//! Two evaluation modes exist. `Computed` integrates the tail numerically.
//! `Published` returns the two literature constants (0.3090 at score 3.4 and
//! 0.2999 at score 6.5) verbatim. These do not follow from the formula,
//! which gives k(3.4) ≈ 0.2400 and k(6.5) ≈ 0.2633, so `Published` refuses any
//! other score.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Variance of the index distribution: the width of the 10-point scale.
pub const SCALE_VARIANCE: f64 = 10.0;

/// Absolute tolerance of the adaptive quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;

/// Integration runs over `[lower, lower + TRUNCATION_SIGMAS·σ]`. The dropped
/// mass is `P(Z > 12) < 2e-33`.
pub const TRUNCATION_SIGMAS: f64 = 12.0;

pub const PUBLISHED_CORRUPTION_SCORE: f64 = 3.4;
pub const PUBLISHED_PROFESSIONALISM_SCORE: f64 = 6.5;
pub const PUBLISHED_EM12_COEFFICIENT: f64 = 0.3090;
pub const PUBLISHED_PF21_COEFFICIENT: f64 = 0.2999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationMode {
    #[default]
    Computed,
    /// Literature constants; the CLI calls this mode `paper`.
    #[serde(rename = "paper", alias = "paper_constants")]
    Published,
}

impl fmt::Display for EvaluationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvaluationMode::Computed => "computed",
            EvaluationMode::Published => "paper",
        })
    }
}

impl std::str::FromStr for EvaluationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "computed" => Ok(EvaluationMode::Computed),
            "paper" | "paper_constants" => Ok(EvaluationMode::Published),
            other => Err(Error::Scenario(format!("unknown mode `{other}` (expected paper or computed)"))),
        }
    }
}

/// Which cross-diagonal comparison event a coefficient belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionEvent {
    Em12,
    Pf21,
}

impl SelectionEvent {
    pub fn published_score(self) -> f64 {
        match self {
            SelectionEvent::Em12 => PUBLISHED_CORRUPTION_SCORE,
            SelectionEvent::Pf21 => PUBLISHED_PROFESSIONALISM_SCORE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexParameters {
    pub score: f64,
    pub variance: f64,
    pub weight: f64,
}

impl IndexParameters {
    pub fn new(score: f64, weight: f64) -> Result<Self> {
        Self::with_variance(score, SCALE_VARIANCE, weight)
    }

    pub fn with_variance(score: f64, variance: f64, weight: f64) -> Result<Self> {
        let p = Self { score, variance, weight };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.score > 0.0 && self.score <= 10.0) {
            return Err(Error::InvalidParameter { name: "score", value: self.score, reason: "must lie in (0, 10]" });
        }
        if self.score <= 1.0 || self.score >= 10.0 {
            log::warn!("index score {} lies outside the customary open range (1, 10)", self.score);
        }
        if !(self.variance > 0.0 && self.variance.is_finite()) {
            return Err(Error::InvalidParameter { name: "variance", value: self.variance, reason: "must be positive" });
        }
        if !(self.weight > 0.0 && self.weight < 1.0) {
            return Err(Error::InvalidParameter { name: "weight", value: self.weight, reason: "must lie in (0, 1)" });
        }
        Ok(())
    }
}

/// `P(X > lower)` for `X ~ N(0, variance)`, by adaptive Gauss–Kronrod quadrature.
pub fn gaussian_tail(lower: f64, variance: f64) -> Result<f64> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::InvalidParameter { name: "variance", value: variance, reason: "must be positive" });
    }
    if lower.is_nan() {
        return Err(Error::InvalidParameter { name: "lower", value: lower, reason: "not a number" });
    }
    if lower < 0.0 {
        return Ok(1.0 - gaussian_tail(-lower, variance)?);
    }
    let sigma = variance.sqrt();
    if lower > TRUNCATION_SIGMAS * sigma * 4.0 {
        return Ok(0.0);
    }
    let norm = 1.0 / (2.0 * std::f64::consts::PI * variance).sqrt();
    let density = |x: f64| norm * (-x * x / (2.0 * variance)).exp();
    Ok(integrate(density, lower, lower + TRUNCATION_SIGMAS * sigma, QUADRATURE_TOLERANCE))
}

/// Weight-free selection factor `k(score) = (1 - P(X > √score)) / 3`.
pub fn selection_factor(score: f64, variance: f64) -> Result<f64> {
    if score.is_nan() || score <= 0.0 {
        return Err(Error::InvalidParameter { name: "score", value: score, reason: "must be positive" });
    }
    let tail = if score.is_infinite() { 0.0 } else { gaussian_tail(score.sqrt(), variance)? };
    Ok((1.0 - tail) / 3.0)
}

/// `weight · k(score)`.
pub fn selection_coefficient(params: &IndexParameters) -> Result<f64> {
    params.validate()?;
    Ok(params.weight * selection_factor(params.score, params.variance)?)
}

/// The literature coefficient for `which`, only in published mode.
pub fn published_coefficient(mode: EvaluationMode, which: SelectionEvent) -> Result<f64> {
    match (mode, which) {
        (EvaluationMode::Computed, _) => Err(Error::ModeGate),
        (EvaluationMode::Published, SelectionEvent::Em12) => Ok(PUBLISHED_EM12_COEFFICIENT),
        (EvaluationMode::Published, SelectionEvent::Pf21) => Ok(PUBLISHED_PF21_COEFFICIENT),
    }
}

/// Weight-free coefficient under `mode`; published mode requires the
/// published score for `which`.
pub fn coefficient_cap(mode: EvaluationMode, which: SelectionEvent, score: f64, variance: f64) -> Result<f64> {
    match mode {
        EvaluationMode::Computed => selection_factor(score, variance),
        EvaluationMode::Published => {
            if score != which.published_score() || variance != SCALE_VARIANCE {
                return Err(Error::InvalidParameter {
                    name: match which {
                        SelectionEvent::Em12 => "C",
                        SelectionEvent::Pf21 => "Q",
                    },
                    value: score,
                    reason: "published constants exist only for C = 3.4, Q = 6.5 at variance 10",
                });
            }
            published_coefficient(mode, which)
        }
    }
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1] (non-negative half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive bisection until each piece's Kronrod–Gauss gap is within its
/// share of `tol`.
fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    const MAX_DEPTH: u32 = 40;
    let width = b - a;
    let mut total = 0.0;
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, err) = gk15(&f, lo, hi);
        if err <= tol * (hi - lo) / width || depth >= MAX_DEPTH {
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    total
}
