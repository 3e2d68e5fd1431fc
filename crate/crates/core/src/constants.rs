//! Headline constants read off a converged table: the upper constant for the
//! number of Goldbach representations, the lower constant for
//! representations as a prime plus an almost-prime with at most two factors,
//! and the exponent of the exception-set bound.

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::numerics::{find_root, integrate, QuadratureConfig};
use crate::table::BoundTable;

/// `e^{−γ}·2F₂(0,2)` as used in the almost-prime estimate.
pub const SEED_VALUE_IN_ESTIMATE: f64 = 1.876677;
/// The same quantity as printed in the weight-zero table.
pub const SEED_VALUE_IN_TABLE: f64 = 1.876697;

/// Weight of the almost-prime sum and the level it is read at.
pub const ALMOST_PRIME_WEIGHT: f64 = 2.25;
pub const ALMOST_PRIME_U: f64 = 1.5;

/// Bracket for the zero crossing of the weight-zero lower row.
pub const CROSSING_BRACKET: (f64, f64) = (1.6, 2.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstantsError {
    #[error("table has no {0}")]
    Missing(String),
    #[error("weight-zero upper row is not flat between u = 1 and u = 2 ({at_one} vs {at_two})")]
    NotFlat { at_one: f64, at_two: f64 },
    #[error("lower bound vanishes on range [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },
}

/// `∫₀^{1/3} t·ln(2−3t)/(1−t) dt`, the measure of the prime pairs removed in
/// the almost-prime estimate.
pub fn chen_integral() -> f64 {
    let g = |t: f64| t * (2.0 - 3.0 * t).ln() / (1.0 - t);
    integrate(g, 0.0, 1.0 / 3.0, QuadratureConfig::with_tol(1e-13)).expect("smooth integrand on a closed interval")
}

fn cell(t: &BoundTable, l: usize, u: f64, upper: bool) -> Result<f64, ConstantsError> {
    let what = || format!("sample at (level {l}, u = {u})");
    let i = t.index_of(u).ok_or_else(|| ConstantsError::Missing(what()))?;
    let row = if upper { t.w_upper.get(l) } else { t.w_lower.get(l) };
    row.map(|r| r[i]).ok_or_else(|| ConstantsError::Missing(what()))
}

/// `4·W_F(0,1)`. The upper row must be flat on `[1,2]`, which is checked
/// rather than assumed.
pub fn goldbach_upper_constant(t: &BoundTable) -> Result<f64, ConstantsError> {
    let at_one = cell(t, 0, 1.0, true)?;
    let at_two = cell(t, 0, 2.0, true)?;
    if (at_one - at_two).abs() >= 1e-6 {
        return Err(ConstantsError::NotFlat { at_one, at_two });
    }
    Ok(4.0 * at_one)
}

/// `4·(a − 2.25·4·c·I)` with `a = W_f(2.25, 1.5)`, `c` the seed value and
/// `I` the [`chen_integral`].
pub fn d12_lower_constant(t: &BoundTable, seed_value: f64) -> Result<f64, ConstantsError> {
    let l = t
        .grid
        .level_of(ALMOST_PRIME_WEIGHT)
        .ok_or_else(|| ConstantsError::Missing(format!("level k = {ALMOST_PRIME_WEIGHT}")))?;
    let a = cell(t, l, ALMOST_PRIME_U, false)?;
    Ok(d12_from_parts(a, seed_value, chen_integral()))
}

pub fn d12_from_parts(a: f64, seed_value: f64, integral: f64) -> f64 {
    4.0 * (a - ALMOST_PRIME_WEIGHT * 4.0 * seed_value * integral)
}

/// Where the weight-zero lower row becomes positive inside `[lo, hi]`.
pub fn lower_support_start(t: &BoundTable, lo: f64, hi: f64) -> Result<f64, ConstantsError> {
    let g = |u: f64| if t.lower_at(0, u) > 0.0 { 1.0 } else { -1.0 };
    if g(lo) > 0.0 || g(hi) < 0.0 {
        return Err(ConstantsError::NoCrossing { lo, hi });
    }
    find_root(g, lo, hi, 1e-10).map_err(|_| ConstantsError::NoCrossing { lo, hi })
}

/// `u* − 1`, with `u*` the start of the lower row's support in
/// [`CROSSING_BRACKET`].
pub fn exception_exponent(t: &BoundTable) -> Result<f64, ConstantsError> {
    let (lo, hi) = CROSSING_BRACKET;
    Ok(lower_support_start(t, lo, hi)? - 1.0)
}

/// SHA-256 of the table's checkpoint JSON.
pub fn table_hash(t: &BoundTable) -> String {
    let digest = Sha256::digest(t.to_json().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ConstantsInputs {
    pub table_sha256: String,
    pub w_upper_0_1: f64,
    pub w_upper_0_2: f64,
    pub w_lower_225_15: f64,
    /// Seed value `e^{−γ}·2F₂(0,2)` used for `d12_lower`.
    pub seed_value: f64,
    /// First u where the weight-zero lower row is positive, over the whole
    /// table.
    pub lower_support_start: Option<f64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ConstantsReport {
    pub goldbach_upper: f64,
    pub d12_lower: f64,
    /// `d12_lower` with the seed value of the almost-prime estimate.
    pub d12_lower_estimate_seed: f64,
    /// `d12_lower` with the seed value of the weight-zero table.
    pub d12_lower_table_seed: f64,
    /// `None` when the lower row does not cross zero in the bracket.
    pub exception_exponent: Option<f64>,
    pub exception_error: Option<String>,
    pub chen_integral: f64,
    pub inputs: ConstantsInputs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeadlineTargets {
    pub goldbach_upper_max: f64,
    pub d12_lower_min: f64,
    pub exponent_max: f64,
}

pub const HEADLINE: HeadlineTargets = HeadlineTargets { goldbach_upper_max: 6.916 + 1e-3, d12_lower_min: 2.25, exponent_max: 0.705 };

impl ConstantsReport {
    /// Names of the headline checks that fail.
    pub fn failed_checks(&self, targets: &HeadlineTargets) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !(self.goldbach_upper <= targets.goldbach_upper_max) {
            out.push("goldbach_upper");
        }
        if !(self.d12_lower >= targets.d12_lower_min) {
            out.push("d12_lower");
        }
        if !self.exception_exponent.is_some_and(|e| e <= targets.exponent_max) {
            out.push("exception_exponent");
        }
        out
    }

    /// Violations of `goldbach_upper > d12_lower > 0` and `exponent ∈ (0.5, 1)`.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.goldbach_upper > self.d12_lower) {
            out.push(format!("goldbach_upper {} ≤ d12_lower {}", self.goldbach_upper, self.d12_lower));
        }
        if !(self.d12_lower > 0.0) {
            out.push(format!("d12_lower {} ≤ 0", self.d12_lower));
        }
        if let Some(e) = self.exception_exponent {
            if !(e > 0.5 && e < 1.0) {
                out.push(format!("exception_exponent {e} outside (0.5, 1)"));
            }
        }
        out
    }
}

/// Computes every constant from `t`, with `seed_value` the frozen
/// `e^{−γ}·2F₂(0,2)` of the double sieve.
pub fn constants_report(t: &BoundTable, seed_value: f64) -> Result<ConstantsReport, ConstantsError> {
    let goldbach_upper = goldbach_upper_constant(t)?;
    let l = t
        .grid
        .level_of(ALMOST_PRIME_WEIGHT)
        .ok_or_else(|| ConstantsError::Missing(format!("level k = {ALMOST_PRIME_WEIGHT}")))?;
    let a = cell(t, l, ALMOST_PRIME_U, false)?;
    let integral = chen_integral();
    let (exception_exponent, exception_error) = match exception_exponent(t) {
        Ok(e) => (Some(e), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let support = lower_support_start(t, 1.0 + t.u_step, t.u_max()).ok();
    Ok(ConstantsReport {
        goldbach_upper,
        d12_lower: d12_from_parts(a, seed_value, integral),
        d12_lower_estimate_seed: d12_from_parts(a, SEED_VALUE_IN_ESTIMATE, integral),
        d12_lower_table_seed: d12_from_parts(a, SEED_VALUE_IN_TABLE, integral),
        exception_exponent,
        exception_error,
        chen_integral: integral,
        inputs: ConstantsInputs {
            table_sha256: table_hash(t),
            w_upper_0_1: cell(t, 0, 1.0, true)?,
            w_upper_0_2: cell(t, 0, 2.0, true)?,
            w_lower_225_15: a,
            seed_value,
            lower_support_start: support,
        },
    })
}
