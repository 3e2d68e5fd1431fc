use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::init::{merge_zero_rows, seed_from_alpha2};
use super::ops::{self, Precomputed, ProfileParams, WeightProfile};
use crate::table::{build_kgrid, BoundTable, TableError};

/// Spacing of the `a` grid `{1, 1.5, …, k_n}` for the variable-weight upper
/// operator.
pub const PROFILE_A_STEP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorId {
    #[serde(rename = "f1")]
    LowerSubtract,
    #[serde(rename = "f2")]
    LowerSplit,
    #[serde(rename = "f3")]
    LowerChord,
    #[serde(rename = "f4")]
    LowerFromHeavier,
    #[serde(rename = "f_high")]
    LowerHigh,
    #[serde(rename = "F1")]
    UpperSubtract,
    #[serde(rename = "F2")]
    UpperFromHeavier,
    #[serde(rename = "F3")]
    UpperProfile,
    #[serde(rename = "F4")]
    UpperChord,
    #[serde(rename = "F5")]
    UpperScale,
    #[serde(rename = "f5")]
    LowerCapped,
    #[serde(rename = "f6")]
    LowerHighSplit,
    #[serde(rename = "f7")]
    LowerZeroSplit,
    #[serde(rename = "f8")]
    LowerZeroDonor,
}

impl OperatorId {
    pub fn is_lower(self) -> bool {
        matches!(
            self,
            OperatorId::LowerSubtract
                | OperatorId::LowerSplit
                | OperatorId::LowerChord
                | OperatorId::LowerFromHeavier
                | OperatorId::LowerHigh
                | OperatorId::LowerCapped
                | OperatorId::LowerHighSplit
                | OperatorId::LowerZeroSplit
                | OperatorId::LowerZeroDonor
        )
    }

    /// Operators that need the double-sieve majorant.
    pub fn needs_majorant(self) -> bool {
        matches!(
            self,
            OperatorId::LowerCapped
                | OperatorId::LowerHighSplit
                | OperatorId::LowerZeroSplit
                | OperatorId::LowerZeroDonor
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            OperatorId::LowerSubtract => "f1",
            OperatorId::LowerSplit => "f2",
            OperatorId::LowerChord => "f3",
            OperatorId::LowerFromHeavier => "f4",
            OperatorId::LowerHigh => "f_high",
            OperatorId::UpperSubtract => "F1",
            OperatorId::UpperFromHeavier => "F2",
            OperatorId::UpperProfile => "F3",
            OperatorId::UpperChord => "F4",
            OperatorId::UpperScale => "F5",
            OperatorId::LowerCapped => "f5",
            OperatorId::LowerHighSplit => "f6",
            OperatorId::LowerZeroSplit => "f7",
            OperatorId::LowerZeroDonor => "f8",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepDirection {
    Descending,
    Ascending,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleStep {
    pub operator_id: OperatorId,
    #[serde(default)]
    pub v_list: Vec<f64>,
    pub cycles_per_level: u32,
    pub sweep_cycles: u32,
    pub sweep_direction: SweepDirection,
}

/// Exponent sequence for the bootstrap and the effort spent on phases
/// after the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapSpec {
    pub alpha_sequence: Vec<f64>,
    pub later_cycles_per_level: u32,
    pub later_sweeps: u32,
}

impl Default for BootstrapSpec {
    fn default() -> Self {
        BootstrapSpec { alpha_sequence: vec![2.0, 3.5, 4.0, 2.0], later_cycles_per_level: 4, later_sweeps: 4 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IterationError {
    #[error("operator {operator} produced a non-finite value at k = {k}, u = {u}, v = {v:?}")]
    NonFinite { operator: &'static str, k: f64, u: f64, v: Option<f64> },
    #[error("upper bound {upper} fell below lower bound {lower} at k = {k}, u = {u} after {operator}")]
    Ordering { operator: &'static str, k: f64, u: f64, upper: f64, lower: f64 },
    #[error("invalid schedule: {0}")]
    Config(String),
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseReport {
    pub alpha: f64,
    pub sweeps: u32,
    /// Largest entry change during the last sweep.
    pub last_sweep_change: f64,
}

#[derive(Debug, Clone)]
pub struct ScheduleOutcome {
    /// α = 2 table after the first phase.
    pub first_phase: BoundTable,
    pub final_table: BoundTable,
    pub phases: Vec<PhaseReport>,
}

/// The published schedule: every operator at every level, four cycles per
/// level, eight descending sweeps.
pub fn default_schedule() -> Vec<ScheduleStep> {
    let step = |op, v: &[f64]| ScheduleStep {
        operator_id: op,
        v_list: v.to_vec(),
        cycles_per_level: 4,
        sweep_cycles: 8,
        sweep_direction: SweepDirection::Descending,
    };
    vec![
        step(OperatorId::LowerSubtract, &[10.0]),
        step(OperatorId::LowerSplit, &[3.0, 3.5, 4.0, 4.5, 5.0]),
        step(OperatorId::LowerChord, &[]),
        step(OperatorId::LowerFromHeavier, &[]),
        step(OperatorId::LowerHigh, &[4.0, 4.5, 5.0]),
        step(OperatorId::UpperSubtract, &[10.0]),
        step(OperatorId::UpperFromHeavier, &[]),
        step(OperatorId::UpperProfile, &[3.0, 2.75, 2.5, 2.25]),
        step(OperatorId::UpperChord, &[]),
        step(OperatorId::UpperScale, &[]),
    ]
}

fn validate(steps: &[ScheduleStep], t: &BoundTable, majorant: Option<f64>) -> Result<(), IterationError> {
    let Some(first) = steps.first() else {
        return Ok(());
    };
    for s in steps {
        if s.operator_id.needs_majorant() {
            if (t.alpha() - 2.0).abs() > 1e-12 {
                return Err(IterationError::Config(format!("{} is defined for α = 2 only", s.operator_id.name())));
            }
            if !majorant.is_some_and(|m| m > 0.0 && m.is_finite()) {
                return Err(IterationError::Config(format!(
                    "{} needs a positive double-sieve majorant",
                    s.operator_id.name()
                )));
            }
        }
        if s.sweep_direction != first.sweep_direction {
            return Err(IterationError::Config("all steps of a phase must sweep the same way".into()));
        }
        let needs_v = matches!(
            s.operator_id,
            OperatorId::LowerSubtract
                | OperatorId::LowerSplit
                | OperatorId::LowerHigh
                | OperatorId::UpperSubtract
                | OperatorId::UpperProfile
                | OperatorId::LowerCapped
                | OperatorId::LowerHighSplit
                | OperatorId::LowerZeroSplit
        );
        if needs_v && s.v_list.is_empty() {
            return Err(IterationError::Config(format!("{} needs a non-empty v_list", s.operator_id.name())));
        }
        for &v in &s.v_list {
            if !(v > 1.0) || t.index_of(v).is_none() {
                return Err(IterationError::Config(format!(
                    "v = {v} for {} is not a u sample above 1",
                    s.operator_id.name()
                )));
            }
        }
    }
    Ok(())
}

/// Candidates for one operator at level `l`, tagged with the `v` used.
fn candidates(
    t: &BoundTable,
    pc: &Precomputed,
    step: &ScheduleStep,
    l: usize,
    moments: &[f64],
    profiles: &[ops::ProfileTails],
    majorant: Option<f64>,
) -> Vec<(Option<f64>, Vec<Option<f64>>)> {
    use crate::part2::ops as ds;
    use OperatorId::*;
    let m = majorant.unwrap_or(f64::NAN);
    match step.operator_id {
        LowerSubtract => step.v_list.iter().map(|&v| (Some(v), ops::row_f1(t, pc, l, v))).collect(),
        LowerSplit => step.v_list.par_iter().map(|&v| (Some(v), ops::row_f2(t, l, v))).collect(),
        LowerChord => vec![(None, ops::row_f3(t, l))],
        LowerFromHeavier => vec![(None, ops::row_f4(t, pc, l))],
        LowerHigh => vec![(None, ops::row_f_high(t, l, &step.v_list))],
        UpperSubtract => step.v_list.iter().map(|&v| (Some(v), ops::row_upper1(t, pc, l, v))).collect(),
        UpperFromHeavier => vec![(None, ops::row_upper2(t, l, moments))],
        UpperProfile => profiles.iter().map(|p| (Some(p.params.v), ops::row_upper3(t, l, p))).collect(),
        UpperChord => vec![(None, ops::row_upper4(t, l))],
        UpperScale => vec![(None, ops::row_upper5(t, l))],
        LowerCapped => step.v_list.iter().map(|&v| (Some(v), ds::row_f5(t, m, l, v))).collect(),
        LowerHighSplit => vec![(None, ds::row_f6(t, m, l, &step.v_list))],
        LowerZeroSplit if l == 0 => step.v_list.iter().map(|&v| (Some(v), ds::row_f7(t, m, v))).collect(),
        LowerZeroDonor if l == 0 => vec![(None, ds::row_f8(t, m))],
        LowerZeroSplit | LowerZeroDonor => Vec::new(),
    }
}

fn profile_params(t: &BoundTable, v_list: &[f64]) -> Vec<ProfileParams> {
    let kn = t.grid.k_n();
    let mut out = Vec::new();
    for &v in v_list {
        let mut a = 1.0;
        while a <= kn + 1e-9 {
            for profile in [WeightProfile::ReciprocalMin, WeightProfile::ShiftedRatio] {
                out.push(ProfileParams { v, a, profile });
            }
            a += PROFILE_A_STEP;
        }
    }
    out
}

/// Applies the candidates of the active steps to level `l`, lower row first.
fn level_cycle(
    t: &mut BoundTable,
    pc: &Precomputed,
    active: &[&ScheduleStep],
    l: usize,
    majorant: Option<f64>,
) -> Result<f64, IterationError> {
    let mut change = 0.0f64;
    for lower in [true, false] {
        if !lower && l > t.grid.n {
            continue;
        }
        let steps: Vec<&&ScheduleStep> = active.iter().filter(|s| s.operator_id.is_lower() == lower).collect();
        if steps.is_empty() {
            continue;
        }
        let snapshot: &BoundTable = t;
        let moments = if steps.iter().any(|s| s.operator_id == OperatorId::UpperFromHeavier) {
            ops::lower_moments(snapshot)
        } else {
            Vec::new()
        };
        let profiles: Vec<ops::ProfileTails> = steps
            .iter()
            .filter(|s| s.operator_id == OperatorId::UpperProfile)
            .flat_map(|s| profile_params(snapshot, &s.v_list))
            .collect::<Vec<_>>()
            .par_iter()
            .map(|p| ops::profile_tails(snapshot, pc, p))
            .collect();
        let per_step: Vec<(OperatorId, Vec<(Option<f64>, Vec<Option<f64>>)>)> = steps
            .par_iter()
            .map(|s| (s.operator_id, candidates(snapshot, pc, s, l, &moments, &profiles, majorant)))
            .collect();

        let k = t.grid.k(l);
        let mut row = if lower { t.w_lower[l].clone() } else { t.w_upper[l].clone() };
        for (op, cands) in &per_step {
            for (v, c) in cands {
                for (i, x) in c.iter().enumerate() {
                    let Some(x) = *x else { continue };
                    if !x.is_finite() {
                        return Err(IterationError::NonFinite { operator: op.name(), k, u: t.u_samples[i], v: *v });
                    }
                    if lower {
                        row[i] = row[i].max(x);
                    } else {
                        row[i] = row[i].min(x);
                    }
                }
            }
        }
        let old = if lower { &mut t.w_lower[l] } else { &mut t.w_upper[l] };
        for (a, b) in old.iter().zip(&row) {
            change = change.max((a - b).abs());
        }
        *old = row;
        if l <= t.grid.n {
            for i in 0..t.len() {
                let (up, lo) = (t.w_upper[l][i], t.w_lower[l][i]);
                if up < lo - 1e-9 {
                    let operator = if lower { "lower-bound update" } else { "upper-bound update" };
                    return Err(IterationError::Ordering { operator, k, u: t.u_samples[i], upper: up, lower: lo });
                }
            }
        }
    }
    Ok(change)
}

/// Runs one phase of the schedule on `t` in place.
pub fn run_phase(t: &mut BoundTable, steps: &[ScheduleStep]) -> Result<PhaseReport, IterationError> {
    run_phase_with(t, steps, None)
}

/// [`run_phase`] with the double-sieve majorant `e^{−γ}·4F₂(0,2)`
/// available to the operators that use it.
pub fn run_phase_with(
    t: &mut BoundTable,
    steps: &[ScheduleStep],
    majorant: Option<f64>,
) -> Result<PhaseReport, IterationError> {
    validate(steps, t, majorant)?;
    let alpha = t.alpha();
    let sweeps = steps.iter().map(|s| s.sweep_cycles).max().unwrap_or(0);
    let cycles = steps.iter().map(|s| s.cycles_per_level).max().unwrap_or(0);
    let direction = steps.first().map(|s| s.sweep_direction).unwrap_or(SweepDirection::Descending);
    let profile_vs: Vec<f64> = steps
        .iter()
        .filter(|s| s.operator_id == OperatorId::UpperProfile)
        .flat_map(|s| s.v_list.iter().copied())
        .collect();
    let pc = Precomputed::new(t, &profile_vs);
    let top = t.grid.top();
    let levels: Vec<usize> = match direction {
        SweepDirection::Descending => (0..=top).rev().collect(),
        SweepDirection::Ascending => (0..=top).collect(),
    };
    let mut last = 0.0;
    for sweep in 0..sweeps {
        let mut sweep_change = 0.0f64;
        for &l in &levels {
            for cycle in 0..cycles {
                let active: Vec<&ScheduleStep> =
                    steps.iter().filter(|s| sweep < s.sweep_cycles && cycle < s.cycles_per_level).collect();
                sweep_change = sweep_change.max(level_cycle(t, &pc, &active, l, majorant)?);
            }
        }
        t.iteration_index += 1;
        last = sweep_change;
    }
    Ok(PhaseReport { alpha, sweeps, last_sweep_change: last })
}

/// Runs the first phase at α = 2 with `steps`, then the bootstrap phases
/// at the remaining exponents. Phases at another exponent are seeded from
/// the current α = 2 table and hand their weight-zero rows back to it.
pub fn run_schedule(
    table: BoundTable,
    steps: &[ScheduleStep],
    bootstrap: &BootstrapSpec,
) -> Result<ScheduleOutcome, IterationError> {
    let seq = &bootstrap.alpha_sequence;
    if seq.is_empty() || (seq[0] - 2.0).abs() > 1e-12 || (table.alpha() - 2.0).abs() > 1e-12 {
        return Err(IterationError::Config("the exponent sequence must start at 2 on an α = 2 table".into()));
    }
    let later: Vec<ScheduleStep> = steps
        .iter()
        .map(|s| ScheduleStep {
            cycles_per_level: s.cycles_per_level.min(bootstrap.later_cycles_per_level),
            sweep_cycles: s.sweep_cycles.min(bootstrap.later_sweeps),
            sweep_direction: SweepDirection::Ascending,
            ..s.clone()
        })
        .collect();
    let mut t2 = table;
    let mut phases = vec![run_phase(&mut t2, steps)?];
    let first_phase = t2.clone();
    for &alpha in &seq[1..] {
        if (alpha - 2.0).abs() < 1e-12 {
            phases.push(run_phase(&mut t2, &later)?);
        } else {
            let grid = build_kgrid(alpha, t2.grid.n);
            let mut ta = seed_from_alpha2(&t2, grid)?;
            phases.push(run_phase(&mut ta, &later)?);
            merge_zero_rows(&mut t2, &ta);
        }
    }
    Ok(ScheduleOutcome { first_phase, final_table: t2, phases })
}
