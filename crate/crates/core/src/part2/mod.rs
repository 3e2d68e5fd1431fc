//! Second round of iteration with the double-sieve majorant, at α = 2.
//!
//! The seed is the converged first-round table. Its weighted upper value at
//! `(k = 0, u = 2)` is frozen as `c = e^{−γ}·2F₂(0,2)`, and the majorant
//! used by the new operators is `m = 2c = e^{−γ}·4F₂(0,2)`.

pub mod ops;

use serde::{Deserialize, Serialize};

use crate::part1::{default_schedule, run_phase_with, IterationError, OperatorId, PhaseReport, ScheduleStep, SweepDirection};
use crate::table::BoundTable;

/// Printed value of the seed's weighted upper bound at `(0, 2)`.
pub const REFERENCE_SEED_VALUE: f64 = 1.876697;

#[derive(Debug, Clone)]
pub struct DoubleSieveContext {
    pub seed: BoundTable,
    /// `e^{−γ}·2F₂(0,2)` from the seed.
    pub seed_value: f64,
    pub working: BoundTable,
}

impl DoubleSieveContext {
    pub fn new(seed: BoundTable) -> Result<Self, IterationError> {
        if (seed.alpha() - 2.0).abs() > 1e-12 {
            return Err(IterationError::Config("the double sieve runs at α = 2 only".into()));
        }
        let i2 = seed
            .index_of(2.0)
            .ok_or_else(|| IterationError::Config("seed table has no sample at u = 2".into()))?;
        let seed_value = seed.w_upper[0][i2];
        if !(seed_value > 0.0 && seed_value.is_finite()) {
            return Err(IterationError::Config(format!("seed value {seed_value} at (0, 2) is not positive")));
        }
        Ok(DoubleSieveContext { working: seed.clone(), seed, seed_value })
    }

    /// `e^{−γ}·4F₂(0,2)`.
    pub fn majorant(&self) -> f64 {
        2.0 * self.seed_value
    }

    /// Distance of the frozen seed value from the printed one.
    pub fn seed_deviation(&self) -> f64 {
        (self.seed_value - REFERENCE_SEED_VALUE).abs()
    }
}

/// Levels `v²/2` of the high split and the outer levels of the zero-row
/// split.
pub const SPLIT_LEVELS: [f64; 5] = [3.0, 4.0, 4.5, 5.0, 5.5];

/// First-round operators plus the four double-sieve ones, four cycles per
/// level and four ascending sweeps.
pub fn default_double_sieve_schedule() -> Vec<ScheduleStep> {
    let mut steps: Vec<ScheduleStep> = default_schedule();
    let extra = [
        (OperatorId::LowerCapped, vec![10.0]),
        (OperatorId::LowerHighSplit, SPLIT_LEVELS.to_vec()),
        (OperatorId::LowerZeroSplit, SPLIT_LEVELS.to_vec()),
        (OperatorId::LowerZeroDonor, Vec::new()),
    ];
    for (op, v_list) in extra {
        steps.push(ScheduleStep {
            operator_id: op,
            v_list,
            cycles_per_level: 4,
            sweep_cycles: 4,
            sweep_direction: SweepDirection::Ascending,
        });
    }
    for s in &mut steps {
        s.cycles_per_level = 4;
        s.sweep_cycles = s.sweep_cycles.min(4);
        s.sweep_direction = SweepDirection::Ascending;
    }
    steps
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DoubleSieveReport {
    pub seed_value: f64,
    pub majorant: f64,
    pub last_sweep_change: f64,
    pub sweeps: u32,
}

/// Runs `steps` on the working table with the frozen majorant.
pub fn run_double_sieve(
    ctx: &mut DoubleSieveContext,
    steps: &[ScheduleStep],
) -> Result<DoubleSieveReport, IterationError> {
    let m = ctx.majorant();
    let PhaseReport { sweeps, last_sweep_change, .. } = run_phase_with(&mut ctx.working, steps, Some(m))?;
    Ok(DoubleSieveReport { seed_value: ctx.seed_value, majorant: m, last_sweep_change, sweeps })
}
