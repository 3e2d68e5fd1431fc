//! Iterated upper and lower bounds for the weighted sieve: starting tables,
//! level operators and the schedule that drives them.

mod init;
pub mod ops;
mod schedule;

pub use init::{init_tables, merge_zero_rows, seed_from_alpha2};
pub use schedule::{
    default_schedule, run_phase, run_phase_with, run_schedule, BootstrapSpec, IterationError, OperatorId, PhaseReport,
    ScheduleOutcome, ScheduleStep, SweepDirection, PROFILE_A_STEP,
};
