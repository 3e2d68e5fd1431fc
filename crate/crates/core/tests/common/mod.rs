#![allow(dead_code)]

use std::sync::OnceLock;

use sieve_bounds::part1::{default_schedule, init_tables, run_schedule, BootstrapSpec, ScheduleOutcome};
use sieve_bounds::part2::{default_double_sieve_schedule, run_double_sieve, DoubleSieveContext};
use sieve_bounds::table::{build_kgrid, BoundTable};

/// Sample spacing for the quick full-pipeline runs; every schedule v value
/// lies on it.
pub const COARSE_STEP: f64 = 0.05;

pub fn coarse_init() -> BoundTable {
    init_tables(build_kgrid(2.0, 16), COARSE_STEP, 10.0)
}

/// First round on the coarse grid, computed once per test binary.
pub fn coarse_first_round() -> &'static ScheduleOutcome {
    static RUN: OnceLock<ScheduleOutcome> = OnceLock::new();
    RUN.get_or_init(|| run_schedule(coarse_init(), &default_schedule(), &BootstrapSpec::default()).unwrap())
}

/// Double-sieve round seeded with [`coarse_first_round`].
pub fn coarse_double_sieve() -> &'static DoubleSieveContext {
    static RUN: OnceLock<DoubleSieveContext> = OnceLock::new();
    RUN.get_or_init(|| {
        let mut ctx = DoubleSieveContext::new(coarse_first_round().final_table.clone()).unwrap();
        run_double_sieve(&mut ctx, &default_double_sieve_schedule()).unwrap();
        ctx
    })
}

/// Midpoint rule with `n` panels.
pub fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}
