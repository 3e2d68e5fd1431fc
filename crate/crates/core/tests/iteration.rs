mod common;

use sieve_bounds::classical::{jr_F, jr_f};
use sieve_bounds::numerics::exp_neg_gamma;
use sieve_bounds::part1::{default_schedule, run_phase, run_schedule, BootstrapSpec, IterationError, ScheduleStep};
use sieve_bounds::table::{emit_csv, BoundTable};

fn one_sweep_schedule() -> Vec<ScheduleStep> {
    default_schedule().into_iter().map(|s| ScheduleStep { sweep_cycles: 1, ..s }).collect()
}

fn assert_improves(prev: &BoundTable, next: &BoundTable) {
    for l in 0..=prev.grid.top() {
        for i in 0..prev.len() {
            if l <= prev.grid.n {
                assert!(next.w_upper[l][i] <= prev.w_upper[l][i], "wF rose at level {l}, u = {}", prev.u_samples[i]);
            }
            assert!(next.w_lower[l][i] >= prev.w_lower[l][i], "wf fell at level {l}, u = {}", prev.u_samples[i]);
        }
    }
}

fn assert_ordered(t: &BoundTable) {
    for l in 0..=t.grid.n {
        for i in 0..t.len() {
            assert!(t.w_upper[l][i] >= t.w_lower[l][i], "level {l}, u = {}", t.u_samples[i]);
        }
    }
}

#[test]
fn sweeps_improve_pointwise() {
    let steps = one_sweep_schedule();
    let mut t = common::coarse_init();
    for _ in 0..3 {
        let prev = t.clone();
        run_phase(&mut t, &steps).unwrap();
        assert_improves(&prev, &t);
        assert_ordered(&t);
    }
}

#[test]
fn classical_floor_after_first_sweep() {
    let mut t = common::coarse_init();
    run_phase(&mut t, &one_sweep_schedule()).unwrap();
    let eg = exp_neg_gamma();
    for (i, &u) in t.u_samples.iter().enumerate() {
        assert!(t.w_upper[0][i] <= eg * u * jr_F(u).unwrap() + 1e-9, "u = {u}");
        assert!(t.w_lower[0][i] >= eg * u * jr_f(u).unwrap() - 1e-9, "u = {u}");
    }
}

#[test]
fn zero_sweeps_leave_the_initial_table() {
    let t0 = common::coarse_init();
    let steps: Vec<_> = default_schedule().into_iter().map(|s| ScheduleStep { sweep_cycles: 0, ..s }).collect();
    let boot = BootstrapSpec { later_sweeps: 0, ..BootstrapSpec::default() };
    let out = run_schedule(t0.clone(), &steps, &boot).unwrap();
    assert_eq!(emit_csv(&out.first_phase), emit_csv(&t0));
    assert_eq!(emit_csv(&out.final_table), emit_csv(&t0));
}

#[test]
fn full_first_round_is_ordered_and_settles() {
    let out = common::coarse_first_round();
    assert_ordered(&out.first_phase);
    assert_ordered(&out.final_table);
    assert_improves(&common::coarse_init(), &out.final_table);
    let last = out.phases.last().unwrap();
    assert!(last.last_sweep_change < 1e-4, "{:?}", out.phases);
}

#[test]
fn reruns_are_byte_identical() {
    let again = run_schedule(common::coarse_init(), &default_schedule(), &BootstrapSpec::default()).unwrap();
    let first = common::coarse_first_round();
    assert_eq!(emit_csv(&again.first_phase), emit_csv(&first.first_phase));
    assert_eq!(emit_csv(&again.final_table), emit_csv(&first.final_table));
    assert_eq!(again.final_table.to_json(), first.final_table.to_json());
}

#[test]
fn bad_schedules_are_rejected() {
    let mut t = common::coarse_init();
    let mut steps = default_schedule();
    steps[0].v_list = vec![10.013];
    assert!(matches!(run_phase(&mut t, &steps), Err(IterationError::Config(_))));
    let mut steps = default_schedule();
    steps[0].v_list.clear();
    assert!(matches!(run_phase(&mut t, &steps), Err(IterationError::Config(_))));
    let boot = BootstrapSpec { alpha_sequence: vec![3.5], ..BootstrapSpec::default() };
    assert!(run_schedule(t, &default_schedule(), &boot).is_err());
}

#[test]
fn double_sieve_only_improves() {
    let seed = &common::coarse_first_round().final_table;
    let ds = &common::coarse_double_sieve().working;
    assert_improves(seed, ds);
    assert_ordered(ds);
}
