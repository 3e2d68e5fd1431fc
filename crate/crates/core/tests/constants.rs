mod common;

use sieve_bounds::constants::*;
use sieve_bounds::table::{build_kgrid, BoundTable};

fn synthetic(step: f64) -> BoundTable {
    let mut t = BoundTable::new(build_kgrid(2.0, 16), step, 10.0);
    let l = t.grid.level_of(ALMOST_PRIME_WEIGHT).unwrap();
    for (i, &u) in t.u_samples.clone().iter().enumerate() {
        t.w_upper[0][i] = if u <= 2.0 { 1.728908 } else { 1.728908 + 0.1 * (u - 2.0) };
        t.w_lower[0][i] = (u - 1.702).max(0.0);
        t.w_lower[l][i] = 0.87942;
    }
    t
}

#[test]
fn chen_integral_matches_midpoint_oracle() {
    let g = |t: f64| t * (2.0 - 3.0 * t).ln() / (1.0 - t);
    let oracle = common::midpoint(g, 0.0, 1.0 / 3.0, 1_000_000);
    let v = chen_integral();
    assert!((v - oracle).abs() < 1e-9, "{v} vs {oracle}");
    assert!((v - 0.018457).abs() < 1e-5);
    assert!(v <= 0.01846 + 1e-5);
}

#[test]
fn d12_reproduces_published_arithmetic() {
    // 4·(0.8794 − 0.3118)
    let d = d12_from_parts(0.87942, SEED_VALUE_IN_ESTIMATE, chen_integral());
    assert!((d - 2.27).abs() < 2e-3, "{d}");
    let removed = ALMOST_PRIME_WEIGHT * 4.0 * SEED_VALUE_IN_ESTIMATE * chen_integral();
    assert!((removed - 0.3118).abs() < 1e-4, "{removed}");
}

#[test]
fn d12_is_linear_in_its_inputs() {
    let (a, c, i) = (0.8, 1.9, 0.0185);
    let h = 1e-3;
    let da = (d12_from_parts(a + h, c, i) - d12_from_parts(a, c, i)) / h;
    let di = (d12_from_parts(a, c, i + h) - d12_from_parts(a, c, i)) / h;
    let dc = (d12_from_parts(a, c + h, i) - d12_from_parts(a, c, i)) / h;
    assert!((da - 4.0).abs() < 1e-9);
    assert!((di + 4.0 * ALMOST_PRIME_WEIGHT * 4.0 * c).abs() < 1e-7);
    assert!((dc + 4.0 * ALMOST_PRIME_WEIGHT * 4.0 * i).abs() < 1e-9);
}

#[test]
fn constants_of_a_synthetic_table() {
    let t = synthetic(0.001);
    assert!((goldbach_upper_constant(&t).unwrap() - 4.0 * 1.728908).abs() < 1e-12);
    let e = exception_exponent(&t).unwrap();
    assert!((e - 0.702).abs() < 1.5e-3, "{e}");
    let r = constants_report(&t, SEED_VALUE_IN_TABLE).unwrap();
    assert!((r.d12_lower - d12_from_parts(0.87942, SEED_VALUE_IN_TABLE, chen_integral())).abs() < 1e-12);
    assert!(r.d12_lower_estimate_seed > r.d12_lower_table_seed);
    assert!(r.failed_checks(&HEADLINE).is_empty(), "{:?}", r.failed_checks(&HEADLINE));
    assert!(r.invariant_violations().is_empty());
    assert_eq!(r.inputs.table_sha256, table_hash(&t));
    assert_eq!(r.inputs.table_sha256.len(), 64);
}

#[test]
fn non_flat_upper_row_is_refused() {
    let mut t = synthetic(0.01);
    let i = t.index_of(1.0).unwrap();
    t.w_upper[0][i] += 1e-3;
    assert!(matches!(goldbach_upper_constant(&t), Err(ConstantsError::NotFlat { .. })));
}

#[test]
fn missing_crossing_is_reported() {
    let mut t = synthetic(0.01);
    for (i, &u) in t.u_samples.clone().iter().enumerate() {
        t.w_lower[0][i] = (u - 2.05).max(0.0);
    }
    assert!(matches!(exception_exponent(&t), Err(ConstantsError::NoCrossing { .. })));
    let r = constants_report(&t, SEED_VALUE_IN_TABLE).unwrap();
    assert!(r.exception_exponent.is_none());
    assert!(r.exception_error.is_some());
    assert_eq!(r.failed_checks(&HEADLINE), vec!["exception_exponent"]);
    let s = r.inputs.lower_support_start.unwrap();
    assert!((s - 2.05).abs() < 0.011, "{s}");
}
