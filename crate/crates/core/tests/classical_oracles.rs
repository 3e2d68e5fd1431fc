use sieve_bounds::classical::{buchstab_h, buchstab_w, jr_F, jr_f, tilde_F, ClassicalFunctions};
use sieve_bounds::numerics::{exp_gamma, exp_neg_gamma};

fn grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| a + (b - a) * i as f64 / n as f64)
}

#[test]
fn upper_is_flat_up_to_three() {
    for u in grid(1.0, 3.0, 2000) {
        let v = exp_neg_gamma() * u * jr_F(u).unwrap();
        assert!((v - 2.0).abs() < 1e-10, "u = {u}: {v}");
    }
}

#[test]
fn lower_is_log_on_two_four() {
    for u in grid(2.0, 4.0, 2000) {
        let v = exp_neg_gamma() * u * jr_f(u).unwrap();
        let expect = 2.0 * (u - 1.0).ln();
        assert!((v - expect).abs() < 1e-9, "u = {u}: {v} vs {expect}");
    }
}

#[test]
fn lower_vanishes_below_two() {
    for u in grid(0.1, 2.0, 200) {
        assert_eq!(jr_f(u).unwrap(), 0.0);
    }
}

#[test]
fn buchstab_closed_forms() {
    assert!((buchstab_h(2.0).unwrap() - (3.0 - 2.0 * 2f64.ln())).abs() < 1e-12);
    for u in grid(0.0, 1.0, 100) {
        assert!((buchstab_h(u).unwrap() - u).abs() < 1e-12);
    }
    for u in grid(1.0, 2.0, 1000) {
        assert!((buchstab_w(u).unwrap() - 1.0 / u).abs() < 1e-12, "u = {u}");
    }
    assert!((buchstab_w(3.0).unwrap() - (1.0 + 2f64.ln()) / 3.0).abs() < 1e-9);
}

#[test]
fn limits_at_large_u() {
    assert!((buchstab_h(20.0).unwrap() - exp_gamma()).abs() < 1e-6);
    assert!((buchstab_w(8.0).unwrap() - exp_neg_gamma()).abs() < 1e-3);
}

#[test]
fn selberg_upper_bound() {
    assert!((tilde_F(2.0).unwrap() - exp_gamma()).abs() < 1e-12);
    assert!((exp_neg_gamma() * 2.0 * tilde_F(2.0).unwrap() - 2.0).abs() < 1e-9);
    let h2 = 3.0 - 2.0 * 2f64.ln();
    let at4 = exp_gamma() * (h2 / 4.0 + (2.0 + 2f64.ln()) * 0.5 * (0.5 - 0.125 - 1.0 / 48.0));
    assert!((tilde_F(4.0).unwrap() - at4).abs() < 1e-10);
}

#[test]
fn shared_tables_agree_with_free_functions() {
    let c = ClassicalFunctions::shared();
    for u in grid(1.0, 9.0, 97) {
        assert_eq!(c.upper(u).unwrap(), jr_F(u).unwrap());
        assert_eq!(c.lower(u).unwrap(), jr_f(u).unwrap());
    }
}
