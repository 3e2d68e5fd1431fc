//! Starting tables for the iteration, and the seeding of a table with a
//! larger exponent from a converged α = 2 table.

use crate::classical::ClassicalFunctions;
use crate::numerics::exp_neg_gamma;
use crate::table::{BoundTable, KGrid, TableError};

/// Fills the rows that follow from row 0 (both bounds) and row `n`
/// (upper bound, `u ≥ 2` only):
///
/// * interior upper rows are convex combinations of rows 0 and `n` for `u ≥ 2`,
///   flat in the weighted form down to `k^{1/α}` and scaled by `k/u^α` below;
/// * the lower row `n+1` adds the one-prime term to row 0, interior lower rows
///   interpolate towards it and the rows above `n+1` copy it.
fn fill_from_edges(t: &mut BoundTable) {
    let g = t.grid.clone();
    let n = g.n;
    let alpha = g.alpha;
    let kn = g.k_n();
    let i2 = t.index_of(2.0).expect("u grid contains 2");
    let len = t.len();

    for l in 1..=n {
        let k = g.k(l);
        let lam = k / kn;
        for i in i2..len {
            if l < n {
                t.w_upper[l][i] = (1.0 - lam) * t.w_upper[0][i] + lam * t.w_upper[n][i];
            }
        }
    }
    for l in 0..=n {
        let k = g.k(l);
        let at2 = t.w_upper[l][i2];
        let root = k.powf(1.0 / alpha);
        for i in 0..i2 {
            let u = t.u_samples[i];
            t.w_upper[l][i] = if u >= root { at2 } else { k / u.powf(alpha) * at2 };
        }
    }

    let k1 = g.k(n + 1);
    let len_f = t.len();
    for i in 0..len_f {
        let u = t.u_samples[i];
        let top = if u < 2.0 {
            0.0
        } else {
            let s = u - 1.0;
            let lower_prev = t.lower_at(0, s) / s;
            t.w_lower[0][i] + k1 / (alpha * u.powf(alpha - 1.0)) * lower_prev
        };
        t.w_lower[n + 1][i] = top;
        for l in 1..=n {
            let lam = g.k(l) / k1;
            t.w_lower[l][i] = (1.0 - lam) * t.w_lower[0][i] + lam * top;
        }
        for l in n + 2..=g.top() {
            t.w_lower[l][i] = top;
        }
    }
}

/// Initial weighted tables from the classical functions.
pub fn init_tables(grid: KGrid, u_step: f64, u_max: f64) -> BoundTable {
    let cf = ClassicalFunctions::shared();
    let eg = exp_neg_gamma();
    let mut t = BoundTable::new(grid, u_step, u_max);
    let n = t.grid.n;
    let alpha = t.grid.alpha;
    let kn = t.grid.k_n();
    for i in 0..t.len() {
        let u = t.u_samples[i];
        t.w_upper[0][i] = if u <= 1.0 { 2.0 } else { eg * u * cf.upper(u).unwrap() };
        t.w_lower[0][i] = eg * u * cf.lower(u).unwrap();
        if u >= 2.0 {
            t.w_upper[n][i] = if u <= 4.0 {
                eg * u * cf.tilde_upper(u).unwrap()
            } else {
                eg * (u * cf.upper(u).unwrap() + kn / (alpha * u.powf(alpha - 1.0)) * cf.upper(u - 1.0).unwrap())
            };
        }
    }
    fill_from_edges(&mut t);
    t
}

/// Seeds a table for exponent `alpha` from a converged α = 2 table: row 0
/// is copied and the top upper row is read from the α = 2 table at the
/// reduced weight `k_n / u^{α−2}`.
pub fn seed_from_alpha2(base: &BoundTable, grid: KGrid) -> Result<BoundTable, TableError> {
    assert!((base.alpha() - 2.0).abs() < 1e-12, "seed table must have alpha = 2");
    let alpha = grid.alpha;
    let n = grid.n;
    let kn = grid.k_n();
    let mut t = BoundTable::new(grid, base.u_step, base.u_max());
    t.w_upper[0] = base.w_upper[0].clone();
    t.w_lower[0] = base.w_lower[0].clone();
    for i in 0..t.len() {
        let u = t.u_samples[i];
        if u >= 2.0 {
            let k = kn / u.powf(alpha - 2.0);
            t.w_upper[n][i] = base.breve_upper_weighted(k, u)?;
        }
    }
    fill_from_edges(&mut t);
    Ok(t)
}

/// Copies the improved weight-zero rows of `other` into `base`, keeping the
/// better bound pointwise.
pub fn merge_zero_rows(base: &mut BoundTable, other: &BoundTable) {
    for (a, b) in base.w_upper[0].iter_mut().zip(&other.w_upper[0]) {
        *a = a.min(*b);
    }
    for (a, b) in base.w_lower[0].iter_mut().zip(&other.w_lower[0]) {
        *a = a.max(*b);
    }
}
