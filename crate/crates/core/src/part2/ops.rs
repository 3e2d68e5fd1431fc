//! Lower-bound operators that use the double-sieve majorant.
//!
//! `m` below is `e^{−γ}·4F₂(0,2)` read off the frozen seed table, i.e.
//! twice its weighted upper value at `u = 2`. It bounds `e^{−γ}F₂(k, x)`
//! for the inner sifted sets independently of `x`, which is what lets
//! these operators go below the point where the plain subtraction needs an
//! upper row heavier than `k_n`.
//!
//! Values are weighted (`W = e^{−γ}(u + k/(2u))·f`) as in the rest of the
//! crate. Pointwise `op_*` versions integrate adaptively; `row_*` versions
//! serve the schedule.

use crate::numerics::pole_moment;
use crate::part1::ops::{quad_pieces, shift_breaks, split_breaks, tail_integrals};
use crate::table::BoundTable;

/// Integrand of the capped subtraction at `s` for weight `k`:
/// `(1−k/s²)/(s−1)` times the inner upper bound, with the majorant and
/// overflow terms once the shifted weight passes `k_n`.
///
/// The shifted weight `k(s−1)²/(s²−k)` blows up at `s = √k`, but only
/// its product with `1−k/s²` enters, so that product is formed directly.
pub fn capped_integrand(t: &BoundTable, m: f64, k: f64, s: f64) -> Option<f64> {
    let kn = t.grid.k_n();
    let x = s - 1.0;
    if !(s * s >= k) || x < t.u_min() {
        return None;
    }
    let r = 1.0 - k / (s * s);
    let rk = k * x * x / (s * s);
    if rk <= kn * r {
        if r <= 0.0 {
            return Some(0.0);
        }
        let kt = (rk / r).min(kn);
        let w = t.breve_upper_weighted(kt, x).ok()?;
        return Some(r * w / x);
    }
    let direct = r * t.upper_at(t.grid.n, x);
    let majorant = m * (r * x + rk / (2.0 * x));
    let overflow = m * x / (2.0 * s * s) * (rk - kn * r);
    Some((direct.min(majorant) + overflow) / x)
}

/// `½·W_F(0, v − v/s)/(s−1)`: the inner bound for one removed prime in the
/// symmetric split with outer level `v`.
pub fn split_integrand(t: &BoundTable, v: f64, s: f64) -> Option<f64> {
    let x = v - v / s;
    if !(s > 1.0) || x < t.u_min() {
        return None;
    }
    Some(0.5 * t.upper_at(0, x) / (s - 1.0))
}

/// `∫_u^{u₁} (½ln(v/u₁) + ln(u₁/t)) dt`, the double-sieve part of the
/// split for weight `v²/2`, with `u₁ = v/√2`.
pub fn split_majorant_mass(v: f64, u: f64) -> f64 {
    let u1 = v / std::f64::consts::SQRT_2;
    if u >= u1 {
        return 0.0;
    }
    0.5 * (v / u1).ln() * (u1 - u) + (u1 - u) - u * (u1 / u).ln()
}

/// Threshold `1/u₁ = 1 − F(0,u)/(4F(0,2))` of the donor operator, clamped
/// to `[0, 1/u]`.
pub fn donor_threshold(m: f64, w_upper0: f64, u: f64) -> f64 {
    (1.0 - w_upper0 / (u * m)).clamp(0.0, 1.0 / u)
}

/// Amount removed from the donor row at weight `k`:
/// `W_F(0,u)·k·∫₀^{1/u₁} s/(1−s) ds + u·m·k·∫_{1/u₁}^{1/u} s ds`.
pub fn donor_correction(m: f64, k: f64, w_upper0: f64, u: f64) -> f64 {
    let x1 = donor_threshold(m, w_upper0, u);
    let xu = 1.0 / u;
    w_upper0 * k * pole_moment(2.0, x1) + u * m * k * 0.5 * (xu * xu - x1 * x1)
}

fn is_alpha2(t: &BoundTable) -> bool {
    (t.alpha() - 2.0).abs() < 1e-12
}

/// Subtraction with the inner upper bound capped by the majorant, for
/// levels up to `n+1` and `√k ≤ u < v`.
pub fn op_f5(t: &BoundTable, m: f64, l: usize, u: f64, v: f64) -> Option<f64> {
    let g = &t.grid;
    let k = g.k(l);
    if !is_alpha2(t) || l > g.n + 1 || !(v > u) || u * u < k || !(u > 1.0) {
        return None;
    }
    let tail = quad_pieces(|s| capped_integrand(t, m, k, s), u, v, &shift_breaks(t))?;
    Some(t.lower_at(l, v) - tail)
}

/// The symmetric split for the level with `k = v²/2`: plain inner bound on
/// `[v/√2, v]`, majorant below.
pub fn op_f6(t: &BoundTable, m: f64, l: usize, u: f64, v: f64) -> Option<f64> {
    let g = &t.grid;
    if !is_alpha2(t) || l > g.top() || (g.k(l) - v * v / 2.0).abs() > 1e-9 || !(u > 1.0) || !(u <= v) {
        return None;
    }
    let u1 = v / std::f64::consts::SQRT_2;
    let tail = quad_pieces(|s| split_integrand(t, v, s), u.max(u1), v, &split_breaks(t, v))?;
    Some(t.lower_at(0, v) - tail - m * split_majorant_mass(v, u))
}

/// The split for the weight-zero row: every removed prime in `[w, z)`
/// charged half to the plain bound and half to the majorant.
pub fn op_f7(t: &BoundTable, m: f64, u: f64, v: f64) -> Option<f64> {
    if !is_alpha2(t) || !(u > 1.0) || !(u <= v) {
        return None;
    }
    let tail = quad_pieces(|s| split_integrand(t, v, s), u, v, &split_breaks(t, v))?;
    Some(t.lower_at(0, v) - tail - u * 0.5 * (v / u).ln() * m)
}

/// Weight-zero lower bound from the donor row at level `h`.
pub fn op_f8(t: &BoundTable, m: f64, h: usize, u: f64) -> Option<f64> {
    let g = &t.grid;
    if !is_alpha2(t) || h == 0 || h > g.n || !(u > 1.0) {
        return None;
    }
    Some(t.lower_at(h, u) - donor_correction(m, g.k(h), t.upper_at(0, u), u))
}

fn sample_index(t: &BoundTable, v: f64) -> Option<usize> {
    t.index_of(v)
}

pub fn row_f5(t: &BoundTable, m: f64, l: usize, v: f64) -> Vec<Option<f64>> {
    let g = &t.grid;
    let none = vec![None; t.len()];
    if !is_alpha2(t) || l > g.n + 1 {
        return none;
    }
    let Some(iv) = sample_index(t, v) else { return none };
    let k = g.k(l);
    let floor = k.sqrt().max(1.0 + t.u_min());
    let top = t.w_lower[l][iv];
    let mut out = tail_integrals(t, iv, floor, |s, _| capped_integrand(t, m, k, s));
    out[iv] = None;
    out.iter_mut().for_each(|x| *x = x.map(|s| top - s));
    out
}

pub fn row_f6(t: &BoundTable, m: f64, l: usize, v_list: &[f64]) -> Vec<Option<f64>> {
    let g = &t.grid;
    let mut out = vec![None; t.len()];
    if !is_alpha2(t) || l > g.top() {
        return out;
    }
    let v = (2.0 * g.k(l)).sqrt();
    if !v_list.iter().any(|&x| (x - v).abs() < 1e-9) {
        return out;
    }
    let Some(iv) = sample_index(t, v) else { return out };
    let u1 = v / std::f64::consts::SQRT_2;
    let top = t.w_lower[0][iv];
    let tails = tail_integrals(t, iv, 1.0, |s, _| split_integrand(t, v, s));
    let Some(upper_part) = quad_pieces(|s| split_integrand(t, v, s), u1, v, &split_breaks(t, v)) else { return out };
    for i in 0..iv {
        let u = t.u_samples[i];
        if !(u > 1.0) {
            continue;
        }
        let plain = if u >= u1 { tails[i] } else { Some(upper_part) };
        out[i] = plain.map(|p| top - p - m * split_majorant_mass(v, u));
    }
    out
}

pub fn row_f7(t: &BoundTable, m: f64, v: f64) -> Vec<Option<f64>> {
    let mut out = vec![None; t.len()];
    if !is_alpha2(t) {
        return out;
    }
    let Some(iv) = sample_index(t, v) else { return out };
    let top = t.w_lower[0][iv];
    let tails = tail_integrals(t, iv, 1.0, |s, _| split_integrand(t, v, s));
    for i in 0..iv {
        let u = t.u_samples[i];
        if u > 1.0 {
            out[i] = tails[i].map(|p| top - p - u * 0.5 * (v / u).ln() * m);
        }
    }
    out
}

pub fn row_f8(t: &BoundTable, m: f64) -> Vec<Option<f64>> {
    let g = &t.grid;
    (0..t.len())
        .map(|i| {
            let u = t.u_samples[i];
            if !is_alpha2(t) || !(u > 1.0) {
                return None;
            }
            let w0 = t.w_upper[0][i];
            (1..=g.n).map(|h| t.w_lower[h][i] - donor_correction(m, g.k(h), w0, u)).reduce(f64::max)
        })
        .collect()
}
