//! Update operators for a single weight level.
//!
//! Everything works on weighted values `W = e^{−γ}(u + k/(α u^{α−1}))·F`
//! (and the same with f), the quantity stored in a [`BoundTable`]. In these
//! units every operator is linear in the table rows. Each operator comes in
//! two flavours: a pointwise `op_*` function that integrates adaptively,
//! and a `row_*` function that produces candidates for every sample of a row
//! at once from cumulative Simpson sums. The schedule runner uses the row
//! versions; the pointwise ones document the formulas and back the tests.
//!
//! A candidate of `None` means the operator does not apply at that point.

use crate::numerics::{find_root, integrate, pole_moment, NumericsError, QuadratureConfig};
use crate::table::{interp_row, BoundTable, KGrid, Round};

/// `k(t−1)^α/(t^α−k)`, the weight left after pulling out one prime with
/// `t = ln ξ²/ln p`.
#[inline]
pub fn shifted_weight(alpha: f64, k: f64, t: f64) -> f64 {
    k * (t - 1.0).powf(alpha) / (t.powf(alpha) - k)
}

/// Lower end `u₀ = max(min(3, u_l), 2)` of the subtraction range, where
/// `u_l` is where the shifted weight drops to `k_n`.
pub fn subtraction_start(grid: &KGrid, l: usize) -> f64 {
    let alpha = grid.alpha;
    let k = grid.k(l);
    let kn = grid.k_n();
    if k == 0.0 {
        return 2.0;
    }
    let g = |t: f64| shifted_weight(alpha, k, t) - kn;
    if g(3.0) >= 0.0 {
        return 3.0;
    }
    // The shifted weight blows up just above k^{1/α}.
    let lo = k.powf(1.0 / alpha) * (1.0 + 1e-9);
    let ul = find_root(g, lo, 3.0, 1e-10).unwrap_or(lo);
    ul.clamp(2.0, 3.0)
}

/// `H(α, v, t) = (1−1/t)^{α−1} ∫₀^{t/(v(t−1))} s^{α−1}/(1−s) ds`, defined
/// for `t > v/(v−1)`.
pub fn h_factor(alpha: f64, v: f64, t: f64) -> Option<f64> {
    let x = t / (v * (t - 1.0));
    if !(t > 1.0) || !(x < 1.0) {
        return None;
    }
    Some((1.0 - 1.0 / t).powf(alpha - 1.0) * pole_moment(alpha, x))
}

/// Two shapes for the weight profile `k(a, t)` used by the upper-bound
/// operator with a variable weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightProfile {
    /// `min(k_{n+1}, (t−1)^α/a)`
    ReciprocalMin,
    /// `a / ((1−1/t)^α + a/v^α)`
    ShiftedRatio,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileParams {
    pub v: f64,
    pub a: f64,
    pub profile: WeightProfile,
}

impl ProfileParams {
    /// `k(a, t)`.
    pub fn k_at(&self, grid: &KGrid, t: f64) -> f64 {
        let alpha = grid.alpha;
        match self.profile {
            WeightProfile::ReciprocalMin => grid.k(grid.n + 1).min((t - 1.0).powf(alpha) / self.a),
            WeightProfile::ShiftedRatio => {
                self.a / ((1.0 - 1.0 / t).powf(alpha) + self.a / self.v.powf(alpha))
            }
        }
    }

    /// `min_{t ≤ s ≤ v} k(a, s)`; the first profile increases in t and the
    /// second decreases.
    pub fn k_floor(&self, grid: &KGrid, t: f64) -> f64 {
        match self.profile {
            WeightProfile::ReciprocalMin => self.k_at(grid, t),
            WeightProfile::ShiftedRatio => self.k_at(grid, self.v),
        }
    }
}

// ---------------------------------------------------------------- integrands

fn f1_integrand(t: &BoundTable, k: f64, s: f64) -> Option<f64> {
    let alpha = t.alpha();
    if s.powf(alpha) <= k || s - 1.0 < t.u_min() {
        return None;
    }
    let kt = shifted_weight(alpha, k, s);
    let kn = t.grid.k_n();
    if kt > kn * (1.0 + 1e-12) {
        return None;
    }
    let w = t.breve_upper_weighted(kt.min(kn), s - 1.0).ok()?;
    Some((1.0 - k / s.powf(alpha)) / (s - 1.0) * w)
}

fn upper1_integrand(t: &BoundTable, k: f64, s: f64) -> Option<f64> {
    let alpha = t.alpha();
    if s.powf(alpha) <= k || s - 1.0 < t.u_min() {
        return None;
    }
    // Weights past the top lower row are read at the top row, which only
    // weakens the bound because lower rows increase with k.
    let kt = shifted_weight(alpha, k, s).min(t.grid.k(t.grid.top()));
    let w = t.breve_lower_weighted(kt, s - 1.0).ok()?;
    Some((1.0 - k / s.powf(alpha)) / (s - 1.0) * w)
}

fn d1_integrand(t: &BoundTable, k: f64, v: f64, s: f64) -> Option<f64> {
    let alpha = t.alpha();
    let x = v - v / s;
    if !(s > 1.0) || x < t.u_min() {
        return None;
    }
    let kt = 2.0 * k * (1.0 - 1.0 / s).powf(alpha);
    if kt > t.grid.k_n() * (1.0 + 1e-12) {
        return None;
    }
    let w = t.breve_upper_weighted(kt.min(t.grid.k_n()), x).ok()?;
    Some(w / (s - 1.0))
}

fn d2_density(alpha: f64, k: f64, s: f64) -> Option<f64> {
    if !(s > 1.0) {
        return None;
    }
    let r = k / s.powf(alpha);
    Some(if r <= 0.5 { (0.5 - r) / (s - 1.0) } else { 0.0 })
}

fn high_integrand(t: &BoundTable, v: f64, s: f64) -> Option<f64> {
    let x = v - v / s;
    if !(s > 1.0) || x < t.u_min() {
        return None;
    }
    Some(0.5 * t.upper_at(0, x) / (s - 1.0))
}

/// The three integrands of the variable-weight upper operator:
/// the subtracted lower-bound term, and the two halves of the correction,
/// `k(t)·W_F(0,t−1)·H/t` and `W_F(0,t−1)·H/t`.
fn profile_integrands(t: &BoundTable, p: &ProfileParams, s: f64, h: f64) -> Option<(f64, f64, f64)> {
    let g = &t.grid;
    let alpha = g.alpha;
    if !(s > 1.0) || s - 1.0 < t.u_min() {
        return None;
    }
    let k = p.k_at(g, s);
    if !(k > 0.0) || k > g.k(g.n + 1) * (1.0 + 1e-12) {
        return None;
    }
    let r = (1.0 - k / s.powf(alpha)) / (1.0 - 1.0 / s).powf(alpha);
    if !(r > 0.0) {
        return None;
    }
    let kk = p.k_floor(g, s);
    let kappa = (kk / r).min(g.k(g.top()));
    let wf = t.breve_lower_weighted(kappa, s - 1.0).ok()?;
    let a = (1.0 - k / s.powf(alpha)) / (s - 1.0) * wf;
    let c = t.upper_at(0, s - 1.0) * h / s;
    Some((a, kk * c, c))
}

// ------------------------------------------------------ pointwise operators

/// Points `s` where `s − 1` is a u sample. Integrands that read the table
/// at `s − 1` are smooth between them.
pub fn shift_breaks(t: &BoundTable) -> Vec<f64> {
    t.u_samples.iter().map(|&u| u + 1.0).collect()
}

/// Points `s` where `v − v/s` is a u sample.
pub fn split_breaks(t: &BoundTable, v: f64) -> Vec<f64> {
    t.u_samples.iter().filter(|&&u| u < v).map(|&u| v / (v - u)).collect()
}

/// Adaptive quadrature of `g` on `[a, b]`, piecewise between the `breaks`
/// inside the interval. `None` if `g` is undefined at an end point.
pub fn quad_pieces<G: Fn(f64) -> Option<f64>>(g: G, a: f64, b: f64, breaks: &[f64]) -> Option<f64> {
    if a >= b {
        return Some(0.0);
    }
    g(a)?;
    g(b)?;
    let cfg = QuadratureConfig::with_tol(1e-9);
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.push(b);
    let piece = QuadratureConfig { abs_tol: cfg.abs_tol / pts.len() as f64, ..cfg };
    let mut lo = a;
    let mut total = 0.0;
    for &hi in &pts {
        total += match integrate(|x| g(x).unwrap_or(f64::NAN), lo, hi, piece) {
            Ok(v) => v,
            Err(NumericsError::DepthExhausted { estimate }) => estimate,
            Err(_) => return None,
        };
        lo = hi;
    }
    Some(total)
}

/// Lower-bound candidate from removing the primes in `[w, z)` with the
/// shifted weight. Zero below `u₀`.
pub fn op_f1(t: &BoundTable, l: usize, u: f64, v: f64) -> Option<f64> {
    let g = &t.grid;
    if l > g.n + 1 || !(v > u) {
        return None;
    }
    let u0 = subtraction_start(g, l);
    if u < u0 {
        return Some(0.0);
    }
    let k = g.k(l);
    let tail = quad_pieces(|s| f1_integrand(t, k, s), u, v, &shift_breaks(t))?;
    Some(t.lower_at(l, v) - tail)
}

/// Lower-bound candidate using the upper bound for the sifted sets
/// `A_p` with weight `2k(1−1/t)^α`. Identity for `u ≥ v`.
pub fn op_f2(t: &BoundTable, l: usize, u: f64, v: f64) -> Option<f64> {
    let g = &t.grid;
    if l > g.n + 1 {
        return None;
    }
    if u >= v {
        return Some(t.lower_at(l, u));
    }
    if !(u > 1.0) {
        return None;
    }
    let k = g.k(l);
    let d1 = quad_pieces(|s| d1_integrand(t, k, v, s), u, v, &split_breaks(t, v))?;
    let start = (2.0 * k).powf(1.0 / g.alpha).max(u);
    let d2 = if start < v {
        t.upper_at(0, u) * quad_pieces(|s| d2_density(g.alpha, k, s), start, v, &[])?
    } else {
        0.0
    };
    Some(t.lower_at(l, v) - 0.5 * d1 - d2)
}

/// Chord of two weighted rows straddling `k_l`.
#[inline]
fn chord(ka: f64, wa: f64, kb: f64, wb: f64, k: f64) -> f64 {
    ((kb - k) * wa + (k - ka) * wb) / (kb - ka)
}

/// Best chord of lower rows `a < l < b ≤ n+1`.
pub fn op_f3(t: &BoundTable, l: usize, u: f64) -> Option<f64> {
    let g = &t.grid;
    if l == 0 || l > g.n {
        return None;
    }
    let mut best: Option<f64> = None;
    for a in 0..l {
        for b in l + 1..=g.n + 1 {
            let c = chord(g.k(a), t.lower_at(a, u), g.k(b), t.lower_at(b, u), g.k(l));
            best = Some(best.map_or(c, |x: f64| x.max(c)));
        }
    }
    best
}

/// Lower row of a heavier weight minus the extra one-prime mass.
pub fn op_f4(t: &BoundTable, l: usize, u: f64) -> Option<f64> {
    let g = &t.grid;
    if l >= g.n || !(u > 1.0) {
        return None;
    }
    let mass = t.upper_at(0, u) * pole_moment(g.alpha, 1.0 / u);
    (l + 1..=g.top())
        .map(|h| t.lower_at(h, u) - (g.k(h) - g.k(l)) * mass)
        .reduce(f64::max)
}

/// Lower bound for the rows above `k_{n+1}`, where `(2k)^{1/α} = v`.
pub fn op_f_high(t: &BoundTable, l: usize, u: f64, v_list: &[f64]) -> Option<f64> {
    let g = &t.grid;
    if l < g.n + 2 || l > g.top() {
        return None;
    }
    let below = t.lower_at(l - 1, u);
    let v = (2.0 * g.k(l)).powf(1.0 / g.alpha);
    if !v_list.iter().any(|&x| (x - v).abs() < 1e-9) || !(u > 1.0) || u >= v {
        return Some(below);
    }
    let tail = quad_pieces(|s| high_integrand(t, v, s), u, v, &split_breaks(t, v))?;
    Some(below.max(t.lower_at(0, v) - tail))
}

/// Upper-bound counterpart of [`op_f1`], flat in weighted form on
/// `[k^{1/α}, u₀]`.
pub fn op_upper1(t: &BoundTable, l: usize, u: f64, v: f64) -> Option<f64> {
    let g = &t.grid;
    let k = g.k(l);
    if l > g.n || u < k.powf(1.0 / g.alpha) || u >= v {
        return None;
    }
    let u0 = subtraction_start(g, l);
    if u <= u0 {
        return Some(t.upper_at(l, u0));
    }
    let tail = quad_pieces(|s| upper1_integrand(t, k, s), u, v, &shift_breaks(t))?;
    Some(t.upper_at(l, v) - tail)
}

/// `∫_{max(u−1,0)}^{u} (1−s/u)^{α−1} W_f(0,s)/s ds`.
pub fn lower_moment(t: &BoundTable, u: f64) -> f64 {
    let alpha = t.alpha();
    let lo = (u - 1.0).max(t.u_min());
    if lo >= u {
        return 0.0;
    }
    quad_pieces(|s| Some((1.0 - s / u).powf(alpha - 1.0) * t.lower_at(0, s) / s), lo, u, &t.u_samples).unwrap_or(0.0)
}

/// Upper row of a heavier weight minus the guaranteed one-prime mass.
pub fn op_upper2(t: &BoundTable, l: usize, u: f64) -> Option<f64> {
    let g = &t.grid;
    if l >= g.n || u < g.k(l).powf(1.0 / g.alpha) {
        return None;
    }
    let m = lower_moment(t, u);
    (l + 1..=g.n).map(|h| t.upper_at(h, u) - (g.k(h) - g.k(l)) * m).reduce(f64::min)
}

/// Upper bound with a variable weight profile.
pub fn op_upper3(t: &BoundTable, l: usize, u: f64, p: &ProfileParams) -> Option<f64> {
    let g = &t.grid;
    let k = g.k(l);
    let v = p.v;
    if l > g.n || u < k.powf(1.0 / g.alpha) || u >= v || u <= v / (v - 1.0) {
        return None;
    }
    if k > p.k_floor(g, u) {
        return None;
    }
    let parts = |s: f64| profile_integrands(t, p, s, h_factor(g.alpha, v, s)?);
    let breaks = shift_breaks(t);
    let a = quad_pieces(|s| parts(s).map(|x| x.0), u, v, &breaks)?;
    let b = quad_pieces(|s| parts(s).map(|x| x.1), u, v, &breaks)?;
    let c = quad_pieces(|s| parts(s).map(|x| x.2), u, v, &breaks)?;
    Some(t.upper_at(l, v) - a + b - k * c)
}

/// Best chord of upper rows `a < l < b ≤ n`.
pub fn op_upper4(t: &BoundTable, l: usize, u: f64) -> Option<f64> {
    let g = &t.grid;
    if l == 0 || l >= g.n {
        return None;
    }
    let mut best: Option<f64> = None;
    for a in 0..l {
        for b in l + 1..=g.n {
            let c = chord(g.k(a), t.upper_at(a, u), g.k(b), t.upper_at(b, u), g.k(l));
            best = Some(best.map_or(c, |x: f64| x.min(c)));
        }
    }
    best
}

/// Scaling below `u₁ = k^{1/α}`: `W(k,u) = (k/u^α)·W(k,u₁)`.
pub fn op_upper5(t: &BoundTable, l: usize, u: f64) -> Option<f64> {
    let g = &t.grid;
    let k = g.k(l);
    let u1 = k.powf(1.0 / g.alpha);
    if l > g.n || !(u < u1) || u <= 0.0 {
        return None;
    }
    Some(k / u.powf(g.alpha) * t.upper_at(l, u1))
}

// ------------------------------------------------------------ row operators

/// `∫_{u_i}^{u_iv} g` for every sample `i ≤ iv` by composite Simpson on the
/// sample cells. `g` gets the point and its half-step index
/// (`2i` at sample `i`, `2i+1` between samples `i` and `i+1`). Entries stay
/// `None` from the first point (scanning down from `u_iv`) where `g` is
/// undefined or the sample is below `floor`.
pub fn tail_integrals<G>(t: &BoundTable, iv: usize, floor: f64, g: G) -> Vec<Option<f64>>
where
    G: Fn(f64, usize) -> Option<f64>,
{
    let h = t.u_step;
    let mut out = vec![None; t.len()];
    let ok = |x: Option<f64>| x.filter(|y| y.is_finite());
    if t.u_samples[iv] < floor - 1e-12 {
        return out;
    }
    let Some(mut hi) = ok(g(t.u_samples[iv], 2 * iv)) else {
        return out;
    };
    out[iv] = Some(0.0);
    let mut acc = 0.0;
    for i in (0..iv).rev() {
        let lo_t = t.u_samples[i];
        if lo_t < floor - 1e-12 {
            break;
        }
        let (Some(m), Some(lo)) = (ok(g(lo_t + 0.5 * h, 2 * i + 1)), ok(g(lo_t, 2 * i))) else {
            break;
        };
        acc += h / 6.0 * (lo + 4.0 * m + hi);
        out[i] = Some(acc);
        hi = lo;
    }
    out
}

fn sample_index(t: &BoundTable, v: f64) -> usize {
    t.index_of(v).unwrap_or_else(|| panic!("v = {v} is not a u sample"))
}

/// Per-phase quantities that depend only on the grid.
#[derive(Debug, Clone)]
pub struct Precomputed {
    pub u0: Vec<f64>,
    /// `∫₀^{1/u} s^{α−1}/(1−s) ds` at each sample (NaN for `u ≤ 1`).
    pub pole_inv_u: Vec<f64>,
    /// `(v, H(α,v,·))` on the half-step grid.
    pub h_tables: Vec<(f64, Vec<f64>)>,
}

impl Precomputed {
    pub fn new(t: &BoundTable, profile_vs: &[f64]) -> Self {
        let g = &t.grid;
        let alpha = g.alpha;
        let u0 = (0..=g.top()).map(|l| subtraction_start(g, l)).collect();
        let pole_inv_u =
            t.u_samples.iter().map(|&u| if u > 1.0 { pole_moment(alpha, 1.0 / u) } else { f64::NAN }).collect();
        let h = t.u_step;
        let h_tables = profile_vs
            .iter()
            .map(|&v| {
                let iv = sample_index(t, v);
                let vals = (0..=2 * iv)
                    .map(|j| {
                        let s = (j as f64 / 2.0 + 1.0) * h;
                        h_factor(alpha, v, s).unwrap_or(f64::NAN)
                    })
                    .collect();
                (v, vals)
            })
            .collect();
        Precomputed { u0, pole_inv_u, h_tables }
    }

    fn h_table(&self, v: f64) -> Option<&[f64]> {
        self.h_tables.iter().find(|(x, _)| (x - v).abs() < 1e-9).map(|(_, t)| t.as_slice())
    }
}

pub fn row_f1(t: &BoundTable, pc: &Precomputed, l: usize, v: f64) -> Vec<Option<f64>> {
    let g = &t.grid;
    if l > g.n + 1 {
        return vec![None; t.len()];
    }
    let iv = sample_index(t, v);
    let k = g.k(l);
    let top = t.w_lower[l][iv];
    let u0 = pc.u0[l];
    let mut out = tail_integrals(t, iv, u0, |s, _| f1_integrand(t, k, s));
    out[iv] = None;
    for (x, &u) in out.iter_mut().zip(&t.u_samples) {
        *x = if u < u0 - 1e-12 { None } else { x.map(|s| top - s) };
    }
    out
}

pub fn row_f2(t: &BoundTable, l: usize, v: f64) -> Vec<Option<f64>> {
    let g = &t.grid;
    let alpha = g.alpha;
    let k = g.k(l);
    if l > g.n + 1 || 2.0 * k * (1.0 - 1.0 / v).powf(alpha) > g.k_n() * (1.0 + 1e-12) {
        return vec![None; t.len()];
    }
    let iv = sample_index(t, v);
    let top = t.w_lower[l][iv];
    let d1 = tail_integrals(t, iv, 1.0, |s, _| d1_integrand(t, k, v, s));
    let d2 = tail_integrals(t, iv, 1.0, |s, _| d2_density(alpha, k, s));
    (0..t.len())
        .map(|i| {
            if i >= iv {
                return None;
            }
            Some(top - 0.5 * d1[i]? - t.w_upper[0][i] * d2[i]?)
        })
        .collect()
}

pub fn row_f3(t: &BoundTable, l: usize) -> Vec<Option<f64>> {
    let g = &t.grid;
    if l == 0 || l > g.n {
        return vec![None; t.len()];
    }
    let k = g.k(l);
    (0..t.len())
        .map(|i| {
            let mut best = f64::NEG_INFINITY;
            for a in 0..l {
                for b in l + 1..=g.n + 1 {
                    best = best.max(chord(g.k(a), t.w_lower[a][i], g.k(b), t.w_lower[b][i], k));
                }
            }
            Some(best)
        })
        .collect()
}

pub fn row_f4(t: &BoundTable, pc: &Precomputed, l: usize) -> Vec<Option<f64>> {
    let g = &t.grid;
    if l >= g.n {
        return vec![None; t.len()];
    }
    (0..t.len())
        .map(|i| {
            if !(t.u_samples[i] > 1.0) {
                return None;
            }
            let mass = t.w_upper[0][i] * pc.pole_inv_u[i];
            (l + 1..=g.top()).map(|h| t.w_lower[h][i] - (g.k(h) - g.k(l)) * mass).reduce(f64::max)
        })
        .collect()
}

pub fn row_f_high(t: &BoundTable, l: usize, v_list: &[f64]) -> Vec<Option<f64>> {
    let g = &t.grid;
    if l < g.n + 2 || l > g.top() {
        return vec![None; t.len()];
    }
    let mut out: Vec<Option<f64>> = t.w_lower[l - 1].iter().map(|&x| Some(x)).collect();
    let v = (2.0 * g.k(l)).powf(1.0 / g.alpha);
    if v_list.iter().any(|&x| (x - v).abs() < 1e-9) && v <= t.u_max() + 1e-9 {
        let iv = sample_index(t, v);
        let top = t.w_lower[0][iv];
        let tails = tail_integrals(t, iv, 1.0, |s, _| high_integrand(t, v, s));
        for i in 0..iv {
            if let (Some(s), Some(b)) = (tails[i], out[i]) {
                out[i] = Some(b.max(top - s));
            }
        }
    }
    out
}

pub fn row_upper1(t: &BoundTable, pc: &Precomputed, l: usize, v: f64) -> Vec<Option<f64>> {
    let g = &t.grid;
    if l > g.n {
        return vec![None; t.len()];
    }
    let iv = sample_index(t, v);
    let k = g.k(l);
    let u0 = pc.u0[l];
    let top = t.w_upper[l][iv];
    let mut out = tail_integrals(t, iv, u0, |s, _| upper1_integrand(t, k, s));
    out[iv] = None;
    out.iter_mut().for_each(|x| *x = x.map(|s| top - s));
    let root = k.powf(1.0 / g.alpha);
    let flat = t.upper_at(l, u0);
    for (i, &u) in t.u_samples.iter().enumerate() {
        if u >= root && u <= u0 {
            out[i] = Some(flat);
        }
    }
    out
}

/// [`lower_moment`] at every sample, by composite Simpson on the samples.
pub fn lower_moments(t: &BoundTable) -> Vec<f64> {
    let alpha = t.alpha();
    let h = t.u_step;
    let width = (1.0 / h).round() as usize;
    let row = &t.w_lower[0];
    (0..t.len())
        .map(|i| {
            let u = t.u_samples[i];
            let dens = |s: f64, w: f64| (1.0 - s / u).max(0.0).powf(alpha - 1.0) * w / s;
            let j0 = i.saturating_sub(width);
            let mut acc = 0.0;
            for j in j0..i {
                let s0 = t.u_samples[j];
                let sm = s0 + 0.5 * h;
                let wm = interp_row(row, j as f64 + 0.5, Round::Down);
                acc += h / 6.0 * (dens(s0, row[j]) + 4.0 * dens(sm, wm) + dens(s0 + h, row[j + 1]));
            }
            acc
        })
        .collect()
}

pub fn row_upper2(t: &BoundTable, l: usize, moments: &[f64]) -> Vec<Option<f64>> {
    let g = &t.grid;
    if l >= g.n {
        return vec![None; t.len()];
    }
    let root = g.k(l).powf(1.0 / g.alpha);
    (0..t.len())
        .map(|i| {
            if t.u_samples[i] < root {
                return None;
            }
            (l + 1..=g.n).map(|h| t.w_upper[h][i] - (g.k(h) - g.k(l)) * moments[i]).reduce(f64::min)
        })
        .collect()
}

/// Integrals shared by every level for one weight profile.
#[derive(Debug, Clone)]
pub struct ProfileTails {
    pub params: ProfileParams,
    pub iv: usize,
    /// `(A, B, C)` tails per sample.
    pub tails: Vec<Option<(f64, f64, f64)>>,
}

pub fn profile_tails(t: &BoundTable, pc: &Precomputed, p: &ProfileParams) -> ProfileTails {
    let iv = sample_index(t, p.v);
    let hs = pc.h_table(p.v).expect("H table for every profile v");
    let floor = p.v / (p.v - 1.0);
    let parts = |s: f64, j: usize| {
        let h = hs[j];
        if !h.is_finite() {
            return None;
        }
        profile_integrands(t, p, s, h)
    };
    let a = tail_integrals(t, iv, floor, |s, j| parts(s, j).map(|x| x.0));
    let b = tail_integrals(t, iv, floor, |s, j| parts(s, j).map(|x| x.1));
    let c = tail_integrals(t, iv, floor, |s, j| parts(s, j).map(|x| x.2));
    let tails = (0..t.len()).map(|i| Some((a[i]?, b[i]?, c[i]?))).collect();
    ProfileTails { params: *p, iv, tails }
}

pub fn row_upper3(t: &BoundTable, l: usize, pt: &ProfileTails) -> Vec<Option<f64>> {
    let g = &t.grid;
    if l > g.n {
        return vec![None; t.len()];
    }
    let k = g.k(l);
    let root = k.powf(1.0 / g.alpha);
    let top = t.w_upper[l][pt.iv];
    (0..t.len())
        .map(|i| {
            let u = t.u_samples[i];
            if i >= pt.iv || u < root || k > pt.params.k_floor(g, u) {
                return None;
            }
            let (a, b, c) = pt.tails[i]?;
            Some(top - a + b - k * c)
        })
        .collect()
}

pub fn row_upper4(t: &BoundTable, l: usize) -> Vec<Option<f64>> {
    let g = &t.grid;
    if l == 0 || l >= g.n {
        return vec![None; t.len()];
    }
    let k = g.k(l);
    (0..t.len())
        .map(|i| {
            let mut best = f64::INFINITY;
            for a in 0..l {
                for b in l + 1..=g.n {
                    best = best.min(chord(g.k(a), t.w_upper[a][i], g.k(b), t.w_upper[b][i], k));
                }
            }
            Some(best)
        })
        .collect()
}

pub fn row_upper5(t: &BoundTable, l: usize) -> Vec<Option<f64>> {
    (0..t.len()).map(|i| op_upper5(t, l, t.u_samples[i])).collect()
}
