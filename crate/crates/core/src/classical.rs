//! Buchstab-type functions h and w, the Jurkat–Richert pair F and f, and the
//! Selberg-type bound F̃ on [2, 4].

use std::sync::OnceLock;

use thiserror::Error;

use crate::numerics::exp_gamma;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("{name}({u}) is outside its domain")]
    Outside { name: &'static str, u: f64 },
}

/// Samples at `u_min + i·step`.
#[derive(Debug, Clone)]
pub struct DelayOdeTable {
    pub u_min: f64,
    pub u_max: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl DelayOdeTable {
    fn new(u_min: f64, u_max: f64, step: f64) -> Self {
        let len = ((u_max - u_min) / step).floor() as usize + 1;
        DelayOdeTable { u_min, u_max, step, values: vec![0.0; len] }
    }

    fn node(&self, i: usize) -> f64 {
        self.u_min + i as f64 * self.step
    }

    /// Four-point Lagrange interpolation whose stencil never straddles an
    /// integer abscissa (the functions have derivative jumps there).
    pub fn eval(&self, u: f64) -> f64 {
        let n = self.values.len();
        let x = (u - self.u_min) / self.step;
        let i = (x.floor() as isize).clamp(0, n as isize - 2) as usize;
        let per_unit = (1.0 / self.step).round() as usize;
        let crosses = |j: usize| {
            let lo = self.node(j);
            let hi = self.node(j + 3);
            let first = lo.floor() + 1.0;
            first < hi - 0.5 * self.step && first > lo + 0.5 * self.step
        };
        let mut start = i.saturating_sub(1);
        if start + 3 >= n || crosses(start) {
            let fwd = i;
            let back = i.saturating_sub(2);
            start = if fwd + 3 < n && !crosses(fwd) {
                fwd
            } else if back + 3 < n && !crosses(back) {
                back
            } else {
                // Tiny tables; fall back to linear.
                let t = x - i as f64;
                return self.values[i] * (1.0 - t) + self.values[i + 1] * t;
            };
        }
        let _ = per_unit;
        let t = x - start as f64;
        let y = &self.values[start..start + 4];
        let (t0, t1, t2, t3) = (t, t - 1.0, t - 2.0, t - 3.0);
        -y[0] * t1 * t2 * t3 / 6.0 + y[1] * t0 * t2 * t3 / 2.0 - y[2] * t0 * t1 * t3 / 2.0
            + y[3] * t0 * t1 * t2 / 6.0
    }
}

/// All classical companions sampled on one grid.
#[derive(Debug, Clone)]
pub struct ClassicalFunctions {
    /// h(u)
    pub h: DelayOdeTable,
    /// u·w(u)
    pub uw: DelayOdeTable,
    /// u·F(u)
    pub u_f_upper: DelayOdeTable,
    /// u·f(u)
    pub u_f_lower: DelayOdeTable,
}

pub const DEFAULT_STEP: f64 = 1.0 / 4096.0;
pub const DEFAULT_U_MAX: f64 = 32.0;

fn h_closed(u: f64) -> f64 {
    if u <= 1.0 {
        u
    } else {
        2.0 * u - u * u.ln() - 1.0
    }
}

/// Integral over cell `[x_i, x_i + s]` of a function known at nodes, with a
/// stencil kept on one side of integer abscissae.
fn cell_integral(g: &dyn Fn(usize) -> f64, i: usize, s: f64, per_unit: usize) -> f64 {
    let at_left_kink = i % per_unit == 0;
    let at_right_kink = (i + 1) % per_unit == 0;
    if at_left_kink || i == 0 {
        s / 24.0 * (9.0 * g(i) + 19.0 * g(i + 1) - 5.0 * g(i + 2) + g(i + 3))
    } else if at_right_kink {
        s / 24.0 * (g(i - 2) - 5.0 * g(i - 1) + 19.0 * g(i) + 9.0 * g(i + 1))
    } else {
        s / 24.0 * (-g(i - 1) + 13.0 * g(i) + 13.0 * g(i + 1) - g(i + 2))
    }
}

impl ClassicalFunctions {
    /// Builds all tables on `[0, u_max]`; `1/step` must be an integer.
    pub fn new(step: f64, u_max: f64) -> Self {
        let per_unit = (1.0 / step).round() as usize;
        assert!(((per_unit as f64) * step - 1.0).abs() < 1e-12, "1/step must be an integer");
        assert!(u_max >= 5.0);
        let eg = exp_gamma();

        let mut h = DelayOdeTable::new(0.0, u_max, step);
        let mut uw = DelayOdeTable::new(0.0, u_max, step);
        let mut ufu = DelayOdeTable::new(0.0, u_max, step);
        let mut ufl = DelayOdeTable::new(0.0, u_max, step);
        let n = h.values.len();
        let x = |i: usize| i as f64 * step;

        // h: h(u)/u = h(2)/2 - ∫_2^u h(t-1)/t² dt for u > 2.
        let two = 2 * per_unit;
        for i in 0..n.min(two + 1) {
            h.values[i] = h_closed(x(i));
        }
        let mut ratio = h.values[two] / 2.0;
        for i in two..n - 1 {
            let g = |j: usize| {
                let t = x(j);
                let hv = if j >= two + per_unit { h.values[j - per_unit] } else { h_closed(t - 1.0) };
                hv / (t * t)
            };
            ratio -= cell_integral(&g, i, step, per_unit);
            h.values[i + 1] = ratio * x(i + 1);
        }

        // w: u·w(u) = 1 on [1, 2], then (u w)' = w(u-1).
        for i in per_unit..n.min(two + 1) {
            uw.values[i] = 1.0;
        }
        let mut acc = 1.0;
        for i in two..n - 1 {
            let g = |j: usize| {
                let s = x(j) - 1.0;
                uw.values[j - per_unit] / s
            };
            acc += cell_integral(&g, i, step, per_unit);
            uw.values[i + 1] = acc;
        }

        // F, f: uF = 2e^γ on (0, 3], uf = 2e^γ ln(u-1) on [2, 4].
        let three = 3 * per_unit;
        let four = 4 * per_unit;
        for i in 0..n.min(three + 1) {
            ufu.values[i] = 2.0 * eg;
        }
        for i in 0..n.min(four + 1) {
            let u = x(i);
            ufl.values[i] = if u <= 2.0 { 0.0 } else { 2.0 * eg * (u - 1.0).ln() };
        }
        // March both; (uF)' = f(u-1) needs uf up to u-1, (uf)' = F(u-1).
        let mut a = ufu.values[three];
        let mut b = ufl.values[four];
        for i in three..n - 1 {
            {
                let g = |j: usize| {
                    let s = x(j) - 1.0;
                    ufl.values[j - per_unit] / s
                };
                a += cell_integral(&g, i, step, per_unit);
            }
            ufu.values[i + 1] = a;
            if i >= four {
                let g = |j: usize| {
                    let s = x(j) - 1.0;
                    ufu.values[j - per_unit] / s
                };
                b += cell_integral(&g, i, step, per_unit);
                ufl.values[i + 1] = b;
            }
        }

        ClassicalFunctions { h, uw, u_f_upper: ufu, u_f_lower: ufl }
    }

    pub fn shared() -> &'static ClassicalFunctions {
        static SHARED: OnceLock<ClassicalFunctions> = OnceLock::new();
        SHARED.get_or_init(|| ClassicalFunctions::new(DEFAULT_STEP, DEFAULT_U_MAX))
    }

    fn u_max(&self) -> f64 {
        self.h.u_max
    }

    pub fn h(&self, u: f64) -> Result<f64, DomainError> {
        if !(u >= 0.0) || u > self.u_max() {
            return Err(DomainError::Outside { name: "h", u });
        }
        Ok(if u <= 2.0 { h_closed(u) } else { self.h.eval(u) })
    }

    pub fn w(&self, u: f64) -> Result<f64, DomainError> {
        if !(u >= 1.0) || u > self.u_max() {
            return Err(DomainError::Outside { name: "w", u });
        }
        Ok(if u <= 2.0 { 1.0 / u } else { self.uw.eval(u) / u })
    }

    pub fn upper(&self, u: f64) -> Result<f64, DomainError> {
        if !(u > 0.0) || u > self.u_max() {
            return Err(DomainError::Outside { name: "F", u });
        }
        Ok(if u <= 3.0 { 2.0 * exp_gamma() / u } else { self.u_f_upper.eval(u) / u })
    }

    pub fn lower(&self, u: f64) -> Result<f64, DomainError> {
        if !(u > 0.0) || u > self.u_max() {
            return Err(DomainError::Outside { name: "f", u });
        }
        Ok(if u <= 2.0 {
            0.0
        } else if u <= 4.0 {
            2.0 * exp_gamma() * (u - 1.0).ln() / u
        } else {
            self.u_f_lower.eval(u) / u
        })
    }

    pub fn tilde_upper(&self, u: f64) -> Result<f64, DomainError> {
        if !(2.0..=4.0).contains(&u) {
            return Err(DomainError::Outside { name: "F~", u });
        }
        let q = 1.0 - 2.0 / u;
        let poly = q - 0.5 * q * q - q * q * q / 6.0;
        Ok(exp_gamma() * (4.0 * h_closed(u / 2.0) / (u * u) + (2.0 + (u / 2.0).ln()) * (2.0 / u) * poly))
    }
}

pub fn buchstab_h(u: f64) -> Result<f64, DomainError> {
    ClassicalFunctions::shared().h(u)
}

pub fn buchstab_w(u: f64) -> Result<f64, DomainError> {
    ClassicalFunctions::shared().w(u)
}

/// Jurkat–Richert upper function F.
#[allow(non_snake_case)]
pub fn jr_F(u: f64) -> Result<f64, DomainError> {
    ClassicalFunctions::shared().upper(u)
}

/// Jurkat–Richert lower function f.
pub fn jr_f(u: f64) -> Result<f64, DomainError> {
    ClassicalFunctions::shared().lower(u)
}

#[allow(non_snake_case)]
pub fn tilde_F(u: f64) -> Result<f64, DomainError> {
    ClassicalFunctions::shared().tilde_upper(u)
}
