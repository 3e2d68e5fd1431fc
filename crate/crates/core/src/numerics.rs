//! Quadrature, root finding and the Euler constant.

use thiserror::Error;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub euler_gamma: f64,
    pub exp_gamma: f64,
    pub exp_neg_gamma: f64,
}

impl Constants {
    pub fn new() -> Self {
        Constants {
            euler_gamma: EULER_GAMMA,
            exp_gamma: EULER_GAMMA.exp(),
            exp_neg_gamma: (-EULER_GAMMA).exp(),
        }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::new()
    }
}

pub fn exp_gamma() -> f64 {
    EULER_GAMMA.exp()
}

pub fn exp_neg_gamma() -> f64 {
    (-EULER_GAMMA).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { abs_tol: 1e-10, max_depth: 60 }
    }
}

impl QuadratureConfig {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadratureConfig { abs_tol, ..Default::default() }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("singular integrand at t = {at}")]
    SingularIntegrand { at: f64 },
    #[error("quadrature depth exhausted, best estimate {estimate}")]
    DepthExhausted { estimate: f64 },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("no bracket: f({lo}) = {flo}, f({hi}) = {fhi}")]
    NoBracket { lo: f64, hi: f64, flo: f64, fhi: f64 },
}

/// Adaptive Simpson quadrature on `[a, b]`.
///
/// Endpoint values that are not finite are replaced by zero, so integrands
/// with an integrable endpoint singularity should be shifted by the caller.
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: QuadratureConfig) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(0.0);
    }
    let end = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            y
        } else {
            0.0
        }
    };
    let fa = end(a);
    let fb = end(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    if !fm.is_finite() {
        return Err(NumericsError::SingularIntegrand { at: m });
    }
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut exhausted = false;
    let value = simpson_step(&f, a, b, fa, fm, fb, whole, cfg.abs_tol, cfg.max_depth, &mut exhausted)?;
    if exhausted {
        return Err(NumericsError::DepthExhausted { estimate: value });
    }
    Ok(value)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    exhausted: &mut bool,
) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if !flm.is_finite() {
        return Err(NumericsError::SingularIntegrand { at: lm });
    }
    if !frm.is_finite() {
        return Err(NumericsError::SingularIntegrand { at: rm });
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 || m <= a || m >= b {
        *exhausted = true;
        return Ok(left + right + delta / 15.0);
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, exhausted)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, exhausted)?;
    Ok(l + r)
}

/// Integrates over consecutive pieces split at `breaks` (points outside
/// `(a, b)` are ignored), so kinks at known points do not slow refinement.
pub fn integrate_split<F>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: QuadratureConfig,
) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let pieces = pts.len() + 1;
    let piece_cfg = QuadratureConfig { abs_tol: cfg.abs_tol / pieces as f64, ..cfg };
    let mut lo = a;
    let mut total = 0.0;
    for &p in pts.iter().chain(std::iter::once(&b)) {
        total += integrate(&f, lo, p, piece_cfg)?;
        lo = p;
    }
    Ok(total)
}

/// Bisection. Returns the midpoint of the final bracket.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo * fhi < 0.0) {
        return Err(NumericsError::NoBracket { lo, hi, flo, fhi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `∫₀^x t^{α−1}/(1−t) dt` for `0 ≤ x < 1`.
pub fn pole_moment(alpha: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    assert!(x < 1.0, "pole_moment needs x < 1, got {x}");
    if (alpha - 2.0).abs() < 1e-15 {
        return -x - (1.0 - x).ln();
    }
    // Substitute s = -ln(1-t) to tame the pole near t = 1.
    let smax = -(1.0 - x).ln();
    integrate(
        |s| {
            let t = 1.0 - (-s).exp();
            t.powf(alpha - 1.0)
        },
        0.0,
        smax,
        QuadratureConfig::with_tol(1e-13),
    )
    .unwrap_or_else(|e| match e {
        NumericsError::DepthExhausted { estimate } => estimate,
        other => panic!("pole_moment: {other}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_reciprocal() {
        let c = Constants::new();
        assert!((c.exp_gamma * c.exp_neg_gamma - 1.0).abs() < 1e-15);
        assert!((c.exp_gamma - 1.781_072_4).abs() < 1e-7);
    }

    #[test]
    fn polynomial_exact() {
        let v = integrate(|t| t, 0.0, 1.0, QuadratureConfig::default()).unwrap();
        assert!((v - 0.5).abs() < 1e-14);
        let v = integrate(|t| t * t * t, -1.0, 2.0, QuadratureConfig::default()).unwrap();
        assert!((v - 3.75).abs() < 1e-12);
    }

    #[test]
    fn log_integrand_matches_midpoint_sum() {
        let g = |t: f64| t * (2.0 - 3.0 * t).ln() / (1.0 - t);
        let n = 1_000_000;
        let h = (1.0 / 3.0) / n as f64;
        let oracle: f64 = (0..n).map(|i| g((i as f64 + 0.5) * h)).sum::<f64>() * h;
        let v = integrate(g, 0.0, 1.0 / 3.0, QuadratureConfig::default()).unwrap();
        assert!((v - oracle).abs() < 1e-9, "{v} vs {oracle}");
        assert!((v - 0.018457).abs() < 1e-5);
    }

    #[test]
    fn singular_interior_is_reported() {
        let r = integrate(|t| 1.0 / (t - 0.5), 0.0, 1.0, QuadratureConfig::default());
        assert!(matches!(r, Err(NumericsError::SingularIntegrand { .. })));
    }

    #[test]
    fn halving_tolerance_is_stable() {
        let fs: Vec<Box<dyn Fn(f64) -> f64>> = vec![
            Box::new(|t: f64| t.sin()),
            Box::new(|t: f64| (1.0 + t).ln()),
            Box::new(|t: f64| (-t * t).exp()),
            Box::new(|t: f64| t.sqrt()),
        ];
        for f in &fs {
            let cfg = QuadratureConfig::default();
            let a = integrate(f, 0.0, 3.0, cfg).unwrap();
            let b = integrate(f, 0.0, 3.0, QuadratureConfig::with_tol(cfg.abs_tol / 2.0)).unwrap();
            assert!((a - b).abs() < cfg.abs_tol);
        }
    }

    #[test]
    fn linearity() {
        let cfg = QuadratureConfig::default();
        let f = |t: f64| t.cos();
        let g = |t: f64| t.exp();
        let lhs = integrate(|t| 2.0 * f(t) - 3.0 * g(t), 0.0, 1.5, cfg).unwrap();
        let rhs = 2.0 * integrate(f, 0.0, 1.5, cfg).unwrap() - 3.0 * integrate(g, 0.0, 1.5, cfg).unwrap();
        assert!((lhs - rhs).abs() <= 3.0 * cfg.abs_tol);
    }

    #[test]
    fn roots() {
        let r = find_root(|x| x - 2.0, 0.0, 4.0, 1e-12).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
        // 2.25(t-1)^2 = 4(t^2 - 2.25)  <=>  1.75 t^2 + 4.5 t - 11.25 = 0
        let r = find_root(|t| 2.25 * (t - 1.0) * (t - 1.0) / (t * t - 2.25) - 4.0, 1.5 + 1e-9, 10.0, 1e-12).unwrap();
        let q = (-4.5 + (4.5f64 * 4.5 + 4.0 * 1.75 * 11.25).sqrt()) / 3.5;
        assert!((r - q).abs() < 1e-10);
        assert!(matches!(find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-9), Err(NumericsError::NoBracket { .. })));
        let a = find_root(|x| x.cos() - x, 0.0, 1.0, 1e-13).unwrap();
        let b = find_root(|x| x.cos() - x, 0.0, 1.0, 1e-13).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn pole_moment_matches_closed_form() {
        assert!((pole_moment(2.0, 0.5) - (2f64.ln() - 0.5)).abs() < 1e-15);
        // alpha = 3: -x - x^2/2 - ln(1-x)
        let x = 0.4;
        let exact = -x - x * x / 2.0 - (1.0f64 - x).ln();
        assert!((pole_moment(3.0, x) - exact).abs() < 1e-11);
    }
}
