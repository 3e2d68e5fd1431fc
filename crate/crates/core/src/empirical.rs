//! Brute-force ground truth at desk scale: primes, the singular series,
//! representation counts and the Goldbach exception scan.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::constants::ConstantsReport;
use crate::numerics::{integrate, QuadratureConfig};

/// Largest sieve limit accepted.
pub const MAX_LIMIT: u64 = 1 << 34;
/// Memory the prime table may use (bitset plus prime list), in bytes.
pub const MEMORY_BUDGET: u64 = 1 << 31;
/// Smallest N for which the asymptotic ratios are compared.
pub const ASYMPTOTIC_MIN_N: u64 = 10_000;

const SEGMENT: u64 = 1 << 18;
const CACHE_MAGIC: &[u8; 5] = b"SVKP1";

#[derive(Debug, Error)]
pub enum EmpiricalError {
    #[error("limit {limit} needs about {bytes} bytes, over the budget of {budget}")]
    Resource { limit: u64, bytes: u64, budget: u64 },
    #[error("{0}")]
    Domain(String),
    #[error("prime table up to {limit} is too small for {needed}")]
    Range { limit: u64, needed: u64 },
    #[error("cache file: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Primality bitset up to `limit` and the sorted list of primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    pub limit: u64,
    bits: Vec<u64>,
    pub primes: Vec<u64>,
}

fn estimated_bytes(limit: u64) -> u64 {
    let bitset = limit / 8 + 8;
    let count = if limit < 100 { 25 } else { (1.3 * limit as f64 / (limit as f64).ln()) as u64 };
    bitset + 8 * count
}

fn simple_sieve(limit: usize) -> Vec<u64> {
    let mut comp = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

impl PrimeTable {
    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        n <= self.limit && (self.bits[(n >> 6) as usize] >> (n & 63)) & 1 == 1
    }

    /// Number of primes up to `x ≤ limit`.
    pub fn pi(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }

    fn from_bits(limit: u64, bits: Vec<u64>) -> Self {
        let mut primes = Vec::new();
        for (w, &word) in bits.iter().enumerate() {
            let mut x = word;
            while x != 0 {
                let b = x.trailing_zeros() as u64;
                let n = ((w as u64) << 6) | b;
                if n <= limit {
                    primes.push(n);
                }
                x &= x - 1;
            }
        }
        PrimeTable { limit, bits, primes }
    }

    /// Writes the cache format: magic, little-endian limit, raw bitset.
    pub fn save(&self, path: &Path) -> Result<(), EmpiricalError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(CACHE_MAGIC)?;
        f.write_all(&self.limit.to_le_bytes())?;
        for w in &self.bits {
            f.write_all(&w.to_le_bytes())?;
        }
        f.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, EmpiricalError> {
        let mut data = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut data)?;
        if data.len() < 13 || &data[..5] != CACHE_MAGIC {
            return Err(EmpiricalError::Cache("bad magic".into()));
        }
        let limit = u64::from_le_bytes(data[5..13].try_into().unwrap());
        let words = (limit / 64 + 1) as usize;
        let body = &data[13..];
        if body.len() != words * 8 {
            return Err(EmpiricalError::Cache(format!("expected {} bitset bytes, found {}", words * 8, body.len())));
        }
        let bits = body.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(Self::from_bits(limit, bits))
    }
}

/// Segmented sieve of Eratosthenes up to `limit`.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable, EmpiricalError> {
    if limit < 2 {
        return Err(EmpiricalError::Domain(format!("sieve limit {limit} is below 2")));
    }
    let bytes = estimated_bytes(limit);
    if limit > MAX_LIMIT || bytes > MEMORY_BUDGET {
        return Err(EmpiricalError::Resource { limit, bytes, budget: MEMORY_BUDGET });
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = simple_sieve(root as usize);
    let words = (limit / 64 + 1) as usize;
    let mut bits = vec![0u64; words];
    let mut seg = vec![true; SEGMENT as usize];
    let mut lo = 0u64;
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        seg[..len].iter_mut().for_each(|x| *x = true);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut m = (p * p).max(lo.div_ceil(p) * p);
            while m <= hi {
                seg[(m - lo) as usize] = false;
                m += p;
            }
        }
        for (i, &is_p) in seg[..len].iter().enumerate() {
            let n = lo + i as u64;
            if is_p && n >= 2 {
                bits[(n >> 6) as usize] |= 1 << (n & 63);
            }
        }
        lo = hi + 1;
    }
    Ok(PrimeTable::from_bits(limit, bits))
}

/// `∫_x^∞ dt/((t−1)² ln t)`, the density estimate of `Σ_{p>x} 1/(p−1)²`.
fn twin_tail(x: f64) -> f64 {
    // t = x/s maps [x, ∞) onto (0, 1].
    let g = |s: f64| if s <= 0.0 { 0.0 } else { x / ((x - s).powi(2) * (x / s).ln()) };
    integrate(g, 0.0, 1.0, QuadratureConfig::with_tol(1e-14)).unwrap_or_else(|_| 1.0 / (x * x.ln()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularSeries {
    pub value: f64,
    /// Size of the tail correction, as a rough error scale.
    pub tail_uncertainty: f64,
}

/// `C(N) = ∏_{p|N, p>2} (p−1)/(p−2) · ∏_{p>2} (1 − 1/(p−1)²)`, the second
/// product taken over `p ≤ cutoff` and completed with a tail estimate.
pub fn singular_series(n: u64, cutoff: u64) -> Result<SingularSeries, EmpiricalError> {
    if n % 2 != 0 || n == 0 {
        return Err(EmpiricalError::Domain(format!("N = {n} is not a positive even number")));
    }
    if cutoff < 1000 {
        return Err(EmpiricalError::Domain(format!("prime cutoff {cutoff} is below 1000")));
    }
    let primes = sieve_primes(cutoff)?;
    singular_series_with(n, &primes)
}

/// [`singular_series`] reusing a prime table as the cutoff.
pub fn singular_series_with(n: u64, primes: &PrimeTable) -> Result<SingularSeries, EmpiricalError> {
    if n % 2 != 0 || n == 0 {
        return Err(EmpiricalError::Domain(format!("N = {n} is not a positive even number")));
    }
    let mut log_twin = 0.0;
    for &p in primes.primes.iter().skip(1) {
        let q = (p - 1) as f64;
        log_twin += (1.0 - 1.0 / (q * q)).ln();
    }
    let tail = twin_tail(primes.limit as f64);
    let twin = (log_twin - tail).exp();
    let tail_uncertainty = twin * tail / (primes.limit as f64).ln();
    Ok(SingularSeries { value: twin * odd_divisor_factor(n), tail_uncertainty })
}

/// Cutoff of the cached twin-prime product used for [`CountReport::c_n`].
pub const TWIN_CUTOFF: u64 = 1 << 22;

/// `∏_{p>2} (1 − 1/(p−1)²)` at [`TWIN_CUTOFF`] with tail correction.
pub fn twin_constant() -> f64 {
    static VALUE: std::sync::OnceLock<f64> = std::sync::OnceLock::new();
    *VALUE.get_or_init(|| singular_series(2, TWIN_CUTOFF).expect("cutoff within budget").value)
}

/// `∏_{p|N, p>2} (p−1)/(p−2)`.
pub fn odd_divisor_factor(n: u64) -> f64 {
    let mut factor = 1.0;
    let mut m = n;
    while m % 2 == 0 {
        m /= 2;
    }
    let mut p = 3;
    while p * p <= m {
        if m % p == 0 {
            factor *= (p - 1) as f64 / (p - 2) as f64;
            while m % p == 0 {
                m /= p;
            }
        }
        p += 2;
    }
    if m > 1 {
        factor *= (m - 1) as f64 / (m - 2) as f64;
    }
    factor
}

/// Whether `m > 1` has at most two prime factors counted with multiplicity.
pub fn at_most_two_factors(m: u64, primes: &PrimeTable) -> bool {
    if m < 2 {
        return false;
    }
    if primes.is_prime(m) {
        return true;
    }
    for &q in &primes.primes {
        if q * q * q > m {
            // no factor up to m^{1/3}: m is a product of two primes
            return true;
        }
        if m % q == 0 {
            return primes.is_prime(m / q);
        }
    }
    false
}

/// Ω(m), prime factors with multiplicity, by trial division.
pub fn big_omega(mut m: u64, primes: &PrimeTable) -> u32 {
    let mut count = 0;
    for &q in &primes.primes {
        if q * q > m {
            break;
        }
        while m % q == 0 {
            m /= q;
            count += 1;
        }
    }
    if m > 1 {
        count += 1;
    }
    count
}

/// Whether `p` and `N − p` are counted separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Every prime `p < N`, so both orders of a pair count.
    #[default]
    Ordered,
    /// Only `p ≤ N − p`.
    Unordered,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub convention: Convention,
    #[serde(rename = "D")]
    pub d: u64,
    #[serde(rename = "D12")]
    pub d12: u64,
    #[serde(rename = "C_N")]
    pub c_n: f64,
    /// `D·ln²N/(C(N)·N)`.
    pub ratio_upper: f64,
    /// `D12·ln²N/(C(N)·N)`.
    pub ratio_lower: f64,
}

/// Counts `p < N` with `N − p` prime (`D`) and with `Ω(N − p) ≤ 2` (`D12`).
pub fn count_representations(n: u64, primes: &PrimeTable) -> Result<CountReport, EmpiricalError> {
    count_representations_with(n, primes, Convention::Ordered)
}

pub fn count_representations_with(
    n: u64,
    primes: &PrimeTable,
    convention: Convention,
) -> Result<CountReport, EmpiricalError> {
    if n % 2 != 0 || n < 4 {
        return Err(EmpiricalError::Domain(format!("N = {n} is not an even number ≥ 4")));
    }
    if primes.limit < n {
        return Err(EmpiricalError::Range { limit: primes.limit, needed: n });
    }
    let end = match convention {
        Convention::Ordered => primes.pi(n - 1),
        Convention::Unordered => primes.pi(n / 2),
    };
    let (d, d12) = primes.primes[..end]
        .par_iter()
        .map(|&p| {
            let m = n - p;
            let two = at_most_two_factors(m, primes);
            ((two && primes.is_prime(m)) as u64, two as u64)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let c_n = twin_constant() * odd_divisor_factor(n);
    let scale = (n as f64).ln().powi(2) / (c_n * n as f64);
    Ok(CountReport { n, convention, d, d12, c_n, ratio_upper: d as f64 * scale, ratio_lower: d12 as f64 * scale })
}

/// Even `n ≤ X` with no representation as a sum of two primes. Numbers
/// below 4 are skipped unless `literal` is set.
pub fn exception_scan(x: u64, primes: &PrimeTable, literal: bool) -> Result<Vec<u64>, EmpiricalError> {
    if primes.limit < x {
        return Err(EmpiricalError::Range { limit: primes.limit, needed: x });
    }
    let start = if literal { 2 } else { 4 };
    let evens: Vec<u64> = (start..=x).filter(|n| n % 2 == 0).collect();
    let mut out: Vec<u64> = evens
        .par_iter()
        .copied()
        .filter(|&n| !primes.primes.iter().take_while(|&&p| 2 * p <= n).any(|&p| primes.is_prime(n - p)))
        .collect();
    out.sort_unstable();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundVerdict {
    #[serde(rename = "N")]
    pub n: u64,
    pub ratio_upper: f64,
    pub goldbach_upper: f64,
    pub upper_margin: f64,
    pub upper_holds: bool,
    pub ratio_lower: f64,
    pub d12_lower: f64,
    pub lower_margin: f64,
    pub lower_holds: bool,
}

/// Compares the observed ratios with the asymptotic constants. Reported
/// only; the constants are limits, not finite-N guarantees.
pub fn compare_bounds(report: &CountReport, constants: &ConstantsReport) -> Result<BoundVerdict, EmpiricalError> {
    compare_with(report, constants.goldbach_upper, constants.d12_lower)
}

pub fn compare_with(report: &CountReport, goldbach_upper: f64, d12_lower: f64) -> Result<BoundVerdict, EmpiricalError> {
    if report.n < ASYMPTOTIC_MIN_N {
        return Err(EmpiricalError::Domain(format!(
            "N = {} is below {ASYMPTOTIC_MIN_N}; ratios are not comparable with asymptotic constants",
            report.n
        )));
    }
    Ok(BoundVerdict {
        n: report.n,
        ratio_upper: report.ratio_upper,
        goldbach_upper,
        upper_margin: goldbach_upper - report.ratio_upper,
        upper_holds: report.ratio_upper < goldbach_upper,
        ratio_lower: report.ratio_lower,
        d12_lower,
        lower_margin: report.ratio_lower - d12_lower,
        lower_holds: report.ratio_lower > d12_lower,
    })
}
