//! Weight grid, sampled bound tables and interpolation between weight levels.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TableError {
    #[error("k = {k} outside [{lo}, {hi}]")]
    KOutOfRange { k: f64, lo: f64, hi: f64 },
    #[error("u = {u} outside sampled range [{lo}, {hi}]")]
    UOutOfRange { u: f64, lo: f64, hi: f64 },
    #[error("level {level} has no upper-bound row")]
    NoUpperRow { level: usize },
    #[error("malformed table: {0}")]
    Malformed(String),
}

/// Weight levels `k₀ = 0 < k₁ < … < k_{n+5}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KGrid {
    pub alpha: f64,
    pub n: usize,
    pub levels: Vec<f64>,
}

pub fn build_kgrid(alpha: f64, n: usize) -> KGrid {
    assert!(alpha >= 2.0, "alpha must be at least 2");
    assert!(n >= 2, "need at least two interior levels");
    let top = 2f64.powf(alpha);
    let mut levels: Vec<f64> = (0..=n).map(|h| h as f64 * top / n as f64).collect();
    levels[n] = top;
    let a = 3f64.powf(alpha) / 2.0;
    let b = top / (top / 10f64.powf(alpha) + 0.9f64.powf(alpha));
    levels.push(a.min(b));
    for v in [4.0f64, 4.5, 5.0, 5.5] {
        levels.push(v.powf(alpha) / 2.0);
    }
    KGrid { alpha, n, levels }
}

impl KGrid {
    pub fn k(&self, l: usize) -> f64 {
        self.levels[l]
    }

    pub fn k_n(&self) -> f64 {
        self.levels[self.n]
    }

    /// Index of the last level (`n + 5`).
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    /// `u + k/(α u^{α−1})`.
    pub fn weight_k(&self, k: f64, u: f64) -> f64 {
        u + k / (self.alpha * u.powf(self.alpha - 1.0))
    }

    pub fn weight(&self, l: usize, u: f64) -> f64 {
        self.weight_k(self.levels[l], u)
    }

    pub fn level_of(&self, k: f64) -> Option<usize> {
        self.levels.iter().position(|&x| (x - k).abs() < 1e-9)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSplit {
    pub k_lo: f64,
    pub k_hi: f64,
    pub beta: f64,
    pub lo: usize,
    pub hi: usize,
}

/// Splits `k` between neighbouring levels among `k₀..k_{top}`.
fn split_upto(grid: &KGrid, k: f64, top: usize) -> Result<BetaSplit, TableError> {
    let lv = &grid.levels;
    if !(k >= 0.0) || k > lv[top] * (1.0 + 1e-12) {
        return Err(TableError::KOutOfRange { k, lo: 0.0, hi: lv[top] });
    }
    if k == 0.0 {
        return Ok(BetaSplit { k_lo: 0.0, k_hi: lv[1], beta: 0.0, lo: 0, hi: 1 });
    }
    // first index in 1..=top with level >= k
    let mut hi = match lv[1..=top].binary_search_by(|x| x.partial_cmp(&k).unwrap()) {
        Ok(i) => i + 1,
        Err(i) => i + 1,
    };
    if hi > top {
        hi = top;
    }
    if (lv[hi] - k).abs() <= 1e-12 * lv[hi].max(1.0) {
        return Ok(BetaSplit { k_lo: lv[hi], k_hi: lv[hi], beta: 1.0, lo: hi, hi });
    }
    let lo = hi - 1;
    let beta = (k - lv[lo]) / (lv[hi] - lv[lo]);
    Ok(BetaSplit { k_lo: lv[lo], k_hi: lv[hi], beta, lo, hi })
}

/// β with `β·k_hi + (1−β)·k_lo = k`, neighbours taken among `k₀..k_n`.
pub fn beta_split(grid: &KGrid, k: f64) -> Result<BetaSplit, TableError> {
    split_upto(grid, k, grid.n)
}

/// Same split but over every level that carries a lower-bound row.
pub fn beta_split_lower(grid: &KGrid, k: f64) -> Result<BetaSplit, TableError> {
    split_upto(grid, k, grid.top())
}

/// Which way interpolation between u-samples is rounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Up,
    Down,
    Raw,
}

/// Weighted bounds `e^{−γ}(u + k/(α u^{α−1}))·F` and the same with f,
/// sampled at `u = step·i`, `i = 1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundTable {
    pub grid: KGrid,
    pub u_step: f64,
    pub u_samples: Vec<f64>,
    /// rows `0..=n`
    pub w_upper: Vec<Vec<f64>>,
    /// rows `0..=n+5`
    pub w_lower: Vec<Vec<f64>>,
    pub iteration_index: u64,
}

pub const DEFAULT_U_STEP: f64 = 0.01;
pub const DEFAULT_U_MAX: f64 = 10.0;

/// Linear interpolation at fractional index, rounded by the local
/// second-difference bound.
#[inline]
pub fn interp_row(row: &[f64], x: f64, round: Round) -> f64 {
    let n = row.len();
    let i = (x.floor() as isize).clamp(0, n as isize - 1) as usize;
    let t = x - i as f64;
    if i + 1 >= n || t <= 0.0 {
        return row[i.min(n - 1)];
    }
    let lin = row[i] + (row[i + 1] - row[i]) * t;
    if round == Round::Raw {
        return lin;
    }
    let d2 = |j: usize| {
        if j == 0 || j + 1 >= n {
            0.0
        } else {
            (row[j - 1] - 2.0 * row[j] + row[j + 1]).abs()
        }
    };
    let corr = 0.5 * t * (1.0 - t) * d2(i).max(d2(i + 1));
    match round {
        Round::Up => lin + corr,
        Round::Down => (lin - corr).max(0.0_f64.min(lin)),
        Round::Raw => lin,
    }
}

impl BoundTable {
    pub fn new(grid: KGrid, u_step: f64, u_max: f64) -> Self {
        let count = (u_max / u_step).round() as usize;
        assert!(count >= 4, "u grid too small");
        let u_samples: Vec<f64> = (1..=count).map(|i| i as f64 * u_step).collect();
        let w_upper = vec![vec![0.0; count]; grid.n + 1];
        let w_lower = vec![vec![0.0; count]; grid.top() + 1];
        BoundTable { grid, u_step, u_samples, w_upper, w_lower, iteration_index: 0 }
    }

    pub fn alpha(&self) -> f64 {
        self.grid.alpha
    }

    pub fn len(&self) -> usize {
        self.u_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u_samples.is_empty()
    }

    pub fn u_min(&self) -> f64 {
        self.u_samples[0]
    }

    pub fn u_max(&self) -> f64 {
        *self.u_samples.last().unwrap()
    }

    /// Sample index of `u` if it is (numerically) a sample.
    pub fn index_of(&self, u: f64) -> Option<usize> {
        let x = u / self.u_step - 1.0;
        let i = x.round();
        if (x - i).abs() < 1e-6 && i >= 0.0 && (i as usize) < self.len() {
            Some(i as usize)
        } else {
            None
        }
    }

    /// Fractional sample index of `u`.
    #[inline]
    pub fn frac_index(&self, u: f64) -> f64 {
        let x = u / self.u_step - 1.0;
        let r = x.round();
        if (x - r).abs() < 1e-9 {
            r
        } else {
            x
        }
    }

    fn check_u(&self, u: f64) -> Result<(), TableError> {
        let lo = self.u_min();
        let hi = self.u_max();
        if !(u >= lo - 1e-9) || u > hi + 1e-9 {
            return Err(TableError::UOutOfRange { u, lo, hi });
        }
        Ok(())
    }

    /// Weighted upper value at a level, interpolated in u (rounded up).
    #[inline]
    pub fn upper_at(&self, l: usize, u: f64) -> f64 {
        interp_row(&self.w_upper[l], self.frac_index(u), Round::Up)
    }

    /// Weighted lower value at a level, interpolated in u (rounded down).
    #[inline]
    pub fn lower_at(&self, l: usize, u: f64) -> f64 {
        interp_row(&self.w_lower[l], self.frac_index(u), Round::Down)
    }

    pub fn try_upper(&self, l: usize, u: f64) -> Result<f64, TableError> {
        if l > self.grid.n {
            return Err(TableError::NoUpperRow { level: l });
        }
        self.check_u(u)?;
        Ok(self.upper_at(l, u))
    }

    pub fn try_lower(&self, l: usize, u: f64) -> Result<f64, TableError> {
        if l > self.grid.top() {
            return Err(TableError::KOutOfRange { k: l as f64, lo: 0.0, hi: self.grid.top() as f64 });
        }
        self.check_u(u)?;
        Ok(self.lower_at(l, u))
    }

    /// Weighted upper value at a fractional weight `k ≤ k_n`: the β-mix of
    /// the neighbouring weighted rows.
    #[inline]
    pub fn breve_upper_weighted(&self, k: f64, u: f64) -> Result<f64, TableError> {
        let s = beta_split(&self.grid, k)?;
        let x = self.frac_index(u);
        let hi = interp_row(&self.w_upper[s.hi], x, Round::Up);
        if s.beta >= 1.0 {
            return Ok(hi);
        }
        let lo = interp_row(&self.w_upper[s.lo], x, Round::Up);
        Ok(s.beta * hi + (1.0 - s.beta) * lo)
    }

    /// Weighted lower value at a fractional weight up to `k_{n+5}`.
    #[inline]
    pub fn breve_lower_weighted(&self, k: f64, u: f64) -> Result<f64, TableError> {
        let s = beta_split_lower(&self.grid, k)?;
        let x = self.frac_index(u);
        let hi = interp_row(&self.w_lower[s.hi], x, Round::Down);
        if s.beta >= 1.0 {
            return Ok(hi);
        }
        let lo = interp_row(&self.w_lower[s.lo], x, Round::Down);
        Ok(s.beta * hi + (1.0 - s.beta) * lo)
    }

    /// e^{−γ}·F̆(k, u): the β-mix divided by the weight at `(k, u)`.
    #[allow(non_snake_case)]
    pub fn breve_F(&self, k: f64, u: f64) -> Result<f64, TableError> {
        self.check_u(u)?;
        Ok(self.breve_upper_weighted(k, u)? / self.grid.weight_k(k, u))
    }

    /// e^{−γ}·f̆(k, u).
    pub fn breve_f(&self, k: f64, u: f64) -> Result<f64, TableError> {
        self.check_u(u)?;
        if k > self.grid.k_n() {
            return Err(TableError::KOutOfRange { k, lo: 0.0, hi: self.grid.k_n() });
        }
        Ok(self.breve_lower_weighted(k, u)? / self.grid.weight_k(k, u))
    }

    /// Largest entrywise change between two tables of equal shape.
    pub fn max_change(&self, other: &BoundTable) -> f64 {
        let mut m = 0.0f64;
        for (a, b) in self.w_upper.iter().zip(&other.w_upper) {
            for (x, y) in a.iter().zip(b) {
                m = m.max((x - y).abs());
            }
        }
        for (a, b) in self.w_lower.iter().zip(&other.w_lower) {
            for (x, y) in a.iter().zip(b) {
                m = m.max((x - y).abs());
            }
        }
        m
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        Checkpoint {
            alpha: self.grid.alpha,
            n: self.grid.n,
            levels: self.grid.levels.clone(),
            u_samples: self.u_samples.clone(),
            w_upper: self.w_upper.clone(),
            w_lower: self.w_lower.clone(),
            iteration_index: self.iteration_index,
        }
    }

    pub fn from_checkpoint(c: Checkpoint) -> Result<Self, TableError> {
        if c.u_samples.len() < 4 {
            return Err(TableError::Malformed("too few u samples".into()));
        }
        let step = c.u_samples[0];
        for (i, u) in c.u_samples.iter().enumerate() {
            if ((i + 1) as f64 * step - u).abs() > 1e-9 {
                return Err(TableError::Malformed("u samples are not a uniform grid from step".into()));
            }
        }
        if c.levels.len() != c.n + 6 || c.w_upper.len() != c.n + 1 || c.w_lower.len() != c.n + 6 {
            return Err(TableError::Malformed("row counts do not match the grid".into()));
        }
        if c.w_upper.iter().chain(&c.w_lower).any(|r| r.len() != c.u_samples.len()) {
            return Err(TableError::Malformed("row length differs from u samples".into()));
        }
        Ok(BoundTable {
            grid: KGrid { alpha: c.alpha, n: c.n, levels: c.levels },
            u_step: step,
            u_samples: c.u_samples,
            w_upper: c.w_upper,
            w_lower: c.w_lower,
            iteration_index: c.iteration_index,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_checkpoint()).expect("table serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, TableError> {
        let c: Checkpoint = serde_json::from_str(s).map_err(|e| TableError::Malformed(e.to_string()))?;
        Self::from_checkpoint(c)
    }
}

/// On-disk shape of a table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub alpha: f64,
    pub n: usize,
    pub levels: Vec<f64>,
    pub u_samples: Vec<f64>,
    #[serde(rename = "wF")]
    pub w_upper: Vec<Vec<f64>>,
    #[serde(rename = "wf")]
    pub w_lower: Vec<Vec<f64>>,
    pub iteration_index: u64,
}

/// One CSV line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub u: f64,
    pub k: f64,
    pub w_upper: Option<f64>,
    pub w_lower: f64,
}

pub const CSV_HEADER: &str = "u,k,wF,wf";

/// Rows in decreasing u, then decreasing k. Levels without an upper row
/// leave the wF field empty.
pub fn emit_rows(rows: &[CsvRow]) -> String {
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| b.u.partial_cmp(&a.u).unwrap().then(b.k.partial_cmp(&a.k).unwrap()));
    let mut out = String::with_capacity(40 * (sorted.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &sorted {
        let up = r.w_upper.map(|v| format!("{v:.6}")).unwrap_or_default();
        out.push_str(&format!("{:.6},{:.6},{},{:.6}\n", r.u, r.k, up, r.w_lower));
    }
    out
}

pub fn table_rows(table: &BoundTable, u_filter: Option<&[f64]>) -> Vec<CsvRow> {
    let mut rows = Vec::new();
    let idx: Vec<usize> = match u_filter {
        Some(us) => us.iter().filter_map(|&u| table.index_of(u)).collect(),
        None => (0..table.len()).collect(),
    };
    for &i in &idx {
        for l in 0..=table.grid.top() {
            rows.push(CsvRow {
                u: table.u_samples[i],
                k: table.grid.k(l),
                w_upper: (l <= table.grid.n).then(|| table.w_upper[l][i]),
                w_lower: table.w_lower[l][i],
            });
        }
    }
    rows
}

pub fn emit_csv(table: &BoundTable) -> String {
    emit_rows(&table_rows(table, None))
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, TableError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(TableError::Malformed(format!("bad header {other:?}"))),
    }
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| TableError::Malformed(format!("{s:?}: {e}")));
    let mut out = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(TableError::Malformed(format!("expected 4 fields: {line}")));
        }
        out.push(CsvRow {
            u: num(parts[0])?,
            k: num(parts[1])?,
            w_upper: if parts[2].trim().is_empty() { None } else { Some(num(parts[2])?) },
            w_lower: num(parts[3])?,
        });
    }
    Ok(out)
}
