//! The Dickman–de Bruijn function and smooth-number counts.
//!
//! `rho` is tabulated on a uniform grid from the integral identity
//! `u rho(u) = int_{u-1}^{u} rho(t) dt`, using the trapezoidal rule with
//! its Euler–Maclaurin end correction. The correction needs only
//! `rho'(t) = -rho(t-1)/t`, which the table already holds, and lifts the
//! scheme from second to fourth order. Values are kept as `log rho` so the
//! table stays finite far past the `f64` underflow point.

use std::collections::HashMap;

use crate::arith::{for_each_factored, isqrt, PrimeTable};
use crate::error::{Error, Result};

/// Default grid step `2^-DEFAULT_STEP_LOG2`.
pub const DEFAULT_STEP_LOG2: u32 = 10;
pub const DEFAULT_U_MAX: f64 = 200.0;

#[derive(Clone, Debug)]
pub struct DickmanTable {
    per_unit: usize,
    u_max: f64,
    ln_rho: Vec<f64>,
    rho: Vec<f64>,
}

impl Default for DickmanTable {
    fn default() -> Self {
        DickmanTable::new(DEFAULT_STEP_LOG2, DEFAULT_U_MAX).expect("default Dickman table")
    }
}

impl DickmanTable {
    /// Tabulates `rho` on `[0, u_max]` with step `h = 2^-step_log2`.
    pub fn new(step_log2: u32, u_max: f64) -> Result<Self> {
        if !(1..=20).contains(&step_log2) {
            return Err(Error::Config(format!(
                "step 2^-{step_log2} outside the supported 2^-1 .. 2^-20"
            )));
        }
        if !(u_max >= 1.0) || !u_max.is_finite() {
            return Err(Error::Config(format!("u_max must be >= 1, got {u_max}")));
        }
        let n_unit = 1usize << step_log2;
        let h = 1.0 / n_unit as f64;
        let len = (u_max * n_unit as f64).floor() as usize + 1;
        let mut ln_rho = vec![0.0f64; len];

        // closed forms on [0, 2]
        let seeded = len.min(2 * n_unit + 1);
        for (i, v) in ln_rho.iter_mut().enumerate().take(seeded) {
            let u = i as f64 * h;
            *v = if u <= 1.0 { 0.0 } else { (1.0 - u.ln()).ln() };
        }

        if len > seeded {
            // Window sums split into a suffix of the previous unit block and
            // a prefix of the current one, each scaled by its block's first
            // log-value so that neither underflows.
            let mut prev_scale = ln_rho[n_unit];
            let mut suffix = suffix_sums(&ln_rho[n_unit..2 * n_unit], prev_scale);
            let mut cur_scale = ln_rho[2 * n_unit];
            let mut prefix = 1.0f64; // block 2 holds rho(2) so far

            for i in seeded..len {
                let off = i % n_unit;
                if off == 0 {
                    let block_start = i - n_unit;
                    prev_scale = cur_scale;
                    suffix = suffix_sums(&ln_rho[block_start..i], prev_scale);
                    prefix = 0.0;
                }
                let u = i as f64 * h;
                let back1 = (ln_rho[i - n_unit] - prev_scale).exp();
                let back2 = (ln_rho[i - 2 * n_unit] - prev_scale).exp();
                let window = suffix[off] + prefix * (cur_scale - prev_scale).exp();
                // u rho(u) = h (W - rho(u-1)/2 + rho(u)/2)
                //            - h^2/12 (rho'(u) - rho'(u-1))
                let rhs =
                    h * (window - 0.5 * back1) + h * h / 12.0 * (back1 / u - back2 / (u - 1.0));
                let ln_val = prev_scale + (rhs / (u - 0.5 * h)).ln();
                ln_rho[i] = ln_val;
                if off == 0 {
                    cur_scale = ln_val;
                    prefix = 1.0;
                } else {
                    prefix += (ln_val - cur_scale).exp();
                }
            }
        }

        let rho = ln_rho.iter().map(|v| v.exp()).collect();
        Ok(DickmanTable {
            per_unit: n_unit,
            u_max: (len - 1) as f64 * h,
            ln_rho,
            rho,
        })
    }

    pub fn step(&self) -> f64 {
        1.0 / self.per_unit as f64
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn len(&self) -> usize {
        self.ln_rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_rho.is_empty()
    }

    /// `(u_i, rho(u_i), log rho(u_i))` at grid index `i`.
    pub fn grid_point(&self, i: usize) -> Option<(f64, f64, f64)> {
        let ln = *self.ln_rho.get(i)?;
        Some((i as f64 * self.step(), self.rho[i], ln))
    }

    /// `log rho(u)`, linear in `log rho` between grid points.
    pub fn ln_rho(&self, u: f64) -> Result<f64> {
        if u.is_nan() || u > self.u_max {
            return Err(Error::TableRange {
                u,
                u_max: self.u_max,
            });
        }
        if u <= 1.0 {
            return Ok(0.0);
        }
        let pos = u * self.per_unit as f64;
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        if frac == 0.0 || i + 1 >= self.ln_rho.len() {
            return Ok(self.ln_rho[i]);
        }
        Ok(self.ln_rho[i] + frac * (self.ln_rho[i + 1] - self.ln_rho[i]))
    }

    pub fn rho(&self, u: f64) -> Result<f64> {
        Ok(self.ln_rho(u)?.exp())
    }
}

fn suffix_sums(block_ln: &[f64], scale: f64) -> Vec<f64> {
    let mut out = vec![0.0; block_ln.len() + 1];
    for j in (0..block_ln.len()).rev() {
        out[j] = out[j + 1] + (block_ln[j] - scale).exp();
    }
    out
}

/// `log rho(u)` from the expansion
/// `-u (log u + log log u - 1 + (log log u - 1) / log u)`.
pub fn rho_asymptotic(u: f64) -> Result<f64> {
    if !(u >= 3.0) {
        return Err(Error::Domain(format!(
            "asymptotic rho needs u >= 3, got {u}"
        )));
    }
    let l = u.ln();
    let ll = l.ln();
    Ok(-u * (l + ll - 1.0 + (ll - 1.0) / l))
}

/// Largest `x * Q` accepted by [`psi_exact`].
pub const PSI_WORK_BOUND: f64 = 1e18;

// Cells in the small-x lookup table (one u32 per (x, prime index)).
const TABLE_CELLS: usize = 1 << 22;
const TABLE_X_CAP: u64 = 1 << 20;
const ENUMERATION_Q_MAX: u64 = 7;
const MEMO_CAP: usize = 1 << 20;

/// Exact `psi(x, Q)` evaluator for a fixed `Q`.
///
/// Small arguments are answered from a cumulative table indexed by the
/// greatest prime factor; larger ones recurse by Buchstab's identity
/// `Psi(x, j) = Psi(x, j-1) + Psi(x / p_j, j)`, memoized per call. For
/// `Q <= 7` the sorted list of smooth numbers is enumerated instead.
#[derive(Clone, Debug)]
pub struct PsiCounter {
    q: u64,
    primes: Vec<u64>,
    table_x: u64,
    // cum[j * (table_x + 1) + x] = #{n <= x : p(n) <= p_j}, j = 0 means n = 1 only
    cum: Vec<u32>,
    enumerated: Option<Vec<u64>>,
}

impl PsiCounter {
    /// A counter tuned for arguments up to `max_x` (larger ones still work).
    pub fn new(q: u64, max_x: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::Domain(format!("psi needs Q >= 2, got {q}")));
        }
        let primes = PrimeTable::new(q)?.primes().to_vec();
        if q <= ENUMERATION_Q_MAX {
            return Ok(PsiCounter {
                q,
                enumerated: Some(enumerate_smooth(&primes, max_x.max(1))),
                primes,
                table_x: 0,
                cum: Vec::new(),
            });
        }
        let rows = primes.len() + 1;
        let table_x = max_x
            .min(TABLE_X_CAP)
            .min((TABLE_CELLS / rows) as u64)
            .max(1);
        let cum = cumulative_table(&primes, table_x);
        Ok(PsiCounter {
            q,
            primes,
            table_x,
            cum,
            enumerated: None,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn count(&self, x: u64) -> Result<u64> {
        if x as f64 * self.q as f64 > PSI_WORK_BOUND {
            return Err(Error::Resource(format!(
                "psi({x}, {}) exceeds the work bound x*Q <= {PSI_WORK_BOUND:e}",
                self.q
            )));
        }
        if x == 0 {
            return Ok(0);
        }
        if let Some(list) = &self.enumerated {
            if list.last().is_some_and(|&m| m >= x) || x <= 1 {
                return Ok(list.partition_point(|&m| m <= x) as u64);
            }
            return Ok(enumerate_smooth(&self.primes, x).len() as u64);
        }
        Ok(self.count_buchstab(x))
    }

    /// Count through the recursion alone, bypassing the enumeration path.
    pub fn count_buchstab(&self, x: u64) -> u64 {
        let mut memo = HashMap::new();
        self.psi_rec(x, self.primes.len(), &mut memo)
    }

    fn psi_rec(&self, x: u64, j: usize, memo: &mut HashMap<(u64, usize), u64>) -> u64 {
        if x == 0 {
            return 0;
        }
        // primes above x contribute nothing
        let j = j.min(self.primes.partition_point(|&p| p <= x));
        if j == 0 {
            return 1;
        }
        if j == 1 {
            return 64 - u64::from(x.leading_zeros());
        }
        if x <= self.table_x {
            return u64::from(self.cum[j * (self.table_x as usize + 1) + x as usize]);
        }
        if self.primes[j - 1] >= x {
            return x;
        }
        if let Some(&v) = memo.get(&(x, j)) {
            return v;
        }
        let mut total = 1u64;
        for i in 1..=j {
            total += self.psi_rec(x / self.primes[i - 1], i, memo);
        }
        if memo.len() < MEMO_CAP {
            memo.insert((x, j), total);
        }
        total
    }
}

fn enumerate_smooth(primes: &[u64], x: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for &p in primes {
        let mut next = Vec::new();
        for &m in &out {
            let mut v = m;
            while let Some(w) = v.checked_mul(p).filter(|&w| w <= x) {
                next.push(w);
                v = w;
            }
        }
        out.extend(next);
    }
    out.sort_unstable();
    out
}

fn cumulative_table(primes: &[u64], table_x: u64) -> Vec<u32> {
    let n = table_x as usize;
    // gpf index (1-based) among `primes`, or usize::MAX if some prime > Q divides
    let mut idx = vec![0usize; n + 1];
    let mut rest: Vec<u64> = (0..=n as u64).collect();
    for (k, &p) in primes.iter().enumerate() {
        let mut m = p as usize;
        while m <= n {
            while rest[m] % p == 0 {
                rest[m] /= p;
            }
            idx[m] = k + 1;
            m += p as usize;
        }
    }
    for m in 2..=n {
        if rest[m] != 1 {
            idx[m] = usize::MAX;
        }
    }
    let rows = primes.len() + 1;
    let width = n + 1;
    let mut cum = vec![0u32; rows * width];
    for j in 0..rows {
        let row = &mut cum[j * width..(j + 1) * width];
        let mut c = 0u32;
        for x in 1..=n {
            if idx[x] <= j {
                c += 1;
            }
            row[x] = c;
        }
    }
    cum
}

/// The number of `Q`-smooth integers in `[1, x]`.
pub fn psi_exact(x: u64, q: u64) -> Result<u64> {
    if x as f64 * q as f64 > PSI_WORK_BOUND {
        return Err(Error::Resource(format!(
            "psi({x}, {q}) exceeds the work bound x*Q <= {PSI_WORK_BOUND:e}"
        )));
    }
    PsiCounter::new(q, x.min(1 << 12))?.count(x)
}

/// `x rho(u)` with `u = log x / log Q`, returned as a logarithm.
pub fn psi_estimate_ln(x: f64, q: f64, table: &DickmanTable) -> Result<f64> {
    if !(q >= 2.0) || !(x >= 1.0) {
        return Err(Error::Domain(format!(
            "psi estimate needs x >= 1 and Q >= 2, got x = {x}, Q = {q}"
        )));
    }
    let u = x.ln() / q.ln();
    Ok(x.ln() + table.ln_rho(u)?)
}

pub fn psi_estimate(x: f64, q: f64, table: &DickmanTable) -> Result<f64> {
    Ok(psi_estimate_ln(x, q, table)?.exp())
}

/// Exact count of `Q`-smooth integers in `[x, x + y)` together with the
/// comparison against `psi(y, Q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortIntervalSmooth {
    pub x: u64,
    pub y: u64,
    pub q: u64,
    pub count: u64,
    /// `psi(y, Q)`.
    pub bound: u64,
    /// `count > bound`; only a flag, the inequality is asymptotic in `Q`.
    pub violation: bool,
}

pub fn psi_short_interval(x: u64, y: u64, q: u64) -> Result<ShortIntervalSmooth> {
    let end = x
        .checked_add(y)
        .ok_or_else(|| Error::Range(format!("x + y overflows u64 (x = {x}, y = {y})")))?;
    let table = PrimeTable::new(isqrt(end.saturating_sub(1)))?;
    psi_short_interval_with(x, y, q, &table)
}

/// As [`psi_short_interval`] with a caller-supplied sieving table.
pub fn psi_short_interval_with(
    x: u64,
    y: u64,
    q: u64,
    table: &PrimeTable,
) -> Result<ShortIntervalSmooth> {
    if y == 0 {
        return Err(Error::Domain("short interval needs y >= 1".into()));
    }
    let bound = PsiCounter::new(q, y)?.count(y)?;
    let mut count = 0u64;
    for_each_factored(x, y, table, |f| {
        if f.greatest_prime_factor() <= q {
            count += 1;
        }
    })?;
    Ok(ShortIntervalSmooth {
        x,
        y,
        q,
        count,
        bound,
        violation: count > bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_closed_forms() {
        let t = DickmanTable::default();
        assert_eq!(t.rho(0.5).unwrap(), 1.0);
        assert!((t.rho(1.5).unwrap() - (1.0 - 1.5f64.ln())).abs() < 1e-12);
        assert!((t.rho(1.5).unwrap() - 0.5945349).abs() < 1e-7);
        assert!(matches!(t.rho(200.5), Err(Error::TableRange { .. })));
    }

    #[test]
    fn table_is_positive_and_decreasing() {
        let t = DickmanTable::new(8, 200.0).unwrap();
        let n = t.len();
        for i in (256 + 1)..n {
            let (_, _, a) = t.grid_point(i - 1).unwrap();
            let (_, _, b) = t.grid_point(i).unwrap();
            assert!(b < a, "not decreasing at {i}");
            assert!(b.is_finite());
        }
        // rho(200) is far below the f64 range but its log is finite
        let (_, v, ln) = t.grid_point(n - 1).unwrap();
        assert_eq!(v, 0.0);
        assert!(ln < -1000.0 && ln.is_finite());
    }

    #[test]
    fn asymptotic_examples() {
        let l = 10f64.ln();
        let ll = l.ln();
        let expected = -10.0 * (l + ll - 1.0 + (ll - 1.0) / l);
        assert!((rho_asymptotic(10.0).unwrap() - expected).abs() < 1e-12);
        assert!(rho_asymptotic(2.9).is_err());
        let a = rho_asymptotic(100.0).unwrap();
        assert!((a + 100.0 * 100f64.ln()).abs() <= 100.0 * (100f64.ln().ln() + 1.0));
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_exact(10, 10).unwrap(), 10);
        assert_eq!(psi_exact(16, 2).unwrap(), 5);
        assert_eq!(psi_exact(100, 5).unwrap(), 34);
        assert_eq!(psi_exact(1, 2).unwrap(), 1);
        assert!(matches!(psi_exact(u64::MAX, 1000), Err(Error::Resource(_))));
        assert!(psi_exact(10, 1).is_err());
    }

    #[test]
    fn enumeration_and_buchstab_agree() {
        for q in [2u64, 3, 5, 7] {
            let c = PsiCounter::new(q, 1 << 16).unwrap();
            for x in [1u64, 2, 17, 1000, 65_536, 1_000_003, 123_456_789] {
                assert_eq!(c.count(x).unwrap(), c.count_buchstab(x), "q={q} x={x}");
            }
        }
    }

    #[test]
    fn estimate_examples() {
        let t = DickmanTable::default();
        assert!((psi_estimate(100.0, 100.0, &t).unwrap() - 100.0).abs() < 1e-9);
        let v = psi_estimate(1e4, 1e2, &t).unwrap();
        assert!((v - 1e4 * (1.0 - 2f64.ln())).abs() < 1e-6);
        assert!((v - 3068.5).abs() < 0.1);
    }

    #[test]
    fn short_interval_examples() {
        let r = psi_short_interval(100, 20, 5).unwrap();
        assert_eq!(r.count, 2);
        let r = psi_short_interval(1, 10, 10).unwrap();
        assert_eq!(r.count, 10);
        assert_eq!(r.bound, 10);
        assert!(!r.violation);
    }
}
