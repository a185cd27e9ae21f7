//! Quantities of the two applications: sums of divisor powers and lower
//! bounds for smooth numbers in short intervals.

use crate::arith::{euler_phi, Factorization};
use crate::bounds::constants_c1_c2;
use crate::dickman::DickmanTable;
use crate::error::{Error, Result};
use crate::logvalue::{LogSum, LogValue};
use crate::multfunc::tau_prime_power_table;

use super::config::RMode;

/// `R` at one `x`, and whether the iterated logarithms forced the fallback.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolvedR {
    pub r: f64,
    pub paper: bool,
    pub deep_log: bool,
}

/// `log log log x / log log log log x` when both are positive.
pub fn paper_r(ln_x: f64) -> Option<f64> {
    let lll = ln_x.ln().ln();
    let llll = lll.ln();
    (lll > 0.0 && llll > 0.0 && llll.is_finite()).then(|| lll / llll)
}

pub fn resolve_r(mode: RMode, ln_x: f64) -> ResolvedR {
    match mode {
        RMode::Explicit(r) => ResolvedR {
            r,
            paper: false,
            deep_log: false,
        },
        RMode::Paper { fallback } => match paper_r(ln_x) {
            Some(r) => ResolvedR {
                r,
                paper: true,
                deep_log: false,
            },
            None => ResolvedR {
                r: fallback,
                paper: false,
                deep_log: true,
            },
        },
    }
}

/// Log of `x (log x)^eps / phi(k) * ((phi(k)/k) log x)^(d^R - 1)`.
///
/// `d^R` is formed from its logarithm; a value beyond the floating range
/// is a range error, never a saturated core.
pub fn dfold_core_ln(ln_x: f64, k: u64, d: u32, r: f64, eps: f64) -> Result<f64> {
    let phi = euler_phi(k) as f64;
    let base = (phi / k as f64 * ln_x).ln();
    let d_pow_r = (r * (d as f64).ln()).exp();
    let v = ln_x + eps * ln_x.ln() - phi.ln() + (d_pow_r - 1.0) * base;
    if !v.is_finite() {
        return Err(Error::Range(format!(
            "divisor-power core overflows: d = {d}, R = {r}, log x = {ln_x}"
        )));
    }
    Ok(v)
}

/// The exponent `1 + C3 / R` of `rho(u)` in the smooth-interval lower
/// bound, `C3 = 1 - C2 + margin`.
pub fn lower_bound_exponent(alpha: f64, kappa: f64, margin: f64, r: f64) -> (f64, f64) {
    let (_, c2) = constants_c1_c2(alpha, kappa);
    let c3 = 1.0 - c2 + margin;
    (c3, 1.0 + c3 / r)
}

/// Sums over one set of integers that enter the Hölder step
/// `S1 <= S0^(1-1/R) SR^(1/R)` with `S0 = count`, `S1 = sum tau_d`,
/// `SR = sum tau_d^R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderCheck {
    pub d: u32,
    pub r: f64,
    pub count: u64,
    pub lhs: LogValue,
    pub rhs: LogValue,
    pub holds: bool,
}

pub const HOLDER_SLACK: f64 = 1e-12;

pub fn holder_check<'a>(
    facs: impl IntoIterator<Item = &'a Factorization>,
    d: u32,
    r: f64,
) -> Result<HolderCheck> {
    if !(r > 1.0) {
        return Err(Error::Domain(format!("Hölder step needs R > 1, got {r}")));
    }
    let table = tau_prime_power_table(d, 64);
    let mut count = 0u64;
    let mut s1 = LogSum::new();
    let mut sr = LogSum::new();
    for fac in facs {
        let ln_tau: f64 = fac
            .factors()
            .iter()
            .map(|&(_, e)| table[e as usize].ln())
            .sum();
        count += 1;
        s1.add_ln(ln_tau);
        sr.add_ln(r * ln_tau);
    }
    let lhs = s1.total();
    let rhs = LogValue::from_ln((1.0 - 1.0 / r) * (count as f64).ln() + sr.total().ln() / r);
    let holds = count == 0 || lhs.ln() <= rhs.ln() + HOLDER_SLACK.ln_1p();
    Ok(HolderCheck {
        d,
        r,
        count,
        lhs,
        rhs,
        holds,
    })
}

/// `y rho(u)^exponent` and `y rho(u/2)^2`, as logarithms.
pub fn smooth_interval_cores(
    y: u64,
    u: f64,
    exponent: f64,
    table: &DickmanTable,
) -> Result<(f64, f64)> {
    let ln_y = (y as f64).ln();
    Ok((
        ln_y + exponent * table.ln_rho(u)?,
        ln_y + 2.0 * table.ln_rho(u / 2.0)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor_small;

    #[test]
    fn paper_r_guard() {
        assert!(paper_r(1e4f64.ln()).is_none());
        let r = paper_r(1e8f64.ln()).unwrap();
        let lll = 1e8f64.ln().ln().ln();
        assert!((r - lll / lll.ln()).abs() < 1e-12);
        let res = resolve_r(RMode::Paper { fallback: 3.0 }, 1e4f64.ln());
        assert_eq!((res.r, res.deep_log), (3.0, true));
    }

    #[test]
    fn dfold_core_reduces_for_r_one_and_zero() {
        let lx = 1e4f64.ln();
        let v = dfold_core_ln(lx, 1, 2, 1.0, 0.1).unwrap();
        assert!((v - (lx + 1.1 * lx.ln())).abs() < 1e-12);
        let v = dfold_core_ln(lx, 1, 2, 0.0, 0.1).unwrap();
        assert!((v - (lx + 0.1 * lx.ln())).abs() < 1e-12);
        assert!(matches!(
            dfold_core_ln(lx, 1, 3, 1e4, 0.1),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn holder_holds_on_small_sets() {
        let facs: Vec<_> = (1..=500u64).map(factor_small).collect();
        for d in [2, 3] {
            for r in [2.0, 5.0, 15.7] {
                let h = holder_check(&facs, d, r).unwrap();
                assert!(h.holds, "d={d} R={r}");
                assert!(h.lhs.ln() <= h.rhs.ln());
            }
        }
        // equality when tau_d is constant on the set
        let primes: Vec<_> = [101u64, 103, 107]
            .iter()
            .map(|&p| factor_small(p))
            .collect();
        let h = holder_check(&primes, 2, 3.0).unwrap();
        assert!((h.lhs.ln() - h.rhs.ln()).abs() < 1e-12);
    }
}
