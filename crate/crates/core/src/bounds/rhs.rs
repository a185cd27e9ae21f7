use crate::arith::{euler_phi, isqrt, PrimeTable};
use crate::dickman::DickmanTable;
use crate::error::{Error, Result};
use crate::logvalue::{LogSum, LogValue};
use crate::multfunc::{prime_sum, EvalContext, MultiplicativeFunction};

use super::{FactoredInterval, Flag, IntervalSpec, SmoothnessContext};

/// `sum_{x <= n < x+y, n = a mod k} f(n)`.
pub fn lhs_sum(
    f: &MultiplicativeFunction,
    spec: &IntervalSpec,
    ctx: &EvalContext,
) -> Result<LogValue> {
    let end = spec.x + spec.y;
    let primes = PrimeTable::new(isqrt(end - 1))?;
    let iv = FactoredInterval::new(spec.x, spec.y, &primes)?;
    lhs_sum_in(f, &iv, spec.k, spec.a, ctx)
}

/// [`lhs_sum`] over an already factored interval.
pub fn lhs_sum_in(
    f: &MultiplicativeFunction,
    iv: &FactoredInterval,
    k: u64,
    a: u64,
    ctx: &EvalContext,
) -> Result<LogValue> {
    let mut acc = LogSum::new();
    for fac in iv.residues(k, a) {
        acc.add_ln(f.eval_ln(fac, ctx)?);
    }
    Ok(acc.total())
}

fn phi_ln(k: u64) -> f64 {
    (euler_phi(k) as f64).ln()
}

/// `y / (phi(k) log x) * exp(sum_{p <= x, p not | k} f(p)/p)`.
pub fn rhs_shiu(
    f: &MultiplicativeFunction,
    spec: &IntervalSpec,
    ctx: &EvalContext,
    primes: &PrimeTable,
) -> Result<LogValue> {
    let s = prime_sum(f, spec.x as f64, spec.k, 0.0, ctx, primes)?;
    Ok(LogValue::from_ln(
        (spec.y as f64).ln() - phi_ln(spec.k) - spec.ln_x().ln() + s,
    ))
}

/// `x / (phi(k) (log x)^(1-eps0)) * exp(sum_{p <= x, p not | k} f(p)/p)`.
///
/// The formula is evaluated regardless of the hypothesis
/// `beta < alpha kappa / 41`; a violation is flagged.
pub fn rhs_main(
    f: &MultiplicativeFunction,
    spec: &IntervalSpec,
    eps0: f64,
    ctx: &EvalContext,
    primes: &PrimeTable,
) -> Result<(LogValue, Vec<Flag>)> {
    let s = prime_sum(f, spec.x as f64, spec.k, 0.0, ctx, primes)?;
    let core = spec.ln_x() - phi_ln(spec.k) - (1.0 - eps0) * spec.ln_x().ln() + s;
    let mut flags = Vec::new();
    if f.params().beta >= spec.alpha * spec.kappa / 41.0 {
        flags.push(Flag::BetaHypothesis);
    }
    Ok((LogValue::from_ln(core), flags))
}

/// `(C1, C2) = (alpha kappa / 41, 5/656 * alpha kappa (1 - alpha kappa / 20) / 20)`.
pub fn constants_c1_c2(alpha: f64, kappa: f64) -> (f64, f64) {
    let ak = alpha * kappa;
    (ak / 41.0, 5.0 / 656.0 * (ak * (1.0 - ak / 20.0) / 20.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmoothVariant {
    /// `rho(u)^C1 x / (phi(k) log x) (...)`
    C1,
    /// `rho(u)^C2 x / (phi(k) (log x)^(1-eps)) (...)`
    C2,
}

/// Both readings of the prime factor of a smooth-supported core.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothRhs {
    /// With the bare sum `sum_{p <= Q, p not | k} f(p)/p`.
    pub with_sum: LogValue,
    /// With `exp` of that sum.
    pub with_exp: LogValue,
    pub exponent: f64,
    pub prime_sum: f64,
    pub flags: Vec<Flag>,
}

/// Smooth-supported core with `Q` and `u` taken from `sctx`.
pub fn rhs_smooth(
    f: &MultiplicativeFunction,
    spec: &IntervalSpec,
    sctx: &SmoothnessContext,
    variant: SmoothVariant,
    eps: f64,
    table: &DickmanTable,
    ctx: &EvalContext,
    primes: &PrimeTable,
) -> Result<SmoothRhs> {
    let (c1, c2) = constants_c1_c2(spec.alpha, spec.kappa);
    let ln_x = spec.ln_x();
    let lnln_x = ln_x.ln();
    let mut flags = Vec::new();
    match f.params().q {
        Some(fq) if fq <= sctx.q * (1.0 + 1e-12) => {}
        _ => flags.push(Flag::SupportMismatch),
    }
    let (exponent, ln_log_power) = match variant {
        SmoothVariant::C1 => (c1, lnln_x),
        SmoothVariant::C2 => {
            let lll = lnln_x.ln();
            // Q <= exp(log x log log log x / log log x)
            if !(sctx.q.ln() <= ln_x * lll / lnln_x) {
                flags.push(Flag::QRange);
            }
            (c2, (1.0 - eps) * lnln_x)
        }
    };
    let s = prime_sum(f, sctx.q.max(2.0), spec.k, 0.0, ctx, primes)?;
    let base = exponent * table.ln_rho(sctx.u)? + ln_x - phi_ln(spec.k) - ln_log_power;
    Ok(SmoothRhs {
        with_sum: LogValue::from_ln(base + s.ln()),
        with_exp: LogValue::from_ln(base + s),
        exponent,
        prime_sum: s,
        flags,
    })
}

/// `Phi(x, y, z; k, a)` with the core `y / (phi(k) log z) + z^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct RoughCount {
    pub count: u64,
    /// `None` when `z < 2`, where `log z` gives no bound.
    pub core: Option<LogValue>,
}

fn rough_core(y: u64, z: f64, k: u64) -> Option<LogValue> {
    (z >= 2.0).then(|| {
        LogValue::from_value(y as f64 / (euler_phi(k) as f64 * z.ln()))
            .add(LogValue::from_ln(2.0 * z.ln()))
    })
}

/// Number of `n` in `[x, x + y)`, `n = a mod k`, with `q(n) > z`.
pub fn phi_rough(x: u64, y: u64, z: f64, k: u64, a: u64) -> Result<RoughCount> {
    let end = x
        .checked_add(y)
        .ok_or_else(|| Error::Range(format!("x + y overflows u64 (x = {x}, y = {y})")))?;
    let primes = PrimeTable::new(isqrt(end.saturating_sub(1)))?;
    let iv = FactoredInterval::new(x, y, &primes)?;
    phi_rough_in(&iv, z, k, a)
}

pub fn phi_rough_in(iv: &FactoredInterval, z: f64, k: u64, a: u64) -> Result<RoughCount> {
    if k == 0 {
        return Err(Error::Domain("modulus k must be positive".into()));
    }
    let count = iv
        .residues(k, a)
        .filter(|f| f.least_prime_factor_f64() > z)
        .count() as u64;
    Ok(RoughCount {
        count,
        core: rough_core(iv.y(), z, k),
    })
}

/// `y / (k x^(alpha/3))`, reading the modulus of the display as `k`.
pub fn rhs_v3_core(spec: &IntervalSpec) -> LogValue {
    LogValue::from_ln((spec.y as f64).ln() - (spec.k as f64).ln() - spec.alpha / 3.0 * spec.ln_x())
}

/// The three smooth-number cores, as logarithms.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiBoundCores {
    /// `exp(3 log x / (log log x)^(1/2))`
    pub psibound: LogValue,
    /// `x exp(-log x (log x - log z) / log z)`
    pub smoothbd: LogValue,
    /// `(log z / J)^(pi(J))`, the `1 + o(1)` factor taken as 1.
    pub psiz_j: LogValue,
    pub j: f64,
    pub pi_j: usize,
}

pub fn psibound_cores(x: f64, z: f64, beta: f64, primes: &PrimeTable) -> Result<PsiBoundCores> {
    if !(x >= 16.0) || !(z >= 2.0) {
        return Err(Error::Domain(format!(
            "smooth-number cores need x >= 16 and z >= 2, got x = {x}, z = {z}"
        )));
    }
    let ln_x = x.ln();
    let ln_z = z.ln();
    let j = ln_x.ln().powf(1.0 - beta);
    if !(j <= ln_z.powf(1.0 - beta)) {
        return Err(Error::Domain(format!(
            "J = {j} exceeds (log z)^(1-beta) = {}",
            ln_z.powf(1.0 - beta)
        )));
    }
    let pi_j = primes.count_up_to(j)?;
    Ok(PsiBoundCores {
        psibound: LogValue::from_ln(3.0 * ln_x / ln_x.ln().sqrt()),
        smoothbd: LogValue::from_ln(ln_x - ln_x * (ln_x - ln_z) / ln_z),
        psiz_j: LogValue::from_ln(pi_j as f64 * (ln_z / j).ln()),
        j,
        pi_j,
    })
}
