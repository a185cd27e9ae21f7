use rayon::prelude::*;

use crate::arith::PrimeTable;
use crate::error::{Error, Result};
use crate::logvalue::{LogSum, LogValue};
use crate::multfunc::{prime_sum, EvalContext, MultiplicativeFunction};

use super::Flag;

/// `sum f(n)/n` over `z^(1/2) <= n <= N` with every prime factor in
/// `(J, z^(1/r)]` and coprime to `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankinQuery {
    pub z: f64,
    pub r: f64,
    pub k: u64,
    /// Exclusive prime floor `J`; anything below 2 removes the restriction.
    pub j: f64,
    pub truncation: u64,
    /// Reject `r` outside `1 <= r <= log z / (4 log log z)` instead of
    /// flagging it.
    pub enforce_range: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankinTail {
    pub lhs: LogValue,
    pub terms: u64,
    /// Rankin bound on the omitted part `n > N`.
    pub tail_bound: LogValue,
    pub tail_delta: f64,
    /// `exp(-(1 - 5 beta/4) r log r / 2 + sum_{J < p <= z^(1/r)} f(p)/p
    /// + 2 A1 (log log x)^beta r^(1 - 5 beta/4))`
    pub rhs_main: LogValue,
    /// `exp(-(1 - 5 beta/4) r log r / 2 + sum_{p <= z} f(p)/p)`; `None` when
    /// the prime table stops short of `z`.
    pub rhs_shiu: Option<LogValue>,
    /// `beta = 0`, where the second core is the one that applies.
    pub shiu_selected: bool,
    pub flags: Vec<Flag>,
}

impl RankinTail {
    pub fn selected_core(&self) -> LogValue {
        match (self.shiu_selected, self.rhs_shiu) {
            (true, Some(s)) => s,
            _ => self.rhs_main,
        }
    }
}

/// Upper end of the admissible `r` range, `log z / (4 log log z)`.
pub fn max_admissible_r(z: f64) -> f64 {
    let lz = z.ln();
    lz / (4.0 * lz.ln())
}

pub fn rankin_tail(
    f: &MultiplicativeFunction,
    q: &RankinQuery,
    ctx: &EvalContext,
    primes: &PrimeTable,
) -> Result<RankinTail> {
    if !(q.z > 1.0) || !(q.r > 0.0) || q.k == 0 {
        return Err(Error::Domain(format!(
            "need z > 1, r > 0, k >= 1; got z = {}, r = {}, k = {}",
            q.z, q.r, q.k
        )));
    }
    let lo = q.z.sqrt();
    if (q.truncation as f64) < lo {
        return Err(Error::Domain(format!(
            "truncation {} is below z^(1/2) = {lo}",
            q.truncation
        )));
    }
    let mut flags = Vec::new();
    let in_range = q.z > std::f64::consts::E && q.r >= 1.0 && q.r <= max_admissible_r(q.z);
    if !in_range {
        if q.enforce_range {
            return Err(Error::Domain(format!(
                "r = {} outside [1, log z / (4 log log z)] for z = {}",
                q.r, q.z
            )));
        }
        flags.push(Flag::LemmaRange);
    }

    let ceiling = q.z.powf(1.0 / q.r);
    let top = ceiling.min(q.truncation as f64);
    let support: Vec<u64> = if top >= 2.0 {
        primes
            .up_to(top)?
            .iter()
            .copied()
            .filter(|&p| p as f64 > q.j && q.k % p != 0)
            .collect()
    } else {
        Vec::new()
    };

    let mut acc = LogSum::new();
    let mut terms = 0;
    let lo_n = lo.ceil() as u64;
    if lo_n <= 1 {
        acc.add_value(1.0);
        terms += 1;
    }
    let mut walk = Walk {
        f,
        ctx,
        support: &support,
        lo: lo_n,
        n_max: q.truncation,
        acc: &mut acc,
        terms: &mut terms,
    };
    walk.descend(0, 1, 1.0)?;

    let (tail_ln, tail_delta) = tail_bound(f, &support, q.truncation, ctx)?;

    let params = f.params();
    let beta = params.beta;
    let penalty = -0.5 * (1.0 - 1.25 * beta) * q.r * q.r.ln();
    let sum_to = |x: f64, lower: f64| -> Result<f64> {
        if x < 2.0 {
            Ok(0.0)
        } else {
            prime_sum(f, x, q.k, lower, ctx, primes)
        }
    };
    let main = penalty
        + sum_to(ceiling, q.j)?
        + 2.0 * params.a1 * ctx.lnln_x().powf(beta) * q.r.powf(1.0 - 1.25 * beta);
    let shiu = if primes.limit() as f64 >= q.z {
        Some(LogValue::from_ln(penalty + sum_to(q.z, 0.0)?))
    } else {
        None
    };

    Ok(RankinTail {
        lhs: acc.total(),
        terms,
        tail_bound: LogValue::from_ln(tail_ln),
        tail_delta,
        rhs_main: LogValue::from_ln(main),
        rhs_shiu: shiu,
        shiu_selected: beta == 0.0,
        flags,
    })
}

struct Walk<'a> {
    f: &'a MultiplicativeFunction,
    ctx: &'a EvalContext,
    support: &'a [u64],
    lo: u64,
    n_max: u64,
    acc: &'a mut LogSum,
    terms: &'a mut u64,
}

impl Walk<'_> {
    /// Extends `m` (with `f(m)/m = w`) by powers of primes from `support[from..]`.
    fn descend(&mut self, from: usize, m: u64, w: f64) -> Result<()> {
        for i in from..self.support.len() {
            let p = self.support[i];
            let Some(mut n) = m.checked_mul(p).filter(|&n| n <= self.n_max) else {
                break;
            };
            let mut l = 1;
            loop {
                let fv = self.f.at_prime_power(p, l, self.ctx)?;
                if fv > 0.0 {
                    let wn = w * fv / (n / m) as f64;
                    if n >= self.lo {
                        self.acc.add_value(wn);
                        *self.terms += 1;
                    }
                    self.descend(i + 1, n, wn)?;
                }
                match n.checked_mul(p).filter(|&v| v <= self.n_max) {
                    Some(v) => n = v,
                    None => break,
                }
                l += 1;
            }
        }
        Ok(())
    }
}

const TAIL_DELTAS: [f64; 9] = [0.5, 0.6, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 0.99];
const MAX_LOCAL_POWER: u32 = 64;

/// `min_delta N^(delta - 1) prod_p sum_l f(p^l) p^(-l delta)`, a bound on
/// `sum_{n > N} f(n)/n` over the same support.
fn tail_bound(
    f: &MultiplicativeFunction,
    support: &[u64],
    n: u64,
    ctx: &EvalContext,
) -> Result<(f64, f64)> {
    let ln_n = (n as f64).ln();
    let vals: Vec<(f64, f64)> = TAIL_DELTAS
        .par_iter()
        .map(|&delta| -> Result<(f64, f64)> {
            let mut ln_prod = 0.0;
            for &p in support {
                ln_prod += ln_local_factor(f, p, delta, ctx)?;
                if ln_prod.is_infinite() {
                    break;
                }
            }
            Ok(((delta - 1.0) * ln_n + ln_prod, delta))
        })
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(
        (f64::INFINITY, 1.0),
        |best, v| if v.0 < best.0 { v } else { best },
    ))
}

fn ln_local_factor(
    f: &MultiplicativeFunction,
    p: u64,
    delta: f64,
    ctx: &EvalContext,
) -> Result<f64> {
    let step = -delta * (p as f64).ln();
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut ratio = f64::INFINITY;
    let mut t = 0.0;
    for l in 1..=MAX_LOCAL_POWER {
        t = f.at_prime_power(p, l, ctx)? * (step * l as f64).exp();
        sum += t;
        if l >= 2 && t <= 1e-17 * (1.0 + sum) && t <= 0.5 * prev {
            return Ok(sum.ln_1p());
        }
        ratio = t / prev;
        prev = t;
    }
    // remaining powers by the last term ratio, taken as geometric
    if ratio < 1.0 {
        Ok((sum + t * ratio / (1.0 - ratio)).ln_1p())
    } else {
        Ok(f64::INFINITY)
    }
}

/// `g(r)` and `h(r)` of the class IV estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GH {
    pub g: f64,
    pub h: f64,
    /// `log log log x <= 0`.
    pub deep_log: bool,
}

impl GH {
    pub fn gap(&self) -> f64 {
        self.g - self.h
    }
}

/// `g(r) = (1 - 5 beta/4) log r / 2` and
/// `h(r) = 20 log A1 / (alpha kappa) + (20/41) log log log x + 2 log r / r
/// + 2 A1 (log log x)^beta r^(-5 beta/4)`.
pub fn g_h(r: f64, beta: f64, a1: f64, alpha: f64, kappa: f64, ln_x: f64) -> Result<GH> {
    if !(r >= 2.0) || !(a1 > 0.0) || !(ln_x > 1.0) {
        return Err(Error::Domain(format!(
            "g and h need r >= 2, A1 > 0 and x > e; got r = {r}, A1 = {a1}, log x = {ln_x}"
        )));
    }
    let lnln = ln_x.ln();
    let lll = lnln.ln();
    let g = 0.5 * (1.0 - 1.25 * beta) * r.ln();
    let h = 20.0 * a1.ln() / (alpha * kappa)
        + 20.0 / 41.0 * lll
        + 2.0 * r.ln() / r
        + 2.0 * a1 * lnln.powf(beta) * r.powf(-1.25 * beta);
    Ok(GH {
        g,
        h,
        deep_log: !(lll > 0.0),
    })
}
