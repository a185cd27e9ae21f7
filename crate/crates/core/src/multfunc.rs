//! Nonnegative multiplicative functions given by a prime-power rule, the
//! built-in family (divisor functions, their powers, smooth indicators and
//! an x-dependent "large" function), sampled membership checks for the
//! classes `M`, `M(beta)`, `M_Q`, `M_Q(beta)`, and prime sums.

use std::fmt;
use std::sync::Arc;

use crate::arith::{Factorization, PrimeTable};
use crate::error::{Error, Result};
use crate::logvalue::LogSum;

/// The scale `x` at which x-dependent functions are evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalContext {
    ln_x: f64,
}

const LN_16: f64 = 2.772588722239781;

impl EvalContext {
    /// Requires `x >= 16`, so that `log log x > 0`.
    pub fn new(x: f64) -> Result<Self> {
        Self::from_ln_x(x.ln())
    }

    /// Builds a context from `log x` directly, for scales beyond `f64`.
    pub fn from_ln_x(ln_x: f64) -> Result<Self> {
        if !(ln_x >= LN_16 - 1e-12) || !ln_x.is_finite() {
            return Err(Error::Domain(format!(
                "evaluation context needs x >= 16, got log x = {ln_x}"
            )));
        }
        Ok(EvalContext { ln_x })
    }

    /// Context whose `log log x` equals `lnln_x`.
    pub fn from_lnln_x(lnln_x: f64) -> Result<Self> {
        Self::from_ln_x(lnln_x.exp())
    }

    pub fn ln_x(&self) -> f64 {
        self.ln_x
    }

    pub fn lnln_x(&self) -> f64 {
        self.ln_x.ln()
    }
}

/// `(p, l, ctx) -> f(p^l)`.
pub type PrimePowerRule = Arc<dyn Fn(u64, u32, &EvalContext) -> f64 + Send + Sync>;

/// Class-membership constants carried as metadata by every function.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub beta: f64,
    /// Smooth support: `f(p^l) = 0` for every prime `p > q`.
    pub q: Option<f64>,
}

impl Default for FunctionParams {
    fn default() -> Self {
        FunctionParams {
            a1: 1.0,
            a2: 1.0,
            a3: 1.0,
            beta: 0.0,
            q: None,
        }
    }
}

#[derive(Clone)]
pub struct MultiplicativeFunction {
    name: String,
    params: FunctionParams,
    rule: PrimePowerRule,
}

impl fmt::Debug for MultiplicativeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplicativeFunction")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl MultiplicativeFunction {
    /// Wraps `rule`; if `params.q` is set the rule is forced to vanish on
    /// primes above it.
    pub fn new(name: impl Into<String>, params: FunctionParams, rule: PrimePowerRule) -> Self {
        let rule = match params.q {
            Some(q) => {
                let inner = rule;
                Arc::new(
                    move |p: u64, l: u32, ctx: &EvalContext| {
                        if p as f64 > q {
                            0.0
                        } else {
                            inner(p, l, ctx)
                        }
                    },
                ) as PrimePowerRule
            }
            None => rule,
        };
        MultiplicativeFunction {
            name: name.into(),
            params,
            rule,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &FunctionParams {
        &self.params
    }

    /// This function multiplied by the indicator of `q`-smooth numbers.
    pub fn restricted_to_smooth(&self, q: f64) -> Self {
        let q = self.params.q.map_or(q, |old| old.min(q));
        let params = FunctionParams {
            q: Some(q),
            ..self.params.clone()
        };
        MultiplicativeFunction::new(format!("{}|Q={q}", self.name), params, self.rule.clone())
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.params.beta = beta;
        self
    }

    pub fn at_prime_power(&self, p: u64, l: u32, ctx: &EvalContext) -> Result<f64> {
        let v = (self.rule)(p, l, ctx);
        if !(v >= 0.0) {
            return Err(Error::ContractViolation(format!(
                "{}({p}^{l}) = {v} is not a nonnegative number",
                self.name
            )));
        }
        Ok(v)
    }

    /// Product of the rule over the factor list; `f(1) = 1`.
    pub fn eval(&self, fac: &Factorization, ctx: &EvalContext) -> Result<f64> {
        let mut acc = 1.0;
        for &(p, l) in fac.factors() {
            acc *= self.at_prime_power(p, l, ctx)?;
        }
        Ok(acc)
    }

    /// `log f(n)`, `-inf` where `f(n) = 0`; never overflows.
    pub fn eval_ln(&self, fac: &Factorization, ctx: &EvalContext) -> Result<f64> {
        let mut acc = 0.0;
        for &(p, l) in fac.factors() {
            let v = self.at_prime_power(p, l, ctx)?;
            if v == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            acc += v.ln();
        }
        Ok(acc)
    }
}

/// `tau_d(p^l)` for `l = 0..=max_l` by the convolution `tau_{d+1} = tau_d * 1`,
/// which on prime powers is a running prefix sum.
pub fn tau_prime_power_table(d: u32, max_l: u32) -> Vec<f64> {
    let mut row = vec![1.0f64; max_l as usize + 1];
    for _ in 1..d {
        let mut acc = 0.0;
        for v in row.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    row
}

// Largest exponent of any prime power below 2^64.
const MAX_EXPONENT: u32 = 64;

/// The named built-in functions.
#[derive(Clone, Debug, PartialEq)]
pub enum Builtin {
    One,
    TauD {
        d: u32,
    },
    TauDPowerR {
        d: u32,
        r: f64,
    },
    SmoothIndicator {
        q: Option<f64>,
    },
    SmoothTauDPowerR {
        d: u32,
        r: f64,
        q: Option<f64>,
    },
    /// `f(p^l) = (c (log log x)^beta)^l`.
    SyntheticLarge {
        c: f64,
        beta: f64,
    },
}

impl Builtin {
    /// Parses `name[:key=value,...]`, e.g. `tau:d=3,R=2` or `smooth:Q=100`.
    ///
    /// Names: `one`; `tau_d` / `tau` (keys `d`, `R`); `tau_d_power_R`;
    /// `smooth_indicator` / `smooth` (key `Q`); `smooth_tau_d_power_R` /
    /// `smooth_tau` (keys `d`, `R`, `Q`); `synthetic_large` / `synthetic`
    /// (keys `c`, `beta`). `Q` may be left unset and supplied later with
    /// [`Builtin::with_q`].
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut d = 2u32;
        let mut r: Option<f64> = None;
        let mut q: Option<f64> = None;
        let mut c = 1.0;
        let mut beta = 0.001;
        for kv in rest.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in {s:?}, got {kv:?}")))?;
            let num = |v: &str| -> Result<f64> {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad number {v:?} in {s:?}")))
            };
            match k.trim() {
                "d" => {
                    d = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad d {v:?} in {s:?}")))?
                }
                "R" | "r" => r = Some(num(v)?),
                "Q" | "q" => q = Some(num(v)?),
                "c" => c = num(v)?,
                "beta" => beta = num(v)?,
                other => return Err(Error::Config(format!("unknown key {other:?} in {s:?}"))),
            }
        }
        let b = match name.trim() {
            "one" => Builtin::One,
            "tau" | "tau_d" => match r {
                None => Builtin::TauD { d },
                Some(r) if r == 1.0 => Builtin::TauD { d },
                Some(r) => Builtin::TauDPowerR { d, r },
            },
            "tau_d_power_R" => Builtin::TauDPowerR {
                d,
                r: r.unwrap_or(1.0),
            },
            "smooth" | "smooth_indicator" => Builtin::SmoothIndicator { q },
            "smooth_tau" | "smooth_tau_d_power_R" => Builtin::SmoothTauDPowerR {
                d,
                r: r.unwrap_or(1.0),
                q,
            },
            "synthetic" | "synthetic_large" => Builtin::SyntheticLarge { c, beta },
            other => return Err(Error::Config(format!("unknown function {other:?}"))),
        };
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match *self {
            Builtin::TauD { d }
            | Builtin::TauDPowerR { d, .. }
            | Builtin::SmoothTauDPowerR { d, .. }
                if d < 1 =>
            {
                bad(format!("d must be >= 1, got {d}"))
            }
            Builtin::TauDPowerR { r, .. } | Builtin::SmoothTauDPowerR { r, .. } if !(r >= 0.0) => {
                bad(format!("R must be >= 0, got {r}"))
            }
            Builtin::SyntheticLarge { c, beta } if !(c > 0.0 && beta >= 0.0) => bad(format!(
                "synthetic_large needs c > 0 and beta >= 0, got c = {c}, beta = {beta}"
            )),
            _ => Ok(()),
        }
    }

    pub fn is_smooth_supported(&self) -> bool {
        matches!(
            self,
            Builtin::SmoothIndicator { .. } | Builtin::SmoothTauDPowerR { .. }
        )
    }

    /// Fills in `Q` for smooth-supported builtins that do not fix it.
    pub fn with_q(&self, q: f64) -> Self {
        match *self {
            Builtin::SmoothIndicator { q: None } => Builtin::SmoothIndicator { q: Some(q) },
            Builtin::SmoothTauDPowerR { d, r, q: None } => {
                Builtin::SmoothTauDPowerR { d, r, q: Some(q) }
            }
            ref other => other.clone(),
        }
    }

    /// Replaces the divisor-power exponent `R` where the builtin has one.
    pub fn with_r(&self, r: f64) -> Self {
        match *self {
            Builtin::TauD { d } | Builtin::TauDPowerR { d, .. } => Builtin::TauDPowerR { d, r },
            Builtin::SmoothTauDPowerR { d, q, .. } => Builtin::SmoothTauDPowerR { d, r, q },
            ref other => other.clone(),
        }
    }

    pub fn canonical_name(&self) -> String {
        match *self {
            Builtin::One => "one".into(),
            Builtin::TauD { d } => format!("tau_d(d={d})"),
            Builtin::TauDPowerR { d, r } => format!("tau_d_power_R(d={d},R={r})"),
            Builtin::SmoothIndicator { q } => match q {
                Some(q) => format!("smooth_indicator(Q={q})"),
                None => "smooth_indicator".into(),
            },
            Builtin::SmoothTauDPowerR { d, r, q } => match q {
                Some(q) => format!("smooth_tau_d_power_R(d={d},R={r},Q={q})"),
                None => format!("smooth_tau_d_power_R(d={d},R={r})"),
            },
            Builtin::SyntheticLarge { c, beta } => format!("synthetic_large(c={c},beta={beta})"),
        }
    }

    pub fn build(&self) -> Result<MultiplicativeFunction> {
        self.validate()?;
        let name = self.canonical_name();
        let need_q = |q: Option<f64>| {
            q.ok_or_else(|| Error::Config(format!("{name} needs a smoothness bound Q")))
        };
        let f = match *self {
            Builtin::One => MultiplicativeFunction::new(
                name.clone(),
                FunctionParams::default(),
                Arc::new(|_, _, _| 1.0),
            ),
            Builtin::TauD { d } => tau_power(name.clone(), d, 1.0, None),
            Builtin::TauDPowerR { d, r } => tau_power(name.clone(), d, r, None),
            Builtin::SmoothIndicator { q } => MultiplicativeFunction::new(
                name.clone(),
                FunctionParams {
                    q: Some(need_q(q)?),
                    ..FunctionParams::default()
                },
                Arc::new(|_, _, _| 1.0),
            ),
            Builtin::SmoothTauDPowerR { d, r, q } => {
                tau_power(name.clone(), d, r, Some(need_q(q)?))
            }
            Builtin::SyntheticLarge { c, beta } => MultiplicativeFunction::new(
                name.clone(),
                FunctionParams {
                    a1: c,
                    beta,
                    ..FunctionParams::default()
                },
                Arc::new(move |_, l, ctx: &EvalContext| {
                    (c * ctx.lnln_x().powf(beta)).powi(l as i32)
                }),
            ),
        };
        Ok(f)
    }
}

fn tau_power(name: String, d: u32, r: f64, q: Option<f64>) -> MultiplicativeFunction {
    let table: Vec<f64> = tau_prime_power_table(d, MAX_EXPONENT)
        .into_iter()
        .map(|v| if r == 1.0 { v } else { v.powf(r) })
        .collect();
    let params = FunctionParams {
        a1: (d as f64).powf(r),
        q,
        ..FunctionParams::default()
    };
    MultiplicativeFunction::new(name, params, Arc::new(move |_, l, _| table[l as usize]))
}

/// Looks up a builtin by name and parameter string (see [`Builtin::parse`]).
pub fn builtin(spec: &str) -> Result<MultiplicativeFunction> {
    Builtin::parse(spec)?.build()
}

/// Which class a function is claimed to belong to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassClaim {
    /// Conditions i and ii.
    M,
    /// Conditions 1 and 2.
    MBeta,
    /// `M` plus `Q`-smooth support.
    MQ,
    /// `M(beta)` plus `Q`-smooth support.
    MQBeta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `f(p^l) <= A1^l`
    I,
    /// `f(n) <= A2 n^eps`
    Ii,
    /// `f(p^l) <= A1^l (log log x)^(beta l)`
    One,
    /// `f(n) <= max(A2 x^eps, A3 (log x)^eps)`; with `gamma` set the second
    /// term is `A3 exp((log log x)^(1 - gamma))`.
    Two,
    /// `f(p^l) = 0` for `p > Q`.
    Support,
}

/// Constants the conditions are checked against.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub beta: f64,
    pub eps: f64,
    pub gamma: Option<f64>,
    pub q: Option<f64>,
}

impl ConditionConstants {
    pub fn from_function(f: &MultiplicativeFunction, eps: f64) -> Self {
        let p = f.params();
        ConditionConstants {
            a1: p.a1,
            a2: p.a2,
            a3: p.a3,
            beta: p.beta,
            eps,
            gamma: None,
            q: p.q,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConditionSample {
    pub prime_powers: Vec<(u64, u32)>,
    pub integers: Vec<Factorization>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SamplePoint {
    PrimePower(u64, u32),
    Integer(u64),
}

/// A sample point where an inequality failed; both sides in log domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub condition: Condition,
    pub point: SamplePoint,
    pub ln_value: f64,
    pub ln_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub holds: bool,
    pub witnesses: Vec<Witness>,
    pub checked: usize,
    pub constants: ConditionConstants,
    pub sample: ConditionSample,
}

impl ConditionReport {
    pub fn first_witness(&self) -> Option<&Witness> {
        self.witnesses.first()
    }
}

// Relative slack on log-domain comparisons.
const LN_SLACK: f64 = 1e-12;

/// Evaluates every inequality of `claim` literally at every sample point.
/// Sampling can falsify membership, never prove it.
pub fn check_condition_set(
    f: &MultiplicativeFunction,
    ctx: &EvalContext,
    claim: ClassClaim,
    constants: &ConditionConstants,
    sample: &ConditionSample,
) -> Result<ConditionReport> {
    let (prime_cond, int_cond) = match claim {
        ClassClaim::M | ClassClaim::MQ => (Condition::I, Condition::Ii),
        ClassClaim::MBeta | ClassClaim::MQBeta => (Condition::One, Condition::Two),
    };
    let support = matches!(claim, ClassClaim::MQ | ClassClaim::MQBeta);
    let c = constants;
    let lnln_x = ctx.lnln_x();
    let mut witnesses = Vec::new();
    let mut checked = 0;
    let mut record = |condition, point, ln_value: f64, ln_bound: f64| {
        checked += 1;
        let violated = if ln_bound == f64::NEG_INFINITY {
            ln_value > f64::NEG_INFINITY
        } else {
            ln_value > ln_bound + LN_SLACK * ln_bound.abs().max(1.0)
        };
        if violated {
            witnesses.push(Witness {
                condition,
                point,
                ln_value,
                ln_bound,
            });
        }
    };

    for &(p, l) in &sample.prime_powers {
        let v = f.at_prime_power(p, l, ctx)?;
        let ln_v = v.ln();
        let ln_bound = match prime_cond {
            Condition::I => l as f64 * c.a1.ln(),
            _ => l as f64 * (c.a1.ln() + c.beta * lnln_x.ln()),
        };
        record(prime_cond, SamplePoint::PrimePower(p, l), ln_v, ln_bound);
        if support {
            let q =
                c.q.ok_or_else(|| Error::Config("smooth-support claim needs a bound Q".into()))?;
            if p as f64 > q {
                // any positive value violates; bound is log 0
                record(
                    Condition::Support,
                    SamplePoint::PrimePower(p, l),
                    ln_v,
                    f64::NEG_INFINITY,
                );
            }
        }
    }

    for fac in &sample.integers {
        let ln_v = f.eval_ln(fac, ctx)?;
        let ln_n = (fac.n() as f64).ln();
        let ln_bound = match int_cond {
            Condition::Ii => c.a2.ln() + c.eps * ln_n,
            _ => {
                let big = c.a2.ln() + c.eps * ctx.ln_x();
                let small = match c.gamma {
                    None => c.a3.ln() + c.eps * ctx.ln_x().ln(),
                    Some(g) => c.a3.ln() + lnln_x.powf(1.0 - g),
                };
                big.max(small)
            }
        };
        record(int_cond, SamplePoint::Integer(fac.n()), ln_v, ln_bound);
    }

    Ok(ConditionReport {
        holds: witnesses.is_empty(),
        witnesses,
        checked,
        constants: constants.clone(),
        sample: sample.clone(),
    })
}

/// `sum_{lower < p <= big_x, p does not divide k} f(p) / p`, summed exactly
/// over the sieved primes.
pub fn prime_sum(
    f: &MultiplicativeFunction,
    big_x: f64,
    k: u64,
    lower: f64,
    ctx: &EvalContext,
    primes: &PrimeTable,
) -> Result<f64> {
    if !(big_x >= 2.0) {
        return Err(Error::Domain(format!(
            "prime sum needs X >= 2, got {big_x}"
        )));
    }
    let ps = primes.up_to(big_x)?;
    let start = ps.partition_point(|&p| p as f64 <= lower);
    let mut acc = LogSum::new();
    for &p in &ps[start..] {
        if k % p == 0 {
            continue;
        }
        acc.add_value(f.at_prime_power(p, 1, ctx)? / p as f64);
    }
    Ok(acc.total().value())
}

/// A point where `tau_2(n)^R > n^(1.5379 R / log log n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisorBoundViolation {
    pub n: u64,
    pub ln_lhs: f64,
    pub ln_rhs: f64,
}

/// Scans `3 <= n <= n_max` for violations of the effective divisor bound
/// `tau(n)^R <= n^(1.5379 R / log log n)`. Violations are returned, not
/// raised.
pub fn monitor_divisor_bound(n_max: u64, r: f64) -> Result<(u64, Vec<DivisorBoundViolation>)> {
    let tau = builtin("tau")?;
    let ctx = EvalContext::new(16.0)?;
    let mut violations = Vec::new();
    let mut checked = 0;
    if n_max < 3 {
        return Ok((0, violations));
    }
    let table = PrimeTable::new(crate::arith::isqrt(n_max))?;
    crate::arith::for_each_factored(3, n_max - 2, &table, |fac| {
        let n = fac.n() as f64;
        let ln_lhs = r * tau.eval(fac, &ctx).unwrap_or(f64::NAN).ln();
        let ln_rhs = 1.5379 * r * n.ln() / n.ln().ln();
        checked += 1;
        if !(ln_lhs <= ln_rhs) {
            violations.push(DivisorBoundViolation {
                n: fac.n(),
                ln_lhs,
                ln_rhs,
            });
        }
    })?;
    Ok((checked, violations))
}
