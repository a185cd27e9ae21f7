//! Right-hand sides of the short-interval bounds, the rough-number count,
//! the head/tail class partition, the smooth/rough split sums, the Rankin
//! tail sums and the derived parameters that tie them together.
//!
//! Every right-hand side is a *core*: the displayed expression with its
//! implied constant stripped. Cores and sums are carried in log domain.

mod classes;
mod rankin;
mod rhs;

use std::fmt;

use crate::arith::{for_each_factored, gcd, Factorization, PrimeTable};
use crate::error::{Error, Result};
use crate::logvalue::LogValue;

pub use classes::{
    class_sums, classify, classify_with, v_split_sums, Class, ClassLabel, ClassSums, VSplit,
};
pub use rankin::{g_h, max_admissible_r, rankin_tail, RankinQuery, RankinTail, GH};
pub use rhs::{
    constants_c1_c2, lhs_sum, lhs_sum_in, phi_rough, phi_rough_in, psibound_cores, rhs_main,
    rhs_shiu, rhs_smooth, rhs_v3_core, PsiBoundCores, RoughCount, SmoothRhs, SmoothVariant,
};

/// Why an interval tuple fails the admissibility constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Infeasible {
    AlphaOutOfRange,
    KappaOutOfRange,
    ResidueOutOfRange,
    YAboveX,
    YBelowXKappa,
    ModulusTooLarge,
    NotCoprime,
}

impl Infeasible {
    pub fn code(self) -> &'static str {
        match self {
            Infeasible::AlphaOutOfRange => "alpha-range",
            Infeasible::KappaOutOfRange => "kappa-range",
            Infeasible::ResidueOutOfRange => "residue-range",
            Infeasible::YAboveX => "y-above-x",
            Infeasible::YBelowXKappa => "y-below-x^kappa",
            Infeasible::ModulusTooLarge => "k-too-large",
            Infeasible::NotCoprime => "gcd(a,k)>1",
        }
    }
}

/// `(x, y, k, a, alpha, kappa)` with `x^kappa <= y <= x`,
/// `k < y^(1-alpha)` and `gcd(a, k) = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalSpec {
    pub x: u64,
    pub y: u64,
    pub k: u64,
    pub a: u64,
    pub alpha: f64,
    pub kappa: f64,
}

impl IntervalSpec {
    pub fn new(x: u64, y: u64, k: u64, a: u64, alpha: f64, kappa: f64) -> Result<Self> {
        let bad = |r| Err(Error::Infeasible(r));
        if !(alpha > 0.0 && alpha < 0.5) {
            return bad(Infeasible::AlphaOutOfRange);
        }
        if !(kappa > 0.0 && kappa < 0.5) {
            return bad(Infeasible::KappaOutOfRange);
        }
        if k == 0 || a >= k {
            return bad(Infeasible::ResidueOutOfRange);
        }
        if x < 2 || y > x {
            return bad(Infeasible::YAboveX);
        }
        let (lx, ly) = ((x as f64).ln(), (y as f64).ln());
        if ly < kappa * lx - 1e-12 {
            return bad(Infeasible::YBelowXKappa);
        }
        if !((k as f64).ln() < (1.0 - alpha) * ly) {
            return bad(Infeasible::ModulusTooLarge);
        }
        if gcd(a, k) != 1 {
            return bad(Infeasible::NotCoprime);
        }
        Ok(IntervalSpec {
            x,
            y,
            k,
            a,
            alpha,
            kappa,
        })
    }

    pub fn ln_x(&self) -> f64 {
        (self.x as f64).ln()
    }
}

/// Parameters derived from a spec, `beta` and an optional smoothness bound.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessContext {
    pub ln_x: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub beta: f64,
    /// `Q`; equals `x` when no smoothness bound is given.
    pub q: f64,
    pub u: f64,
    /// `(log log x)^(1-beta)`
    pub j: f64,
    /// `Y^(alpha/10)`
    pub z: f64,
    /// `floor(log z / (5 log(log x log log x)))`; 0 at desk scale.
    pub r0: u64,
    /// `(log log x)^(1-beta/2)`
    pub r1: f64,
    /// `alpha kappa (1 - alpha kappa/20) log x / (20 log Q)`
    pub r2: f64,
    /// `z < 2`: the partition collapses.
    pub z_degenerate: bool,
}

impl SmoothnessContext {
    pub fn lnln_x(&self) -> f64 {
        self.ln_x.ln()
    }

    /// `(log x log log x)^5`, the class III/IV threshold.
    pub fn class_iii_threshold(&self) -> f64 {
        (self.ln_x * self.lnln_x()).powi(5)
    }

    /// The III/IV threshold exceeds `z^(1/2)`, so the asymptotic ordering
    /// of the class thresholds does not hold.
    pub fn regime_flag(&self) -> bool {
        self.class_iii_threshold() > self.z.sqrt()
    }
}

/// Derives the context for `spec`, with `Y = y` (see [`derive_context_from_logs`]).
pub fn derive_context(spec: &IntervalSpec, beta: f64, q: Option<f64>) -> Result<SmoothnessContext> {
    let ln_q = q.map(f64::ln).unwrap_or_else(|| spec.ln_x());
    let mut c = derive_context_from_logs(
        spec.ln_x(),
        (spec.y as f64).ln(),
        spec.alpha,
        spec.kappa,
        beta,
        ln_q,
    )?;
    c.q = q.unwrap_or(spec.x as f64);
    Ok(c)
}

/// Same as [`derive_context`] from `log x`, `log Y` and `log Q`, for scales
/// that do not fit in an integer.
pub fn derive_context_from_logs(
    ln_x: f64,
    ln_y: f64,
    alpha: f64,
    kappa: f64,
    beta: f64,
    ln_q: f64,
) -> Result<SmoothnessContext> {
    let lnln_x = ln_x.ln();
    if !(lnln_x >= 1.0) {
        return Err(Error::Domain(format!(
            "derived parameters need x >= e^e, got log x = {ln_x}"
        )));
    }
    if !(beta >= 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!(
            "beta must lie in [0, 1), got {beta}"
        )));
    }
    if !(ln_q > 0.0) {
        return Err(Error::Domain(format!(
            "Q must exceed 1, got log Q = {ln_q}"
        )));
    }
    let ak = alpha * kappa;
    let ln_z = alpha / 10.0 * ln_y;
    let z = ln_z.exp();
    let r0_real = ln_z / (5.0 * (ln_x * lnln_x).ln());
    Ok(SmoothnessContext {
        ln_x,
        alpha,
        kappa,
        beta,
        q: ln_q.exp(),
        u: ln_x / ln_q,
        j: lnln_x.powf(1.0 - beta),
        z,
        r0: if r0_real >= 0.0 {
            r0_real.floor() as u64
        } else {
            0
        },
        r1: lnln_x.powf(1.0 - beta / 2.0),
        r2: ak * (1.0 - ak / 20.0) * ln_x / (20.0 * ln_q),
        z_degenerate: z < 2.0,
    })
}

/// Integers of `[x, x + y)` with their factorizations, shared by every sum
/// taken over one interval.
#[derive(Clone, Debug)]
pub struct FactoredInterval {
    x: u64,
    y: u64,
    facs: Vec<Factorization>,
}

impl FactoredInterval {
    pub fn new(x: u64, y: u64, primes: &PrimeTable) -> Result<Self> {
        let mut facs = Vec::with_capacity(y as usize);
        for_each_factored(x, y, primes, |f| facs.push(f.clone()))?;
        Ok(FactoredInterval { x, y, facs })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn all(&self) -> &[Factorization] {
        &self.facs
    }

    /// The members congruent to `a` mod `k`.
    pub fn residues(&self, k: u64, a: u64) -> impl Iterator<Item = &Factorization> + '_ {
        let k = k.max(1);
        let first = ((a % k) + k - self.x % k) % k;
        self.facs.iter().skip(first as usize).step_by(k as usize)
    }
}

/// Which displayed bound a report row belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoremTag {
    Shiu,
    Main,
    MnThm2C1,
    MnThm2C2,
    Dfold,
    DfoldSmooth,
    SmoothThm,
}

impl TheoremTag {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremTag::Shiu => "shiu",
            TheoremTag::Main => "main",
            TheoremTag::MnThm2C1 => "mnthm2-c1",
            TheoremTag::MnThm2C2 => "mnthm2-c2",
            TheoremTag::Dfold => "dfold",
            TheoremTag::DfoldSmooth => "dfold-smooth",
            TheoremTag::SmoothThm => "smooththm",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "shiu" => TheoremTag::Shiu,
            "main" => TheoremTag::Main,
            "mnthm2-c1" => TheoremTag::MnThm2C1,
            "mnthm2-c2" => TheoremTag::MnThm2C2,
            "dfold" => TheoremTag::Dfold,
            "dfold-smooth" => TheoremTag::DfoldSmooth,
            "smooththm" => TheoremTag::SmoothThm,
            other => return Err(Error::Config(format!("unknown theorem tag {other:?}"))),
        })
    }
}

impl fmt::Display for TheoremTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Conditions noted on a result without failing it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flag {
    /// `beta >= alpha kappa / 41`.
    BetaHypothesis,
    /// `Q` above the range where the second smooth bound is stated.
    QRange,
    /// `z < 2`.
    ZDegenerate,
    /// Class thresholds out of their asymptotic order.
    Regime,
    /// `r` outside `1 <= r <= log z / (4 log log z)`.
    LemmaRange,
    /// An iterated logarithm of `x` is nonpositive.
    DeepLog,
    /// A smooth-supported bound applied to a function without that support.
    SupportMismatch,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::BetaHypothesis => "beta-hypothesis",
            Flag::QRange => "q-range",
            Flag::ZDegenerate => "z-degenerate",
            Flag::Regime => "regime",
            Flag::LemmaRange => "lemma-range",
            Flag::DeepLog => "deep-log",
            Flag::SupportMismatch => "support-mismatch",
        }
    }
}

/// A left-hand sum against a bound core.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub theorem: TheoremTag,
    pub function: String,
    pub spec: IntervalSpec,
    pub lhs: LogValue,
    pub rhs_core: LogValue,
    /// Second reading of the core, where the prime factor appears both as a
    /// bare sum and as its exponential.
    pub rhs_alt: Option<LogValue>,
    pub flags: Vec<Flag>,
}

impl BoundReport {
    pub fn ratio(&self) -> f64 {
        self.lhs.ratio(self.rhs_core)
    }

    pub fn ratio_alt(&self) -> Option<f64> {
        self.rhs_alt.map(|r| self.lhs.ratio(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_constraints() {
        assert!(IntervalSpec::new(1_000_000, 10_000, 3, 1, 0.25, 0.25).is_ok());
        let code = |r: Result<IntervalSpec>| match r {
            Err(Error::Infeasible(i)) => i,
            other => panic!("expected infeasible, got {other:?}"),
        };
        assert_eq!(
            code(IntervalSpec::new(100, 200, 1, 0, 0.25, 0.25)),
            Infeasible::YAboveX
        );
        assert_eq!(
            code(IntervalSpec::new(1_000_000, 10, 1, 0, 0.25, 0.25)),
            Infeasible::YBelowXKappa
        );
        assert_eq!(
            code(IntervalSpec::new(10_000, 100, 40, 1, 0.25, 0.25)),
            Infeasible::ModulusTooLarge
        );
        assert_eq!(
            code(IntervalSpec::new(10_000, 1000, 4, 2, 0.25, 0.25)),
            Infeasible::NotCoprime
        );
        assert_eq!(
            code(IntervalSpec::new(10_000, 1000, 4, 4, 0.25, 0.25)),
            Infeasible::ResidueOutOfRange
        );
        assert_eq!(
            code(IntervalSpec::new(10_000, 1000, 4, 1, 0.5, 0.25)),
            Infeasible::AlphaOutOfRange
        );
        assert_eq!(
            code(IntervalSpec::new(10_000, 1000, 4, 1, 0.25, 0.0)),
            Infeasible::KappaOutOfRange
        );
    }

    #[test]
    fn j_from_large_scale() {
        let c =
            derive_context_from_logs(100f64.exp(), 10.0, 0.25, 0.25, 0.2, 100f64.exp()).unwrap();
        assert!((c.j - 100f64.powf(0.8)).abs() < 1e-9);
        assert!((c.j - 39.81).abs() < 0.01);
        assert!((c.r1 - 100f64.powf(0.9)).abs() < 1e-9);
    }

    #[test]
    fn z_is_flagged_degenerate() {
        let spec = IntervalSpec::new(1_000_000, 1_000_000, 1, 0, 0.4, 0.25).unwrap();
        let c = derive_context(&spec, 0.0, None).unwrap();
        assert!((c.z - 10f64.powf(0.24)).abs() < 1e-9);
        assert!((c.z - 1.7378).abs() < 1e-4);
        assert!(c.z_degenerate);
        assert_eq!(c.r0, 0);
        assert!((c.u - 1.0).abs() < 1e-15);
    }

    #[test]
    fn r2_example() {
        let spec = IntervalSpec::new(100_000_000, 1_000_000, 1, 0, 0.25, 0.25).unwrap();
        let c = derive_context(&spec, 0.0, Some(100.0)).unwrap();
        // alpha kappa = 1/16, log x / log Q = 4
        let expected = 0.0625 * (1.0 - 0.0625 / 20.0) * 4.0 / 20.0;
        assert!((c.r2 - expected).abs() < 1e-15);
        assert!((c.r2 - 0.01246).abs() < 1e-5);
        assert!((c.u - 4.0).abs() < 1e-12);
    }

    #[test]
    fn small_x_is_domain_error() {
        let spec = IntervalSpec::new(15, 10, 1, 0, 0.25, 0.25).unwrap();
        assert!(matches!(
            derive_context(&spec, 0.0, None),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn residue_iterator_matches_filter() {
        let primes = PrimeTable::new(100).unwrap();
        let iv = FactoredInterval::new(1000, 97, &primes).unwrap();
        for k in 1..12u64 {
            for a in 0..k {
                let got: Vec<u64> = iv.residues(k, a).map(|f| f.n()).collect();
                let want: Vec<u64> = (1000..1097).filter(|n| n % k == a).collect();
                assert_eq!(got, want, "k={k} a={a}");
            }
        }
    }
}
