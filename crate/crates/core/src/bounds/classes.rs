use crate::arith::{smooth_rough_split, Factorization};
use crate::error::Result;
use crate::logvalue::{LogSum, LogValue};
use crate::multfunc::{EvalContext, MultiplicativeFunction};

use super::{FactoredInterval, SmoothnessContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    I,
    II,
    III,
    IV,
}

impl Class {
    pub const ALL: [Class; 4] = [Class::I, Class::II, Class::III, Class::IV];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Class::I => "I",
            Class::II => "II",
            Class::III => "III",
            Class::IV => "IV",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassLabel {
    pub label: Class,
    /// Head: the longest run of complete prime powers, smallest primes
    /// first, whose product stays at most `z`.
    pub c: u64,
    /// Tail `n / c`.
    pub d: u64,
    pub regime_flag: bool,
}

pub fn classify(fac: &Factorization, ctx: &SmoothnessContext) -> ClassLabel {
    classify_with(fac, ctx.z, ctx.ln_x)
}

/// Labels `n` against head bound `z` and `log x`.
///
/// Precedence I, II, III, IV; with it the four classes partition every
/// interval even where the III/IV threshold exceeds `z^(1/2)`.
pub fn classify_with(fac: &Factorization, z: f64, ln_x: f64) -> ClassLabel {
    let mut c: u64 = 1;
    let mut head = 0;
    for &(p, e) in fac.factors() {
        let pe = p.pow(e);
        match c.checked_mul(pe) {
            Some(next) if next as f64 <= z => {
                c = next;
                head += 1;
            }
            _ => break,
        }
    }
    let d = fac.n() / c;
    let q_d = fac.factors()[head..]
        .first()
        .map_or(f64::INFINITY, |&(p, _)| p as f64);
    let sqrt_z = z.sqrt();
    let l5 = (ln_x * ln_x.ln()).powi(5);
    let label = if q_d > sqrt_z {
        Class::I
    } else if c as f64 <= sqrt_z {
        Class::II
    } else if q_d <= l5 {
        Class::III
    } else {
        Class::IV
    };
    ClassLabel {
        label,
        c,
        d,
        regime_flag: l5 > sqrt_z,
    }
}

/// Per-class totals over one residue class of an interval.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSums {
    pub totals: [LogValue; 4],
    pub counts: [u64; 4],
    /// Direct sum over the residue class, for the coverage check.
    pub lhs: LogValue,
    pub residues: u64,
    pub regime_flag: bool,
}

impl ClassSums {
    pub fn coverage(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Sum of the four class totals.
    pub fn recombined(&self) -> LogValue {
        let mut acc = LogSum::new();
        for t in self.totals {
            acc.add_log_value(t);
        }
        acc.total()
    }
}

pub fn class_sums(
    f: &MultiplicativeFunction,
    iv: &FactoredInterval,
    k: u64,
    a: u64,
    sctx: &SmoothnessContext,
    ctx: &EvalContext,
) -> Result<ClassSums> {
    let mut sums: [LogSum; 4] = Default::default();
    let mut counts = [0u64; 4];
    let mut lhs = LogSum::new();
    let mut residues = 0;
    for fac in iv.residues(k, a) {
        let v = f.eval_ln(fac, ctx)?;
        let c = classify(fac, sctx).label.index();
        sums[c].add_ln(v);
        counts[c] += 1;
        lhs.add_ln(v);
        residues += 1;
    }
    Ok(ClassSums {
        totals: sums.map(|s| s.total()),
        counts,
        lhs: lhs.total(),
        residues,
        regime_flag: sctx.regime_flag(),
    })
}

/// The split of a residue-class sum by the size of the `J`-smooth part `s`:
/// `s <= (log x)^10`, `(log x)^10 < s <= x^alpha`, `s > x^alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct VSplit {
    pub v: [LogValue; 3],
    pub counts: [u64; 3],
    pub lhs: LogValue,
    pub j: f64,
}

impl VSplit {
    pub fn recombined(&self) -> LogValue {
        let mut acc = LogSum::new();
        for t in self.v {
            acc.add_log_value(t);
        }
        acc.total()
    }
}

pub fn v_split_sums(
    f: &MultiplicativeFunction,
    iv: &FactoredInterval,
    k: u64,
    a: u64,
    sctx: &SmoothnessContext,
    ctx: &EvalContext,
) -> Result<VSplit> {
    let lo = 10.0 * sctx.lnln_x();
    let hi = sctx.alpha * sctx.ln_x;
    let mut sums: [LogSum; 3] = Default::default();
    let mut counts = [0u64; 3];
    let mut lhs = LogSum::new();
    for fac in iv.residues(k, a) {
        let v = f.eval_ln(fac, ctx)?;
        let (s, _) = smooth_rough_split(fac, sctx.j);
        let ln_s = (s.n() as f64).ln();
        let b = if ln_s <= lo {
            0
        } else if ln_s <= hi {
            1
        } else {
            2
        };
        sums[b].add_ln(v);
        counts[b] += 1;
        lhs.add_ln(v);
    }
    Ok(VSplit {
        v: sums.map(|s| s.total()),
        counts,
        lhs: lhs.total(),
        j: sctx.j,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor_small;
    use crate::arith::PrimeTable;
    use crate::bounds::{derive_context, IntervalSpec};
    use crate::multfunc::builtin;

    const LN_X: f64 = 13.815510557964274; // log 10^6

    #[test]
    fn examples() {
        let l = classify_with(&factor_small(282), 30.0, LN_X);
        assert_eq!((l.label, l.c, l.d), (Class::I, 6, 47));
        let l = classify_with(&factor_small(64), 30.0, LN_X);
        assert_eq!((l.label, l.c, l.d), (Class::II, 1, 64));
        let l = classify_with(&factor_small(101), 30.0, LN_X);
        assert_eq!((l.label, l.c, l.d), (Class::I, 1, 101));
        assert!(l.regime_flag);
    }

    #[test]
    fn head_stops_at_first_overflow() {
        // 2^2 * 3 * 11: 12 <= 30, then 132 > 30
        let l = classify_with(&factor_small(132), 30.0, LN_X);
        assert_eq!((l.c, l.d), (12, 11));
        assert_eq!(l.label, Class::I);
        // 2 * 3 * 5 * 7: c = 30, d = 7, q(d) = 7 > sqrt 30
        let l = classify_with(&factor_small(210), 30.0, LN_X);
        assert_eq!((l.c, l.d, l.label), (30, 7, Class::I));
        // 2^3 * 3 * 5: c = 24, q(d) = 5 <= sqrt 30 and c > sqrt 30
        let l = classify_with(&factor_small(120), 30.0, LN_X);
        assert_eq!((l.c, l.d, l.label), (24, 5, Class::III));
    }

    #[test]
    fn class_iv_needs_small_threshold() {
        let ln_x: f64 = 1.9;
        let l5 = (ln_x * ln_x.ln()).powi(5);
        assert!(l5 < 5.0);
        let l = classify_with(&factor_small(120), 30.0, ln_x);
        assert_eq!(l.label, Class::IV);
        assert!(!l.regime_flag);
    }

    #[test]
    fn partition_and_split_cover_interval() {
        let spec = IntervalSpec::new(1_000_000, 5_000, 3, 1, 0.25, 0.25).unwrap();
        let sctx = derive_context(&spec, 0.0, None).unwrap();
        let ctx = EvalContext::new(1e6).unwrap();
        let primes = PrimeTable::new(1100).unwrap();
        let iv = FactoredInterval::new(spec.x, spec.y, &primes).unwrap();
        let tau = builtin("tau").unwrap();
        let cs = class_sums(&tau, &iv, 3, 1, &sctx, &ctx).unwrap();
        assert_eq!(cs.coverage(), cs.residues);
        assert!((cs.recombined().ratio(cs.lhs) - 1.0).abs() < 1e-14);
        let vs = v_split_sums(&tau, &iv, 3, 1, &sctx, &ctx).unwrap();
        assert_eq!(vs.counts.iter().sum::<u64>(), cs.residues);
        assert!((vs.recombined().ratio(vs.lhs) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rough_interval_lands_in_first_bucket() {
        let spec = IntervalSpec::new(1_000_003, 2, 1, 0, 0.25, 0.01).unwrap();
        let sctx = derive_context(&spec, 0.0, None).unwrap();
        let ctx = EvalContext::new(1e6).unwrap();
        let primes = PrimeTable::new(1100).unwrap();
        let iv = FactoredInterval::new(spec.x, spec.y, &primes).unwrap();
        let one = builtin("one").unwrap();
        let vs = v_split_sums(&one, &iv, 1, 0, &sctx, &ctx).unwrap();
        assert_eq!(vs.counts, [2, 0, 0]);
        assert_eq!(vs.v[0], vs.lhs);
    }
}
