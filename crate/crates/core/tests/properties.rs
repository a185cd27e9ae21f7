use proptest::prelude::*;
use shiu_bounds::arith::{factor_interval, gcd, Factorization, PrimeTable};
use shiu_bounds::bounds::{
    class_sums, derive_context, lhs_sum_in, v_split_sums, FactoredInterval, IntervalSpec,
};
use shiu_bounds::dickman::{DickmanTable, PsiCounter};
use shiu_bounds::multfunc::{builtin, EvalContext};
use shiu_bounds::LogSum;

fn fac(n: u64) -> Factorization {
    factor_interval(n, 1).unwrap().remove(0)
}

fn close_ln(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn functions_are_multiplicative(
        m in 1u64..20_000,
        n in 1u64..20_000,
        name in prop::sample::select(vec!["one", "tau", "tau:d=3", "tau:d=2,R=2", "smooth:Q=50", "smooth_tau:d=3,R=1.5,Q=30", "synthetic:c=1,beta=0.01"]),
    ) {
        prop_assume!(gcd(m, n) == 1);
        let f = builtin(name).unwrap();
        let ctx = EvalContext::new(1e8).unwrap();
        let lhs = f.eval(&fac(m * n), &ctx).unwrap();
        let rhs = f.eval(&fac(m), &ctx).unwrap() * f.eval(&fac(n), &ctx).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0), "{name}: f({m}*{n}) = {lhs}, product {rhs}");
    }

    #[test]
    fn factorizations_multiply_back(x in 2u64..1_000_000_000_000, y in 1u64..400) {
        for (i, f) in factor_interval(x, y).unwrap().iter().enumerate() {
            prop_assert_eq!(f.n(), x + i as u64);
            let mut prod = 1u64;
            let mut prev = 1u64;
            for &(p, e) in f.factors() {
                prop_assert!(p > prev);
                prop_assert!((2..).take_while(|d| d * d <= p).all(|d| p % d != 0), "{} is not prime", p);
                prev = p;
                prod *= p.pow(e);
            }
            prop_assert_eq!(prod, f.n());
        }
    }

    #[test]
    fn classes_and_v_split_partition_every_residue_class(
        x in 20_000u64..2_000_000,
        yp in 0.3f64..0.7,
        k in 1u64..12,
        a_seed in 0u64..1000,
        f in prop::sample::select(vec!["one", "tau", "tau:d=3"]),
    ) {
        let y = (x as f64).powf(yp).round() as u64;
        let a = a_seed % k;
        let spec = IntervalSpec::new(x, y, k, a, 0.25, 0.25);
        prop_assume!(spec.is_ok());
        let spec = spec.unwrap();
        let sctx = derive_context(&spec, 0.0, None).unwrap();
        let f = builtin(f).unwrap();
        let ctx = EvalContext::new(x as f64).unwrap();
        let primes = PrimeTable::new(2_000).unwrap();
        let iv = FactoredInterval::new(x, y, &primes).unwrap();
        let lhs = lhs_sum_in(&f, &iv, k, a, &ctx).unwrap();
        let cs = class_sums(&f, &iv, k, a, &sctx, &ctx).unwrap();
        prop_assert_eq!(cs.coverage(), cs.residues);
        prop_assert!(close_ln(cs.recombined().ln(), lhs.ln()));
        let vs = v_split_sums(&f, &iv, k, a, &sctx, &ctx).unwrap();
        prop_assert_eq!(vs.counts.iter().sum::<u64>(), cs.residues);
        prop_assert!(close_ln(vs.recombined().ln(), lhs.ln()));
    }

    #[test]
    fn buchstab_agrees_with_enumeration(x in 1u64..5_000_000, q in 2u64..8) {
        let c = PsiCounter::new(q, 64).unwrap();
        prop_assert_eq!(c.count_buchstab(x), c.count(x).unwrap());
    }

    #[test]
    fn psi_is_monotone(x in 1u64..200_000, q in 2u64..200) {
        let a = PsiCounter::new(q, 1 << 12).unwrap();
        let b = PsiCounter::new(q + 1, 1 << 12).unwrap();
        let here = a.count(x).unwrap();
        prop_assert!(here <= a.count(x + 1).unwrap());
        prop_assert!(here <= b.count(x).unwrap());
        prop_assert!(here <= x);
    }

    #[test]
    fn rho_is_decreasing(u in 0.0f64..150.0, du in 0.001f64..5.0) {
        let t = DickmanTable::default();
        prop_assert!(t.ln_rho(u + du).unwrap() <= t.ln_rho(u).unwrap());
    }

    #[test]
    fn log_sum_matches_plain_sum(vs in prop::collection::vec(0.0f64..1e6, 0..200)) {
        let mut s = LogSum::new();
        for &v in &vs {
            s.add_value(v);
        }
        let plain: f64 = vs.iter().sum();
        prop_assert_eq!(s.terms(), vs.len() as u64);
        prop_assert!((s.total().value() - plain).abs() <= 1e-9 * plain.max(1.0));
    }

    #[test]
    fn log_sum_survives_overflow(lns in prop::collection::vec(700.0f64..900.0, 1..50)) {
        let mut s = LogSum::new();
        for &l in &lns {
            s.add_ln(l);
        }
        let m = lns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let want = m + lns.iter().map(|l| (l - m).exp()).sum::<f64>().ln();
        prop_assert!((s.total().ln() - want).abs() <= 1e-12 * want);
    }
}
