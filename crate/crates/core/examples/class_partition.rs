//! Split a residue-class sum into classes I-IV and into V1-V3.

use shiu_bounds::arith::{isqrt, PrimeTable};
use shiu_bounds::bounds::{
    class_sums, derive_context, v_split_sums, Class, FactoredInterval, IntervalSpec,
};
use shiu_bounds::multfunc::{builtin, EvalContext};

fn main() -> shiu_bounds::Result<()> {
    let (x, y, k, a) = (100_000_000u64, 63_096u64, 3u64, 1u64);
    let spec = IntervalSpec::new(x, y, k, a, 0.25, 0.25)?;
    let sctx = derive_context(&spec, 0.0, None)?;
    println!(
        "z = {:.4}  J = {:.3}  regime flag = {}",
        sctx.z,
        sctx.j,
        sctx.regime_flag()
    );

    let primes = PrimeTable::new(isqrt(x + y))?;
    let iv = FactoredInterval::new(x, y, &primes)?;
    let f = builtin("tau")?;
    let ctx = EvalContext::new(x as f64)?;

    let cs = class_sums(&f, &iv, k, a, &sctx, &ctx)?;
    for c in Class::ALL {
        let i = c.index();
        println!(
            "class {:<3} n = {:>6}  sum = {:>10.0}",
            c.as_str(),
            cs.counts[i],
            cs.totals[i].value()
        );
    }
    println!(
        "total {:.0}, classes recombined {:.0}",
        cs.lhs.value(),
        cs.recombined().value()
    );

    let vs = v_split_sums(&f, &iv, k, a, &sctx, &ctx)?;
    for (i, v) in vs.v.iter().enumerate() {
        println!(
            "V{} n = {:>6}  sum = {:>10.0}",
            i + 1,
            vs.counts[i],
            v.value()
        );
    }
    Ok(())
}
