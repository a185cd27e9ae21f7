//! Interval sums in residue classes next to the bound core
//! y / (phi(k) log x) exp(sum f(p)/p).

use shiu_bounds::arith::PrimeTable;
use shiu_bounds::bounds::{lhs_sum, rhs_shiu, IntervalSpec};
use shiu_bounds::multfunc::{builtin, EvalContext};

fn main() -> shiu_bounds::Result<()> {
    let x = 10_000_000u64;
    let y = (x as f64).powf(0.6).round() as u64;
    let primes = PrimeTable::new(x)?;
    let ctx = EvalContext::new(x as f64)?;

    for name in ["one", "tau", "tau:d=3"] {
        let f = builtin(name)?;
        for (k, a) in [(1, 0), (4, 1), (4, 3), (7, 2)] {
            let spec = IntervalSpec::new(x, y, k, a, 0.25, 0.25)?;
            let lhs = lhs_sum(&f, &spec, &ctx)?;
            let core = rhs_shiu(&f, &spec, &ctx, &primes)?;
            println!(
                "{:<12} k = {k} a = {a}  sum = {:>10.0}  core = {:>12.1}  ratio = {:.4}",
                f.name(),
                lhs.value(),
                core.value(),
                lhs.ratio(core)
            );
        }
    }
    Ok(())
}
