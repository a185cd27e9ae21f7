//! Tail sums over numbers built from primes in (J, z^(1/r)], with the
//! rigorous bound on the omitted part.

use shiu_bounds::arith::PrimeTable;
use shiu_bounds::bounds::{max_admissible_r, rankin_tail, RankinQuery};
use shiu_bounds::multfunc::{builtin, EvalContext};

fn main() -> shiu_bounds::Result<()> {
    let primes = PrimeTable::new(1_000_000)?;
    let ctx = EvalContext::new(1e8)?;
    let f = builtin("tau")?;
    for z in [1e4, 1e6] {
        println!(
            "z = {z:e}  largest admissible r = {:.3}",
            max_admissible_r(z)
        );
        for r in [2.0, 3.0, 4.0] {
            let q = RankinQuery {
                z,
                r,
                k: 1,
                j: 3.0,
                truncation: (64.0 * z.sqrt()) as u64,
                enforce_range: false,
            };
            let t = rankin_tail(&f, &q, &ctx, &primes)?;
            println!(
                "  r = {r}  terms = {:>6}  sum = {:.6}  tail <= {:.3e} (delta {})  core = {:.4}  flags {:?}",
                t.terms,
                t.lhs.value(),
                t.tail_bound.value(),
                t.tail_delta,
                t.selected_core().value(),
                t.flags
            );
        }
    }
    Ok(())
}
