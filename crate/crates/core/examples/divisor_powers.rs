//! Sums of tau_d(n)^R over an interval, and the effective divisor bound.

use shiu_bounds::arith::factor_interval;
use shiu_bounds::harness::apps::{dfold_core_ln, holder_check};
use shiu_bounds::multfunc::{builtin, monitor_divisor_bound, EvalContext};
use shiu_bounds::LogSum;

fn main() -> shiu_bounds::Result<()> {
    let x = 1_000_000u64;
    let y = 3_981u64;
    let facs = factor_interval(x, y)?;
    let ctx = EvalContext::new(x as f64)?;
    for (d, r) in [(2u32, 1.0), (2, 2.0), (3, 2.0)] {
        let f = builtin(&format!("tau:d={d},R={r}"))?;
        let mut sum = LogSum::new();
        for n in &facs {
            sum.add_ln(f.eval_ln(n, &ctx)?);
        }
        let core = dfold_core_ln(ctx.ln_x(), 1, d, r, 0.1)?.exp() * y as f64 / x as f64;
        println!(
            "d = {d} R = {r}  sum = {:>10.0}  y/x * core = {core:>14.1}",
            sum.total().value()
        );
    }

    let h = holder_check(&facs, 3, 2.0)?;
    println!("Hölder: {} <= {} : {}", h.lhs, h.rhs, h.holds);

    let (checked, bad) = monitor_divisor_bound(1_000_000, 1.0)?;
    println!(
        "tau(n) <= n^(1.5379 / log log n): {checked} checked, {} violations",
        bad.len()
    );
    Ok(())
}
