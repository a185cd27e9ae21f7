//! Smooth numbers in a short interval against psi(y, Q).

use shiu_bounds::dickman::psi_short_interval;

fn main() -> shiu_bounds::Result<()> {
    for x in [1_000_000u64, 10_000_000, 100_000_000] {
        let y = (x as f64).powf(0.6).round() as u64;
        for q in [(x as f64).sqrt(), (x as f64).cbrt()] {
            let s = psi_short_interval(x, y, q.round() as u64)?;
            println!(
                "x = {x:>9}  y = {y:>6}  Q = {:>5}  smooth in [x, x+y): {:>6}  psi(y, Q): {:>6}{}",
                s.q,
                s.count,
                s.bound,
                if s.violation { "  VIOLATION" } else { "" }
            );
        }
    }
    Ok(())
}
