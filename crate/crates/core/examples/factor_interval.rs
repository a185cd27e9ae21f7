//! Factor a short interval with the segmented sieve.
//!
//! cargo run --example factor_interval -- 1000000000 20

use shiu_bounds::arith::{factor_interval, smooth_rough_split};

fn main() -> shiu_bounds::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<f64>().expect("number") as u64);
    let x = args.next().unwrap_or(1_000_000_000);
    let y = args.next().unwrap_or(20);

    for f in factor_interval(x, y)? {
        let (smooth, rough) = smooth_rough_split(&f, 100.0);
        let parts: Vec<String> = f
            .factors()
            .iter()
            .map(|&(p, e)| {
                if e == 1 {
                    p.to_string()
                } else {
                    format!("{p}^{e}")
                }
            })
            .collect();
        println!(
            "{:>12} = {:<28} P+ = {:<10} 100-smooth part {}, rough part {}",
            f.n(),
            parts.join(" * "),
            f.greatest_prime_factor(),
            smooth.n(),
            rough.n()
        );
    }
    Ok(())
}
