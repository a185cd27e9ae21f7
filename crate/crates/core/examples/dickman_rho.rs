//! Tabulate the Dickman function and compare psi(x, Q) with x rho(u).

use shiu_bounds::dickman::{psi_estimate, psi_exact, rho_asymptotic, DickmanTable};

fn main() -> shiu_bounds::Result<()> {
    let table = DickmanTable::default();
    println!(
        "{:>5} {:>24} {:>14} {:>14}",
        "u", "rho(u)", "ln rho", "asymptotic ln"
    );
    for u in [1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0] {
        let asym = rho_asymptotic(u)
            .map(|v| format!("{v:.4}"))
            .unwrap_or_default();
        println!(
            "{u:>5} {:>24e} {:>14.4} {asym:>14}",
            table.rho(u)?,
            table.ln_rho(u)?
        );
    }

    println!();
    println!("{:>10} {:>6} {:>10} {:>12}", "x", "Q", "psi", "x rho(u)");
    for (x, q) in [
        (1_000_000u64, 1_000u64),
        (1_000_000, 100),
        (10_000_000, 500),
    ] {
        let exact = psi_exact(x, q)?;
        println!(
            "{x:>10} {q:>6} {exact:>10} {:>12.1}",
            psi_estimate(x as f64, q as f64, &table)?
        );
    }
    Ok(())
}
