use shiu_bounds::harness::{run_smooth_interval, Resources, RunConfig};

// Lower-bound cores for smooth numbers in [x, x + y), written as CSV.
fn main() -> shiu_bounds::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.set("x_grid", "1e6, 1e7, 1e8")?;
    cfg.set("r", "paper")?;
    let report = run_smooth_interval(&cfg, &Resources::new(40_000)?)?;
    report.table.write_to(std::io::stdout().lock())
}
