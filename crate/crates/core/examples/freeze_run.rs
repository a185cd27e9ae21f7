//! Freeze the ratio constants into a temporary file and check a second
//! run against them.

use shiu_bounds::harness::{execute, Command, RunConfig};

fn main() -> shiu_bounds::Result<()> {
    let path = std::env::temp_dir().join("shiu-example-constants.csv");
    let freeze = RunConfig {
        freeze: true,
        constants: Some(path.clone()),
        ..RunConfig::default()
    };
    let out = execute(&Command::Freeze, &freeze)?;
    println!(
        "{} ratios frozen to {}",
        out.table.rows.len(),
        path.display()
    );

    let check = RunConfig {
        constants: Some(path),
        ..RunConfig::default()
    };
    let rep = execute(&Command::Freeze, &check)?
        .regression
        .expect("checked");
    println!(
        "{} ratios reproduced, {} drifted",
        rep.checked,
        rep.drifts.len()
    );
    Ok(())
}
