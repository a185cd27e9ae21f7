//! Sample the defining inequalities of a function class and report any
//! counterexample.

use shiu_bounds::arith::factor_interval;
use shiu_bounds::multfunc::{
    builtin, check_condition_set, ClassClaim, ConditionConstants, ConditionSample, EvalContext,
};

fn main() -> shiu_bounds::Result<()> {
    let ctx = EvalContext::new(1e8)?;
    let sample = ConditionSample {
        prime_powers: [2u64, 3, 5, 7, 101, 9973]
            .iter()
            .flat_map(|&p| (1..=6).map(move |l| (p, l)))
            .collect(),
        integers: factor_interval(1, 50_000)?,
    };

    for (name, claim) in [
        ("tau", ClassClaim::M),
        ("tau:d=4,R=2", ClassClaim::M),
        ("synthetic:c=1,beta=0.001", ClassClaim::MBeta),
        ("smooth:Q=50", ClassClaim::MQ),
        ("tau", ClassClaim::MQ),
    ] {
        let f = builtin(name)?;
        // tau(n) <= 2 n^(1/2) for every n
        let mut constants = ConditionConstants::from_function(&f, 0.5);
        constants.a2 = constants.a2.max(2.0);
        if claim == ClassClaim::MQ && constants.q.is_none() {
            constants.q = Some(50.0);
        }
        let rep = check_condition_set(&f, &ctx, claim, &constants, &sample)?;
        match rep.first_witness() {
            None => println!(
                "{:<28} {claim:?}: holds on {} points",
                f.name(),
                rep.checked
            ),
            Some(w) => println!(
                "{:<28} {claim:?}: {:?} fails at {:?} ({:.3} > {:.3})",
                f.name(),
                w.condition,
                w.point,
                w.ln_value,
                w.ln_bound
            ),
        }
    }
    Ok(())
}
