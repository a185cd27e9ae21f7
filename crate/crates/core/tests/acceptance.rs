//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

use std::path::Path;
use std::process::Command as Proc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shiu_bounds::arith::{factor_interval, Factorization, PrimeTable};
use shiu_bounds::dickman::{psi_exact, psi_short_interval_with, DickmanTable, PsiCounter};
use shiu_bounds::harness::apps::{holder_check, HOLDER_SLACK};
use shiu_bounds::harness::runs::interval_len;
use shiu_bounds::harness::{execute, run_classes, Command, Resources, RunConfig};
use shiu_bounds::multfunc::{builtin, EvalContext};

type Check = std::result::Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "dickman closed forms and grid halving",
            limit: Duration::from_secs(10),
            run: dickman,
        },
        Criterion {
            id: 2,
            name: "psi exactness",
            limit: Duration::from_secs(60),
            run: psi,
        },
        Criterion {
            id: 3,
            name: "interval factorization",
            limit: Duration::from_secs(30),
            run: factorization,
        },
        Criterion {
            id: 4,
            name: "class partition and V split",
            limit: Duration::from_secs(300),
            run: partition,
        },
        Criterion {
            id: 5,
            name: "holder step",
            limit: Duration::from_secs(120),
            run: holder,
        },
        Criterion {
            id: 6,
            name: "tau identities",
            limit: Duration::from_secs(60),
            run: tau_identities,
        },
        Criterion {
            id: 7,
            name: "smooth numbers in short intervals",
            limit: Duration::from_secs(300),
            run: hildebrand,
        },
        Criterion {
            id: 8,
            name: "frozen-constant regression",
            limit: Duration::from_secs(600),
            run: regression,
        },
        Criterion {
            id: 9,
            name: "determinism",
            limit: Duration::from_secs(600),
            run: determinism,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > c.limit => Err(format!(
                "{msg}; took {took:.1?} over the {:?} limit",
                c.limit
            )),
            o => o,
        };
        match outcome {
            Ok(msg) => println!("PASS {} {} ({took:.1?}): {msg}", c.id, c.name),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {} ({took:.1?}): {msg}", c.id, c.name);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: shiu_bounds::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn dickman() -> Check {
    let fine = lib(DickmanTable::new(11, 10.0))?;
    let coarse = lib(DickmanTable::new(10, 10.0))?;
    let mut worst_closed = 0.0f64;
    for i in 0..fine.len() {
        let (u, rho, _) = fine.grid_point(i).unwrap();
        if u > 2.0 {
            break;
        }
        let exact = if u <= 1.0 { 1.0 } else { 1.0 - u.ln() };
        worst_closed = worst_closed.max((rho - exact).abs());
    }
    ensure(worst_closed <= 1e-9, || {
        format!("closed-form error {worst_closed:e}")
    })?;
    let mut worst_halving = 0.0f64;
    for i in 0..coarse.len() {
        let (u, rho, _) = coarse.grid_point(i).unwrap();
        if u > 10.0 {
            break;
        }
        let rel = (lib(fine.rho(u))? / rho - 1.0).abs();
        worst_halving = worst_halving.max(rel);
    }
    ensure(worst_halving <= 1e-6, || {
        format!("grid halving moved rho by {worst_halving:e}")
    })?;
    Ok(format!(
        "closed-form error {worst_closed:.1e}, halving change {worst_halving:.1e}"
    ))
}

/// Greatest prime factor of every n <= limit, with gpf(1) = 1.
fn gpf_sieve(limit: usize) -> Vec<u32> {
    let mut gpf = vec![1u32; limit + 1];
    for p in 2..=limit {
        if gpf[p] == 1 {
            let mut m = p;
            while m <= limit {
                gpf[m] = p as u32;
                m += p;
            }
        }
    }
    gpf
}

fn psi() -> Check {
    const X: usize = 1_000_000;
    let gpf = gpf_sieve(X);
    let mut checked = 0u64;
    for q in [5u64, 10, 50, 100] {
        let counter = lib(PsiCounter::new(q, X as u64))?;
        let mut brute = 0u64;
        for x in 1..=X {
            if u64::from(gpf[x]) <= q {
                brute += 1;
            }
            let got = lib(counter.count(x as u64))?;
            ensure(got == brute, || {
                format!("psi({x}, {q}) = {got}, brute force {brute}")
            })?;
            if x % 9973 == 0 || x == X {
                let direct = lib(psi_exact(x as u64, q))?;
                ensure(direct == brute, || {
                    format!("psi_exact({x}, {q}) = {direct}, brute force {brute}")
                })?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (x, Q) pairs equal"))
}

fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn factorization() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let len = 200_000u64;
    let mut checked = 0;
    for x in [1_000_000u64, 1_000_000_000] {
        let facs = lib(factor_interval(x, len))?;
        ensure(facs.len() as u64 == len, || {
            format!("{} factorizations for length {len}", facs.len())
        })?;
        for _ in 0..5_000 {
            let i = rng.gen_range(0..len);
            let f = &facs[i as usize];
            let n = x + i;
            ensure(f.n() == n, || format!("slot {i} holds {} not {n}", f.n()))?;
            let want = trial_division(n);
            ensure(f.factors() == want.as_slice(), || {
                format!("{n}: sieve {:?}, trial division {want:?}", f.factors())
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} random n agree with trial division"))
}

fn partition() -> Check {
    let mut cells = 0;
    for f in ["one", "tau"] {
        let cfg = RunConfig {
            f: f.into(),
            ..RunConfig::default()
        };
        let res = lib(Resources::for_grid(&cfg))?;
        let report = lib(run_classes(&cfg, &res))?;
        let t = &report.table;
        let ok = t.values("coverage_ok");
        let status = t.values("status");
        for (i, row_ok) in ok.iter().enumerate() {
            if status[i].is_empty() {
                ensure(*row_ok == "true", || {
                    format!("f={f}: row {i} coverage or regrouping failed")
                })?;
                let lhs: f64 = t.values("lhs_log")[i]
                    .parse()
                    .map_err(|_| "bad lhs_log".to_string())?;
                let classes: f64 = t.values("classes_log")[i]
                    .parse()
                    .map_err(|_| "bad classes_log".to_string())?;
                let v: f64 = t.values("v_split_log")[i]
                    .parse()
                    .map_err(|_| "bad v_split_log".to_string())?;
                let close = |a: f64, b: f64| a == b || (a - b).abs() <= 1e-12;
                ensure(close(lhs, classes) && close(lhs, v), || {
                    format!("f={f}: row {i} lhs_log {lhs} classes {classes} V {v}")
                })?;
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} cells regroup exactly"))
}

fn holder() -> Check {
    let mut checks = 0;
    for x in [1_000_000u64, 100_000_000] {
        let facs = lib(factor_interval(x, 10_000))?;
        let q = (x as f64).sqrt();
        let smooth: Vec<&Factorization> = facs.iter().filter(|f| f.is_smooth(q)).collect();
        for d in [2u32, 3] {
            for r in [2.0, 5.0, 15.7] {
                for (label, set) in [
                    ("full", facs.iter().collect::<Vec<_>>()),
                    ("smooth", smooth.clone()),
                ] {
                    let h = lib(holder_check(set, d, r))?;
                    let slack = h.lhs.ln() - h.rhs.ln();
                    ensure(h.holds && slack <= HOLDER_SLACK.ln_1p(), || {
                        format!("x={x} d={d} R={r} {label}: lhs {} rhs {}", h.lhs, h.rhs)
                    })?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} inequalities hold"))
}

fn tau_identities() -> Check {
    let ctx = lib(EvalContext::new(16.0))?;
    const N: usize = 10_000;
    let facs = lib(factor_interval(1, N as u64))?;
    let mut prev: Vec<f64> = vec![1.0; N + 1];
    let mut checked = 0;
    for d in 2..=5u32 {
        let f = lib(builtin(&format!("tau:d={d}")))?;
        let mut conv = vec![0.0f64; N + 1];
        for m in 1..=N {
            let mut n = m;
            while n <= N {
                conv[n] += prev[m];
                n += m;
            }
        }
        let mut cur = vec![0.0; N + 1];
        for fac in &facs {
            let n = fac.n() as usize;
            cur[n] = lib(f.eval(fac, &ctx))?;
            ensure(cur[n] == conv[n], || {
                format!("tau_{d}({n}) = {}, convolution {}", cur[n], conv[n])
            })?;
            checked += 1;
        }
        prev = cur;
    }
    let tau2 = lib(builtin("tau"))?;
    let big = lib(factor_interval(1, 100_000))?;
    for d in 3..=5u32 {
        let f = lib(builtin(&format!("tau:d={d}")))?;
        for fac in &big {
            let t = lib(f.eval(fac, &ctx))?;
            let b = lib(tau2.eval(fac, &ctx))?.powi(d as i32 - 1);
            ensure(t <= b, || {
                format!("tau_{d}({}) = {t} > tau^{} = {b}", fac.n(), d - 1)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} identities exact"))
}

fn hildebrand() -> Check {
    let mut rows = Vec::new();
    for x in [1_000_000u64, 10_000_000] {
        let y = interval_len(x, 0.6);
        let table = lib(PrimeTable::new(shiu_bounds::arith::isqrt(x + y)))?;
        for root in [2.0, 3.0] {
            let q = (x as f64).powf(1.0 / root).round() as u64;
            let s = lib(psi_short_interval_with(x, y, q, &table))?;
            ensure(!s.violation, || {
                format!(
                    "x={x} y={y} Q={q}: {} smooth > psi(y, Q) = {}",
                    s.count, s.bound
                )
            })?;
            rows.push(format!("{}<={}", s.count, s.bound));
        }
    }
    Ok(format!("no violations ({})", rows.join(" ")))
}

fn regression() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("constants.csv");
    let freeze = RunConfig {
        freeze: true,
        constants: Some(path.clone()),
        ..RunConfig::default()
    };
    let out = lib(execute(&Command::Freeze, &freeze))?;
    ensure(out.frozen_to.as_deref() == Some(path.as_path()), || {
        "constants not written".into()
    })?;
    let check = RunConfig {
        constants: Some(path),
        ..RunConfig::default()
    };
    let out = lib(execute(&Command::Freeze, &check))?;
    let rep = out.regression.ok_or("no regression report")?;
    ensure(rep.passed() && rep.checked > 0 && rep.unfrozen == 0, || {
        format!(
            "checked {} unfrozen {} drifted {}",
            rep.checked,
            rep.unfrozen,
            rep.drifts.len()
        )
    })?;
    Ok(format!("{} ratios reproduced within 1%", rep.checked))
}

fn bin_stdout(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Proc::new(env!("CARGO_BIN_EXE_shiu"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!(
            "shiu {} exited {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    Ok(out.stdout)
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let constants = dir.path().join("constants.csv");
    let c = constants.to_str().ok_or("non-utf8 temp path")?;
    bin_stdout(&["freeze", "--freeze", "--constants", c])?;
    let runs: &[&[&str]] = &[
        &["verify", "--theorem", "shiu", "--f", "tau"],
        &["verify", "--theorem", "main"],
        &["verify", "--theorem", "mnthm2-c1", "--f", "smooth"],
        &["verify", "--theorem", "mnthm2-c2", "--f", "smooth_tau"],
        &["dfold", "--d", "3", "--R", "paper"],
        &["smooth-interval", "--R", "paper"],
        &["classes", "--f", "tau"],
        &["tables", "rho", "--to", "20"],
        &["tables", "psi", "--x", "1000,100000", "--Q", "5,100"],
        &["tables", "primes", "--limit", "10000"],
        &["freeze", "--constants", c],
    ];
    for args in runs {
        let a = bin_stdout(args)?;
        let b = bin_stdout(args)?;
        ensure(!a.is_empty() && a == b, || {
            format!("shiu {} differs between runs", args.join(" "))
        })?;
    }
    ensure(Path::new(&constants).exists(), || {
        "constants missing".into()
    })?;
    Ok(format!("{} subcommand runs byte-identical", runs.len()))
}
