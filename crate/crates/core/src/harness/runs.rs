//! Grid scans. Each cell is computed independently, rows are sorted
//! before emission, and a cell that fails the interval constraints becomes
//! a row whose status carries the reason code.

use std::borrow::Cow;

use rayon::prelude::*;

use crate::arith::{isqrt, PrimeTable};
use crate::bounds::{
    class_sums, derive_context, g_h, lhs_sum_in, max_admissible_r, phi_rough_in, rankin_tail,
    rhs_main, rhs_shiu, rhs_smooth, v_split_sums, Class, FactoredInterval, Flag, IntervalSpec,
    RankinQuery, SmoothVariant, TheoremTag,
};
use crate::dickman::{psi_estimate_ln, psi_exact, psi_short_interval_with, DickmanTable};
use crate::error::{Error, Result};
use crate::logvalue::LogValue;
use crate::multfunc::{Builtin, EvalContext, MultiplicativeFunction};

use super::apps::{
    dfold_core_ln, holder_check, lower_bound_exponent, resolve_r, smooth_interval_cores,
};
use super::config::{RMode, RunConfig, YRule};
use super::table::{log_pair, num, opt_log_pair, opt_num, Table};

/// One ratio `lhs / core` for the freeze protocol.
#[derive(Clone, Debug, PartialEq)]
pub struct Ratio {
    pub family: String,
    pub cell: String,
    pub value: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub table: Table,
    pub ratios: Vec<Ratio>,
}

/// Prime table and Dickman table shared read-only by every cell.
pub struct Resources {
    pub primes: PrimeTable,
    pub rho: DickmanTable,
}

impl Resources {
    pub fn new(prime_limit: u64) -> Result<Self> {
        Ok(Resources {
            primes: PrimeTable::new(prime_limit)?,
            rho: DickmanTable::default(),
        })
    }

    /// Primes up to the largest `x` of the grid, enough for every prime sum
    /// and every sieve of the scans over that grid.
    pub fn for_grid(cfg: &RunConfig) -> Result<Self> {
        let top = cfg
            .x_grid
            .iter()
            .map(|&x| x.max(isqrt(x.saturating_add(interval_len(x, cfg.y_pow)))))
            .max()
            .unwrap_or(2);
        Resources::new(top.max(100))
    }
}

pub const LIMITS_NOTE: &str =
    "cores carry no implied constants; o(1) terms are taken at their limits";

pub fn interval_len(x: u64, y_pow: f64) -> u64 {
    ((x as f64).powf(y_pow).round() as u64).max(1)
}

fn preamble(cfg: &RunConfig, extra: &str) -> Vec<String> {
    vec![
        LIMITS_NOTE.to_string(),
        format!(
            "alpha={} kappa={} eps={} eps0={} y_pow={}{extra}",
            cfg.alpha, cfg.kappa, cfg.eps, cfg.eps0, cfg.y_pow
        ),
    ]
}

fn flags_str(flags: &[Flag]) -> String {
    let mut v: Vec<&str> = flags.iter().map(|f| f.as_str()).collect();
    v.sort_unstable();
    v.dedup();
    v.join(";")
}

fn skip_status(e: &Error) -> String {
    match e {
        Error::Infeasible(i) => format!("skip:{}", i.code()),
        Error::Domain(_) => "skip:domain".into(),
        Error::TableRange { .. } => "skip:rho-range".into(),
        Error::Range(_) => "skip:range".into(),
        other => format!("skip:{other}"),
    }
}

/// Errors that turn a cell into a skipped row rather than aborting the run.
fn is_cell_skip(e: &Error) -> bool {
    matches!(
        e,
        Error::Infeasible(_) | Error::Domain(_) | Error::TableRange { .. } | Error::Range(_)
    )
}

fn cell_id(x: u64, k: u64, a: u64) -> String {
    format!("x={x},k={k},a={a}")
}

type Keyed = (Vec<u64>, Vec<String>, Vec<Ratio>);

fn finish(mut table: Table, mut rows: Vec<Keyed>) -> Report {
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let mut ratios = Vec::new();
    for (_, row, r) in rows {
        table.push(row);
        ratios.extend(r);
    }
    ratios.sort_by(|a, b| (&a.family, &a.cell).cmp(&(&b.family, &b.cell)));
    Report { table, ratios }
}

fn smooth_bound(cfg: &RunConfig, x: u64, default_pow: f64) -> f64 {
    (x as f64).powf(cfg.q_pow.unwrap_or(default_pow))
}

/// The function of a verify scan at one `x`.
fn function_for(b: &Builtin, theorem: TheoremTag, q: f64) -> Result<MultiplicativeFunction> {
    let smooth = matches!(theorem, TheoremTag::MnThm2C1 | TheoremTag::MnThm2C2);
    if smooth {
        if b.is_smooth_supported() {
            b.with_q(q).build()
        } else {
            Ok(b.build()?.restricted_to_smooth(q))
        }
    } else {
        b.build()
    }
}

const VERIFY_HEADER: &[&str] = &[
    "theorem",
    "f",
    "x",
    "y",
    "k",
    "a",
    "status",
    "beta",
    "Q",
    "u",
    "lhs",
    "lhs_log",
    "rhs_core",
    "rhs_core_log",
    "ratio",
    "rhs_alt",
    "rhs_alt_log",
    "ratio_alt",
    "flags",
];

/// Sums over each residue class against the bound selected by
/// `cfg.theorem`. For the smooth-supported bounds `rhs_core` is the
/// reading with the bare prime sum and `rhs_alt` the one with its
/// exponential.
pub fn run_verify(cfg: &RunConfig, res: &Resources) -> Result<Report> {
    cfg.validate()?;
    let theorem = cfg.theorem;
    if !matches!(
        theorem,
        TheoremTag::Shiu | TheoremTag::Main | TheoremTag::MnThm2C1 | TheoremTag::MnThm2C2
    ) {
        return Err(Error::Config(format!(
            "verify covers shiu, main, mnthm2-c1 and mnthm2-c2, not {theorem}"
        )));
    }
    let builtin = Builtin::parse(&cfg.f)?;
    let mut table = Table::new(VERIFY_HEADER);
    table.preamble = preamble(cfg, &format!(" theorem={theorem} f={}", cfg.f));
    let rows: Vec<Vec<Keyed>> = cfg
        .x_grid
        .par_iter()
        .map(|&x| verify_x(cfg, res, &builtin, x))
        .collect::<Result<_>>()?;
    Ok(finish(table, rows.into_iter().flatten().collect()))
}

fn verify_x(cfg: &RunConfig, res: &Resources, builtin: &Builtin, x: u64) -> Result<Vec<Keyed>> {
    let theorem = cfg.theorem;
    let y = interval_len(x, cfg.y_pow);
    let q = smooth_bound(cfg, x, 1.0 / 3.0);
    let f = function_for(builtin, theorem, q)?;
    let fname = f.name().to_string();
    let fam_name = cfg.f.clone();
    let beta = cfg.beta.unwrap_or(f.params().beta);
    let mut out = Vec::new();
    let mut iv: Option<FactoredInterval> = None;
    for &k in &cfg.k {
        let residues = cfg.residues(k);
        let mut cores: Option<(LogValue, Option<LogValue>, Vec<Flag>, f64)> = None;
        for a in residues {
            let key = vec![x, k, a];
            let mut row = vec![
                theorem.to_string(),
                fname.clone(),
                x.to_string(),
                y.to_string(),
                k.to_string(),
                a.to_string(),
            ];
            let cell = (|| -> Result<_> {
                let spec = IntervalSpec::new(x, y, k, a, cfg.alpha, cfg.kappa)?;
                let sctx = derive_context(
                    &spec,
                    beta,
                    matches!(theorem, TheoremTag::MnThm2C1 | TheoremTag::MnThm2C2).then_some(q),
                )?;
                let ctx = EvalContext::new(x as f64)?;
                if iv.is_none() {
                    iv = Some(FactoredInterval::new(x, y, &res.primes)?);
                }
                let lhs = lhs_sum_in(&f, iv.as_ref().expect("factored"), k, a, &ctx)?;
                let c = match &cores {
                    Some(c) => c.clone(),
                    None => {
                        let mut flags = Vec::new();
                        if sctx.regime_flag() {
                            flags.push(Flag::Regime);
                        }
                        let c = match theorem {
                            TheoremTag::Shiu => {
                                (rhs_shiu(&f, &spec, &ctx, &res.primes)?, None, flags, sctx.u)
                            }
                            TheoremTag::Main => {
                                let (v, fl) = rhs_main(&f, &spec, cfg.eps0, &ctx, &res.primes)?;
                                flags.extend(fl);
                                (v, None, flags, sctx.u)
                            }
                            _ => {
                                let variant = if theorem == TheoremTag::MnThm2C1 {
                                    SmoothVariant::C1
                                } else {
                                    SmoothVariant::C2
                                };
                                let s = rhs_smooth(
                                    &f,
                                    &spec,
                                    &sctx,
                                    variant,
                                    cfg.eps,
                                    &res.rho,
                                    &ctx,
                                    &res.primes,
                                )?;
                                flags.extend(s.flags);
                                (s.with_sum, Some(s.with_exp), flags, sctx.u)
                            }
                        };
                        cores = Some(c.clone());
                        c
                    }
                };
                Ok((lhs, c, sctx.beta, sctx.q))
            })();
            let mut ratios = Vec::new();
            match cell {
                Ok((lhs, (core, alt, flags, u), beta, q)) => {
                    row.push(String::new());
                    row.extend([num(beta), num(q), num(u)]);
                    row.extend(log_pair(lhs));
                    row.extend(log_pair(core));
                    let ratio = lhs.ratio(core);
                    row.push(num(ratio));
                    row.extend(opt_log_pair(alt));
                    let ratio_alt = alt.map(|v| lhs.ratio(v));
                    row.push(opt_num(ratio_alt));
                    row.push(flags_str(&flags));
                    let (fam, fam_alt) = match theorem {
                        TheoremTag::MnThm2C1 | TheoremTag::MnThm2C2 => (
                            format!("{theorem}-sum/{fam_name}"),
                            format!("{theorem}-exp/{fam_name}"),
                        ),
                        _ => (format!("{theorem}/{fam_name}"), String::new()),
                    };
                    ratios.push(Ratio {
                        family: fam,
                        cell: cell_id(x, k, a),
                        value: ratio,
                    });
                    if let Some(v) = ratio_alt {
                        ratios.push(Ratio {
                            family: fam_alt,
                            cell: cell_id(x, k, a),
                            value: v,
                        });
                    }
                }
                Err(e) if is_cell_skip(&e) => {
                    row.push(skip_status(&e));
                    row.resize(VERIFY_HEADER.len(), String::new());
                }
                Err(e) => return Err(e),
            }
            out.push((key, row, ratios));
        }
    }
    Ok(out)
}

const DFOLD_HEADER: &[&str] = &[
    "theorem",
    "x",
    "y",
    "k",
    "a",
    "status",
    "d",
    "R",
    "r_mode",
    "Q",
    "u",
    "lhs",
    "lhs_log",
    "rhs_core",
    "rhs_core_log",
    "ratio",
    "flags",
];

/// Sums of `tau_d(n)^R` against the divisor-power core, plain and over
/// `Q`-smooth `n` (with `Q = x^q_pow`, default `Q = x`).
pub fn run_dfold(cfg: &RunConfig, res: &Resources) -> Result<Report> {
    cfg.validate()?;
    let mut table = Table::new(DFOLD_HEADER);
    let r_desc = match cfg.r {
        RMode::Explicit(r) => format!("R={r}"),
        RMode::Paper { fallback } => format!("R=paper fallback={fallback}"),
    };
    table.preamble = preamble(cfg, &format!(" d={} {r_desc}", cfg.d));
    let rows: Vec<Vec<Keyed>> = cfg
        .x_grid
        .par_iter()
        .map(|&x| dfold_x(cfg, res, x))
        .collect::<Result<_>>()?;
    Ok(finish(table, rows.into_iter().flatten().collect()))
}

fn dfold_x(cfg: &RunConfig, res: &Resources, x: u64) -> Result<Vec<Keyed>> {
    let y = interval_len(x, cfg.y_pow);
    let ln_x = (x as f64).ln();
    let rr = resolve_r(cfg.r, ln_x);
    let q = smooth_bound(cfg, x, 1.0);
    let u = ln_x / q.ln();
    let (_, c2) = crate::bounds::constants_c1_c2(cfg.alpha, cfg.kappa);
    let plain = Builtin::TauDPowerR { d: cfg.d, r: rr.r }.build()?;
    let smooth = Builtin::SmoothTauDPowerR {
        d: cfg.d,
        r: rr.r,
        q: Some(q),
    }
    .build()?;
    let mut out = Vec::new();
    let mut iv: Option<FactoredInterval> = None;
    for &k in &cfg.k {
        for a in cfg.residues(k) {
            for (tag, f) in [
                (TheoremTag::Dfold, &plain),
                (TheoremTag::DfoldSmooth, &smooth),
            ] {
                let key = vec![tag as u64, x, k, a];
                let mut row = vec![
                    tag.to_string(),
                    x.to_string(),
                    y.to_string(),
                    k.to_string(),
                    a.to_string(),
                ];
                let cell = (|| -> Result<(LogValue, f64)> {
                    IntervalSpec::new(x, y, k, a, cfg.alpha, cfg.kappa)?;
                    let ctx = EvalContext::new(x as f64)?;
                    if iv.is_none() {
                        iv = Some(FactoredInterval::new(x, y, &res.primes)?);
                    }
                    let lhs = lhs_sum_in(f, iv.as_ref().expect("factored"), k, a, &ctx)?;
                    let mut core = dfold_core_ln(ln_x, k, cfg.d, rr.r, cfg.eps)?;
                    if tag == TheoremTag::DfoldSmooth {
                        core += c2 * res.rho.ln_rho(u)?;
                    }
                    Ok((lhs, core))
                })();
                let mut ratios = Vec::new();
                match cell {
                    Ok((lhs, core)) => {
                        let core = LogValue::from_ln(core);
                        let mut flags = Vec::new();
                        if rr.deep_log {
                            flags.push(Flag::DeepLog);
                        }
                        row.push(String::new());
                        row.extend([
                            cfg.d.to_string(),
                            num(rr.r),
                            if rr.paper { "paper_R" } else { "explicit_R" }.to_string(),
                            num(q),
                            num(u),
                        ]);
                        row.extend(log_pair(lhs));
                        row.extend(log_pair(core));
                        let ratio = lhs.ratio(core);
                        row.push(num(ratio));
                        row.push(flags_str(&flags));
                        ratios.push(Ratio {
                            family: format!("{tag}/d={}", cfg.d),
                            cell: cell_id(x, k, a),
                            value: ratio,
                        });
                    }
                    Err(e) if is_cell_skip(&e) => {
                        row.push(skip_status(&e));
                        row.resize(DFOLD_HEADER.len(), String::new());
                    }
                    Err(e) => return Err(e),
                }
                out.push((key, row, ratios));
            }
        }
    }
    Ok(out)
}

/// Margin added to `1 - C2` for the smooth-interval exponent.
pub const C3_MARGIN: f64 = 0.01;

const SMOOTH_HEADER: &[&str] = &[
    "x",
    "y",
    "Q",
    "u",
    "status",
    "y_rule",
    "count",
    "psi_y_Q",
    "C3",
    "exponent",
    "lower_core",
    "lower_core_log",
    "count_over_lower",
    "zrho_core",
    "zrho_core_log",
    "tau_sum",
    "tau3_sum",
    "tau_over_zrho",
    "tau3_over_zrho",
    "R",
    "r_mode",
    "holder_d2_lhs_log",
    "holder_d2_rhs_log",
    "holder_d2_ok",
    "holder_d3_lhs_log",
    "holder_d3_rhs_log",
    "holder_d3_ok",
    "regime_unmet",
    "flags",
];

/// Exact smooth counts in `[x, x + y)` with `Q = x^q_pow` (default
/// `x^(1/2)`) against the lower-bound cores.
pub fn run_smooth_interval(cfg: &RunConfig, res: &Resources) -> Result<Report> {
    cfg.validate()?;
    let mut table = Table::new(SMOOTH_HEADER);
    table.preamble = preamble(
        cfg,
        &format!(" y_rule={:?} C3_margin={C3_MARGIN}", cfg.y_rule),
    );
    let rows: Vec<Keyed> = cfg
        .x_grid
        .par_iter()
        .map(|&x| smooth_x(cfg, res, x))
        .collect::<Result<_>>()?;
    let rep = finish(table, rows);
    // a failed Hölder step is a bug in the sums, not a bound outcome
    for col in ["holder_d2_ok", "holder_d3_ok"] {
        if rep.table.values(col).iter().any(|v| *v == "false") {
            return Err(Error::Invariant(format!("Hölder step failed ({col})")));
        }
    }
    Ok(rep)
}

fn smooth_x(cfg: &RunConfig, res: &Resources, x: u64) -> Result<Keyed> {
    let ln_x = (x as f64).ln();
    let q = smooth_bound(cfg, x, 0.5);
    let qi = q.floor() as u64;
    let u = ln_x / q.ln();
    let mut row = vec![x.to_string()];
    let cell = (|| -> Result<Vec<String>> {
        if x < 16 || qi < 2 {
            return Err(Error::Domain(format!("x = {x}, Q = {q}")));
        }
        let y = match cfg.y_rule {
            YRule::Pow => interval_len(x, cfg.y_pow),
            YRule::Sound { b } => {
                let ln_y = b.ln() + u.ln() + 0.5 * ln_x - res.rho.ln_rho(u / 2.0)?;
                ln_y.exp().round() as u64
            }
            YRule::Goudout { h } => (h * (x as f64).sqrt()).round() as u64,
        }
        .max(1);
        let rr = resolve_r(cfg.r, ln_x);
        let r = if rr.r > 1.0 { rr.r } else { 2.0 };
        let (c3, exponent) = lower_bound_exponent(cfg.alpha, cfg.kappa, C3_MARGIN, r);
        let (lower, zrho) = smooth_interval_cores(y, u, exponent, &res.rho)?;
        let sieve = sieve_for(res, x, y)?;
        let counted = psi_short_interval_with(x, y, qi, &sieve)?;
        let iv = FactoredInterval::new(x, y, &sieve)?;
        let smooth: Vec<_> = iv
            .all()
            .iter()
            .filter(|f| f.greatest_prime_factor() <= qi)
            .collect();
        let h2 = holder_check(smooth.iter().copied(), 2, r)?;
        let h3 = holder_check(smooth.iter().copied(), 3, r)?;
        let tau_sum = h2.lhs;
        let tau3_sum = h3.lhs;
        let lower = LogValue::from_ln(lower);
        let zrho = LogValue::from_ln(zrho);
        let count = LogValue::from_value(counted.count as f64);
        let mut flags = Vec::new();
        if rr.deep_log || rr.r <= 1.0 {
            flags.push(Flag::DeepLog);
        }
        let lnln = ln_x.ln();
        let mut v = vec![
            y.to_string(),
            num(q),
            num(u),
            String::new(),
            match cfg.y_rule {
                YRule::Pow => format!("pow:{}", cfg.y_pow),
                YRule::Sound { b } => format!("sound:{b}"),
                YRule::Goudout { h } => format!("goudout:{h}"),
            },
            counted.count.to_string(),
            counted.bound.to_string(),
            num(c3),
            num(exponent),
        ];
        v.extend(log_pair(lower));
        v.push(num(count.ratio(lower)));
        v.extend(log_pair(zrho));
        v.extend([num(tau_sum.value()), num(tau3_sum.value())]);
        v.extend([num(tau_sum.ratio(zrho)), num(tau3_sum.ratio(zrho))]);
        v.extend([
            num(r),
            if rr.paper { "paper_R" } else { "explicit_R" }.to_string(),
        ]);
        for h in [h2, h3] {
            v.extend([num(h.lhs.ln()), num(h.rhs.ln()), h.holds.to_string()]);
        }
        v.push((u < lnln * lnln).to_string());
        v.push(flags_str(&flags));
        Ok(v)
    })();
    match cell {
        Ok(v) => row.extend(v),
        Err(e) if is_cell_skip(&e) => {
            row.extend([String::new(), num(q), num(u), skip_status(&e)]);
            row.resize(SMOOTH_HEADER.len(), String::new());
        }
        Err(e) => return Err(e),
    }
    Ok((vec![x], row, Vec::new()))
}

/// A sieving table for `[x, x + y)`: the shared one when it reaches far
/// enough.
fn sieve_for(res: &Resources, x: u64, y: u64) -> Result<Cow<'_, PrimeTable>> {
    let need = isqrt(x + y - 1);
    if res.primes.limit() >= need {
        Ok(Cow::Borrowed(&res.primes))
    } else {
        Ok(Cow::Owned(PrimeTable::new(need)?))
    }
}

const CLASSES_HEADER: &[&str] = &[
    "x",
    "y",
    "k",
    "a",
    "status",
    "z",
    "sqrt_z",
    "class_iii_threshold",
    "regime_flag",
    "r0",
    "r2",
    "I",
    "II",
    "III",
    "IV",
    "count_I",
    "count_II",
    "count_III",
    "count_IV",
    "lhs",
    "lhs_log",
    "classes_log",
    "coverage",
    "residues",
    "coverage_ok",
    "V1",
    "V2",
    "V3",
    "count_V1",
    "count_V2",
    "count_V3",
    "v_split_log",
    "class_iv_empty",
];

/// Per-class and per-`V` sums. A partition that does not cover the
/// residue class is a hard error.
pub fn run_classes(cfg: &RunConfig, res: &Resources) -> Result<Report> {
    cfg.validate()?;
    let f = Builtin::parse(&cfg.f)?.build()?;
    let mut table = Table::new(CLASSES_HEADER);
    table.preamble = preamble(cfg, &format!(" f={}", cfg.f));
    let rows: Vec<Vec<Keyed>> = cfg
        .x_grid
        .par_iter()
        .map(|&x| classes_x(cfg, res, &f, x))
        .collect::<Result<_>>()?;
    Ok(finish(table, rows.into_iter().flatten().collect()))
}

/// Tolerance for comparing a sum with its regrouped parts.
pub const REGROUP_TOL: f64 = 1e-12;

fn classes_x(
    cfg: &RunConfig,
    res: &Resources,
    f: &MultiplicativeFunction,
    x: u64,
) -> Result<Vec<Keyed>> {
    let y = interval_len(x, cfg.y_pow);
    let beta = cfg.beta.unwrap_or(f.params().beta);
    let q = cfg.q_pow.map(|p| (x as f64).powf(p));
    let mut out = Vec::new();
    let mut iv: Option<FactoredInterval> = None;
    for &k in &cfg.k {
        for a in cfg.residues(k) {
            let mut row = vec![x.to_string(), y.to_string(), k.to_string(), a.to_string()];
            let cell = (|| -> Result<Vec<String>> {
                let spec = IntervalSpec::new(x, y, k, a, cfg.alpha, cfg.kappa)?;
                let sctx = derive_context(&spec, beta, q)?;
                let ctx = EvalContext::new(x as f64)?;
                if iv.is_none() {
                    iv = Some(FactoredInterval::new(x, y, &res.primes)?);
                }
                let iv = iv.as_ref().expect("factored");
                let cs = class_sums(f, iv, k, a, &sctx, &ctx)?;
                let vs = v_split_sums(f, iv, k, a, &sctx, &ctx)?;
                let regroup_ok = |parts: LogValue| {
                    parts == cs.lhs || (parts.ln() - cs.lhs.ln()).abs() <= REGROUP_TOL
                };
                let coverage_ok = cs.coverage() == cs.residues && regroup_ok(cs.recombined());
                if !coverage_ok {
                    return Err(Error::Invariant(format!(
                        "class partition misses {} at x = {x}, k = {k}, a = {a}",
                        cs.residues as i64 - cs.coverage() as i64
                    )));
                }
                if vs.counts.iter().sum::<u64>() != cs.residues || !regroup_ok(vs.recombined()) {
                    return Err(Error::Invariant(format!(
                        "V split does not regroup at x = {x}, k = {k}, a = {a}"
                    )));
                }
                let mut v = vec![
                    String::new(),
                    num(sctx.z),
                    num(sctx.z.sqrt()),
                    num(sctx.class_iii_threshold()),
                    sctx.regime_flag().to_string(),
                    sctx.r0.to_string(),
                    num(sctx.r2),
                ];
                v.extend(cs.totals.iter().map(|t| num(t.value())));
                v.extend(cs.counts.iter().map(|c| c.to_string()));
                v.extend(log_pair(cs.lhs));
                v.push(num(cs.recombined().ln()));
                v.extend([
                    cs.coverage().to_string(),
                    cs.residues.to_string(),
                    coverage_ok.to_string(),
                ]);
                v.extend(vs.v.iter().map(|t| num(t.value())));
                v.extend(vs.counts.iter().map(|c| c.to_string()));
                v.push(num(vs.recombined().ln()));
                v.push((cs.counts[Class::IV.index()] == 0).to_string());
                Ok(v)
            })();
            match cell {
                Ok(v) => row.extend(v),
                Err(e) if is_cell_skip(&e) => {
                    row.push(skip_status(&e));
                    row.resize(CLASSES_HEADER.len(), String::new());
                }
                Err(e) => return Err(e),
            }
            out.push((vec![x, k, a], row, Vec::new()));
        }
    }
    Ok(out)
}

const ROUGH_HEADER: &[&str] = &[
    "x", "y", "k", "a", "z", "status", "count", "core", "core_log", "ratio",
];

/// `Phi(x, y, z; k, a)` against `y / (phi(k) log z) + z^2` for each `z`.
pub fn run_rough(cfg: &RunConfig, res: &Resources, zs: &[f64]) -> Result<Report> {
    cfg.validate()?;
    let mut table = Table::new(ROUGH_HEADER);
    table.preamble = preamble(cfg, "");
    let rows: Vec<Vec<Keyed>> = cfg
        .x_grid
        .par_iter()
        .map(|&x| -> Result<Vec<Keyed>> {
            let y = interval_len(x, cfg.y_pow);
            let mut out = Vec::new();
            let mut iv: Option<FactoredInterval> = None;
            for &k in &cfg.k {
                for a in cfg.residues(k) {
                    for (zi, &z) in zs.iter().enumerate() {
                        let mut row = vec![
                            x.to_string(),
                            y.to_string(),
                            k.to_string(),
                            a.to_string(),
                            num(z),
                        ];
                        let cell = (|| -> Result<_> {
                            IntervalSpec::new(x, y, k, a, cfg.alpha, cfg.kappa)?;
                            if iv.is_none() {
                                iv = Some(FactoredInterval::new(x, y, &res.primes)?);
                            }
                            phi_rough_in(iv.as_ref().expect("factored"), z, k, a)
                        })();
                        let mut ratios = Vec::new();
                        match cell {
                            Ok(rc) => {
                                row.push(String::new());
                                row.push(rc.count.to_string());
                                row.extend(opt_log_pair(rc.core));
                                match rc.core {
                                    Some(core) => {
                                        let ratio =
                                            LogValue::from_value(rc.count as f64).ratio(core);
                                        row.push(num(ratio));
                                        ratios.push(Ratio {
                                            family: format!("rough/z={z}"),
                                            cell: cell_id(x, k, a),
                                            value: ratio,
                                        });
                                    }
                                    None => row.push(String::new()),
                                }
                            }
                            Err(e) if is_cell_skip(&e) => {
                                row.push(skip_status(&e));
                                row.resize(ROUGH_HEADER.len(), String::new());
                            }
                            Err(e) => return Err(e),
                        }
                        out.push((vec![x, k, a, zi as u64], row, ratios));
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(finish(table, rows.into_iter().flatten().collect()))
}

/// One `(z, r)` point of a Rankin scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankinCell {
    pub ln_z: f64,
    pub r: f64,
    /// Truncation `N` as a multiple of `z^(1/2)`.
    pub n_factor: f64,
}

/// Points with `r` inside the admissible range and `z^(1/r) <= 10^8`,
/// followed by small-`z` points outside it.
pub fn default_rankin_grid() -> Vec<RankinCell> {
    let mut g = Vec::new();
    for (ln_z, rs) in [
        (26.0, [1.5, 1.75, 1.95]),
        (30.0, [1.75, 2.0, 2.2]),
        (34.0, [2.0, 2.2, 2.4]),
    ] {
        for r in rs {
            g.push(RankinCell {
                ln_z,
                r,
                n_factor: 2.0,
            });
        }
    }
    for z in [1e4f64, 1e6, 1e8] {
        for r in [2.0, 3.0, 4.0] {
            g.push(RankinCell {
                ln_z: z.ln(),
                r,
                n_factor: 64.0,
            });
        }
    }
    g
}

/// Largest prime any cell of the default Rankin grid needs.
pub const RANKIN_PRIME_LIMIT: u64 = 100_000_000;

const RANKIN_HEADER: &[&str] = &[
    "f",
    "ln_z",
    "r",
    "r_max",
    "k",
    "J",
    "N",
    "status",
    "terms",
    "lhs",
    "lhs_log",
    "tail_bound",
    "tail_bound_log",
    "rhs_main",
    "rhs_main_log",
    "ratio_main",
    "rhs_shiu",
    "rhs_shiu_log",
    "ratio_shiu",
    "g",
    "h",
    "flags",
];

/// Truncated sums `sum f(n)/n` against both cores. `J` is taken from
/// `x = z^(10/alpha)`, the least `x` whose interval length can produce `z`.
pub fn run_rankin(
    cfg: &RunConfig,
    primes: &PrimeTable,
    functions: &[&str],
    grid: &[RankinCell],
) -> Result<Report> {
    let mut table = Table::new(RANKIN_HEADER);
    table.preamble = preamble(cfg, " J=(log log x)^(1-beta) with x=z^(10/alpha)");
    let jobs: Vec<(usize, usize)> = (0..functions.len())
        .flat_map(|i| (0..grid.len()).map(move |j| (i, j)))
        .collect();
    let rows: Vec<Keyed> = jobs
        .par_iter()
        .map(|&(fi, ci)| -> Result<Keyed> {
            let fname = functions[fi];
            let f = Builtin::parse(fname)?.build()?;
            let cell = grid[ci];
            let z = cell.ln_z.exp();
            let ln_x = 10.0 / cfg.alpha * cell.ln_z;
            let ctx = EvalContext::from_ln_x(ln_x)?;
            let beta = f.params().beta;
            let j = ctx.lnln_x().powf(1.0 - beta);
            let n = (cell.n_factor * z.sqrt()).ceil() as u64;
            let k = 1;
            let q = RankinQuery {
                z,
                r: cell.r,
                k,
                j,
                truncation: n,
                enforce_range: false,
            };
            let mut row = vec![
                fname.to_string(),
                num(cell.ln_z),
                num(cell.r),
                num(max_admissible_r(z)),
                k.to_string(),
                num(j),
                n.to_string(),
            ];
            let mut ratios = Vec::new();
            match rankin_tail(&f, &q, &ctx, primes) {
                Ok(t) => {
                    row.push(String::new());
                    row.push(t.terms.to_string());
                    row.extend(log_pair(t.lhs));
                    row.extend(log_pair(t.tail_bound));
                    row.extend(log_pair(t.rhs_main));
                    let rm = t.lhs.ratio(t.rhs_main);
                    row.push(num(rm));
                    row.extend(opt_log_pair(t.rhs_shiu));
                    let rs = t.rhs_shiu.map(|c| t.lhs.ratio(c));
                    row.push(opt_num(rs));
                    match g_h(cell.r, beta, f.params().a1, cfg.alpha, cfg.kappa, ln_x) {
                        Ok(gh) => row.extend([num(gh.g), num(gh.h)]),
                        Err(_) => row.extend([String::new(), String::new()]),
                    }
                    row.push(flags_str(&t.flags));
                    let id = format!("ln_z={},r={}", cell.ln_z, cell.r);
                    ratios.push(Ratio {
                        family: format!("rankin-main/{fname}"),
                        cell: id.clone(),
                        value: rm,
                    });
                    if let Some(v) = rs {
                        ratios.push(Ratio {
                            family: format!("rankin-shiu/{fname}"),
                            cell: id,
                            value: v,
                        });
                    }
                }
                Err(e) if is_cell_skip(&e) => {
                    row.push(skip_status(&e));
                    row.resize(RANKIN_HEADER.len(), String::new());
                }
                Err(e) => return Err(e),
            }
            Ok((vec![fi as u64, ci as u64], row, ratios))
        })
        .collect::<Result<_>>()?;
    Ok(finish(table, rows))
}

/// What [`dump_tables`] writes.
#[derive(Clone, Debug, PartialEq)]
pub enum TableRequest {
    /// `u, rho, ln_rho` for `u = from, from + step, ..., to`.
    Rho { from: f64, to: f64, step: f64 },
    /// `x, Q, exact, estimate` for every pair.
    Psi { xs: Vec<u64>, qs: Vec<u64> },
    /// `index, p` for `p <= limit`.
    Primes { limit: u64 },
}

pub fn dump_tables(req: &TableRequest) -> Result<Table> {
    match req {
        TableRequest::Rho { from, to, step } => {
            if !(*step > 0.0) || !(from <= to) || *from < 0.0 {
                return Err(Error::Config(format!(
                    "rho range needs 0 <= from <= to and step > 0, got {from}..{to} by {step}"
                )));
            }
            let table = DickmanTable::default();
            let mut t = Table::new(&["u", "rho", "ln_rho"]);
            let n = ((to - from) / step + 1e-9).floor() as u64;
            for i in 0..=n {
                let u = from + i as f64 * step;
                let l = table.ln_rho(u)?;
                t.push(vec![num(u), num(l.exp()), num(l)]);
            }
            Ok(t)
        }
        TableRequest::Psi { xs, qs } => {
            let table = DickmanTable::default();
            let mut t = Table::new(&["x", "Q", "exact", "estimate", "estimate_log"]);
            for &x in xs {
                for &q in qs {
                    let exact = psi_exact(x, q)?;
                    let est = if x >= 2 && q >= 2 {
                        psi_estimate_ln(x as f64, q as f64, &table).ok()
                    } else {
                        None
                    };
                    t.push(vec![
                        x.to_string(),
                        q.to_string(),
                        exact.to_string(),
                        opt_num(est.map(f64::exp)),
                        opt_num(est),
                    ]);
                }
            }
            Ok(t)
        }
        TableRequest::Primes { limit } => {
            let p = PrimeTable::new(*limit)?;
            let mut t = Table::new(&["index", "p"]);
            for (i, q) in p.primes().iter().enumerate() {
                t.push(vec![(i + 1).to_string(), q.to_string()]);
            }
            Ok(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> RunConfig {
        RunConfig {
            x_grid: vec![10_000, 100_000],
            ..RunConfig::default()
        }
    }

    #[test]
    fn verify_rows_cover_grid() {
        let cfg = small_cfg();
        let res = Resources::for_grid(&cfg).unwrap();
        let rep = run_verify(&cfg, &res).unwrap();
        // k = 1, 3, 4, 7 give 1 + 2 + 2 + 6 residues
        assert_eq!(rep.table.rows.len(), 2 * 11);
        assert_eq!(rep.ratios.len(), 2 * 11);
        assert!(rep.table.values("status").iter().all(|s| s.is_empty()));
    }

    #[test]
    fn empty_grid_is_header_only() {
        let cfg = RunConfig {
            x_grid: vec![],
            ..RunConfig::default()
        };
        let res = Resources::for_grid(&cfg).unwrap();
        let rep = run_verify(&cfg, &res).unwrap();
        assert!(rep.table.rows.is_empty());
        let s = rep.table.to_csv_string().unwrap();
        assert!(s.lines().last().unwrap().starts_with("theorem,f,x"));
    }

    #[test]
    fn infeasible_cells_are_reported() {
        let cfg = RunConfig {
            x_grid: vec![10_000],
            k: vec![100],
            a: super::super::config::ResidueRule::List(vec![1]),
            ..RunConfig::default()
        };
        let res = Resources::for_grid(&cfg).unwrap();
        let rep = run_verify(&cfg, &res).unwrap();
        assert_eq!(rep.table.values("status"), vec!["skip:k-too-large"]);
        assert!(rep.ratios.is_empty());
    }

    #[test]
    fn tables_row_counts() {
        let t = dump_tables(&TableRequest::Rho {
            from: 0.0,
            to: 5.0,
            step: 0.25,
        })
        .unwrap();
        assert_eq!(t.rows.len(), 21);
        let t = dump_tables(&TableRequest::Primes { limit: 100 }).unwrap();
        assert_eq!(t.rows.len(), 25);
        let t = dump_tables(&TableRequest::Psi {
            xs: vec![1000, 10_000],
            qs: vec![10, 100],
        })
        .unwrap();
        assert_eq!(t.rows.len(), 4);
    }

    #[test]
    fn dfold_smooth_core_at_q_equal_x_matches_plain() {
        let cfg = RunConfig {
            x_grid: vec![10_000],
            k: vec![1],
            r: RMode::Explicit(1.0),
            ..RunConfig::default()
        };
        let res = Resources::for_grid(&cfg).unwrap();
        let rep = run_dfold(&cfg, &res).unwrap();
        // rho(1) = 1: same core; the smooth sum only drops primes above x
        let cores = rep.table.values("rhs_core_log");
        assert_eq!(cores.len(), 2);
        assert_eq!(cores[0], cores[1]);
        let lhs = rep.table.values("lhs");
        assert!(lhs[1].parse::<f64>().unwrap() < lhs[0].parse::<f64>().unwrap());
    }
}
