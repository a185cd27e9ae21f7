//! Frozen constants: a reference run stores every ratio `lhs / core` and
//! the largest ratio of each family; later runs must reproduce each stored
//! ratio to within a relative tolerance.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

use super::config::RunConfig;
use super::runs::{
    default_rankin_grid, run_rankin, run_rough, run_verify, Ratio, Report, Resources,
    RANKIN_PRIME_LIMIT,
};
use super::table::{num, Table};
use crate::bounds::TheoremTag;

/// Relative tolerance of the regression check.
pub const TOLERANCE: f64 = 0.01;

/// Cell name of the per-family maximum in a constants file.
pub const MAX_CELL: &str = "K";

/// Ratios plus one `K` row per family holding its maximum.
pub fn constants_table(ratios: &[Ratio]) -> Table {
    let mut t = Table::new(&["family", "cell", "ratio"]);
    let mut max: BTreeMap<&str, f64> = BTreeMap::new();
    for r in ratios {
        let m = max.entry(&r.family).or_insert(0.0);
        if r.value > *m {
            *m = r.value;
        }
    }
    let mut rows: Vec<(&str, &str, f64)> = ratios
        .iter()
        .map(|r| (r.family.as_str(), r.cell.as_str(), r.value))
        .collect();
    rows.extend(max.iter().map(|(f, v)| (*f, MAX_CELL, *v)));
    rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    for (f, c, v) in rows {
        t.push(vec![f.to_string(), c.to_string(), num(v)]);
    }
    t
}

pub fn write_constants(path: &Path, ratios: &[Ratio]) -> Result<()> {
    constants_table(ratios).write_path(path)
}

pub fn read_constants(path: &Path) -> Result<Vec<Ratio>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::Io {
                path: path.to_path_buf(),
                source,
            },
            other => Error::Config(format!("{}: {other:?}", path.display())),
        })?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("").to_string();
        let value = field(2).parse::<f64>().map_err(|_| {
            Error::Config(format!("bad ratio {:?} in {}", field(2), path.display()))
        })?;
        out.push(Ratio {
            family: field(0),
            cell: field(1),
            value,
        });
    }
    Ok(out)
}

/// A ratio that moved by more than the tolerance, or exceeds its family's `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct Drift {
    pub family: String,
    pub cell: String,
    pub frozen: f64,
    pub current: f64,
    /// The ratio exceeds its family's frozen maximum by more than the
    /// tolerance (as opposed to only moving away from its own value).
    pub above_k: bool,
}

impl Drift {
    pub fn relative(&self) -> f64 {
        if self.frozen == 0.0 {
            if self.current == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.current / self.frozen - 1.0
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RegressionReport {
    pub checked: usize,
    /// Current ratios with no frozen counterpart.
    pub unfrozen: usize,
    pub drifts: Vec<Drift>,
}

impl RegressionReport {
    pub fn passed(&self) -> bool {
        self.drifts.is_empty()
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&[
            "family",
            "cell",
            "frozen",
            "current",
            "relative_change",
            "above_k",
        ]);
        t.preamble.push(format!(
            "checked={} unfrozen={} drifted={} tolerance={TOLERANCE}",
            self.checked,
            self.unfrozen,
            self.drifts.len()
        ));
        for d in &self.drifts {
            t.push(vec![
                d.family.clone(),
                d.cell.clone(),
                num(d.frozen),
                num(d.current),
                num(d.relative()),
                d.above_k.to_string(),
            ]);
        }
        t
    }

    /// `Err(Regression)` when anything drifted.
    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            let d = &self.drifts[0];
            Err(Error::Regression(format!(
                "{} of {} frozen ratios drifted beyond {}%; first: {} {} frozen {} now {}{}",
                self.drifts.len(),
                self.checked,
                TOLERANCE * 100.0,
                d.family,
                d.cell,
                d.frozen,
                d.current,
                if d.above_k { " (above K)" } else { "" }
            )))
        }
    }
}

pub fn check_against(current: &[Ratio], frozen: &[Ratio], tol: f64) -> RegressionReport {
    let map: BTreeMap<(&str, &str), f64> = frozen
        .iter()
        .map(|r| ((r.family.as_str(), r.cell.as_str()), r.value))
        .collect();
    let mut rep = RegressionReport::default();
    for r in current {
        let fam = r.family.as_str();
        let Some(&f) = map.get(&(fam, r.cell.as_str())) else {
            rep.unfrozen += 1;
            continue;
        };
        rep.checked += 1;
        let same =
            r.value == f || (f != 0.0 && r.value.is_finite() && (r.value / f - 1.0).abs() <= tol);
        let under_k = map
            .get(&(fam, MAX_CELL))
            .map_or(true, |&k| r.value <= k * (1.0 + tol));
        if !(same && under_k) {
            rep.drifts.push(Drift {
                family: r.family.clone(),
                cell: r.cell.clone(),
                frozen: f,
                current: r.value,
                above_k: !under_k,
            });
        }
    }
    rep
}

/// Functions of each bound family in the reference run.
pub const SHIU_FUNCTIONS: &[&str] = &["one", "tau", "tau:d=3", "tau:d=2,R=2"];
pub const MAIN_FUNCTIONS: &[&str] = &["synthetic:c=1,beta=0.001", "tau"];
pub const SMOOTH_FUNCTIONS: &[&str] = &["smooth", "smooth_tau"];
pub const RANKIN_FUNCTIONS: &[&str] = &["one", "tau"];
pub const ROUGH_Z: &[f64] = &[10.0, 30.0, 100.0];

/// The reference run: every family over the grid of `cfg` (its theorem
/// and function are ignored).
pub fn freeze_suite(cfg: &RunConfig) -> Result<Vec<(String, Report)>> {
    cfg.validate()?;
    let grid_res = Resources::for_grid(cfg)?;
    let mut out = Vec::new();
    let families: [(TheoremTag, &[&str]); 4] = [
        (TheoremTag::Shiu, SHIU_FUNCTIONS),
        (TheoremTag::Main, MAIN_FUNCTIONS),
        (TheoremTag::MnThm2C1, SMOOTH_FUNCTIONS),
        (TheoremTag::MnThm2C2, SMOOTH_FUNCTIONS),
    ];
    for (theorem, fs) in families {
        for f in fs {
            let c = RunConfig {
                theorem,
                f: f.to_string(),
                ..cfg.clone()
            };
            out.push((format!("verify-{theorem}-{f}"), run_verify(&c, &grid_res)?));
        }
    }
    out.push(("rough".into(), run_rough(cfg, &grid_res, ROUGH_Z)?));
    drop(grid_res);
    let rankin_primes = crate::arith::PrimeTable::new(RANKIN_PRIME_LIMIT)?;
    out.push((
        "rankin".into(),
        run_rankin(
            cfg,
            &rankin_primes,
            RANKIN_FUNCTIONS,
            &default_rankin_grid(),
        )?,
    ));
    Ok(out)
}

pub fn all_ratios(reports: &[(String, Report)]) -> Vec<Ratio> {
    let mut v: Vec<Ratio> = reports.iter().flat_map(|(_, r)| r.ratios.clone()).collect();
    v.sort_by(|a, b| (&a.family, &a.cell).cmp(&(&b.family, &b.cell)));
    v
}
