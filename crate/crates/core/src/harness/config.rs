//! Run configuration: a `key = value` file merged under command-line flags.
//!
//! ```text
//! # comment
//! x_grid = 1e4, 1e5, 1e6
//! y_pow = 0.6
//! k = 1, 3, 4, 7
//! a = all            # or a list such as 1, 2
//! f = tau:d=3
//! alpha = 0.25
//! kappa = 0.25
//! eps = 0.1
//! eps0 = 0.1
//! beta = 0.001       # defaults to the function's own beta
//! q_pow = 0.3333     # Q = x^q_pow
//! theorem = shiu
//! d = 2
//! r = 2              # or paper, or paper:<fallback R>
//! y_rule = pow       # pow | sound:B | goudout:h
//! out = report.csv
//! freeze = false
//! constants = constants.csv
//! ```

use std::path::{Path, PathBuf};

use crate::bounds::TheoremTag;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum ResidueRule {
    /// Every `a` in `[0, k)` coprime to `k`.
    AllCoprime,
    List(Vec<u64>),
}

/// Exponent `R` of the divisor-power runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RMode {
    Explicit(f64),
    /// `R = log log log x / log log log log x`, recomputed per `x`; rows
    /// where an iterated logarithm is nonpositive use `fallback`.
    Paper {
        fallback: f64,
    },
}

/// Interval length for the smooth short-interval runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum YRule {
    /// `y = x^y_pow`
    Pow,
    /// `y = B u x^(1/2) / rho(u/2)`
    Sound { b: f64 },
    /// `y = h x^(1/2)`
    Goudout { h: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub theorem: TheoremTag,
    pub x_grid: Vec<u64>,
    pub y_pow: f64,
    pub y_rule: YRule,
    pub k: Vec<u64>,
    pub a: ResidueRule,
    pub f: String,
    pub eps: f64,
    pub eps0: f64,
    pub beta: Option<f64>,
    pub alpha: f64,
    pub kappa: f64,
    pub q_pow: Option<f64>,
    pub d: u32,
    pub r: RMode,
    pub out: Option<PathBuf>,
    pub freeze: bool,
    pub constants: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            theorem: TheoremTag::Shiu,
            x_grid: vec![10_000, 100_000, 1_000_000, 10_000_000, 100_000_000],
            y_pow: 0.6,
            y_rule: YRule::Pow,
            k: vec![1, 3, 4, 7],
            a: ResidueRule::AllCoprime,
            f: "one".into(),
            eps: 0.1,
            eps0: 0.1,
            beta: None,
            alpha: 0.25,
            kappa: 0.25,
            q_pow: None,
            d: 2,
            r: RMode::Explicit(2.0),
            out: None,
            freeze: false,
            constants: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "theorem",
    "x_grid",
    "y_pow",
    "y_rule",
    "k",
    "a",
    "f",
    "eps",
    "eps0",
    "beta",
    "alpha",
    "kappa",
    "q_pow",
    "d",
    "r",
    "out",
    "freeze",
    "constants",
];

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("bad value for {key}: {value:?}"))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim().parse::<f64>().map_err(|_| bad(key, v))
}

/// Integers may be written in float notation (`1e6`).
fn parse_u64(key: &str, v: &str) -> Result<u64> {
    let v = v.trim();
    if let Ok(n) = v.parse::<u64>() {
        return Ok(n);
    }
    let x = v.parse::<f64>().map_err(|_| bad(key, v))?;
    if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 {
        Ok(x as u64)
    } else {
        Err(bad(key, v))
    }
}

fn parse_list(key: &str, v: &str) -> Result<Vec<u64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_u64(key, s))
        .collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, v)),
    }
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "theorem" => self.theorem = TheoremTag::parse(v)?,
            "x_grid" => self.x_grid = parse_list(key, v)?,
            "y_pow" => self.y_pow = parse_f64(key, v)?,
            "y_rule" => {
                self.y_rule = match v.split_once(':') {
                    None if v == "pow" => YRule::Pow,
                    Some(("sound", b)) => YRule::Sound {
                        b: parse_f64(key, b)?,
                    },
                    Some(("goudout", h)) => YRule::Goudout {
                        h: parse_f64(key, h)?,
                    },
                    _ => return Err(bad(key, v)),
                }
            }
            "k" => self.k = parse_list(key, v)?,
            "a" => {
                self.a = if v == "all" {
                    ResidueRule::AllCoprime
                } else {
                    ResidueRule::List(parse_list(key, v)?)
                }
            }
            "f" => self.f = v.to_string(),
            "eps" => self.eps = parse_f64(key, v)?,
            "eps0" => self.eps0 = parse_f64(key, v)?,
            "beta" => self.beta = Some(parse_f64(key, v)?),
            "alpha" => self.alpha = parse_f64(key, v)?,
            "kappa" => self.kappa = parse_f64(key, v)?,
            "q_pow" => self.q_pow = Some(parse_f64(key, v)?),
            "d" => self.d = v.parse().map_err(|_| bad(key, v))?,
            "r" => {
                self.r = if v == "paper" {
                    RMode::Paper { fallback: 2.0 }
                } else if let Some(fb) = v.strip_prefix("paper:") {
                    RMode::Paper {
                        fallback: parse_f64(key, fb)?,
                    }
                } else {
                    RMode::Explicit(parse_f64(key, v)?)
                }
            }
            "out" => self.out = Some(PathBuf::from(v)),
            "freeze" => self.freeze = parse_bool(key, v)?,
            "constants" => self.constants = Some(PathBuf::from(v)),
            other => {
                return Err(Error::Config(format!(
                    "unknown key {other:?}; expected one of {}",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies every setting of a config text; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected key = value, got {line:?}",
                    i + 1
                ))
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut c = RunConfig::default();
        c.apply_text(&text)?;
        Ok(c)
    }

    /// Checks ranges that would make every cell meaningless.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if !(self.y_pow > 0.0 && self.y_pow <= 1.0) {
            return fail(format!("y_pow must lie in (0, 1], got {}", self.y_pow));
        }
        if self.k.contains(&0) {
            return fail("k must be positive".into());
        }
        if !(self.eps > 0.0 && self.eps0 > 0.0) {
            return fail("eps and eps0 must be positive".into());
        }
        if let Some(q) = self.q_pow {
            if !(q > 0.0 && q <= 1.0) {
                return fail(format!("q_pow must lie in (0, 1], got {q}"));
            }
        }
        if self.d < 2 {
            return fail(format!("d must be at least 2, got {}", self.d));
        }
        let (RMode::Explicit(r) | RMode::Paper { fallback: r }) = self.r;
        if !(r >= 0.0) {
            return fail(format!("R must be nonnegative, got {r}"));
        }
        Ok(())
    }

    /// Residues for modulus `k`, in increasing order.
    pub fn residues(&self, k: u64) -> Vec<u64> {
        match &self.a {
            ResidueRule::AllCoprime => (0..k).filter(|&a| crate::arith::gcd(a, k) == 1).collect(),
            ResidueRule::List(v) => v.clone(),
        }
    }
}
