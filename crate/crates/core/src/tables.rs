//! Critical-value tables shipped as plain-text data files.
//!
//! Each file is whitespace-separated with `#` comments and carries a
//! `# version: N` line. The copies under `data/` are compiled in; setting
//! `ARDLKIT_DATA_DIR` makes the loader read same-named files from that
//! directory instead. Tables are parsed once, on first use.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linreg::Significance;
use crate::unitroot::DeterministicSpec;

pub const DATA_DIR_ENV: &str = "ARDLKIT_DATA_DIR";
pub const SUPPORTED_VERSION: u32 = 1;

const MACKINNON_FILE: &str = "mackinnon_tau.txt";
const BOUNDS_FILE: &str = "bounds_f.txt";
const CUSUMSQ_FILE: &str = "cusumsq_c0.txt";

const MACKINNON_EMBEDDED: &str = include_str!("../data/mackinnon_tau.txt");
const BOUNDS_EMBEDDED: &str = include_str!("../data/bounds_f.txt");
const CUSUMSQ_EMBEDDED: &str = include_str!("../data/cusumsq_c0.txt");

/// Deterministic case of the bounds test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BoundsCase {
    /// Restricted intercept, no trend: the constant enters the tested restriction.
    #[serde(rename = "II")]
    RestrictedConstant,
    /// Unrestricted intercept, no trend.
    #[serde(rename = "III")]
    UnrestrictedConstant,
}

impl std::fmt::Display for BoundsCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundsCase::RestrictedConstant => "II",
            BoundsCase::UnrestrictedConstant => "III",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone)]
pub struct CriticalTables {
    tau: BTreeMap<(DeterministicSpec, Significance), [f64; 4]>,
    bounds: BTreeMap<(BoundsCase, usize, Significance), Bounds>,
    cusumsq: Vec<(usize, f64)>,
}

impl CriticalTables {
    pub fn from_sources(mackinnon: &str, bounds: &str, cusumsq: &str) -> Result<CriticalTables> {
        Ok(CriticalTables {
            tau: parse_tau(mackinnon)?,
            bounds: parse_bounds(bounds)?,
            cusumsq: parse_cusumsq(cusumsq)?,
        })
    }

    pub fn embedded() -> CriticalTables {
        CriticalTables::from_sources(MACKINNON_EMBEDDED, BOUNDS_EMBEDDED, CUSUMSQ_EMBEDDED)
            .expect("embedded tables parse")
    }

    pub fn from_dir(dir: &Path) -> Result<CriticalTables> {
        let read = |name: &str| {
            std::fs::read_to_string(dir.join(name)).map_err(|e| Error::Table {
                file: dir.join(name).display().to_string(),
                message: e.to_string(),
            })
        };
        CriticalTables::from_sources(&read(MACKINNON_FILE)?, &read(BOUNDS_FILE)?, &read(CUSUMSQ_FILE)?)
    }

    /// Dickey–Fuller tau critical value for a regression with `nobs` observations.
    pub fn tau(&self, spec: DeterministicSpec, level: Significance, nobs: usize) -> Result<f64> {
        let b = self
            .tau
            .get(&(spec, level))
            .ok_or_else(|| Error::MissingCriticalValues(format!("tau {spec:?} at {level}")))?;
        let t = nobs as f64;
        Ok(b[0] + b[1] / t + b[2] / (t * t) + b[3] / (t * t * t))
    }

    pub fn tau_all(&self, spec: DeterministicSpec, nobs: usize) -> Result<BTreeMap<Significance, f64>> {
        Significance::ALL
            .iter()
            .map(|&l| Ok((l, self.tau(spec, l, nobs)?)))
            .collect()
    }

    pub fn bounds(&self, case: BoundsCase, k: usize, level: Significance) -> Result<Bounds> {
        self.bounds.get(&(case, k, level)).copied().ok_or_else(|| {
            Error::MissingCriticalValues(format!("bounds case {case} with k = {k} at {level}"))
        })
    }

    /// c₀ for `m` recursive residuals at the 5% level.
    pub fn cusumsq_c0(&self, m: usize) -> Result<f64> {
        let first = self.cusumsq.first().expect("non-empty table");
        let last = self.cusumsq.last().expect("non-empty table");
        if m < first.0 {
            return Err(Error::MissingCriticalValues(format!("CUSUMSQ with m = {m}")));
        }
        let scaled = |(mm, c): (usize, f64)| c * (mm as f64).sqrt();
        let s = if m >= last.0 {
            scaled(*last)
        } else {
            let hi = self.cusumsq.iter().position(|(mm, _)| *mm >= m).unwrap();
            let (a, b) = (self.cusumsq[hi.saturating_sub(1)], self.cusumsq[hi]);
            if b.0 == m || hi == 0 {
                scaled(b)
            } else {
                let w = (m - a.0) as f64 / (b.0 - a.0) as f64;
                scaled(a) + w * (scaled(b) - scaled(a))
            }
        };
        Ok(s / (m as f64).sqrt())
    }
}

static TABLES: OnceLock<std::result::Result<CriticalTables, (String, String)>> = OnceLock::new();

/// Process-wide tables, honouring `ARDLKIT_DATA_DIR`.
pub fn tables() -> Result<&'static CriticalTables> {
    let loaded = TABLES.get_or_init(|| match std::env::var_os(DATA_DIR_ENV) {
        Some(dir) => CriticalTables::from_dir(Path::new(&dir)).map_err(|e| match e {
            Error::Table { file, message } => (file, message),
            other => (dir.to_string_lossy().into_owned(), other.to_string()),
        }),
        None => Ok(CriticalTables::embedded()),
    });
    loaded.as_ref().map_err(|(file, message)| Error::Table {
        file: file.clone(),
        message: message.clone(),
    })
}

fn data_lines<'a>(file: &'a str, src: &'a str) -> Result<impl Iterator<Item = (usize, Vec<&'a str>)>> {
    let version = src
        .lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .filter_map(|l| l.trim().strip_prefix("version:"))
        .map(|v| v.trim().parse::<u32>())
        .next();
    match version {
        Some(Ok(SUPPORTED_VERSION)) => {}
        Some(Ok(v)) => {
            return Err(Error::Table {
                file: file.into(),
                message: format!("unsupported version {v}"),
            })
        }
        _ => {
            return Err(Error::Table {
                file: file.into(),
                message: "missing `# version:` line".into(),
            })
        }
    }
    Ok(src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split_whitespace().collect())))
}

fn bad_line(file: &str, line: usize, why: &str) -> Error {
    Error::Table {
        file: file.into(),
        message: format!("line {line}: {why}"),
    }
}

fn num(file: &str, line: usize, s: &str) -> Result<f64> {
    s.parse().map_err(|_| bad_line(file, line, &format!("`{s}` is not a number")))
}

fn level(file: &str, line: usize, s: &str) -> Result<Significance> {
    match s {
        "1%" => Ok(Significance::One),
        "5%" => Ok(Significance::Five),
        "10%" => Ok(Significance::Ten),
        _ => Err(bad_line(file, line, &format!("unknown level `{s}`"))),
    }
}

fn parse_tau(src: &str) -> Result<BTreeMap<(DeterministicSpec, Significance), [f64; 4]>> {
    let f = MACKINNON_FILE;
    let mut out = BTreeMap::new();
    for (line, cols) in data_lines(f, src)? {
        if cols.len() != 6 {
            return Err(bad_line(f, line, "expected 6 columns"));
        }
        let spec = match cols[0] {
            "none" => DeterministicSpec::None,
            "constant" => DeterministicSpec::Constant,
            "constant_and_trend" => DeterministicSpec::ConstantAndTrend,
            other => return Err(bad_line(f, line, &format!("unknown spec `{other}`"))),
        };
        let lvl = level(f, line, cols[1])?;
        let mut b = [0.0; 4];
        for (i, c) in cols[2..].iter().enumerate() {
            b[i] = num(f, line, c)?;
        }
        out.insert((spec, lvl), b);
    }
    Ok(out)
}

fn parse_bounds(src: &str) -> Result<BTreeMap<(BoundsCase, usize, Significance), Bounds>> {
    let f = BOUNDS_FILE;
    let mut out = BTreeMap::new();
    for (line, cols) in data_lines(f, src)? {
        if cols.len() != 5 {
            return Err(bad_line(f, line, "expected 5 columns"));
        }
        let case = match cols[0] {
            "II" => BoundsCase::RestrictedConstant,
            "III" => BoundsCase::UnrestrictedConstant,
            other => return Err(bad_line(f, line, &format!("unknown case `{other}`"))),
        };
        let k: usize = cols[1]
            .parse()
            .map_err(|_| bad_line(f, line, "k must be an integer"))?;
        let lvl = level(f, line, cols[2])?;
        let (lower, upper) = (num(f, line, cols[3])?, num(f, line, cols[4])?);
        if lower > upper {
            return Err(bad_line(f, line, "lower bound exceeds upper bound"));
        }
        out.insert((case, k, lvl), Bounds { lower, upper });
    }
    Ok(out)
}

fn parse_cusumsq(src: &str) -> Result<Vec<(usize, f64)>> {
    let f = CUSUMSQ_FILE;
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (line, cols) in data_lines(f, src)? {
        if cols.len() != 2 {
            return Err(bad_line(f, line, "expected 2 columns"));
        }
        let m: usize = cols[0]
            .parse()
            .map_err(|_| bad_line(f, line, "m must be an integer"))?;
        if out.last().is_some_and(|(prev, _)| *prev >= m) {
            return Err(bad_line(f, line, "m must increase"));
        }
        out.push((m, num(f, line, cols[1])?));
    }
    if out.is_empty() {
        return Err(Error::Table {
            file: f.into(),
            message: "no rows".into(),
        });
    }
    Ok(out)
}
