use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal, StudentsT};

/// The three conventional test sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Significance {
    #[serde(rename = "1%")]
    One,
    #[serde(rename = "5%")]
    Five,
    #[serde(rename = "10%")]
    Ten,
}

impl Significance {
    pub const ALL: [Significance; 3] = [Significance::One, Significance::Five, Significance::Ten];

    pub fn alpha(self) -> f64 {
        match self {
            Significance::One => 0.01,
            Significance::Five => 0.05,
            Significance::Ten => 0.10,
        }
    }

    /// Star count used in rendered tables: `***` 1%, `**` 5%, `*` 10%.
    pub fn stars(self) -> &'static str {
        match self {
            Significance::One => "***",
            Significance::Five => "**",
            Significance::Ten => "*",
        }
    }
}

impl fmt::Display for Significance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Significance::One => "1%",
            Significance::Five => "5%",
            Significance::Ten => "10%",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Reject,
    FailToReject,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Distribution {
    F { d1: f64, d2: f64 },
    ChiSquared { df: f64 },
    /// Two-sided.
    StudentT { df: f64 },
    /// Two-sided.
    Normal,
    /// Critical values come from a table; no p-value is reported.
    NonstandardTabulated,
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::F { d1, d2 } => write!(f, "F({d1}, {d2})"),
            Distribution::ChiSquared { df } => write!(f, "chi2({df})"),
            Distribution::StudentT { df } => write!(f, "t({df})"),
            Distribution::Normal => f.write_str("N(0,1)"),
            Distribution::NonstandardTabulated => f.write_str("nonstandard"),
        }
    }
}

impl Distribution {
    /// Upper-tail probability of `stat`, `None` for tabulated statistics.
    pub fn survival(&self, stat: f64) -> Option<f64> {
        if stat.is_nan() {
            return None;
        }
        let p = match *self {
            Distribution::F { d1, d2 } => {
                if stat <= 0.0 {
                    1.0
                } else {
                    FisherSnedecor::new(d1, d2).ok()?.sf(stat)
                }
            }
            Distribution::ChiSquared { df } => {
                if stat <= 0.0 {
                    1.0
                } else {
                    ChiSquared::new(df).ok()?.sf(stat)
                }
            }
            Distribution::StudentT { df } => 2.0 * StudentsT::new(0.0, 1.0, df).ok()?.sf(stat.abs()),
            Distribution::Normal => {
                let z = Normal::new(0.0, 1.0).ok()?;
                2.0 * z.sf(stat.abs())
            }
            Distribution::NonstandardTabulated => return None,
        };
        Some(p.clamp(0.0, 1.0))
    }
}

/// A test statistic with its reference distribution and decisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestStatistic {
    pub name: String,
    pub statistic: f64,
    pub distribution: Distribution,
    pub p_value: Option<f64>,
    pub decision_at: BTreeMap<Significance, Decision>,
}

impl TestStatistic {
    /// Fills the p-value and per-level decisions from the distribution.
    pub fn new(name: impl Into<String>, statistic: f64, distribution: Distribution) -> TestStatistic {
        let p_value = distribution.survival(statistic);
        let decision_at = match p_value {
            Some(p) => Significance::ALL
                .iter()
                .map(|&lvl| {
                    let d = if p < lvl.alpha() {
                        Decision::Reject
                    } else {
                        Decision::FailToReject
                    };
                    (lvl, d)
                })
                .collect(),
            None => BTreeMap::new(),
        };
        TestStatistic {
            name: name.into(),
            statistic,
            distribution,
            p_value,
            decision_at,
        }
    }

    pub fn rejects_at(&self, level: Significance) -> bool {
        self.decision_at.get(&level) == Some(&Decision::Reject)
    }
}
