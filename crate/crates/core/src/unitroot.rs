//! Augmented Dickey–Fuller and Phillips–Perron unit-root tests, and the
//! level-then-difference integration-order protocol.
//!
//! Both tests are left-tailed: the unit-root null is rejected (series judged
//! stationary) when the statistic lies below the critical value.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataio::{difference, TimeSeries};
use crate::error::{Error, Result};
use crate::linreg::{default_bandwidth, newey_west_lrv, ols, DesignMatrix, RegressionResult, Significance};
use crate::tables::tables;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeterministicSpec {
    None,
    Constant,
    ConstantAndTrend,
}

impl DeterministicSpec {
    pub fn label(self) -> &'static str {
        match self {
            DeterministicSpec::None => "none",
            DeterministicSpec::Constant => "constant",
            DeterministicSpec::ConstantAndTrend => "constant and trend",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UnitRootTest {
    #[serde(rename = "ADF")]
    Adf,
    #[serde(rename = "PP")]
    Pp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LagRule {
    #[default]
    Aic,
    Sbc,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stationary,
    UnitRoot,
}

pub const TREND: &str = "@TREND";

#[derive(Debug, Clone, Serialize)]
pub struct UnitRootResult {
    pub test: UnitRootTest,
    pub spec: DeterministicSpec,
    /// Augmentation lags (ADF) or Newey–West bandwidth (PP).
    pub lag_or_bandwidth: usize,
    pub statistic: f64,
    pub critical_values: BTreeMap<Significance, f64>,
    pub verdict_at: BTreeMap<Significance, Verdict>,
    pub selection_rule: LagRule,
    pub nobs: usize,
    /// The test regression actually used for the statistic.
    #[serde(skip)]
    pub regression: RegressionResult,
}

impl UnitRootResult {
    pub fn stationary_at(&self, level: Significance) -> bool {
        self.verdict_at.get(&level) == Some(&Verdict::Stationary)
    }
}

/// Left-tail decision rule: stationary iff `statistic < cv`.
pub fn verdicts(statistic: f64, critical_values: &BTreeMap<Significance, f64>) -> BTreeMap<Significance, Verdict> {
    critical_values
        .iter()
        .map(|(&lvl, &cv)| {
            let v = if statistic < cv {
                Verdict::Stationary
            } else {
                Verdict::UnitRoot
            };
            (lvl, v)
        })
        .collect()
}

/// `floor(12 (T/100)^(1/4))`, capped so the test regression stays estimable.
pub fn default_max_lag(t: usize) -> usize {
    let rule = (12.0 * (t as f64 / 100.0).powf(0.25)).floor() as usize;
    rule.min(t.saturating_sub(10)).min(t.saturating_sub(5) / 2)
}

fn ensure_varies(y: &[f64], name: &str) -> Result<()> {
    if y.windows(2).all(|w| w[1] == w[0]) {
        return Err(Error::RankDeficient {
            columns: vec![format!("D({name})")],
        });
    }
    Ok(())
}

fn push_deterministics(d: &mut DesignMatrix, spec: DeterministicSpec) -> Result<()> {
    let n = d.n();
    if spec != DeterministicSpec::None {
        d.push_constant()?;
    }
    if spec == DeterministicSpec::ConstantAndTrend {
        d.push(TREND, (1..=n).map(|t| t as f64).collect())?;
    }
    Ok(())
}

/// Lag-augmented Dickey–Fuller regression for lag `k` on observations
/// `t = start..T` (indices into `y`), `start >= k + 1`.
fn adf_regression(y: &[f64], name: &str, spec: DeterministicSpec, k: usize, start: usize) -> Result<RegressionResult> {
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    // dy[t - 1] = y[t] - y[t - 1]
    let rows: Vec<usize> = (start..y.len()).collect();
    let n = rows.len();
    let mut d = DesignMatrix::new(n);
    push_deterministics(&mut d, spec)?;
    d.push(format!("{name}(-1)"), rows.iter().map(|&t| y[t - 1]).collect())?;
    for i in 1..=k {
        d.push(format!("D({name}(-{i}))"), rows.iter().map(|&t| dy[t - 1 - i]).collect())?;
    }
    let target: Vec<f64> = rows.iter().map(|&t| dy[t - 1]).collect();
    let fit = ols(&target, &d)?;
    if fit.is_perfect_fit() {
        return Err(Error::PerfectFitDegenerate);
    }
    Ok(fit)
}

/// ADF test. Lags `0..=max_lag` are compared on the common sample of the
/// largest lag; ties go to the smaller lag. `max_lag = None` uses
/// [`default_max_lag`].
pub fn adf_test(s: &TimeSeries, spec: DeterministicSpec, max_lag: Option<usize>, rule: LagRule) -> Result<UnitRootResult> {
    adf_test_values(s.values(), s.name(), spec, max_lag, rule)
}

pub fn adf_test_values(
    y: &[f64],
    name: &str,
    spec: DeterministicSpec,
    max_lag: Option<usize>,
    rule: LagRule,
) -> Result<UnitRootResult> {
    let t = y.len();
    let max_lag = max_lag.unwrap_or_else(|| default_max_lag(t));
    if t < max_lag + 10 {
        return Err(Error::SampleTooShort(format!(
            "ADF with max lag {max_lag} needs at least {} observations, got {t}",
            max_lag + 10
        )));
    }
    ensure_varies(y, name)?;
    let start = max_lag + 1;
    let (lag, fit) = match rule {
        LagRule::Fixed => (max_lag, adf_regression(y, name, spec, max_lag, start)?),
        LagRule::Aic | LagRule::Sbc => {
            let mut best: Option<(usize, f64, RegressionResult)> = None;
            for k in 0..=max_lag {
                let fit = adf_regression(y, name, spec, k, start)?;
                let score = if rule == LagRule::Aic { fit.aic } else { fit.sbc };
                if best.as_ref().is_none_or(|b| score < b.1) {
                    best = Some((k, score, fit));
                }
            }
            let (k, _, fit) = best.expect("at least lag 0");
            (k, fit)
        }
    };
    let statistic = fit.t_stat(&format!("{name}(-1)"))?;
    finish(UnitRootTest::Adf, spec, lag, statistic, rule, fit)
}

fn finish(
    test: UnitRootTest,
    spec: DeterministicSpec,
    lag_or_bandwidth: usize,
    statistic: f64,
    rule: LagRule,
    regression: RegressionResult,
) -> Result<UnitRootResult> {
    let critical_values = tables()?.tau_all(spec, regression.n)?;
    let verdict_at = verdicts(statistic, &critical_values);
    Ok(UnitRootResult {
        test,
        spec,
        lag_or_bandwidth,
        statistic,
        critical_values,
        verdict_at,
        selection_rule: rule,
        nobs: regression.n,
        regression,
    })
}

/// Phillips–Perron Z_t test with a Bartlett-kernel long-run variance.
/// `bandwidth = None` uses [`default_bandwidth`] of the regression sample.
pub fn pp_test(s: &TimeSeries, spec: DeterministicSpec, bandwidth: Option<usize>) -> Result<UnitRootResult> {
    pp_test_values(s.values(), s.name(), spec, bandwidth)
}

pub fn pp_test_values(y: &[f64], name: &str, spec: DeterministicSpec, bandwidth: Option<usize>) -> Result<UnitRootResult> {
    let t = y.len();
    if t < 15 {
        return Err(Error::SampleTooShort(format!(
            "Phillips-Perron needs at least 15 observations, got {t}"
        )));
    }
    ensure_varies(y, name)?;
    let fit = adf_regression(y, name, spec, 0, 1)?;
    let n = fit.n;
    let bw = bandwidth.unwrap_or_else(|| default_bandwidth(n));
    let level = format!("{name}(-1)");
    let t_ratio = fit.t_stat(&level)?;
    let se = fit.std_error(&level)?;
    let gamma0 = newey_west_lrv(&fit.residuals, 0)?;
    let lrv = newey_west_lrv(&fit.residuals, bw)?;
    if lrv <= 0.0 {
        return Err(Error::PerfectFitDegenerate);
    }
    let lambda = lrv.sqrt();
    let s = fit.sigma2.sqrt();
    let statistic = (gamma0 / lrv).sqrt() * t_ratio - 0.5 * (lrv - gamma0) / lambda * (n as f64 * se / s);
    finish(UnitRootTest::Pp, spec, bw, statistic, LagRule::Fixed, fit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegrationOrder {
    I0,
    I1,
    /// Not stationary after one difference.
    Higher,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    pub test: UnitRootTest,
    pub spec: DeterministicSpec,
    pub alpha: Significance,
    pub max_lag: Option<usize>,
    pub rule: LagRule,
    pub bandwidth: Option<usize>,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            test: UnitRootTest::Adf,
            spec: DeterministicSpec::Constant,
            alpha: Significance::Five,
            max_lag: None,
            rule: LagRule::Aic,
            bandwidth: None,
        }
    }
}

impl ClassifyConfig {
    pub fn run(&self, s: &TimeSeries) -> Result<UnitRootResult> {
        match self.test {
            UnitRootTest::Adf => adf_test(s, self.spec, self.max_lag, self.rule),
            UnitRootTest::Pp => pp_test(s, self.spec, self.bandwidth),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Integration {
    pub series: String,
    pub order: IntegrationOrder,
    pub level: UnitRootResult,
    pub first_difference: UnitRootResult,
}

/// Tests the level and the first difference with the same test and spec.
pub fn classify_integration(s: &TimeSeries, cfg: &ClassifyConfig) -> Result<Integration> {
    let level = cfg.run(s)?;
    let first_difference = cfg.run(&difference(s, 1)?)?;
    let order = if level.stationary_at(cfg.alpha) {
        IntegrationOrder::I0
    } else if first_difference.stationary_at(cfg.alpha) {
        IntegrationOrder::I1
    } else {
        IntegrationOrder::Higher
    };
    Ok(Integration {
        series: s.name().to_string(),
        order,
        level,
        first_difference,
    })
}
