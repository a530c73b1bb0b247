//! Residual diagnostics and recursive stability tests for a fitted regression.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linreg::{
    ols, wald_f_test, DesignMatrix, Distribution, RegressionResult, Significance, TestStatistic, WaldContext,
    CONSTANT, RANK_TOLERANCE,
};
use crate::tables::tables;

/// Breusch–Godfrey LM test for serial correlation up to `lags`.
/// Pre-sample residual lags are zero.
pub fn breusch_godfrey(rr: &RegressionResult, lags: usize) -> Result<TestStatistic> {
    if lags == 0 {
        return Err(Error::InvalidParameters("Breusch-Godfrey needs at least one lag".into()));
    }
    let e = &rr.residuals;
    let n = e.len();
    if n <= rr.k + lags {
        return Err(Error::SampleTooShort(format!(
            "Breusch-Godfrey with {lags} lags and {} regressors needs more than {} observations",
            rr.k,
            rr.k + lags
        )));
    }
    let ee: f64 = e.iter().map(|v| v * v).sum();
    if ee == 0.0 {
        return Err(Error::AllZeroResiduals);
    }
    let mut aux = rr.design.clone();
    for j in 1..=lags {
        let col = (0..n).map(|t| if t >= j { e[t - j] } else { 0.0 }).collect();
        aux.push(format!("RESID(-{j})"), col)?;
    }
    let fit = ols(e, &aux)?;
    let lm = (n as f64 * (1.0 - fit.rss / ee)).max(0.0);
    Ok(TestStatistic::new(
        format!("Breusch-Godfrey LM({lags})"),
        lm,
        Distribution::ChiSquared { df: lags as f64 },
    ))
}

/// Ramsey RESET: adds powers of the (rescaled) fitted values and F-tests them.
pub fn ramsey_reset(rr: &RegressionResult, powers: &[u32]) -> Result<TestStatistic> {
    if powers.is_empty() || powers.iter().any(|p| !(2..=4).contains(p)) {
        return Err(Error::InvalidParameters("RESET powers must be a non-empty subset of {2, 3, 4}".into()));
    }
    let mut powers = powers.to_vec();
    powers.sort_unstable();
    powers.dedup();
    let scale = rr.fitted.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (lo, hi) = rr
        .fitted
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if scale == 0.0 || hi - lo <= 1e-12 * scale {
        return Err(Error::ConstantFitted);
    }
    if rr.is_perfect_fit() {
        return Err(Error::PerfectFitDegenerate);
    }
    let mut aux = rr.design.clone();
    let mut names = Vec::new();
    for &p in &powers {
        let name = format!("FITTED^{p}");
        aux.push(name.clone(), rr.fitted.iter().map(|v| (v / scale).powi(p as i32)).collect())?;
        names.push(name);
    }
    let fit = ols(&rr.y, &aux).map_err(|e| match e {
        Error::RankDeficient { .. } => Error::ConstantFitted,
        other => other,
    })?;
    let wald = wald_f_test(&fit, &names, WaldContext::Standard)?;
    Ok(TestStatistic::new(
        format!("Ramsey RESET F({})", names.len()),
        wald.statistic,
        wald.distribution,
    ))
}

/// Jarque–Bera normality test with divisor-`n` moments.
pub fn jarque_bera(residuals: &[f64]) -> Result<TestStatistic> {
    let n = residuals.len();
    if n < 4 {
        return Err(Error::SampleTooShort(format!("Jarque-Bera needs at least 4 values, got {n}")));
    }
    let nf = n as f64;
    let mean = residuals.iter().sum::<f64>() / nf;
    let moment = |p: i32| residuals.iter().map(|v| (v - mean).powi(p)).sum::<f64>() / nf;
    let m2 = moment(2);
    if m2 <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let skew = moment(3) / m2.powf(1.5);
    let kurt = moment(4) / (m2 * m2);
    let jb = nf / 6.0 * (skew * skew + (kurt - 3.0).powi(2) / 4.0);
    Ok(TestStatistic::new("Jarque-Bera", jb, Distribution::ChiSquared { df: 2.0 }))
}

/// Breusch–Pagan–Godfrey LM: `n R²` from regressing squared residuals on
/// the model's regressors (plus a constant if absent).
pub fn breusch_pagan(rr: &RegressionResult) -> Result<TestStatistic> {
    let e2: Vec<f64> = rr.residuals.iter().map(|e| e * e).collect();
    let n = e2.len();
    let mut aux = rr.design.clone();
    if !aux.has_constant() {
        let mut with_c = DesignMatrix::new(n);
        with_c.push_constant()?;
        for (name, col) in aux.names().iter().zip(aux.columns()) {
            with_c.push(name.clone(), col.clone())?;
        }
        aux = with_c;
    }
    let df = aux.names().iter().filter(|n| n.as_str() != CONSTANT).count();
    if df == 0 {
        return Err(Error::InvalidParameters("Breusch-Pagan needs at least one non-constant regressor".into()));
    }
    let mean = e2.iter().sum::<f64>() / n as f64;
    let tss: f64 = e2.iter().map(|v| (v - mean).powi(2)).sum();
    let lm = if tss <= 1e-24 * mean.abs().max(f64::MIN_POSITIVE) * n as f64 {
        0.0
    } else {
        let fit = ols(&e2, &aux)?;
        (n as f64 * (1.0 - fit.rss / tss)).max(0.0)
    };
    Ok(TestStatistic::new(
        "Breusch-Pagan-Godfrey LM",
        lm,
        Distribution::ChiSquared { df: df as f64 },
    ))
}

fn design_matrix(d: &DesignMatrix, rows: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, d.k(), |i, j| d.columns()[j][i])
}

/// Standardized one-step-ahead prediction errors `w_{k+1..n}`.
pub fn recursive_residuals(y: &[f64], x: &DesignMatrix) -> Result<Vec<f64>> {
    let (n, k) = (x.n(), x.k());
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!("y has {} rows, design has {n}", y.len())));
    }
    if n <= k + 2 {
        return Err(Error::SampleTooShort(format!(
            "recursive residuals need more than {} observations, got {n}",
            k + 2
        )));
    }
    let full = design_matrix(x, n);
    let yv = DVector::from_column_slice(y);
    let mut out = Vec::with_capacity(n - k);
    for r in k..n {
        let qr = full.rows(0, r).clone_owned().qr();
        let rmat = qr.r();
        let norm = (0..k).map(|j| full.rows(0, r).column(j).norm()).fold(0.0, f64::max);
        if (0..k).any(|j| rmat[(j, j)].abs() <= RANK_TOLERANCE * norm.max(f64::MIN_POSITIVE)) {
            return Err(Error::RankDeficientPrefix { k: r });
        }
        let qty = qr.q().transpose() * yv.rows(0, r);
        let beta = rmat.solve_upper_triangular(&qty).ok_or(Error::RankDeficientPrefix { k: r })?;
        let xr = full.row(r).transpose();
        let z = rmat
            .transpose()
            .solve_lower_triangular(&xr)
            .ok_or(Error::RankDeficientPrefix { k: r })?;
        let err = y[r] - xr.dot(&beta);
        out.push(err / (1.0 + z.norm_squared()).sqrt());
    }
    Ok(out)
}

/// Brown–Durbin–Evans 5% coefficient of the CUSUM boundary lines.
pub const CUSUM_A: f64 = 0.948;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityResult {
    pub name: String,
    /// Recursion steps `k+1..n`, 1-based.
    pub steps: Vec<usize>,
    pub path: Vec<f64>,
    pub lower_bound: Vec<f64>,
    pub upper_bound: Vec<f64>,
    pub stable: bool,
}

impl StabilityResult {
    fn new(name: &str, steps: Vec<usize>, path: Vec<f64>, lower_bound: Vec<f64>, upper_bound: Vec<f64>) -> Self {
        let stable = path
            .iter()
            .zip(lower_bound.iter().zip(&upper_bound))
            .all(|(p, (lo, hi))| *lo <= *p && *p <= *hi);
        StabilityResult {
            name: name.to_string(),
            steps,
            path,
            lower_bound,
            upper_bound,
            stable,
        }
    }

    /// First step outside the band.
    pub fn first_crossing(&self) -> Option<usize> {
        self.path
            .iter()
            .zip(self.lower_bound.iter().zip(&self.upper_bound))
            .position(|(p, (lo, hi))| p < lo || p > hi)
            .map(|i| self.steps[i])
    }
}

fn recursive(rr: &RegressionResult) -> Result<(Vec<f64>, usize, usize)> {
    let w = recursive_residuals(&rr.y, &rr.design)?;
    Ok((w, rr.n, rr.k))
}

pub fn cusum(rr: &RegressionResult) -> Result<StabilityResult> {
    let (w, n, k) = recursive(rr)?;
    let m = (n - k) as f64;
    let sigma = (w.iter().map(|v| v * v).sum::<f64>() / m).sqrt();
    if sigma == 0.0 {
        return Err(Error::AllZeroResiduals);
    }
    let steps: Vec<usize> = (k + 1..=n).collect();
    let path: Vec<f64> = w
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v / sigma;
            Some(*acc)
        })
        .collect();
    let upper: Vec<f64> = steps
        .iter()
        .map(|&t| CUSUM_A * (m.sqrt() + 2.0 * (t - k) as f64 / m.sqrt()))
        .collect();
    let lower = upper.iter().map(|v| -v).collect();
    Ok(StabilityResult::new("CUSUM", steps, path, lower, upper))
}

pub fn cusumsq(rr: &RegressionResult) -> Result<StabilityResult> {
    let (w, n, k) = recursive(rr)?;
    let total: f64 = w.iter().map(|v| v * v).sum();
    if total == 0.0 {
        return Err(Error::AllZeroResiduals);
    }
    let m = n - k;
    let c0 = tables()?.cusumsq_c0(m)?;
    let steps: Vec<usize> = (k + 1..=n).collect();
    let path: Vec<f64> = w
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v * v;
            Some(*acc / total)
        })
        .collect();
    let centre: Vec<f64> = steps.iter().map(|&t| (t - k) as f64 / m as f64).collect();
    let lower = centre.iter().map(|c| c - c0).collect();
    let upper = centre.iter().map(|c| c + c0).collect();
    Ok(StabilityResult::new("CUSUM of squares", steps, path, lower, upper))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsConfig {
    pub serial_lags: usize,
    pub reset_powers: Vec<u32>,
    pub alpha: Significance,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            serial_lags: 2,
            reset_powers: vec![2],
            alpha: Significance::Five,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticsVerdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub serial_correlation: TestStatistic,
    pub functional_form: TestStatistic,
    pub normality: TestStatistic,
    pub heteroscedasticity: TestStatistic,
    pub cusum: StabilityResult,
    pub cusumsq: StabilityResult,
    pub alpha: Significance,
    pub verdict: DiagnosticsVerdict,
}

impl DiagnosticsReport {
    pub fn tests(&self) -> [&TestStatistic; 4] {
        [
            &self.serial_correlation,
            &self.functional_form,
            &self.normality,
            &self.heteroscedasticity,
        ]
    }
}

pub fn run_diagnostics(rr: &RegressionResult, cfg: &DiagnosticsConfig) -> Result<DiagnosticsReport> {
    let ((serial, reset), (normality, (hetero, (cs, csq)))) = rayon::join(
        || (breusch_godfrey(rr, cfg.serial_lags), ramsey_reset(rr, &cfg.reset_powers)),
        || {
            rayon::join(
                || jarque_bera(&rr.residuals),
                || rayon::join(|| breusch_pagan(rr), || rayon::join(|| cusum(rr), || cusumsq(rr))),
            )
        },
    );
    let (serial, reset, normality, hetero, cs, csq) = (serial?, reset?, normality?, hetero?, cs?, csq?);
    let rejects = [&serial, &reset, &normality, &hetero].iter().any(|t| t.rejects_at(cfg.alpha));
    let verdict = if rejects || !cs.stable || !csq.stable {
        DiagnosticsVerdict::Fail
    } else {
        DiagnosticsVerdict::Pass
    };
    Ok(DiagnosticsReport {
        serial_correlation: serial,
        functional_form: reset,
        normality,
        heteroscedasticity: hetero,
        cusum: cs,
        cusumsq: csq,
        alpha: cfg.alpha,
        verdict,
    })
}
