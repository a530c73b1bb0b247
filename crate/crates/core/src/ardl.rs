//! ARDL lag selection, conditional error-correction estimation, the bounds
//! F-test, long-run coefficients and the two-step ECM.
//!
//! For a spec `(p, q)` the conditional ECM regresses `Δy_t` on a constant,
//! `Δy_{t-1..t-p+1}`, `Δx_{t..t-q+1}` and the levels `y_{t-1}` and `x_{t-1}`
//! (`x_t` when `q = 0`). It is a reparameterization of the levels ARDL(p, q).
//! The estimation sample starts at `t = max(p, q) + 1`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataio::{Dataset, Period};
use crate::error::{Error, Result};
use crate::linreg::{ols, wald_f_test, DesignMatrix, Distribution, RegressionResult, Significance, TestStatistic, WaldContext, CONSTANT};
use crate::tables::{tables, Bounds, BoundsCase};
use crate::unitroot::DeterministicSpec;

pub const ECM_TERM: &str = "ECM(-1)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    #[default]
    #[serde(alias = "AIC")]
    Aic,
    #[serde(alias = "SBC", alias = "bic", alias = "BIC")]
    Sbc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArdlSpec {
    pub dependent: String,
    pub regressors: Vec<String>,
    pub p: usize,
    pub q: BTreeMap<String, usize>,
    pub case: BoundsCase,
}

impl ArdlSpec {
    pub fn new(dependent: &str, regressors: &[(&str, usize)], p: usize) -> ArdlSpec {
        ArdlSpec {
            dependent: dependent.to_string(),
            regressors: regressors.iter().map(|(n, _)| n.to_string()).collect(),
            p,
            q: regressors.iter().map(|(n, q)| (n.to_string(), *q)).collect(),
            case: BoundsCase::UnrestrictedConstant,
        }
    }

    pub fn with_case(mut self, case: BoundsCase) -> ArdlSpec {
        self.case = case;
        self
    }

    /// Both supported bounds cases carry an intercept and no trend.
    pub fn det(&self) -> DeterministicSpec {
        DeterministicSpec::Constant
    }

    pub fn q_of(&self, regressor: &str) -> usize {
        self.q.get(regressor).copied().unwrap_or(0)
    }

    pub fn max_lag(&self) -> usize {
        self.regressors.iter().map(|r| self.q_of(r)).max().unwrap_or(0).max(self.p)
    }

    /// `ARDL(p, q1, q2, ...)`.
    pub fn label(&self) -> String {
        let mut s = format!("ARDL({}", self.p);
        for r in &self.regressors {
            s.push_str(&format!(", {}", self.q_of(r)));
        }
        s.push(')');
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 1 {
            return Err(Error::InvalidParameters("ARDL lag p must be at least 1".into()));
        }
        if self.regressors.is_empty() {
            return Err(Error::InvalidParameters("ARDL model needs at least one regressor".into()));
        }
        if self.regressors.contains(&self.dependent) {
            return Err(Error::InvalidParameters(format!(
                "dependent `{}` also listed as a regressor",
                self.dependent
            )));
        }
        for r in &self.regressors {
            if !self.q.contains_key(r) {
                return Err(Error::InvalidParameters(format!("no lag order for regressor `{r}`")));
            }
        }
        if let Some(extra) = self.q.keys().find(|k| !self.regressors.contains(k)) {
            return Err(Error::InvalidParameters(format!("lag order given for unknown regressor `{extra}`")));
        }
        Ok(())
    }
}

fn level_name(s: &str) -> String {
    format!("{s}(-1)")
}

/// Level term carrying `λ` for a regressor.
fn x_level_name(spec: &ArdlSpec, x: &str) -> String {
    if spec.q_of(x) == 0 {
        x.to_string()
    } else {
        level_name(x)
    }
}

fn diff_name(s: &str, lag: usize) -> String {
    if lag == 0 {
        format!("D({s})")
    } else {
        format!("D({s}(-{lag}))")
    }
}

struct Columns<'a> {
    y: &'a [f64],
    xs: Vec<(&'a str, &'a [f64])>,
}

impl<'a> Columns<'a> {
    fn from(d: &'a Dataset, spec: &'a ArdlSpec) -> Result<Columns<'a>> {
        let y = d.get(&spec.dependent)?.values();
        let xs = spec
            .regressors
            .iter()
            .map(|r| Ok((r.as_str(), d.get(r)?.values())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Columns { y, xs })
    }
}

fn delta(v: &[f64], t: usize, lag: usize) -> f64 {
    v[t - lag] - v[t - lag - 1]
}

/// Short-run block shared by the conditional ECM and the second ECM step;
/// the latter always keeps `Δx_t`.
fn push_short_run(d: &mut DesignMatrix, c: &Columns, spec: &ArdlSpec, rows: &[usize], keep_dx: bool) -> Result<()> {
    for i in 1..spec.p {
        d.push(diff_name(&spec.dependent, i), rows.iter().map(|&t| delta(c.y, t, i)).collect())?;
    }
    for (name, x) in &c.xs {
        let q = spec.q_of(name);
        for j in 0..if keep_dx { q.max(1) } else { q } {
            d.push(diff_name(name, j), rows.iter().map(|&t| delta(x, t, j)).collect())?;
        }
    }
    Ok(())
}

fn cec_fit(c: &Columns, spec: &ArdlSpec, rows: &[usize]) -> Result<RegressionResult> {
    let mut d = DesignMatrix::new(rows.len());
    d.push_constant()?;
    push_short_run(&mut d, c, spec, rows, false)?;
    d.push(level_name(&spec.dependent), rows.iter().map(|&t| c.y[t - 1]).collect())?;
    for (name, x) in &c.xs {
        let lag = spec.q_of(name).min(1);
        d.push(x_level_name(spec, name), rows.iter().map(|&t| x[t - lag]).collect())?;
    }
    let target: Vec<f64> = rows.iter().map(|&t| delta(c.y, t, 0)).collect();
    if rows.len() <= d.k() {
        return Err(Error::SampleTooShort(format!(
            "{} needs more than {} observations, has {}",
            spec.label(),
            d.k(),
            rows.len()
        )));
    }
    ols(&target, &d)
}

fn sample_rows(t: usize, start: usize) -> Vec<usize> {
    (start..t).collect()
}

/// Exhaustive search over `p in 1..=max_p` and `q in 0..=max_q` per regressor,
/// every candidate fitted on the sample of the largest one. Ties go to the
/// smaller total lag count, then the smaller `p`.
pub fn select_lags(
    d: &Dataset,
    dependent: &str,
    regressors: &[String],
    max_p: usize,
    max_q: usize,
    criterion: Criterion,
    case: BoundsCase,
) -> Result<ArdlSpec> {
    if max_p < 1 {
        return Err(Error::InvalidParameters("max_p must be at least 1".into()));
    }
    let mut candidates: Vec<Vec<usize>> = vec![vec![]];
    for _ in regressors {
        candidates = candidates
            .into_iter()
            .flat_map(|prefix| {
                (0..=max_q).map(move |q| {
                    let mut v = prefix.clone();
                    v.push(q);
                    v
                })
            })
            .collect();
    }
    let specs: Vec<ArdlSpec> = (1..=max_p)
        .flat_map(|p| {
            candidates.iter().map(move |qs| ArdlSpec {
                dependent: dependent.to_string(),
                regressors: regressors.to_vec(),
                p,
                q: regressors.iter().cloned().zip(qs.iter().copied()).collect(),
                case,
            })
        })
        .collect();
    specs[0].validate()?;
    let columns = Columns::from(d, &specs[0])?;
    let rows = sample_rows(d.len(), max_p.max(max_q) + 1);
    let scored: Vec<(f64, usize, usize, usize)> = specs
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let fit = cec_fit(&columns, s, &rows)?;
            let score = match criterion {
                Criterion::Aic => fit.aic,
                Criterion::Sbc => fit.sbc,
            };
            let total = s.p + s.q.values().sum::<usize>();
            Ok((score, total, s.p, i))
        })
        .collect::<Result<_>>()?;
    let best = scored
        .iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)).then(a.3.cmp(&b.3)))
        .expect("at least one candidate");
    Ok(specs[best.3].clone())
}

#[derive(Debug, Clone, Serialize)]
pub struct ArdlModel {
    pub spec: ArdlSpec,
    /// Conditional ECM regression: short-run Δ-terms plus lagged levels.
    pub levels_fit: RegressionResult,
    pub n_effective: usize,
    pub sample: Vec<Period>,
    #[serde(skip)]
    data: Dataset,
    #[serde(skip)]
    rows: Vec<usize>,
}

impl ArdlModel {
    /// λ₁, the coefficient on the lagged dependent level.
    pub fn lambda_y(&self) -> f64 {
        self.levels_fit.coef(&level_name(&self.spec.dependent)).expect("level term present")
    }

    pub fn lambda(&self, regressor: &str) -> Result<f64> {
        self.levels_fit.coef(&x_level_name(&self.spec, regressor))
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }
}

/// Fits the conditional ECM on `t = max(p, q) + 1 .. T-1`.
pub fn estimate_ardl(d: &Dataset, spec: &ArdlSpec) -> Result<ArdlModel> {
    spec.validate()?;
    let columns = Columns::from(d, spec)?;
    let rows = sample_rows(d.len(), spec.max_lag() + 1);
    let levels_fit = cec_fit(&columns, spec, &rows)?;
    let data = d.select(&spec.dependent, &spec.regressors)?;
    Ok(ArdlModel {
        spec: spec.clone(),
        n_effective: rows.len(),
        sample: rows.iter().map(|&t| d.index()[t]).collect(),
        levels_fit,
        data,
        rows,
    })
}

/// The same model in levels: `y_t` on a constant, `y_{t-1..t-p}` and
/// `x_{t..t-q}`, on the conditional ECM's sample.
pub fn levels_form_fit(d: &Dataset, spec: &ArdlSpec) -> Result<RegressionResult> {
    spec.validate()?;
    let c = Columns::from(d, spec)?;
    let rows = sample_rows(d.len(), spec.max_lag() + 1);
    let mut m = DesignMatrix::new(rows.len());
    m.push_constant()?;
    for i in 1..=spec.p {
        m.push(format!("{}(-{i})", spec.dependent), rows.iter().map(|&t| c.y[t - i]).collect())?;
    }
    for (name, x) in &c.xs {
        m.push(name.to_string(), rows.iter().map(|&t| x[t]).collect())?;
        for j in 1..=spec.q_of(name) {
            m.push(format!("{name}(-{j})"), rows.iter().map(|&t| x[t - j]).collect())?;
        }
    }
    let target: Vec<f64> = rows.iter().map(|&t| c.y[t]).collect();
    ols(&target, &m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CointegrationDecision {
    Cointegrated,
    Inconclusive,
    NotCointegrated,
}

/// `F > upper` cointegrated, `F < lower` not, otherwise inconclusive.
pub fn bounds_decision(f: f64, bounds: Bounds) -> CointegrationDecision {
    if f > bounds.upper {
        CointegrationDecision::Cointegrated
    } else if f < bounds.lower {
        CointegrationDecision::NotCointegrated
    } else {
        CointegrationDecision::Inconclusive
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsTestResult {
    pub f_statistic: f64,
    pub case: BoundsCase,
    pub k: usize,
    pub restrictions: Vec<String>,
    pub bounds: BTreeMap<Significance, Bounds>,
    pub alpha: Significance,
    pub decision: CointegrationDecision,
    pub decision_at: BTreeMap<Significance, CointegrationDecision>,
    pub wald: TestStatistic,
}

pub fn bounds_test(m: &ArdlModel, alpha: Significance) -> Result<BoundsTestResult> {
    let mut restrictions = vec![level_name(&m.spec.dependent)];
    restrictions.extend(m.spec.regressors.iter().map(|r| x_level_name(&m.spec, r)));
    if m.spec.case == BoundsCase::RestrictedConstant {
        restrictions.push(CONSTANT.to_string());
    }
    let wald = wald_f_test(&m.levels_fit, &restrictions, WaldContext::Bounds)?;
    let k = m.spec.regressors.len();
    let t = tables()?;
    let bounds: BTreeMap<Significance, Bounds> = Significance::ALL
        .iter()
        .map(|&lvl| Ok((lvl, t.bounds(m.spec.case, k, lvl)?)))
        .collect::<Result<_>>()?;
    let f = wald.statistic;
    let decision_at: BTreeMap<_, _> = bounds.iter().map(|(&l, &b)| (l, bounds_decision(f, b))).collect();
    Ok(BoundsTestResult {
        f_statistic: f,
        case: m.spec.case,
        k,
        restrictions,
        decision: decision_at[&alpha],
        bounds,
        alpha,
        decision_at,
        wald,
    })
}

/// One estimated coefficient with t-based inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: Option<f64>,
}

impl CoefficientRow {
    fn new(name: String, estimate: f64, std_error: f64, df: usize) -> CoefficientRow {
        let t_stat = if std_error > 0.0 { estimate / std_error } else { f64::NAN };
        let p_value = if t_stat.is_finite() && df > 0 {
            Distribution::StudentT { df: df as f64 }.survival(t_stat)
        } else {
            None
        };
        CoefficientRow {
            name,
            estimate,
            std_error,
            t_stat,
            p_value,
        }
    }

    fn from_fit(fit: &RegressionResult, name: &str) -> Result<CoefficientRow> {
        Ok(CoefficientRow::new(
            name.to_string(),
            fit.coef(name)?,
            fit.std_error(name)?,
            fit.n - fit.k,
        ))
    }
}

fn find<'a>(rows: &'a [CoefficientRow], name: &str) -> Result<&'a CoefficientRow> {
    rows.iter()
        .find(|r| r.name == name)
        .ok_or_else(|| Error::UnknownCoefficient(name.to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct LongRunCoefficients {
    /// Regressors in spec order, then the constant.
    pub coefficients: Vec<CoefficientRow>,
}

impl LongRunCoefficients {
    pub fn get(&self, name: &str) -> Result<&CoefficientRow> {
        find(&self.coefficients, name)
    }

    pub fn value(&self, name: &str) -> Result<f64> {
        Ok(self.get(name)?.estimate)
    }
}

pub const DEGENERATE_ADJUSTMENT_TOL: f64 = 1e-10;

/// `-λ_j / λ₁` with delta-method standard errors; the constant is `-C / λ₁`.
pub fn long_run(m: &ArdlModel) -> Result<LongRunCoefficients> {
    let fit = &m.levels_fit;
    let ly = level_name(&m.spec.dependent);
    let b = fit.coef(&ly)?;
    if b.abs() < DEGENERATE_ADJUSTMENT_TOL {
        return Err(Error::DegenerateAdjustment);
    }
    let df = fit.n - fit.k;
    let mut terms: Vec<(String, String)> =
        m.spec.regressors.iter().map(|r| (r.clone(), x_level_name(&m.spec, r))).collect();
    terms.push((CONSTANT.to_string(), CONSTANT.to_string()));
    let coefficients = terms
        .into_iter()
        .map(|(label, term)| {
            let a = fit.coef(&term)?;
            let (ga, gb) = (-1.0 / b, a / (b * b));
            let var = ga * ga * fit.covariance(&term, &term)?
                + 2.0 * ga * gb * fit.covariance(&term, &ly)?
                + gb * gb * fit.covariance(&ly, &ly)?;
            Ok(CoefficientRow::new(label, -a / b, var.max(0.0).sqrt(), df))
        })
        .collect::<Result<_>>()?;
    Ok(LongRunCoefficients { coefficients })
}

#[derive(Debug, Clone, Serialize)]
pub struct EcmResult {
    pub short_run: Vec<CoefficientRow>,
    pub ecm: CoefficientRow,
    pub ecm_coefficient: f64,
    /// λ₁ from the conditional ECM, the one-step counterpart of the loading.
    pub one_step_lambda: f64,
    pub identity_gap: f64,
    /// Set when the loading is not negative: no error correction.
    pub non_negative_loading: bool,
    pub fit: RegressionResult,
}

impl EcmResult {
    pub fn speed_of_adjustment_pct(&self) -> f64 {
        self.ecm_coefficient.abs() * 100.0
    }

    pub fn get(&self, name: &str) -> Result<&CoefficientRow> {
        if name == ECM_TERM {
            return Ok(&self.ecm);
        }
        find(&self.short_run, name)
    }
}

/// Two-step ECM: the long-run relation gives `EC_t`, then `Δy_t` is
/// regressed on the short-run block and `EC_{t-1}`. Under case II the
/// constant sits inside `EC_t`. The short-run block always keeps `Δx_t`, so
/// a regressor with `q = 0` makes the loading differ slightly from `λ₁`.
pub fn estimate_ecm(m: &ArdlModel) -> Result<EcmResult> {
    let lr = long_run(m)?;
    let c = Columns::from(&m.data, &m.spec)?;
    let restricted = m.spec.case == BoundsCase::RestrictedConstant;
    let shift = if restricted { lr.value(CONSTANT)? } else { 0.0 };
    let weights: Vec<f64> = m.spec.regressors.iter().map(|r| lr.value(r)).collect::<Result<_>>()?;
    let ec = |t: usize| c.y[t] - shift - c.xs.iter().zip(&weights).map(|((_, x), w)| w * x[t]).sum::<f64>();

    let rows = &m.rows;
    let mut d = DesignMatrix::new(rows.len());
    if !restricted {
        d.push_constant()?;
    }
    push_short_run(&mut d, &c, &m.spec, rows, true)?;
    d.push(ECM_TERM, rows.iter().map(|&t| ec(t - 1)).collect())?;
    let target: Vec<f64> = rows.iter().map(|&t| delta(c.y, t, 0)).collect();
    let fit = ols(&target, &d)?;

    let ecm = CoefficientRow::from_fit(&fit, ECM_TERM)?;
    let short_run = fit
        .names
        .iter()
        .filter(|n| n.as_str() != ECM_TERM)
        .map(|n| CoefficientRow::from_fit(&fit, n))
        .collect::<Result<_>>()?;
    let one_step_lambda = m.lambda_y();
    Ok(EcmResult {
        short_run,
        ecm_coefficient: ecm.estimate,
        identity_gap: (ecm.estimate - one_step_lambda).abs(),
        non_negative_loading: ecm.estimate >= 0.0,
        one_step_lambda,
        ecm,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{Frequency, TimeSeries};
    use crate::linreg::CONSTANT;
    use crate::simgen::{generate, rejection_frequency, replicate, Dgp, DgpKind, GaussianStream};
    use proptest::prelude::*;

    fn start() -> Period {
        Period::new(2000, 1, Frequency::Monthly).unwrap()
    }

    fn dataset(y: Vec<f64>, xs: Vec<(&str, Vec<f64>)>) -> Dataset {
        let mut series = vec![TimeSeries::from_start("y", start(), y).unwrap()];
        for (n, x) in xs {
            series.push(TimeSeries::from_start(n, start(), x).unwrap());
        }
        Dataset::new(series, "y").unwrap()
    }

    fn walk(stream: &mut GaussianStream, t: usize) -> Vec<f64> {
        stream
            .take_vec(t)
            .into_iter()
            .scan(0.0, |acc, e| {
                *acc += e;
                Some(*acc)
            })
            .collect()
    }

    /// y_t = 2 + 0.5 y_{t-1} + x_t with no noise.
    fn noiseless(t: usize) -> Dataset {
        let x = walk(&mut GaussianStream::new(99), t);
        let mut y = vec![4.0 + 2.0 * x[0]];
        for i in 1..t {
            y.push(2.0 + 0.5 * y[i - 1] + x[i]);
        }
        dataset(y, vec![("x", x)])
    }

    fn spec10() -> ArdlSpec {
        ArdlSpec::new("y", &[("x", 0)], 1)
    }

    #[test]
    fn noiseless_system_recovered() {
        let d = noiseless(120);
        let m = estimate_ardl(&d, &spec10()).unwrap();
        assert_eq!(m.n_effective, 120 - 1 - 1);
        assert!((m.lambda_y() + 0.5).abs() < 1e-10);
        assert!((m.lambda("x").unwrap() - 1.0).abs() < 1e-10);
        assert!(m.levels_fit.residuals.iter().all(|e| e.abs() < 1e-9));
        let lr = long_run(&m).unwrap();
        assert!((lr.value("x").unwrap() - 2.0).abs() < 1e-10);
        assert!((lr.value(CONSTANT).unwrap() - 4.0).abs() < 1e-9);
        let ecm = estimate_ecm(&m).unwrap();
        assert!((ecm.ecm_coefficient + 0.5).abs() < 1e-6);
        assert!(ecm.identity_gap < 1e-6);
        assert!((ecm.speed_of_adjustment_pct() - 50.0).abs() < 1e-4);
    }

    #[test]
    fn effective_sample_size() {
        let d = random_dataset(3, 80, 1);
        let spec = ArdlSpec::new("y", &[("x", 3)], 2);
        let m = estimate_ardl(&d, &spec).unwrap();
        assert_eq!(m.n_effective, 80 - 3 - 1);
        assert_eq!(m.sample.first(), Some(&start().offset(4)));
        assert_eq!(m.levels_fit.names.iter().filter(|n| n.ends_with("(-1)") && !n.starts_with("D(")).count(), 2);
        assert_eq!(m.levels_fit.k, 1 + 1 + 3 + 2);
        assert_eq!(m.n_effective, levels_form_fit(&d, &spec).unwrap().n);

        let m = estimate_ardl(&d, &spec10()).unwrap();
        assert_eq!(m.levels_fit.names, vec!["C", "y(-1)", "x"]);
        let ecm = estimate_ecm(&m).unwrap();
        assert_eq!(ecm.fit.names, vec!["C", "D(x)", ECM_TERM]);
    }

    #[test]
    fn duplicated_regressor_is_rank_deficient() {
        let mut s = GaussianStream::new(4);
        let x = walk(&mut s, 100);
        let y = walk(&mut s, 100);
        let d = dataset(y, vec![("x", x.clone()), ("x2", x)]);
        let spec = ArdlSpec::new("y", &[("x", 0), ("x2", 0)], 1);
        assert!(matches!(estimate_ardl(&d, &spec), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn invalid_specs() {
        let d = noiseless(50);
        assert!(matches!(estimate_ardl(&d, &ArdlSpec::new("y", &[("x", 0)], 0)), Err(Error::InvalidParameters(_))));
        assert!(matches!(estimate_ardl(&d, &ArdlSpec::new("y", &[("y", 0)], 1)), Err(Error::InvalidParameters(_))));
        assert!(matches!(estimate_ardl(&d, &ArdlSpec::new("y", &[("z", 0)], 1)), Err(Error::UnknownSeries(_))));
        let short = noiseless(8);
        assert!(matches!(
            estimate_ardl(&short, &ArdlSpec::new("y", &[("x", 3)], 3)),
            Err(Error::SampleTooShort(_))
        ));
    }

    #[test]
    fn single_candidate_selection() {
        let d = noiseless(60);
        for c in [Criterion::Aic, Criterion::Sbc] {
            let s = select_lags(&d, "y", &["x".into()], 1, 0, c, BoundsCase::UnrestrictedConstant).unwrap();
            assert_eq!((s.p, s.q_of("x")), (1, 0));
        }
    }

    #[test]
    fn sbc_selects_true_order_seed_11() {
        let d = generate(&Dgp::new(
            DgpKind::Ardl {
                constant: 1.0,
                phi: vec![0.5],
                theta: vec![1.0],
                sigma: 1.0,
                sigma_x: 1.0,
            },
            400,
            11,
        ))
        .unwrap();
        let s = select_lags(&d, "y", &["x".into()], 4, 4, Criterion::Sbc, BoundsCase::UnrestrictedConstant).unwrap();
        assert_eq!((s.p, s.q_of("x")), (1, 0));
    }

    fn pair(seed: u64) -> Dataset {
        generate(&Dgp::new(
            DgpKind::CointegratedPair {
                beta: 3.0,
                adjustment: -0.6,
                sigma_x: 1.0,
                sigma_y: 1.0,
            },
            400,
            seed,
        ))
        .unwrap()
    }

    #[test]
    fn cointegrated_fixture_seed_13() {
        let d = pair(13);
        let m = estimate_ardl(&d, &spec10()).unwrap();
        let t = m.levels_fit.t_stat("y(-1)").unwrap();
        assert!(m.lambda_y() < 0.0 && t < -4.0, "lambda {} t {t}", m.lambda_y());

        // Engle-Granger: static regression, then DF on its residuals
        let y = d.get("y").unwrap().values();
        let x = d.get("x").unwrap().values();
        let static_fit = ols(y, &DesignMatrix::new(y.len()).with(CONSTANT, vec![1.0; y.len()]).unwrap().with("x", x.to_vec()).unwrap()).unwrap();
        assert!((static_fit.coef("x").unwrap() - 3.0).abs() < 0.1, "{}", static_fit.coef("x").unwrap());
        let u = &static_fit.residuals;
        let du: Vec<f64> = u.windows(2).map(|w| w[1] - w[0]).collect();
        let df = ols(&du, &DesignMatrix::from_columns(vec![("u(-1)", u[..u.len() - 1].to_vec())]).unwrap()).unwrap();
        assert!(df.t_stat("u(-1)").unwrap() < -4.0);

        let lr = long_run(&m).unwrap();
        assert!((lr.value("x").unwrap() - 3.0).abs() < 0.1);
        let ecm = estimate_ecm(&m).unwrap();
        assert!((ecm.ecm_coefficient + 0.6).abs() < 0.15, "{}", ecm.ecm_coefficient);
        assert!(ecm.identity_gap.is_finite());
        // the data are generated through x_{t-1}; ARDL(1,1) nests them and
        // then the two loadings coincide
        let m11 = estimate_ardl(&d, &ArdlSpec::new("y", &[("x", 1)], 1)).unwrap();
        let e11 = estimate_ecm(&m11).unwrap();
        assert!(e11.identity_gap < 1e-8);
        assert!((m11.lambda_y() + 0.6).abs() < 0.15);
        assert!(!ecm.non_negative_loading);
        let b = bounds_test(&m, Significance::Five).unwrap();
        assert_eq!(b.decision, CointegrationDecision::Cointegrated);
        assert_eq!(b.k, 1);
        assert!(b.wald.p_value.is_none());
    }

    #[test]
    fn case_two_restricts_constant() {
        let d = pair(13);
        let spec = spec10().with_case(BoundsCase::RestrictedConstant);
        let m = estimate_ardl(&d, &spec).unwrap();
        let b = bounds_test(&m, Significance::Five).unwrap();
        assert_eq!(b.restrictions.len(), 3);
        assert_eq!(b.case, BoundsCase::RestrictedConstant);
        let ecm = estimate_ecm(&m).unwrap();
        assert!(ecm.fit.names.iter().all(|n| n != CONSTANT));
        let m11 = estimate_ardl(&d, &ArdlSpec::new("y", &[("x", 1)], 1).with_case(BoundsCase::RestrictedConstant)).unwrap();
        assert!(estimate_ecm(&m11).unwrap().identity_gap < 1e-8);
    }

    #[test]
    fn independent_walks_not_cointegrated_seed_17() {
        let summary = rejection_frequency(500, 17, |seed| {
            let mut s = GaussianStream::new(seed);
            let x = walk(&mut s, 400);
            let y = walk(&mut s, 400);
            let m = estimate_ardl(&dataset(y, vec![("x", x)]), &spec10())?;
            Ok(bounds_test(&m, Significance::Five)?.decision != CointegrationDecision::Cointegrated)
        });
        assert_eq!(summary.failures, 0);
        assert!(summary.frequency() >= 0.90, "{}", summary.frequency());
    }

    #[test]
    fn negative_loading_on_cointegrated_family() {
        let loadings = replicate(500, 13, |seed| estimate_ecm(&estimate_ardl(&pair(seed), &spec10()).unwrap()).unwrap().ecm_coefficient);
        let neg = loadings.iter().filter(|v| **v < 0.0).count();
        assert!(neg as f64 >= 0.99 * 500.0);
    }

    #[test]
    fn degenerate_adjustment() {
        // y_t = y_{t-1} + Δx_t exactly: no levels feedback
        let x = walk(&mut GaussianStream::new(5), 60);
        let mut noise = GaussianStream::new(6);
        let mut y = vec![0.0];
        for i in 1..60 {
            y.push(y[i - 1] + (x[i] - x[i - 1]) + 0.1 * noise.next_normal());
        }
        let d = dataset(y, vec![("x", x)]);
        let mut m = estimate_ardl(&d, &spec10()).unwrap();
        let pos = m.levels_fit.position("y(-1)").unwrap();
        m.levels_fit.coefficients[pos] = 0.0;
        assert!(matches!(long_run(&m), Err(Error::DegenerateAdjustment)));
        assert!(matches!(estimate_ecm(&m), Err(Error::DegenerateAdjustment)));
    }

    #[test]
    fn bounds_decision_band() {
        let b = Bounds { lower: 4.94, upper: 5.73 };
        assert_eq!(bounds_decision(45.5515, b), CointegrationDecision::Cointegrated);
        assert_eq!(bounds_decision(5.335, b), CointegrationDecision::Inconclusive);
        assert_eq!(bounds_decision(1.0, b), CointegrationDecision::NotCointegrated);
    }

    fn random_dataset(seed: u64, t: usize, regressors: usize) -> Dataset {
        let mut s = GaussianStream::new(seed);
        let xs: Vec<Vec<f64>> = (0..regressors).map(|_| walk(&mut s, t)).collect();
        let y = walk(&mut s, t);
        let names = ["x", "w", "z"];
        dataset(y, names.iter().zip(xs).map(|(n, x)| (*n, x)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn reparameterization_identity(seed in any::<u64>(), p in 1usize..4, q1 in 0usize..4, q2 in 0usize..3, two in any::<bool>()) {
            let d = random_dataset(seed, 100, if two { 2 } else { 1 });
            let spec = if two {
                ArdlSpec::new("y", &[("x", q1), ("w", q2)], p)
            } else {
                ArdlSpec::new("y", &[("x", q1)], p)
            };
            let m = estimate_ardl(&d, &spec).unwrap();
            let lv = levels_form_fit(&d, &spec).unwrap();
            for (a, b) in m.levels_fit.residuals.iter().zip(&lv.residuals) {
                prop_assert!((a - b).abs() < 1e-8);
            }
            let sum_phi: f64 = (1..=p).map(|i| lv.coef(&format!("y(-{i})")).unwrap()).sum();
            prop_assert!((m.lambda_y() - (sum_phi - 1.0)).abs() < 1e-8);
            // λ_x equals the sum of the levels-form x coefficients
            let sum_theta: f64 = lv.coef("x").unwrap() + (1..=q1).map(|j| lv.coef(&format!("x(-{j})")).unwrap()).sum::<f64>();
            prop_assert!((m.lambda("x").unwrap() - sum_theta).abs() < 1e-8);
        }

        #[test]
        fn long_run_scaling(seed in any::<u64>(), c in prop_oneof![0.01f64..0.5, 2.0f64..100.0]) {
            let d = random_dataset(seed, 120, 1);
            let y = d.get("y").unwrap().values().to_vec();
            let x = d.get("x").unwrap().values().to_vec();
            let scaled = dataset(y, vec![("x", x.iter().map(|v| v * c).collect())]);
            let a = long_run(&estimate_ardl(&d, &spec10()).unwrap()).unwrap();
            let b = long_run(&estimate_ardl(&scaled, &spec10()).unwrap()).unwrap();
            let (ra, rb) = (a.get("x").unwrap(), b.get("x").unwrap());
            prop_assert!((ra.estimate / c - rb.estimate).abs() < 1e-8 * (1.0 + ra.estimate.abs()));
            prop_assert!((ra.t_stat - rb.t_stat).abs() < 1e-8 * (1.0 + ra.t_stat.abs()));
        }

        #[test]
        fn decision_monotone_in_f(f1 in 0.0f64..20.0, f2 in 0.0f64..20.0, lo in 1.0f64..8.0, width in 0.0f64..3.0) {
            let b = Bounds { lower: lo, upper: lo + width };
            let rank = |d| match d {
                CointegrationDecision::NotCointegrated => 0,
                CointegrationDecision::Inconclusive => 1,
                CointegrationDecision::Cointegrated => 2,
            };
            let (a, c) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
            prop_assert!(rank(bounds_decision(a, b)) <= rank(bounds_decision(c, b)));
        }

        #[test]
        fn ecm_loading_matches_lambda(seed in any::<u64>(), restricted in any::<bool>()) {
            let d = random_dataset(seed, 100, 2);
            let mut spec = ArdlSpec::new("y", &[("x", 1), ("w", 2)], 2);
            if restricted {
                spec = spec.with_case(BoundsCase::RestrictedConstant);
            }
            let m = estimate_ardl(&d, &spec).unwrap();
            let e = estimate_ecm(&m).unwrap();
            prop_assert!(e.identity_gap < 1e-8 * (1.0 + m.lambda_y().abs()));
        }
    }
}
