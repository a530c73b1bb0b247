use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ardl::{CoefficientRow, CointegrationDecision, Criterion};
use crate::dataio::MissingPolicy;
use crate::linreg::{Decision, Distribution, Significance, TestStatistic};
use crate::tables::{Bounds, BoundsCase};
use crate::unitroot::{DeterministicSpec, IntegrationOrder, UnitRootResult, UnitRootTest, Verdict};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub input: InputSummary,
    pub settings: Settings,
    pub unit_root_table: Vec<UnitRootRow>,
    pub integration: Vec<IntegrationRow>,
    pub models: Vec<ModelReport>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    /// File name only, so reports do not depend on where they ran.
    pub source: String,
    pub rows_read: usize,
    pub rows_dropped: usize,
    pub values_interpolated: usize,
    pub missing_policy: MissingPolicy,
    pub variables: Vec<String>,
    pub sample_start: String,
    pub sample_end: String,
    pub observations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub alpha: Vec<Significance>,
    pub decision_level: Significance,
    pub classification_test: UnitRootTest,
    pub classification_spec: DeterministicSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesForm {
    Level,
    FirstDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootRow {
    pub variable: String,
    pub test: UnitRootTest,
    pub form: SeriesForm,
    pub spec: DeterministicSpec,
    pub statistic: f64,
    pub lag_or_bandwidth: usize,
    pub nobs: usize,
    pub critical_values: BTreeMap<Significance, f64>,
    pub verdict_at: BTreeMap<Significance, Verdict>,
}

impl UnitRootRow {
    pub fn from_result(variable: &str, form: SeriesForm, r: &UnitRootResult) -> UnitRootRow {
        UnitRootRow {
            variable: variable.to_string(),
            test: r.test,
            form,
            spec: r.spec,
            statistic: r.statistic,
            lag_or_bandwidth: r.lag_or_bandwidth,
            nobs: r.nobs,
            critical_values: r.critical_values.clone(),
            verdict_at: r.verdict_at.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationRow {
    pub variable: String,
    pub order: IntegrationOrder,
    /// Whether the first difference rejects a unit root at the decision level.
    pub difference_stationary: bool,
}

/// A coefficient with inference; `None` where undefined (zero standard error).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientCell {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: Option<f64>,
    pub p_value: Option<f64>,
    pub significant_at: BTreeMap<Significance, bool>,
}

impl CoefficientCell {
    pub fn from_row(r: &CoefficientRow, levels: &[Significance]) -> CoefficientCell {
        let significant_at = match r.p_value {
            Some(p) => levels.iter().map(|&l| (l, p < l.alpha())).collect(),
            None => BTreeMap::new(),
        };
        CoefficientCell {
            name: r.name.clone(),
            estimate: r.estimate,
            std_error: r.std_error,
            t_stat: r.t_stat.is_finite().then_some(r.t_stat),
            p_value: r.p_value,
            significant_at,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub observations: usize,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub f_statistic: Option<f64>,
    pub durbin_watson: Option<f64>,
    pub aic: f64,
    pub sbc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub criterion: Option<Criterion>,
    pub max_p: usize,
    pub max_q: usize,
    pub p: usize,
    pub q: BTreeMap<String, usize>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub f_statistic: f64,
    pub k: usize,
    pub case: BoundsCase,
    pub case_defaulted: bool,
    pub bounds: BTreeMap<Significance, Bounds>,
    pub decision: CointegrationDecision,
    pub decision_at: BTreeMap<Significance, CointegrationDecision>,
    pub reference_bounds: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShortRunTable {
    pub coefficients: Vec<CoefficientCell>,
    pub ecm: CoefficientCell,
    pub speed_of_adjustment_pct: f64,
    pub one_step_lambda: f64,
    pub identity_gap: f64,
    pub fit: FitSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub name: String,
    pub statistic: f64,
    pub distribution: Distribution,
    pub p_value: Option<f64>,
    pub decision_at: BTreeMap<Significance, Decision>,
}

impl DiagnosticRow {
    pub fn from_test(t: &TestStatistic, levels: &[Significance]) -> DiagnosticRow {
        DiagnosticRow {
            name: t.name.clone(),
            statistic: t.statistic,
            distribution: t.distribution,
            p_value: t.p_value,
            decision_at: t.decision_at.iter().filter(|(l, _)| levels.contains(l)).map(|(l, d)| (*l, *d)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub name: String,
    pub stable: bool,
    pub first_crossing: Option<usize>,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsTable {
    pub tests: Vec<DiagnosticRow>,
    pub stability: Vec<StabilityRow>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub name: String,
    pub dependent: String,
    pub regressors: Vec<String>,
    pub selection: Selection,
    pub sample_start: String,
    pub sample_end: String,
    pub n_effective: usize,
    pub conditional_ecm: Vec<CoefficientCell>,
    pub conditional_fit: FitSummary,
    pub bounds: BoundsRow,
    pub long_run: Option<Vec<CoefficientCell>>,
    pub short_run: Option<ShortRunTable>,
    pub diagnostics: Option<DiagnosticsTable>,
}
