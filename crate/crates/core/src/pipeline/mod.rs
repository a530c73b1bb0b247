//! Config-driven end-to-end analysis: ingest, transform, unit roots, lag
//! selection, bounds test, long run, ECM and diagnostics.

pub mod config;
pub mod render;
pub mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::ardl::{
    bounds_test, estimate_ardl, estimate_ecm, long_run, select_lags, ArdlSpec, CointegrationDecision, EcmResult,
};
use crate::dataio::{difference, load_csv, log_transform, Dataset, TimeSeries};
use crate::diagnostics::{breusch_godfrey, breusch_pagan, cusum, cusumsq, jarque_bera, ramsey_reset, StabilityResult};
use crate::error::{Error, Result};
use crate::linreg::{Decision, Distribution, RegressionResult, Significance};
use crate::tables::BoundsCase;
use crate::unitroot::{classify_integration, ClassifyConfig, DeterministicSpec, IntegrationOrder, UnitRootTest};

pub use config::{ModelConfig, PipelineConfig, Transform};
pub use render::{render_report, Format};
pub use report::*;

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Replaces `input.path`.
    pub input: Option<PathBuf>,
    /// Overrides every model's cointegration gate.
    pub force: bool,
    /// Full level/difference × spec × test table, not just classification.
    pub unit_root_table: bool,
    pub models: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            input: None,
            force: false,
            unit_root_table: true,
            models: true,
        }
    }
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<AnalysisReport> {
    run_with(cfg, &RunOptions::default())
}

pub fn run_with(cfg: &PipelineConfig, opts: &RunOptions) -> Result<AnalysisReport> {
    cfg.validate()?;
    let path = opts.input.clone().unwrap_or_else(|| cfg.resolve(&cfg.input.path));
    let raw = load_csv(&path, &cfg.input.ingest()).map_err(|e| e.in_stage("ingest"))?;
    let data = build_variables(cfg, &raw).map_err(|e| e.in_stage("transform"))?;
    for m in &cfg.models {
        for v in std::iter::once(&m.dependent).chain(&m.regressors) {
            if data.get(v).is_err() {
                return Err(Error::Config(format!("model `{}` references undefined variable `{v}`", m.name)));
            }
        }
    }

    let mut warnings = Vec::new();
    let prov = raw.provenance().cloned();
    if let Some(p) = &prov {
        if p.rows_dropped > 0 {
            warnings.push(format!("{} input rows with missing values were dropped", p.rows_dropped));
        }
        if p.values_interpolated > 0 {
            warnings.push(format!("{} missing values were linearly interpolated", p.values_interpolated));
        }
    }

    let model_vars: Vec<String> = {
        let mut v: Vec<String> = Vec::new();
        for m in &cfg.models {
            for name in std::iter::once(&m.dependent).chain(&m.regressors) {
                if !v.contains(name) {
                    v.push(name.clone());
                }
            }
        }
        v
    };
    let tested: Vec<&TimeSeries> = if opts.unit_root_table {
        data.series().iter().collect()
    } else {
        model_vars.iter().map(|v| data.get(v)).collect::<Result<_>>()?
    };
    let (unit_root_table, integration) =
        unit_roots(cfg, &tested, opts.unit_root_table).map_err(|e| e.in_stage("unit_root"))?;
    for row in &integration {
        // A level rejection on an I(2) series is often spurious, so the difference decides.
        let suspect = row.order == IntegrationOrder::Higher || !row.difference_stationary;
        if suspect && model_vars.contains(&row.variable) {
            return Err(Error::I2VariablePresent(row.variable.clone()));
        }
    }

    let models: Vec<(ModelReport, Vec<String>)> = if opts.models {
        cfg.models
            .par_iter()
            .map(|m| run_model(cfg, m, &data, opts.force))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let mut model_reports = Vec::with_capacity(models.len());
    for (r, w) in models {
        model_reports.push(r);
        warnings.extend(w);
    }
    if opts.models && !cfg.models.is_empty() && !cfg.diagnostics.any() {
        warnings.push("diagnostics table omitted: all diagnostic tests are disabled".into());
    }

    let source = path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let index = data.index();
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        input: InputSummary {
            source,
            rows_read: prov.as_ref().map_or(raw.len(), |p| p.rows_read),
            rows_dropped: prov.as_ref().map_or(0, |p| p.rows_dropped),
            values_interpolated: prov.as_ref().map_or(0, |p| p.values_interpolated),
            missing_policy: cfg.input.missing,
            variables: data.series().iter().map(|s| s.name().to_string()).collect(),
            sample_start: index.first().map(|p| p.to_string()).unwrap_or_default(),
            sample_end: index.last().map(|p| p.to_string()).unwrap_or_default(),
            observations: data.len(),
        },
        settings: Settings {
            alpha: cfg.tests.alpha.clone(),
            decision_level: cfg.tests.decision,
            classification_test: cfg.unit_root.test,
            classification_spec: cfg.unit_root.spec,
        },
        unit_root_table,
        integration,
        models: model_reports,
        warnings,
    })
}

fn build_variables(cfg: &PipelineConfig, raw: &Dataset) -> Result<Dataset> {
    if cfg.variables.is_empty() {
        return Ok(raw.clone());
    }
    let mut built: Vec<TimeSeries> = Vec::new();
    for v in &cfg.variables {
        let source = v.source.as_deref().unwrap_or(&v.name);
        let base = match built.iter().find(|s| s.name() == source) {
            Some(s) => s.clone(),
            None => raw
                .get(source)
                .map_err(|_| Error::Config(format!("variable `{}`: no input column or variable `{source}`", v.name)))?
                .clone(),
        };
        let mut s = base;
        for t in &v.transforms {
            s = match t {
                Transform::Log => log_transform(&s)?,
                Transform::Difference => difference(&s, 1)?,
            };
        }
        built.push(s.renamed(&v.name));
    }
    let dependent = cfg
        .models
        .first()
        .map(|m| m.dependent.clone())
        .unwrap_or_else(|| built[0].name().to_string());
    Dataset::aligned(built, &dependent)
}

type UnitRootOutput = (Vec<UnitRootRow>, Vec<IntegrationRow>);

fn unit_roots(cfg: &PipelineConfig, series: &[&TimeSeries], full: bool) -> Result<UnitRootOutput> {
    let cls = cfg.classify();
    let mut specs = vec![DeterministicSpec::Constant, DeterministicSpec::ConstantAndTrend];
    if !specs.contains(&cls.spec) {
        specs.insert(0, cls.spec);
    }
    let per_var: Vec<(Vec<UnitRootRow>, IntegrationRow)> = series
        .par_iter()
        .map(|s| {
            let name = s.name();
            let classified = classify_integration(s, &cls).map_err(|e| e.in_stage(name.to_string()))?;
            let mut rows = Vec::new();
            if full {
                let diff = difference(s, 1)?;
                for test in [UnitRootTest::Adf, UnitRootTest::Pp] {
                    for (form, target) in [(SeriesForm::Level, *s), (SeriesForm::FirstDifference, &diff)] {
                        for &spec in &specs {
                            let row = if test == cls.test && spec == cls.spec {
                                let r = match form {
                                    SeriesForm::Level => &classified.level,
                                    SeriesForm::FirstDifference => &classified.first_difference,
                                };
                                UnitRootRow::from_result(name, form, r)
                            } else {
                                let c = ClassifyConfig { test, spec, ..cls };
                                let r = c.run(target).map_err(|e| e.in_stage(name.to_string()))?;
                                UnitRootRow::from_result(name, form, &r)
                            };
                            rows.push(row);
                        }
                    }
                }
            }
            Ok((
                rows,
                IntegrationRow {
                    variable: name.to_string(),
                    order: classified.order,
                    difference_stationary: classified.first_difference.stationary_at(cls.alpha),
                },
            ))
        })
        .collect::<Result<_>>()?;
    let mut table = Vec::new();
    let mut integration = Vec::new();
    for (rows, order) in per_var {
        table.extend(rows);
        integration.push(order);
    }
    Ok((table, integration))
}

fn fit_summary(fit: &RegressionResult) -> FitSummary {
    FitSummary {
        observations: fit.n,
        r_squared: fit.r_squared,
        adj_r_squared: fit.adj_r_squared,
        f_statistic: fit.f_statistic,
        durbin_watson: fit.durbin_watson,
        aic: fit.aic,
        sbc: fit.sbc,
    }
}

fn cells(fit: &RegressionResult, levels: &[Significance]) -> Vec<CoefficientCell> {
    fit.names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let se = fit.std_errors[i];
            let t = fit.t_stats[i];
            let df = (fit.n - fit.k) as f64;
            let p_value = if t.is_finite() {
                Distribution::StudentT { df }.survival(t)
            } else {
                None
            };
            CoefficientCell {
                name: name.clone(),
                estimate: fit.coefficients[i],
                std_error: se,
                t_stat: t.is_finite().then_some(t),
                p_value,
                significant_at: p_value
                    .map(|p| levels.iter().map(|&l| (l, p < l.alpha())).collect())
                    .unwrap_or_default(),
            }
        })
        .collect()
}

fn run_model(cfg: &PipelineConfig, m: &ModelConfig, data: &Dataset, force_all: bool) -> Result<(ModelReport, Vec<String>)> {
    let stage = |s: &str| format!("{}: {s}", m.name);
    let levels = &cfg.tests.alpha;
    let mut warnings = Vec::new();
    let case_defaulted = m.case.is_none();
    let case = m.case.unwrap_or(BoundsCase::UnrestrictedConstant);
    if case_defaulted {
        warnings.push(format!(
            "{}: bounds-test case not specified; using case III (unrestricted intercept, no trend)",
            m.name
        ));
    }
    let d = data.select(&m.dependent, &m.regressors).map_err(|e| e.in_stage(stage("selection")))?;
    let spec = match &m.lags {
        Some(l) => ArdlSpec {
            dependent: m.dependent.clone(),
            regressors: m.regressors.clone(),
            p: l.p,
            q: l.q.clone(),
            case,
        },
        None => select_lags(&d, &m.dependent, &m.regressors, m.max_p, m.max_q, m.criterion, case)
            .map_err(|e| e.in_stage(stage("lag selection")))?,
    };
    let model = estimate_ardl(&d, &spec).map_err(|e| e.in_stage(stage("estimation")))?;
    let bounds = bounds_test(&model, cfg.tests.decision).map_err(|e| e.in_stage(stage("bounds test")))?;
    if let Some([lo, hi]) = m.reference_bounds {
        warnings.push(format!(
            "{}: reference bounds {lo}-{hi} are shown for comparison only; the decision uses the tabulated case {} bounds",
            m.name, bounds.case
        ));
    }
    let force = m.force || force_all;
    let proceed = match bounds.decision {
        CointegrationDecision::Cointegrated => true,
        CointegrationDecision::Inconclusive => {
            warnings.push(format!(
                "{}: bounds test inconclusive at {} (F = {:.4} lies between the bounds)",
                m.name, cfg.tests.decision, bounds.f_statistic
            ));
            true
        }
        CointegrationDecision::NotCointegrated => {
            if force {
                warnings.push(format!(
                    "{}: no cointegration at {}; long-run and ECM tables reported because force is set",
                    m.name, cfg.tests.decision
                ));
            } else {
                warnings.push(format!(
                    "{}: no cointegration at {}; long-run and ECM tables omitted",
                    m.name, cfg.tests.decision
                ));
            }
            force
        }
    };

    let (long_run_cells, short_run) = if proceed {
        let lr = long_run(&model).map_err(|e| e.in_stage(stage("long run")))?;
        let ecm: EcmResult = estimate_ecm(&model).map_err(|e| e.in_stage(stage("ecm")))?;
        if ecm.non_negative_loading {
            warnings.push(format!(
                "{}: ECM(-1) loading {:.4} is not negative; no error correction",
                m.name, ecm.ecm_coefficient
            ));
        }
        let lr_cells = lr.coefficients.iter().map(|r| CoefficientCell::from_row(r, levels)).collect();
        let sr = ShortRunTable {
            coefficients: ecm.short_run.iter().map(|r| CoefficientCell::from_row(r, levels)).collect(),
            ecm: CoefficientCell::from_row(&ecm.ecm, levels),
            speed_of_adjustment_pct: ecm.speed_of_adjustment_pct(),
            one_step_lambda: ecm.one_step_lambda,
            identity_gap: ecm.identity_gap,
            fit: fit_summary(&ecm.fit),
        };
        (Some(lr_cells), Some(sr))
    } else {
        (None, None)
    };

    let diagnostics = if cfg.diagnostics.any() {
        let t = diagnostics_table(cfg, &model.levels_fit).map_err(|e| e.in_stage(stage("diagnostics")))?;
        for row in &t.tests {
            if row.decision_at.get(&cfg.tests.decision) == Some(&Decision::Reject) {
                warnings.push(format!("{}: {} rejects at {}", m.name, row.name, cfg.tests.decision));
            }
        }
        for s in &t.stability {
            if !s.stable {
                warnings.push(format!("{}: {} leaves its 5% band", m.name, s.name));
            }
        }
        Some(t)
    } else {
        None
    };

    let sample = &model.sample;
    let report = ModelReport {
        name: m.name.clone(),
        dependent: m.dependent.clone(),
        regressors: m.regressors.clone(),
        selection: Selection {
            criterion: m.lags.is_none().then_some(m.criterion),
            max_p: m.max_p,
            max_q: m.max_q,
            p: spec.p,
            q: spec.q.clone(),
            label: spec.label(),
        },
        sample_start: sample.first().map(|p| p.to_string()).unwrap_or_default(),
        sample_end: sample.last().map(|p| p.to_string()).unwrap_or_default(),
        n_effective: model.n_effective,
        conditional_ecm: cells(&model.levels_fit, levels),
        conditional_fit: fit_summary(&model.levels_fit),
        bounds: BoundsRow {
            f_statistic: bounds.f_statistic,
            k: bounds.k,
            case: bounds.case,
            case_defaulted,
            bounds: bounds.bounds.clone(),
            decision: bounds.decision,
            decision_at: bounds
                .decision_at
                .iter()
                .filter(|(l, _)| levels.contains(l))
                .map(|(l, d)| (*l, *d))
                .collect::<BTreeMap<_, _>>(),
            reference_bounds: m.reference_bounds,
        },
        long_run: long_run_cells,
        short_run,
        diagnostics,
    };
    Ok((report, warnings))
}

fn stability_row(s: &StabilityResult) -> StabilityRow {
    StabilityRow {
        name: s.name.clone(),
        stable: s.stable,
        first_crossing: s.first_crossing(),
        steps: s.path.len(),
    }
}

fn diagnostics_table(cfg: &PipelineConfig, fit: &RegressionResult) -> Result<DiagnosticsTable> {
    let t = &cfg.diagnostics;
    let levels = &cfg.tests.alpha;
    let mut tests = Vec::new();
    if t.serial_correlation {
        tests.push(breusch_godfrey(fit, t.serial_lags)?);
    }
    if t.functional_form {
        tests.push(ramsey_reset(fit, &t.reset_powers)?);
    }
    if t.normality {
        tests.push(jarque_bera(&fit.residuals)?);
    }
    if t.heteroscedasticity {
        tests.push(breusch_pagan(fit)?);
    }
    let mut stability = Vec::new();
    if t.cusum {
        stability.push(stability_row(&cusum(fit)?));
    }
    if t.cusumsq {
        stability.push(stability_row(&cusumsq(fit)?));
    }
    let passed = tests.iter().all(|s| !s.rejects_at(cfg.tests.decision)) && stability.iter().all(|s| s.stable);
    Ok(DiagnosticsTable {
        tests: tests.iter().map(|s| DiagnosticRow::from_test(s, levels)).collect(),
        stability,
        passed,
    })
}
