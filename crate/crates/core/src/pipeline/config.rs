use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ardl::Criterion;
use crate::dataio::{DateFormat, IngestConfig, MissingPolicy};
use crate::error::{Error, Result};
use crate::linreg::Significance;
use crate::tables::BoundsCase;
use crate::unitroot::{ClassifyConfig, DeterministicSpec, LagRule, UnitRootTest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    /// CSV path, relative to the config file's directory.
    pub path: PathBuf,
    #[serde(default = "default_date_column")]
    pub date_column: String,
    #[serde(default)]
    pub date_format: DateFormat,
    #[serde(default)]
    pub value_columns: Option<Vec<String>>,
    #[serde(default)]
    pub missing: MissingPolicy,
}

fn default_date_column() -> String {
    "date".into()
}

impl InputConfig {
    pub fn ingest(&self) -> IngestConfig {
        IngestConfig {
            date_column: self.date_column.clone(),
            date_format: self.date_format,
            value_columns: self.value_columns.clone(),
            missing: self.missing,
            dependent: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    Log,
    Difference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableConfig {
    pub name: String,
    /// Input column or earlier variable; defaults to `name`.
    #[serde(default)]
    pub source: Option<String>,
    #[serde(default)]
    pub transforms: Vec<Transform>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UnitRootConfig {
    /// Test and deterministic spec used to classify integration order.
    pub test: UnitRootTest,
    pub spec: DeterministicSpec,
    pub max_lag: Option<usize>,
    pub rule: LagRule,
    pub bandwidth: Option<usize>,
}

impl Default for UnitRootConfig {
    fn default() -> Self {
        let c = ClassifyConfig::default();
        UnitRootConfig {
            test: c.test,
            spec: c.spec,
            max_lag: c.max_lag,
            rule: c.rule,
            bandwidth: c.bandwidth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedLags {
    pub p: usize,
    pub q: std::collections::BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    pub dependent: String,
    pub regressors: Vec<String>,
    #[serde(default = "default_max_lag")]
    pub max_p: usize,
    #[serde(default = "default_max_lag")]
    pub max_q: usize,
    #[serde(default)]
    pub criterion: Criterion,
    /// Bounds-test case; III when absent, and the report says so.
    #[serde(default)]
    pub case: Option<BoundsCase>,
    /// Skip lag selection.
    #[serde(default)]
    pub lags: Option<FixedLags>,
    /// Report long-run and ECM tables whatever the bounds decision.
    #[serde(default)]
    pub force: bool,
    /// Bounds quoted elsewhere, printed for comparison only.
    #[serde(default)]
    pub reference_bounds: Option<[f64; 2]>,
}

fn default_max_lag() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TestsConfig {
    /// Levels at which decisions are reported and starred.
    pub alpha: Vec<Significance>,
    /// Level driving classification, the bounds decision and the diagnostics verdict.
    pub decision: Significance,
}

impl Default for TestsConfig {
    fn default() -> Self {
        TestsConfig {
            alpha: Significance::ALL.to_vec(),
            decision: Significance::Five,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsToggles {
    pub serial_correlation: bool,
    pub functional_form: bool,
    pub normality: bool,
    pub heteroscedasticity: bool,
    pub cusum: bool,
    pub cusumsq: bool,
    pub serial_lags: usize,
    pub reset_powers: Vec<u32>,
}

impl Default for DiagnosticsToggles {
    fn default() -> Self {
        DiagnosticsToggles {
            serial_correlation: true,
            functional_form: true,
            normality: true,
            heteroscedasticity: true,
            cusum: true,
            cusumsq: true,
            serial_lags: 2,
            reset_powers: vec![2],
        }
    }
}

impl DiagnosticsToggles {
    pub fn any(&self) -> bool {
        self.serial_correlation || self.functional_form || self.normality || self.heteroscedasticity || self.cusum || self.cusumsq
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub json: Option<PathBuf>,
    #[serde(default)]
    pub text: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: InputConfig,
    #[serde(default)]
    pub variables: Vec<VariableConfig>,
    #[serde(default)]
    pub unit_root: UnitRootConfig,
    #[serde(default)]
    pub models: Vec<ModelConfig>,
    #[serde(default)]
    pub tests: TestsConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsToggles,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl PipelineConfig {
    /// Reads TOML, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        if !path.exists() {
            return Err(Error::Config(format!("config file {} not found", path.display())));
        }
        let text = std::fs::read_to_string(path)?;
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let mut cfg = if json {
            PipelineConfig::from_json(&text)?
        } else {
            PipelineConfig::from_toml(&text)?
        };
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<PipelineConfig> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<PipelineConfig> {
        let cfg: PipelineConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn classify(&self) -> ClassifyConfig {
        ClassifyConfig {
            test: self.unit_root.test,
            spec: self.unit_root.spec,
            alpha: self.tests.decision,
            max_lag: self.unit_root.max_lag,
            rule: self.unit_root.rule,
            bandwidth: self.unit_root.bandwidth,
        }
    }

    /// Checks that need no data.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.tests.alpha.is_empty() {
            return bad("tests.alpha must list at least one level".into());
        }
        if !self.tests.alpha.contains(&self.tests.decision) {
            return bad(format!("decision level {} is not among tests.alpha", self.tests.decision));
        }
        let mut defined = BTreeSet::new();
        for v in &self.variables {
            if !defined.insert(v.name.as_str()) {
                return bad(format!("variable `{}` defined twice", v.name));
            }
        }
        let mut names = BTreeSet::new();
        for m in &self.models {
            if !names.insert(m.name.as_str()) {
                return bad(format!("model `{}` defined twice", m.name));
            }
            if m.regressors.is_empty() {
                return bad(format!("model `{}` has no regressors", m.name));
            }
            if m.max_p < 1 {
                return bad(format!("model `{}`: max_p must be at least 1", m.name));
            }
            if m.regressors.contains(&m.dependent) {
                return bad(format!("model `{}`: dependent also listed as a regressor", m.name));
            }
            if let Some(l) = &m.lags {
                if l.p < 1 || l.q.len() != m.regressors.len() || m.regressors.iter().any(|r| !l.q.contains_key(r)) {
                    return bad(format!("model `{}`: fixed lags need p >= 1 and one q per regressor", m.name));
                }
            }
            if let Some([lo, hi]) = m.reference_bounds {
                if lo > hi {
                    return bad(format!("model `{}`: reference bounds are reversed", m.name));
                }
            }
            if !self.variables.is_empty() {
                for v in std::iter::once(&m.dependent).chain(&m.regressors) {
                    if !defined.contains(v.as_str()) {
                        return bad(format!("model `{}` references undefined variable `{v}`", m.name));
                    }
                }
            }
        }
        if self.diagnostics.serial_lags == 0 {
            return bad("diagnostics.serial_lags must be at least 1".into());
        }
        if self.diagnostics.reset_powers.is_empty() || self.diagnostics.reset_powers.iter().any(|p| !(2..=4).contains(p)) {
            return bad("diagnostics.reset_powers must be a non-empty subset of [2, 3, 4]".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[input]
path = "data.csv"

[[variables]]
name = "LNY"
source = "y"
transforms = ["log"]

[[variables]]
name = "x"

[[models]]
name = "Model 1"
dependent = "LNY"
regressors = ["x"]
criterion = "sbc"
case = "II"
"#;

    #[test]
    fn parses_minimal_toml() {
        let cfg = PipelineConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.models[0].criterion, Criterion::Sbc);
        assert_eq!(cfg.models[0].case, Some(BoundsCase::RestrictedConstant));
        assert_eq!(cfg.models[0].max_p, 4);
        assert_eq!(cfg.tests.decision, Significance::Five);
        assert_eq!(cfg.variables[0].transforms, vec![Transform::Log]);
        assert!(cfg.diagnostics.any());
    }

    #[test]
    fn json_is_the_same_schema() {
        let cfg = PipelineConfig::from_toml(MINIMAL).unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(PipelineConfig::from_json(&json).unwrap(), cfg);
    }

    #[test]
    fn undefined_variable_rejected() {
        let text = MINIMAL.replace("regressors = [\"x\"]", "regressors = [\"z\"]");
        match PipelineConfig::from_toml(&text) {
            Err(Error::Config(m)) => assert!(m.contains("undefined variable `z`")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_levels_and_fields_rejected() {
        let text = format!("{MINIMAL}\n[tests]\nalpha = [\"2%\"]\n");
        assert!(matches!(PipelineConfig::from_toml(&text), Err(Error::Config(_))));
        let text = format!("{MINIMAL}\n[tests]\nalpha = [\"1%\"]\ndecision = \"5%\"\n");
        assert!(matches!(PipelineConfig::from_toml(&text), Err(Error::Config(_))));
        let text = MINIMAL.replace("criterion = \"sbc\"", "criterion = \"sbc\"\nbogus = 1");
        assert!(matches!(PipelineConfig::from_toml(&text), Err(Error::Config(_))));
    }
}
