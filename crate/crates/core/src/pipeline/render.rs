use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::report::*;
use crate::ardl::CointegrationDecision;
use crate::linreg::{Decision, Significance};
use crate::unitroot::{DeterministicSpec, IntegrationOrder, UnitRootTest, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format `{other}` (expected json or text)")),
        }
    }
}

pub fn render_report(r: &AnalysisReport, fmt: Format) -> String {
    match fmt {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => render_text(r),
    }
}

/// Stars for the most stringent level at which `hit` holds.
pub fn stars<F: Fn(Significance) -> bool>(levels: &[Significance], hit: F) -> &'static str {
    let mut sorted = levels.to_vec();
    sorted.sort();
    sorted.into_iter().find(|&l| hit(l)).map_or("", Significance::stars)
}

fn star_note(levels: &[Significance]) -> String {
    let mut sorted = levels.to_vec();
    sorted.sort();
    let parts: Vec<String> = sorted.iter().map(|l| format!("{} significant at {l}", l.stars())).collect();
    parts.join("; ")
}

fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut width: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (i, c) in row.iter().enumerate().take(cols) {
            width[i] = width[i].max(c.chars().count());
        }
    }
    let numeric: Vec<bool> = (0..cols)
        .map(|i| {
            i > 0
                && rows.iter().all(|r| {
                    r.get(i).is_none_or(|c| {
                        c.is_empty() || c.starts_with(|ch: char| ch.is_ascii_digit() || ch == '-' || ch == '+' || ch == '.')
                    })
                })
        })
        .collect();
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            let pad = " ".repeat(width[i] - c.chars().count());
            if i > 0 {
                s.push_str("  ");
            }
            if numeric[i] {
                s.push_str(&pad);
                s.push_str(c);
            } else {
                s.push_str(c);
                s.push_str(&pad);
            }
        }
        s.trim_end().to_string()
    };
    let total: usize = width.iter().sum::<usize>() + 2 * (cols - 1);
    let mut out = String::new();
    out.push_str(&line(headers.to_vec()));
    out.push('\n');
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

fn num(v: f64) -> String {
    format!("{v:.6}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), num)
}

fn test_name(t: UnitRootTest) -> &'static str {
    match t {
        UnitRootTest::Adf => "ADF",
        UnitRootTest::Pp => "PP",
    }
}

fn spec_name(s: DeterministicSpec) -> &'static str {
    match s {
        DeterministicSpec::None => "none",
        DeterministicSpec::Constant => "intercept",
        DeterministicSpec::ConstantAndTrend => "trend and intercept",
    }
}

fn heading(out: &mut String, title: &str) {
    out.push('\n');
    out.push_str(title);
    out.push('\n');
    out.push_str(&"=".repeat(title.chars().count()));
    out.push('\n');
}

fn coefficient_rows(cells: &[CoefficientCell], levels: &[Significance]) -> Vec<Vec<String>> {
    cells
        .iter()
        .map(|c| {
            let s = stars(levels, |l| c.significant_at.get(&l) == Some(&true));
            vec![
                c.name.clone(),
                format!("{}{s}", num(c.estimate)),
                num(c.std_error),
                opt(c.t_stat),
                opt(c.p_value),
            ]
        })
        .collect()
}

fn fit_lines(out: &mut String, f: &FitSummary) {
    let _ = writeln!(out, "R-squared            {}", num(f.r_squared));
    let _ = writeln!(out, "Adjusted R-squared   {}", num(f.adj_r_squared));
    let _ = writeln!(out, "F-statistic          {}", opt(f.f_statistic));
    let _ = writeln!(out, "Durbin-Watson        {}", opt(f.durbin_watson));
    let _ = writeln!(out, "Observations         {}", f.observations);
}

fn decision_text(d: CointegrationDecision) -> &'static str {
    match d {
        CointegrationDecision::Cointegrated => "cointegrated",
        CointegrationDecision::Inconclusive => "inconclusive",
        CointegrationDecision::NotCointegrated => "not cointegrated",
    }
}

fn render_text(r: &AnalysisReport) -> String {
    let levels = &r.settings.alpha;
    let mut out = String::new();
    let _ = writeln!(out, "ARDL analysis report (schema {})", r.schema_version);
    let _ = writeln!(
        out,
        "Input: {} ({} rows read, {} dropped, {} interpolated)",
        r.input.source, r.input.rows_read, r.input.rows_dropped, r.input.values_interpolated
    );
    let _ = writeln!(
        out,
        "Sample: {} to {}, {} observations; variables: {}",
        r.input.sample_start,
        r.input.sample_end,
        r.input.observations,
        r.input.variables.join(", ")
    );
    let _ = writeln!(out, "Decision level: {}", r.settings.decision_level);

    if !r.unit_root_table.is_empty() {
        heading(&mut out, "Unit root tests");
        let rows: Vec<Vec<String>> = r
            .unit_root_table
            .iter()
            .map(|u| {
                let s = stars(levels, |l| u.verdict_at.get(&l) == Some(&Verdict::Stationary));
                let cv = |l: Significance| u.critical_values.get(&l).map_or(String::new(), |v| format!("{v:.4}"));
                vec![
                    u.variable.clone(),
                    test_name(u.test).to_string(),
                    match u.form {
                        SeriesForm::Level => "level".to_string(),
                        SeriesForm::FirstDifference => "first difference".to_string(),
                    },
                    spec_name(u.spec).to_string(),
                    format!("{:.4}{s}", u.statistic),
                    u.lag_or_bandwidth.to_string(),
                    cv(Significance::Five),
                ]
            })
            .collect();
        out.push_str(&table(
            &["Variable", "Test", "Form", "Deterministics", "Statistic", "Lag/BW", "5% CV"],
            &rows,
        ));
        let _ = writeln!(out, "Note: {}; rejection of the unit-root null.", star_note(levels));
    }

    if !r.integration.is_empty() {
        heading(&mut out, "Integration order");
        let _ = writeln!(
            out,
            "Classified with {} ({}) at {}",
            test_name(r.settings.classification_test),
            spec_name(r.settings.classification_spec),
            r.settings.decision_level
        );
        let rows: Vec<Vec<String>> = r
            .integration
            .iter()
            .map(|i| {
                let o = match i.order {
                    IntegrationOrder::I0 => "I(0)",
                    IntegrationOrder::I1 => "I(1)",
                    IntegrationOrder::Higher => "I(2) or higher",
                };
                vec![i.variable.clone(), o.to_string()]
            })
            .collect();
        out.push_str(&table(&["Variable", "Order"], &rows));
    }

    for m in &r.models {
        render_model(&mut out, m, levels, r.settings.decision_level);
    }

    if !r.warnings.is_empty() {
        heading(&mut out, "Warnings");
        for w in &r.warnings {
            let _ = writeln!(out, "- {w}");
        }
    }
    out
}

fn render_model(out: &mut String, m: &ModelReport, levels: &[Significance], decision_level: Significance) {
    let how = match m.selection.criterion {
        Some(c) => format!("selected by {} over p <= {}, q <= {}", format!("{c:?}").to_uppercase(), m.selection.max_p, m.selection.max_q),
        None => "fixed lags".to_string(),
    };
    let spec = format!("{} on {}", m.dependent, m.regressors.join(", "));
    if m.name == spec {
        heading(out, &m.name);
    } else {
        heading(out, &format!("{}: {spec}", m.name));
    }
    let _ = writeln!(out, "{} {how}", m.selection.label);
    let _ = writeln!(out, "Sample {} to {} ({} observations)", m.sample_start, m.sample_end, m.n_effective);

    let b = &m.bounds;
    let _ = writeln!(out, "\nBounds test for cointegration");
    let s = stars(levels, |l| b.decision_at.get(&l) == Some(&CointegrationDecision::Cointegrated));
    let case_note = if b.case_defaulted { " (default)" } else { "" };
    let _ = writeln!(out, "F-statistic {:.4}{s}, k = {}, case {}{case_note}", b.f_statistic, b.k, b.case);
    let mut sorted: Vec<Significance> = levels.to_vec();
    sorted.sort();
    let rows: Vec<Vec<String>> = sorted
        .iter()
        .filter_map(|l| {
            let bd = b.bounds.get(l)?;
            let d = b.decision_at.get(l).copied()?;
            Some(vec![l.to_string(), format!("{:.2}", bd.lower), format!("{:.2}", bd.upper), decision_text(d).to_string()])
        })
        .collect();
    out.push_str(&table(&["Level", "I(0)", "I(1)", "Decision"], &rows));
    if let Some([lo, hi]) = b.reference_bounds {
        let _ = writeln!(out, "Reference bounds (not used for the decision): {lo} - {hi}");
    }
    let _ = writeln!(out, "Decision at {decision_level}: {}", decision_text(b.decision));

    if let Some(lr) = &m.long_run {
        let _ = writeln!(out, "\nEstimated long-run coefficients");
        out.push_str(&table(&["Variable", "Coefficient", "Std. Error", "t-Statistic", "Prob."], &coefficient_rows(lr, levels)));
    }
    if let Some(sr) = &m.short_run {
        let _ = writeln!(out, "\nEstimated short-run coefficients");
        let mut rows = coefficient_rows(&sr.coefficients, levels);
        rows.extend(coefficient_rows(std::slice::from_ref(&sr.ecm), levels));
        out.push_str(&table(&["Variable", "Coefficient", "Std. Error", "t-Statistic", "Prob."], &rows));
        fit_lines(out, &sr.fit);
        let _ = writeln!(
            out,
            "Speed of adjustment: about {:.1}% of a deviation from the long-run path is corrected each period.",
            sr.speed_of_adjustment_pct
        );
    }
    if let Some(d) = &m.diagnostics {
        let _ = writeln!(out, "\nModel diagnostics and stability tests");
        let mut rows: Vec<Vec<String>> = d
            .tests
            .iter()
            .map(|t| {
                let rejects = |l: Significance| t.decision_at.get(&l) == Some(&Decision::Reject);
                let decision = if rejects(decision_level) { "reject" } else { "do not reject" };
                vec![
                    t.name.clone(),
                    format!("{}{}", num(t.statistic), stars(levels, rejects)),
                    opt(t.p_value),
                    decision.to_string(),
                ]
            })
            .collect();
        for s in &d.stability {
            let status = if s.stable { "Stable" } else { "Unstable" };
            rows.push(vec![s.name.clone(), status.to_string(), String::new(), String::new()]);
        }
        out.push_str(&table(&["Test", "Statistic", "Prob.", "Decision"], &rows));
        let _ = writeln!(out, "Overall: {}", if d.passed { "pass" } else { "fail" });
    }
}

/// Star string for a unit-root statistic against its critical values.
pub fn unit_root_stars(statistic: f64, critical_values: &BTreeMap<Significance, f64>) -> &'static str {
    let levels: Vec<Significance> = critical_values.keys().copied().collect();
    stars(&levels, |l| critical_values.get(&l).is_some_and(|cv| statistic < *cv))
}
