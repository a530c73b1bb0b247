//! Least squares with full inference, information criteria, Wald F tests and
//! the long-run variance estimator used by the Phillips–Perron correction.
//!
//! The solver is a Householder QR of the design matrix. Normal equations are
//! never formed, so the condition number enters once rather than squared.
//! A column is declared collinear when its diagonal element of `R` is at most
//! `1e-10` times the largest column norm.

mod hac;
mod inference;

pub use hac::{default_bandwidth, durbin_watson, newey_west_lrv};
pub use inference::{Decision, Distribution, Significance, TestStatistic};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Rank tolerance relative to the largest column norm.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Residual sum of squares below `PERFECT_FIT_TOLERANCE * y'y` is treated as an exact fit.
pub const PERFECT_FIT_TOLERANCE: f64 = 1e-20;

pub const CONSTANT: &str = "C";

/// Named regressor columns of equal length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignMatrix {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    n: usize,
}

impl DesignMatrix {
    /// An empty design over `n` observations.
    pub fn new(n: usize) -> DesignMatrix {
        DesignMatrix {
            names: Vec::new(),
            columns: Vec::new(),
            n,
        }
    }

    pub fn from_columns<S: Into<String>>(cols: Vec<(S, Vec<f64>)>) -> Result<DesignMatrix> {
        let n = cols.first().map(|c| c.1.len()).unwrap_or(0);
        let mut d = DesignMatrix::new(n);
        for (name, col) in cols {
            d.push(name, col)?;
        }
        Ok(d)
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "column `{name}` has {} rows, design has {}",
                values.len(),
                self.n
            )));
        }
        if self.names.contains(&name) {
            return Err(Error::DimensionMismatch(format!("duplicate column name `{name}`")));
        }
        self.names.push(name);
        self.columns.push(values);
        Ok(())
    }

    pub fn with(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<DesignMatrix> {
        self.push(name, values)?;
        Ok(self)
    }

    pub fn push_constant(&mut self) -> Result<()> {
        self.push(CONSTANT, vec![1.0; self.n])
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.position(name).map(|j| self.columns[j].as_slice())
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.columns.len()
    }

    /// True when some column is a non-zero constant.
    pub fn has_constant(&self) -> bool {
        self.columns
            .iter()
            .any(|c| c.first().is_some_and(|&v| v != 0.0 && c.iter().all(|&x| x == v)))
    }

    /// Copy of the design without the named columns.
    pub fn without(&self, drop: &[String]) -> DesignMatrix {
        let mut d = DesignMatrix::new(self.n);
        for (name, col) in self.names.iter().zip(&self.columns) {
            if !drop.contains(name) {
                d.names.push(name.clone());
                d.columns.push(col.clone());
            }
        }
        d
    }

    /// Rows `0..m`.
    pub fn head(&self, m: usize) -> DesignMatrix {
        DesignMatrix {
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| c[..m].to_vec()).collect(),
            n: m,
        }
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.k(), |i, j| self.columns[j][i])
    }
}

/// OLS estimates with the usual inference payload.
///
/// `sigma2` is `RSS / (n - k)`; the log-likelihood uses the ML variance
/// `RSS / n`. R² is centred when the design has a constant column and
/// uncentred otherwise.
#[derive(Debug, Clone, Serialize)]
pub struct RegressionResult {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// `NaN` where the standard error is zero.
    pub t_stats: Vec<f64>,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    pub rss: f64,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    /// Overall significance F of all non-constant regressors; `None` when
    /// there are none or the fit is exact.
    pub f_statistic: Option<f64>,
    /// `None` when every residual is zero.
    pub durbin_watson: Option<f64>,
    pub log_likelihood: f64,
    pub aic: f64,
    pub sbc: f64,
    pub sigma2: f64,
    pub cov_matrix: Vec<Vec<f64>>,
    pub n: usize,
    pub k: usize,
    pub has_constant: bool,
    #[serde(skip)]
    pub y: Vec<f64>,
    #[serde(skip)]
    pub design: DesignMatrix,
}

impl RegressionResult {
    pub fn position(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownCoefficient(name.to_string()))
    }

    pub fn coef(&self, name: &str) -> Result<f64> {
        Ok(self.coefficients[self.position(name)?])
    }

    pub fn std_error(&self, name: &str) -> Result<f64> {
        Ok(self.std_errors[self.position(name)?])
    }

    pub fn t_stat(&self, name: &str) -> Result<f64> {
        Ok(self.t_stats[self.position(name)?])
    }

    pub fn covariance(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.cov_matrix[self.position(a)?][self.position(b)?])
    }

    pub fn is_perfect_fit(&self) -> bool {
        is_negligible(self.rss, &self.y)
    }
}

fn is_negligible(rss: f64, y: &[f64]) -> bool {
    let yy: f64 = y.iter().map(|v| v * v).sum();
    rss <= PERFECT_FIT_TOLERANCE * yy.max(f64::MIN_POSITIVE)
}

/// Fits `y` on the columns of `x` by least squares.
pub fn ols(y: &[f64], x: &DesignMatrix) -> Result<RegressionResult> {
    let n = x.n();
    let k = x.k();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "y has {} observations, design has {n}",
            y.len()
        )));
    }
    if n <= k {
        return Err(Error::SampleTooShort(format!(
            "{n} observations for {k} regressors"
        )));
    }

    let (beta, xtx_inv) = if k == 0 {
        (Vec::new(), DMatrix::zeros(0, 0))
    } else {
        solve_qr(y, x)?
    };

    let fitted: Vec<f64> = (0..n)
        .map(|i| (0..k).map(|j| x.columns()[j][i] * beta[j]).sum())
        .collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let perfect = is_negligible(rss, y);

    let has_constant = x.has_constant();
    let nf = n as f64;
    let df_resid = (n - k) as f64;
    let df_model = k - usize::from(has_constant);
    let tss = if has_constant {
        let mean = y.iter().sum::<f64>() / nf;
        y.iter().map(|v| (v - mean).powi(2)).sum()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    let r_squared = if df_model == 0 {
        0.0
    } else if tss > 0.0 {
        (1.0 - rss / tss).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (nf - f64::from(u8::from(has_constant))) / df_resid;
    let f_statistic = if df_model == 0 || perfect {
        None
    } else {
        Some((r_squared / df_model as f64) / ((1.0 - r_squared) / df_resid))
    };

    let sigma2 = rss / df_resid;
    let cov: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| sigma2 * xtx_inv[(i, j)]).collect())
        .collect();
    let std_errors: Vec<f64> = (0..k).map(|j| cov[j][j].max(0.0).sqrt()).collect();
    let t_stats = beta
        .iter()
        .zip(&std_errors)
        .map(|(b, s)| if *s > 0.0 { b / s } else { f64::NAN })
        .collect();

    let log_likelihood =
        -0.5 * nf * ((2.0 * std::f64::consts::PI).ln() + (rss / nf).ln() + 1.0);
    let (aic, sbc) = criteria(log_likelihood, k, n);
    let durbin_watson = if perfect {
        None
    } else {
        durbin_watson(&residuals).ok()
    };

    Ok(RegressionResult {
        names: x.names().to_vec(),
        coefficients: beta,
        std_errors,
        t_stats,
        residuals,
        fitted,
        rss,
        r_squared,
        adj_r_squared,
        f_statistic,
        durbin_watson,
        log_likelihood,
        aic,
        sbc,
        sigma2,
        cov_matrix: cov,
        n,
        k,
        has_constant,
        y: y.to_vec(),
        design: x.clone(),
    })
}

/// Coefficients and `(X'X)^{-1}` via Householder QR.
fn solve_qr(y: &[f64], x: &DesignMatrix) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let k = x.k();
    let xm = x.to_matrix();
    let max_norm = (0..k).map(|j| xm.column(j).norm()).fold(0.0, f64::max);
    let qr = xm.qr();
    let r = qr.r();
    let tol = RANK_TOLERANCE * max_norm;
    let collinear: Vec<String> = (0..k)
        .filter(|&j| !(r[(j, j)].abs() > tol))
        .map(|j| x.names()[j].clone())
        .collect();
    if !collinear.is_empty() {
        return Err(Error::RankDeficient { columns: collinear });
    }
    let mut qty = DVector::from_column_slice(y);
    qr.q_tr_mul(&mut qty);
    let head = qty.rows(0, k).into_owned();
    let beta = r
        .solve_upper_triangular(&head)
        .ok_or_else(|| Error::RankDeficient { columns: x.names().to_vec() })?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::RankDeficient { columns: x.names().to_vec() })?;
    let xtx_inv = &r_inv * r_inv.transpose();
    Ok((beta.iter().copied().collect(), xtx_inv))
}

fn criteria(log_likelihood: f64, k: usize, n: usize) -> (f64, f64) {
    let k = k as f64;
    (
        -2.0 * log_likelihood + 2.0 * k,
        -2.0 * log_likelihood + k * (n as f64).ln(),
    )
}

/// `aic = -2 logL + 2k`, `sbc = -2 logL + k ln n`.
pub fn information_criteria(rr: &RegressionResult) -> (f64, f64) {
    criteria(rr.log_likelihood, rr.k, rr.n)
}

/// Same conventions from raw inputs.
pub fn information_criteria_from(log_likelihood: f64, k: usize, n: usize) -> (f64, f64) {
    criteria(log_likelihood, k, n)
}

/// Whether the Wald statistic feeds a bounds test (tabulated, no p-value)
/// or an ordinary F test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaldContext {
    Standard,
    Bounds,
}

/// F test of `H0: every named coefficient is zero`, by refitting without them.
pub fn wald_f_test(
    rr: &RegressionResult,
    restricted: &[String],
    context: WaldContext,
) -> Result<TestStatistic> {
    if restricted.is_empty() {
        return Err(Error::InvalidParameters("no restrictions given".into()));
    }
    for name in restricted {
        rr.position(name)?;
    }
    if rr.is_perfect_fit() {
        return Err(Error::PerfectFitDegenerate);
    }
    let q = restricted.len();
    let reduced = rr.design.without(restricted);
    let rss_r = if reduced.k() == 0 {
        rr.y.iter().map(|v| v * v).sum()
    } else {
        match ols(&rr.y, &reduced) {
            Ok(fit) => fit.rss,
            Err(Error::RankDeficient { columns }) => {
                return Err(Error::DegenerateRestriction(format!(
                    "collinear columns {}",
                    columns.join(", ")
                )))
            }
            Err(e) => return Err(e),
        }
    };
    let df2 = (rr.n - rr.k) as f64;
    let f = ((rss_r - rr.rss).max(0.0) / q as f64) / (rr.rss / df2);
    let dist = match context {
        WaldContext::Standard => Distribution::F {
            d1: q as f64,
            d2: df2,
        },
        WaldContext::Bounds => Distribution::NonstandardTabulated,
    };
    Ok(TestStatistic::new(
        format!("Wald F({})", restricted.join(", ")),
        f,
        dist,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn design(cols: &[(&str, &[f64])]) -> DesignMatrix {
        DesignMatrix::from_columns(cols.iter().map(|(n, c)| (*n, c.to_vec())).collect()).unwrap()
    }

    fn with_const(x: &[f64]) -> DesignMatrix {
        design(&[("C", &vec![1.0; x.len()]), ("x", x)])
    }

    #[test]
    fn exact_line() {
        let rr = ols(&[2.0, 4.0, 6.0], &with_const(&[1.0, 2.0, 3.0])).unwrap();
        assert!(rr.coef("C").unwrap().abs() < 1e-12);
        assert!((rr.coef("x").unwrap() - 2.0).abs() < 1e-12);
        assert!((rr.r_squared - 1.0).abs() < 1e-12);
        assert!(rr.is_perfect_fit());
        assert_eq!(rr.durbin_watson, None);
    }

    #[test]
    fn constant_only() {
        let rr = ols(&[5.0; 4], &design(&[("C", &[1.0; 4])])).unwrap();
        assert!((rr.coef("C").unwrap() - 5.0).abs() < 1e-12);
        assert!(rr.residuals.iter().all(|e| e.abs() < 1e-12));
        assert_eq!(rr.r_squared, 0.0);
        assert_eq!(rr.f_statistic, None);
    }

    #[test]
    fn four_point_fixture() {
        // Normal equations: [4 10; 10 30] b = [17 51] => b = (0, 1.7).
        let rr = ols(&[2.0, 3.0, 5.0, 7.0], &with_const(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        assert!(rr.coef("C").unwrap().abs() < 1e-12);
        assert!((rr.coef("x").unwrap() - 1.7).abs() < 1e-12);
        assert!((rr.rss - 0.3).abs() < 1e-12);
        assert!((rr.r_squared - (1.0 - 0.3 / 14.75)).abs() < 1e-12);
        // se(slope) = sqrt(sigma2 / Sxx) = sqrt(0.15 / 5)
        assert!((rr.std_error("x").unwrap() - (0.15f64 / 5.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rank_deficiency_names_column() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let d = design(&[("C", &[1.0; 5]), ("x", &x), ("x_dup", &x)]);
        match ols(&[1.0, 2.0, 2.0, 3.0, 5.0], &d) {
            Err(Error::RankDeficient { columns }) => assert_eq!(columns, vec!["x_dup"]),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
        assert!(matches!(
            ols(&[1.0, 2.0], &with_const(&[1.0, 2.0, 3.0])),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn criteria_conventions() {
        let (aic, sbc) = information_criteria_from(-100.0, 3, 50);
        assert_eq!(aic, 206.0);
        assert!((sbc - (200.0 + 3.0 * 50f64.ln())).abs() < 1e-12);
        assert!((sbc - 211.736_069_0).abs() < 1e-6);
        let (aic, sbc) = information_criteria_from(-100.0, 0, 50);
        assert_eq!((aic, sbc), (200.0, 200.0));
        let (_, small) = information_criteria_from(-50.0, 2, 10);
        let (_, big) = information_criteria_from(-50.0, 3, 10);
        assert!(small < big);
    }

    #[test]
    fn wald_zero_when_coefficient_irrelevant() {
        // z is orthogonal to both the constant and y.
        let y = [1.0, 2.0, 3.0, 4.0];
        let d = design(&[("C", &[1.0; 4]), ("z", &[1.0, -1.0, -1.0, 1.0])]);
        let rr = ols(&y, &d).unwrap();
        let t = wald_f_test(&rr, &["z".to_string()], WaldContext::Standard).unwrap();
        assert!(t.statistic.abs() < 1e-12);
        assert!((t.p_value.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wald_perfect_fit_is_error() {
        let rr = ols(&[2.0, 4.0, 6.0], &with_const(&[1.0, 2.0, 3.0])).unwrap();
        assert!(matches!(
            wald_f_test(&rr, &["x".to_string()], WaldContext::Standard),
            Err(Error::PerfectFitDegenerate)
        ));
        assert!(matches!(
            wald_f_test(&rr, &["nope".to_string()], WaldContext::Standard),
            Err(Error::UnknownCoefficient(_))
        ));
    }

    #[test]
    fn wald_four_point_fixture() {
        // RSS_u = 0.3, RSS_r = TSS = 14.75, q = 1, n - k = 2.
        let rr = ols(&[2.0, 3.0, 5.0, 7.0], &with_const(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        let t = wald_f_test(&rr, &["x".to_string()], WaldContext::Standard).unwrap();
        assert!((t.statistic - (14.45 / 0.15)).abs() < 1e-9);
        assert_eq!(t.distribution, Distribution::F { d1: 1.0, d2: 2.0 });
        let b = wald_f_test(&rr, &["x".to_string()], WaldContext::Bounds).unwrap();
        assert_eq!(b.distribution, Distribution::NonstandardTabulated);
        assert!(b.p_value.is_none());
    }

    fn arb_problem() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
        (8usize..40).prop_flat_map(|n| {
            (
                prop::collection::vec(-10.0f64..10.0, n),
                prop::collection::vec(-10.0f64..10.0, n),
                prop::collection::vec(-10.0f64..10.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn ols_invariants((y, x1, x2) in arb_problem()) {
            let d = design(&[("C", &vec![1.0; y.len()]), ("x1", &x1), ("x2", &x2)]);
            let rr = match ols(&y, &d) { Ok(r) => r, Err(_) => return Ok(()) };
            let scale: f64 = y.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
            for col in d.columns() {
                let dot: f64 = col.iter().zip(&rr.residuals).map(|(a, b)| a * b).sum();
                let cscale: f64 = col.iter().map(|v| v.abs()).sum::<f64>();
                prop_assert!(dot.abs() <= 1e-8 * scale * cscale.max(1.0));
            }
            for i in 0..y.len() {
                prop_assert!((rr.fitted[i] + rr.residuals[i] - y[i]).abs() <= 1e-10 * (1.0 + y[i].abs()));
            }
            for j in 0..rr.k {
                prop_assert!((rr.cov_matrix[j][j].sqrt() - rr.std_errors[j]).abs() <= 1e-12 * (1.0 + rr.std_errors[j]));
                for i in 0..rr.k {
                    prop_assert!((rr.cov_matrix[i][j] - rr.cov_matrix[j][i]).abs() <= 1e-10 * (1.0 + rr.cov_matrix[i][j].abs()));
                }
                if rr.std_errors[j] > 0.0 {
                    prop_assert!((rr.t_stats[j] - rr.coefficients[j] / rr.std_errors[j]).abs() <= 1e-10 * (1.0 + rr.t_stats[j].abs()));
                }
            }
            if let Some(dw) = rr.durbin_watson {
                prop_assert!((0.0..=4.0).contains(&dw));
            }
            prop_assert!((0.0..=1.0).contains(&rr.r_squared));

            // Regressing the fitted values reproduces the coefficients.
            let again = ols(&rr.fitted, &d).unwrap();
            for (a, b) in again.coefficients.iter().zip(&rr.coefficients) {
                prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn scale_equivariance((y, x1, x2) in arb_problem(), c in prop_oneof![-50.0f64..-0.1, 0.1f64..50.0]) {
            let d = design(&[("C", &vec![1.0; y.len()]), ("x1", &x1), ("x2", &x2)]);
            let rr = match ols(&y, &d) { Ok(r) if !r.is_perfect_fit() => r, _ => return Ok(()) };
            let yc: Vec<f64> = y.iter().map(|v| v * c).collect();
            let rc = ols(&yc, &d).unwrap();
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-10 * (1.0 + a.abs().max(b.abs()));
            for j in 0..rr.k {
                prop_assert!(close(rc.coefficients[j], c * rr.coefficients[j]));
                prop_assert!(close(rc.std_errors[j], c.abs() * rr.std_errors[j]));
                prop_assert!(close(rc.t_stats[j], c.signum() * rr.t_stats[j]));
            }
            prop_assert!(close(rc.r_squared, rr.r_squared));
            prop_assert!(close(rc.durbin_watson.unwrap(), rr.durbin_watson.unwrap()));
            prop_assert!(close(rc.f_statistic.unwrap(), rr.f_statistic.unwrap()));
        }

        #[test]
        fn extra_regressor_never_hurts((y, x1, x2) in arb_problem()) {
            let small = design(&[("C", &vec![1.0; y.len()]), ("x1", &x1)]);
            let big = design(&[("C", &vec![1.0; y.len()]), ("x1", &x1), ("x2", &x2)]);
            if let (Ok(a), Ok(b)) = (ols(&y, &small), ols(&y, &big)) {
                prop_assert!(b.rss <= a.rss * (1.0 + 1e-12) + 1e-12);
                prop_assert!(b.r_squared + 1e-12 >= a.r_squared);
            }
        }
    }
}
