use crate::error::{Error, Result};

/// Bartlett-kernel (Newey–West) long-run variance with autocovariance divisor `n`:
/// `γ₀ + 2 Σ_{j=1..bw} (1 − j/(bw+1)) γ_j` on demeaned input.
pub fn newey_west_lrv(residuals: &[f64], bandwidth: usize) -> Result<f64> {
    let n = residuals.len();
    if n == 0 {
        return Err(Error::SampleTooShort("no residuals".into()));
    }
    if bandwidth >= n {
        return Err(Error::BandwidthTooLarge { bandwidth, len: n });
    }
    let mean = residuals.iter().sum::<f64>() / n as f64;
    let e: Vec<f64> = residuals.iter().map(|v| v - mean).collect();
    let autocov = |j: usize| e[j..].iter().zip(&e[..n - j]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
    let mut lrv = autocov(0);
    for j in 1..=bandwidth {
        let w = 1.0 - j as f64 / (bandwidth as f64 + 1.0);
        lrv += 2.0 * w * autocov(j);
    }
    Ok(lrv.max(0.0))
}

/// `floor(4 (n/100)^(2/9))`.
pub fn default_bandwidth(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

pub fn durbin_watson(residuals: &[f64]) -> Result<f64> {
    if residuals.len() < 2 {
        return Err(Error::SampleTooShort("Durbin-Watson needs two residuals".into()));
    }
    let ss: f64 = residuals.iter().map(|e| e * e).sum();
    if ss == 0.0 {
        return Err(Error::AllZeroResiduals);
    }
    let diff: f64 = residuals.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    Ok(diff / ss)
}
