//! Seeded data-generating processes and a replication harness.
//!
//! Random streams are pinned so fixtures can be regenerated elsewhere:
//!
//! * generator: ChaCha20 block function (as implemented by `rand_chacha`),
//!   32-byte key = the seed as little-endian `u64` in bytes 0..8, zeros elsewhere,
//!   stream 0, counter 0; `next_u64` joins two consecutive 32-bit words, low word first;
//! * uniform: `(next_u64 >> 11) * 2^-53`, in `[0, 1)`;
//! * normal: Box–Muller on a pair `(u1, u2)`:
//!   `r = sqrt(-2 ln(1 - u1))`, emitting `r cos(2π u2)` then `r sin(2π u2)`;
//! * replication `r` of a study seeded with `s` uses `splitmix64(s + (r + 1) * 0x9E3779B97F4A7C15)`.
//!
//! Within one step of a multi-series process, draws are taken in the order the
//! series are listed in the documentation of each [`DgpKind`] variant.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataio::{Dataset, Frequency, Period, TimeSeries};
use crate::error::{Error, Result};

pub const BURN_IN: usize = 100;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `r` in a study seeded with `seed`.
pub fn replication_seed(seed: u64, r: u64) -> u64 {
    splitmix64(seed.wrapping_add(r.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Standard normal draws from the pinned ChaCha20 stream.
pub struct GaussianStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> GaussianStream {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        GaussianStream {
            rng: ChaCha20Rng::from_seed(key),
            spare: None,
        }
    }

    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn take_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_normal()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DgpKind {
    /// `y_t = y_{t-1} + drift + sigma e_t`, `y_0 = sigma e_0`. Series `y`.
    RandomWalk {
        #[serde(default)]
        drift: f64,
        #[serde(default = "one")]
        sigma: f64,
    },
    /// `y_t = c + phi y_{t-1} + sigma e_t`, started at the mean. Series `y`.
    Ar1 {
        phi: f64,
        #[serde(default)]
        c: f64,
        #[serde(default = "one")]
        sigma: f64,
    },
    /// `x_t = x_{t-1} + sigma_x u_t`;
    /// `y_t = y_{t-1} + adjustment (y_{t-1} - beta x_{t-1}) + sigma_y e_t`.
    /// Draw order per step: `u`, then `e`. Series `y`, `x`.
    CointegratedPair {
        beta: f64,
        adjustment: f64,
        #[serde(default = "one")]
        sigma_x: f64,
        #[serde(default = "one")]
        sigma_y: f64,
    },
    /// `x_t = x_{t-1} + sigma_x u_t`;
    /// `y_t = constant + Σ_i phi_i y_{t-i} + Σ_{j=0..q} theta_j x_{t-j} + sigma e_t`.
    /// Draw order per step: `u`, then `e`. Series `y`, `x`.
    Ardl {
        #[serde(default)]
        constant: f64,
        phi: Vec<f64>,
        theta: Vec<f64>,
        #[serde(default = "one")]
        sigma: f64,
        #[serde(default = "one")]
        sigma_x: f64,
    },
    /// `x_t ~ N(0,1)`; `y_t = a + b x_t + sigma e_t` with `(a, b) = pre` for
    /// `t < break_at` and `post` afterwards. Draw order per step: `x`, then `e`.
    /// Series `y`, `x`.
    BreakModel {
        break_at: usize,
        pre: [f64; 2],
        post: [f64; 2],
        #[serde(default = "one")]
        sigma: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dgp {
    #[serde(flatten)]
    pub kind: DgpKind,
    pub t: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Dgp {
    pub fn new(kind: DgpKind, t: usize, seed: u64) -> Dgp {
        Dgp { kind, t, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameters(m));
        if self.t < 20 {
            return bad(format!("T = {} but at least 20 observations are required", self.t));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameters(format!("{name} must be positive")))
            }
        };
        match &self.kind {
            DgpKind::RandomWalk { sigma, .. } => positive("sigma", *sigma),
            DgpKind::Ar1 { phi, sigma, .. } => {
                if phi.abs() >= 1.0 {
                    return bad(format!("ar1 needs |phi| < 1, got {phi}"));
                }
                positive("sigma", *sigma)
            }
            DgpKind::CointegratedPair {
                adjustment,
                sigma_x,
                sigma_y,
                ..
            } => {
                if !(*adjustment > -2.0 && *adjustment < 0.0) {
                    return bad(format!("adjustment must lie in (-2, 0), got {adjustment}"));
                }
                positive("sigma_x", *sigma_x)?;
                positive("sigma_y", *sigma_y)
            }
            DgpKind::Ardl {
                phi,
                theta,
                sigma,
                sigma_x,
                ..
            } => {
                if phi.is_empty() || theta.is_empty() {
                    return bad("ardl needs at least one phi and one theta".into());
                }
                if phi.iter().map(|p| p.abs()).sum::<f64>() >= 1.0 {
                    return bad("ardl needs sum |phi_i| < 1".into());
                }
                positive("sigma", *sigma)?;
                positive("sigma_x", *sigma_x)
            }
            DgpKind::BreakModel { break_at, sigma, .. } => {
                if *break_at == 0 || *break_at >= self.t {
                    return bad(format!("break point {break_at} outside 1..{}", self.t));
                }
                positive("sigma", *sigma)
            }
        }
    }
}

fn start_period() -> Period {
    Period {
        year: 2000,
        sub: 1,
        freq: Frequency::Monthly,
    }
}

/// Deterministic dataset for `dgp`; dependent series is `y`.
pub fn generate(dgp: &Dgp) -> Result<Dataset> {
    dgp.validate()?;
    let t = dgp.t;
    let mut g = GaussianStream::new(dgp.seed);
    let (y, x) = match &dgp.kind {
        DgpKind::RandomWalk { drift, sigma } => {
            let mut y = Vec::with_capacity(t);
            let mut level = sigma * g.next_normal();
            y.push(level);
            for _ in 1..t {
                level += drift + sigma * g.next_normal();
                y.push(level);
            }
            (y, None)
        }
        DgpKind::Ar1 { phi, c, sigma } => {
            let mut level = c / (1.0 - phi);
            let mut y = Vec::with_capacity(t);
            for step in 0..BURN_IN + t {
                level = c + phi * level + sigma * g.next_normal();
                if step >= BURN_IN {
                    y.push(level);
                }
            }
            (y, None)
        }
        DgpKind::CointegratedPair {
            beta,
            adjustment,
            sigma_x,
            sigma_y,
        } => {
            let (mut xl, mut yl) = (0.0, 0.0);
            let (mut y, mut x) = (Vec::with_capacity(t), Vec::with_capacity(t));
            for step in 0..BURN_IN + t {
                let u = g.next_normal();
                let e = g.next_normal();
                let ynew = yl + adjustment * (yl - beta * xl) + sigma_y * e;
                xl += sigma_x * u;
                yl = ynew;
                if step >= BURN_IN {
                    y.push(yl);
                    x.push(xl);
                }
            }
            (y, Some(x))
        }
        DgpKind::Ardl {
            constant,
            phi,
            theta,
            sigma,
            sigma_x,
        } => {
            let total = BURN_IN + t;
            let warm = phi.len().max(theta.len());
            let mut xs = vec![0.0; total + warm];
            let mut ys = vec![0.0; total + warm];
            for s in warm..total + warm {
                xs[s] = xs[s - 1] + sigma_x * g.next_normal();
                let mut v = constant + sigma * g.next_normal();
                for (i, p) in phi.iter().enumerate() {
                    v += p * ys[s - 1 - i];
                }
                for (j, th) in theta.iter().enumerate() {
                    v += th * xs[s - j];
                }
                ys[s] = v;
            }
            let from = warm + BURN_IN;
            (ys[from..].to_vec(), Some(xs[from..].to_vec()))
        }
        DgpKind::BreakModel {
            break_at,
            pre,
            post,
            sigma,
        } => {
            let (mut y, mut x) = (Vec::with_capacity(t), Vec::with_capacity(t));
            for step in 0..t {
                let xv = g.next_normal();
                let e = g.next_normal();
                let [a, b] = if step < *break_at { *pre } else { *post };
                y.push(a + b * xv + sigma * e);
                x.push(xv);
            }
            (y, Some(x))
        }
    };
    let mut series = vec![TimeSeries::from_start("y", start_period(), y)?];
    if let Some(x) = x {
        series.push(TimeSeries::from_start("x", start_period(), x)?);
    }
    Dataset::new(series, "y")
}

/// Runs `f` on replications `0..reps`, each with its own derived seed.
/// Output order follows the replication number regardless of scheduling.
pub fn replicate<T, F>(reps: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    (0..reps as u64)
        .into_par_iter()
        .map(|r| f(replication_seed(seed, r)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionSummary {
    pub replications: usize,
    pub rejections: usize,
    /// Replications whose test errored; excluded from the frequency.
    pub failures: usize,
}

impl RejectionSummary {
    pub fn frequency(&self) -> f64 {
        let valid = self.replications - self.failures;
        if valid == 0 {
            return f64::NAN;
        }
        self.rejections as f64 / valid as f64
    }
}

/// Rejection frequency of a test run on `reps` independent replications.
pub fn rejection_frequency<F>(reps: usize, seed: u64, test: F) -> RejectionSummary
where
    F: Fn(u64) -> Result<bool> + Sync,
{
    let outcomes = replicate(reps, seed, test);
    let failures = outcomes.iter().filter(|o| o.is_err()).count();
    let rejections = outcomes.iter().filter(|o| matches!(o, Ok(true))).count();
    RejectionSummary {
        replications: reps,
        rejections,
        failures,
    }
}
