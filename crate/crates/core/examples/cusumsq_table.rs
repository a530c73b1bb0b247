//! Regenerates `data/cusumsq_c0.txt`.
//!
//! Under the null, the `m = n - k` recursive residuals are i.i.d. normal, so the
//! CUSUMSQ path `s_r = Σ_{i<=r} w_i² / Σ_{i<=m} w_i²` has a distribution that
//! depends on `m` only. c₀ is the 95% quantile of `max_r |s_r - r/m|`, estimated
//! from 200 000 replications per `m`.
//!
//!     cargo run --release -p ardlkit --example cusumsq_table > crates/core/data/cusumsq_c0.txt

use ardlkit::simgen::{replicate, GaussianStream};

const REPS: usize = 200_000;
const SEED: u64 = 20_240_601;

fn grid() -> Vec<usize> {
    let mut g: Vec<usize> = (2..=60).collect();
    g.extend([70, 80, 90, 100, 120, 140, 160, 180, 200, 250, 300, 350, 400, 500, 600, 800, 1000]);
    g
}

fn max_deviation(m: usize, seed: u64) -> f64 {
    let mut g = GaussianStream::new(seed);
    let sq: Vec<f64> = (0..m).map(|_| g.next_normal().powi(2)).collect();
    let total: f64 = sq.iter().sum();
    let mut cum = 0.0;
    let mut worst: f64 = 0.0;
    for (r, v) in sq.iter().enumerate() {
        cum += v;
        worst = worst.max((cum / total - (r + 1) as f64 / m as f64).abs());
    }
    worst
}

fn main() {
    println!("# CUSUMSQ two-sided 5% bound c0 for m = n - k recursive residuals.");
    println!("# Path s_r stays within (r - k)/(n - k) +/- c0 with probability 0.95 under the null.");
    println!("# Estimated as the 95% quantile of max_r |s_r - r/m| over {REPS} Gaussian replications");
    println!("# per m (seed {SEED}, see examples/cusumsq_table.rs). Between grid points c0*sqrt(m)");
    println!("# is interpolated linearly in m; beyond the last point c0*sqrt(m) is held constant.");
    println!("# version: 1");
    println!("# columns: m c0");
    for m in grid() {
        let mut devs = replicate(REPS, SEED ^ (m as u64) << 32, |s| max_deviation(m, s));
        devs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q = devs[(0.95 * REPS as f64).ceil() as usize - 1];
        println!("{m} {q:.5}");
    }
}
