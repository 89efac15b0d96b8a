//! Path simulation for the subordinated process and the thinned jump SDE, with
//! estimators built on top of it.
//!
//! Every path draws from its own ChaCha8 stream (`seed`, stream = path index), so results
//! do not depend on the number of threads or the order in which paths finish.

mod estimators;
mod sampling;
mod sde;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::GridField;
use crate::numeric::pairwise_sum;

pub use estimators::{
    exit_constant, exit_time_mc, krylov_report, resolvent_mc, KrylovReport, TanhBump,
};
pub use sampling::{sample_gamma_increments, sample_vg_path, RadialSampler};
pub use sde::{simulate_thinned_sde, JumpPath, PathConfig, ThinnedSimulator};

/// The random stream for path `index` under base seed `seed`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A Monte Carlo mean with its error budget kept in separate fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub standard_error: f64,
    pub n_samples: usize,
    /// Bound on the effect of dropping jumps with `|z| ≤ ε`.
    pub eps_bias: f64,
    /// Bound on the effect of stopping paths at the horizon.
    pub horizon_bias: f64,
}

impl Estimate {
    /// Sample mean and `std/√n` of `samples`; needs at least two samples.
    pub fn from_samples(samples: &[f64], eps_bias: f64, horizon_bias: f64) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::InvalidParameter(format!("an estimate needs n ≥ 2 samples, got {n}")));
        }
        let mean = pairwise_sum(samples) / n as f64;
        let squares: Vec<f64> = samples.iter().map(|v| (v - mean) * (v - mean)).collect();
        let variance = pairwise_sum(&squares) / (n - 1) as f64;
        Ok(Self {
            mean,
            standard_error: (variance / n as f64).sqrt(),
            n_samples: n,
            eps_bias,
            horizon_bias,
        })
    }

    /// `|mean − target| ≤ k·SE + eps_bias + horizon_bias`.
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.standard_error + self.eps_bias + self.horizon_bias
    }
}

/// A function that can be evaluated anywhere in space, with the bounds the bias
/// accounting needs.
pub trait PointFunction: Sync {
    fn value(&self, x: &[f64; 2]) -> f64;
    fn sup_abs(&self) -> f64;
    fn sup_gradient(&self) -> f64;
}

/// Grid fields are read periodically through cubic interpolation.
impl PointFunction for GridField {
    fn value(&self, x: &[f64; 2]) -> f64 {
        self.interpolate(&x[..self.grid().dim()])
    }

    fn sup_abs(&self) -> f64 {
        self.max_abs()
    }

    fn sup_gradient(&self) -> f64 {
        self.gradient_sup_refined(2)
    }
}

/// Two-sample Kolmogorov–Smirnov statistic. Sorts both inputs.
pub fn ks_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic 1% critical value of the two-sample KS statistic.
pub fn ks_critical_1pct(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    1.628 * ((n + m) / (n * m)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn estimate_of_constant_has_zero_error() {
        let e = Estimate::from_samples(&[0.25; 10], 0.0, 0.0).unwrap();
        assert_eq!(e.mean, 0.25);
        assert_eq!(e.standard_error, 0.0);
        assert!(Estimate::from_samples(&[1.0], 0.0, 0.0).is_err());
    }

    #[test]
    fn estimate_standard_error() {
        // Samples 1..=4: variance 5/3, SE = sqrt(5/12).
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0], 0.0, 0.0).unwrap();
        assert_eq!(e.mean, 2.5);
        assert!((e.standard_error - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = path_rng(7, 3).random();
        let b: u64 = path_rng(7, 3).random();
        let c: u64 = path_rng(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn ks_examples() {
        let mut a = vec![1.0, 2.0, 3.0];
        let mut b = vec![1.0, 2.0, 3.0];
        assert_eq!(ks_statistic(&mut a, &mut b), 0.0);
        let mut a = vec![0.0, 1.0];
        let mut b = vec![2.0, 3.0];
        assert_eq!(ks_statistic(&mut a, &mut b), 1.0);
        let mut a = vec![0.0, 2.0];
        let mut b = vec![1.0, 3.0];
        assert_eq!(ks_statistic(&mut a, &mut b), 0.5);
    }
}
