use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::numeric::{log_grid, MonotoneCubic};
use crate::symbols::SubordinatorSpec;

const KNOTS: usize = 4096;

/// `count` independent draws of `S_dt ~ Gamma(shape = dt, rate = 1)`.
pub fn sample_gamma_increments(dt: f64, count: usize, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let law = gamma_law(dt)?;
    Ok((0..count).map(|_| law.sample(rng)).collect())
}

fn gamma_law(dt: f64) -> Result<Gamma<f64>> {
    Gamma::new(dt, 1.0).map_err(|_| Error::Domain {
        name: "dt",
        value: dt,
        expected: "dt > 0",
    })
}

/// `Z_t = √2·B_{S_t}` at the (increasing, positive) times in `t_grid`, started from 0.
/// Only the first `dim` coordinates are filled.
pub fn sample_vg_path(t_grid: &[f64], dim: usize, rng: &mut impl Rng) -> Result<Vec<[f64; 2]>> {
    let mut out = Vec::with_capacity(t_grid.len());
    let (mut t, mut z) = (0.0, [0.0; 2]);
    for &next in t_grid {
        let s = gamma_law(next - t)?.sample(rng);
        for zk in z.iter_mut().take(dim) {
            let g: f64 = StandardNormal.sample(rng);
            *zk += (2.0 * s).sqrt() * g;
        }
        out.push(z);
        t = next;
    }
    Ok(out)
}

/// Inverse-CDF sampler for jumps `z` with `ε < |z| ≤ reach`, distributed as `J(z)dz`
/// normalized.
#[derive(Debug, Clone)]
pub struct RadialSampler {
    dim: usize,
    eps: f64,
    reach: f64,
    mass: f64,
    far_mass: f64,
    ln_radius: MonotoneCubic,
}

impl RadialSampler {
    pub fn new(spec: &SubordinatorSpec, eps: f64, reach: f64) -> Result<Self> {
        if !(eps > 0.0 && reach > eps) {
            return Err(Error::Domain {
                name: "eps",
                value: eps,
                expected: "0 < eps < reach",
            });
        }
        let r = log_grid(eps, reach, KNOTS);
        let mut cdf = vec![0.0; KNOTS];
        for i in 1..KNOTS {
            cdf[i] = cdf[i - 1] + spec.kernel_mass_between(r[i - 1], r[i])?;
        }
        let mass = cdf[KNOTS - 1];
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Quadrature {
                what: "radial jump distribution",
                last_change: mass,
                evaluations: KNOTS,
            });
        }
        let (mut u, mut v) = (Vec::with_capacity(KNOTS), Vec::with_capacity(KNOTS));
        for (c, ri) in cdf.iter().zip(&r) {
            let c = c / mass;
            if u.last().map_or(true, |&last| c > last) {
                u.push(c);
                v.push(ri.ln());
            }
        }
        *u.last_mut().unwrap() = 1.0;
        Ok(Self {
            dim: spec.dim(),
            eps,
            reach,
            mass,
            far_mass: spec.kernel_tail_mass(reach)?,
            ln_radius: MonotoneCubic::new(u, v)?,
        })
    }

    /// `∫_{ε<|z|≤reach} J`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `∫_{|z|>reach} J`, the part of the jump measure that is never sampled.
    pub fn far_mass(&self) -> f64 {
        self.far_mass
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn reach(&self) -> f64 {
        self.reach
    }

    /// The radius at cumulative probability `u ∈ [0, 1]`.
    pub fn radius(&self, u: f64) -> f64 {
        self.ln_radius.eval(u).exp().clamp(self.eps, self.reach)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> [f64; 2] {
        let r = self.radius(rng.random());
        if self.dim == 1 {
            [if rng.random_bool(0.5) { r } else { -r }, 0.0]
        } else {
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            [r * theta.cos(), r * theta.sin()]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::path_rng;

    #[test]
    fn gamma_mean_and_laplace_transform() {
        let mut rng = path_rng(1, 0);
        let n = 200_000;
        let s = sample_gamma_increments(1.0, n, &mut rng).unwrap();
        for lambda in [0.5, 2.0] {
            let v: Vec<f64> = s.iter().map(|x| (-lambda * x).exp()).collect();
            let mean = v.iter().sum::<f64>() / n as f64;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let se = (var / n as f64).sqrt();
            assert!((mean - 1.0 / (1.0 + lambda)).abs() < 4.0 * se, "{lambda}: {mean}");
        }
        assert!(sample_gamma_increments(0.0, 1, &mut rng).is_err());
    }

    #[test]
    fn small_increments_rarely_exceed_delta() {
        let mut rng = path_rng(2, 0);
        let s = sample_gamma_increments(1e-4, 100_000, &mut rng).unwrap();
        let freq = s.iter().filter(|&&x| x > 0.1).count() as f64 / s.len() as f64;
        assert!(freq <= 1e-3);
    }

    #[test]
    fn radial_cdf_matches_kernel_mass() {
        let spec = SubordinatorSpec::gamma(1).unwrap();
        let sampler = RadialSampler::new(&spec, 1e-3, 8.0).unwrap();
        // j(r) = e^{−r}/r on both sides: mass between ε and reach is 2(E₁(ε) − E₁(8)).
        let expected = 2.0 * (e1(1e-3) - e1(8.0));
        assert!((sampler.mass() / expected - 1.0).abs() < 1e-6, "{}", sampler.mass());
        let median = sampler.radius(0.5);
        let half = spec.kernel_mass_between(1e-3, median).unwrap() / sampler.mass();
        assert!((half - 0.5).abs() < 1e-6);
    }

    // E₁ by its convergent series, adequate for the arguments used here.
    fn e1(x: f64) -> f64 {
        let mut sum = -0.577_215_664_901_532_9 - x.ln();
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            sum -= term / k as f64;
        }
        sum
    }
}
