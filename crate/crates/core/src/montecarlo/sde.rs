use std::io::Write;
use std::ops::ControlFlow;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::Serialize;

use super::{path_rng, RadialSampler};
use crate::error::{Error, Result};
use crate::operator::{far_radius, CoefficientField};
use crate::symbols::SubordinatorSpec;

/// Simulation settings shared by all estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathConfig {
    pub horizon: f64,
    pub eps: f64,
    pub lambda: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub start: [f64; 2],
    /// Largest jump radius sampled; `None` means the radius beyond which the jump
    /// measure is negligible.
    pub reach: Option<f64>,
}

impl PathConfig {
    /// `ε = 1e-3`, full reach, start at the origin, and a horizon with `e^{−λT} = 1e-8`.
    pub fn new(lambda: f64, n_paths: usize, seed: u64) -> Self {
        Self {
            horizon: 1e8f64.ln() / lambda,
            eps: 1e-3,
            lambda,
            n_paths,
            seed,
            start: [0.0; 2],
            reach: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("horizon", self.horizon), ("eps", self.eps), ("lambda", self.lambda)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Domain {
                    name,
                    value,
                    expected: "positive and finite",
                });
            }
        }
        if self.n_paths < 1 {
            return Err(Error::InvalidParameter("n_paths must be at least 1".into()));
        }
        if let Some(reach) = self.reach {
            if !(reach > self.eps) {
                return Err(Error::Domain {
                    name: "reach",
                    value: reach,
                    expected: "reach > eps",
                });
            }
        }
        Ok(())
    }
}

/// One trajectory: accepted jump times in `(0, T]`, the jumps, and the state after each.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpPath {
    pub dim: usize,
    pub start: [f64; 2],
    pub times: Vec<f64>,
    pub jumps: Vec<[f64; 2]>,
    pub states: Vec<[f64; 2]>,
}

impl JumpPath {
    pub fn state_at(&self, t: f64) -> [f64; 2] {
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            self.start
        } else {
            self.states[k - 1]
        }
    }

    pub fn final_state(&self) -> [f64; 2] {
        self.states.last().copied().unwrap_or(self.start)
    }

    /// Event CSV with header `time,jump_x,...,state_x,...`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let axes = &["x", "y"][..self.dim];
        let mut text = String::from("time");
        for prefix in ["jump", "state"] {
            for a in axes {
                text.push_str(&format!(",{prefix}_{a}"));
            }
        }
        text.push('\n');
        for ((t, z), x) in self.times.iter().zip(&self.jumps).zip(&self.states) {
            text.push_str(&t.to_string());
            for v in z[..self.dim].iter().chain(&x[..self.dim]) {
                text.push_str(&format!(",{v}"));
            }
            text.push('\n');
        }
        out.write_all(text.as_bytes())?;
        Ok(())
    }
}

/// The thinned compound-Poisson construction: candidates at rate `Λ = c₀⁻¹∫_{ε<|z|≤reach}J`,
/// each accepted with probability `a(x,z)·c₀`.
#[derive(Debug, Clone)]
pub struct ThinnedSimulator<'a> {
    a: &'a CoefficientField,
    sampler: RadialSampler,
    rate: f64,
    config: PathConfig,
}

impl<'a> ThinnedSimulator<'a> {
    pub fn new(a: &'a CoefficientField, spec: &SubordinatorSpec, config: &PathConfig) -> Result<Self> {
        config.validate()?;
        let reach = match config.reach {
            Some(r) => r,
            None => far_radius(spec, config.eps)?,
        };
        let sampler = RadialSampler::new(spec, config.eps, reach)?;
        Ok(Self {
            a,
            rate: sampler.mass() / a.c0(),
            sampler,
            config: *config,
        })
    }

    pub fn config(&self) -> &PathConfig {
        &self.config
    }

    pub fn sampler(&self) -> &RadialSampler {
        &self.sampler
    }

    /// Candidate jump rate `Λ`.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Runs one path on `rng`, calling `visit(time, jump, new_state)` at each accepted
    /// event until the horizon or until `visit` breaks.
    pub fn walk(
        &self,
        rng: &mut impl Rng,
        mut visit: impl FnMut(f64, [f64; 2], [f64; 2]) -> ControlFlow<()>,
    ) -> Result<()> {
        let wait = Exp::new(self.rate).map_err(|_| Error::Domain {
            name: "rate",
            value: self.rate,
            expected: "positive",
        })?;
        let c0 = self.a.c0();
        let (mut t, mut x) = (0.0, self.config.start);
        loop {
            t += wait.sample(rng);
            if t > self.config.horizon {
                return Ok(());
            }
            let z = self.sampler.sample(rng);
            let p = self.a.eval(&x, &z) * c0;
            if p > 1.0 + 1e-12 {
                return Err(Error::AcceptanceAboveOne { probability: p });
            }
            if rng.random::<f64>() < p {
                x = [x[0] + z[0], x[1] + z[1]];
                if visit(t, z, x).is_break() {
                    return Ok(());
                }
            }
        }
    }

    /// The full event record of path `index`.
    pub fn path(&self, index: u64) -> Result<JumpPath> {
        let mut rng = path_rng(self.config.seed, index);
        self.record(&mut rng)
    }

    fn record(&self, rng: &mut impl Rng) -> Result<JumpPath> {
        let mut path = JumpPath {
            dim: self.sampler.dim(),
            start: self.config.start,
            times: Vec::new(),
            jumps: Vec::new(),
            states: Vec::new(),
        };
        self.walk(rng, |t, z, x| {
            path.times.push(t);
            path.jumps.push(z);
            path.states.push(x);
            ControlFlow::Continue(())
        })?;
        Ok(path)
    }
}

/// One path of the thinned SDE driven by `rng`.
pub fn simulate_thinned_sde(
    a: &CoefficientField,
    spec: &SubordinatorSpec,
    config: &PathConfig,
    rng: &mut impl Rng,
) -> Result<JumpPath> {
    ThinnedSimulator::new(a, spec, config)?.record(rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_structure() {
        let spec = SubordinatorSpec::gamma(2).unwrap();
        let a = CoefficientField::constant(1.0).unwrap();
        let mut config = PathConfig::new(1.0, 1, 5);
        config.horizon = 2.0;
        let sim = ThinnedSimulator::new(&a, &spec, &config).unwrap();
        let p = sim.path(0).unwrap();
        assert!(!p.times.is_empty());
        assert!(p.times.windows(2).all(|w| w[1] > w[0]));
        assert!(*p.times.last().unwrap() <= 2.0);
        let mut x = p.start;
        for (z, s) in p.jumps.iter().zip(&p.states) {
            x = [x[0] + z[0], x[1] + z[1]];
            assert_eq!(&x, s);
        }
        assert_eq!(p, sim.path(0).unwrap());
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("time,jump_x,jump_y,state_x,state_y\n"));
        assert_eq!(text.lines().count(), p.times.len() + 1);
    }

    #[test]
    fn tiny_horizon_keeps_start() {
        let spec = SubordinatorSpec::gamma(1).unwrap();
        let a = CoefficientField::constant(1.0).unwrap();
        let mut config = PathConfig::new(1.0, 1, 0);
        config.horizon = 1e-12;
        config.start = [0.3, 0.0];
        let p = simulate_thinned_sde(&a, &spec, &config, &mut path_rng(0, 0)).unwrap();
        assert!(p.times.is_empty());
        assert_eq!(p.state_at(1e-12), [0.3, 0.0]);
    }

    #[test]
    fn acceptance_above_one_is_reported() {
        let spec = SubordinatorSpec::gamma(1).unwrap();
        let a = CoefficientField::general(|_, _| 2.0, 1.0, 1.0, 0.0, 1.0, "bad").unwrap();
        let config = PathConfig::new(1.0, 1, 0);
        let err = simulate_thinned_sde(&a, &spec, &config, &mut path_rng(0, 0)).unwrap_err();
        assert!(matches!(err, Error::AcceptanceAboveOne { .. }));
    }
}
