use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::Serialize;

use super::sde::ThinnedSimulator;
use super::{path_rng, Estimate, PathConfig, PointFunction};
use crate::error::{Error, Result};
use crate::fields::{growth_exponent, smooth_step, Grid, GridField};
use crate::numeric::fitted_slope;
use crate::operator::{apply_generator, CoefficientField};
use crate::orlicz::{luxemburg_norm_of, NFunction};
use crate::symbols::SubordinatorSpec;

/// Runs every path in parallel and collects one value per path, in path order.
fn per_path(
    sim: &ThinnedSimulator<'_>,
    value: impl Fn(&ThinnedSimulator<'_>, &mut rand_chacha::ChaCha8Rng) -> Result<f64> + Sync,
) -> Result<Vec<f64>> {
    let config = sim.config();
    (0..config.n_paths as u64)
        .into_par_iter()
        .map(|i| value(sim, &mut path_rng(config.seed, i)))
        .collect()
}

/// `E_x ∫₀^∞ e^{−λt} f(X_t) dt` with `x = config.start`.
///
/// Each path contributes `Σ_k f(X_{t_k})(e^{−λt_k} − e^{−λt_{k+1}})/λ`, the last state
/// being held from its event time onwards; jumps after the horizon are not simulated.
pub fn resolvent_mc(
    f: &dyn PointFunction,
    a: &CoefficientField,
    spec: &SubordinatorSpec,
    config: &PathConfig,
) -> Result<Estimate> {
    let sim = ThinnedSimulator::new(a, spec, config)?;
    let lambda = config.lambda;
    let samples = per_path(&sim, |sim, rng| {
        let mut x = config.start;
        let mut weight = 1.0;
        let mut total = 0.0;
        sim.walk(rng, |t, _, next| {
            let w = (-lambda * t).exp();
            total += f.value(&x) * (weight - w);
            weight = w;
            x = next;
            ControlFlow::Continue(())
        })?;
        Ok((total + f.value(&x) * weight) / lambda)
    })?;
    let sup = f.sup_abs();
    let small = f.sup_gradient() * a.upper_bound() * spec.kernel_first_moment(config.eps)? / lambda;
    let far = 2.0 * sup * a.upper_bound() * sim.sampler().far_mass() / (lambda * lambda);
    let horizon = 2.0 * sup * (-lambda * config.horizon).exp() / lambda;
    Estimate::from_samples(&samples, small + far, horizon)
}

/// `E e^{−λτ}` for the first time `τ` the path leaves the closed `δ`-ball around its start;
/// paths that stay until the horizon contribute `e^{−λT}`.
pub fn exit_time_mc(
    delta: f64,
    a: &CoefficientField,
    spec: &SubordinatorSpec,
    config: &PathConfig,
) -> Result<Estimate> {
    if !(delta > 0.0) {
        return Err(Error::Domain {
            name: "delta",
            value: delta,
            expected: "delta > 0",
        });
    }
    let sim = ThinnedSimulator::new(a, spec, config)?;
    let (lambda, start) = (config.lambda, config.start);
    let cap = (-lambda * config.horizon).exp();
    let samples = per_path(&sim, |sim, rng| {
        let mut value = cap;
        sim.walk(rng, |t, _, x| {
            if (x[0] - start[0]).hypot(x[1] - start[1]) > delta {
                value = (-lambda * t).exp();
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        Ok(value)
    })?;
    // Expected total displacement of the dropped small jumps, relative to δ.
    let small = (config.horizon * a.upper_bound() * spec.kernel_first_moment(config.eps)? / delta).min(1.0);
    Estimate::from_samples(&samples, small, cap)
}

/// `K_δ = sup_{|x−x₀|≤δ} (ℒg)⁺` plus the generator's truncation bounds, for the smooth
/// `g` that vanishes on `B_{δ/2}(x₀)` and equals one off `B_δ(x₀)`; then
/// `E e^{−λτ} ≤ K_δ/λ`.
pub fn exit_constant(delta: f64, a: &CoefficientField, spec: &SubordinatorSpec, config: &PathConfig) -> Result<f64> {
    let grid = Grid::new(spec.dim(), if spec.dim() == 1 { 1 << 13 } else { 256 }, 16.0)?;
    let start = config.start;
    let g = GridField::from_fn(grid, |x| {
        let r = (x[0] - start[0]).hypot(x[1] - start[1]);
        smooth_step((r - 0.5 * delta) / (0.5 * delta))
    });
    let lg = apply_generator(&g, a, spec, config.eps)?;
    let mut sup = 0.0f64;
    for (idx, v) in lg.field.values().iter().enumerate() {
        let x = grid.point(idx);
        if (x[0] - start[0]).hypot(x[1] - start[1]) <= delta {
            sup = sup.max(*v);
        }
    }
    Ok(sup + lg.eps_bias + lg.far_bias)
}

/// The mollified indicator `½(1 − tanh((|x − c| − r)/w))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TanhBump {
    pub center: [f64; 2],
    pub radius: f64,
    pub width: f64,
}

impl TanhBump {
    /// Width `r/8`.
    pub fn new(center: [f64; 2], radius: f64) -> Self {
        Self {
            center,
            radius,
            width: radius / 8.0,
        }
    }

    /// Luxemburg norm over `ℝ^dim`, sampled on a box of half-width `4r` where the bump
    /// lives (outside it the values are below `e^{−40}`).
    pub fn luxemburg_norm(&self, a: &NFunction, dim: usize) -> f64 {
        let n = if dim == 1 { 1 << 16 } else { 1 << 10 };
        let half = self.radius + 40.0 * self.width;
        let h = 2.0 * half / n as f64;
        let axis: Vec<f64> = (0..n).map(|i| -half + (i as f64 + 0.5) * h).collect();
        let values: Vec<f64> = if dim == 1 {
            axis.iter().map(|&x| self.profile(x.abs())).collect()
        } else {
            axis.iter()
                .flat_map(|&x| axis.iter().map(move |&y| (x, y)))
                .map(|(x, y)| self.profile(x.hypot(y)))
                .collect()
        };
        luxemburg_norm_of(&values, h.powi(dim as i32), a)
    }

    fn profile(&self, r: f64) -> f64 {
        0.5 * (1.0 - ((r - self.radius) / self.width).tanh())
    }
}

impl PointFunction for TanhBump {
    fn value(&self, x: &[f64; 2]) -> f64 {
        self.profile((x[0] - self.center[0]).hypot(x[1] - self.center[1]))
    }

    fn sup_abs(&self) -> f64 {
        1.0
    }

    fn sup_gradient(&self) -> f64 {
        0.5 / self.width
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KrylovReport {
    pub lambda: f64,
    pub orlicz: String,
    pub radii: Vec<f64>,
    pub estimates: Vec<Estimate>,
    pub norms: Vec<f64>,
    /// `λ·estimate_r/‖f_r‖_A`.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// Least-squares slope of `ln estimate_r` against `ln r`.
    pub fitted_exponent: f64,
    /// `(c, ε)` with `A(t) ≥ [ψ⁻¹(c·t^{1+ε})]^d` on `t ∈ [1, 10³]`, if one was found.
    pub growth_c: Option<f64>,
    pub growth_eps: Option<f64>,
}

/// Occupation estimates for mollified indicators of `B_r(x₀)` against their Orlicz norms.
pub fn krylov_report(
    radii: &[f64],
    orlicz: &NFunction,
    a: &CoefficientField,
    spec: &SubordinatorSpec,
    config: &PathConfig,
) -> Result<KrylovReport> {
    if radii.len() < 2 || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidParameter("krylov needs at least two positive radii".into()));
    }
    let mut estimates = Vec::with_capacity(radii.len());
    let mut norms = Vec::with_capacity(radii.len());
    for &r in radii {
        let f = TanhBump::new(config.start, r);
        estimates.push(resolvent_mc(&f, a, spec, config)?);
        norms.push(f.luxemburg_norm(orlicz, spec.dim()));
    }
    let ratios: Vec<f64> = estimates
        .iter()
        .zip(&norms)
        .map(|(e, n)| config.lambda * e.mean / n)
        .collect();
    let ln_r: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ln_e: Vec<f64> = estimates.iter().map(|e| e.mean.ln()).collect();
    let growth = (0..=20)
        .map(|k| 0.5f64.powi(k))
        .find_map(|c| growth_exponent(spec, orlicz, c, 1.0, 1e3).map(|e| (c, e)));
    Ok(KrylovReport {
        lambda: config.lambda,
        orlicz: orlicz.to_string(),
        radii: radii.to_vec(),
        max_ratio: ratios.iter().fold(0.0, |m: f64, r| m.max(*r)),
        ratios,
        estimates,
        norms,
        fitted_exponent: fitted_slope(&ln_r, &ln_e),
        growth_c: growth.map(|g| g.0),
        growth_eps: growth.map(|g| g.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma() -> SubordinatorSpec {
        SubordinatorSpec::gamma(1).unwrap()
    }

    struct Constant(f64);

    impl PointFunction for Constant {
        fn value(&self, _: &[f64; 2]) -> f64 {
            self.0
        }
        fn sup_abs(&self) -> f64 {
            self.0.abs()
        }
        fn sup_gradient(&self) -> f64 {
            0.0
        }
    }

    #[test]
    fn constant_function_gives_inverse_lambda() {
        let a = CoefficientField::x_oscillation(0.1, 16.0).unwrap();
        let config = PathConfig::new(2.0, 64, 3);
        let e = resolvent_mc(&Constant(1.0), &a, &gamma(), &config).unwrap();
        assert!((e.mean - 0.5).abs() < 1e-15);
        assert!(e.standard_error < 1e-15);
    }

    #[test]
    fn resolvent_is_linear_per_path() {
        let a = CoefficientField::constant(1.0).unwrap();
        let config = PathConfig::new(4.0, 200, 11);
        let f = TanhBump::new([0.0; 2], 0.5);
        let e1 = resolvent_mc(&f, &a, &gamma(), &config).unwrap();
        struct Twice(TanhBump);
        impl PointFunction for Twice {
            fn value(&self, x: &[f64; 2]) -> f64 {
                2.0 * self.0.value(x)
            }
            fn sup_abs(&self) -> f64 {
                2.0
            }
            fn sup_gradient(&self) -> f64 {
                2.0 * self.0.sup_gradient()
            }
        }
        let e2 = resolvent_mc(&Twice(f), &a, &gamma(), &config).unwrap();
        assert_eq!(e2.mean, 2.0 * e1.mean);
    }

    #[test]
    fn exit_time_monotone_and_capped() {
        let a = CoefficientField::constant(1.0).unwrap();
        let mut config = PathConfig::new(8.0, 2000, 4);
        let means: Vec<f64> = [0.1, 0.2, 0.4]
            .iter()
            .map(|&d| exit_time_mc(d, &a, &gamma(), &config).unwrap().mean)
            .collect();
        assert!(means[0] >= means[1] && means[1] >= means[2], "{means:?}");
        config.horizon = 1e-3;
        config.reach = Some(1.0);
        let e = exit_time_mc(5.0, &a, &gamma(), &config).unwrap();
        assert!((e.mean - (-8.0 * 1e-3f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn tanh_bump_norm_scales_like_inverse_measure() {
        // For A(t) = t the Luxemburg norm is the L¹ norm, about 2r in one dimension.
        let f = TanhBump::new([0.0; 2], 0.1);
        let l1 = f.luxemburg_norm(&NFunction::power(1.0 + 1e-12).unwrap(), 1);
        assert!((l1 - 0.2).abs() < 1e-3, "{l1}");
    }
}
