use lowsing::fields::{Grid, GridField};
use lowsing::montecarlo::{
    exit_constant, exit_time_mc, krylov_report, ks_critical_1pct, ks_statistic, path_rng, resolvent_mc,
    sample_vg_path, PathConfig, ThinnedSimulator,
};
use lowsing::operator::{solve_homogeneous, CoefficientField, ZCoefficient};
use lowsing::orlicz::NFunction;
use lowsing::symbols::SubordinatorSpec;
use serde_json::json;

use super::{guarded, CheckFn, Options};
use crate::report::Check;

pub const CHECKS: &[(&str, CheckFn)] = &[
    ("C2", feynman_kac),
    ("C8", krylov),
    ("C9", exit_time),
    ("montecarlo.marginal", marginal),
];

pub const KRYLOV_RADII: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
pub const EXIT_LAMBDAS: [f64; 5] = [4.0, 8.0, 16.0, 32.0, 64.0];

pub fn feynman_kac(o: &Options) -> Check {
    guarded("C2", "path average matches the spectral resolvent", "|diff| ≤ 3 SE and SE ≤ 2% of the mean", || {
        let spec = SubordinatorSpec::gamma(1)?;
        let grid = Grid::new(1, 1 << 10, 16.0)?;
        let f = GridField::from_fn(grid, |x| (-x[0] * x[0]).exp());
        let lambda = 2.0;
        let u = solve_homogeneous(&f, lambda, &spec, &ZCoefficient::constant(1.0), 1e-3)?;
        let target = u.values()[grid.origin_index()];
        let a = CoefficientField::constant(1.0)?;
        let e = resolvent_mc(&f, &a, &spec, &PathConfig::new(lambda, 100_000, o.seed))?;
        let diff = e.mean - target;
        let ok = diff.abs() <= 3.0 * e.standard_error && e.standard_error <= 0.02 * e.mean.abs();
        Ok((ok, json!({ "estimate": e, "spectral": target, "difference": diff, "difference_in_se": diff / e.standard_error })))
    })
}

pub fn krylov(o: &Options) -> Check {
    guarded("C8", "Krylov ratio bounded, log-slope small", "finite ratios; |fitted exponent| ≤ 0.15", || {
        let spec = SubordinatorSpec::gamma(1)?;
        let a = CoefficientField::x_oscillation(0.1, 16.0)?;
        let orlicz = NFunction::exp_power(2.0)?;
        let r = krylov_report(&KRYLOV_RADII, &orlicz, &a, &spec, &PathConfig::new(16.0, 10_000, o.seed))?;
        let ok = r.ratios.iter().all(|x| x.is_finite() && *x > 0.0) && r.fitted_exponent.abs() <= 0.15;
        Ok((ok, serde_json::to_value(&r).expect("report serializes")))
    })
}

pub fn exit_time(o: &Options) -> Check {
    guarded("C9", "λ·E[e^{−λτ_δ}] bounded by K_δ", "λ·mean ≤ K_δ + 3λ·SE at every λ", || {
        let spec = SubordinatorSpec::gamma(1)?;
        let a = CoefficientField::x_oscillation(0.1, 16.0)?;
        let delta = 0.2;
        let k = exit_constant(delta, &a, &spec, &PathConfig::new(1.0, 2, o.seed))?;
        let mut ok = k.is_finite();
        let mut rows = Vec::new();
        for (i, &lambda) in EXIT_LAMBDAS.iter().enumerate() {
            let e = exit_time_mc(delta, &a, &spec, &PathConfig::new(lambda, 10_000, o.seed.wrapping_add(i as u64)))?;
            let scaled = lambda * e.mean;
            ok &= scaled <= k + 3.0 * lambda * e.standard_error;
            rows.push(json!({ "lambda": lambda, "estimate": e, "scaled": scaled }));
        }
        Ok((ok, json!({ "delta": delta, "k_delta": k, "by_lambda": rows })))
    })
}

pub fn marginal(o: &Options) -> Check {
    guarded("montecarlo.marginal", "thinned marginal matches subordinated Brownian motion", "KS below the 1% critical value", || {
        let spec = SubordinatorSpec::gamma(1)?;
        let n = 10_000;
        let mut ok = true;
        let mut rows = Vec::new();
        for c in [1.0, 0.5] {
            let a = CoefficientField::constant(c)?;
            let mut config = PathConfig::new(1.0, n, o.seed);
            config.horizon = 1.0;
            let sim = ThinnedSimulator::new(&a, &spec, &config)?;
            let mut x = (0..n as u64)
                .map(|i| sim.path(i).map(|p| p.final_state()[0]))
                .collect::<lowsing::Result<Vec<_>>>()?;
            let mut z = (0..n as u64)
                .map(|i| sample_vg_path(&[c], 1, &mut path_rng(o.seed ^ 0x5eed, i)).map(|p| p[0][0]))
                .collect::<lowsing::Result<Vec<_>>>()?;
            let d = ks_statistic(&mut x, &mut z);
            let critical = ks_critical_1pct(n, n);
            ok &= d < critical;
            rows.push(json!({ "c": c, "statistic": d, "critical": critical }));
        }
        Ok((ok, json!(rows)))
    })
}
