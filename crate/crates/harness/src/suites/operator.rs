use lowsing::fields::family::random_block_modes;
use lowsing::fields::{admissible_j_max, Grid};
use lowsing::numeric::fitted_slope;
use lowsing::operator::{
    apply_generator, far_radius, grid_symbol, quadrature_nodes, solve_homogeneous, CoefficientField, DiscreteGenerator,
    ResolventSolver, SeparableTerm, SolverConfig, ZCoefficient,
};
use lowsing::symbols::SubordinatorSpec;
use serde_json::json;

use super::{guarded, max_of, CheckFn, Options};
use crate::report::Check;

pub const CHECKS: &[(&str, CheckFn)] = &[
    ("C3", schauder),
    ("operator.linearity", linearity),
    ("operator.residual", homogeneous_residual),
    ("operator.resolvent", resolvent_identity),
    ("operator.symbol_sign", symbol_sign),
    ("operator.commutator", commutator_ratio),
];

pub const SCHAUDER_LAMBDAS: [f64; 5] = [8.0, 16.0, 32.0, 64.0, 128.0];

pub fn schauder(o: &Options) -> Check {
    guarded("C3", "Schauder ratio uniform in λ", "finite max; |slope of log max-ratio vs log λ| ≤ 0.1", || {
        let spec = SubordinatorSpec::gamma(1)?;
        let grid = Grid::new(1, 1 << 16, 16.0)?;
        let a = CoefficientField::x_oscillation(0.1, grid.length())?;
        let solver = ResolventSolver::new(grid, &a, &spec, SolverConfig::default())?;
        let j_max = admissible_j_max(&grid, &spec);
        let mut rng = o.rng(301);
        let fields = (0..20)
            .map(|_| random_block_modes(grid, &spec, j_max, &mut rng))
            .collect::<lowsing::Result<Vec<_>>>()?;
        let betas = [0.0, 0.25];
        // worst[b][l]: max over fields of the ratio for betas[b], SCHAUDER_LAMBDAS[l].
        let mut worst = vec![vec![0.0f64; SCHAUDER_LAMBDAS.len()]; betas.len()];
        let mut iterations = 0;
        let mut residual = 0.0f64;
        for f in &fields {
            for (l, &lambda) in SCHAUDER_LAMBDAS.iter().enumerate() {
                for (b, r) in solver.schauder_reports(f, lambda, &betas)?.iter().enumerate() {
                    if let Some(ratio) = r.ratio {
                        worst[b][l] = worst[b][l].max(ratio);
                    }
                    iterations = iterations.max(r.iterations);
                    residual = residual.max(r.residual / f.max_abs());
                }
            }
        }
        let ln_l: Vec<f64> = SCHAUDER_LAMBDAS.iter().map(|l| l.ln()).collect();
        let mut ok = true;
        let mut by_beta = serde_json::Map::new();
        for (b, &beta) in betas.iter().enumerate() {
            let ln_r: Vec<f64> = worst[b].iter().map(|r| r.ln()).collect();
            let slope = fitted_slope(&ln_l, &ln_r);
            let max = max_of(worst[b].iter().copied());
            ok &= max.is_finite() && slope.abs() <= 0.1;
            by_beta.insert(format!("beta={beta}"), json!({ "max_ratio_by_lambda": worst[b], "max_ratio": max, "slope": slope }));
        }
        Ok((
            ok,
            json!({
                "lambdas": SCHAUDER_LAMBDAS,
                "by_beta": by_beta,
                "j_max": j_max,
                "fields": fields.len(),
                "max_iterations": iterations,
                "max_relative_residual": residual,
            }),
        ))
    })
}

pub fn linearity(o: &Options) -> Check {
    guarded("operator.linearity", "ℒ is linear in u and in a", "1e-10 relative", || {
        let spec = o.spec.clone();
        let grid = Grid::new(spec.dim(), 256, 16.0)?;
        let mut rng = o.rng(311);
        let j = admissible_j_max(&grid, &spec);
        let u = random_block_modes(grid, &spec, j, &mut rng)?;
        let v = random_block_modes(grid, &spec, j, &mut rng)?;
        let a1 = CoefficientField::x_oscillation(0.2, grid.length())?;
        let a2 = CoefficientField::constant(0.5)?;
        let eps = 1e-2;
        let lu = apply_generator(&u, &a1, &spec, eps)?.field;
        let lv = apply_generator(&v, &a1, &spec, eps)?.field;
        let lsum = apply_generator(&u.combine(2.0, &v, -3.0)?, &a1, &spec, eps)?.field;
        let in_u = lsum.combine(1.0, &lu.combine(2.0, &lv, -3.0)?, -1.0)?.max_abs() / lsum.max_abs();
        let terms: Vec<SeparableTerm> = [a1.terms().unwrap(), a2.terms().unwrap()].concat();
        let a12 = CoefficientField::separable(terms, 0.3, 1.0, 0.0, 1.0, "a1+a2")?;
        let l12 = apply_generator(&u, &a12, &spec, eps)?.field;
        let l2 = apply_generator(&u, &a2, &spec, eps)?.field;
        let in_a = l12.combine(1.0, &lu.combine(1.0, &l2, 1.0)?, -1.0)?.max_abs() / l12.max_abs();
        Ok((in_u.max(in_a) <= 1e-10, json!({ "in_u": in_u, "in_a": in_a })))
    })
}

pub fn homogeneous_residual(o: &Options) -> Check {
    guarded("operator.residual", "λu − ℒu = f for the homogeneous solve", "≤ truncation bounds + 1e-9‖f‖", || {
        let spec = o.spec.clone();
        let grid = Grid::new(spec.dim(), 1 << 10, 16.0)?;
        let mut rng = o.rng(321);
        let f = random_block_modes(grid, &spec, admissible_j_max(&grid, &spec), &mut rng)?;
        let eps = 1e-3;
        let lambda = 4.0;
        let a0 = ZCoefficient::from_fn(|_| 1.0);
        let u = solve_homogeneous(&f, lambda, &spec, &a0, eps)?;
        let one = CoefficientField::constant(1.0)?;
        let gen = DiscreteGenerator::new(grid, &one, &spec, eps)?.apply_with_bounds(&u);
        let residual = u
            .combine(lambda, &gen.field, -1.0)?
            .combine(1.0, &f, -1.0)?
            .max_abs();
        let bound = gen.far_bias + 1e-9 * f.max_abs();
        Ok((residual <= bound, json!({ "residual": residual, "bound": bound, "eps_bias": gen.eps_bias })))
    })
}

pub fn resolvent_identity(o: &Options) -> Check {
    guarded("operator.resolvent", "R_λ − R_μ = (μ − λ)R_λR_μ", "relative 1e-9", || {
        let spec = o.spec.clone();
        let grid = Grid::new(spec.dim(), 1 << 10, 16.0)?;
        let mut rng = o.rng(331);
        let f = random_block_modes(grid, &spec, admissible_j_max(&grid, &spec), &mut rng)?;
        let one = ZCoefficient::constant(1.0);
        let (l, m) = (3.0, 11.0);
        let ul = solve_homogeneous(&f, l, &spec, &one, 1e-3)?;
        let um = solve_homogeneous(&f, m, &spec, &one, 1e-3)?;
        let rlm = solve_homogeneous(&um, l, &spec, &one, 1e-3)?;
        let lhs = ul.combine(1.0, &um, -1.0)?;
        let err = lhs.combine(1.0, &rlm, -(m - l))?.max_abs() / lhs.max_abs();
        Ok((err <= 1e-9, json!({ "relative_error": err })))
    })
}

pub fn symbol_sign(o: &Options) -> Check {
    guarded("operator.symbol_sign", "Re of the quadrature symbol is nonpositive", "max Re ≤ 0 on the grid", || {
        let spec = o.spec.clone();
        let grid = Grid::new(spec.dim(), 256, 16.0)?;
        let nodes = quadrature_nodes(&spec, 1e-3, far_radius(&spec, 1e-3)?)?;
        let coefficients = [
            ZCoefficient::constant(1.0),
            ZCoefficient::from_fn(|z| 1.0 + 0.9 * (3.0 * z[0].hypot(z[1])).cos()),
            ZCoefficient::from_fn(|z| if z[0] > 0.0 { 2.0 } else { 0.0 }),
        ];
        let mut max_re = f64::NEG_INFINITY;
        for q in &coefficients {
            for s in grid_symbol(&grid, &nodes, q) {
                max_re = max_re.max(s.re);
            }
        }
        Ok((max_re <= 0.0, json!({ "max_real_part": max_re })))
    })
}

pub fn commutator_ratio(o: &Options) -> Check {
    guarded("operator.commutator", "‖ℒu‖ bounded by ‖u‖ times the coefficient norm", "ratio finite across the family", || {
        let spec = SubordinatorSpec::gamma(1)?;
        let grid = Grid::new(1, 1 << 14, 16.0)?;
        let a = CoefficientField::x_oscillation(0.1, grid.length())?;
        let solver = ResolventSolver::new(grid, &a, &spec, SolverConfig::default())?;
        let mut rng = o.rng(341);
        let mut ratios = Vec::new();
        for _ in 0..10 {
            let u = random_block_modes(grid, &spec, admissible_j_max(&grid, &spec), &mut rng)?;
            if let Some(r) = solver.operator_ratio(&u, 0.25)? {
                ratios.push(r);
            }
        }
        let max = max_of(ratios.iter().copied());
        Ok((!ratios.is_empty() && max.is_finite(), json!({ "max_ratio": max, "fields": ratios.len() })))
    })
}
