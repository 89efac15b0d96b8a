use num_complex::Complex64;
use serde::Serialize;

use super::{far_radius, grid_symbol, quadrature_nodes, CoefficientField, DiscreteGenerator, ZCoefficient};
use crate::error::{Error, Result};
use crate::fields::{besov_norm, GridField, Integrability};
use crate::symbols::SubordinatorSpec;

/// Parameters of the frozen-coefficient iteration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolverConfig {
    /// Small-jump cutoff; must be below four grid spacings.
    pub eps: f64,
    /// Stop when successive iterates differ by less than `tolerance·‖f‖_∞`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Grid index of the frozen point; chosen automatically when `None`.
    pub frozen_index: Option<usize>,
    /// Smallest accepted `λ`.
    pub lambda0: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps: 1e-4,
            tolerance: 1e-10,
            max_iterations: 200,
            frozen_index: None,
            lambda0: 8.0,
        }
    }
}

fn divide(f: &GridField, lambda: f64, symbol: &[Complex64]) -> GridField {
    let spec: Vec<Complex64> = f
        .spectrum()
        .iter()
        .zip(symbol)
        .map(|(c, m)| c / (lambda - m))
        .collect();
    GridField::from_spectrum(*f.grid(), spec)
}

/// `u = 𝓕⁻¹(𝓕f / (λ − m))` for a z-only coefficient: `m = −c·ψ(|ξ|)` in closed form when
/// `a₀ ≡ c`, the quadrature symbol over all jumps otherwise.
///
/// ```
/// use lowsing::fields::{Grid, GridField};
/// use lowsing::operator::{solve_homogeneous, ZCoefficient};
/// use lowsing::symbols::SubordinatorSpec;
/// let spec = SubordinatorSpec::gamma(1).unwrap();
/// let grid = Grid::new(1, 64, 16.0).unwrap();
/// let f = GridField::constant(grid, 2.0);
/// let u = solve_homogeneous(&f, 4.0, &spec, &ZCoefficient::constant(1.0), 1e-3).unwrap();
/// assert!((u.values()[0] - 0.5).abs() < 1e-14);
/// ```
pub fn solve_homogeneous(
    f: &GridField,
    lambda: f64,
    spec: &SubordinatorSpec,
    a0: &ZCoefficient,
    eps: f64,
) -> Result<GridField> {
    check_lambda(lambda)?;
    let grid = *f.grid();
    let symbol: Vec<Complex64> = match a0.as_constant() {
        Some(c) => (0..grid.len())
            .map(|idx| {
                let xi = grid.frequency(idx);
                Complex64::new(-c * spec.psi(xi[0].hypot(xi[1])), 0.0)
            })
            .collect(),
        None => {
            let nodes = quadrature_nodes(spec, eps, far_radius(spec, eps)?)?;
            grid_symbol(&grid, &nodes, a0)
        }
    };
    Ok(divide(f, lambda, &symbol))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain {
            name: "lambda",
            value: lambda,
            expected: "lambda > 0",
        });
    }
    Ok(())
}

/// Outcome of the frozen-coefficient iteration.
#[derive(Debug, Clone)]
pub struct InhomogeneousSolution {
    pub u: GridField,
    /// Number of perturbation evaluations `(ℒ − ℒ₀)u_k`.
    pub iterations: usize,
    /// `‖λu − ℒu − f‖_∞` with the discrete generator.
    pub residual: f64,
    /// Last measured ratio of successive differences (the trial factor if only one step ran).
    pub contraction_factor: f64,
    pub frozen_index: usize,
    /// `sup_{x,z} |a(x,z) − a(x*,z)|` over the grid and the quadrature jumps.
    pub oscillation: f64,
}

/// `λu − ℒu = f` for a separable coefficient on a fixed grid, reusing the discrete generator
/// across right-hand sides and `λ`.
#[derive(Debug, Clone)]
pub struct ResolventSolver {
    generator: DiscreteGenerator,
    coefficient: CoefficientField,
    spec: SubordinatorSpec,
    config: SolverConfig,
}

impl ResolventSolver {
    pub fn new(grid: crate::fields::Grid, a: &CoefficientField, spec: &SubordinatorSpec, config: SolverConfig) -> Result<Self> {
        if !(config.eps > 0.0 && config.eps < 4.0 * grid.spacing()) {
            return Err(Error::InvalidParameter(format!(
                "eps = {} must lie in (0, 4h) = (0, {})",
                config.eps,
                4.0 * grid.spacing()
            )));
        }
        Ok(Self {
            generator: DiscreteGenerator::new(grid, a, spec, config.eps)?,
            coefficient: a.clone(),
            spec: spec.clone(),
            config,
        })
    }

    pub fn generator(&self) -> &DiscreteGenerator {
        &self.generator
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    fn perturbation(&self, u: &GridField, frozen: &[Complex64]) -> GridField {
        let full = self.generator.apply(u);
        let spec: Vec<Complex64> = u.spectrum().iter().zip(frozen).map(|(c, m)| c * m).collect();
        let frozen_part = GridField::from_spectrum(*u.grid(), spec);
        full.combine(1.0, &frozen_part, -1.0).expect("same grid")
    }

    fn trial_factor(&self, f: &GridField, lambda: f64, index: usize) -> f64 {
        let m0 = self.generator.frozen_symbol(index);
        let u0 = divide(f, lambda, &m0);
        let rhs = f.combine(1.0, &self.perturbation(&u0, &m0), 1.0).expect("same grid");
        let u1 = divide(&rhs, lambda, &m0);
        let d = u1.combine(1.0, &u0, -1.0).expect("same grid").max_abs();
        let s = u0.max_abs();
        if s == 0.0 {
            0.0
        } else {
            d / s
        }
    }

    /// Frozen point: argmin of the trial factor over 16 evenly spaced grid points.
    pub fn choose_frozen_point(&self, f: &GridField, lambda: f64) -> (usize, f64) {
        let len = self.generator.grid().len();
        (0..16)
            .map(|k| {
                let idx = k * len / 16;
                (idx, self.trial_factor(f, lambda, idx))
            })
            .fold((0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
    }

    fn oscillation(&self, index: usize) -> f64 {
        let grid = self.generator.grid();
        let xs = grid.point(index);
        let nodes = [1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 4.0];
        let mut worst = 0.0f64;
        for i in (0..grid.len()).step_by((grid.len() / 256).max(1)) {
            let x = grid.point(i);
            for &r in &nodes {
                let z = [r, 0.0];
                worst = worst.max((self.coefficient.eval(&x, &z) - self.coefficient.eval(&xs, &z)).abs());
            }
        }
        worst
    }

    pub fn solve(&self, f: &GridField, lambda: f64) -> Result<InhomogeneousSolution> {
        check_lambda(lambda)?;
        if lambda < self.config.lambda0 {
            return Err(Error::InvalidParameter(format!(
                "lambda = {lambda} is below lambda0 = {}",
                self.config.lambda0
            )));
        }
        if f.grid() != self.generator.grid() {
            return Err(Error::GridMismatch("right-hand side and generator grids differ".into()));
        }
        let scale = f.max_abs();
        let (index, trial) = match self.config.frozen_index {
            Some(i) => (i, f64::NAN),
            None if self.generator.is_x_independent() => (0, 0.0),
            None => self.choose_frozen_point(f, lambda),
        };
        let oscillation = self.oscillation(index);
        if scale == 0.0 {
            return Ok(InhomogeneousSolution {
                u: GridField::zeros(*f.grid()),
                iterations: 0,
                residual: 0.0,
                contraction_factor: 0.0,
                frozen_index: index,
                oscillation,
            });
        }
        let m0 = self.generator.frozen_symbol(index);
        let mut u = divide(f, lambda, &m0);
        let mut iterations = 0;
        let mut last_diff = f64::NAN;
        let mut factor = trial;
        let mut streak = 0;
        loop {
            let rhs = f.combine(1.0, &self.perturbation(&u, &m0), 1.0)?;
            iterations += 1;
            let next = divide(&rhs, lambda, &m0);
            let diff = next.combine(1.0, &u, -1.0)?.max_abs();
            u = next;
            if last_diff.is_finite() && last_diff > 0.0 {
                factor = diff / last_diff;
                streak = if factor >= 1.0 { streak + 1 } else { 0 };
                if streak >= 3 {
                    return Err(Error::Divergence { factor });
                }
            }
            last_diff = diff;
            if diff <= self.config.tolerance * scale || self.generator.is_x_independent() {
                break;
            }
            if iterations >= self.config.max_iterations {
                return Err(Error::Divergence { factor });
            }
        }
        let residual = self.residual(&u, f, lambda);
        Ok(InhomogeneousSolution {
            u,
            iterations,
            residual,
            contraction_factor: factor,
            frozen_index: index,
            oscillation,
        })
    }

    /// `‖λu − ℒu − f‖_∞` with this solver's discrete generator.
    pub fn residual(&self, u: &GridField, f: &GridField, lambda: f64) -> f64 {
        let lu = self.generator.apply(u);
        let mut worst = 0.0f64;
        for ((a, b), c) in u.values().iter().zip(lu.values()).zip(f.values()) {
            worst = worst.max((lambda * a - b - c).abs());
        }
        worst
    }

    /// `(λN_β(u) + ‖u‖_{𝒞^{1+β}_ψ}) / N_β(f)` with `N₀ = ‖·‖_∞` and `N_β = ‖·‖_{𝒞^β_ψ}`.
    pub fn schauder_report(&self, f: &GridField, lambda: f64, beta: f64) -> Result<SchauderReport> {
        Ok(self.schauder_reports(f, lambda, &[beta])?.remove(0))
    }

    /// [`Self::schauder_report`] for several `β` from a single solve.
    pub fn schauder_reports(&self, f: &GridField, lambda: f64, betas: &[f64]) -> Result<Vec<SchauderReport>> {
        let sol = self.solve(f, lambda)?;
        let j_max = crate::fields::admissible_j_max(f.grid(), &self.spec);
        betas
            .iter()
            .map(|&beta| {
                let norm_beta = |g: &GridField| -> Result<f64> {
                    if beta == 0.0 {
                        Ok(g.max_abs())
                    } else {
                        besov_norm(g, beta, &Integrability::Sup, &self.spec)
                    }
                };
                let low = lambda * norm_beta(&sol.u)?;
                let high = besov_norm(&sol.u, 1.0 + beta, &Integrability::Sup, &self.spec)?;
                let rhs = norm_beta(f)?;
                Ok(SchauderReport {
                    lambda,
                    beta,
                    lhs_low: low,
                    lhs_high: high,
                    rhs,
                    ratio: if rhs > 0.0 { Some((low + high) / rhs) } else { None },
                    j_max,
                    iterations: sol.iterations,
                    residual: sol.residual,
                    contraction_factor: sol.contraction_factor,
                })
            })
            .collect()
    }

    /// `‖ℒu‖_{𝒞⁰_ψ} / (‖u‖_{𝒞¹_ψ}·sup_z ‖a(·,z)‖_{𝒞^θ_ψ})`, the supremum over `z` taken on a
    /// few jump radii.
    pub fn operator_ratio(&self, u: &GridField, theta: f64) -> Result<Option<f64>> {
        let grid = *u.grid();
        let lu = self.generator.apply(u);
        let num = besov_norm(&lu, 0.0, &Integrability::Sup, &self.spec)?;
        let den_u = besov_norm(u, 1.0, &Integrability::Sup, &self.spec)?;
        let mut sup_a = 0.0f64;
        for r in [1e-3, 1e-2, 0.1, 1.0, 4.0] {
            let z = [r, 0.0];
            let field = GridField::from_fn(grid, |x| self.coefficient.eval(x, &z));
            sup_a = sup_a.max(besov_norm(&field, theta, &Integrability::Sup, &self.spec)?);
        }
        let den = den_u * sup_a;
        Ok(if den > 0.0 { Some(num / den) } else { None })
    }
}

/// Solves `λu − ℒ_a u = f` by Picard iteration around the frozen coefficient `a(x*, ·)`.
pub fn solve_inhomogeneous(
    f: &GridField,
    lambda: f64,
    a: &CoefficientField,
    spec: &SubordinatorSpec,
    config: SolverConfig,
) -> Result<InhomogeneousSolution> {
    ResolventSolver::new(*f.grid(), a, spec, config)?.solve(f, lambda)
}

/// Terms of the Schauder estimate for one right-hand side.
#[derive(Debug, Clone, Serialize)]
pub struct SchauderReport {
    pub lambda: f64,
    pub beta: f64,
    /// `λ·N_β(u)`.
    pub lhs_low: f64,
    /// `‖u‖_{𝒞^{1+β}_ψ}`.
    pub lhs_high: f64,
    /// `N_β(f)`.
    pub rhs: f64,
    /// `None` when `N_β(f) = 0`.
    pub ratio: Option<f64>,
    pub j_max: i32,
    pub iterations: usize,
    pub residual: f64,
    pub contraction_factor: f64,
}

/// [`ResolventSolver::schauder_report`] for a single right-hand side.
pub fn schauder_report(
    f: &GridField,
    lambda: f64,
    a: &CoefficientField,
    spec: &SubordinatorSpec,
    beta: f64,
    config: SolverConfig,
) -> Result<SchauderReport> {
    ResolventSolver::new(*f.grid(), a, spec, config)?.schauder_report(f, lambda, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;

    #[test]
    fn homogeneous_single_mode() {
        let spec = SubordinatorSpec::gamma(1).unwrap();
        let grid = Grid::new(1, 128, 16.0).unwrap();
        let xi = grid.angular_frequency(5);
        let f = GridField::from_fn(grid, |x| (xi * x[0]).cos());
        let u = solve_homogeneous(&f, 3.0, &spec, &ZCoefficient::constant(1.0), 1e-3).unwrap();
        let k = 1.0 / (3.0 + spec.psi(xi));
        for (a, b) in u.values().iter().zip(f.values()) {
            assert!((a - k * b).abs() < 1e-13);
        }
    }

    #[test]
    fn x_independent_converges_in_one_iteration() {
        let spec = SubordinatorSpec::gamma(1).unwrap();
        let grid = Grid::new(1, 256, 16.0).unwrap();
        let f = GridField::from_fn(grid, |x| (-x[0] * x[0]).exp());
        let a = CoefficientField::constant(1.0).unwrap();
        let cfg = SolverConfig {
            eps: 1e-3,
            ..SolverConfig::default()
        };
        let sol = solve_inhomogeneous(&f, 16.0, &a, &spec, cfg).unwrap();
        assert_eq!(sol.iterations, 1);
        assert!(sol.residual < 1e-12);
    }

    #[test]
    fn zero_rhs_and_lambda_checks() {
        let spec = SubordinatorSpec::gamma(1).unwrap();
        let grid = Grid::new(1, 64, 16.0).unwrap();
        let a = CoefficientField::x_oscillation(0.1, 16.0).unwrap();
        let cfg = SolverConfig {
            eps: 1e-2,
            ..SolverConfig::default()
        };
        let sol = solve_inhomogeneous(&GridField::zeros(grid), 16.0, &a, &spec, cfg).unwrap();
        assert_eq!(sol.u.max_abs(), 0.0);
        assert!(solve_inhomogeneous(&GridField::zeros(grid), 2.0, &a, &spec, cfg).is_err());
        let bad = SolverConfig { eps: 1.0, ..cfg };
        assert!(ResolventSolver::new(grid, &a, &spec, bad).is_err());
    }
}
