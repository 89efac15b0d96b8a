use lowsing::fields::family::random_block_modes;
use lowsing::fields::{admissible_j_max, Grid, GridField};
use lowsing::operator::{
    apply_generator, generator_symbol, solve_homogeneous, CoefficientField, DiscreteGenerator, ResolventSolver,
    SolverConfig, ZCoefficient,
};
use lowsing::symbols::SubordinatorSpec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn generator_of_a_cosine() {
    // ℒ cos(ξx) = −ψ(ξ) cos(ξx) for a ≡ 1, up to the truncation bounds.
    let spec = SubordinatorSpec::gamma(1).unwrap();
    let grid = Grid::new(1, 1 << 12, 16.0).unwrap();
    let xi = 2.0 * std::f64::consts::PI * 5.0 / 16.0;
    let u = GridField::from_fn(grid, |x| (xi * x[0]).cos());
    let g = apply_generator(&u, &CoefficientField::constant(1.0).unwrap(), &spec, 1e-3).unwrap();
    let expected = u.scaled(-spec.psi(xi));
    let err = g.field.combine(1.0, &expected, -1.0).unwrap().max_abs();
    assert!(err <= g.eps_bias + g.far_bias + 1e-3 * spec.psi(xi), "{err}");
}

#[test]
fn symbol_of_a_constant_coefficient() {
    let spec = SubordinatorSpec::gamma(1).unwrap();
    for xi in [0.5, 2.0, 16.0] {
        let s = generator_symbol(&spec, &ZCoefficient::constant(1.0), &[xi, 0.0], 1e-4).unwrap();
        assert!((s.re + spec.psi(xi)).abs() <= 1e-2 * spec.psi(xi));
        assert!(s.im.abs() < 1e-12);
    }
}

#[test]
fn inhomogeneous_solve_has_small_residual() {
    let spec = SubordinatorSpec::gamma(1).unwrap();
    let grid = Grid::new(1, 1 << 11, 16.0).unwrap();
    let a = CoefficientField::x_oscillation(0.2, 16.0).unwrap();
    let solver = ResolventSolver::new(grid, &a, &spec, SolverConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_block_modes(grid, &spec, admissible_j_max(&grid, &spec), &mut rng).unwrap();
    let sol = solver.solve(&f, 16.0).unwrap();
    assert!(solver.residual(&sol.u, &f, 16.0) < 1e-8 * f.max_abs());
    assert!(sol.contraction_factor < 1.0);
    assert!(solver.solve(&f, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generator_is_linear(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0, amp in 0.0f64..0.9) {
        let spec = SubordinatorSpec::gamma(1).unwrap();
        let grid = Grid::new(1, 256, 16.0).unwrap();
        let coeff = CoefficientField::x_oscillation(amp, 16.0).unwrap();
        let gen = DiscreteGenerator::new(grid, &coeff, &spec, 1e-2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let top = admissible_j_max(&grid, &spec);
        let u = random_block_modes(grid, &spec, top, &mut rng).unwrap();
        let v = random_block_modes(grid, &spec, top, &mut rng).unwrap();
        let lhs = gen.apply(&u.combine(a, &v, b).unwrap());
        let rhs = gen.apply(&u).combine(a, &gen.apply(&v), b).unwrap();
        let scale = lhs.max_abs().max(rhs.max_abs()).max(1e-300);
        prop_assert!(lhs.combine(1.0, &rhs, -1.0).unwrap().max_abs() <= 1e-10 * scale);
    }

    #[test]
    fn symbol_real_part_is_nonpositive(xi in 0.0f64..200.0, c in 0.0f64..3.0, k in 0.1f64..10.0) {
        let spec = SubordinatorSpec::gamma(1).unwrap();
        let q = ZCoefficient::from_fn(move |z| c * (1.0 + (k * z[0]).sin()));
        let s = generator_symbol(&spec, &q, &[xi, 0.0], 1e-3).unwrap();
        prop_assert!(s.re <= 0.0);
    }

    #[test]
    fn resolvent_identity(l in 0.5f64..20.0, m in 0.5f64..20.0, seed in any::<u64>()) {
        let spec = SubordinatorSpec::gamma(1).unwrap();
        let grid = Grid::new(1, 512, 16.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_block_modes(grid, &spec, admissible_j_max(&grid, &spec), &mut rng).unwrap();
        let one = ZCoefficient::constant(1.0);
        let ul = solve_homogeneous(&f, l, &spec, &one, 1e-3).unwrap();
        let um = solve_homogeneous(&f, m, &spec, &one, 1e-3).unwrap();
        let rlm = solve_homogeneous(&um, l, &spec, &one, 1e-3).unwrap();
        let lhs = ul.combine(1.0, &um, -1.0).unwrap();
        let err = lhs.combine(1.0, &rlm, -(m - l)).unwrap().max_abs();
        prop_assert!(err <= 1e-9 * ul.max_abs());
    }
}
