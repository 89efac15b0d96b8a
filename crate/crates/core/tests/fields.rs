use lowsing::fields::family::random_block_modes;
use lowsing::fields::io::{read_field, write_field};
use lowsing::fields::{admissible_j_max, besov_norm, psi_block, CutoffProfile, DecompositionStack, Grid, GridField, Integrability};
use lowsing::symbols::SubordinatorSpec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn container_layout_is_little_endian() {
    let grid = Grid::new(1, 4, 2.0).unwrap();
    let f = GridField::new(grid, vec![1.0, -2.5, 0.0, 3.25]).unwrap();
    let mut buf = Vec::new();
    write_field(&f, &mut buf).unwrap();
    let mut expected = Vec::new();
    expected.extend_from_slice(&[1, 0, 0, 0, 0, 0, 0, 0]);
    expected.extend_from_slice(&[4, 0, 0, 0, 0, 0, 0, 0]);
    expected.extend_from_slice(&2.0f64.to_le_bytes());
    for v in [1.0f64, -2.5, 0.0, 3.25] {
        expected.extend_from_slice(&v.to_le_bytes());
    }
    assert_eq!(buf, expected);
}

#[test]
fn blocks_sum_to_the_field() {
    let spec = SubordinatorSpec::stable(1.0, 1).unwrap();
    let grid = Grid::new(1, 1 << 10, 16.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_block_modes(grid, &spec, admissible_j_max(&grid, &spec), &mut rng).unwrap();
    let stack = DecompositionStack::new(&f, &spec, &CutoffProfile).unwrap();
    let total = stack.partial_sum(stack.j_max()).unwrap();
    assert!(total.combine(1.0, &f, -1.0).unwrap().max_abs() < 1e-10 * f.max_abs());
}

#[test]
fn gamma_block_budget() {
    let spec = SubordinatorSpec::gamma(1).unwrap();
    for n in [1 << 10, 1 << 14, 1 << 20] {
        let grid = Grid::new(1, n, 16.0).unwrap();
        assert!(admissible_j_max(&grid, &spec) <= 3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn container_roundtrip(dim in 1usize..3, log_n in 2u32..6, length in 0.5f64..50.0, seed in any::<u64>()) {
        let grid = Grid::new(dim, 1 << log_n, length).unwrap();
        let f = GridField::from_fn(grid, |x| (seed as f64 * 1e-19 + x[0]).sin() - x[1]);
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        prop_assert_eq!(buf.len(), 24 + 8 * grid.len());
        let back = read_field(&buf[..]).unwrap();
        prop_assert_eq!(back.grid(), f.grid());
        prop_assert_eq!(back.values(), f.values());
    }

    #[test]
    fn truncated_containers_are_rejected(cut in 0usize..40) {
        let grid = Grid::new(1, 4, 1.0).unwrap();
        let mut buf = Vec::new();
        write_field(&GridField::constant(grid, 1.0), &mut buf).unwrap();
        buf.truncate(cut.min(buf.len() - 1));
        prop_assert!(read_field(&buf[..]).is_err());
    }

    #[test]
    fn blocks_are_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let spec = SubordinatorSpec::gamma(1).unwrap();
        let grid = Grid::new(1, 1 << 10, 16.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let top = admissible_j_max(&grid, &spec);
        let f = random_block_modes(grid, &spec, top, &mut rng).unwrap();
        let g = random_block_modes(grid, &spec, top, &mut rng).unwrap();
        let sum = f.combine(a, &g, b).unwrap();
        let scale = f.max_abs().max(g.max_abs()) * (a.abs() + b.abs()).max(1.0);
        for j in -1..=top {
            let lhs = psi_block(&sum, j, &spec, &CutoffProfile).unwrap();
            let rhs = psi_block(&f, j, &spec, &CutoffProfile).unwrap()
                .combine(a, &psi_block(&g, j, &spec, &CutoffProfile).unwrap(), b).unwrap();
            prop_assert!(lhs.combine(1.0, &rhs, -1.0).unwrap().max_abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn besov_norms_are_homogeneous(seed in any::<u64>(), c in 0.01f64..100.0, s in -1.0f64..2.0) {
        let spec = SubordinatorSpec::stable(1.0, 1).unwrap();
        let grid = Grid::new(1, 512, 16.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_block_modes(grid, &spec, admissible_j_max(&grid, &spec), &mut rng).unwrap();
        let n1 = besov_norm(&f, s, &Integrability::Sup, &spec).unwrap();
        let n2 = besov_norm(&f.scaled(-c), s, &Integrability::Sup, &spec).unwrap();
        prop_assert!((n2 / (c * n1) - 1.0).abs() < 1e-10);
    }
}
