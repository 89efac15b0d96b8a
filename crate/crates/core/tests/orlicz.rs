use lowsing::orlicz::{luxemburg_norm, luxemburg_norm_of, MeasuredSamples, NFunction};
use proptest::prelude::*;

fn family(kind: u8, param: f64) -> NFunction {
    match kind {
        0 => NFunction::power(1.05 + param * 5.0).unwrap(),
        1 => NFunction::exp_power(1.0 + param * 2.0).unwrap(),
        _ => NFunction::from_density(|s| s * (1.0 + param) * (std::f64::consts::E + s).ln(), 1e-8, 1e8, 1024).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn inverse_product_sandwich(kind in 0u8..3, param in 0.0f64..1.0, log_s in -6.0f64..6.0) {
        let a = family(kind, param);
        let s = 10f64.powf(log_s);
        let product = a.inverse(s).unwrap() * a.conjugate().inverse(s).unwrap();
        prop_assert!(product >= s * (1.0 - 1e-9), "{product} < {s}");
        prop_assert!(product <= 2.0 * s * (1.0 + 1e-9), "{product} > 2·{s}");
    }

    #[test]
    fn luxemburg_norm_is_homogeneous(
        values in prop::collection::vec(-5.0f64..5.0, 8..64),
        c in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0],
        kind in 0u8..2,
    ) {
        prop_assume!(values.iter().any(|v| v.abs() > 1e-3));
        let a = family(kind, 0.5);
        let base = luxemburg_norm_of(&values, 0.125, &a);
        let scaled: Vec<f64> = values.iter().map(|v| c * v).collect();
        let norm = luxemburg_norm_of(&scaled, 0.125, &a);
        prop_assert!((norm / (c.abs() * base) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn luxemburg_norm_is_a_norm(
        f in prop::collection::vec(-3.0f64..3.0, 32),
        g in prop::collection::vec(-3.0f64..3.0, 32),
    ) {
        let a = NFunction::power(2.5).unwrap();
        let sum: Vec<f64> = f.iter().zip(&g).map(|(x, y)| x + y).collect();
        let nf = luxemburg_norm_of(&f, 0.1, &a);
        let ng = luxemburg_norm_of(&g, 0.1, &a);
        prop_assert!(luxemburg_norm_of(&sum, 0.1, &a) <= (nf + ng) * (1.0 + 1e-9));
    }

    #[test]
    fn holder_inequality(
        f in prop::collection::vec(-4.0f64..4.0, 16..48),
        seed in 0u64..1000,
    ) {
        let g: Vec<f64> = f.iter().enumerate().map(|(i, x)| ((i as u64 * 7919 + seed) % 13) as f64 * 0.3 - x).collect();
        let a = NFunction::exp_power(2.0).unwrap();
        let h = 0.05;
        let lhs: f64 = f.iter().zip(&g).map(|(x, y)| (x * y).abs() * h).sum();
        let rhs = 2.0 * luxemburg_norm_of(&f, h, &a) * luxemburg_norm_of(&g, h, &a.conjugate());
        prop_assert!(lhs <= rhs * (1.0 + 1e-9));
    }
}

#[test]
fn power_conjugate_closed_form() {
    for p in [1.5, 2.0, 3.0, 4.0] {
        let a = NFunction::power(p).unwrap();
        let q = p / (p - 1.0);
        for s in [1e-3, 0.1, 1.0, 7.0, 1e3] {
            // sup_t (st − t^p) is attained at t = (s/p)^{1/(p−1)}.
            let t = (s / p).powf(1.0 / (p - 1.0));
            let exact = s * t - t.powf(p);
            let got = a.legendre_conjugate(s).unwrap();
            assert!((got / exact - 1.0).abs() < 1e-8, "p={p} s={s}");
            assert!((exact - (p - 1.0) * (s / p).powf(q)).abs() < 1e-9 * exact);
        }
    }
}

#[test]
fn numeric_conjugate_of_exp_power() {
    // Direct maximisation of st − (e^{t²} − 1) on a fine grid.
    let a = NFunction::exp_power(2.0).unwrap();
    for s in [0.5, 3.0, 20.0] {
        let best = (0..200_000)
            .map(|i| i as f64 * 3e-5)
            .map(|t| s * t - t.powi(2).exp_m1())
            .fold(f64::MIN, f64::max);
        let got = a.legendre_conjugate(s).unwrap();
        assert!((got - best).abs() < 1e-6 * best.max(1.0), "{s}: {got} vs {best}");
    }
}

#[test]
fn norm_of_an_indicator() {
    // ‖1_E‖_A = 1/A⁻¹(1/|E|).
    let a = NFunction::exp_power(2.0).unwrap();
    let f = MeasuredSamples::new(vec![1.0; 10], 0.05).unwrap();
    let exact = 1.0 / 2f64.ln_1p().sqrt();
    assert!((luxemburg_norm(&f, &a) / exact - 1.0).abs() < 1e-9);
}

#[test]
fn domain_errors() {
    assert!(NFunction::power(1.0).is_err());
    assert!(NFunction::exp_power(0.5).is_err());
    assert!(NFunction::power(2.0).unwrap().eval(-1.0).is_err());
    assert!(MeasuredSamples::new(vec![f64::NAN], 1.0).is_err());
}
