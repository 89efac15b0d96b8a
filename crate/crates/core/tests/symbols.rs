use lowsing::symbols::SubordinatorSpec;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

#[test]
fn gamma_kernels_match_bessel_forms() {
    // d = 1: e^{−r}/r.  d = 2: K₁(r)/(πr).  Values from an independent high-precision evaluation.
    let one = SubordinatorSpec::gamma(1).unwrap();
    let two = SubordinatorSpec::gamma(2).unwrap();
    for (r, j1, j2) in [
        (0.1, 9.048374180359595, 31.365762106716623),
        (1.0, 0.36787944117144233, 0.19159302193728245),
        (2.5, 0.03283399944955952, 0.0094080709366715),
    ] {
        assert!(rel(one.kernel(r).unwrap(), j1) < 1e-6, "d=1 r={r}");
        assert!(rel(two.kernel(r).unwrap(), j2) < 1e-6, "d=2 r={r}");
    }
}

#[test]
fn gamma_tail_masses() {
    // d = 1: 2E₁(r).  d = 2: 2K₀(r).
    let one = SubordinatorSpec::gamma(1).unwrap();
    let two = SubordinatorSpec::gamma(2).unwrap();
    assert!(rel(one.kernel_tail_mass(0.5).unwrap(), 1.1195471895523217) < 1e-8);
    assert!(rel(one.kernel_tail_mass(3.0).unwrap(), 0.026096762188394077) < 1e-8);
    assert!(rel(two.kernel_tail_mass(0.5).unwrap(), 1.8488381424553317) < 1e-6);
    assert!(rel(two.kernel_tail_mass(2.0).unwrap(), 0.22778774549906688) < 1e-6);
    // First moment 2(1 − e^{−r}) in d = 1.
    for r in [1e-4f64, 0.5, 3.0] {
        assert!(rel(one.kernel_first_moment(r).unwrap(), -2.0 * (-r).exp_m1()) < 1e-8);
    }
}

#[test]
fn gamma_potential_density() {
    let spec = SubordinatorSpec::gamma(1).unwrap();
    for (lambda, u, v) in [
        (1.0, 0.5, 0.36731812815868514),
        (2.0, 1.5, 0.049323982277501004),
        (0.5, 0.1, 1.1794282580866682),
    ] {
        assert!(rel(spec.potential_density(lambda, u).unwrap(), v) < 1e-7, "λ={lambda} u={u}");
    }
    assert!(SubordinatorSpec::stable(1.0, 1).unwrap().potential_density(1.0, 1.0).is_err());
}

#[test]
fn closed_form_exponents() {
    let gamma = SubordinatorSpec::gamma(1).unwrap();
    let stable = SubordinatorSpec::stable(0.5, 1).unwrap();
    for r in [1e-3, 0.7, 40.0] {
        assert!(rel(gamma.psi(r), (r * r).ln_1p()) < 1e-14);
        assert!(rel(stable.psi(r), r.sqrt()) < 1e-14);
    }
    assert!(SubordinatorSpec::stable(2.5, 1).is_err());
    assert!(SubordinatorSpec::gamma(3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn psi_inverse_roundtrip(log_r in -6.0f64..6.0, which in 0u8..3) {
        let spec = match which {
            0 => SubordinatorSpec::gamma(1).unwrap(),
            1 => SubordinatorSpec::stable(1.0, 2).unwrap(),
            _ => SubordinatorSpec::stable(0.3, 1).unwrap(),
        };
        let r = 10f64.powf(log_r);
        prop_assert!(rel(spec.psi_inverse(spec.psi(r)), r) < 1e-10);
        prop_assert!(spec.psi(r * 1.01) > spec.psi(r));
    }

    #[test]
    fn kernel_is_positive_and_decreasing(log_r in -3.0f64..1.3) {
        let spec = SubordinatorSpec::gamma(2).unwrap();
        let r = 10f64.powf(log_r);
        let (a, b) = (spec.kernel(r).unwrap(), spec.kernel(r * 1.1).unwrap());
        prop_assert!(a > 0.0 && b < a);
    }
}
