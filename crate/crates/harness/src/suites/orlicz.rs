use lowsing::numeric::log_grid;
use lowsing::orlicz::{luxemburg_norm_of, NFunction};
use rand::Rng;
use serde_json::json;

use super::{guarded, max_of, CheckFn, Options};
use crate::report::Check;

pub const CHECKS: &[(&str, CheckFn)] = &[
    ("C5", inverse_product),
    ("orlicz.holder", holder_inequality),
    ("orlicz.young", young_inequality),
    ("orlicz.homogeneity", homogeneity),
    ("orlicz.legendre", legendre_power),
];

/// The three families used by the conjugate-inverse sandwich.
pub fn families() -> Vec<(String, NFunction)> {
    vec![
        ("power(3)".into(), NFunction::power(3.0).unwrap()),
        ("exp_power(2)".into(), NFunction::exp_power(2.0).unwrap()),
        (
            "density s·ln(e+s)".into(),
            NFunction::from_density(|s| s * (std::f64::consts::E + s).ln(), 1e-8, 1e8, 2048).unwrap(),
        ),
    ]
}

pub fn inverse_product(_: &Options) -> Check {
    guarded("C5", "s ≤ A*⁻¹(s)·A⁻¹(s) ≤ 2s", "violation ≤ 1e-9·s", || {
        let grid = log_grid(1e-6, 1e6, 200);
        let mut per_family = serde_json::Map::new();
        let mut worst = 0.0f64;
        for (name, a) in families() {
            let conj = a.conjugate();
            let mut v = 0.0f64;
            let mut ratio = (f64::INFINITY, 0.0f64);
            for &s in &grid {
                let p = conj.inverse(s)? * a.inverse(s)?;
                v = v.max(((s - p) / s).max((p - 2.0 * s) / s));
                ratio = (ratio.0.min(p / s), ratio.1.max(p / s));
            }
            worst = worst.max(v);
            per_family.insert(name, json!({ "max_violation": v.max(0.0), "min_ratio": ratio.0, "max_ratio": ratio.1 }));
        }
        Ok((worst <= 1e-9, json!({ "max_violation": worst.max(0.0), "families": per_family })))
    })
}

fn random_samples(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let scale = 10f64.powf(rng.random_range(-2.0..2.0));
    (0..n)
        .map(|_| {
            let u: f64 = rng.random_range(1e-12..1.0);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            sign * scale * (-u.ln())
        })
        .collect()
}

pub fn holder_inequality(o: &Options) -> Check {
    guarded("orlicz.holder", "∫|fg| ≤ 2‖f‖_A‖g‖_A*", "100 random pairs per family", || {
        let mut rng = o.rng(501);
        let n = 256;
        let cell = 1.0 / n as f64;
        let mut worst = 0.0f64;
        for (_, a) in families() {
            let conj = a.conjugate();
            for _ in 0..100 {
                let f = random_samples(&mut rng, n);
                let g = random_samples(&mut rng, n);
                let lhs: f64 = f.iter().zip(&g).map(|(x, y)| (x * y).abs()).sum::<f64>() * cell;
                let rhs = 2.0 * luxemburg_norm_of(&f, cell, &a) * luxemburg_norm_of(&g, cell, &conj);
                worst = worst.max(lhs / rhs);
            }
        }
        Ok((worst <= 1.0, json!({ "max_lhs_over_rhs": worst })))
    })
}

/// Triples `(p, q, r)` of power functions with `A⁻¹B⁻¹ ≤ t·C⁻¹`; `r = None` is the sup norm.
const YOUNG_TRIPLES: &[(f64, f64, Option<f64>)] = &[(1.5, 1.5, Some(3.0)), (4.0 / 3.0, 2.0, Some(4.0)), (2.0, 2.0, None)];

pub fn young_inequality(o: &Options) -> Check {
    guarded("orlicz.young", "‖f*g‖_C ≤ 2‖f‖_A‖g‖_B", "50 random pairs per admissible triple", || {
        let mut rng = o.rng(502);
        let n = 256;
        let cell = 1.0 / n as f64;
        let mut worst = 0.0f64;
        let mut pointwise = true;
        for &(p, q, r) in YOUNG_TRIPLES {
            let (a, b) = (NFunction::power(p)?, NFunction::power(q)?);
            let c = r.map(NFunction::power).transpose()?;
            for &t in &log_grid(1e-6, 1e6, 121) {
                let lhs = a.inverse(t)? * b.inverse(t)?;
                let rhs = match &c {
                    Some(c) => t * c.inverse(t)?,
                    None => t,
                };
                pointwise &= lhs <= rhs * (1.0 + 1e-12);
            }
            for _ in 0..50 {
                let f = random_samples(&mut rng, n);
                let g = random_samples(&mut rng, n);
                let conv: Vec<f64> = (0..n)
                    .map(|k| (0..n).map(|i| f[i] * g[(k + n - i) % n]).sum::<f64>() * cell)
                    .collect();
                let lhs = match &c {
                    Some(c) => luxemburg_norm_of(&conv, cell, c),
                    None => max_of(conv.iter().map(|v| v.abs())),
                };
                let rhs = 2.0 * luxemburg_norm_of(&f, cell, &a) * luxemburg_norm_of(&g, cell, &b);
                worst = worst.max(lhs / rhs);
            }
        }
        Ok((
            pointwise && worst <= 1.0,
            json!({ "pointwise_condition": pointwise, "max_lhs_over_rhs": worst }),
        ))
    })
}

pub fn homogeneity(o: &Options) -> Check {
    guarded("orlicz.homogeneity", "‖cf‖_A = |c|‖f‖_A", "relative 1e-9", || {
        let mut rng = o.rng(503);
        let mut worst = 0.0f64;
        for (_, a) in families() {
            for _ in 0..20 {
                let f = random_samples(&mut rng, 128);
                let base = luxemburg_norm_of(&f, 0.01, &a);
                for c in [-3.0, 0.5, 7.0] {
                    let scaled: Vec<f64> = f.iter().map(|v| c * v).collect();
                    let n = luxemburg_norm_of(&scaled, 0.01, &a);
                    worst = worst.max((n / (c.abs() * base) - 1.0).abs());
                }
            }
        }
        Ok((worst <= 1e-9, json!({ "max_relative_error": worst })))
    })
}

pub fn legendre_power(_: &Options) -> Check {
    guarded("orlicz.legendre", "conjugate of tᵖ matches closed form", "relative 1e-8", || {
        let mut worst = 0.0f64;
        for p in [1.5, 2.0, 3.0, 5.0] {
            let a = NFunction::power(p)?;
            let q = p / (p - 1.0);
            for &s in &log_grid(1e-3, 1e3, 61) {
                let exact = (p - 1.0) * (s / p).powf(q);
                worst = worst.max((a.legendre_conjugate(s)? / exact - 1.0).abs());
            }
        }
        Ok((worst <= 1e-8, json!({ "max_relative_error": worst })))
    })
}
