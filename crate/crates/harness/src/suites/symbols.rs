use lowsing::numeric::{log_grid, trapezoid_doubling};
use lowsing::operator::{generator_symbol, ZCoefficient};
use lowsing::symbols::SubordinatorSpec;
use serde_json::json;

use super::{guarded, CheckFn, Options};
use crate::report::Check;

pub const CHECKS: &[(&str, CheckFn)] = &[
    ("C1", symbol_identity),
    ("symbols.slow_variation", slow_variation),
    ("symbols.slow_variation_rate", slow_variation_rate),
    ("symbols.karamata", karamata),
    ("symbols.divergence", log_integral_divergence),
    ("symbols.roundtrip", inverse_roundtrip),
    ("symbols.invariants", structural_invariants),
];

pub fn symbol_identity(_: &Options) -> Check {
    guarded("C1", "quadrature symbol equals −ψ", "relative error ≤ 1e-2 on |ξ| ∈ [0.5, 16]", || {
        let spec = SubordinatorSpec::gamma(1)?;
        let one = ZCoefficient::constant(1.0);
        let mut worst = 0.0f64;
        let mut worst_at = 0.0;
        let mut max_imag = 0.0f64;
        let mut bias = 0.0f64;
        for &xi in &log_grid(0.5, 16.0, 64) {
            let s = generator_symbol(&spec, &one, &[xi, 0.0], 1e-4)?;
            let psi = spec.psi(xi);
            let err = (s.re + psi).abs() / psi;
            if err > worst {
                worst = err;
                worst_at = xi;
            }
            max_imag = max_imag.max(s.im.abs());
            bias = bias.max(s.eps_bias + s.far_bias);
        }
        Ok((
            worst <= 1e-2,
            json!({ "max_relative_error": worst, "at_xi": worst_at, "max_imaginary": max_imag, "max_truncation_bound": bias }),
        ))
    })
}

pub fn slow_variation(_: &Options) -> Check {
    guarded("symbols.slow_variation", "φ(λx)/φ(x) → 1", "deviation ≤ 5% at x = 1e9 for λ ∈ {2, 10}", || {
        let spec = SubordinatorSpec::gamma(1)?;
        let mut rows = Vec::new();
        let mut top = 0.0f64;
        for lambda in [2.0, 10.0] {
            for k in 3..=9 {
                let x = 10f64.powi(k);
                let r = spec.phi(lambda * x) / spec.phi(x);
                rows.push(json!({ "lambda": lambda, "x": x, "ratio": r }));
                if k == 9 {
                    top = top.max((r - 1.0).abs());
                }
            }
        }
        Ok((top <= 0.05, json!({ "deviation_at_top": top, "table": rows })))
    })
}

/// For φ = log(1+t) the deviation is ln λ / ln x to leading order.
pub fn slow_variation_rate(_: &Options) -> Check {
    guarded("symbols.slow_variation_rate", "φ(λx)/φ(x) − 1 decays like ln λ / ln x", "ratios decrease in x; (ratio − 1)·ln x / ln λ within 5% of 1 at x = 1e9", || {
        let spec = SubordinatorSpec::gamma(1)?;
        let mut rows = Vec::new();
        let mut decreasing = true;
        let mut worst = 0.0f64;
        for lambda in [2.0f64, 10.0] {
            let ratios: Vec<f64> = (3..=9).map(|k| spec.phi(lambda * 10f64.powi(k)) / spec.phi(10f64.powi(k))).collect();
            decreasing &= ratios.windows(2).all(|w| w[1] < w[0]);
            let rate = (ratios[6] - 1.0) * 1e9f64.ln() / lambda.ln();
            worst = worst.max((rate - 1.0).abs());
            rows.push(json!({ "lambda": lambda, "ratios": ratios, "rate_at_top": rate }));
        }
        Ok((decreasing && worst <= 0.05, json!({ "max_rate_deviation": worst, "table": rows })))
    })
}

/// `∫_lo^hi g(t) dt` in the variable `ln t`.
fn log_integral(g: impl Fn(f64) -> f64, lo: f64, hi: f64) -> lowsing::Result<f64> {
    let h = |v: f64| g(v.exp()) * v.exp();
    let (a, b) = (lo.ln(), hi.ln());
    Ok(trapezoid_doubling("log integral", h, a, b, 1e-9, 0.0, 64, 1 << 22)?.value)
}

pub fn karamata(_: &Options) -> Check {
    guarded("symbols.karamata", "λφ(λ)/∫₁^λ φ → 1", "1 ± 10% at λ = 1e9", || {
        let spec = SubordinatorSpec::gamma(1)?;
        let lambda = 1e9;
        let ratio = lambda * spec.phi(lambda) / log_integral(|t| spec.phi(t), 1.0, lambda)?;
        Ok(((ratio - 1.0).abs() <= 0.1, json!({ "ratio": ratio })))
    })
}

pub fn log_integral_divergence(_: &Options) -> Check {
    guarded("symbols.divergence", "∫₁^R φ(t)/t dt / φ(R) increases without bound", "strictly increasing on R = 1e2..1e8", || {
        let spec = SubordinatorSpec::gamma(1)?;
        let mut values = Vec::new();
        for k in 2..=8 {
            let r = 10f64.powi(k);
            values.push(log_integral(|t| spec.phi(t) / t, 1.0, r)? / spec.phi(r));
        }
        let increasing = values.windows(2).all(|w| w[1] > w[0]);
        Ok((increasing, json!({ "ratios": values })))
    })
}

pub fn inverse_roundtrip(_: &Options) -> Check {
    guarded("symbols.roundtrip", "ψ monotone and ψ⁻¹∘ψ = id", "relative 1e-10", || {
        let mut worst = 0.0f64;
        let mut monotone = true;
        for spec in [SubordinatorSpec::gamma(1)?, SubordinatorSpec::stable(1.0, 1)?, SubordinatorSpec::stable(0.5, 2)?] {
            let grid = log_grid(1e-6, 1e6, 241);
            let psi: Vec<f64> = grid.iter().map(|&r| spec.psi(r)).collect();
            monotone &= psi.windows(2).all(|w| w[1] > w[0]);
            for (&r, &p) in grid.iter().zip(&psi) {
                worst = worst.max((spec.psi_inverse(p) / r - 1.0).abs());
            }
        }
        Ok((monotone && worst <= 1e-10, json!({ "monotone": monotone, "max_relative_error": worst })))
    })
}

pub fn structural_invariants(_: &Options) -> Check {
    guarded("symbols.invariants", "structural assumptions on the exponents", "all hold on the log grid", || {
        let mut ok = true;
        let mut out = serde_json::Map::new();
        for spec in [SubordinatorSpec::gamma(1)?, SubordinatorSpec::stable(1.0, 1)?] {
            let r = spec.check_invariants();
            ok &= r.holds();
            out.insert(spec.to_string(), json!(r.holds()));
        }
        Ok((ok, serde_json::Value::Object(out)))
    })
}
