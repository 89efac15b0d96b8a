use super::Scale;
use crate::error::{Error, Result};
use crate::numeric::{bisect_linear, log_grid, MonotoneCubic};
use crate::orlicz::NFunction;
use crate::symbols::SubordinatorSpec;

const V_LO: f64 = -12.0;
const V_HI: f64 = 690.0;
const STEP: f64 = 0.02;

/// The scale `Ψ(R) = (∫_R^∞ A⁻¹(t^d) ψ'(t)/ψ²(t) dt)^{−1}`, tabulated in `v = ln t`.
///
/// The integral is accumulated by Simpson's rule from `ln R = 690` downwards, with the
/// remainder beyond that point taken from a power-law fit of the integrand in `v`.
#[derive(Debug, Clone)]
pub struct MorreyScale {
    label: String,
    ln_psi: MonotoneCubic,
    v_max: f64,
}

impl MorreyScale {
    pub fn new(spec: &SubordinatorSpec, a: &NFunction) -> Result<Self> {
        let d = spec.dim() as f64;
        let integrand = |v: f64| {
            let psi = spec.psi_of_log(v);
            a.inverse_of_exp(d * v) * (spec.log_derivative_of_log(v) / psi) / psi
        };
        let steps = ((V_HI - V_LO) / STEP).round() as usize;
        let vs: Vec<f64> = (0..=steps).map(|i| V_LO + i as f64 * STEP).collect();
        let top = integrand(V_HI);
        let half = integrand(0.5 * V_HI);
        let tail = if !(top > 0.0 && top.is_finite()) {
            0.0
        } else {
            let p = (half / top).ln() / 2f64.ln();
            if p <= 1.0 {
                return Err(Error::Quadrature {
                    what: "morrey scale tail",
                    last_change: p,
                    evaluations: 2,
                });
            }
            top * V_HI / (p - 1.0)
        };
        let mut cumulative = vec![0.0; vs.len()];
        cumulative[steps] = tail;
        for i in (0..steps).rev() {
            let (v0, v1) = (vs[i], vs[i + 1]);
            let piece = (integrand(v0) + 4.0 * integrand(0.5 * (v0 + v1)) + integrand(v1)) * (v1 - v0) / 6.0;
            cumulative[i] = cumulative[i + 1] + piece;
        }
        // Past the point where ψ² overflows the integrand reads zero; keep the valid prefix.
        let valid = cumulative.iter().take_while(|c| c.is_finite() && **c > 0.0).count();
        if valid < 64 {
            return Err(Error::Quadrature {
                what: "morrey scale integral",
                last_change: f64::NAN,
                evaluations: 2 * steps + 1,
            });
        }
        let mut vs = vs;
        vs.truncate(valid);
        cumulative.truncate(valid);
        let v_max = vs[valid - 1];
        let ln_psi: Vec<f64> = cumulative.iter().map(|c| -c.ln()).collect();
        Ok(Self {
            label: format!("morrey[{spec}, {a}]"),
            ln_psi: MonotoneCubic::new(vs, ln_psi)?,
            v_max,
        })
    }

    /// `ln Ψ(e^v)`.
    pub fn ln_value_of_log(&self, v: f64) -> f64 {
        self.ln_psi.eval(v)
    }

    /// `1/Ψ(1/r)`, the modulus of continuity attached to `Ψ`.
    pub fn modulus(&self, r: f64) -> f64 {
        (-self.ln_value_of_log(-r.ln())).exp()
    }
}

impl Scale for MorreyScale {
    fn scale(&self, r: f64) -> f64 {
        self.ln_value_of_log(r.ln()).exp()
    }

    fn scale_inverse(&self, y: f64) -> f64 {
        let target = y.ln();
        if target > self.ln_value_of_log(self.v_max) {
            return f64::INFINITY;
        }
        let mut lo = V_LO;
        while self.ln_value_of_log(lo) > target {
            lo -= 50.0;
            if lo < -1e4 {
                return 0.0;
            }
        }
        bisect_linear(|v| self.ln_value_of_log(v), target, lo, self.v_max, 1e-13).exp()
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Largest `ε ∈ [0, 4]` with `[ψ⁻¹(t^{1+ε})]^d ≤ A(t)` at 200 log-spaced `t ∈ [t_lo, t_hi]`,
/// or `None` if the inequality already fails at `ε = 0`.
pub fn morrey2_epsilon(spec: &SubordinatorSpec, a: &NFunction, t_lo: f64, t_hi: f64) -> Option<f64> {
    growth_exponent(spec, a, 1.0, t_lo, t_hi)
}

/// Largest `ε ∈ [0, 4]` with `A(t) ≥ [ψ⁻¹(c·t^{1+ε})]^d` at 200 log-spaced `t ∈ [t_lo, t_hi]`.
pub fn growth_exponent(spec: &SubordinatorSpec, a: &NFunction, c: f64, t_lo: f64, t_hi: f64) -> Option<f64> {
    let d = spec.dim() as f64;
    let ts = log_grid(t_lo, t_hi, 200);
    let holds = |eps: f64| {
        ts.iter()
            .all(|&t| d * spec.ln_psi_inverse(c * t.powf(1.0 + eps)) <= a.ln_value(t))
    };
    if !holds(0.0) {
        return None;
    }
    if holds(4.0) {
        return Some(4.0);
    }
    let (mut lo, mut hi) = (0.0, 4.0);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_exp_power_matches_log_rate() {
        // For ψ = log(1+R²), A = e^{t²} − 1, d = 1 the modulus behaves like (log 1/r)^{−1/2}.
        let spec = SubordinatorSpec::gamma(1).unwrap();
        let a = NFunction::exp_power(2.0).unwrap();
        let m = MorreyScale::new(&spec, &a).unwrap();
        let r1 = m.modulus(1e-20) * (20.0 * 10f64.ln()).sqrt();
        let r2 = m.modulus(1e-200) * (200.0 * 10f64.ln()).sqrt();
        assert!((r1 / r2 - 1.0).abs() < 0.1, "{r1} {r2}");
        let y = m.scale(50.0);
        assert!((m.scale_inverse(y) / 50.0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn stable_power_matches_holder_rate() {
        // ψ = R, A = t⁴, d = 1: modulus ∝ r^{1 − 1/4}.
        let spec = SubordinatorSpec::stable(1.0, 1).unwrap();
        let a = NFunction::power(4.0).unwrap();
        let m = MorreyScale::new(&spec, &a).unwrap();
        let ratio = m.modulus(1e-6) / m.modulus(1e-8);
        assert!((ratio.log10() / 2.0 - 0.75).abs() < 1e-6);
    }

    #[test]
    fn epsilon_search() {
        let spec = SubordinatorSpec::gamma(1).unwrap();
        let a = NFunction::exp_power(2.0).unwrap();
        let eps = morrey2_epsilon(&spec, &a, 1.0, 1e3).unwrap();
        assert!(eps > 0.0 && eps < 4.0);
        let d = spec.ln_psi_inverse(1e3f64.powf(1.0 + eps));
        assert!(d <= a.ln_value(1e3) * (1.0 + 1e-9));
    }
}
