use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type PointFn = Arc<dyn Fn(&[f64; 2]) -> f64 + Send + Sync>;
pub type PairFn = Arc<dyn Fn(&[f64; 2], &[f64; 2]) -> f64 + Send + Sync>;

/// A coefficient `a₀(z)` that does not depend on the base point.
#[derive(Clone)]
pub struct ZCoefficient {
    f: PointFn,
    constant: Option<f64>,
}

impl fmt::Debug for ZCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.constant {
            Some(c) => write!(f, "ZCoefficient({c})"),
            None => write!(f, "ZCoefficient(fn)"),
        }
    }
}

impl ZCoefficient {
    pub fn constant(c: f64) -> Self {
        Self {
            f: Arc::new(move |_| c),
            constant: Some(c),
        }
    }

    pub fn from_fn(f: impl Fn(&[f64; 2]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            constant: None,
        }
    }

    pub fn eval(&self, z: &[f64; 2]) -> f64 {
        (self.f)(z)
    }

    pub fn as_constant(&self) -> Option<f64> {
        self.constant
    }
}

/// One product term `p(x)·q(z)` of a separable coefficient.
#[derive(Clone)]
pub struct SeparableTerm {
    pub p: PointFn,
    pub q: ZCoefficient,
}

#[derive(Clone)]
enum Kind {
    Separable(Vec<SeparableTerm>),
    General(PairFn),
}

/// The state-dependent jump intensity `a(x, z)` with its structural constants: lower
/// bound `c₀` near the origin, upper bound `1/c₀`, radius `ρ₀`, and a Hölder bound `H` of
/// exponent `α` in `x`.
#[derive(Clone)]
pub struct CoefficientField {
    kind: Kind,
    c0: f64,
    rho0: f64,
    holder_constant: f64,
    alpha: f64,
    x_independent: bool,
    label: String,
}

impl fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoefficientField({}, c0={})", self.label, self.c0)
    }
}

fn check_constants(c0: f64, rho0: f64, alpha: f64) -> Result<()> {
    if !(c0 > 0.0 && c0 <= 1.0) {
        return Err(Error::Domain {
            name: "c0",
            value: c0,
            expected: "0 < c0 <= 1",
        });
    }
    if !(rho0 > 0.0 && rho0 <= 1.0) {
        return Err(Error::Domain {
            name: "rho0",
            value: rho0,
            expected: "0 < rho0 <= 1",
        });
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain {
            name: "alpha",
            value: alpha,
            expected: "alpha > 0",
        });
    }
    Ok(())
}

impl CoefficientField {
    /// `a ≡ c`.
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain {
                name: "c",
                value: c,
                expected: "positive",
            });
        }
        Ok(Self {
            kind: Kind::Separable(vec![SeparableTerm {
                p: Arc::new(|_| 1.0),
                q: ZCoefficient::constant(c),
            }]),
            c0: c.min(1.0 / c),
            rho0: 1.0,
            holder_constant: 0.0,
            alpha: 1.0,
            x_independent: true,
            label: format!("{c}"),
        })
    }

    /// `a(x, z) = 1 + amplitude·sin(2πx₁/L)`.
    pub fn x_oscillation(amplitude: f64, length: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&amplitude) {
            return Err(Error::Domain {
                name: "amplitude",
                value: amplitude,
                expected: "0 <= amplitude < 1",
            });
        }
        let k = 2.0 * PI / length;
        Ok(Self {
            kind: Kind::Separable(vec![SeparableTerm {
                p: Arc::new(move |x| 1.0 + amplitude * (k * x[0]).sin()),
                q: ZCoefficient::constant(1.0),
            }]),
            c0: 1.0 - amplitude,
            rho0: 1.0,
            holder_constant: amplitude * k,
            alpha: 1.0,
            x_independent: amplitude == 0.0,
            label: format!("1+{amplitude}*sin(2pi x/{length})"),
        })
    }

    /// `a(x, z) = Σ p_m(x) q_m(z)`.
    pub fn separable(
        terms: Vec<SeparableTerm>,
        c0: f64,
        rho0: f64,
        holder_constant: f64,
        alpha: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        check_constants(c0, rho0, alpha)?;
        if terms.is_empty() {
            return Err(Error::InvalidParameter("separable coefficient needs at least one term".into()));
        }
        Ok(Self {
            kind: Kind::Separable(terms),
            c0,
            rho0,
            holder_constant,
            alpha,
            x_independent: false,
            label: label.into(),
        })
    }

    /// An arbitrary evaluator `a(x, z)`.
    pub fn general(
        f: impl Fn(&[f64; 2], &[f64; 2]) -> f64 + Send + Sync + 'static,
        c0: f64,
        rho0: f64,
        holder_constant: f64,
        alpha: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        check_constants(c0, rho0, alpha)?;
        Ok(Self {
            kind: Kind::General(Arc::new(f)),
            c0,
            rho0,
            holder_constant,
            alpha,
            x_independent: false,
            label: label.into(),
        })
    }

    pub fn eval(&self, x: &[f64; 2], z: &[f64; 2]) -> f64 {
        match &self.kind {
            Kind::Separable(terms) => terms.iter().map(|t| (t.p)(x) * t.q.eval(z)).sum(),
            Kind::General(f) => f(x, z),
        }
    }

    /// `a(x*, ·)`.
    pub fn frozen(&self, x: [f64; 2]) -> ZCoefficient {
        match &self.kind {
            Kind::Separable(terms) if terms.len() == 1 && terms[0].q.as_constant().is_some() => {
                ZCoefficient::constant((terms[0].p)(&x) * terms[0].q.as_constant().unwrap())
            }
            _ => {
                let a = self.clone();
                ZCoefficient::from_fn(move |z| a.eval(&x, z))
            }
        }
    }

    pub fn terms(&self) -> Option<&[SeparableTerm]> {
        match &self.kind {
            Kind::Separable(t) => Some(t),
            Kind::General(_) => None,
        }
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// `c₀⁻¹`, the bound used for thinning.
    pub fn upper_bound(&self) -> f64 {
        1.0 / self.c0
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn holder_constant(&self) -> f64 {
        self.holder_constant
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_x_independent(&self) -> bool {
        self.x_independent
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Spot-checks `a ≥ c₀` on `|z| < ρ₀` and `a ≤ 1/c₀` on the given points and jumps.
    pub fn check_bounds(&self, points: &[[f64; 2]], jumps: &[[f64; 2]]) -> Result<()> {
        for x in points {
            for z in jumps {
                let v = self.eval(x, z);
                let near = z[0].hypot(z[1]) < self.rho0;
                if !(v <= self.upper_bound() * (1.0 + 1e-12)) || (near && v < self.c0 * (1.0 - 1e-12)) {
                    return Err(Error::Domain {
                        name: "a(x,z)",
                        value: v,
                        expected: "c0 <= a near the origin and a <= 1/c0",
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillating_coefficient_bounds() {
        let a = CoefficientField::x_oscillation(0.1, 16.0).unwrap();
        assert!((a.eval(&[4.0, 0.0], &[0.3, 0.0]) - 1.1).abs() < 1e-14);
        assert_eq!(a.frozen([4.0, 0.0]).as_constant(), Some(1.1));
        let pts: Vec<[f64; 2]> = (0..64).map(|i| [i as f64 * 0.25 - 8.0, 0.0]).collect();
        a.check_bounds(&pts, &[[0.01, 0.0], [2.0, 0.0]]).unwrap();
        assert!(a.c0() * a.eval(&[4.0, 0.0], &[0.0, 0.0]) <= 1.0);
    }

    #[test]
    fn bound_violation_is_reported() {
        let a = CoefficientField::general(|_, _| 3.0, 0.5, 1.0, 0.0, 1.0, "3").unwrap();
        assert!(a.check_bounds(&[[0.0, 0.0]], &[[0.1, 0.0]]).is_err());
        assert!(CoefficientField::constant(0.0).is_err());
    }
}
