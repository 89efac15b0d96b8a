use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{smooth_step, xspace_norm, Grid, GridField, XWeight};
use crate::error::{Error, Result};

/// The Schwartz profile `φ` whose (angular) Fourier transform is a smooth bump equal to
/// one on `9/16 ≤ |ξ| ≤ 11/16` and supported in `1/2 ≤ |ξ| ≤ 3/4`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CounterexampleProfile;

impl CounterexampleProfile {
    pub fn fourier(&self, xi: f64) -> f64 {
        let r = xi.abs();
        smooth_step((r - 0.5) * 16.0) * smooth_step((0.75 - r) * 16.0)
    }

    /// `φ(x) = (1/π) ∫_{1/2}^{3/4} φ̂(ξ) cos(ξx) dξ`.
    pub fn value(&self, x: f64) -> f64 {
        const PANELS: usize = 2048;
        let h = 0.25 / PANELS as f64;
        let mut s = 0.0;
        for i in 1..PANELS {
            let xi = 0.5 + i as f64 * h;
            s += self.fourier(xi) * (xi * x).cos();
        }
        s * h / PI
    }

    /// `φ(0) = ‖φ‖_∞ = 3/(16π)`.
    pub fn max_abs(&self) -> f64 {
        3.0 / (16.0 * PI)
    }

    /// `sup_x |φ(x)|·max(1, x²)`, scanned on `[0, 400]`.
    pub fn decay_constant(&self) -> f64 {
        (0..=8000)
            .map(|i| {
                let x = i as f64 * 0.05;
                self.value(x).abs() * x.max(1.0).powi(2)
            })
            .fold(0.0, f64::max)
    }
}

/// `f(x) = Σ_{j=1}^{J} j^{−1} φ(2^j x)` on a one-dimensional torus.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub field: GridField,
    pub j_trunc: i32,
    pub decay_constant: f64,
}

/// Builds the truncated counterexample from its Fourier transform.
pub fn counterexample_field(length: f64, n: usize, j_trunc: i32) -> Result<Counterexample> {
    let grid = Grid::new(1, n, length)?;
    let limit = (grid.nyquist() * length / (2.0 * PI)).log2().floor() as i32 - 1;
    if j_trunc < 1 || j_trunc > limit {
        return Err(Error::OutOfBand { j: j_trunc, j_max: limit });
    }
    let profile = CounterexampleProfile;
    let field = GridField::from_fourier_transform(grid, |xi| {
        let r = xi[0].abs();
        let mut s = 0.0;
        for j in 1..=j_trunc {
            let scale = 2f64.powi(-j);
            s += profile.fourier(scale * r) * scale / j as f64;
        }
        Complex64::new(s, 0.0)
    });
    Ok(Counterexample {
        field,
        j_trunc,
        decay_constant: profile.decay_constant(),
    })
}

/// Growth of the counterexample along `x = 2^{−m}`.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub m: Vec<i32>,
    pub values: Vec<f64>,
    /// `f(2^{−m}) / log log₂ 2^m`.
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Bound on the omitted terms `j > J` at each point.
    pub tail_bounds: Vec<f64>,
    pub epsilon0: f64,
    pub delta0: f64,
    /// Smallest `C` with `f ≥ (ε₀/2) log log₂(1/|x|) − C` on the points.
    pub lower_constant: f64,
    /// Smallest `C` with `|f| ≤ C log log₂(1/|x|) + C` on the points.
    pub upper_constant: f64,
    /// `sup_j max{1,j}‖Δ_j f‖_∞`.
    pub x_norm_clamped: f64,
    /// `sup_j (2+j)‖Δ_j f‖_∞`.
    pub x_norm_shifted: f64,
    pub profile_max: f64,
}

impl Counterexample {
    /// `f(x)`; zero at the origin by definition, the exact trigonometric sum elsewhere.
    pub fn value_at(&self, x: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else {
            self.field.evaluate_spectral(&[x, 0.0])
        }
    }

    /// `Σ_{j>J} j^{−1} C₂ min(1, (2^j|x|)^{−2})`, summed until the geometric tail is negligible.
    pub fn truncation_tail(&self, x: f64) -> f64 {
        let mut s = 0.0;
        for j in self.j_trunc + 1..self.j_trunc + 200 {
            let t = (2f64.powi(j) * x.abs()).powi(-2).min(1.0);
            s += self.decay_constant * t / j as f64;
        }
        s
    }

    pub fn growth_report(&self, m_range: std::ops::RangeInclusive<i32>) -> Result<GrowthReport> {
        let profile = CounterexampleProfile;
        let phi0 = profile.max_abs();
        // δ₀: first point where φ drops below φ(0)/2, so φ ≥ 2ε₀ on [0, δ₀] with ε₀ = φ(0)/4.
        let delta0 = (1..)
            .map(|i| i as f64 * 1e-3)
            .find(|&x| profile.value(x) < 0.5 * phi0)
            .unwrap_or(f64::INFINITY);
        let epsilon0 = 0.25 * phi0;
        let m: Vec<i32> = m_range.collect();
        let values: Vec<f64> = m.iter().map(|&k| self.value_at(2f64.powi(-k))).collect();
        let loglog: Vec<f64> = m.iter().map(|&k| (k as f64).ln()).collect();
        let ratios: Vec<f64> = values.iter().zip(&loglog).map(|(v, l)| v / l).collect();
        let tail_bounds = m.iter().map(|&k| self.truncation_tail(2f64.powi(-k))).collect();
        let lower_constant = values
            .iter()
            .zip(&loglog)
            .map(|(v, l)| 0.5 * epsilon0 * l - v)
            .fold(f64::NEG_INFINITY, f64::max);
        let upper_constant = values
            .iter()
            .zip(&loglog)
            .map(|(v, l)| v.abs() / (l + 1.0))
            .fold(0.0, f64::max);
        Ok(GrowthReport {
            min_ratio: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
            max_ratio: ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            m,
            values,
            ratios,
            tail_bounds,
            epsilon0,
            delta0,
            lower_constant,
            upper_constant,
            x_norm_clamped: xspace_norm(&self.field, 1.0, XWeight::Clamped)?,
            x_norm_shifted: xspace_norm(&self.field, 1.0, XWeight::Shifted)?,
            profile_max: phi0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_peak_matches_bump_area() {
        let p = CounterexampleProfile;
        assert!((p.value(0.0) - p.max_abs()).abs() < 1e-12);
        assert_eq!(p.fourier(0.6), 1.0);
        assert_eq!(p.fourier(0.49), 0.0);
        assert_eq!(p.fourier(0.76), 0.0);
    }

    #[test]
    fn small_instance_components_sit_in_their_blocks() {
        let c = counterexample_field(2.0 * PI, 1 << 12, 8).unwrap();
        let xs = xspace_norm(&c.field, 1.0, XWeight::Clamped).unwrap();
        assert!(xs <= 1.05 * CounterexampleProfile.max_abs(), "{xs}");
        assert!(counterexample_field(2.0 * PI, 1 << 12, 11).is_err());
    }
}
