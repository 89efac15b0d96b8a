use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{CoefficientField, ZCoefficient};
use crate::error::{Error, Result};
use crate::fields::{Grid, GridField};
use crate::symbols::SubordinatorSpec;

const PER_DECADE: f64 = 512.0;
const MAX_DECADES: f64 = 64.0;
const ANGLES_2D: usize = 64;

/// Jump offsets `z` and weights for `∫_{ε≤|z|≤z_max} g(z) J(z) dz ≈ Σ w g(z)`: trapezoid
/// rule in `ln|z|` (512 points per decade) times the directions `±1` in 1-d or 64 equally
/// spaced angles in 2-d.
#[derive(Debug, Clone)]
pub struct QuadratureNodes {
    pub offsets: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub eps: f64,
    pub z_max: f64,
}

pub fn quadrature_nodes(spec: &SubordinatorSpec, eps: f64, z_max: f64) -> Result<QuadratureNodes> {
    if !(eps > 0.0 && z_max > eps) {
        return Err(Error::InvalidParameter(format!("need 0 < eps < z_max, got eps={eps}, z_max={z_max}")));
    }
    let decades = (z_max / eps).log10().min(MAX_DECADES);
    let z_max = eps * 10f64.powf(decades);
    let count = ((decades * PER_DECADE).ceil() as usize).max(1) + 1;
    let (a, b) = (eps.ln(), z_max.ln());
    let du = (b - a) / (count - 1) as f64;
    let d = spec.dim();
    let mut offsets = Vec::new();
    let mut weights = Vec::new();
    for i in 0..count {
        let u = a + i as f64 * du;
        let r = u.exp();
        let end = if i == 0 || i == count - 1 { 0.5 } else { 1.0 };
        let radial = end * du * r.powi(d as i32) * spec.kernel(r)?;
        if d == 1 {
            for s in [1.0, -1.0] {
                offsets.push([s * r, 0.0]);
                weights.push(radial);
            }
        } else {
            for k in 0..ANGLES_2D {
                let th = 2.0 * PI * k as f64 / ANGLES_2D as f64;
                offsets.push([r * th.cos(), r * th.sin()]);
                weights.push(radial * 2.0 * PI / ANGLES_2D as f64);
            }
        }
    }
    Ok(QuadratureNodes {
        offsets,
        weights,
        eps,
        z_max,
    })
}

/// Radius beyond which the kernel carries mass below `1e-12` (capped at 64 decades above `eps`).
pub fn far_radius(spec: &SubordinatorSpec, eps: f64) -> Result<f64> {
    let cap = eps * 10f64.powf(MAX_DECADES);
    let mut r = 1.0f64;
    while r < cap && spec.kernel_tail_mass(r)? > 1e-12 {
        r *= 2.0;
    }
    Ok(r.min(cap))
}

/// `Σ w q(z)(e^{iz·ξ} − 1)`, with `cos − 1` written as `−2 sin²(·/2)`.
fn nodal_symbol(nodes: &QuadratureNodes, q: &ZCoefficient, xi: &[f64; 2]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    let constant = q.as_constant();
    for (z, w) in nodes.offsets.iter().zip(&nodes.weights) {
        let qw = w * constant.unwrap_or_else(|| q.eval(z));
        let t = z[0] * xi[0] + z[1] * xi[1];
        let s = (0.5 * t).sin();
        re -= 2.0 * qw * s * s;
        im += qw * t.sin();
    }
    Complex64::new(re, im)
}

/// The Lévy symbol together with its truncation bounds.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SymbolValue {
    pub re: f64,
    pub im: f64,
    /// `|ξ|·sup a₀·∫_{|z|<ε}|z|J(z)dz`.
    pub eps_bias: f64,
    /// `2·sup a₀·∫_{|z|>z_max} J(z)dz`.
    pub far_bias: f64,
}

impl SymbolValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// `∫ (e^{iz·ξ} − 1) a₀(z) J(z) dz` over `ε ≤ |z| ≤ z_far` by radial-angular quadrature.
///
/// ```
/// use lowsing::operator::{generator_symbol, ZCoefficient};
/// use lowsing::symbols::SubordinatorSpec;
/// let gamma = SubordinatorSpec::gamma(1).unwrap();
/// let m = generator_symbol(&gamma, &ZCoefficient::constant(1.0), &[2.0, 0.0], 1e-4).unwrap();
/// assert!((m.re + gamma.psi(2.0)).abs() < 1e-2 * gamma.psi(2.0));
/// ```
pub fn generator_symbol(spec: &SubordinatorSpec, a0: &ZCoefficient, xi: &[f64; 2], eps: f64) -> Result<SymbolValue> {
    let z_far = far_radius(spec, eps)?;
    let nodes = quadrature_nodes(spec, eps, z_far)?;
    let sup_a = nodes
        .offsets
        .iter()
        .map(|z| a0.eval(z).abs())
        .fold(a0.eval(&[0.0, 0.0]).abs(), f64::max);
    let m = nodal_symbol(&nodes, a0, xi);
    Ok(SymbolValue {
        re: m.re,
        im: m.im,
        eps_bias: xi[0].hypot(xi[1]) * sup_a * spec.kernel_first_moment(eps)?,
        far_bias: 2.0 * sup_a * spec.kernel_tail_mass(nodes.z_max)?,
    })
}

/// Discrete symbol `m_h(ξ)` of a z-only coefficient at every frequency of the grid,
/// over `ε ≤ |z| ≤ z_max`.
pub fn grid_symbol(grid: &Grid, nodes: &QuadratureNodes, q: &ZCoefficient) -> Vec<Complex64> {
    (0..grid.len())
        .into_par_iter()
        .map(|idx| nodal_symbol(nodes, q, &grid.frequency(idx)))
        .collect()
}

/// Result of applying the generator, with the bounds on what the quadrature leaves out.
#[derive(Debug, Clone)]
pub struct GeneratorApplication {
    pub field: GridField,
    /// `sup|∇u|·sup a·∫_{|z|<ε}|z|J(z)dz`.
    pub eps_bias: f64,
    /// `2·sup a·‖u‖_∞·∫_{|z|>z_max} J(z)dz`.
    pub far_bias: f64,
}

/// The generator of a separable coefficient on a fixed grid: `ℒu = Σ p_m·𝓕⁻¹(m_h^{(q_m)} 𝓕u)`.
#[derive(Debug, Clone)]
pub struct DiscreteGenerator {
    grid: Grid,
    nodes_eps: f64,
    z_max: f64,
    terms: Vec<(Vec<f64>, Vec<Complex64>)>,
    x_independent: bool,
    sup_a: f64,
    first_moment: f64,
    tail_mass: f64,
}

impl DiscreteGenerator {
    /// Quadrature over `ε ≤ |z| ≤ L/2`.
    pub fn new(grid: Grid, a: &CoefficientField, spec: &SubordinatorSpec, eps: f64) -> Result<Self> {
        let terms = a.terms().ok_or_else(|| {
            Error::InvalidParameter("spectral generator needs a separable coefficient; use apply_generator".into())
        })?;
        if spec.dim() != grid.dim() {
            return Err(Error::GridMismatch(format!("spec in d={}, grid in d={}", spec.dim(), grid.dim())));
        }
        let nodes = quadrature_nodes(spec, eps, 0.5 * grid.length())?;
        let terms = terms
            .iter()
            .map(|t| {
                let p = (0..grid.len()).map(|i| (t.p)(&grid.point(i))).collect();
                (p, grid_symbol(&grid, &nodes, &t.q))
            })
            .collect();
        Ok(Self {
            grid,
            nodes_eps: nodes.eps,
            z_max: nodes.z_max,
            terms,
            x_independent: a.is_x_independent(),
            sup_a: a.upper_bound(),
            first_moment: spec.kernel_first_moment(eps)?,
            tail_mass: spec.kernel_tail_mass(nodes.z_max)?,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn eps(&self) -> f64 {
        self.nodes_eps
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn is_x_independent(&self) -> bool {
        self.x_independent
    }

    pub fn apply(&self, u: &GridField) -> GridField {
        let spec = u.spectrum();
        let mut acc = vec![0.0; self.grid.len()];
        for (p, sym) in &self.terms {
            let prod: Vec<Complex64> = spec.iter().zip(sym).map(|(a, b)| a * b).collect();
            let part = GridField::from_spectrum(self.grid, prod);
            for ((a, pv), v) in acc.iter_mut().zip(p).zip(part.values()) {
                *a += pv * v;
            }
        }
        GridField::new(self.grid, acc).expect("generator output is finite")
    }

    /// `ℒu` with the truncation bounds.
    pub fn apply_with_bounds(&self, u: &GridField) -> GeneratorApplication {
        GeneratorApplication {
            field: self.apply(u),
            eps_bias: u.gradient_sup_refined(2) * self.sup_a * self.first_moment,
            far_bias: 2.0 * self.sup_a * u.max_abs() * self.tail_mass,
        }
    }

    /// Symbol of the frozen generator `Σ p_m(x*) m_h^{(q_m)}`.
    pub fn frozen_symbol(&self, index: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (p, sym) in &self.terms {
            let w = p[index];
            for (o, s) in out.iter_mut().zip(sym) {
                *o += s * w;
            }
        }
        out
    }
}

/// `ℒu(x) = ∫ (u(x+z) − u(x)) a(x,z) J(z) dz` at every grid point.
///
/// Separable coefficients go through [`DiscreteGenerator`]. Otherwise each jump node
/// shifts `u` spectrally; nodes are processed in fixed chunks of 64 whose partial sums are
/// added in order, so the result does not depend on the thread count.
pub fn apply_generator(u: &GridField, a: &CoefficientField, spec: &SubordinatorSpec, eps: f64) -> Result<GeneratorApplication> {
    let grid = *u.grid();
    if a.terms().is_some() {
        return Ok(DiscreteGenerator::new(grid, a, spec, eps)?.apply_with_bounds(u));
    }
    let nodes = quadrature_nodes(spec, eps, 0.5 * grid.length())?;
    let spectrum = u.spectrum();
    let points: Vec<[f64; 2]> = (0..grid.len()).map(|i| grid.point(i)).collect();
    let chunks: Vec<Vec<f64>> = nodes
        .offsets
        .par_chunks(64)
        .zip(nodes.weights.par_chunks(64))
        .map(|(zs, ws)| {
            let mut acc = vec![0.0; grid.len()];
            for (z, w) in zs.iter().zip(ws) {
                let shifted: Vec<Complex64> = spectrum
                    .iter()
                    .enumerate()
                    .map(|(idx, c)| {
                        let xi = grid.frequency(idx);
                        c * Complex64::from_polar(1.0, xi[0] * z[0] + xi[1] * z[1])
                    })
                    .collect();
                let shifted = GridField::from_spectrum(grid, shifted);
                for (i, x) in points.iter().enumerate() {
                    acc[i] += w * a.eval(x, z) * (shifted.values()[i] - u.values()[i]);
                }
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; grid.len()];
    for c in &chunks {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    Ok(GeneratorApplication {
        field: GridField::new(grid, total)?,
        eps_bias: u.gradient_sup_refined(2) * a.upper_bound() * spec.kernel_first_moment(eps)?,
        far_bias: 2.0 * a.upper_bound() * u.max_abs() * spec.kernel_tail_mass(nodes.z_max)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_frequency_symbol_vanishes() {
        let g = SubordinatorSpec::gamma(1).unwrap();
        let m = generator_symbol(&g, &ZCoefficient::constant(1.0), &[0.0, 0.0], 1e-3).unwrap();
        assert_eq!(m.re, 0.0);
        assert_eq!(m.im, 0.0);
    }

    #[test]
    fn cauchy_symbol_is_modulus() {
        let s = SubordinatorSpec::stable(1.0, 1).unwrap();
        for xi in [0.5, 2.0, 8.0] {
            let m = generator_symbol(&s, &ZCoefficient::constant(1.0), &[xi, 0.0], 1e-6).unwrap();
            assert!((m.re + xi).abs() < 1e-3 * xi + m.far_bias + m.eps_bias, "xi={xi} m={}", m.re);
        }
    }

    #[test]
    fn routes_agree_on_separable_coefficient() {
        let spec = SubordinatorSpec::gamma(1).unwrap();
        let grid = Grid::new(1, 64, 16.0).unwrap();
        let u = GridField::from_fn(grid, |x| (-x[0] * x[0]).exp());
        let sep = CoefficientField::x_oscillation(0.2, 16.0).unwrap();
        let gen = CoefficientField::general(
            |x, _| 1.0 + 0.2 * (2.0 * PI * x[0] / 16.0).sin(),
            0.8,
            1.0,
            0.1,
            1.0,
            "osc",
        )
        .unwrap();
        let a = apply_generator(&u, &sep, &spec, 1e-2).unwrap().field;
        let b = apply_generator(&u, &gen, &spec, 1e-2).unwrap().field;
        let diff = a.combine(1.0, &b, -1.0).unwrap().max_abs();
        assert!(diff < 1e-10 * a.max_abs(), "{diff}");
    }
}
