//! Periodic grid fields and everything built on their Fourier transform: ψ-dyadic
//! blocks, Orlicz–Besov, Hölder, Bessel-potential and 𝒳^s norms, paraproducts, and the
//! unbounded 𝒳¹ counterexample.
//!
//! Frequencies are angular: a mode `e^{iξ·x}` on a torus of side `L` has `ξ ∈ (2π/L)ℤ^d`,
//! and the Nyquist frequency is `πn/L` per axis.

mod counterexample;
mod cutoff;
mod decomp;
pub mod family;
mod fft;
pub mod io;
mod morrey;
mod norms;
mod paraproduct;

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::orlicz::{luxemburg_norm_of, MeasuredSamples, NFunction};

pub use counterexample::{counterexample_field, Counterexample, CounterexampleProfile, GrowthReport};
pub use cutoff::{smooth_step, CutoffProfile};
pub use decomp::{
    admissible_j_max, besov_norm, block_norms, block_radius, classical_block, psi_block, xspace_norm, DecompositionStack,
    Dyadic, Integrability, Scale, XWeight,
};
pub use morrey::{growth_exponent, morrey2_epsilon, MorreyScale};
pub use norms::{bessel_norm, holder_norm, holder_seminorm, HolderOptions};
pub use paraproduct::{paraproduct, paraproduct_order, Paraproduct};

/// A uniform periodic grid `[−L/2, L/2)^d` with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    dim: usize,
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidParameter(format!("dimension must be 1 or 2, got {dim}")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("n must be a power of two >= 4, got {n}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Domain {
                name: "L",
                value: length,
                expected: "positive and finite",
            });
        }
        Ok(Self { dim, n, length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of samples `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Per-axis Nyquist frequency `πn/L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.n as f64 / self.length
    }

    /// Coordinate of index `i` along an axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        -0.5 * self.length + i as f64 * self.spacing()
    }

    /// Index of the grid point nearest to the origin.
    pub fn origin_index(&self) -> usize {
        let c = self.n / 2;
        if self.dim == 1 {
            c
        } else {
            c * self.n + c
        }
    }

    /// Signed integer wavenumber of DFT index `k` (the Nyquist index maps to `+n/2`).
    pub fn signed_wavenumber(&self, k: usize) -> i64 {
        if k <= self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    pub fn angular_frequency(&self, k: usize) -> f64 {
        2.0 * PI * self.signed_wavenumber(k) as f64 / self.length
    }

    /// Axis indices of the flat index (row-major; the last axis is contiguous).
    pub fn axes(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.n, idx % self.n]
        }
    }

    /// Physical coordinates of the flat index.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let [i, j] = self.axes(idx);
        if self.dim == 1 {
            [self.coordinate(i), 0.0]
        } else {
            [self.coordinate(i), self.coordinate(j)]
        }
    }

    /// Frequency vector of the flat spectral index.
    pub fn frequency(&self, idx: usize) -> [f64; 2] {
        let [i, j] = self.axes(idx);
        if self.dim == 1 {
            [self.angular_frequency(i), 0.0]
        } else {
            [self.angular_frequency(i), self.angular_frequency(j)]
        }
    }

    /// Whether the spectral index sits on a Nyquist line of `axis`.
    pub fn is_nyquist(&self, idx: usize, axis: usize) -> bool {
        self.axes(idx)[axis] == self.n / 2
    }

    /// `(−1)^{k₁+…+k_d}`: phase that moves the DFT origin to `x = −L/2`.
    fn origin_phase(&self, idx: usize) -> f64 {
        let [i, j] = self.axes(idx);
        let s = self.signed_wavenumber(i) + if self.dim == 2 { self.signed_wavenumber(j) } else { 0 };
        if s.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Real samples on a [`Grid`] with a lazily computed discrete Fourier transform.
#[derive(Debug)]
pub struct GridField {
    grid: Grid,
    values: Vec<f64>,
    spectrum: OnceLock<Arc<Vec<Complex64>>>,
}

impl Clone for GridField {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(Arc::clone(s));
        }
        Self {
            grid: self.grid,
            values: self.values.clone(),
            spectrum,
        }
    }
}

impl GridField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain {
                name: "value",
                value: *v,
                expected: "finite",
            });
        }
        Ok(Self::from_values_unchecked(grid, values))
    }

    fn from_values_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        Self {
            grid,
            values,
            spectrum: OnceLock::new(),
        }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::from_values_unchecked(grid, vec![0.0; grid.len()])
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self::from_values_unchecked(grid, vec![c; grid.len()])
    }

    /// Samples `f` at every grid point (`x[1]` is zero in one dimension).
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64; 2]) -> f64 + Sync) -> Self {
        let values = (0..grid.len()).into_par_iter().map(|i| f(&grid.point(i))).collect();
        Self::from_values_unchecked(grid, values)
    }

    /// The periodization of the function whose continuous Fourier transform
    /// (`∫ f(x) e^{−iξ·x} dx`) is `transform`.
    pub fn from_fourier_transform(grid: Grid, transform: impl Fn(&[f64; 2]) -> Complex64 + Sync) -> Self {
        let scale = grid.len() as f64 / grid.volume();
        let spectrum: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|idx| transform(&grid.frequency(idx)) * (scale * grid.origin_phase(idx)))
            .collect();
        Self::from_spectrum(grid, spectrum)
    }

    /// Inverse transform of a DFT array (the real part is kept).
    pub fn from_spectrum(grid: Grid, mut spectrum: Vec<Complex64>) -> Self {
        fft::transform(&grid, &mut spectrum, false);
        let values = spectrum.iter().map(|c| c.re).collect();
        Self::from_values_unchecked(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Unnormalized forward DFT of the samples, computed once.
    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| {
            let mut data: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft::transform(&self.grid, &mut data, true);
            Arc::new(data)
        })
    }

    /// Multiplies the spectrum by `m(ξ)` and transforms back.
    pub fn map_spectrum(&self, m: impl Fn(usize, &[f64; 2]) -> Complex64 + Sync) -> GridField {
        let grid = self.grid;
        let spectrum: Vec<Complex64> = self
            .spectrum()
            .par_iter()
            .enumerate()
            .map(|(idx, c)| c * m(idx, &grid.frequency(idx)))
            .collect();
        Self::from_spectrum(grid, spectrum)
    }

    /// Applies a radial real multiplier `m(|ξ|)`.
    pub fn apply_radial(&self, m: impl Fn(f64) -> f64 + Sync) -> GridField {
        self.map_spectrum(|_, xi| Complex64::new(m(xi[0].hypot(xi[1])), 0.0))
    }

    /// Spatial derivative along `axis` by spectral differentiation.
    pub fn partial_derivative(&self, axis: usize) -> GridField {
        let grid = self.grid;
        self.map_spectrum(|idx, xi| {
            if grid.is_nyquist(idx, axis) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, xi[axis])
            }
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Samples with the grid's cell measure.
    pub fn samples(&self) -> MeasuredSamples {
        MeasuredSamples::new(self.values.clone(), self.grid.cell_volume()).expect("grid fields are finite")
    }

    /// Luxemburg norm with respect to `a` and the uniform cell measure.
    pub fn orlicz_norm(&self, a: &NFunction) -> f64 {
        luxemburg_norm_of(&self.values, self.grid.cell_volume(), a)
    }

    fn check_same_grid(&self, other: &GridField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &GridField, b: f64) -> Result<GridField> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(Self::from_values_unchecked(self.grid, values))
    }

    /// Pointwise product.
    pub fn multiply(&self, other: &GridField) -> Result<GridField> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x * y).collect();
        Ok(Self::from_values_unchecked(self.grid, values))
    }

    pub fn scaled(&self, c: f64) -> GridField {
        Self::from_values_unchecked(self.grid, self.values.iter().map(|v| c * v).collect())
    }

    /// Pointwise map.
    pub fn map_values(&self, f: impl Fn(&[f64; 2], f64) -> f64 + Sync) -> GridField {
        let grid = self.grid;
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| f(&grid.point(i), v))
            .collect();
        Self::from_values_unchecked(grid, values)
    }

    /// Sum of fields on a common grid.
    pub fn sum<'a>(grid: Grid, fields: impl IntoIterator<Item = &'a GridField>) -> Result<GridField> {
        let mut acc = vec![0.0; grid.len()];
        for f in fields {
            if f.grid != grid {
                return Err(Error::GridMismatch("sum over different grids".into()));
            }
            for (a, v) in acc.iter_mut().zip(&f.values) {
                *a += v;
            }
        }
        Ok(Self::from_values_unchecked(grid, acc))
    }

    /// Value at an arbitrary point by periodic cubic Lagrange interpolation.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let g = &self.grid;
        let n = g.n as i64;
        let h = g.spacing();
        let locate = |c: f64| {
            let p = (c + 0.5 * g.length) / h;
            let i0 = p.floor();
            (i0 as i64, p - i0)
        };
        let weights = |t: f64| {
            [
                -t * (t - 1.0) * (t - 2.0) / 6.0,
                (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
                -(t + 1.0) * t * (t - 2.0) / 2.0,
                (t + 1.0) * t * (t - 1.0) / 6.0,
            ]
        };
        let wrap = |i: i64| i.rem_euclid(n) as usize;
        let (i0, tx) = locate(x[0]);
        let wx = weights(tx);
        if g.dim == 1 {
            let mut s = 0.0;
            for (a, w) in wx.iter().enumerate() {
                s += w * self.values[wrap(i0 - 1 + a as i64)];
            }
            s
        } else {
            let (j0, ty) = locate(x[1]);
            let wy = weights(ty);
            let mut s = 0.0;
            for (a, w) in wx.iter().enumerate() {
                let row = wrap(i0 - 1 + a as i64) * g.n;
                let mut r = 0.0;
                for (b, v) in wy.iter().enumerate() {
                    r += v * self.values[row + wrap(j0 - 1 + b as i64)];
                }
                s += w * r;
            }
            s
        }
    }

    /// Exact trigonometric interpolant at an arbitrary point (O(n^d) per call).
    pub fn evaluate_spectral(&self, x: &[f64]) -> f64 {
        let g = self.grid;
        let spec = self.spectrum();
        let shift = [x[0] + 0.5 * g.length, if g.dim == 2 { x[1] + 0.5 * g.length } else { 0.0 }];
        let sum: f64 = spec
            .par_chunks(4096)
            .enumerate()
            .map(|(c, chunk)| {
                let mut s = 0.0;
                for (o, z) in chunk.iter().enumerate() {
                    let xi = g.frequency(c * 4096 + o);
                    let phase = xi[0] * shift[0] + xi[1] * shift[1];
                    s += z.re * phase.cos() - z.im * phase.sin();
                }
                s
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum();
        sum / g.len() as f64
    }

    /// Samples of the trigonometric interpolant on a grid refined by `factor` per axis.
    pub fn refined_values(&self, factor: usize) -> Vec<f64> {
        refine_spectrum(&self.grid, self.spectrum(), factor)
    }

    /// Max-abs of the trigonometric interpolant, sampled `factor` times finer.
    pub fn sup_norm_refined(&self, factor: usize) -> f64 {
        self.refined_values(factor).iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `sup |∇f|` of the trigonometric interpolant, sampled `factor` times finer.
    pub fn gradient_sup_refined(&self, factor: usize) -> f64 {
        let mut sq = vec![0.0; self.grid.len() * factor.pow(self.grid.dim as u32)];
        for axis in 0..self.grid.dim {
            let d = self.partial_derivative(axis);
            for (s, v) in sq.iter_mut().zip(d.refined_values(factor)) {
                *s += v * v;
            }
        }
        sq.iter().fold(0.0f64, |m, v| m.max(*v)).sqrt()
    }
}

fn refine_spectrum(grid: &Grid, spec: &[Complex64], factor: usize) -> Vec<f64> {
    if factor <= 1 {
        let mut data = spec.to_vec();
        fft::transform(grid, &mut data, false);
        return data.iter().map(|c| c.re).collect();
    }
    let n = grid.n;
    let m = n * factor;
    let fine = Grid::new(grid.dim, m, grid.length).expect("refined grid is valid");
    let map = |k: usize| -> [Option<(usize, f64)>; 2] {
        if k < n / 2 {
            [Some((k, 1.0)), None]
        } else if k == n / 2 {
            [Some((k, 0.5)), Some((m - n / 2, 0.5))]
        } else {
            [Some((m - (n - k), 1.0)), None]
        }
    };
    let mut out = vec![Complex64::new(0.0, 0.0); fine.len()];
    if grid.dim == 1 {
        for (k, c) in spec.iter().enumerate() {
            for (t, w) in map(k).into_iter().flatten() {
                out[t] += c * w;
            }
        }
    } else {
        for i in 0..n {
            for j in 0..n {
                let c = spec[i * n + j];
                for (ti, wi) in map(i).into_iter().flatten() {
                    for (tj, wj) in map(j).into_iter().flatten() {
                        out[ti * m + tj] += c * (wi * wj);
                    }
                }
            }
        }
    }
    fft::transform(&fine, &mut out, false);
    let scale = fine.len() as f64 / grid.len() as f64;
    out.iter().map(|c| c.re * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1() -> Grid {
        Grid::new(1, 64, 16.0).unwrap()
    }

    #[test]
    fn roundtrip_is_exact() {
        let g = Grid::new(2, 16, 4.0).unwrap();
        let f = GridField::from_fn(g, |x| (x[0] * 1.3).sin() + x[1] * x[1] * 0.1);
        let back = GridField::from_spectrum(g, f.spectrum().to_vec());
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mode_has_expected_spectrum_and_derivative() {
        let g = grid1();
        let xi = g.angular_frequency(3);
        let f = GridField::from_fn(g, |x| (xi * x[0]).cos());
        let d = f.partial_derivative(0);
        for i in 0..g.len() {
            let x = g.point(i)[0];
            assert!((d.values()[i] + xi * (xi * x).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_transform_constructor_matches_periodized_gaussian() {
        // e^{-x²/2} has transform √(2π) e^{-ξ²/2}.
        let g = Grid::new(1, 128, 20.0).unwrap();
        let f = GridField::from_fourier_transform(g, |xi| {
            Complex64::new((2.0 * PI).sqrt() * (-0.5 * xi[0] * xi[0]).exp(), 0.0)
        });
        for i in 0..g.len() {
            let x = g.point(i)[0];
            assert!((f.values()[i] - (-0.5 * x * x).exp()).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn interpolation_and_spectral_evaluation() {
        let g = Grid::new(1, 256, 16.0).unwrap();
        let f = GridField::from_fn(g, |x| (-x[0] * x[0]).exp());
        for x in [-1.23, 0.0, 0.377, 2.5] {
            let exact = f64::exp(-x * x);
            assert!((f.interpolate(&[x, 0.0]) - exact).abs() < 1e-5);
            assert!((f.evaluate_spectral(&[x, 0.0]) - exact).abs() < 1e-12);
        }
        let g2 = Grid::new(2, 64, 8.0).unwrap();
        let f2 = GridField::from_fn(g2, |x| (-(x[0] * x[0] + x[1] * x[1])).exp());
        let p = [0.31, -0.42];
        let exact = f64::exp(-(p[0] * p[0] + p[1] * p[1]));
        assert!((f2.interpolate(&p) - exact).abs() < 1e-3);
        assert!((f2.evaluate_spectral(&p) - exact).abs() < 1e-10);
    }

    #[test]
    fn refined_sup_sees_between_samples() {
        let g = grid1();
        // A mode just below Nyquist sampled off its peaks.
        let xi = g.angular_frequency(31);
        let f = GridField::from_fn(g, |x| (xi * x[0] + 0.7).cos());
        assert!((f.sup_norm_refined(16) - 1.0).abs() < 2e-3);
        let f2 = GridField::from_fn(Grid::new(2, 16, 4.0).unwrap(), |x| (x[0] * PI / 2.0 + x[1] * PI).sin());
        assert!((f2.sup_norm_refined(4) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn grid_rejects_invalid() {
        assert!(Grid::new(3, 16, 1.0).is_err());
        assert!(Grid::new(1, 12, 1.0).is_err());
        assert!(Grid::new(1, 16, -1.0).is_err());
        assert!(GridField::new(grid1(), vec![0.0; 3]).is_err());
    }
}
