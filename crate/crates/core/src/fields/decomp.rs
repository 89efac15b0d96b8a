use rayon::prelude::*;

use super::{CutoffProfile, Grid, GridField};
use crate::error::{Error, Result};
use crate::orlicz::NFunction;
use crate::symbols::SubordinatorSpec;

/// A nondecreasing, unbounded scale function `Φ` whose level sets `Φ⁻¹(2^k)` define
/// the block radii.
pub trait Scale: Send + Sync {
    fn scale(&self, r: f64) -> f64;
    fn scale_inverse(&self, y: f64) -> f64;
    fn label(&self) -> String;
}

impl Scale for SubordinatorSpec {
    fn scale(&self, r: f64) -> f64 {
        self.psi(r)
    }

    fn scale_inverse(&self, y: f64) -> f64 {
        self.psi_inverse(y)
    }

    fn label(&self) -> String {
        format!("{self}")
    }
}

impl<S: Scale + ?Sized> Scale for &S {
    fn scale(&self, r: f64) -> f64 {
        (**self).scale(r)
    }

    fn scale_inverse(&self, y: f64) -> f64 {
        (**self).scale_inverse(y)
    }

    fn label(&self) -> String {
        (**self).label()
    }
}

/// The classical scale `Φ(R) = 2R`: its blocks are the Littlewood–Paley pieces
/// `φ(2^{−j}ξ)` with `φ = χ − χ(2·)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Dyadic;

impl Scale for Dyadic {
    fn scale(&self, r: f64) -> f64 {
        2.0 * r
    }

    fn scale_inverse(&self, y: f64) -> f64 {
        0.5 * y
    }

    fn label(&self) -> String {
        "dyadic".into()
    }
}

/// `Φ⁻¹(2^k)`.
pub fn block_radius(scale: &dyn Scale, k: i32) -> f64 {
    scale.scale_inverse(2f64.powi(k))
}

/// Largest `j ≥ −1` with `Φ⁻¹(2^{j+1}) ≤` Nyquist, or −2 when even the low-pass block
/// does not fit.
pub fn admissible_j_max(grid: &Grid, scale: &dyn Scale) -> i32 {
    let nyq = grid.nyquist();
    let mut j = -2;
    while j < 4096 && block_radius(scale, j + 2) <= nyq {
        j += 1;
    }
    j
}

fn block_multiplier(chi: &CutoffProfile, j: i32, radii: &[f64], r: f64) -> f64 {
    // radii[k + 1] = Φ⁻¹(2^k)
    let outer = chi.chi(r / radii[(j + 2) as usize]);
    if j < 0 {
        outer
    } else {
        outer - chi.chi(r / radii[(j + 1) as usize])
    }
}

fn radii_up_to(scale: &dyn Scale, top: i32) -> Vec<f64> {
    (-1..=top).map(|k| block_radius(scale, k)).collect()
}

/// `Π_j f = 𝓕⁻¹((χ_{j+1} − χ_j)𝓕f)` with `χ_k = χ(·/Φ⁻¹(2^k))`, and `Π₋₁ f = 𝓕⁻¹(χ_0 𝓕f)`.
pub fn psi_block(f: &GridField, j: i32, scale: &dyn Scale, chi: &CutoffProfile) -> Result<GridField> {
    let j_max = admissible_j_max(f.grid(), scale);
    if j < -1 || j > j_max {
        return Err(Error::OutOfBand { j, j_max });
    }
    let radii = radii_up_to(scale, j + 1);
    Ok(f.apply_radial(|r| block_multiplier(chi, j, &radii, r)))
}

/// `Δ_j f`: the block of the classical (dyadic) decomposition.
pub fn classical_block(f: &GridField, j: i32) -> Result<GridField> {
    psi_block(f, j, &Dyadic, &CutoffProfile)
}

/// Every admissible block of a field, `j = −1..=J_max`.
#[derive(Debug, Clone)]
pub struct DecompositionStack {
    j_max: i32,
    radii: Vec<f64>,
    blocks: Vec<GridField>,
    label: String,
}

impl DecompositionStack {
    pub fn new(f: &GridField, scale: &dyn Scale, chi: &CutoffProfile) -> Result<Self> {
        let j_max = admissible_j_max(f.grid(), scale);
        if j_max < -1 {
            return Err(Error::OutOfBand { j: -1, j_max });
        }
        let radii = radii_up_to(scale, j_max + 1);
        let spectrum = f.spectrum();
        let grid = *f.grid();
        let blocks = (-1..=j_max)
            .into_par_iter()
            .map(|j| {
                let spec = spectrum
                    .iter()
                    .enumerate()
                    .map(|(idx, c)| {
                        let xi = grid.frequency(idx);
                        c * block_multiplier(chi, j, &radii, xi[0].hypot(xi[1]))
                    })
                    .collect();
                GridField::from_spectrum(grid, spec)
            })
            .collect();
        Ok(Self {
            j_max,
            radii,
            blocks,
            label: scale.label(),
        })
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `Φ⁻¹(2^k)` for `k = −1..=J_max+1`.
    pub fn radius(&self, k: i32) -> f64 {
        self.radii[(k + 1) as usize]
    }

    pub fn block(&self, j: i32) -> Result<&GridField> {
        if j < -1 || j > self.j_max {
            return Err(Error::OutOfBand { j, j_max: self.j_max });
        }
        Ok(&self.blocks[(j + 1) as usize])
    }

    pub fn blocks(&self) -> impl Iterator<Item = (i32, &GridField)> {
        self.blocks.iter().enumerate().map(|(i, b)| (i as i32 - 1, b))
    }

    /// `Σ_{j ≤ J} Π_j f`.
    pub fn partial_sum(&self, top: i32) -> Result<GridField> {
        let grid = *self.blocks[0].grid();
        GridField::sum(grid, self.blocks().filter(|(j, _)| *j <= top).map(|(_, b)| b))
    }

    /// `sup_j 2^{js}‖Π_j f‖`.
    pub fn norm(&self, s: f64, integrability: &Integrability) -> f64 {
        self.blocks()
            .map(|(j, b)| 2f64.powf(j as f64 * s) * integrability.measure(b))
            .fold(0.0, f64::max)
    }
}

/// How a block is measured: sup norm or a Luxemburg norm.
#[derive(Debug, Clone)]
pub enum Integrability {
    Sup,
    Orlicz(NFunction),
}

impl Integrability {
    pub fn measure(&self, f: &GridField) -> f64 {
        match self {
            Self::Sup => f.max_abs(),
            Self::Orlicz(a) => f.orlicz_norm(a),
        }
    }
}

/// `(j, measure(Π_j f))` for every admissible block, computing one block at a time.
pub fn block_norms(
    f: &GridField,
    scale: &dyn Scale,
    chi: &CutoffProfile,
    measure: impl Fn(&GridField) -> f64,
) -> Result<Vec<(i32, f64)>> {
    let j_max = admissible_j_max(f.grid(), scale);
    if j_max < -1 {
        return Err(Error::OutOfBand { j: -1, j_max });
    }
    let radii = radii_up_to(scale, j_max + 1);
    Ok((-1..=j_max)
        .map(|j| (j, measure(&f.apply_radial(|r| block_multiplier(chi, j, &radii, r)))))
        .collect())
}

/// `‖f‖_{B^{Φ,s}_A} = sup_{j ≥ −1} 2^{js}‖Π_j f‖_A` over the admissible blocks.
pub fn besov_norm(f: &GridField, s: f64, integrability: &Integrability, scale: &dyn Scale) -> Result<f64> {
    let j_max = admissible_j_max(f.grid(), scale);
    if j_max < 1 {
        return Err(Error::OutOfBand { j: 1, j_max });
    }
    Ok(block_norms(f, scale, &CutoffProfile, |b| integrability.measure(b))?
        .into_iter()
        .map(|(j, m)| 2f64.powf(j as f64 * s) * m)
        .fold(0.0, f64::max))
}

/// Block weighting of the `𝒳^s` norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XWeight {
    /// `(2+j)^s`.
    Shifted,
    /// `max{1, j}^s`.
    Clamped,
}

impl XWeight {
    fn weight(self, j: i32, s: f64) -> f64 {
        match self {
            Self::Shifted => (2.0 + j as f64).powf(s),
            Self::Clamped => (j.max(1) as f64).powf(s),
        }
    }
}

/// `sup_j w(j)^s ‖Δ_j f‖_∞` over the classical blocks available on the grid.
pub fn xspace_norm(f: &GridField, s: f64, weight: XWeight) -> Result<f64> {
    Ok(block_norms(f, &Dyadic, &CutoffProfile, GridField::max_abs)?
        .into_iter()
        .map(|(j, m)| weight.weight(j, s) * m)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stable_grid() -> (Grid, SubordinatorSpec) {
        (Grid::new(1, 1024, 16.0).unwrap(), SubordinatorSpec::stable(1.0, 1).unwrap())
    }

    #[test]
    fn constant_lives_in_low_block() {
        let (g, spec) = stable_grid();
        let f = GridField::constant(g, 2.5);
        let stack = DecompositionStack::new(&f, &spec, &CutoffProfile).unwrap();
        for (j, b) in stack.blocks() {
            let expect = if j == -1 { 2.5 } else { 0.0 };
            assert!(b.values().iter().all(|v| (v - expect).abs() < 1e-12), "j={j}");
        }
    }

    #[test]
    fn telescoping_reconstructs_low_pass() {
        let (g, spec) = stable_grid();
        let f = GridField::from_fn(g, |x| (-x[0] * x[0]).exp() * (3.0 * x[0]).sin());
        let stack = DecompositionStack::new(&f, &spec, &CutoffProfile).unwrap();
        let top = stack.j_max();
        let rad = stack.radius(top + 1);
        let low = f.apply_radial(|r| CutoffProfile.chi(r / rad));
        let sum = stack.partial_sum(top).unwrap();
        let diff = sum.combine(1.0, &low, -1.0).unwrap().max_abs();
        assert!(diff <= 1e-9 * low.max_abs());
    }

    #[test]
    fn out_of_band_reports_j_max() {
        let (g, spec) = stable_grid();
        let f = GridField::zeros(g);
        let j_max = admissible_j_max(&g, &spec);
        match psi_block(&f, j_max + 1, &spec, &CutoffProfile) {
            Err(Error::OutOfBand { j_max: m, .. }) => assert_eq!(m, j_max),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn xspace_weights() {
        let g = Grid::new(1, 256, 16.0).unwrap();
        // |ξ₀| = 2π·12/16 ≈ 4.71 lies where φ(2^{-3}ξ) = 1.
        let xi = g.angular_frequency(12);
        let f = GridField::from_fn(g, |x| (xi * x[0]).cos());
        assert!((xspace_norm(&f, 1.0, XWeight::Shifted).unwrap() - 5.0).abs() < 1e-12);
        assert!((xspace_norm(&f, 1.0, XWeight::Clamped).unwrap() - 3.0).abs() < 1e-12);
    }
}
