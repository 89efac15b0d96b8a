//! Random test fields: sums of single Fourier modes placed inside chosen blocks.

use std::f64::consts::PI;

use rand::Rng;

use super::{admissible_j_max, block_radius, Grid, GridField, Scale};
use crate::error::{Error, Result};

/// Integer wavevector whose frequency lies in `[lo, hi]`, with a random direction in 2-d.
fn mode_in_band(grid: &Grid, lo: f64, hi: f64, rng: &mut impl Rng) -> Option<[i64; 2]> {
    let unit = 2.0 * PI / grid.length();
    let kmax = (grid.n() / 2) as i64 - 1;
    for _ in 0..64 {
        let radius = rng.random_range(lo..=hi) / unit;
        let k = if grid.dim() == 1 {
            [radius.round() as i64, 0]
        } else {
            let theta = rng.random_range(0.0..(0.5 * PI));
            [(radius * theta.cos()).round() as i64, (radius * theta.sin()).round() as i64]
        };
        let freq = unit * ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt();
        if freq >= lo && freq <= hi && k[0].abs() <= kmax && k[1].abs() <= kmax && (k[0] != 0 || k[1] != 0) {
            return Some(k);
        }
    }
    None
}

/// Band where block `j` equals one: `[Φ⁻¹(2^j), (3/4)Φ⁻¹(2^{j+1})]` (`[0, (3/4)Φ⁻¹(1)]` for `j = −1`).
pub fn plateau(scale: &dyn Scale, j: i32) -> (f64, f64) {
    let hi = 0.75 * block_radius(scale, j + 1);
    let lo = if j < 0 { 0.0 } else { block_radius(scale, j) };
    (lo, hi)
}

/// `Σ_j c_j cos(k_j·x + θ_j)` with one mode placed in the plateau of each active block
/// `j ≤ top` (each block active with probability 0.7, at least one active), amplitudes in
/// `[0.2, 1]` and random phases. Blocks without an admissible grid mode are skipped.
pub fn random_block_modes(grid: Grid, scale: &dyn Scale, top: i32, rng: &mut impl Rng) -> Result<GridField> {
    let j_max = admissible_j_max(&grid, scale);
    if top > j_max {
        return Err(Error::OutOfBand { j: top, j_max });
    }
    let mut modes = Vec::new();
    for j in 0..=top {
        if !rng.random_bool(0.7) {
            continue;
        }
        let (lo, hi) = plateau(scale, j);
        if let Some(k) = mode_in_band(&grid, lo.max(1e-12), hi, rng) {
            modes.push((k, rng.random_range(0.2..=1.0), rng.random_range(0.0..(2.0 * PI))));
        }
    }
    if modes.is_empty() {
        let (lo, hi) = plateau(scale, top);
        if let Some(k) = mode_in_band(&grid, lo.max(1e-12), hi, rng) {
            modes.push((k, 1.0, rng.random_range(0.0..(2.0 * PI))));
        }
    }
    let unit = 2.0 * PI / grid.length();
    let c = rng.random_range(-0.5..=0.5);
    Ok(GridField::from_fn(grid, |x| {
        let mut s = c;
        for (k, amp, phase) in &modes {
            s += amp * (unit * (k[0] as f64 * x[0] + k[1] as f64 * x[1]) + phase).cos();
        }
        s
    }))
}

/// A single mode `cos(k·x)` with `|k|` in the plateau of block `j`, or `None` if the grid
/// has no such mode.
pub fn single_mode(grid: Grid, scale: &dyn Scale, j: i32, rng: &mut impl Rng) -> Option<GridField> {
    let (lo, hi) = plateau(scale, j);
    let k = mode_in_band(&grid, lo.max(1e-12), hi, rng)?;
    let unit = 2.0 * PI / grid.length();
    Some(GridField::from_fn(grid, |x| {
        (unit * (k[0] as f64 * x[0] + k[1] as f64 * x[1])).cos()
    }))
}

/// A single mode `cos(k·x)` with `|k|` in the Fourier support `[(3/4)Φ⁻¹(2^j), Φ⁻¹(2^{j+1})]`
/// of block `j` (`(0, Φ⁻¹(1)]` for `j = −1`).
pub fn support_mode(grid: Grid, scale: &dyn Scale, j: i32, rng: &mut impl Rng) -> Option<GridField> {
    let hi = block_radius(scale, j + 1);
    let lo = if j < 0 { 1e-12 } else { 0.75 * block_radius(scale, j) };
    let k = mode_in_band(&grid, lo, hi, rng)?;
    let unit = 2.0 * PI / grid.length();
    Some(GridField::from_fn(grid, |x| {
        (unit * (k[0] as f64 * x[0] + k[1] as f64 * x[1])).cos()
    }))
}

/// Smooth bump `exp(−|x−c|²/(2w²))` times a random band-limited modulation, supported
/// (to machine precision) inside `B_{L/4}` when `w ≤ L/40`.
pub fn random_bump(grid: Grid, width: f64, rng: &mut impl Rng) -> GridField {
    let c = [rng.random_range(-0.05..0.05) * grid.length(), 0.0];
    let freq = rng.random_range(0.0..2.0) / width;
    let phase = rng.random_range(0.0..(2.0 * PI));
    GridField::from_fn(grid, |x| {
        let dx = x[0] - c[0];
        let dy = if grid.dim() == 2 { x[1] - c[1] } else { 0.0 };
        (-(dx * dx + dy * dy) / (2.0 * width * width)).exp() * (1.0 + 0.5 * (freq * dx + phase).cos())
    })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::fields::{psi_block, CutoffProfile};
    use crate::symbols::SubordinatorSpec;

    #[test]
    fn single_mode_passes_its_block_unchanged() {
        let spec = SubordinatorSpec::stable(1.0, 1).unwrap();
        let grid = Grid::new(1, 1024, 16.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for j in 0..5 {
            let f = single_mode(grid, &spec, j, &mut rng).unwrap();
            let b = psi_block(&f, j, &spec, &CutoffProfile).unwrap();
            let diff = b.combine(1.0, &f, -1.0).unwrap().max_abs();
            assert!(diff < 1e-12, "j={j} diff={diff}");
        }
    }
}
