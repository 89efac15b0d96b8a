use super::{admissible_j_max, CutoffProfile, DecompositionStack, GridField, Scale};
use crate::error::{Error, Result};

/// Bony decomposition `fg = T_f g + T_g f + R(f, g)` with respect to the blocks of a scale.
#[derive(Debug, Clone)]
pub struct Paraproduct {
    pub t_f_g: GridField,
    pub t_g_f: GridField,
    pub remainder: GridField,
    /// Separation `N`: `l ≺ k` means `l < k − N`, `k ~ l` means `|k − l| ≤ N`.
    pub separation: i32,
    pub j_max: i32,
    /// `max |fg − (T_f g + T_g f + R)|`, from content above the top block.
    pub residue: f64,
}

/// Smallest `N ≥ 1` with `Φ⁻¹(2^{1−N}λ) ≤ (3/8)Φ⁻¹(λ)` for every `λ` in `[1, 2^{J_max+2}]`
/// (searched on 64 points per octave).
pub fn paraproduct_order(scale: &dyn Scale, j_max: i32) -> i32 {
    let octaves = (j_max + 2).max(1);
    let lambdas: Vec<f64> = (0..=64 * octaves).map(|i| 2f64.powf(i as f64 / 64.0)).collect();
    (1..64)
        .find(|&n| {
            lambdas
                .iter()
                .all(|&l| scale.scale_inverse(2f64.powi(1 - n) * l) <= 0.375 * scale.scale_inverse(l))
        })
        .unwrap_or(64)
}

/// Splits `f·g` into the two paraproducts and the resonant remainder.
pub fn paraproduct(f: &GridField, g: &GridField, scale: &dyn Scale, chi: &CutoffProfile) -> Result<Paraproduct> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", f.grid(), g.grid())));
    }
    let grid = *f.grid();
    let j_max = admissible_j_max(&grid, scale);
    if j_max < 0 {
        return Err(Error::OutOfBand { j: 0, j_max });
    }
    let n = paraproduct_order(scale, j_max);
    let sf = DecompositionStack::new(f, scale, chi)?;
    let sg = DecompositionStack::new(g, scale, chi)?;
    let len = grid.len();
    let low = |s: &DecompositionStack, k: i32| -> Vec<f64> {
        let mut acc = vec![0.0; len];
        for (l, b) in s.blocks() {
            if l < k - n {
                for (a, v) in acc.iter_mut().zip(b.values()) {
                    *a += v;
                }
            }
        }
        acc
    };
    let mut tfg = vec![0.0; len];
    let mut tgf = vec![0.0; len];
    let mut rem = vec![0.0; len];
    for k in -1..=j_max {
        let skf = low(&sf, k);
        let skg = low(&sg, k);
        let pf = sf.block(k)?.values();
        let pg = sg.block(k)?.values();
        for i in 0..len {
            tfg[i] += skf[i] * pg[i];
            tgf[i] += skg[i] * pf[i];
        }
        for l in (k - n).max(-1)..=(k + n).min(j_max) {
            let ql = sg.block(l)?.values();
            for i in 0..len {
                rem[i] += pf[i] * ql[i];
            }
        }
    }
    let mut residue = 0.0f64;
    for i in 0..len {
        let prod = f.values()[i] * g.values()[i];
        residue = residue.max((prod - tfg[i] - tgf[i] - rem[i]).abs());
    }
    Ok(Paraproduct {
        t_f_g: GridField::new(grid, tfg)?,
        t_g_f: GridField::new(grid, tgf)?,
        remainder: GridField::new(grid, rem)?,
        separation: n,
        j_max,
        residue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;
    use crate::symbols::SubordinatorSpec;

    #[test]
    fn separation_for_model_exponents() {
        let gamma = SubordinatorSpec::gamma(1).unwrap();
        let stable = SubordinatorSpec::stable(1.0, 1).unwrap();
        assert_eq!(paraproduct_order(&stable, 10), 3);
        assert_eq!(paraproduct_order(&gamma, 4), 4);
    }

    #[test]
    fn constant_multiplier_keeps_high_blocks() {
        let spec = SubordinatorSpec::stable(1.0, 1).unwrap();
        let grid = Grid::new(1, 512, 16.0).unwrap();
        let c = GridField::constant(grid, 1.5);
        let g = GridField::from_fn(grid, |x| (-x[0] * x[0]).exp() * (5.0 * x[0]).cos());
        let p = paraproduct(&c, &g, &spec, &CutoffProfile).unwrap();
        let stack = DecompositionStack::new(&g, &spec, &CutoffProfile).unwrap();
        let low = stack.partial_sum(p.separation - 1).unwrap();
        let expect = stack
            .partial_sum(stack.j_max())
            .unwrap()
            .combine(1.5, &low, -1.5)
            .unwrap();
        let diff = p.t_f_g.combine(1.0, &expect, -1.0).unwrap().max_abs();
        assert!(diff < 1e-12, "{diff}");
    }
}
