use lowsing::fields::family::{random_block_modes, support_mode};
use lowsing::fields::{
    admissible_j_max, besov_norm, bessel_norm, block_radius, counterexample_field, holder_norm, holder_seminorm,
    morrey2_epsilon, paraproduct, psi_block, CutoffProfile, DecompositionStack, Grid, GridField, HolderOptions,
    Integrability, MorreyScale, Scale,
};
use lowsing::orlicz::NFunction;
use lowsing::symbols::SubordinatorSpec;
use serde_json::json;

use super::{guarded, max_of, min_of, CheckFn, Options};
use crate::report::Check;

pub const CHECKS: &[(&str, CheckFn)] = &[
    ("C4", chart),
    ("C6", bernstein),
    ("C7", counterexample),
    ("C10", morrey),
    ("decomp.interpolation", interpolation),
    ("decomp.linearity", linearity),
    ("decomp.telescoping", telescoping),
    ("decomp.paraproduct", paraproduct_identity),
];

/// The torus used by the random-field checks: L = 16, n = 2^14 points in one dimension.
fn family_grid() -> Grid {
    Grid::new(1, 1 << 14, 16.0).expect("grid")
}

fn holder_options(seed: u64) -> HolderOptions {
    HolderOptions {
        seed,
        ..HolderOptions::default()
    }
}

/// `count` random band-limited fields with one mode in (most) admissible blocks.
fn random_family(o: &Options, stream: u64, count: usize, grid: Grid, scale: &dyn Scale) -> lowsing::Result<Vec<GridField>> {
    let mut rng = o.rng(stream);
    let top = admissible_j_max(&grid, scale);
    (0..count).map(|_| random_block_modes(grid, scale, top, &mut rng)).collect()
}

pub fn chart(o: &Options) -> Check {
    guarded("C4", "C_ρ^s and 𝒞_ψ^s norms are equivalent", "ratio in [c, 1/c] with c ≥ 0.05", || {
        let spec = SubordinatorSpec::gamma(1)?;
        let grid = family_grid();
        let fields = random_family(o, 401, 50, grid, &spec)?;
        let mut per_s = serde_json::Map::new();
        let mut c = f64::INFINITY;
        for s in [0.5, 1.0] {
            let mut ratios = Vec::with_capacity(fields.len());
            for (i, f) in fields.iter().enumerate() {
                let h = holder_norm(f, s, &spec, &holder_options(o.seed.wrapping_add(i as u64)));
                ratios.push(h / besov_norm(f, s, &Integrability::Sup, &spec)?);
            }
            let (lo, hi) = (min_of(ratios.iter().copied()), max_of(ratios.iter().copied()));
            c = c.min(lo).min(1.0 / hi);
            per_s.insert(format!("s={s}"), json!({ "min_ratio": lo, "max_ratio": hi }));
        }
        Ok((
            c >= 0.05,
            json!({ "c": c, "j_max": admissible_j_max(&grid, &spec), "fields": fields.len(), "by_s": per_s }),
        ))
    })
}

/// `sup_{j,f} ‖∇Π_j f‖_∞ / (Φ⁻¹(2^{j+1})‖Π_j f‖_∞)` over 50 single modes per block
/// `j ∈ [−1, top]`, with sup norms on an 8× refined grid.
pub fn bernstein_constant(o: &Options, stream: u64, grid: Grid, scale: &dyn Scale, top: i32) -> lowsing::Result<f64> {
    let chi = CutoffProfile;
    let mut rng = o.rng(stream);
    let mut worst = 0.0f64;
    for j in -1..=top {
        for _ in 0..50 {
            let Some(f) = support_mode(grid, scale, j, &mut rng) else {
                continue;
            };
            let b = psi_block(&f, j, scale, &chi)?;
            let denom = block_radius(scale, j + 1) * b.sup_norm_refined(8);
            if denom > 1e-12 {
                worst = worst.max(b.gradient_sup_refined(8) / denom);
            }
        }
    }
    Ok(worst)
}

pub fn bernstein(o: &Options) -> Check {
    guarded("C6", "Bernstein constant agrees between gamma and stable(1)", "finite, equal within ±5%", || {
        let gamma = SubordinatorSpec::gamma(1)?;
        let stable = SubordinatorSpec::stable(1.0, 1)?;
        let grid = family_grid();
        let j_gamma = admissible_j_max(&grid, &gamma);
        // Stable blocks restricted to the frequency range covered by the gamma blocks.
        let reach = block_radius(&gamma, j_gamma + 1);
        let j_stable = (-1..=admissible_j_max(&grid, &stable))
            .take_while(|&j| block_radius(&stable, j + 1) <= reach)
            .last()
            .unwrap_or(-1);
        let cg = bernstein_constant(o, 601, grid, &gamma, j_gamma)?;
        let cs = bernstein_constant(o, 602, grid, &stable, j_stable)?;
        let rel = (cg / cs - 1.0).abs();
        Ok((
            cg.is_finite() && cs.is_finite() && rel <= 0.05,
            json!({ "gamma": cg, "stable": cs, "relative_difference": rel, "j_max_gamma": j_gamma, "j_max_stable": j_stable, "top_radius": reach }),
        ))
    })
}

pub fn counterexample(_: &Options) -> Check {
    guarded("C7", "𝒳¹-bounded field with double-log growth", "X norm ≤ 1.05·max|φ|; ratios positive within ×20", || {
        let ce = counterexample_field(2.0 * std::f64::consts::PI, 1 << 22, 20)?;
        let r = ce.growth_report(8..=16)?;
        let norm_ok = r.x_norm_clamped <= 1.05 * r.profile_max;
        let growth_ok = r.min_ratio > 0.0 && r.max_ratio <= 20.0 * r.min_ratio;
        Ok((norm_ok && growth_ok, serde_json::to_value(&r).expect("report serializes")))
    })
}

pub fn morrey(o: &Options) -> Check {
    guarded("C10", "Morrey embeddings", "ratios finite and positive across the family", || {
        let spec = SubordinatorSpec::gamma(1)?;
        let beta = 2.0;
        let a = NFunction::exp_power(beta)?;
        let grid = family_grid();
        let fields = random_family(o, 1001, 50, grid, &spec)?;
        let psi_scale = MorreyScale::new(&spec, &a)?;
        let eps = morrey2_epsilon(&spec, &a, 1.0, 1e3);
        let opts = holder_options(o.seed);
        // Pairs with |x − y| < 1/2 only.
        let near = HolderOptions {
            max_separation: 0.499 / grid.length(),
            ..opts
        };
        let modulus = |r: f64| (-r.ln()).powf(1.0 / beta - 1.0);
        let (mut m1, mut m2, mut cor) = (Vec::new(), Vec::new(), Vec::new());
        for f in &fields {
            let bessel = bessel_norm(f, &a, &spec);
            m1.push(holder_norm(f, 1.0, &psi_scale, &opts) / bessel);
            cor.push((f.max_abs() + holder_seminorm(f, modulus, &near)) / bessel);
            if let Some(e) = eps {
                let lhs = besov_norm(f, e / (1.0 + e), &Integrability::Sup, &spec)?;
                m2.push(lhs / besov_norm(f, 1.0, &Integrability::Orlicz(a.clone()), &spec)?);
            }
        }
        let summary = |v: &[f64]| json!({ "max": max_of(v.iter().copied()), "min": min_of(v.iter().copied()) });
        let ok = |v: &[f64]| !v.is_empty() && v.iter().all(|r| r.is_finite() && *r > 0.0);
        Ok((
            ok(&m1) && ok(&m2) && ok(&cor),
            json!({
                "morrey1": summary(&m1),
                "morrey2": summary(&m2),
                "morrey2_epsilon": eps,
                "log_modulus": summary(&cor),
                "fields": fields.len(),
            }),
        ))
    })
}

pub fn interpolation(o: &Options) -> Check {
    guarded("decomp.interpolation", "‖f‖_s ≤ ‖f‖_{s₀}^θ‖f‖_{s₁}^{1−θ}", "slack 1e-9", || {
        let spec = o.spec.clone();
        let grid = family_grid();
        let fields = random_family(o, 1101, 10, grid, &spec)?;
        let mut worst = 0.0f64;
        for integ in [Integrability::Sup, Integrability::Orlicz(NFunction::power(2.0)?)] {
            for f in &fields {
                let (n0, n1) = (besov_norm(f, -0.5, &integ, &spec)?, besov_norm(f, 1.5, &integ, &spec)?);
                for theta in [0.25, 0.5, 0.75] {
                    let s = theta * -0.5 + (1.0 - theta) * 1.5;
                    let lhs = besov_norm(f, s, &integ, &spec)?;
                    worst = worst.max(lhs / (n0.powf(theta) * n1.powf(1.0 - theta)) - 1.0);
                }
            }
        }
        Ok((worst <= 1e-9, json!({ "max_excess": worst.max(0.0), "spec": spec.to_string() })))
    })
}

pub fn linearity(o: &Options) -> Check {
    guarded("decomp.linearity", "Π_j(af + bg) = aΠ_j f + bΠ_j g", "1e-12 relative to the largest block", || {
        let spec = o.spec.clone();
        let grid = family_grid();
        let fields = random_family(o, 1201, 2, grid, &spec)?;
        let (f, g) = (&fields[0], &fields[1]);
        let (a, b) = (1.7, -0.3);
        let sum = f.combine(a, g, b)?;
        let chi = CutoffProfile;
        let mut worst = 0.0f64;
        let mut largest = 0.0f64;
        for j in -1..=admissible_j_max(&grid, &spec) {
            let lhs = psi_block(&sum, j, &spec, &chi)?;
            let rhs = psi_block(f, j, &spec, &chi)?.combine(a, &psi_block(g, j, &spec, &chi)?, b)?;
            largest = largest.max(lhs.max_abs());
            worst = worst.max(lhs.combine(1.0, &rhs, -1.0)?.max_abs());
        }
        let relative = worst / largest;
        Ok((relative <= 1e-12, json!({ "max_relative_error": relative })))
    })
}

pub fn telescoping(o: &Options) -> Check {
    guarded("decomp.telescoping", "Σ_{j≤J} Π_j f is the low-pass χ_{J+1} f", "relative 1e-9", || {
        let spec = o.spec.clone();
        let grid = family_grid();
        let f = &random_family(o, 1301, 1, grid, &spec)?[0];
        let chi = CutoffProfile;
        let stack = DecompositionStack::new(f, &spec, &chi)?;
        let mut worst = 0.0f64;
        for top in -1..=stack.j_max() {
            let radius = block_radius(&spec, top + 1);
            let low = f.apply_radial(|r| chi.chi_at_scale(r, radius));
            let diff = stack.partial_sum(top)?.combine(1.0, &low, -1.0)?.max_abs();
            worst = worst.max(diff / f.max_abs());
        }
        Ok((worst <= 1e-9, json!({ "max_relative_error": worst, "j_max": stack.j_max() })))
    })
}

pub fn paraproduct_identity(o: &Options) -> Check {
    guarded("decomp.paraproduct", "T_f g + T_g f + R(f,g) = fg", "residue ≤ 1e-6 relative for band-limited fields", || {
        let spec = o.spec.clone();
        let grid = Grid::new(1, 1 << 12, 16.0)?;
        // Modes in the lower half of the admissible blocks keep the product inside the grid's band.
        let top = (admissible_j_max(&grid, &spec) - 1).max(0);
        let mut rng = o.rng(1401);
        let f = random_block_modes(grid, &spec, top, &mut rng)?;
        let g = random_block_modes(grid, &spec, top, &mut rng)?;
        let p = paraproduct(&f, &g, &spec, &CutoffProfile)?;
        let fg = f.multiply(&g)?;
        let sum = p.t_f_g.combine(1.0, &p.t_g_f, 1.0)?.combine(1.0, &p.remainder, 1.0)?;
        let rel = sum.combine(1.0, &fg, -1.0)?.max_abs() / fg.max_abs();
        Ok((rel <= 1e-6, json!({ "relative_residue": rel, "separation": p.separation, "j_max": p.j_max })))
    })
}
