//! Laplace exponents of subordinators, the Lévy exponent `ψ(ξ) = φ(|ξ|²)` of the
//! subordinate Brownian motion `Z = √2·B_S`, its intrinsic scale `ρ(r) = 1/ψ(1/r)`,
//! the radial jump kernel `j` and the kernel integrals used by the operator and the
//! simulator.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use statrs::function::gamma::{gamma as gamma_fn, ln_gamma};

use crate::error::{Error, Result};
use crate::numeric::{log_grid, trapezoid_doubling, MonotoneCubic};

/// User-supplied Laplace exponent with its derivative and Lévy density.
pub struct CustomExponent {
    pub name: String,
    pub phi: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub phi_prime: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub levy_density: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

/// Which subordinator drives the process.
#[derive(Clone)]
pub enum SubordinatorFamily {
    /// `φ(λ) = log(1+λ)`, `Π(dt) = e^{−t}/t dt`.
    Gamma,
    /// `φ(λ) = λ^{α/2}`, `α ∈ (0, 2)`.
    Stable { alpha: f64 },
    Custom(Arc<CustomExponent>),
}

impl fmt::Debug for SubordinatorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gamma => write!(f, "gamma"),
            Self::Stable { alpha } => write!(f, "stable(alpha={alpha})"),
            Self::Custom(c) => write!(f, "custom({})", c.name),
        }
    }
}

/// A subordinator together with the space dimension of the subordinate Brownian motion.
///
/// ```
/// use lowsing::symbols::SubordinatorSpec;
/// let gamma = SubordinatorSpec::gamma(1).unwrap();
/// assert!((gamma.psi(1.0) - 2f64.ln()).abs() < 1e-15);
/// assert!((gamma.psi_inverse(2f64.ln()) - 1.0).abs() < 1e-12);
/// ```
#[derive(Clone)]
pub struct SubordinatorSpec {
    family: SubordinatorFamily,
    dim: usize,
    table: Arc<OnceLock<std::result::Result<KernelTable, Error>>>,
}

impl fmt::Debug for SubordinatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} in d={}", self.family, self.dim)
    }
}

impl fmt::Display for SubordinatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("dimension must be 1 or 2, got {dim}")))
    }
}

/// Surface measure of the unit sphere: 2 in d=1, 2π in d=2.
pub fn sphere_measure(dim: usize) -> f64 {
    if dim == 1 {
        2.0
    } else {
        2.0 * PI
    }
}

impl SubordinatorSpec {
    pub fn gamma(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::with_family(SubordinatorFamily::Gamma, dim))
    }

    pub fn stable(alpha: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::Domain {
                name: "alpha",
                value: alpha,
                expected: "0 < alpha < 2",
            });
        }
        Ok(Self::with_family(SubordinatorFamily::Stable { alpha }, dim))
    }

    pub fn custom(exponent: CustomExponent, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::with_family(SubordinatorFamily::Custom(Arc::new(exponent)), dim))
    }

    fn with_family(family: SubordinatorFamily, dim: usize) -> Self {
        Self {
            family,
            dim,
            table: Arc::new(OnceLock::new()),
        }
    }

    /// The same subordinator in another dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::with_family(self.family.clone(), dim))
    }

    pub fn family(&self) -> &SubordinatorFamily {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_gamma(&self) -> bool {
        matches!(self.family, SubordinatorFamily::Gamma)
    }

    /// Laplace exponent `φ(λ)`.
    pub fn phi(&self, lambda: f64) -> f64 {
        match &self.family {
            SubordinatorFamily::Gamma => lambda.ln_1p(),
            SubordinatorFamily::Stable { alpha } => lambda.powf(alpha / 2.0),
            SubordinatorFamily::Custom(c) => (c.phi)(lambda),
        }
    }

    pub fn phi_prime(&self, lambda: f64) -> f64 {
        match &self.family {
            SubordinatorFamily::Gamma => 1.0 / (1.0 + lambda),
            SubordinatorFamily::Stable { alpha } => 0.5 * alpha * lambda.powf(alpha / 2.0 - 1.0),
            SubordinatorFamily::Custom(c) => (c.phi_prime)(lambda),
        }
    }

    /// Lévy density `π(t)` of the subordinator.
    pub fn levy_density(&self, t: f64) -> f64 {
        self.ln_levy_density(t).exp()
    }

    fn ln_levy_density(&self, t: f64) -> f64 {
        match &self.family {
            SubordinatorFamily::Gamma => -t - t.ln(),
            SubordinatorFamily::Stable { alpha } => {
                let c = 0.5 * alpha / gamma_fn(1.0 - 0.5 * alpha);
                c.ln() - (1.0 + 0.5 * alpha) * t.ln()
            }
            SubordinatorFamily::Custom(c) => (c.levy_density)(t).ln(),
        }
    }

    /// `ψ(R) = φ(R²)`.
    pub fn psi(&self, r: f64) -> f64 {
        self.phi(r * r)
    }

    /// `ψ(e^v)`, stable for large `v`.
    pub fn psi_of_log(&self, v: f64) -> f64 {
        match &self.family {
            SubordinatorFamily::Gamma => {
                let x = 2.0 * v;
                if x > 30.0 {
                    x + (-x).exp().ln_1p()
                } else {
                    x.exp().ln_1p()
                }
            }
            SubordinatorFamily::Stable { alpha } => (alpha * v).exp(),
            SubordinatorFamily::Custom(c) => (c.phi)((2.0 * v).exp()),
        }
    }

    /// `ψ'(R) = 2R·φ'(R²)`.
    pub fn psi_prime(&self, r: f64) -> f64 {
        2.0 * r * self.phi_prime(r * r)
    }

    /// `R·ψ'(R)` at `R = e^v`, stable for large `v`.
    pub fn log_derivative_of_log(&self, v: f64) -> f64 {
        match &self.family {
            SubordinatorFamily::Gamma => {
                let x = 2.0 * v;
                2.0 / (1.0 + (-x).exp())
            }
            SubordinatorFamily::Stable { alpha } => alpha * (alpha * v).exp(),
            SubordinatorFamily::Custom(_) => {
                let r = v.exp();
                r * self.psi_prime(r)
            }
        }
    }

    /// `ψ⁻¹(y) = inf { R : ψ(R) > y }`.
    pub fn psi_inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        self.ln_psi_inverse(y).exp()
    }

    /// `ln ψ⁻¹(y)` for `y > 0`; closed form for gamma and stable, bisection in `log R`
    /// otherwise.
    pub fn ln_psi_inverse(&self, y: f64) -> f64 {
        match &self.family {
            SubordinatorFamily::Gamma => {
                if y > 30.0 {
                    0.5 * (y + (-(-y).exp()).ln_1p())
                } else {
                    0.5 * y.exp_m1().ln()
                }
            }
            SubordinatorFamily::Stable { alpha } => y.ln() / alpha,
            SubordinatorFamily::Custom(_) => {
                let mut lo = -1.0f64;
                let mut hi = 1.0f64;
                while self.psi_of_log(lo) > y {
                    hi = lo;
                    lo *= 2.0;
                    if lo < -1e6 {
                        return f64::NEG_INFINITY;
                    }
                }
                while self.psi_of_log(hi) <= y {
                    lo = hi;
                    hi *= 2.0;
                    if hi > 1e6 {
                        return f64::INFINITY;
                    }
                }
                for _ in 0..200 {
                    if hi - lo <= 1e-15 * hi.abs().max(1.0) {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    if self.psi_of_log(mid) > y {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// Intrinsic scale `ρ(r) = 1/ψ(1/r)`.
    pub fn rho(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain {
                name: "r",
                value: r,
                expected: "r > 0",
            });
        }
        Ok(1.0 / self.psi_of_log(-r.ln()))
    }

    /// Radial jump kernel `j(r) = ∫ (4πt)^{−d/2} e^{−r²/4t} Π(dt)` by direct quadrature in
    /// `log t`, doubling the panel count until the relative change is below 1e-9.
    pub fn jump_kernel(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain {
                name: "r",
                value: r,
                expected: "r > 0",
            });
        }
        let d = self.dim as f64;
        let t_lo = (1e-12f64).min(r * r / 800.0);
        let t_hi = (1e4f64).max(1e4 * r * r);
        let ln_4pi = (4.0 * PI).ln();
        let h = |u: f64| {
            let t = u.exp();
            (u - 0.5 * d * (ln_4pi + u) - r * r / (4.0 * t) + self.ln_levy_density(t)).exp()
        };
        let (a, b) = (t_lo.ln(), t_hi.ln());
        let panels = ((b - a) * 8.0) as usize;
        let q = trapezoid_doubling("jump kernel", h, a, b, 1e-9, 0.0, panels, 1 << 20)?;
        let mut value = q.value;
        let end = h(b);
        if end > 1e-17 * value {
            let step = 0.01;
            let kappa = (h(b - step).ln() - end.ln()) / step;
            if !(kappa > 0.0) {
                return Err(Error::Quadrature {
                    what: "jump kernel tail",
                    last_change: end / value,
                    evaluations: q.evaluations,
                });
            }
            value += end / kappa;
        }
        Ok(value)
    }

    /// The cached kernel table (built on first use).
    pub fn kernel_table(&self) -> Result<&KernelTable> {
        self.table
            .get_or_init(|| KernelTable::build(self))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `j(r)` from the cached table (log-log monotone cubic interpolation).
    pub fn kernel(&self, r: f64) -> Result<f64> {
        Ok(self.kernel_table()?.eval(r))
    }

    /// `∫_{|z|>r} J(z) dz`.
    pub fn kernel_tail_mass(&self, r: f64) -> Result<f64> {
        self.kernel_mass_between(r, f64::INFINITY)
    }

    /// `∫_{r<|z|≤s} J(z) dz`.
    pub fn kernel_mass_between(&self, r: f64, s: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain {
                name: "r",
                value: r,
                expected: "r > 0",
            });
        }
        let table = self.kernel_table()?;
        let d = self.dim as f64;
        let h = |v: f64| table.eval(v.exp()) * (d * v).exp();
        let mut total = 0.0;
        let top = s.min(table.r_max);
        if top > r {
            let low = r.max(table.r_min);
            total += table.weighted_integral(d, low.ln(), top.ln());
            if r < table.r_min {
                total += h(table.r_min.ln()) * power_segment(table.lower_slope + d, (table.r_min / r).ln());
            }
        }
        if s > table.r_max && !table.vanishes_above {
            // Beyond the table j is a power law, so e^{dv} j(e^v) decays like e^{-decay·v}.
            let decay = -(table.upper_slope + d);
            if decay <= 0.0 {
                return Ok(f64::INFINITY);
            }
            let from = r.max(table.r_max).ln();
            let start = h(from);
            let mut tail = start / decay;
            if s.is_finite() {
                tail *= 1.0 - (-(decay) * (s.ln() - from)).exp();
            }
            total += tail;
        }
        Ok(sphere_measure(self.dim) * total)
    }

    /// `∫_{|z|≤r} |z| J(z) dz`; infinite when the kernel is too singular at the origin.
    pub fn kernel_first_moment(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain {
                name: "r",
                value: r,
                expected: "r > 0",
            });
        }
        let table = self.kernel_table()?;
        let d = self.dim as f64;
        let growth = table.lower_slope + d + 1.0;
        if growth <= 1e-6 {
            return Ok(f64::INFINITY);
        }
        Ok(sphere_measure(self.dim) * table.moment_below(d + 1.0, growth, r))
    }

    /// `∫_{|z|≤r} |z|² J(z) dz`.
    pub fn kernel_second_moment(&self, r: f64) -> Result<f64> {
        let table = self.kernel_table()?;
        let d = self.dim as f64;
        let growth = table.lower_slope + d + 2.0;
        Ok(sphere_measure(self.dim) * table.moment_below(d + 2.0, growth, r))
    }

    /// Potential density of the gamma subordinator,
    /// `μ_λ(u) = ∫₀^∞ e^{−λt} u^{t−1} e^{−u} / Γ(t) dt`.
    pub fn potential_density(&self, lambda: f64, u: f64) -> Result<f64> {
        if !self.is_gamma() {
            return Err(Error::UnsupportedFamily);
        }
        if !(lambda > 0.0 && u > 0.0) {
            return Err(Error::Domain {
                name: "lambda/u",
                value: lambda.min(u),
                expected: "positive",
            });
        }
        Ok(potential_density_scaled(lambda, u.ln())? / u)
    }

    /// Checks the structural assumptions on a log grid.
    pub fn check_invariants(&self) -> InvariantReport {
        let grid = log_grid(1e-6, 1e9, 151);
        let values: Vec<f64> = grid.iter().map(|&l| self.phi(l)).collect();
        let increasing = values.windows(2).all(|w| w[1] > w[0]);
        let vanishes_at_zero = self.phi(1e-12) < 1e-4;
        let unbounded = self.phi(1e12) > 10.0 * self.phi(1.0);
        let mut worst: f64 = 0.0;
        for &l in &grid {
            worst = worst.max(l * self.phi_prime(l) / self.phi(l));
        }
        InvariantReport {
            increasing,
            vanishes_at_zero,
            unbounded,
            max_log_derivative: worst,
        }
    }
}

/// Outcome of [`SubordinatorSpec::check_invariants`].
#[derive(Debug, Clone, serde::Serialize)]
pub struct InvariantReport {
    pub increasing: bool,
    pub vanishes_at_zero: bool,
    pub unbounded: bool,
    /// `max λφ'(λ)/φ(λ)` over the grid; must not exceed one.
    pub max_log_derivative: f64,
}

impl InvariantReport {
    pub fn holds(&self) -> bool {
        self.increasing && self.vanishes_at_zero && self.unbounded && self.max_log_derivative <= 1.0 + 1e-12
    }
}

/// `u·μ_λ(u)` as a function of `ln u`, so that tiny `u` does not underflow.
pub fn potential_density_scaled(lambda: f64, ln_u: f64) -> Result<f64> {
    let u = ln_u.exp();
    let g = |w: f64| {
        let t = w.exp();
        (w - lambda * t + t * ln_u - u - ln_gamma(t)).exp()
    };
    let peak = if ln_u - lambda > 0.0 {
        (ln_u - lambda).exp().max(1.0)
    } else {
        1.0 / (lambda - ln_u).max(1e-300)
    };
    let a = peak.ln() - 50.0;
    let b = (peak.max(1.0) * 4.0 + 60.0).ln() + 1.0;
    let q = trapezoid_doubling("potential density", g, a, b, 1e-11, 1e-300, 512, 1 << 20)?;
    Ok(q.value)
}

/// `∫_0^span e^{−g·t} dt`.
fn power_segment(g: f64, span: f64) -> f64 {
    if (g * span).abs() < 1e-12 {
        span
    } else {
        -(-g * span).exp_m1() / g
    }
}

/// Tabulated `j(r)` on a log grid with monotone cubic interpolation of `ln j` in `ln r`.
#[derive(Debug, Clone)]
pub struct KernelTable {
    interp: MonotoneCubic,
    r_min: f64,
    r_max: f64,
    vanishes_above: bool,
    lower_slope: f64,
    upper_slope: f64,
}

impl KernelTable {
    const PER_DECADE: usize = 256;

    fn build(spec: &SubordinatorSpec) -> Result<Self> {
        let r_min: f64 = 1e-10;
        let r_top = 1e4;
        let decades = (r_top / r_min).log10();
        let count = (decades * Self::PER_DECADE as f64) as usize + 1;
        let radii = log_grid(r_min, r_top, count);
        let mut xs = Vec::with_capacity(count);
        let mut ys = Vec::with_capacity(count);
        let mut vanishes_above = false;
        for &r in &radii {
            let j = spec.jump_kernel(r)?;
            if !(j > 1e-290) {
                vanishes_above = true;
                break;
            }
            xs.push(r.ln());
            ys.push(j.ln());
        }
        let n = xs.len();
        if n < 4 {
            return Err(Error::Quadrature {
                what: "kernel table",
                last_change: f64::NAN,
                evaluations: n,
            });
        }
        let lower_slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        let upper_slope = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
        let r_max = xs[n - 1].exp();
        Ok(Self {
            interp: MonotoneCubic::new(xs, ys)?,
            r_min,
            r_max,
            vanishes_above,
            lower_slope,
            upper_slope,
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r > self.r_max && self.vanishes_above {
            return 0.0;
        }
        self.interp.eval(r.ln()).exp()
    }

    /// `∫_a^b e^{pv} j(e^v) dv` for `a, b` inside the table, by four-point Gauss–Legendre
    /// on every interpolation segment.
    fn weighted_integral(&self, p: f64, a: f64, b: f64) -> f64 {
        const NODES: [f64; 4] = [-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526];
        const WEIGHTS: [f64; 4] = [0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538];
        if !(b > a) {
            return 0.0;
        }
        let (xs, _) = self.interp.knots();
        let first = xs.partition_point(|&x| x <= a);
        let mut total = 0.0;
        let mut lo = a;
        for &knot in xs[first..].iter().chain(std::iter::once(&f64::INFINITY)) {
            let hi = knot.min(b);
            if hi > lo {
                let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                for (t, w) in NODES.iter().zip(WEIGHTS) {
                    let v = mid + half * t;
                    total += w * half * (self.interp.eval(v) + p * v).exp();
                }
            }
            if hi >= b {
                break;
            }
            lo = hi;
        }
        total
    }

    /// `∫_{-∞}^{ln r} e^{pv} j(e^v) dv`, with a power law below the table; `growth` is the
    /// exponent of that power law in `e^v`.
    fn moment_below(&self, p: f64, growth: f64, r: f64) -> f64 {
        let h = |v: f64| (self.interp.eval(v) + p * v).exp();
        let lo = self.r_min.ln();
        if r <= self.r_min {
            return h(r.ln()) / growth;
        }
        let top = r.min(self.r_max);
        let mut total = h(lo) / growth + self.weighted_integral(p, lo, top.ln());
        if r > self.r_max && !self.vanishes_above {
            total += h(self.r_max.ln()) * power_segment(-(self.upper_slope + p), (r / self.r_max).ln());
        }
        total
    }

    pub fn range(&self) -> (f64, f64) {
        (self.r_min, self.r_max)
    }

    /// Whether the tabulated kernel underflows beyond the table's upper end.
    pub fn vanishes_above(&self) -> bool {
        self.vanishes_above
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma1() -> SubordinatorSpec {
        SubordinatorSpec::gamma(1).unwrap()
    }

    #[test]
    fn psi_examples() {
        assert!((gamma1().psi(1.0) - 2f64.ln()).abs() < 1e-15);
        let stable = SubordinatorSpec::stable(1.0, 1).unwrap();
        assert!((stable.psi(3.0) - 3.0).abs() < 1e-14);
        assert_eq!(gamma1().psi(0.0), 0.0);
        assert_eq!(stable.psi(0.0), 0.0);
    }

    #[test]
    fn psi_inverse_examples() {
        assert!((gamma1().psi_inverse(2f64.ln()) - 1.0).abs() < 1e-12);
        let stable = SubordinatorSpec::stable(1.0, 1).unwrap();
        assert!((stable.psi_inverse(2.0) - 2.0).abs() < 1e-12);
        assert_eq!(gamma1().psi_inverse(0.0), 0.0);
        // closed form for gamma: sqrt(e^y − 1)
        for y in [1e-6, 0.3, 1.0, 4.0, 16.0, 64.0] {
            let expected = f64::exp_m1(y).sqrt();
            let got = gamma1().psi_inverse(y);
            assert!((got / expected - 1.0).abs() < 1e-12, "y={y}");
            assert!((gamma1().psi(got) / y - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rho_examples() {
        let g = gamma1();
        assert!((g.rho(1.0).unwrap() - 1.0 / 2f64.ln()).abs() < 1e-14);
        for r in [1e-4f64, 0.01, 0.3, 2.0] {
            let expected = 1.0 / (1.0 + 1.0 / (r * r)).ln();
            assert!((g.rho(r).unwrap() / expected - 1.0).abs() < 1e-12);
        }
        assert!(g.rho(0.0).is_err());
    }

    #[test]
    fn rho_comparable_to_log_scale() {
        let g = gamma1();
        for r in log_grid(1e-8, 0.5, 60) {
            let other = 1.0 / (1.0 / r).ln_1p();
            let ratio = g.rho(r).unwrap() / other;
            assert!((0.5..=2.0).contains(&ratio), "r={r} ratio={ratio}");
        }
    }

    #[test]
    fn gamma_kernel_matches_closed_form_in_one_dimension() {
        // ∫ (4πt)^{-1/2} e^{-r²/4t} e^{-t}/t dt = e^{-r}/r.
        let g = gamma1();
        for r in [1e-6f64, 1e-3, 0.1, 1.0, 5.0, 30.0] {
            let expected = (-r).exp() / r;
            let direct = g.jump_kernel(r).unwrap();
            assert!((direct / expected - 1.0).abs() < 1e-8, "r={r}");
            let table = g.kernel(r).unwrap();
            assert!((table / expected - 1.0).abs() < 1e-6, "table r={r}");
        }
    }

    #[test]
    fn cauchy_kernel_constant() {
        // stable(1) in d=1 is the Cauchy process: J(z) = 1/(π z²).
        let s = SubordinatorSpec::stable(1.0, 1).unwrap();
        for r in [1e-3, 1e-2, 1e-1, 1.0, 100.0] {
            let v = s.jump_kernel(r).unwrap() * r * r * PI;
            assert!((v - 1.0).abs() < 1e-6, "r={r} v={v}");
        }
    }

    #[test]
    fn invariants_hold_for_both_families() {
        assert!(gamma1().check_invariants().holds());
        assert!(SubordinatorSpec::stable(1.2, 2).unwrap().check_invariants().holds());
    }

    #[test]
    fn potential_density_rejects_other_families() {
        let s = SubordinatorSpec::stable(1.0, 1).unwrap();
        assert_eq!(s.potential_density(1.0, 1.0), Err(Error::UnsupportedFamily));
    }
}
