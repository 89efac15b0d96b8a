/// Smooth transition from 0 (at `t ≤ 0`) to 1 (at `t ≥ 1`) built from `e^{−1/t}`;
/// it satisfies `s(t) + s(1−t) = 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// The radial cutoff `χ`: one on `[0, 3/4]`, zero on `[1, ∞)`, smooth in between.
///
/// ```
/// use lowsing::fields::CutoffProfile;
/// let chi = CutoffProfile::default();
/// assert_eq!(chi.chi(0.75), 1.0);
/// assert_eq!(chi.chi(1.0), 0.0);
/// ```
#[derive(Debug, Clone, Copy, Default)]
pub struct CutoffProfile;

impl CutoffProfile {
    pub fn chi(&self, r: f64) -> f64 {
        smooth_step((1.0 - r) * 4.0)
    }

    /// `χ(r/R)`.
    pub fn chi_at_scale(&self, r: f64, radius: f64) -> f64 {
        self.chi(r / radius)
    }

    /// Annular piece `χ(r/outer) − χ(r/inner)`.
    pub fn annulus(&self, r: f64, inner: f64, outer: f64) -> f64 {
        self.chi(r / outer) - self.chi(r / inner)
    }

    /// The classical dyadic profile `χ(r) − χ(2r)`, supported in `[3/8, 1]`.
    pub fn classical(&self, r: f64) -> f64 {
        self.chi(r) - self.chi(2.0 * r)
    }

    /// Widened cutoff `χ(r/2)`, equal to one on the support of `χ`.
    pub fn widened(&self, r: f64) -> f64 {
        self.chi(0.5 * r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateaus_and_monotonicity() {
        let c = CutoffProfile;
        assert_eq!(c.chi(0.0), 1.0);
        assert_eq!(c.chi(0.75), 1.0);
        assert_eq!(c.chi(1.0), 0.0);
        assert_eq!(c.chi(3.0), 0.0);
        let mut prev = 1.0;
        for i in 0..=1000 {
            let v = c.chi(0.7 + 0.35 * i as f64 / 1000.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn classical_profile_support_and_plateau() {
        let c = CutoffProfile;
        assert_eq!(c.classical(0.37), 0.0);
        assert_eq!(c.classical(0.5), 1.0);
        assert_eq!(c.classical(0.75), 1.0);
        assert_eq!(c.classical(1.0), 0.0);
    }

    #[test]
    fn step_symmetry() {
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            assert!((smooth_step(t) + smooth_step(1.0 - t) - 1.0).abs() < 1e-15);
        }
    }
}
