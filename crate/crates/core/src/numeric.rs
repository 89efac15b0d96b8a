//! Small numerical kernels shared by the modules: doubling trapezoid quadrature,
//! golden-section maximization, bisection, monotone cubic interpolation and
//! pairwise summation.

use crate::error::{Error, Result};

/// Outcome of [`trapezoid_doubling`].
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub relative_change: f64,
    pub evaluations: usize,
}

/// Composite trapezoid rule for `g` on `[a, b]`, doubling the panel count until two
/// successive estimates agree to `rel_tol` (or to `abs_tol` in absolute terms).
#[allow(clippy::too_many_arguments)]
pub fn trapezoid_doubling(
    what: &'static str,
    g: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    start_panels: usize,
    max_panels: usize,
) -> Result<Quadrature> {
    if b <= a {
        return Ok(Quadrature {
            value: 0.0,
            relative_change: 0.0,
            evaluations: 0,
        });
    }
    let mut panels = start_panels.max(2);
    let mut h = (b - a) / panels as f64;
    let mut sum = 0.5 * (g(a) + g(b));
    for i in 1..panels {
        sum += g(a + i as f64 * h);
    }
    let mut evaluations = panels + 1;
    let mut estimate = sum * h;
    let mut change = f64::INFINITY;
    while panels < max_panels {
        let mut mid = 0.0;
        for i in 0..panels {
            mid += g(a + (i as f64 + 0.5) * h);
        }
        evaluations += panels;
        sum += mid;
        panels *= 2;
        h *= 0.5;
        let next = sum * h;
        change = (next - estimate).abs();
        let scale = next.abs();
        estimate = next;
        if !estimate.is_finite() {
            break;
        }
        if change <= rel_tol * scale || change <= abs_tol {
            return Ok(Quadrature {
                value: estimate,
                relative_change: if scale > 0.0 { change / scale } else { 0.0 },
                evaluations,
            });
        }
    }
    Err(Error::Quadrature {
        what,
        last_change: if estimate != 0.0 {
            change / estimate.abs()
        } else {
            change
        },
        evaluations,
    })
}

/// Maximizes a concave function on `[lo, hi]` by golden-section search.
/// Returns `(argmax, max)`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while hi - lo > tol && iterations < 400 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
        iterations += 1;
    }
    let mut best = (x1, f1);
    for x in [lo, hi, x2] {
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Smallest `x` in `[lo, hi]` (to relative width `rel_tol`) with `f(x) > target`, for
/// nondecreasing `f` on positive arguments; bisection on the geometric midpoint.
pub fn bisect_log(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    for _ in 0..400 {
        if hi <= lo * (1.0 + rel_tol) {
            break;
        }
        let mid = (lo * hi).sqrt();
        if f(mid) > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo * hi).sqrt()
}

/// Bisection in a linear variable: returns the point where nondecreasing `f` crosses `target`.
pub fn bisect_linear(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64, abs_tol: f64) -> f64 {
    for _ in 0..400 {
        if hi - lo <= abs_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Pairwise (cascade) summation; the result does not depend on thread scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BASE: usize = 64;
    if values.len() <= BASE {
        let mut s = 0.0;
        for &v in values {
            s += v;
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson slopes; preserves
/// monotonicity of the data.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    /// `x` must be strictly increasing and of the same length as `y` (at least two points).
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::InvalidParameter(
                "monotone cubic needs at least two matching knots".into(),
            ));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("knots must be strictly increasing".into()));
        }
        let n = x.len();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
        let mut slope = vec![0.0; n];
        slope[0] = delta[0];
        slope[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                slope[i] = 0.0;
            } else {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let w0 = 2.0 * h1 + h0;
                let w1 = h1 + 2.0 * h0;
                slope[i] = (w0 + w1) / (w0 / delta[i - 1] + w1 / delta[i]);
            }
        }
        Ok(Self { x, y, slope })
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    /// Evaluates the interpolant; outside the knot range the end segments are extended linearly.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0] + self.slope[0] * (t - self.x[0]);
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1] + self.slope[n - 1] * (t - self.x[n - 1]);
        }
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.y[i],
            Err(i) => i - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.slope[i] + h01 * self.y[i + 1] + h11 * h * self.slope[i + 1]
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

/// Log-spaced grid of `count` points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_integrates_gaussian() {
        let q = trapezoid_doubling(
            "gaussian",
            |x| (-x * x).exp(),
            -10.0,
            10.0,
            1e-12,
            0.0,
            8,
            1 << 16,
        )
        .unwrap();
        assert!((q.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, v) = golden_section_max(|t| -(t - 0.3) * (t - 0.3) + 2.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_cubic_preserves_monotonicity() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y = vec![0.0, 0.0, 1.0, 1.0, 5.0];
        let m = MonotoneCubic::new(x, y).unwrap();
        let mut prev = m.eval(0.0);
        for i in 1..=400 {
            let v = m.eval(i as f64 / 100.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
        assert_eq!(m.eval(2.0), 1.0);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let v: Vec<f64> = (0..10_000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 49_995_000.0);
    }

    #[test]
    fn slope_of_line() {
        let x = [1.0, 2.0, 3.0];
        let y = [3.0, 5.0, 7.0];
        assert!((fitted_slope(&x, &y) - 2.0).abs() < 1e-14);
    }
}
