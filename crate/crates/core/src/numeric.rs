//! Small shared numerical kernels: quadrature, polynomial least squares,
//! local interpolation on uniform grids, and log-log slope fits.

use crate::C64;
use nalgebra::{DMatrix, DVector};

/// Trapezoid rule for a periodic function sampled on a uniform grid over one
/// period (the endpoint sample is not repeated, so this is the plain mean
/// times the period length).
pub fn periodic_trapezoid(samples: &[f64], period: f64) -> f64 {
    let n = samples.len();
    assert!(n > 0);
    samples.iter().sum::<f64>() * period / n as f64
}

/// Least-squares polynomial fit `y ≈ Σ c_j x^j` of the given degree.
/// Returns the coefficients `c_0..c_degree`.
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Vec<f64> {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() > degree, "underdetermined polynomial fit");
    let m = xs.len();
    let n = degree + 1;
    let mut a = DMatrix::<f64>::zeros(m, n);
    for (i, &x) in xs.iter().enumerate() {
        let mut p = 1.0;
        for j in 0..n {
            a[(i, j)] = p;
            p *= x;
        }
    }
    let b = DVector::from_column_slice(ys);
    let svd = a.svd(true, true);
    let c = svd.solve(&b, 1e-13).expect("polyfit SVD solve failed");
    c.iter().copied().collect()
}

/// Evaluate a polynomial with coefficients `c_0..c_n` at `x`.
pub fn polyval(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Ordinary least-squares slope of `log(y)` against `log(x)`.
/// Returns `(slope, intercept, rms_residual)`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "slope fit needs at least two points");
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Uniform-grid local polynomial interpolation of a complex-valued table.
///
/// `values[i]` is the function at `x0 + i*h`. Interpolates with a centered
/// `npts`-point Lagrange stencil (degree `npts-1`), clamped at the ends.
pub struct UniformInterp<'a> {
    pub x0: f64,
    pub h: f64,
    pub values: &'a [C64],
}

impl<'a> UniformInterp<'a> {
    pub fn eval(&self, x: f64, npts: usize) -> C64 {
        let n = self.values.len();
        assert!(n >= npts && npts >= 2);
        let pos = (x - self.x0) / self.h;
        let start = (pos - (npts as f64 - 1.0) / 2.0).round() as i64;
        let start = start.clamp(0, (n - npts) as i64) as usize;
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..npts {
            let xj = (start + j) as f64;
            let mut w = 1.0;
            for m in 0..npts {
                if m != j {
                    let xm = (start + m) as f64;
                    w *= (pos - xm) / (xj - xm);
                }
            }
            acc += self.values[start + j] * w;
        }
        acc
    }
}

/// Real-valued variant of [`UniformInterp`].
pub struct UniformInterpReal<'a> {
    pub x0: f64,
    pub h: f64,
    pub values: &'a [f64],
}

impl<'a> UniformInterpReal<'a> {
    pub fn eval(&self, x: f64, npts: usize) -> f64 {
        let n = self.values.len();
        assert!(n >= npts && npts >= 2);
        let pos = (x - self.x0) / self.h;
        let start = (pos - (npts as f64 - 1.0) / 2.0).round() as i64;
        let start = start.clamp(0, (n - npts) as i64) as usize;
        let mut acc = 0.0;
        for j in 0..npts {
            let xj = (start + j) as f64;
            let mut w = 1.0;
            for m in 0..npts {
                if m != j {
                    let xm = (start + m) as f64;
                    w *= (pos - xm) / (xj - xm);
                }
            }
            acc += self.values[start + j] * w;
        }
        acc
    }
}

/// `sin(x)/x` with the removable singularity filled by its Taylor series.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polyfit_recovers_exact_quartic() {
        let xs: Vec<f64> = (0..12).map(|i| -0.6 + 0.1 * i as f64).collect();
        let c = [1.5, -0.3, 2.0, 0.0, -4.0];
        let ys: Vec<f64> = xs.iter().map(|&x| polyval(&c, x)).collect();
        let fit = polyfit(&xs, &ys, 4);
        for (a, b) in fit.iter().zip(&c) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn loglog_slope_of_power_law() {
        let xs = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
        let ys: Vec<f64> = xs.iter().map(|&x: &f64| 3.0 * x.powf(1.5)).collect();
        let (s, _, r) = loglog_slope(&xs, &ys);
        assert!((s - 1.5).abs() < 1e-12);
        assert!(r < 1e-12);
    }

    #[test]
    fn interp_cubic_is_exact_on_cubics() {
        let h = 0.1;
        let vals: Vec<C64> = (0..50)
            .map(|i| {
                let x = i as f64 * h;
                C64::new(x * x * x - 2.0 * x, 0.5 * x * x)
            })
            .collect();
        let it = UniformInterp { x0: 0.0, h, values: &vals };
        let x = 1.2345;
        let exact = C64::new(x * x * x - 2.0 * x, 0.5 * x * x);
        let got = it.eval(x, 4);
        assert!((got - exact).norm() < 1e-12);
    }

    #[test]
    fn sinc_matches_series_at_crossover() {
        let x = 1.0000001e-4;
        assert!((sinc(x) - (x.sin() / x)).abs() < 1e-15);
    }
}
