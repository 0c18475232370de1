//! Periodic coefficient pairs (ǧ, ω) for the factorized operator
//! `A = -ω⁻¹ d/dx (ω²ǧ) d/dx ω⁻¹`.
//!
//! Both functions live on the unit cell `[0,1)` and are represented after
//! validation by dense samples on a fine uniform grid; spectral data (Fourier
//! coefficients of ǧ, ω, ω² and g = ω²ǧ) is derived from the samples by FFT.
//! Validation records the positivity bounds `α₀ ≤ ǧ ≤ α₁`, `β₀ ≤ ω ≤ β₁` as
//! grid extrema and rescales ω so that `‖ω‖_{L₂(0,1)} = 1`.

use crate::numeric::periodic_trapezoid;
use crate::C64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Fine sampling resolution used to store validated coefficients.
const N_FINE: usize = 1 << 14;

/// Errors from coefficient validation and lookup.
#[derive(Debug, Clone, PartialEq)]
pub enum CoeffError {
    /// A sampled coefficient value was ≤ 0.
    NonPositiveCoefficient { which: &'static str, min: f64 },
    /// NaN or infinite sample, or too few samples.
    InvalidCoefficient(String),
    /// Unknown builtin name.
    UnknownBuiltin(String),
}

impl fmt::Display for CoeffError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffError::NonPositiveCoefficient { which, min } => {
                write!(f, "coefficient {which} is not positive (min sample {min})")
            }
            CoeffError::InvalidCoefficient(msg) => write!(f, "invalid coefficient: {msg}"),
            CoeffError::UnknownBuiltin(name) => write!(f, "unknown builtin coefficient set `{name}`"),
        }
    }
}

impl std::error::Error for CoeffError {}

/// A validated periodic coefficient pair.
///
/// Immutable after construction; cheap to clone and safe to share across
/// threads.
#[derive(Debug, Clone)]
pub struct PeriodicCoefficients {
    g_check: Arc<Vec<f64>>,
    omega: Arc<Vec<f64>>,
    /// Grid extrema of ǧ.
    pub alpha0: f64,
    /// Grid extrema of ǧ.
    pub alpha1: f64,
    /// Grid extrema of ω (after renormalization).
    pub beta0: f64,
    /// Grid extrema of ω (after renormalization).
    pub beta1: f64,
}

impl PeriodicCoefficients {
    /// Validate a coefficient pair given as closed-form evaluators on `[0,1)`.
    ///
    /// Bounds are grid extrema over `n_samples` points; ω is rescaled by a
    /// scalar so that the trapezoid-rule `L₂(0,1)` norm equals 1.
    pub fn validate<F, G>(g_check: F, omega: G, n_samples: usize) -> Result<Self, CoeffError>
    where
        F: Fn(f64) -> f64,
        G: Fn(f64) -> f64,
    {
        if n_samples < 64 {
            return Err(CoeffError::InvalidCoefficient(format!(
                "n_samples = {n_samples} < 64"
            )));
        }
        let n = N_FINE.max(n_samples);
        let gs: Vec<f64> = (0..n).map(|j| g_check(j as f64 / n as f64)).collect();
        let ws: Vec<f64> = (0..n).map(|j| omega(j as f64 / n as f64)).collect();
        Self::from_samples_impl(gs, ws, Some(n_samples))
    }

    /// Validate a coefficient pair given as uniform samples over `[0,1)`
    /// (the `table` input kind). Bounds are extrema over the given samples.
    pub fn from_samples(g_check: Vec<f64>, omega: Vec<f64>) -> Result<Self, CoeffError> {
        if g_check.len() < 64 || omega.len() < 64 {
            return Err(CoeffError::InvalidCoefficient(
                "table input needs at least 64 samples".into(),
            ));
        }
        if g_check.len() != omega.len() {
            return Err(CoeffError::InvalidCoefficient(
                "g and omega tables must have equal length".into(),
            ));
        }
        Self::from_samples_impl(g_check, omega, None)
    }

    fn from_samples_impl(
        g_check: Vec<f64>,
        mut omega: Vec<f64>,
        bounds_subgrid: Option<usize>,
    ) -> Result<Self, CoeffError> {
        for (name, v) in [("g", &g_check), ("omega", &omega)] {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(CoeffError::InvalidCoefficient(format!(
                    "{name} has NaN or infinite samples"
                )));
            }
        }
        // Renormalize omega to unit L2(0,1) norm.
        let sq: Vec<f64> = omega.iter().map(|w| w * w).collect();
        let norm2 = periodic_trapezoid(&sq, 1.0);
        if norm2 <= 0.0 || !norm2.is_finite() {
            return Err(CoeffError::NonPositiveCoefficient { which: "omega", min: 0.0 });
        }
        let scale = norm2.sqrt().recip();
        for w in &mut omega {
            *w *= scale;
        }

        let extrema = |v: &[f64]| -> (f64, f64) {
            let n = v.len();
            let stride = bounds_subgrid.map_or(1, |m| (n / m).max(1));
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut j = 0;
            while j < n {
                lo = lo.min(v[j]);
                hi = hi.max(v[j]);
                j += stride;
            }
            (lo, hi)
        };
        let (alpha0, alpha1) = extrema(&g_check);
        let (beta0, beta1) = extrema(&omega);
        if alpha0 <= 0.0 {
            return Err(CoeffError::NonPositiveCoefficient { which: "g", min: alpha0 });
        }
        if beta0 <= 0.0 {
            return Err(CoeffError::NonPositiveCoefficient { which: "omega", min: beta0 });
        }
        Ok(Self {
            g_check: Arc::new(g_check),
            omega: Arc::new(omega),
            alpha0,
            alpha1,
            beta0,
            beta1,
        })
    }

    /// Builtin example pairs: `free`, `cosine`, `weighted`.
    pub fn builtin(name: &str) -> Result<Self, CoeffError> {
        match name {
            "free" => Self::validate(|_| 1.0, |_| 1.0, 256),
            "cosine" => Self::validate(|x| 1.0 + 0.5 * (2.0 * PI * x).cos(), |_| 1.0, 256),
            "weighted" => Self::validate(|_| 1.0, |x| (0.2 * (2.0 * PI * x).cos()).exp(), 256),
            other => Err(CoeffError::UnknownBuiltin(other.to_string())),
        }
    }

    /// Stored samples of ǧ on the fine uniform grid.
    pub fn g_check_samples(&self) -> &[f64] {
        &self.g_check
    }

    /// Stored samples of ω on the fine uniform grid.
    pub fn omega_samples(&self) -> &[f64] {
        &self.omega
    }

    /// `‖ω‖_{L₂(0,1)}` on the stored grid (should be 1 after validation).
    pub fn omega_l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.omega.iter().map(|w| w * w).collect();
        periodic_trapezoid(&sq, 1.0).sqrt()
    }

    /// Fourier coefficients of `g = ω²ǧ` for modes `-max_lag..=max_lag`.
    pub fn g_hat(&self, max_lag: usize) -> Vec<C64> {
        let prod: Vec<f64> = self
            .g_check
            .iter()
            .zip(self.omega.iter())
            .map(|(g, w)| g * w * w)
            .collect();
        coefficients_from_samples(&prod, max_lag)
    }

    /// Fourier coefficients of `ω²` for modes `-max_lag..=max_lag`.
    pub fn omega_sq_hat(&self, max_lag: usize) -> Vec<C64> {
        let sq: Vec<f64> = self.omega.iter().map(|w| w * w).collect();
        coefficients_from_samples(&sq, max_lag)
    }

    /// Fourier coefficients of `ω` for modes `-max_lag..=max_lag`.
    pub fn omega_hat(&self, max_lag: usize) -> Vec<C64> {
        coefficients_from_samples(&self.omega, max_lag)
    }

    /// True when both coefficients are identically 1 on the grid (the free
    /// operator), up to roundoff.
    pub fn is_free(&self) -> bool {
        self.alpha1 - self.alpha0 < 1e-14
            && self.beta1 - self.beta0 < 1e-14
            && (self.alpha0 - 1.0).abs() < 1e-12
            && (self.beta0 - 1.0).abs() < 1e-12
    }
}

/// Fourier coefficients `c_n = ∫₀¹ f(x) e^{-2πinx} dx`, `n = -n_modes..=n_modes`,
/// of a real cell function, by the trapezoid rule on at least `8·n_modes`
/// points. Conjugate symmetry `c_{-n} = conj(c_n)` is enforced exactly.
pub fn fourier_coefficients<F>(f: F, n_modes: usize) -> Vec<C64>
where
    F: Fn(f64) -> f64,
{
    assert!(n_modes >= 1, "need at least one mode");
    let npts = (8 * n_modes).next_power_of_two().max(64);
    let samples: Vec<f64> = (0..npts).map(|j| f(j as f64 / npts as f64)).collect();
    coefficients_from_samples(&samples, n_modes)
}

/// FFT-based trapezoid coefficients of a real function sampled uniformly on
/// `[0,1)`, symmetrized so that `c_{-n} = conj(c_n)` holds exactly.
pub fn coefficients_from_samples(samples: &[f64], max_lag: usize) -> Vec<C64> {
    let n = samples.len();
    assert!(n > 2 * max_lag, "too few samples for requested modes");
    let mut buf: Vec<C64> = samples.iter().map(|&x| C64::new(x, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let mut out = vec![C64::new(0.0, 0.0); 2 * max_lag + 1];
    for m in 0..=max_lag {
        // c_m comes from FFT bin m, c_{-m} from bin n-m.
        let pos = buf[m] * scale;
        let neg = if m == 0 { pos } else { buf[n - m] * scale };
        let sym = 0.5 * (pos + neg.conj());
        out[max_lag + m] = sym;
        out[max_lag - m] = sym.conj();
    }
    out
}
