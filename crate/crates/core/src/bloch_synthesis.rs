//! Spectral profiles, the Υ_ε synthesis operators, and Bloch analysis on a
//! periodized computational domain.
//!
//! The computational torus has length `L = n_cells·ε` (an even number of
//! ε-cells), so every dual frequency is `k_j = 2πj/L` and the cell functions
//! `φ(x/ε)` are exactly periodic. A band-limited datum `f` is carried by its
//! amplitudes `(Φf)(k_m)` on the dual grid; synthesis
//!
//! ```text
//! (Υ_ε f)(x) = (2π)^{-1/2} Σ_m (Φf)(k_m) e^{ik_m x} φ_s(x/ε, k₀ + εk_m) Δk
//! ```
//!
//! is assembled in dual space: the cell amplitude contributes its Fourier
//! mode `n` at dual index `m + n·n_cells` (plus `n_cells/2` for the shifted
//! variant, which carries the extra `e^{iπx/ε}`), followed by one inverse
//! FFT. Because the zone condition `ε·K < π` bounds the profile width by
//! `n_cells/2` dual modes, distinct `(m, n)` pairs never collide, so the
//! synthesis is exactly isometric on the grid and evolution multipliers
//! preserve the discrete norm to machine precision.

use crate::band_edge::{Condition, EdgeBundle};
use crate::C64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum SynthError {
    /// `ε·K ≥ π`: the profile would leak outside the first Brillouin zone.
    ZoneOverflow { eps_k: f64 },
    /// The profile support exceeds the refined edge window.
    EdgeWindowExceeded { eps_k: f64, half_width: f64 },
    /// Field/profile/plan grids are not commensurate.
    GridMismatch(String),
    /// Unknown profile kind name (CLI parsing).
    UnsupportedKind(String),
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::ZoneOverflow { eps_k } => {
                write!(f, "zone overflow: ε·K = {eps_k:.4} ≥ π")
            }
            SynthError::EdgeWindowExceeded { eps_k, half_width } => write!(
                f,
                "profile quasimomentum extent ε·K = {eps_k:.4} exceeds the edge window {half_width:.4}"
            ),
            SynthError::GridMismatch(msg) => write!(f, "grid mismatch: {msg}"),
            SynthError::UnsupportedKind(k) => write!(f, "unsupported profile kind `{k}`"),
        }
    }
}

impl std::error::Error for SynthError {}

/// Uniform grid over the torus `[-L/2, L/2)` with `L = n_cells·ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldGrid {
    pub eps: f64,
    pub n_cells: usize,
    pub points_per_cell: usize,
}

impl FieldGrid {
    /// Smallest commensurate grid with `L ≥ min_length` and an even cell
    /// count.
    pub fn commensurate(eps: f64, min_length: f64, points_per_cell: usize) -> FieldGrid {
        assert!(eps > 0.0 && min_length > 0.0 && points_per_cell >= 4);
        let mut n_cells = (min_length / eps).ceil() as usize;
        if n_cells % 2 == 1 {
            n_cells += 1;
        }
        FieldGrid { eps, n_cells, points_per_cell }
    }

    pub fn length(&self) -> f64 {
        self.eps * self.n_cells as f64
    }

    pub fn n_points(&self) -> usize {
        self.n_cells * self.points_per_cell
    }

    pub fn dx(&self) -> f64 {
        self.eps / self.points_per_cell as f64
    }

    /// Dual frequency spacing `Δk = 2π/L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length()
    }

    pub fn x(&self, i: usize) -> f64 {
        -0.5 * self.length() + i as f64 * self.dx()
    }

    /// Largest cell-function mode representable without dual-index aliasing.
    pub fn max_cell_mode(&self) -> usize {
        self.points_per_cell / 2 - 1
    }
}

/// A complex field sampled on a [`FieldGrid`].
#[derive(Debug, Clone)]
pub struct WaveField {
    pub grid: FieldGrid,
    pub values: Vec<C64>,
}

impl WaveField {
    pub fn zeros(grid: FieldGrid) -> WaveField {
        WaveField { grid, values: vec![C64::new(0.0, 0.0); grid.n_points()] }
    }

    /// Discrete `L₂` norm `(Σ|v|²Δx)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    /// `‖self - other‖_{L₂}` on a shared grid.
    pub fn l2_distance(&self, other: &WaveField) -> Result<f64, SynthError> {
        if self.grid != other.grid {
            return Err(SynthError::GridMismatch("fields live on different grids".into()));
        }
        let s: f64 =
            self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((s * self.grid.dx()).sqrt())
    }
}

/// Dual-space coefficients of a torus field: `field(x) = Σ_j c_j e^{ik_j x}`
/// with `k_j = 2πj/L`, index `j` in signed FFT layout.
pub fn field_to_dual(field: &WaveField) -> Vec<C64> {
    let m = field.grid.n_points();
    let mut buf = field.values.clone();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    for (j, v) in buf.iter_mut().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        *v *= sign * scale;
    }
    buf
}

/// Inverse of [`field_to_dual`].
pub fn dual_to_field(grid: FieldGrid, dual: &[C64]) -> WaveField {
    let m = grid.n_points();
    assert_eq!(dual.len(), m);
    let mut buf: Vec<C64> = dual
        .iter()
        .enumerate()
        .map(|(j, v)| if j % 2 == 0 { *v } else { -*v })
        .collect();
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    WaveField { grid, values: buf }
}

/// Kinds of initial-datum profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind {
    /// `exp(-1/(1-(k/K)²))` on `|k| < K`: smooth and compactly supported.
    Bump { k_max: f64 },
    /// `|Φf|(k) = (1+k²)^{-(q+0.5+delta)/2}` truncated at `K`: lies in `H^q`
    /// uniformly in the truncation but in no better class as `K → ∞`.
    PowerLaw { q: f64, delta: f64, k_max: f64 },
    /// Narrow Gaussian of width `w` at `k̂` (order-sharpness probes).
    Point { center: f64, width: f64 },
}

impl ProfileKind {
    /// Upper end of the profile's frequency support.
    pub fn k_support(&self) -> f64 {
        match *self {
            ProfileKind::Bump { k_max } => k_max,
            ProfileKind::PowerLaw { k_max, .. } => k_max,
            ProfileKind::Point { center, width } => center.abs() + 8.0 * width,
        }
    }

    /// Rough spatial extent of the datum, used to size the torus.
    pub fn spatial_extent(&self) -> f64 {
        match *self {
            ProfileKind::Bump { k_max } => 60.0 / k_max,
            ProfileKind::PowerLaw { .. } => 40.0,
            ProfileKind::Point { width, .. } => 10.0 / width,
        }
    }

    fn amplitude(&self, k: f64) -> f64 {
        match *self {
            ProfileKind::Bump { k_max } => {
                let r = k / k_max;
                if r.abs() < 1.0 {
                    (-1.0 / (1.0 - r * r)).exp()
                } else {
                    0.0
                }
            }
            ProfileKind::PowerLaw { q, delta, k_max } => {
                if k.abs() <= k_max {
                    (1.0 + k * k).powf(-(q + 0.5 + delta) / 2.0)
                } else {
                    0.0
                }
            }
            ProfileKind::Point { center, width } => {
                let r = (k - center) / width;
                if r.abs() <= 8.0 {
                    (-0.5 * r * r).exp()
                } else {
                    0.0
                }
            }
        }
    }
}

/// The Fourier amplitude `(Φf)(k)` of a datum, sampled on a dual grid.
#[derive(Debug, Clone)]
pub struct SpectralProfile {
    /// Frequency spacing (must match the torus dual grid for synthesis).
    pub dk: f64,
    /// `amplitudes[i]` sits at `k = (mode_min + i)·dk`.
    pub mode_min: i64,
    pub amplitudes: Vec<C64>,
    /// Regularity label q of the datum class.
    pub sobolev_q: f64,
    /// Cached `‖f‖_{H^q}` at the label q.
    pub hq_norm: f64,
    /// L₂ mass discarded by frequency truncation (power-law profiles).
    pub truncation_tail: f64,
    /// Rough spatial extent of the datum (torus sizing hint).
    pub spatial_extent: f64,
}

impl SpectralProfile {
    pub fn k_at(&self, i: usize) -> f64 {
        (self.mode_min + i as i64) as f64 * self.dk
    }

    pub fn l2_norm(&self) -> f64 {
        (self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dk).sqrt()
    }

    /// `‖f‖_{H^q} = (Σ (1+k²)^q |Φf(k)|² Δk)^{1/2}`.
    pub fn hq_norm_at(&self, q: f64) -> f64 {
        let s: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let k = self.k_at(i);
                (1.0 + k * k).powf(q) * a.norm_sqr()
            })
            .sum();
        (s * self.dk).sqrt()
    }

    /// Largest |k| carried by a nonzero amplitude.
    pub fn k_support(&self) -> f64 {
        let mut k = 0.0f64;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm_sqr() > 0.0 {
                k = k.max(self.k_at(i).abs());
            }
        }
        k
    }

    /// A zero profile on the same mode range (for g-only wave problems).
    pub fn zeroed(&self) -> SpectralProfile {
        let mut p = self.clone();
        for a in &mut p.amplitudes {
            *a = C64::new(0.0, 0.0);
        }
        p.hq_norm = 0.0;
        p
    }

    /// Scale all amplitudes (and cached norms) by `c`.
    pub fn scaled(&self, c: f64) -> SpectralProfile {
        let mut p = self.clone();
        for a in &mut p.amplitudes {
            *a *= c;
        }
        p.hq_norm *= c.abs();
        p
    }
}

/// Sample a profile on the dual grid with spacing `dk`, normalized to
/// `‖f‖_{L₂} = 1`, with the `H^q` norm cached at `sobolev_q`.
pub fn make_profile(kind: ProfileKind, sobolev_q: f64, dk: f64) -> SpectralProfile {
    let k_hi = kind.k_support();
    let (lo, hi) = match kind {
        ProfileKind::Point { center, width } => {
            let lo = ((center - 8.0 * width) / dk).floor() as i64;
            let hi = ((center + 8.0 * width) / dk).ceil() as i64;
            (lo, hi)
        }
        _ => {
            let m = (k_hi / dk).ceil() as i64;
            (-m, m)
        }
    };
    let mut amplitudes: Vec<C64> = (lo..=hi)
        .map(|m| C64::new(kind.amplitude(m as f64 * dk), 0.0))
        .collect();
    let norm = (amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * dk).sqrt();
    for a in &mut amplitudes {
        *a /= norm;
    }
    let truncation_tail = match kind {
        ProfileKind::PowerLaw { q, delta, k_max } => {
            // ∫_{|k|>K} (1+k²)^{-(q+0.5+δ)} dk ≈ 2 K^{-2(q+δ)} / (2q+2δ),
            // relative to the unit-normalized profile.
            let p = 2.0 * (q + delta);
            (2.0 * k_max.powf(-p) / p).sqrt() / norm
        }
        _ => 0.0,
    };
    let mut profile = SpectralProfile {
        dk,
        mode_min: lo,
        amplitudes,
        sobolev_q,
        hq_norm: 0.0,
        truncation_tail,
        spatial_extent: kind.spatial_extent(),
    };
    profile.hq_norm = profile.hq_norm_at(sobolev_q);
    profile
}

/// Which side of the edge the synthesized bands sit on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Bands `j ≥ s` (left edges: Conditions 1 and 4).
    Plus,
    /// Bands `j ≤ s` (right edges: Conditions 2 and 3).
    Minus,
}

/// A synthesis configuration bound to one band edge and one ε.
#[derive(Debug, Clone, Copy)]
pub struct SynthesisPlan<'a> {
    pub bundle: &'a EdgeBundle,
    pub eps: f64,
    pub direction: Direction,
    pub shifted: bool,
}

impl<'a> SynthesisPlan<'a> {
    pub fn new(bundle: &'a EdgeBundle, eps: f64) -> SynthesisPlan<'a> {
        assert!(eps > 0.0 && eps <= 1.0);
        let direction = match bundle.data.condition {
            Condition::Cond1 | Condition::Cond4 => Direction::Plus,
            Condition::Cond2 | Condition::Cond3 => Direction::Minus,
        };
        SynthesisPlan { bundle, eps, direction, shifted: bundle.data.condition.is_shifted() }
    }

    fn check(&self, profile: &SpectralProfile, grid: &FieldGrid) -> Result<(), SynthError> {
        if (grid.eps - self.eps).abs() > 1e-12 {
            return Err(SynthError::GridMismatch(format!(
                "plan ε = {} but grid ε = {}",
                self.eps, grid.eps
            )));
        }
        if (profile.dk - grid.dk()).abs() > 1e-9 * grid.dk() {
            return Err(SynthError::GridMismatch(
                "profile was sampled on a different dual grid".into(),
            ));
        }
        let eps_k = self.eps * profile.k_support();
        if eps_k >= PI {
            return Err(SynthError::ZoneOverflow { eps_k });
        }
        let hw = self.bundle.table.half_width();
        if eps_k > hw {
            return Err(SynthError::EdgeWindowExceeded { eps_k, half_width: hw });
        }
        Ok(())
    }

    /// Quasimomentum carried by profile mode `m`.
    pub fn quasimomentum(&self, k_phys: f64) -> f64 {
        self.bundle.data.k0 + self.eps * k_phys
    }
}

/// Scatter one synthesized profile into dual coefficients. `multiplier`
/// rides on each amplitude (identity for plain synthesis, the evolution
/// multiplier for exact dynamics).
fn scatter_to_dual<F>(
    plan: &SynthesisPlan,
    profile: &SpectralProfile,
    grid: &FieldGrid,
    mut multiplier: F,
) -> Result<Vec<C64>, SynthError>
where
    F: FnMut(f64, f64) -> C64, // (k_phys, quasimomentum) -> factor
{
    plan.check(profile, grid)?;
    let m_total = grid.n_points() as i64;
    let n_cells = grid.n_cells as i64;
    let shift = if plan.shifted { n_cells / 2 } else { 0 };
    let table = &plan.bundle.table;
    let hwm = table.mode_halfwidth as i64;
    let n_keep = (grid.max_cell_mode() as i64).min(hwm);
    let scale = grid.dk() / (2.0 * PI).sqrt();

    let mut dual = vec![C64::new(0.0, 0.0); grid.n_points()];
    for (i, amp) in profile.amplitudes.iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let m = profile.mode_min + i as i64;
        let k_phys = m as f64 * profile.dk;
        let q = plan.quasimomentum(k_phys);
        let coeffs = table.eigvec_at(q);
        let factor = amp * multiplier(k_phys, q) * scale;
        for n in -n_keep..=n_keep {
            let c = coeffs[(n + hwm) as usize];
            if c.norm_sqr() < 1e-60 {
                continue;
            }
            let j = (m + n * n_cells + shift).rem_euclid(m_total) as usize;
            dual[j] += factor * c;
        }
    }
    Ok(dual)
}

/// Synthesize the special initial datum `Υ_ε f` as a sampled wave field.
pub fn synthesize(
    plan: &SynthesisPlan,
    profile: &SpectralProfile,
    grid: FieldGrid,
) -> Result<WaveField, SynthError> {
    let dual = scatter_to_dual(plan, profile, &grid, |_, _| C64::new(1.0, 0.0))?;
    Ok(dual_to_field(grid, &dual))
}

/// Synthesize with a per-mode multiplier applied to the amplitudes (exact
/// evolution in the Bloch representation).
pub fn synthesize_with_multiplier<F>(
    plan: &SynthesisPlan,
    profile: &SpectralProfile,
    grid: FieldGrid,
    multiplier: F,
) -> Result<WaveField, SynthError>
where
    F: FnMut(f64, f64) -> C64,
{
    let dual = scatter_to_dual(plan, profile, &grid, multiplier)?;
    Ok(dual_to_field(grid, &dual))
}

/// Plain inverse Fourier transform of a profile onto the grid (the effective
/// field carrier), optionally multiplied per mode.
pub fn inverse_transform_with<F>(
    profile: &SpectralProfile,
    grid: FieldGrid,
    mut multiplier: F,
) -> Result<WaveField, SynthError>
where
    F: FnMut(f64) -> C64,
{
    if (profile.dk - grid.dk()).abs() > 1e-9 * grid.dk() {
        return Err(SynthError::GridMismatch(
            "profile was sampled on a different dual grid".into(),
        ));
    }
    let m_total = grid.n_points() as i64;
    let scale = grid.dk() / (2.0 * PI).sqrt();
    let mut dual = vec![C64::new(0.0, 0.0); grid.n_points()];
    for (i, amp) in profile.amplitudes.iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let m = profile.mode_min + i as i64;
        let k = m as f64 * profile.dk;
        let j = m.rem_euclid(m_total) as usize;
        dual[j] += amp * multiplier(k) * scale;
    }
    Ok(dual_to_field(grid, &dual))
}

/// Plain inverse transform (no multiplier).
pub fn inverse_transform(
    profile: &SpectralProfile,
    grid: FieldGrid,
) -> Result<WaveField, SynthError> {
    inverse_transform_with(profile, grid, |_| C64::new(1.0, 0.0))
}

/// Bloch analysis coefficients of a field against the plan's band: the
/// discrete adjoint of [`synthesize`], returning amplitudes on the profile's
/// mode range.
pub fn bloch_coeff(
    plan: &SynthesisPlan,
    field: &WaveField,
    mode_min: i64,
    n_modes: usize,
) -> Result<Vec<C64>, SynthError> {
    if (field.grid.eps - plan.eps).abs() > 1e-12 {
        return Err(SynthError::GridMismatch("field ε differs from plan ε".into()));
    }
    let grid = &field.grid;
    let dual = field_to_dual(field);
    let m_total = grid.n_points() as i64;
    let n_cells = grid.n_cells as i64;
    let shift = if plan.shifted { n_cells / 2 } else { 0 };
    let table = &plan.bundle.table;
    let hwm = table.mode_halfwidth as i64;
    let n_keep = (grid.max_cell_mode() as i64).min(hwm);
    let scale = grid.dk() / (2.0 * PI).sqrt();

    let mut out = Vec::with_capacity(n_modes);
    for i in 0..n_modes {
        let m = mode_min + i as i64;
        let k_phys = m as f64 * grid.dk();
        let q = plan.quasimomentum(k_phys);
        let coeffs = table.eigvec_at(q);
        let mut acc = C64::new(0.0, 0.0);
        for n in -n_keep..=n_keep {
            let c = coeffs[(n + hwm) as usize];
            if c.norm_sqr() < 1e-60 {
                continue;
            }
            let j = (m + n * n_cells + shift).rem_euclid(m_total) as usize;
            acc += c.conj() * dual[j];
        }
        out.push(acc / scale);
    }
    Ok(out)
}

/// Pointwise multiplication by the 1-periodically extended cell function
/// `φ(x/ε)` given by its Fourier coefficients, plus the `e^{iπx/ε}` carrier
/// when `shifted`.
pub fn modulate_by_cell_function(
    field: &WaveField,
    phi_coeffs: &[C64],
    mode_halfwidth: usize,
    shifted: bool,
) -> WaveField {
    let grid = field.grid;
    let ppc = grid.points_per_cell;
    // φ(x/ε) repeats every cell: evaluate one cell's worth of samples.
    // x_i = -L/2 + i·Δx and L/ε is even, so x/ε mod 1 cycles with period ppc.
    let mut cell_vals = Vec::with_capacity(ppc);
    for r in 0..ppc {
        let y = (grid.x(r) / grid.eps).rem_euclid(1.0);
        let mut acc = C64::new(0.0, 0.0);
        for (idx, c) in phi_coeffs.iter().enumerate() {
            let n = idx as i64 - mode_halfwidth as i64;
            let ph = 2.0 * PI * n as f64 * y;
            acc += c * C64::new(ph.cos(), ph.sin());
        }
        cell_vals.push(acc);
    }
    let mut out = WaveField::zeros(grid);
    for (i, v) in field.values.iter().enumerate() {
        let mut w = *v * cell_vals[i % ppc];
        if shifted {
            let ph = PI * grid.x(i) / grid.eps;
            w *= C64::new(ph.cos(), ph.sin());
        }
        out.values[i] = w;
    }
    out
}
