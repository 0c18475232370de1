//! Exact and effective evolution, the modulated approximant, and error norms.
//!
//! The synthesized data are diagonal in the Bloch representation, so both
//! Cauchy problems are solved by Fourier multipliers — no time stepping. For
//! the Schrödinger equation `i ∂_t u_ε = A_ε u_ε` each amplitude picks up
//! `e^{-i t ε⁻² E_s(k₀+εk)}`; for the wave equation
//! `∂_t² v_ε = ∓(A_ε - ε⁻²σ) v_ε` (sign per edge side) the amplitudes evolve
//! under `cos(tω)` and `ω⁻¹ sin(tω)` with `ω = ε⁻¹|E_s(k₀+εk) - σ|^{1/2}`.
//! The effective problems replace `E_s(k₀+εk) - σ` by `±b(εk)²`, giving the
//! multipliers `e^{∓i t b k²}`, `cos(t b^{1/2}|k|)` and
//! `(b^{1/2}|k|)⁻¹ sin(t b^{1/2}|k|)` on the plain Fourier transform. The
//! modulated approximant multiplies the effective solution by the fast Bloch
//! profile `φ_{k₀}(x/ε)`, by `e^{iπx/ε}` at the zone-boundary edge, and by
//! the scalar phase `e^{-i t ε⁻² σ}` in the Schrödinger case.

use crate::band_edge::BandEdgeData;
use crate::bloch_synthesis::{
    inverse_transform_with, modulate_by_cell_function, synthesize, synthesize_with_multiplier,
    FieldGrid, SpectralProfile, SynthError, SynthesisPlan, WaveField,
};
use crate::numeric::sinc;
use crate::C64;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equation {
    Schrodinger,
    Wave,
}

impl Equation {
    pub fn parse(s: &str) -> Option<Equation> {
        match s {
            "schrodinger" | "Schrodinger" | "schroedinger" => Some(Equation::Schrodinger),
            "wave" | "Wave" | "hyperbolic" => Some(Equation::Wave),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DynError {
    /// `E_s - σ` has the wrong sign somewhere on the synthesized window
    /// (corrupt edge data).
    NegativeSpectralShift { q: f64, value: f64 },
    /// A Schrödinger problem must not carry a velocity profile.
    UnexpectedVelocityProfile,
    Synth(SynthError),
}

impl fmt::Display for DynError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynError::NegativeSpectralShift { q, value } => write!(
                f,
                "spectral shift E-σ has the wrong sign at quasimomentum {q}: {value:.3e}"
            ),
            DynError::UnexpectedVelocityProfile => {
                write!(f, "Schrödinger evolution does not take a velocity profile g")
            }
            DynError::Synth(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DynError {}

impl From<SynthError> for DynError {
    fn from(e: SynthError) -> Self {
        DynError::Synth(e)
    }
}

/// One evolution problem: equation, edge plan, time, and data profiles.
#[derive(Debug, Clone, Copy)]
pub struct EvolutionSpec<'a> {
    pub equation: Equation,
    pub plan: SynthesisPlan<'a>,
    pub t: f64,
    pub profile_f: &'a SpectralProfile,
    /// Initial velocity for the wave equation (`None` means g ≡ 0).
    pub profile_g: Option<&'a SpectralProfile>,
}

impl<'a> EvolutionSpec<'a> {
    pub fn validate(&self) -> Result<(), DynError> {
        match self.equation {
            Equation::Schrodinger if self.profile_g.is_some() => {
                Err(DynError::UnexpectedVelocityProfile)
            }
            _ => Ok(()),
        }
    }
}

/// `|E_s(k₀+εk) - σ|` with the sign check demanded by the edge side; the
/// spectral shift must be nonnegative for minima and nonpositive for maxima.
fn spectral_shift(spec: &EvolutionSpec, q: f64) -> Result<f64, DynError> {
    let data = &spec.plan.bundle.data;
    let e = spec.plan.bundle.table.energy_at(q);
    let shift = data.sign * (e - data.sigma);
    let tol = 1e-9 * (1.0 + data.sigma.abs());
    if shift < -tol {
        return Err(DynError::NegativeSpectralShift { q, value: shift });
    }
    Ok(shift.max(0.0))
}

fn multiplied(profile: &SpectralProfile, mults: &[C64]) -> SpectralProfile {
    let mut p = profile.clone();
    for (a, m) in p.amplitudes.iter_mut().zip(mults) {
        *a *= m;
    }
    p
}

/// Evolve the exact ε-problem by Bloch multipliers and re-synthesize.
pub fn evolve_exact(spec: &EvolutionSpec, grid: FieldGrid) -> Result<WaveField, DynError> {
    spec.validate()?;
    let plan = &spec.plan;
    let eps = plan.eps;
    let t = spec.t;
    match spec.equation {
        Equation::Schrodinger => {
            let table = &plan.bundle.table;
            let field = synthesize_with_multiplier(plan, spec.profile_f, grid, |_, q| {
                let ph = -t * table.energy_at(q) / (eps * eps);
                C64::new(ph.cos(), ph.sin())
            })?;
            Ok(field)
        }
        Equation::Wave => {
            // position datum: cos(t ω)
            let mut mults = Vec::with_capacity(spec.profile_f.amplitudes.len());
            for i in 0..spec.profile_f.amplitudes.len() {
                let q = plan.quasimomentum(spec.profile_f.k_at(i));
                let omega = (spectral_shift(spec, q)?).sqrt() / eps;
                mults.push(C64::new((t * omega).cos(), 0.0));
            }
            let pf = multiplied(spec.profile_f, &mults);
            let mut total = synthesize(plan, &pf, grid)?;
            // velocity datum: ω⁻¹ sin(t ω) = t·sinc(t ω)
            if let Some(pg) = spec.profile_g {
                let mut mults = Vec::with_capacity(pg.amplitudes.len());
                for i in 0..pg.amplitudes.len() {
                    let q = plan.quasimomentum(pg.k_at(i));
                    let omega = (spectral_shift(spec, q)?).sqrt() / eps;
                    mults.push(C64::new(t * sinc(t * omega), 0.0));
                }
                let pgm = multiplied(pg, &mults);
                let gfield = synthesize(plan, &pgm, grid)?;
                for (a, g) in total.values.iter_mut().zip(&gfield.values) {
                    *a += g;
                }
            }
            Ok(total)
        }
    }
}

/// Evolve the effective (homogenized) problem: a constant-coefficient
/// Fourier multiplier on the plain transform of the data.
pub fn evolve_effective(
    spec: &EvolutionSpec,
    edge: &BandEdgeData,
    grid: FieldGrid,
) -> Result<WaveField, DynError> {
    spec.validate()?;
    let t = spec.t;
    let b = edge.b;
    match spec.equation {
        Equation::Schrodinger => {
            // i ∂_t u₀ = ±A^hom u₀ with A^hom = -b d²/dx²; the sign matches
            // the edge side, so the multiplier is e^{-i t (sign) b k²}.
            let sign = edge.sign;
            Ok(inverse_transform_with(spec.profile_f, grid, |k| {
                let ph = -t * sign * b * k * k;
                C64::new(ph.cos(), ph.sin())
            })?)
        }
        Equation::Wave => {
            let mut total = inverse_transform_with(spec.profile_f, grid, |k| {
                C64::new((t * b.sqrt() * k.abs()).cos(), 0.0)
            })?;
            if let Some(pg) = spec.profile_g {
                let gfield = inverse_transform_with(pg, grid, |k| {
                    C64::new(t * sinc(t * b.sqrt() * k.abs()), 0.0)
                })?;
                for (a, g) in total.values.iter_mut().zip(&gfield.values) {
                    *a += g;
                }
            }
            Ok(total)
        }
    }
}

/// Modulate an effective field into the approximant: multiply by
/// `φ_{k₀}(x/ε)`, by `e^{iπx/ε}` when k₀ = π, and by `e^{-i t ε⁻² σ}` for the
/// Schrödinger equation.
pub fn modulated_approximant(
    u0: &WaveField,
    edge: &BandEdgeData,
    mode_halfwidth: usize,
    eps: f64,
    t: f64,
    equation: Equation,
) -> WaveField {
    let shifted = edge.condition.is_shifted();
    let mut out = modulate_by_cell_function(u0, &edge.phi_k0, mode_halfwidth, shifted);
    if equation == Equation::Schrodinger {
        let ph = -t * edge.sigma / (eps * eps);
        let phase = C64::new(ph.cos(), ph.sin());
        for v in &mut out.values {
            *v *= phase;
        }
    }
    out
}

/// Discrete `L₂` distance between two fields on the same grid.
pub fn error_norm(exact: &WaveField, approx: &WaveField) -> Result<f64, DynError> {
    Ok(exact.l2_distance(approx)?)
}

/// Exact, effective and modulated fields plus their `L₂` gap.
#[derive(Debug, Clone)]
pub struct ComparisonResult {
    pub exact: WaveField,
    pub effective: WaveField,
    pub approximant: WaveField,
    pub error: f64,
}

/// Run the full pipeline at one (ε, t): synthesize, evolve both problems,
/// modulate, and measure the error norm.
pub fn run_comparison(spec: &EvolutionSpec, grid: FieldGrid) -> Result<ComparisonResult, DynError> {
    let exact = evolve_exact(spec, grid)?;
    let effective = evolve_effective(spec, &spec.plan.bundle.data, grid)?;
    let approximant = modulated_approximant(
        &effective,
        &spec.plan.bundle.data,
        spec.plan.bundle.table.mode_halfwidth,
        spec.plan.eps,
        spec.t,
        spec.equation,
    );
    let error = error_norm(&exact, &approximant)?;
    Ok(ComparisonResult { exact, effective, approximant, error })
}

/// Spectral wave energy `Σ (ω²|v̂|² + |∂_t v̂|²) Δk` of the evolved state,
/// computed from the diagonal representation.
pub fn wave_spectral_energy(spec: &EvolutionSpec) -> Result<f64, DynError> {
    assert_eq!(spec.equation, Equation::Wave);
    let plan = &spec.plan;
    let eps = plan.eps;
    let t = spec.t;
    let mut total = 0.0;
    let zero = SpectralProfile {
        dk: spec.profile_f.dk,
        mode_min: spec.profile_f.mode_min,
        amplitudes: vec![C64::new(0.0, 0.0); spec.profile_f.amplitudes.len()],
        sobolev_q: 0.0,
        hq_norm: 0.0,
        truncation_tail: 0.0,
        spatial_extent: spec.profile_f.spatial_extent,
    };
    let pg = spec.profile_g.unwrap_or(&zero);
    // v̂(t) = cos(tω) f̂ + t sinc(tω) ĝ,  ∂_t v̂ = -ω sin(tω) f̂ + cos(tω) ĝ
    let len = spec.profile_f.amplitudes.len().max(pg.amplitudes.len());
    for i in 0..len {
        let (f_amp, k) = if i < spec.profile_f.amplitudes.len() {
            (spec.profile_f.amplitudes[i], spec.profile_f.k_at(i))
        } else {
            (C64::new(0.0, 0.0), pg.k_at(i))
        };
        let g_amp = {
            let m = (k / pg.dk).round() as i64 - pg.mode_min;
            if m >= 0 && (m as usize) < pg.amplitudes.len() {
                pg.amplitudes[m as usize]
            } else {
                C64::new(0.0, 0.0)
            }
        };
        let q = plan.quasimomentum(k);
        let omega = (spectral_shift(spec, q)?).sqrt() / eps;
        let v = f_amp * (t * omega).cos() + g_amp * t * sinc(t * omega);
        let vdot = -f_amp * omega * (t * omega).sin() + g_amp * (t * omega).cos();
        total += omega * omega * v.norm_sqr() + vdot.norm_sqr();
    }
    Ok(total * spec.profile_f.dk)
}

/// Choose a commensurate torus: long enough for the datum plus the group
/// transport over time `t` (with the transport speed capped — wrapped
/// components evolve by the same multipliers and cancel in error norms).
pub fn comparison_grid(
    plan: &SynthesisPlan,
    profiles: &[&SpectralProfile],
    t: f64,
    points_per_cell: usize,
    transport_cap: f64,
) -> FieldGrid {
    let eps = plan.eps;
    let mut extent = 10.0f64;
    let mut k_max = 0.0f64;
    for p in profiles {
        extent = extent.max(p.spatial_extent);
        k_max = k_max.max(p.k_support());
    }
    // max |dΩ/dk| with Ω(k) = ε⁻²E(k₀+εk), sampled over the used window.
    let table = &plan.bundle.table;
    let h = table.spacing();
    let mut v_max = 2.0 * plan.bundle.data.b * k_max;
    let n_samples = 64;
    for i in 0..=n_samples {
        let k = -k_max + 2.0 * k_max * i as f64 / n_samples as f64;
        let q = plan.quasimomentum(k);
        let d = (table.energy_at(q + h) - table.energy_at(q - h)) / (2.0 * h);
        v_max = v_max.max(d.abs() / eps);
    }
    let v = v_max.min(transport_cap);
    let min_len = 2.0 * (extent + v * t.abs()) + 4.0;
    FieldGrid::commensurate(eps, min_len, points_per_cell)
}
