//! Convergence sweeps, oscillatory symbol-norm checks, and order-sharpness
//! probes.
//!
//! The sweeps drive the full pipeline (synthesize → evolve exact and
//! effective → modulate → error norm) over decreasing ε or growing t and fit
//! the observed order by ordinary least squares on log-log points. Only
//! admissible points enter a fit: `ε|t|^{-1/2} ≤ 𝔢` for the Schrödinger
//! estimates, `ε|t|^{-1} ≤ 𝔢̃` for the wave estimates.
//!
//! The symbol checks evaluate the oscillatory multipliers whose `L∞` norms
//! control the main error terms, e.g.
//!
//! ```text
//! ε^q ((k-k₀)² + ε²)^{-q/2} |sin(½ t ε⁻² (k-k₀)⁴ γ(k))|
//! ```
//!
//! by brute force over a dense grid on `|k-k₀| ≤ κ`, and compare the sup
//! against the two-sided asymptotic expressions (which are exact up to
//! explicit constants: for the case above, between 1/3 and 3π/2 of the
//! displayed value for 0 ≤ q ≤ 4).

use crate::band_edge::{BandEdgeData, EdgeBundle};
use crate::bloch_synthesis::{
    bloch_coeff, inverse_transform, make_profile, modulate_by_cell_function, synthesize,
    FieldGrid, ProfileKind, SpectralProfile, SynthesisPlan,
};
use crate::dynamics::{
    comparison_grid, run_comparison, DynError, Equation, EvolutionSpec,
};
use crate::numeric::loglog_slope;
use crate::C64;
use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisError {
    /// (ε, t) violates the admissibility threshold required by the check.
    InadmissibleParameters { eps: f64, t: f64, threshold: f64 },
    /// Exponent outside the branch range of the requested case.
    BadExponent { value: f64, range: (f64, f64) },
    Dyn(DynError),
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::InadmissibleParameters { eps, t, threshold } => {
                write!(f, "(ε, t) = ({eps}, {t}) violates the admissibility threshold {threshold:.4e}")
            }
            AnalysisError::BadExponent { value, range } => {
                write!(f, "exponent {value} outside [{}, {}]", range.0, range.1)
            }
            AnalysisError::Dyn(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for AnalysisError {}

impl From<DynError> for AnalysisError {
    fn from(e: DynError) -> Self {
        AnalysisError::Dyn(e)
    }
}

/// Data profiles for a sweep: the position datum and an optional velocity
/// datum, each with its Sobolev label. `f_zero` runs the wave problem with
/// f ≡ 0 (velocity-only data).
#[derive(Debug, Clone, Copy)]
pub struct SweepData {
    pub f_kind: ProfileKind,
    pub f_q: f64,
    pub f_zero: bool,
    pub g_kind: Option<ProfileKind>,
    pub g_r: f64,
}

impl SweepData {
    pub fn position(kind: ProfileKind, q: f64) -> SweepData {
        SweepData { f_kind: kind, f_q: q, f_zero: false, g_kind: None, g_r: 0.0 }
    }

    pub fn velocity_only(kind: ProfileKind, r: f64, carrier: ProfileKind) -> SweepData {
        SweepData { f_kind: carrier, f_q: 0.0, f_zero: true, g_kind: Some(kind), g_r: r }
    }
}

/// One measured sweep point.
#[derive(Debug, Clone, Copy)]
pub struct SweepPoint {
    pub eps: f64,
    pub error: f64,
    pub hq_f: f64,
    pub hq_g: Option<f64>,
    pub admissible: bool,
}

/// Result of an ε-sweep at fixed t.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub t: f64,
    pub points: Vec<SweepPoint>,
    /// Least-squares slope of log error against log ε over the admissible
    /// points; `None` when fewer than two points qualify or the errors sit
    /// at the numerical floor (the null case).
    pub fitted_slope: Option<f64>,
    pub fit_residual: f64,
    pub theory_slope: f64,
}

const ERROR_FLOOR: f64 = 1e-9;

fn build_spec_profiles(
    data: &SweepData,
    dk: f64,
) -> (SpectralProfile, Option<SpectralProfile>) {
    let mut pf = make_profile(data.f_kind, data.f_q, dk);
    if data.f_zero {
        pf = pf.zeroed();
    }
    let pg = data.g_kind.map(|kind| make_profile(kind, data.g_r, dk));
    (pf, pg)
}

/// Run the pipeline over a decreasing ε list at fixed t and fit the observed
/// order on the admissible points.
pub fn epsilon_sweep(
    equation: Equation,
    bundle: &EdgeBundle,
    data: &SweepData,
    t: f64,
    eps_list: &[f64],
    points_per_cell: usize,
    theory_slope: f64,
) -> Result<SweepResult, AnalysisError> {
    assert!(eps_list.windows(2).all(|w| w[1] < w[0]), "ε list must be strictly decreasing");
    let results = crate::cell_eig::parallel_map(eps_list, |&eps| -> Result<SweepPoint, AnalysisError> {
        let plan = SynthesisPlan::new(bundle, eps);
        let probe = build_spec_profiles(data, 0.05);
        let mut carriers: Vec<&SpectralProfile> = vec![&probe.0];
        if let Some(ref g) = probe.1 {
            carriers.push(g);
        }
        let grid = comparison_grid(&plan, &carriers, t, points_per_cell, 64.0);
        let (pf, pg) = build_spec_profiles(data, grid.dk());
        let spec = EvolutionSpec {
            equation,
            plan,
            t,
            profile_f: &pf,
            profile_g: pg.as_ref(),
        };
        let r = run_comparison(&spec, grid)?;
        let admissible = match equation {
            Equation::Schrodinger => bundle.data.schrodinger_admissible(eps, t),
            Equation::Wave => bundle.data.wave_admissible(eps, t),
        };
        Ok(SweepPoint {
            eps,
            error: r.error,
            hq_f: pf.hq_norm,
            hq_g: pg.as_ref().map(|p| p.hq_norm),
            admissible,
        })
    });
    let mut points = Vec::with_capacity(eps_list.len());
    for r in results {
        points.push(r?);
    }

    let fit: Vec<&SweepPoint> =
        points.iter().filter(|p| p.admissible && p.error > ERROR_FLOOR).collect();
    let (fitted_slope, fit_residual) = if fit.len() >= 2 {
        let xs: Vec<f64> = fit.iter().map(|p| p.eps).collect();
        let ys: Vec<f64> = fit.iter().map(|p| p.error).collect();
        let (s, _, r) = loglog_slope(&xs, &ys);
        (Some(s), r)
    } else {
        (None, 0.0)
    };
    Ok(SweepResult { t, points, fitted_slope, fit_residual, theory_slope })
}

/// One measured time point.
#[derive(Debug, Clone, Copy)]
pub struct TimePoint {
    pub t: f64,
    pub error: f64,
    pub admissible: bool,
    /// `error / ((1+√t)·ε)`.
    pub growth_ratio: f64,
}

/// Result of a t-sweep at fixed ε.
#[derive(Debug, Clone)]
pub struct TimeSweepResult {
    pub eps: f64,
    pub points: Vec<TimePoint>,
    pub fitted_exponent: Option<f64>,
    /// `sup_t error / ((1+√t)·ε)`.
    pub sup_growth_ratio: f64,
}

/// Run the pipeline over a time list at fixed ε and fit the t-growth
/// exponent of the error.
pub fn time_sweep(
    equation: Equation,
    bundle: &EdgeBundle,
    data: &SweepData,
    eps: f64,
    t_list: &[f64],
    points_per_cell: usize,
) -> Result<TimeSweepResult, AnalysisError> {
    let results = crate::cell_eig::parallel_map(t_list, |&t| -> Result<TimePoint, AnalysisError> {
        let plan = SynthesisPlan::new(bundle, eps);
        let probe = build_spec_profiles(data, 0.05);
        let mut carriers: Vec<&SpectralProfile> = vec![&probe.0];
        if let Some(ref g) = probe.1 {
            carriers.push(g);
        }
        let grid = comparison_grid(&plan, &carriers, t, points_per_cell, 64.0);
        let (pf, pg) = build_spec_profiles(data, grid.dk());
        let spec = EvolutionSpec {
            equation,
            plan,
            t,
            profile_f: &pf,
            profile_g: pg.as_ref(),
        };
        let r = run_comparison(&spec, grid)?;
        let admissible = match equation {
            Equation::Schrodinger => bundle.data.schrodinger_admissible(eps, t),
            Equation::Wave => bundle.data.wave_admissible(eps, t),
        };
        Ok(TimePoint {
            t,
            error: r.error,
            admissible,
            growth_ratio: r.error / ((1.0 + t.abs().sqrt()) * eps),
        })
    });
    let mut points = Vec::with_capacity(t_list.len());
    for r in results {
        points.push(r?);
    }
    let fit: Vec<&TimePoint> =
        points.iter().filter(|p| p.admissible && p.error > ERROR_FLOOR).collect();
    let fitted_exponent = if fit.len() >= 2 {
        let xs: Vec<f64> = fit.iter().map(|p| p.t).collect();
        let ys: Vec<f64> = fit.iter().map(|p| p.error).collect();
        Some(loglog_slope(&xs, &ys).0)
    } else {
        None
    };
    let sup_growth_ratio = points.iter().map(|p| p.growth_ratio).fold(0.0, f64::max);
    Ok(TimeSweepResult { eps, points, fitted_exponent, sup_growth_ratio })
}

/// The three oscillatory symbol families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolCase {
    /// `ε^q(δ²+ε²)^{-q/2} sin(½tε⁻²δ⁴γ)` (Schrödinger phase mismatch).
    SchrodingerSin,
    /// `ε^q(δ²+ε²)^{-q/2} sin(½tε⁻¹|δ|³γ̃)` (wave cosine mismatch).
    WaveSin3,
    /// `ε^r(δ²+ε²)^{-r/2}|δ|⁻¹ sin(½tε⁻¹|δ|³γ̃)` (wave sine mismatch).
    WaveSin3InvK,
}

impl SymbolCase {
    pub fn parse(s: &str) -> Option<SymbolCase> {
        match s {
            "schrodinger-sin" | "case1" | "1" => Some(SymbolCase::SchrodingerSin),
            "wave-sin3" | "case2" | "2" => Some(SymbolCase::WaveSin3),
            "wave-sin3-invk" | "case3" | "3" => Some(SymbolCase::WaveSin3InvK),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SymbolCase::SchrodingerSin => "schrodinger-sin",
            SymbolCase::WaveSin3 => "wave-sin3",
            SymbolCase::WaveSin3InvK => "wave-sin3-invk",
        }
    }
}

/// A brute-force symbol-norm measurement against its asymptotic expression.
#[derive(Debug, Clone, Copy)]
pub struct SymbolCheck {
    pub case: SymbolCase,
    pub q_or_r: f64,
    pub eps: f64,
    pub t: f64,
    pub grid_sup: f64,
    pub formula_value: f64,
    pub ratio: f64,
}

/// Number of grid points for the brute-force sup.
const SYMBOL_GRID: usize = 100_001;

/// Evaluate the symbol sup over `|k-k₀| ≤ κ` on a dense grid and compare to
/// the displayed asymptotic value.
pub fn lemma2_check(
    case: SymbolCase,
    q_or_r: f64,
    eps: f64,
    t: f64,
    edge: &BandEdgeData,
) -> Result<SymbolCheck, AnalysisError> {
    let q = q_or_r;
    match case {
        SymbolCase::SchrodingerSin => {
            if !edge.schrodinger_admissible(eps, t) {
                return Err(AnalysisError::InadmissibleParameters {
                    eps,
                    t,
                    threshold: edge.frak_e,
                });
            }
            if q < 0.0 {
                return Err(AnalysisError::BadExponent { value: q, range: (0.0, f64::INFINITY) });
            }
        }
        SymbolCase::WaveSin3 => {
            if !edge.wave_admissible(eps, t) {
                return Err(AnalysisError::InadmissibleParameters {
                    eps,
                    t,
                    threshold: edge.frak_e_tilde,
                });
            }
            if q < 0.0 {
                return Err(AnalysisError::BadExponent { value: q, range: (0.0, f64::INFINITY) });
            }
        }
        SymbolCase::WaveSin3InvK => {
            if !edge.wave_admissible(eps, t) {
                return Err(AnalysisError::InadmissibleParameters {
                    eps,
                    t,
                    threshold: edge.frak_e_tilde,
                });
            }
            if q < -1.0 {
                return Err(AnalysisError::BadExponent { value: q, range: (-1.0, f64::INFINITY) });
            }
        }
    }

    let k0 = edge.k0;
    let kappa = edge.kappa;
    let mut grid_sup = 0.0f64;
    for i in 0..SYMBOL_GRID {
        let d = -kappa + 2.0 * kappa * i as f64 / (SYMBOL_GRID - 1) as f64;
        if d == 0.0 {
            continue;
        }
        let k = k0 + d;
        let prefac = eps.powf(q) * (d * d + eps * eps).powf(-q / 2.0);
        let val = match case {
            SymbolCase::SchrodingerSin => {
                let arg = 0.5 * t * d.powi(4) * edge.gamma_at(k) / (eps * eps);
                prefac * arg.sin().abs()
            }
            SymbolCase::WaveSin3 => {
                let arg = 0.5 * t * d.abs().powi(3) * edge.gamma_tilde_at(k) / eps;
                prefac * arg.sin().abs()
            }
            SymbolCase::WaveSin3InvK => {
                let arg = 0.5 * t * d.abs().powi(3) * edge.gamma_tilde_at(k) / eps;
                prefac * arg.sin().abs() / d.abs()
            }
        };
        grid_sup = grid_sup.max(val);
    }

    let g0 = edge.gamma_at_k0.abs();
    let gt0 = edge.gamma_tilde_at_k0.abs();
    let ta = t.abs();
    let formula_value = match case {
        SymbolCase::SchrodingerSin => {
            if q <= 4.0 {
                eps.powf(q / 2.0) * ta.powf(q / 4.0)
                    / (g0.powf(-0.5) + eps * ta.sqrt()).powf(q / 2.0)
            } else {
                g0 * eps * eps * ta
            }
        }
        SymbolCase::WaveSin3 => {
            if q <= 3.0 {
                eps.powf(2.0 * q / 3.0) * ta.powf(q / 3.0)
                    / (gt0.powf(-2.0 / 3.0) + eps.powf(4.0 / 3.0) * ta.powf(2.0 / 3.0))
                        .powf(q / 2.0)
            } else {
                gt0 * eps * eps * ta
            }
        }
        SymbolCase::WaveSin3InvK => {
            let r = q;
            if r <= 2.0 {
                eps.powf((2.0 * r - 1.0) / 3.0) * ta.powf((r + 1.0) / 3.0)
                    / (gt0.powf(-1.0 / 3.0)
                        * (gt0.powf(-2.0 / 3.0) + eps.powf(4.0 / 3.0) * ta.powf(2.0 / 3.0))
                            .powf(r / 2.0))
            } else {
                gt0 * eps * ta
            }
        }
    };

    Ok(SymbolCheck { case, q_or_r, eps, t, grid_sup, formula_value, ratio: grid_sup / formula_value })
}

/// Multiplier variants for the synthesis-minus-modulation bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma1Variant {
    /// `ε^q (δ²+ε²)^{-q/2} χ_κ`: bound `C ε^{min(1,q)}`.
    Plain,
    /// `ε^r (δ²+ε²)^{-r/2} |δ|⁻¹ χ_κ`: bound `C ε^{min(0,r)}`.
    InverseK,
}

/// Random-trial check of the synthesis-vs-modulated-transform bound: for
/// band-limited test data v, measures
/// `‖(Υ - [φ_{k₀}] F⁻¹)[m_ε] v‖ / ‖v‖ / ε^{bound}` and returns the maximum
/// over trials. Uniform boundedness over an ε-sweep is the check.
pub fn lemma1_check(
    bundle: &EdgeBundle,
    q_or_r: f64,
    eps: f64,
    variant: Lemma1Variant,
    trials: usize,
    seed: u64,
) -> Result<f64, AnalysisError> {
    assert!(trials >= 1);
    match variant {
        Lemma1Variant::Plain if q_or_r < 0.0 => {
            return Err(AnalysisError::BadExponent { value: q_or_r, range: (0.0, f64::INFINITY) })
        }
        Lemma1Variant::InverseK if q_or_r < -1.0 => {
            return Err(AnalysisError::BadExponent { value: q_or_r, range: (-1.0, f64::INFINITY) })
        }
        _ => {}
    }
    let data = &bundle.data;
    let kappa = data.kappa;
    let plan = SynthesisPlan::new(bundle, eps);
    let grid = FieldGrid::commensurate(eps, 40.0, 16);
    let dk = grid.dk();
    // Test data band-limited to the admissible quasimomentum window.
    let k_lim = 0.95 * kappa.min(bundle.table.half_width()) / eps;
    let m_lim = ((k_lim / dk).floor() as i64).max(8);
    let n_modes = (2 * m_lim + 1) as usize;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = rand::distributions::Uniform::new(-1.0f64, 1.0);
    let bound = match variant {
        Lemma1Variant::Plain => q_or_r.min(1.0),
        Lemma1Variant::InverseK => q_or_r.min(0.0),
    };
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let mut amplitudes: Vec<C64> = (0..n_modes)
            .map(|_| C64::new(dist.sample(&mut rng), dist.sample(&mut rng)))
            .collect();
        let norm = (amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * dk).sqrt();
        for a in &mut amplitudes {
            *a /= norm;
        }
        let mut profile = SpectralProfile {
            dk,
            mode_min: -m_lim,
            amplitudes,
            sobolev_q: 0.0,
            hq_norm: 1.0,
            truncation_tail: 0.0,
            spatial_extent: 20.0,
        };
        // Apply the multiplier.
        for i in 0..profile.amplitudes.len() {
            let d = eps * profile.k_at(i);
            let m = if d.abs() > kappa {
                0.0
            } else {
                match variant {
                    Lemma1Variant::Plain => eps.powf(q_or_r) * (d * d + eps * eps).powf(-q_or_r / 2.0),
                    Lemma1Variant::InverseK => {
                        if d == 0.0 {
                            0.0
                        } else {
                            eps.powf(q_or_r) * (d * d + eps * eps).powf(-q_or_r / 2.0) / d.abs()
                        }
                    }
                }
            };
            profile.amplitudes[i] *= m;
        }
        let synth = synthesize(&plan, &profile, grid).map_err(DynError::Synth)?;
        let plain = inverse_transform(&profile, grid).map_err(DynError::Synth)?;
        let modulated = modulate_by_cell_function(
            &plain,
            &data.phi_k0,
            bundle.table.mode_halfwidth,
            data.condition.is_shifted(),
        );
        let diff = synth.l2_distance(&modulated).map_err(DynError::Synth)?;
        worst = worst.max(diff / eps.powf(bound));
    }
    Ok(worst)
}

/// One point of the order-sharpness probe.
#[derive(Debug, Clone, Copy)]
pub struct SharpnessPoint {
    pub eps: f64,
    pub error: f64,
    pub hq_norm: f64,
    /// `error / (ε ‖f‖_{H^{q'}})`.
    pub ratio: f64,
    pub k_hat: f64,
}

/// Probe the first-power sharpness: point profiles centred where the phase
/// mismatch `sin(½tε⁻²δ⁴γ)` reaches its first peak, i.e. at the
/// quasimomentum offset `δ̂ = (πε²/(|t||γ(k₀)|))^{1/4}` (physical frequency
/// `δ̂/ε`) — the same `ε^{1/2}|t|^{-1/4}` scale as the saturation radius of
/// the symbol bound. For q' < 2 the ratio `error/(ε‖f‖_{H^{q'}})` grows as ε
/// decreases; at q' = 2 it stays flat.
pub fn sharpness_probe(
    bundle: &EdgeBundle,
    q_prime: f64,
    t: f64,
    eps_list: &[f64],
    points_per_cell: usize,
) -> Result<Vec<SharpnessPoint>, AnalysisError> {
    let data = &bundle.data;
    if data.degenerate || t == 0.0 {
        return Err(AnalysisError::InadmissibleParameters { eps: 0.0, t, threshold: 0.0 });
    }
    let g0 = data.gamma_at_k0.abs();
    let mut out = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let delta_hat = (PI / (t.abs() * g0)).powf(0.25) * eps.sqrt();
        let window = bundle.table.half_width();
        if delta_hat >= window.min(PI) * 0.95 {
            return Err(AnalysisError::InadmissibleParameters { eps, t, threshold: window });
        }
        let k_hat = delta_hat / eps;
        let width = 0.01 * k_hat;
        let kind = ProfileKind::Point { center: k_hat, width };
        let plan = SynthesisPlan::new(bundle, eps);
        let probe = make_profile(kind, q_prime, 0.05);
        let grid = comparison_grid(&plan, &[&probe], t, points_per_cell, 64.0);
        let profile = make_profile(kind, q_prime, grid.dk());
        let spec = EvolutionSpec {
            equation: Equation::Schrodinger,
            plan,
            t,
            profile_f: &profile,
            profile_g: None,
        };
        let r = run_comparison(&spec, grid)?;
        out.push(SharpnessPoint {
            eps,
            error: r.error,
            hq_norm: profile.hq_norm,
            ratio: r.error / (eps * profile.hq_norm),
            k_hat,
        });
    }
    Ok(out)
}

/// Round-trip diagnostic used by tests: synthesize then analyze a profile and
/// return the relative amplitude recovery error.
pub fn round_trip_error(bundle: &EdgeBundle, eps: f64, profile: &SpectralProfile, grid: FieldGrid) -> f64 {
    let plan = SynthesisPlan::new(bundle, eps);
    let synth = synthesize(&plan, profile, grid).unwrap();
    let rec = bloch_coeff(&plan, &synth, profile.mode_min, profile.amplitudes.len()).unwrap();
    let mut err2 = 0.0;
    for (a, b) in profile.amplitudes.iter().zip(&rec) {
        err2 += (a - b).norm_sqr();
    }
    (err2 * profile.dk).sqrt() / profile.l2_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band_edge::{classify, Condition, EdgeBundle, EdgeOptions, EdgeSide, GapReport};
    use crate::cell_eig::{band_table, uniform_kgrid};
    use crate::coefficients::PeriodicCoefficients;

    fn cosine_bundle(cond: Condition) -> EdgeBundle {
        let c = PeriodicCoefficients::builtin("cosine").unwrap();
        let t = band_table(&c, &uniform_kgrid(33), 24, 3).unwrap();
        let reports = classify(&t, 1, 1e-6);
        let r = reports.into_iter().find(|r| r.condition == cond).unwrap();
        let opts = EdgeOptions { n_trunc: 24, n_points: 385, ..Default::default() };
        EdgeBundle::build(&c, &r, &opts).unwrap()
    }

    fn free_bundle() -> EdgeBundle {
        let c = PeriodicCoefficients::builtin("free").unwrap();
        let report = GapReport {
            s: 1,
            condition: Condition::Cond1,
            gap: None,
            k0: 0.0,
            edge_side: EdgeSide::Min,
        };
        let opts = EdgeOptions {
            n_trunc: 16,
            n_points: 257,
            allow_degenerate: true,
            ..Default::default()
        };
        EdgeBundle::build(&c, &report, &opts).unwrap()
    }

    #[test]
    fn free_sweep_is_null() {
        let bundle = free_bundle();
        let data = SweepData::position(ProfileKind::Bump { k_max: 2.0 }, 2.0);
        let r = epsilon_sweep(
            Equation::Schrodinger,
            &bundle,
            &data,
            1.0,
            &[1.0 / 16.0, 1.0 / 32.0],
            8,
            1.0,
        )
        .unwrap();
        assert!(r.fitted_slope.is_none());
        for p in &r.points {
            assert!(p.error < 1e-8, "ε={}: {}", p.eps, p.error);
            assert!(!p.admissible);
        }
    }

    #[test]
    fn lemma2_case1_q0_degenerates_to_one() {
        let bundle = cosine_bundle(Condition::Cond3);
        let chk =
            lemma2_check(SymbolCase::SchrodingerSin, 0.0, 1.0 / 64.0, 1.0, &bundle.data).unwrap();
        assert!((chk.grid_sup - 1.0).abs() < 1e-6, "sup {}", chk.grid_sup);
        assert!((chk.formula_value - 1.0).abs() < 1e-12);
        assert!((chk.ratio - 1.0).abs() < 1e-6);
    }

    #[test]
    fn lemma2_case1_ratio_in_proof_window() {
        let bundle = cosine_bundle(Condition::Cond3);
        for q in [1.0, 2.0, 4.0] {
            let chk =
                lemma2_check(SymbolCase::SchrodingerSin, q, 1.0 / 64.0, 1.0, &bundle.data)
                    .unwrap();
            assert!(
                chk.ratio >= 1.0 / 3.0 && chk.ratio <= 1.5 * PI,
                "q={q}: ratio {}",
                chk.ratio
            );
        }
    }

    #[test]
    fn lemma2_inadmissible_parameters_rejected() {
        let bundle = cosine_bundle(Condition::Cond1);
        // 𝔢 is small at the k₀=0 edge; ε = 0.5 is far outside.
        let r = lemma2_check(SymbolCase::SchrodingerSin, 2.0, 0.5, 1.0, &bundle.data);
        assert!(matches!(r, Err(AnalysisError::InadmissibleParameters { .. })));
    }

    #[test]
    fn lemma1_free_ratio_is_zero() {
        let bundle = free_bundle();
        let r = lemma1_check(&bundle, 1.0, 1.0 / 16.0, Lemma1Variant::Plain, 3, 7).unwrap();
        assert!(r < 1e-8, "free ratio {r}");
    }

    #[test]
    fn lemma1_cosine_bounded_over_eps() {
        let bundle = cosine_bundle(Condition::Cond1);
        let norm_bound = bundle.data.theta_mult_norm;
        let mut prev = 0.0f64;
        for &eps in &[1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0] {
            let r = lemma1_check(&bundle, 1.0, eps, Lemma1Variant::Plain, 5, 42).unwrap();
            // Uniform boundedness with a generous grid constant.
            assert!(r < 20.0 * (1.0 + norm_bound), "ε={eps}: ratio {r}");
            prev = prev.max(r);
        }
        assert!(prev > 0.0);
    }

    #[test]
    fn sharpness_ratio_grows_for_subcritical_regularity() {
        let bundle = cosine_bundle(Condition::Cond1);
        let pts = sharpness_probe(
            &bundle,
            1.0,
            1.0,
            &[1.0 / 16.0, 1.0 / 64.0, 1.0 / 256.0],
            8,
        )
        .unwrap();
        assert!(pts.last().unwrap().ratio > 2.0 * pts[0].ratio,
            "ratios: {:?}", pts.iter().map(|p| p.ratio).collect::<Vec<_>>());
    }
}
