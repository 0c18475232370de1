//! Gap classification and band-edge expansion data.
//!
//! Near a non-degenerate band edge `σ = E_s(k₀)`, `k₀ ∈ {0, π}`, the band
//! function and its square root expand as
//!
//! ```text
//! E(k)            = σ ± b (k-k₀)² + (k-k₀)⁴ γ(k),            b > 0,
//! |E(k) - σ|^1/2  = b^1/2 |k-k₀| ± |k-k₀|³ γ̃(k),
//! φ(x,k)          = φ_{k₀}(x) + (k-k₀) θ(x,k),
//! ```
//!
//! with the `+` sign at a band minimum (Conditions 1 and 4) and `-` at a band
//! maximum (Conditions 2 and 3). The admissible window radius κ is the
//! largest radius on which
//!
//! ```text
//! ½|γ(k₀)| ≤ |γ(k)| ≤ (3/2)|γ(k₀)|,
//! ½|γ̃(k₀)| ≤ |γ̃(k)| ≤ (3/2)|γ̃(k₀)|,
//! (k-k₀)² |γ̃(k)| ≤ ½ b^1/2,
//! ```
//!
//! and the admissibility thresholds are `𝔢 = (2π)^{-1/2}|γ(k₀)|^{1/2}κ²` and
//! `𝔢̃ = (2π)^{-1}|γ̃(k₀)|κ³`. The eigenfunction correction θ enters error
//! constants through the multiplier norm
//! `‖θ‖ = ess-sup_x ‖θ(x,·)‖_{C¹[k₀-κ, k₀+κ]}`, realized here as the sum of
//! the sup norms of θ and ∂_k θ over the tabulated window.

use crate::cell_eig::{
    align_phase, evaluate_fourier, fix_real_gauge, omega_lag, parallel_map, solve_at_k, BandTable,
    EigError,
};
use crate::coefficients::PeriodicCoefficients;
use crate::numeric::{polyfit, UniformInterpReal};
use crate::C64;
use std::f64::consts::PI;
use std::fmt;

/// The four band-edge configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// Odd `s`, gap below `E_s(0)`: left edge at k₀ = 0.
    Cond1,
    /// Even `s`, gap above `E_s(0)`: right edge at k₀ = 0.
    Cond2,
    /// Odd `s`, gap above `E_s(π)`: right edge at k₀ = π.
    Cond3,
    /// Even `s`, gap below `E_s(π)`: left edge at k₀ = π.
    Cond4,
}

/// Which side of the band the edge sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeSide {
    /// Band minimum (left gap edge seen from below the band).
    Min,
    /// Band maximum.
    Max,
}

impl Condition {
    pub fn k0(self) -> f64 {
        match self {
            Condition::Cond1 | Condition::Cond2 => 0.0,
            Condition::Cond3 | Condition::Cond4 => PI,
        }
    }

    /// The ± sign in the edge expansion: +1 at a minimum, -1 at a maximum.
    pub fn sign(self) -> f64 {
        match self {
            Condition::Cond1 | Condition::Cond4 => 1.0,
            Condition::Cond2 | Condition::Cond3 => -1.0,
        }
    }

    pub fn edge_side(self) -> EdgeSide {
        if self.sign() > 0.0 {
            EdgeSide::Min
        } else {
            EdgeSide::Max
        }
    }

    /// Synthesis at k₀ = π carries the extra `e^{iπx/ε}` modulation.
    pub fn is_shifted(self) -> bool {
        self.k0() > 0.0
    }

    /// Band parity required by the condition.
    pub fn band_is_odd(self) -> bool {
        matches!(self, Condition::Cond1 | Condition::Cond3)
    }

    pub fn name(self) -> &'static str {
        match self {
            Condition::Cond1 => "Cond1",
            Condition::Cond2 => "Cond2",
            Condition::Cond3 => "Cond3",
            Condition::Cond4 => "Cond4",
        }
    }

    pub fn parse(s: &str) -> Option<Condition> {
        match s {
            "Cond1" | "cond1" | "1" => Some(Condition::Cond1),
            "Cond2" | "cond2" | "2" => Some(Condition::Cond2),
            "Cond3" | "cond3" | "3" => Some(Condition::Cond3),
            "Cond4" | "cond4" | "4" => Some(Condition::Cond4),
            _ => None,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One classified gap adjacent to band `s`.
#[derive(Debug, Clone)]
pub struct GapReport {
    pub s: usize,
    pub condition: Condition,
    /// `(lower, upper)` energies of the gap; `None` marks the semi-infinite
    /// gap below the first band.
    pub gap: Option<(f64, f64)>,
    pub k0: f64,
    pub edge_side: EdgeSide,
}

impl GapReport {
    pub fn width(&self) -> f64 {
        self.gap.map_or(f64::INFINITY, |(lo, hi)| hi - lo)
    }
}

/// Evaluate the edge conditions of band `s` against its neighbors at k = 0
/// and k = π; reports every condition whose gap exceeds `gap_tolerance`.
/// Needs `table.l_max ≥ s+1`.
pub fn classify(table: &BandTable, s: usize, gap_tolerance: f64) -> Vec<GapReport> {
    assert!(s >= 1 && s < table.l_max, "classify needs the neighbor band s+1 in the table");
    let ik0 = table.kgrid.iter().position(|&k| k.abs() < 1e-12).unwrap();
    let ikp = table.kgrid.iter().position(|&k| (k - PI).abs() < 1e-12).unwrap();
    let e = |l: usize, ik: usize| table.energy(l, ik);
    let mut out = Vec::new();
    if s % 2 == 1 {
        // Cond1: gap below E_s(0) (semi-infinite for s = 1).
        if s == 1 {
            out.push(GapReport {
                s,
                condition: Condition::Cond1,
                gap: None,
                k0: 0.0,
                edge_side: EdgeSide::Min,
            });
        } else if e(s, ik0) - e(s - 1, ik0) > gap_tolerance {
            out.push(GapReport {
                s,
                condition: Condition::Cond1,
                gap: Some((e(s - 1, ik0), e(s, ik0))),
                k0: 0.0,
                edge_side: EdgeSide::Min,
            });
        }
        // Cond3: gap above E_s(π).
        if e(s + 1, ikp) - e(s, ikp) > gap_tolerance {
            out.push(GapReport {
                s,
                condition: Condition::Cond3,
                gap: Some((e(s, ikp), e(s + 1, ikp))),
                k0: PI,
                edge_side: EdgeSide::Max,
            });
        }
    } else {
        // Cond2: gap above E_s(0).
        if e(s + 1, ik0) - e(s, ik0) > gap_tolerance {
            out.push(GapReport {
                s,
                condition: Condition::Cond2,
                gap: Some((e(s, ik0), e(s + 1, ik0))),
                k0: 0.0,
                edge_side: EdgeSide::Max,
            });
        }
        // Cond4: gap below E_s(π).
        if e(s, ikp) - e(s - 1, ikp) > gap_tolerance {
            out.push(GapReport {
                s,
                condition: Condition::Cond4,
                gap: Some((e(s - 1, ikp), e(s, ikp))),
                k0: PI,
                edge_side: EdgeSide::Min,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum EdgeError {
    /// `|γ(k₀)|` below the degeneracy threshold (the improved-rate regime,
    /// which this crate detects but does not homogenize).
    DegenerateEdge { gamma0: f64, threshold: f64 },
    /// The marching gauge jumped (neighbor overlap below 0.9).
    GaugeBreak { k: f64, overlap: f64 },
    /// No grid radius satisfies the three window inequalities.
    NoAdmissibleKappa,
    /// The extracted curvature has the wrong sign for the condition.
    NotAnEdge { d2: f64 },
    /// `classify` did not report the requested condition for this band.
    ConditionNotFound { s: usize, condition: Condition },
    Eig(EigError),
}

impl fmt::Display for EdgeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeError::DegenerateEdge { gamma0, threshold } => write!(
                f,
                "degenerate edge: |γ(k₀)| = {gamma0:.3e} < {threshold:.3e} (higher-order case not homogenized)"
            ),
            EdgeError::GaugeBreak { k, overlap } => {
                write!(f, "gauge break near k = {k}: neighbor overlap {overlap:.4}")
            }
            EdgeError::NoAdmissibleKappa => {
                write!(f, "no admissible κ: window inequalities fail at the smallest grid radius")
            }
            EdgeError::NotAnEdge { d2 } => {
                write!(f, "edge curvature has the wrong sign (E'' = {d2:.3e})")
            }
            EdgeError::ConditionNotFound { s, condition } => {
                write!(f, "band {s} has no gap satisfying {condition}")
            }
            EdgeError::Eig(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for EdgeError {}

impl From<EigError> for EdgeError {
    fn from(e: EigError) -> Self {
        EdgeError::Eig(e)
    }
}

/// Options for edge extraction.
#[derive(Debug, Clone)]
pub struct EdgeOptions {
    /// Galerkin truncation for the refined solves.
    pub n_trunc: usize,
    /// Half-width of the refined window around k₀ (must exceed any
    /// quasimomentum the synthesis will use).
    pub half_width: f64,
    /// Number of refined grid points (odd).
    pub n_points: usize,
    /// Upper cap for the κ search.
    pub kappa_cap: f64,
    /// Cell sample count for the tabulated θ(x,k).
    pub x_points: usize,
    /// `|γ(k₀)| < degeneracy_threshold·(1+|σ|)` triggers `DegenerateEdge`.
    pub degeneracy_threshold: f64,
    /// Keep going on a degenerate edge (γ ≈ 0): κ is set to the cap and the
    /// admissibility thresholds to 0. Used by the free-operator null runs.
    pub allow_degenerate: bool,
    /// Grid steps around k₀ excluded from the raw γ ratio (the quartic fit
    /// fills them); guards the δ⁻⁴ division against eigenvalue roundoff.
    pub guard_steps: usize,
}

impl Default for EdgeOptions {
    fn default() -> Self {
        EdgeOptions {
            n_trunc: 64,
            half_width: 0.98 * PI,
            n_points: 769,
            kappa_cap: 0.9 * PI,
            x_points: 256,
            degeneracy_threshold: 1e-8,
            allow_degenerate: false,
            guard_steps: 6,
        }
    }
}

/// Refined single-band table on a uniform window around the edge, with the
/// gauge anchored at k₀ (real representative) and marched outward.
#[derive(Debug, Clone)]
pub struct EdgeTable {
    pub band: usize,
    pub center: f64,
    pub kgrid: Vec<f64>,
    pub energies: Vec<f64>,
    /// u-variable Fourier coefficients per grid point.
    pub eigvecs: Vec<Vec<C64>>,
    pub mode_halfwidth: usize,
    pub n_trunc: usize,
}

impl EdgeTable {
    /// Solve the cell problem on the window `center ± half_width` (unfolded
    /// quasimomenta) and gauge-fix band `band`.
    pub fn build(
        coeffs: &PeriodicCoefficients,
        band: usize,
        center: f64,
        half_width: f64,
        n_points: usize,
        n_trunc: usize,
    ) -> Result<Self, EdgeError> {
        assert!(n_points >= 33 && n_points % 2 == 1, "need an odd refined grid");
        let half = (n_points - 1) / 2;
        let h = half_width / half as f64;
        let kgrid: Vec<f64> =
            (0..n_points).map(|i| center + (i as i64 - half as i64) as f64 * h).collect();

        let lag = omega_lag(coeffs, n_trunc);
        let omega_hat = coeffs.omega_hat(lag);
        let results = parallel_map(&kgrid, |&k| {
            solve_at_k(coeffs, k, n_trunc, band, &omega_hat, lag, false)
        });
        let mut energies = Vec::with_capacity(n_points);
        let mut eigvecs = Vec::with_capacity(n_points);
        for r in results {
            let (vals, mut us) = r?;
            energies.push(vals[band - 1]);
            eigvecs.push(us.swap_remove(band - 1));
        }

        let hw = n_trunc + lag;
        let at_pi = (center - PI).abs() < 1e-9;
        fix_real_gauge(&mut eigvecs[half], hw, at_pi);
        for i in (half + 1)..n_points {
            let (before, after) = eigvecs.split_at_mut(i);
            let overlap = align_phase(&before[i - 1], &mut after[0]);
            if overlap < 0.9 {
                return Err(EdgeError::GaugeBreak { k: kgrid[i], overlap });
            }
        }
        for i in (0..half).rev() {
            let (before, after) = eigvecs.split_at_mut(i + 1);
            let overlap = align_phase(&after[0], &mut before[i]);
            if overlap < 0.9 {
                return Err(EdgeError::GaugeBreak { k: kgrid[i], overlap });
            }
        }

        Ok(EdgeTable { band, center, kgrid, energies, eigvecs, mode_halfwidth: hw, n_trunc })
    }

    pub fn spacing(&self) -> f64 {
        self.kgrid[1] - self.kgrid[0]
    }

    pub fn half_width(&self) -> f64 {
        self.kgrid[self.kgrid.len() - 1] - self.center
    }

    /// Band energy at an arbitrary window quasimomentum (degree-5 local
    /// interpolation; exact at grid points up to roundoff).
    pub fn energy_at(&self, q: f64) -> f64 {
        let it = UniformInterpReal { x0: self.kgrid[0], h: self.spacing(), values: &self.energies };
        it.eval(q, 6)
    }

    /// Gauge-fixed eigenvector coefficients at an arbitrary window
    /// quasimomentum (coefficient-wise cubic interpolation).
    pub fn eigvec_at(&self, q: f64) -> Vec<C64> {
        let n = self.kgrid.len();
        let h = self.spacing();
        let pos = (q - self.kgrid[0]) / h;
        let start = ((pos - 1.5).round() as i64).clamp(0, (n - 4) as i64) as usize;
        let mut weights = [0.0f64; 4];
        for (j, w) in weights.iter_mut().enumerate() {
            let xj = (start + j) as f64;
            let mut acc = 1.0;
            for m in 0..4 {
                if m != j {
                    let xm = (start + m) as f64;
                    acc *= (pos - xm) / (xj - xm);
                }
            }
            *w = acc;
        }
        let nm = self.eigvecs[0].len();
        let mut out = vec![C64::new(0.0, 0.0); nm];
        for (j, &wj) in weights.iter().enumerate() {
            let col = &self.eigvecs[start + j];
            for (o, c) in out.iter_mut().zip(col.iter()) {
                *o += c * wj;
            }
        }
        out
    }

    /// Physical-space samples of the edge amplitude φ_{k₀} on the cell.
    pub fn phi_center_samples(&self, xgrid: &[f64]) -> Vec<C64> {
        let half = (self.kgrid.len() - 1) / 2;
        evaluate_fourier(&self.eigvecs[half], self.mode_halfwidth, xgrid)
    }
}

/// The band-edge expansion data for one classified gap edge.
#[derive(Debug, Clone)]
pub struct BandEdgeData {
    pub s: usize,
    pub condition: Condition,
    pub k0: f64,
    /// +1 (minimum) or -1 (maximum).
    pub sign: f64,
    /// Edge energy σ = E_s(k₀).
    pub sigma: f64,
    /// Half-curvature b > 0.
    pub b: f64,
    /// γ(k) on the refined grid.
    pub gamma: Vec<f64>,
    pub gamma_at_k0: f64,
    /// γ̃(k) on the refined grid.
    pub gamma_tilde: Vec<f64>,
    pub gamma_tilde_at_k0: f64,
    /// The refined quasimomentum grid carrying γ, γ̃ and θ.
    pub kgrid: Vec<f64>,
    /// u-variable Fourier coefficients of φ_{k₀}.
    pub phi_k0: Vec<C64>,
    /// θ(x,k) on `theta_xgrid × kgrid`.
    pub theta: Vec<Vec<C64>>,
    pub theta_xgrid: Vec<f64>,
    /// Admissible window radius.
    pub kappa: f64,
    /// `ess-sup_x (sup_k|θ| + sup_k|∂_k θ|)` over `|k-k₀| ≤ κ`.
    pub theta_mult_norm: f64,
    /// Schrödinger admissibility threshold 𝔢.
    pub frak_e: f64,
    /// Wave admissibility threshold 𝔢̃.
    pub frak_e_tilde: f64,
    /// γ(k₀) fell below the degeneracy threshold.
    pub degenerate: bool,
}

/// Energy-only edge data extracted from a tabulated band curve. Split out so
/// synthetic dispersion tables can exercise the γ/κ machinery directly.
#[derive(Debug, Clone)]
pub struct EdgeEnergyData {
    pub sigma: f64,
    pub b: f64,
    pub gamma: Vec<f64>,
    pub gamma_at_k0: f64,
    pub gamma_tilde: Vec<f64>,
    pub gamma_tilde_at_k0: f64,
    pub kappa: f64,
    pub frak_e: f64,
    pub frak_e_tilde: f64,
    pub degenerate: bool,
}

/// Extract σ, b, γ, γ̃ and κ from a uniform band-energy table around `k0`.
///
/// `sign` is +1 for a minimum and -1 for a maximum. The κ search is a
/// decreasing scan over grid radii up to `kappa_cap`.
#[allow(clippy::too_many_arguments)]
pub fn extract_energy_curve(
    kgrid: &[f64],
    energies: &[f64],
    k0: f64,
    sign: f64,
    kappa_cap: f64,
    degeneracy_threshold: f64,
    allow_degenerate: bool,
    guard_steps: usize,
) -> Result<EdgeEnergyData, EdgeError> {
    let n = kgrid.len();
    assert!(n >= 33 && n % 2 == 1 && energies.len() == n);
    let ic = (n - 1) / 2;
    assert!((kgrid[ic] - k0).abs() < 1e-12, "k0 must be the window center");
    let h = kgrid[1] - kgrid[0];
    let sigma = energies[ic];

    // Half-curvature by 5-point stencils at two strides, Richardson-combined.
    let stride = ((0.05 / h).round() as usize).clamp(1, (ic / 4).max(1));
    let d2_at = |m: usize| -> f64 {
        let e = |off: i64| energies[(ic as i64 + off) as usize];
        let mh = m as f64 * h;
        (-e(2 * m as i64) + 16.0 * e(m as i64) - 30.0 * e(0) + 16.0 * e(-(m as i64))
            - e(-2 * m as i64))
            / (12.0 * mh * mh)
    };
    let d2 = (16.0 * d2_at(stride) - d2_at(2 * stride)) / 15.0;
    let b = sign * d2 / 2.0;
    if b <= 0.0 || !b.is_finite() {
        return Err(EdgeError::NotAnEdge { d2 });
    }
    let sqrt_b = b.sqrt();

    // Raw γ and γ̃ away from the center.
    let mut gamma = vec![0.0; n];
    let mut gamma_tilde = vec![0.0; n];
    for i in 0..n {
        if i == ic {
            continue;
        }
        let d = kgrid[i] - k0;
        let diff = energies[i] - sigma;
        gamma[i] = (diff - sign * b * d * d) / d.powi(4);
        let root = (sign * diff).max(0.0).sqrt();
        gamma_tilde[i] = sign * (root - sqrt_b * d.abs()) / d.abs().powi(3);
    }

    // γ(k₀): quartic least-squares fit on the 8 nearest points outside the
    // guard zone (the raw ratio within `guard_steps` of k₀ is dominated by
    // eigenvalue roundoff amplified by the δ⁻⁴ division).
    let g = guard_steps.max(1).min(ic / 2);
    let fit_idx: Vec<usize> = (0..4).flat_map(|j| [ic - g - j, ic + g + j]).collect();
    let xs: Vec<f64> = fit_idx.iter().map(|&i| kgrid[i] - k0).collect();
    let ys_g: Vec<f64> = fit_idx.iter().map(|&i| gamma[i]).collect();
    let fit_g = polyfit(&xs, &ys_g, 4);
    let gamma_at_k0 = fit_g[0];
    gamma[ic] = gamma_at_k0;
    // Removable singularity: γ̃(k₀) = γ(k₀) / (2√b).
    let gamma_tilde_at_k0 = gamma_at_k0 / (2.0 * sqrt_b);
    gamma_tilde[ic] = gamma_tilde_at_k0;

    let threshold = degeneracy_threshold * (1.0 + sigma.abs());
    let degenerate = gamma_at_k0.abs() < threshold;
    if degenerate && !allow_degenerate {
        return Err(EdgeError::DegenerateEdge { gamma0: gamma_at_k0.abs(), threshold });
    }

    let (kappa, frak_e, frak_e_tilde) = if degenerate {
        (kappa_cap.min((ic as f64) * h), 0.0, 0.0)
    } else {
        let kappa = select_kappa(
            kgrid,
            &gamma,
            &gamma_tilde,
            gamma_at_k0,
            gamma_tilde_at_k0,
            b,
            k0,
            kappa_cap,
            g,
        )?;
        let fe = (2.0 * PI).sqrt().recip() * gamma_at_k0.abs().sqrt() * kappa * kappa;
        let fet = (2.0 * PI).recip() * gamma_tilde_at_k0.abs() * kappa.powi(3);
        (kappa, fe, fet)
    };

    Ok(EdgeEnergyData {
        sigma,
        b,
        gamma,
        gamma_at_k0,
        gamma_tilde,
        gamma_tilde_at_k0,
        kappa,
        frak_e,
        frak_e_tilde,
        degenerate,
    })
}

/// Largest grid-representable radius κ ≤ `kappa_cap` on which the three
/// window inequalities hold at every tabulated point, found by a decreasing
/// scan over grid radii. Points within `guard_steps` of k₀ are vouched for
/// by the fitted γ(k₀) (their raw ratios carry the δ⁻⁴-amplified eigenvalue
/// roundoff).
#[allow(clippy::too_many_arguments)]
pub fn select_kappa(
    kgrid: &[f64],
    gamma: &[f64],
    gamma_tilde: &[f64],
    gamma_at_k0: f64,
    gamma_tilde_at_k0: f64,
    b: f64,
    k0: f64,
    kappa_cap: f64,
    guard_steps: usize,
) -> Result<f64, EdgeError> {
    let n = kgrid.len();
    let ic = (n - 1) / 2;
    let h = kgrid[1] - kgrid[0];
    let sqrt_b = b.sqrt();
    let admissible = |i: usize| -> bool {
        if i.abs_diff(ic) < guard_steps {
            return true;
        }
        let d = kgrid[i] - k0;
        let ga = gamma[i].abs();
        let ta = gamma_tilde[i].abs();
        ga >= 0.5 * gamma_at_k0.abs()
            && ga <= 1.5 * gamma_at_k0.abs()
            && ta >= 0.5 * gamma_tilde_at_k0.abs()
            && ta <= 1.5 * gamma_tilde_at_k0.abs()
            && d * d * ta <= 0.5 * sqrt_b
    };
    let j_max = ((kappa_cap / h).floor() as usize).min(ic);
    'scan: for j in (1..=j_max).rev() {
        for i in (ic - j)..=(ic + j) {
            if !admissible(i) {
                continue 'scan;
            }
        }
        // A radius wholly inside the guard zone certifies nothing: the grid
        // is too coarse to resolve the window.
        if j < guard_steps {
            break;
        }
        return Ok(j as f64 * h);
    }
    Err(EdgeError::NoAdmissibleKappa)
}

/// A refined edge table together with its extracted expansion data; the unit
/// consumed by synthesis and dynamics.
#[derive(Debug, Clone)]
pub struct EdgeBundle {
    pub coeffs: PeriodicCoefficients,
    pub table: EdgeTable,
    pub data: BandEdgeData,
}

impl EdgeBundle {
    /// Build the refined table for `report` and extract the edge data.
    pub fn build(
        coeffs: &PeriodicCoefficients,
        report: &GapReport,
        opts: &EdgeOptions,
    ) -> Result<Self, EdgeError> {
        let table = EdgeTable::build(
            coeffs,
            report.s,
            report.k0,
            opts.half_width,
            opts.n_points,
            opts.n_trunc,
        )?;
        let data = extract_edge(&table, report, opts)?;
        Ok(EdgeBundle { coeffs: coeffs.clone(), table, data })
    }
}

/// Extract the full edge data (energies plus eigenfunction correction) from a
/// refined table.
pub fn extract_edge(
    table: &EdgeTable,
    report: &GapReport,
    opts: &EdgeOptions,
) -> Result<BandEdgeData, EdgeError> {
    assert_eq!(table.band, report.s, "table and report disagree on the band");
    assert!((table.center - report.k0).abs() < 1e-12, "table must be centered at k0");
    let sign = report.condition.sign();
    let energy = extract_energy_curve(
        &table.kgrid,
        &table.energies,
        report.k0,
        sign,
        opts.kappa_cap,
        opts.degeneracy_threshold,
        opts.allow_degenerate,
        opts.guard_steps,
    )?;

    let n = table.kgrid.len();
    let ic = (n - 1) / 2;
    let h = table.spacing();
    let xgrid: Vec<f64> = (0..opts.x_points).map(|i| i as f64 / opts.x_points as f64).collect();

    // θ(x,k) = (φ(x,k) - φ_{k₀}(x)) / (k - k₀); the k₀ column is the centered
    // k-derivative of φ.
    let phi_k0 = table.eigvecs[ic].clone();
    let theta_cols = parallel_map(&(0..n).collect::<Vec<_>>(), |&i| {
        let mut diff: Vec<C64>;
        let scale;
        if i == ic {
            diff = table.eigvecs[ic + 1].clone();
            for (d, c) in diff.iter_mut().zip(table.eigvecs[ic - 1].iter()) {
                *d -= c;
            }
            scale = 1.0 / (2.0 * h);
        } else {
            diff = table.eigvecs[i].clone();
            for (d, c) in diff.iter_mut().zip(phi_k0.iter()) {
                *d -= c;
            }
            scale = 1.0 / (table.kgrid[i] - report.k0);
        }
        for d in diff.iter_mut() {
            *d *= scale;
        }
        evaluate_fourier(&diff, table.mode_halfwidth, &xgrid)
    });
    // theta[ix][ik]
    let mut theta = vec![vec![C64::new(0.0, 0.0); n]; opts.x_points];
    for (ik, col) in theta_cols.iter().enumerate() {
        for (ix, v) in col.iter().enumerate() {
            theta[ix][ik] = *v;
        }
    }

    let mut data = BandEdgeData {
        s: report.s,
        condition: report.condition,
        k0: report.k0,
        sign,
        sigma: energy.sigma,
        b: energy.b,
        gamma: energy.gamma,
        gamma_at_k0: energy.gamma_at_k0,
        gamma_tilde: energy.gamma_tilde,
        gamma_tilde_at_k0: energy.gamma_tilde_at_k0,
        kgrid: table.kgrid.clone(),
        phi_k0,
        theta,
        theta_xgrid: xgrid,
        kappa: energy.kappa,
        theta_mult_norm: 0.0,
        frak_e: energy.frak_e,
        frak_e_tilde: energy.frak_e_tilde,
        degenerate: energy.degenerate,
    };
    data.theta_mult_norm = multiplier_norm_on(&data.theta, &table.kgrid, report.k0, data.kappa, h);
    Ok(data)
}

impl BandEdgeData {
    /// γ(k) by cubic interpolation of the tabulated values.
    pub fn gamma_at(&self, k: f64) -> f64 {
        let h = self.kgrid[1] - self.kgrid[0];
        UniformInterpReal { x0: self.kgrid[0], h, values: &self.gamma }.eval(k, 4)
    }

    /// γ̃(k) by cubic interpolation of the tabulated values.
    pub fn gamma_tilde_at(&self, k: f64) -> f64 {
        let h = self.kgrid[1] - self.kgrid[0];
        UniformInterpReal { x0: self.kgrid[0], h, values: &self.gamma_tilde }.eval(k, 4)
    }

    /// Schrödinger admissibility: `0 < ε|t|^{-1/2} ≤ 𝔢`.
    pub fn schrodinger_admissible(&self, eps: f64, t: f64) -> bool {
        t != 0.0 && eps > 0.0 && eps / t.abs().sqrt() <= self.frak_e
    }

    /// Wave admissibility: `0 < ε|t|^{-1} ≤ 𝔢̃`.
    pub fn wave_admissible(&self, eps: f64, t: f64) -> bool {
        t != 0.0 && eps > 0.0 && eps / t.abs() <= self.frak_e_tilde
    }
}

/// `max_x (sup_k |θ(x,k)| + sup_k |∂_k θ(x,k)|)` over `|k-k₀| ≤ κ`,
/// with ∂_k by centered differences (one-sided at the window ends).
pub fn multiplier_norm_on(
    theta: &[Vec<C64>],
    kgrid: &[f64],
    k0: f64,
    kappa: f64,
    h: f64,
) -> f64 {
    let n = kgrid.len();
    let in_window: Vec<usize> =
        (0..n).filter(|&i| (kgrid[i] - k0).abs() <= kappa + 1e-12).collect();
    let mut best = 0.0f64;
    for row in theta {
        let mut sup = 0.0f64;
        let mut sup_d = 0.0f64;
        for &i in &in_window {
            sup = sup.max(row[i].norm());
            let d = if i == 0 {
                (row[1] - row[0]) / h
            } else if i == n - 1 {
                (row[n - 1] - row[n - 2]) / h
            } else {
                (row[i + 1] - row[i - 1]) / (2.0 * h)
            };
            sup_d = sup_d.max(d.norm());
        }
        best = best.max(sup + sup_d);
    }
    best
}

/// Convenience: classify band `s` of `table`, pick the requested condition,
/// and build the bundle.
pub fn bundle_for_condition(
    coeffs: &PeriodicCoefficients,
    table: &BandTable,
    s: usize,
    condition: Condition,
    gap_tolerance: f64,
    opts: &EdgeOptions,
) -> Result<EdgeBundle, EdgeError> {
    let reports = classify(table, s, gap_tolerance);
    let report = reports
        .into_iter()
        .find(|r| r.condition == condition)
        .ok_or(EdgeError::ConditionNotFound { s, condition })?;
    EdgeBundle::build(coeffs, &report, opts)
}
