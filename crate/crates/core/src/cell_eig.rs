//! The quasimomentum-parametrized cell eigenproblem `A(k)` and band tables.
//!
//! `A(k)` is generated by the sesquilinear form
//!
//! ```text
//! a(k)[u,u] = ∫₀¹ g(x) |φ' + ikφ|² dx,      φ = ω⁻¹u,   g = ω²ǧ,
//! ```
//!
//! discretized by Fourier-Galerkin in the φ-variable with plane waves
//! `e^{2πinx}`, `n = -N..N`. The stiffness entry is
//! `(2πm+k)(2πn+k)·ĝ_{m-n}` and the gram matrix is the Galerkin matrix of
//! `∫ ω² φ ψ̄`, giving a generalized Hermitian eigenproblem solved by
//! Cholesky congruence plus a dense Hermitian eigensolver. Eigenvectors are
//! converted back to the u-variable (multiplication by ω) and normalized in
//! `L₂(0,1)`; those are the Bloch amplitudes `φ_l(x,k)` whose carrier waves
//! are `e^{ikx}φ_l(x,k)`.

use crate::coefficients::PeriodicCoefficients;
use crate::C64;
use nalgebra::DMatrix;
use std::f64::consts::PI;
use std::fmt;

/// Relative residual bar for every accepted eigenpair.
pub const EIG_RESIDUAL_TOL: f64 = 1e-8;

/// Two eigenvalues closer than `DEGENERACY_TOL·(1+|λ|)` are treated as a
/// touching pair and rotated onto analytic branches.
const DEGENERACY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub enum EigError {
    /// The dense eigensolver failed or a residual exceeded the bar.
    EigFailure { k: f64, detail: String },
    /// A requested quasimomentum is not a grid point of the table.
    KNotInGrid(f64),
}

impl fmt::Display for EigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigError::EigFailure { k, detail } => write!(f, "eigensolve failed at k={k}: {detail}"),
            EigError::KNotInGrid(k) => write!(f, "k={k} is not a grid point of the band table"),
        }
    }
}

impl std::error::Error for EigError {}

/// Fold a quasimomentum into the central zone `(-π, π]`.
pub fn fold_to_zone(k: f64) -> f64 {
    let mut kf = k.rem_euclid(2.0 * PI);
    if kf > PI {
        kf -= 2.0 * PI;
    }
    kf
}

/// Assembled Galerkin matrices of `A(k)` at one quasimomentum.
#[derive(Debug, Clone)]
pub struct CellOperator {
    pub k: f64,
    pub n_trunc: usize,
    /// Galerkin matrix of the form `a(k)` in the φ-variable plane-wave basis.
    pub stiffness: DMatrix<C64>,
    /// Galerkin matrix of `∫ ω² φ ψ̄` (Hermitian positive definite).
    pub gram: DMatrix<C64>,
}

/// Assemble `A(k)`, folding `k` into `(-π, π]` first.
pub fn assemble(coeffs: &PeriodicCoefficients, k: f64, n_trunc: usize) -> CellOperator {
    assemble_raw(coeffs, fold_to_zone(k), n_trunc)
}

/// Assemble `A(k)` at the given quasimomentum without zone folding.
/// (The spectrum is 2π-periodic in `k`; the unfolded form keeps eigenvector
/// mode labels continuous across the zone boundary, which the band-edge
/// window at k₀ = π relies on.)
pub fn assemble_raw(coeffs: &PeriodicCoefficients, k: f64, n_trunc: usize) -> CellOperator {
    assert!(n_trunc >= 8, "truncation too small");
    let nn = 2 * n_trunc + 1;
    let g_hat = coeffs.g_hat(2 * n_trunc);
    let w2_hat = coeffs.omega_sq_hat(2 * n_trunc);
    let lag0 = 2 * n_trunc as i64;
    let mut stiffness = DMatrix::<C64>::zeros(nn, nn);
    let mut gram = DMatrix::<C64>::zeros(nn, nn);
    for i in 0..nn {
        let m = i as i64 - n_trunc as i64;
        let wm = 2.0 * PI * m as f64 + k;
        for j in 0..nn {
            let n = j as i64 - n_trunc as i64;
            let wn = 2.0 * PI * n as f64 + k;
            let lag = (m - n + lag0) as usize;
            stiffness[(i, j)] = g_hat[lag] * (wm * wn);
            gram[(i, j)] = w2_hat[lag];
        }
    }
    CellOperator { k, n_trunc, stiffness, gram }
}

/// k-derivative of the stiffness matrix, used to split touching bands onto
/// analytic branches (Hellmann-Feynman slopes).
fn stiffness_k_derivative(coeffs: &PeriodicCoefficients, k: f64, n_trunc: usize) -> DMatrix<C64> {
    let nn = 2 * n_trunc + 1;
    let g_hat = coeffs.g_hat(2 * n_trunc);
    let lag0 = 2 * n_trunc as i64;
    let mut d = DMatrix::<C64>::zeros(nn, nn);
    for i in 0..nn {
        let m = i as i64 - n_trunc as i64;
        let wm = 2.0 * PI * m as f64 + k;
        for j in 0..nn {
            let n = j as i64 - n_trunc as i64;
            let wn = 2.0 * PI * n as f64 + k;
            let lag = (m - n + lag0) as usize;
            d[(i, j)] = g_hat[lag] * (wm + wn);
        }
    }
    d
}

/// Result of a generalized Hermitian eigensolve: ascending eigenvalues with
/// gram-orthonormal eigenvectors (columns, in the φ-variable basis).
#[derive(Debug, Clone)]
pub struct HermitianEigResult {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

/// Solve the generalized problem `S v = λ M v` and keep the lowest `l_max`
/// pairs. Eigenvectors satisfy `vᴴ M v = 1` and the residual bar
/// `‖Sv - λMv‖ ≤ 1e-8·(1+|λ|)`.
pub fn solve_bands(op: &CellOperator, l_max: usize) -> Result<HermitianEigResult, EigError> {
    let nn = 2 * op.n_trunc + 1;
    assert!(l_max >= 1 && l_max <= nn, "l_max out of range");
    let chol = op.gram.clone().cholesky().ok_or_else(|| EigError::EigFailure {
        k: op.k,
        detail: "gram matrix is not positive definite".into(),
    })?;
    let l = chol.l();
    // B = L⁻¹ S L⁻ᴴ
    let mut y = op.stiffness.clone();
    l.solve_lower_triangular_mut(&mut y);
    let mut z = y.adjoint();
    l.solve_lower_triangular_mut(&mut z);
    let b = z.adjoint();
    let se = b.symmetric_eigen();

    let mut order: Vec<usize> = (0..nn).collect();
    order.sort_by(|&a, &c| se.eigenvalues[a].partial_cmp(&se.eigenvalues[c]).unwrap());

    let mut values = Vec::with_capacity(l_max);
    let mut vectors = DMatrix::<C64>::zeros(nn, l_max);
    for (col, &idx) in order.iter().take(l_max).enumerate() {
        let lam = se.eigenvalues[idx];
        values.push(lam);
        let mut v = se.eigenvectors.column(idx).clone_owned();
        l.adjoint().solve_upper_triangular_mut(&mut v);
        // w orthonormal => v is gram-orthonormal; renormalize against roundoff.
        let g = (v.adjoint() * &op.gram * &v)[(0, 0)].re;
        v /= C64::new(g.sqrt(), 0.0);
        vectors.set_column(col, &v);
    }

    for (col, &lam) in values.iter().enumerate() {
        let v = vectors.column(col);
        let res = (&op.stiffness * v - &op.gram * v * C64::new(lam, 0.0)).norm();
        if res > EIG_RESIDUAL_TOL * (1.0 + lam.abs()) {
            return Err(EigError::EigFailure {
                k: op.k,
                detail: format!("residual {res:.3e} exceeds bar for λ={lam:.6e}"),
            });
        }
    }
    Ok(HermitianEigResult { values, vectors })
}

/// Closed-form free band functions `E°_l(k)` on `|k| ≤ π`:
/// `E°₁ = k²`, `E°_{2j} = (2πj - |k|)²`, `E°_{2j+1} = (2πj + |k|)²`.
pub fn free_band(l: usize, k: f64) -> f64 {
    assert!(l >= 1 && k.abs() <= PI + 1e-12);
    if l == 1 {
        return k * k;
    }
    let j = (l / 2) as f64;
    if l.is_multiple_of(2) {
        (2.0 * PI * j - k.abs()).powi(2)
    } else {
        (2.0 * PI * j + k.abs()).powi(2)
    }
}

/// Band energies and gauge-fixed Bloch eigenvectors on a quasimomentum grid.
///
/// Eigenvectors are stored as Fourier coefficients of the u-variable
/// amplitude `φ_l(·,k)` on modes `-mode_halfwidth..=mode_halfwidth`,
/// normalized in `L₂(0,1)`. The gauge anchor is k = 0: there the amplitude is
/// real (with a fixed sign), and the phase marches outward so that
/// consecutive overlaps `⟨φ_l(·,k_i), φ_l(·,k_{i+1})⟩` are real positive.
#[derive(Debug, Clone)]
pub struct BandTable {
    pub kgrid: Vec<f64>,
    /// `energies[ik][l-1]`
    pub energies: Vec<Vec<f64>>,
    /// `eigvecs[ik][l-1][mode]`
    pub eigvecs: Vec<Vec<Vec<C64>>>,
    pub n_trunc: usize,
    pub mode_halfwidth: usize,
    pub l_max: usize,
}

impl BandTable {
    pub fn energy(&self, l: usize, ik: usize) -> f64 {
        self.energies[ik][l - 1]
    }

    fn grid_index(&self, k: f64) -> Result<usize, EigError> {
        self.kgrid
            .iter()
            .position(|&kk| (kk - k).abs() < 1e-12)
            .ok_or(EigError::KNotInGrid(k))
    }

    /// Physical-space samples of the cell amplitude `φ_l(·,k)` at a grid `k`.
    pub fn evaluate_bloch(&self, l: usize, k: f64, xgrid: &[f64]) -> Result<Vec<C64>, EigError> {
        let ik = self.grid_index(k)?;
        let coeffs = &self.eigvecs[ik][l - 1];
        Ok(evaluate_fourier(coeffs, self.mode_halfwidth, xgrid))
    }
}

/// Evaluate a Fourier series with coefficients on modes `-hw..=hw` at the
/// given cell points.
pub fn evaluate_fourier(coeffs: &[C64], hw: usize, xgrid: &[f64]) -> Vec<C64> {
    xgrid
        .iter()
        .map(|&x| {
            let mut acc = C64::new(0.0, 0.0);
            for (i, c) in coeffs.iter().enumerate() {
                let n = i as i64 - hw as i64;
                let ph = 2.0 * PI * n as f64 * x;
                acc += c * C64::new(ph.cos(), ph.sin());
            }
            acc
        })
        .collect()
}

/// Convert a φ-variable eigenvector to u-variable Fourier coefficients
/// (`u = ωφ`, a convolution with ω̂), normalized in `L₂(0,1)`.
pub(crate) fn phi_to_u(
    phi: &[C64],
    n_trunc: usize,
    omega_hat: &[C64],
    omega_lag: usize,
) -> Vec<C64> {
    let hw = n_trunc + omega_lag;
    let mut u = vec![C64::new(0.0, 0.0); 2 * hw + 1];
    for (i, &c) in phi.iter().enumerate() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let n = i as i64 - n_trunc as i64;
        for (j, &w) in omega_hat.iter().enumerate() {
            let p = j as i64 - omega_lag as i64;
            let m = n + p;
            u[(m + hw as i64) as usize] += w * c;
        }
    }
    let norm = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in &mut u {
        *c /= norm;
    }
    u
}

/// Width of the ω̂ stencil actually needed (coefficients below 1e-15 dropped).
pub(crate) fn omega_lag(coeffs: &PeriodicCoefficients, cap: usize) -> usize {
    let what = coeffs.omega_hat(cap);
    let mut lag = 0;
    for (j, c) in what.iter().enumerate() {
        if c.norm() > 1e-15 {
            lag = lag.max((j as i64 - cap as i64).unsigned_abs() as usize);
        }
    }
    lag
}

/// Unit phase factor that makes `⟨reference, v⟩` real positive.
pub(crate) fn align_phase(reference: &[C64], v: &mut [C64]) -> f64 {
    let mut ip = C64::new(0.0, 0.0);
    for (a, b) in reference.iter().zip(v.iter()) {
        ip += a.conj() * b;
    }
    let mag = ip.norm();
    if mag > 0.0 {
        let phase = ip / mag;
        for c in v.iter_mut() {
            *c /= phase;
        }
    }
    mag
}

/// Make a u-coefficient vector represent a real function with a fixed sign:
/// for anchor quasimomentum `k₀ = 0` the condition is `u_{-n} = conj(u_n)`;
/// for `k₀ = π` the Bloch wave `e^{iπx}u` is made real, i.e.
/// `u_{-n-1} = conj(u_n)`.
pub(crate) fn fix_real_gauge(u: &mut [C64], hw: usize, at_pi: bool) {
    // z = ∫ w² over the periodicity cell of w (w = u or e^{iπx}u) picks the
    // square of the global phase.
    let n = u.len();
    let mut z = C64::new(0.0, 0.0);
    for i in 0..n {
        let m = i as i64 - hw as i64;
        // pair u_m with u_{-m} (k0=0) or u_{-m-1} (k0=pi)
        let partner = if at_pi { -m - 1 } else { -m };
        let j = partner + hw as i64;
        if j >= 0 && (j as usize) < n {
            z += u[i] * u[j as usize];
        }
    }
    let mag = z.norm();
    if mag > 1e-14 {
        let half = C64::new(z.re / mag, z.im / mag).sqrt();
        for c in u.iter_mut() {
            *c /= half;
        }
    }
    // Fix the remaining sign: positive mean when meaningful, otherwise make
    // the dominant coefficient's real part positive.
    let mean = if at_pi {
        // mean of the real function e^{iπx}u over its cell is ~ the m=0 and
        // m=-1 coefficient pair; use the dominant-coefficient rule directly.
        C64::new(0.0, 0.0)
    } else {
        u[hw]
    };
    let flip = if mean.norm() > 1e-8 {
        mean.re < 0.0
    } else {
        let dom = u.iter().max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap()).unwrap();
        dom.re < 0.0 || (dom.re.abs() < 1e-14 && dom.im < 0.0)
    };
    if flip {
        for c in u.iter_mut() {
            *c = -*c;
        }
    }
}

/// Raw per-k solve returning u-variable eigenvectors (no gauge fixing),
/// with touching pairs rotated onto analytic branches.
pub(crate) fn solve_at_k(
    coeffs: &PeriodicCoefficients,
    k: f64,
    n_trunc: usize,
    l_max: usize,
    omega_hat: &[C64],
    omega_lag: usize,
    fold: bool,
) -> Result<(Vec<f64>, Vec<Vec<C64>>), EigError> {
    let op = if fold { assemble(coeffs, k, n_trunc) } else { assemble_raw(coeffs, k, n_trunc) };
    let mut eig = solve_bands(&op, l_max.min(2 * n_trunc + 1))?;

    // Rotate touching pairs so each member follows an analytic branch:
    // diagonalize the projected k-derivative of the stiffness.
    let mut l = 0;
    while l + 1 < eig.values.len() {
        let (e0, e1) = (eig.values[l], eig.values[l + 1]);
        if (e1 - e0).abs() < DEGENERACY_TOL * (1.0 + e0.abs()) {
            let ds = stiffness_k_derivative(coeffs, op.k, n_trunc);
            let v0 = eig.vectors.column(l).clone_owned();
            let v1 = eig.vectors.column(l + 1).clone_owned();
            let p00 = (v0.adjoint() * &ds * &v0)[(0, 0)];
            let p01 = (v0.adjoint() * &ds * &v1)[(0, 0)];
            let p11 = (v1.adjoint() * &ds * &v1)[(0, 0)];
            let p = nalgebra::Matrix2::new(p00, p01, p01.conj(), p11);
            let se = p.symmetric_eigen();
            let (mut a, mut b) = (0usize, 1usize);
            if se.eigenvalues[0] > se.eigenvalues[1] {
                std::mem::swap(&mut a, &mut b);
            }
            // Ascending slope order at k ≤ 0 boundaries, descending at k > 0:
            // the lower band approaches a crossing at +π rising and leaves a
            // crossing at 0 falling (properties 4°-8°).
            let descending = op.k > 1e-9;
            let (first, second) = if descending { (b, a) } else { (a, b) };
            let w0 = &v0 * se.eigenvectors[(0, first)] + &v1 * se.eigenvectors[(1, first)];
            let w1 = &v0 * se.eigenvectors[(0, second)] + &v1 * se.eigenvectors[(1, second)];
            eig.vectors.set_column(l, &w0);
            eig.vectors.set_column(l + 1, &w1);
            l += 2;
        } else {
            l += 1;
        }
    }

    let mut us = Vec::with_capacity(eig.values.len());
    for col in 0..eig.values.len() {
        let phi: Vec<C64> = eig.vectors.column(col).iter().copied().collect();
        us.push(phi_to_u(&phi, n_trunc, omega_hat, omega_lag));
    }
    Ok((eig.values, us))
}

/// Compute band functions and gauge-fixed eigenvectors on a symmetric k-grid
/// that contains 0 and ±π. Per-k solves run on two worker threads and are
/// assembled in grid order.
pub fn band_table(
    coeffs: &PeriodicCoefficients,
    kgrid: &[f64],
    n_trunc: usize,
    l_max: usize,
) -> Result<BandTable, EigError> {
    let has = |v: f64| kgrid.iter().any(|&k| (k - v).abs() < 1e-12);
    assert!(has(0.0) && has(PI) && has(-PI), "k-grid must contain 0 and ±π");
    for &k in kgrid {
        assert!(has(-k), "k-grid must be symmetric about 0");
    }

    let lag = omega_lag(coeffs, n_trunc);
    let omega_hat = coeffs.omega_hat(lag);
    let results = parallel_map(kgrid, |&k| {
        solve_at_k(coeffs, k, n_trunc, l_max, &omega_hat, lag, true)
    });

    let mut energies = Vec::with_capacity(kgrid.len());
    let mut eigvecs = Vec::with_capacity(kgrid.len());
    for r in results {
        let (vals, us) = r?;
        energies.push(vals);
        eigvecs.push(us);
    }

    // Gauge: real anchor at k = 0, then march outward in both directions.
    let hw = n_trunc + lag;
    let i0 = kgrid.iter().position(|&k| k.abs() < 1e-12).unwrap();
    for l in 0..l_max {
        fix_real_gauge(&mut eigvecs[i0][l], hw, false);
        for i in (i0 + 1)..kgrid.len() {
            let (before, after) = eigvecs.split_at_mut(i);
            align_phase(&before[i - 1][l], &mut after[0][l]);
        }
        for i in (0..i0).rev() {
            let (before, after) = eigvecs.split_at_mut(i + 1);
            align_phase(&after[0][l], &mut before[i][l]);
        }
    }

    Ok(BandTable {
        kgrid: kgrid.to_vec(),
        energies,
        eigvecs,
        n_trunc,
        mode_halfwidth: hw,
        l_max,
    })
}

/// Uniform symmetric k-grid on `[-π, π]` with an odd number of points.
pub fn uniform_kgrid(n_points: usize) -> Vec<f64> {
    assert!(n_points >= 3 && !n_points.is_multiple_of(2), "need an odd number of grid points");
    let half = (n_points - 1) / 2;
    (0..n_points)
        .map(|i| (i as i64 - half as i64) as f64 * PI / half as f64)
        .collect()
}

/// Map over a slice on two worker threads, preserving order.
pub(crate) fn parallel_map<T: Sync, R: Send>(
    items: &[T],
    f: impl Fn(&T) -> R + Sync,
) -> Vec<R> {
    let n = items.len();
    let n_workers = std::thread::available_parallelism().map_or(1, |p| p.get()).min(n.max(1));
    if n_workers <= 1 || n < 4 {
        return items.iter().map(&f).collect();
    }
    let mut out: Vec<Option<R>> = (0..n).map(|_| None).collect();
    let chunk = n.div_ceil(n_workers);
    std::thread::scope(|s| {
        for (w, slot_chunk) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            let base = w * chunk;
            s.spawn(move || {
                for (j, slot) in slot_chunk.iter_mut().enumerate() {
                    *slot = Some(f(&items[base + j]));
                }
            });
        }
    });
    out.into_iter().map(|o| o.unwrap()).collect()
}
