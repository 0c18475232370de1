//! Test oracles independent of the library's spectral discretization.
//!
//! The finite-difference oracle discretizes `-(g ψ')' = E ω² ψ` in flux form
//! on a uniform cell grid with a Bloch phase twist at the wrap-around, and
//! extrapolates the O(h²) eigenvalue error with one Richardson step.

use nalgebra::{Complex, DMatrix};

type C64 = Complex<f64>;

/// Lowest `nev` eigenvalues of the flux-form FD discretization at
/// quasimomentum `k` with `n` grid points.
pub fn fd_band_energies<G, W>(g: G, omega: Option<W>, k: f64, n: usize, nev: usize) -> Vec<f64>
where
    G: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    let h = 1.0 / n as f64;
    let gh: Vec<f64> = (0..n).map(|j| g((j as f64 + 0.5) * h)).collect();
    let tau = C64::new(k.cos(), k.sin());
    let mut a = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        let gp = gh[j];
        let gm = gh[(j + n - 1) % n];
        a[(j, j)] = C64::new((gp + gm) / (h * h), 0.0);
        let up = C64::new(-gp / (h * h), 0.0);
        if j + 1 < n {
            a[(j, j + 1)] += up;
            a[(j + 1, j)] += up.conj();
        } else {
            a[(n - 1, 0)] += up * tau;
            a[(0, n - 1)] += up.conj() * tau.conj();
        }
    }
    // Generalized form with M = diag(ω²): B = M^{-1/2} A M^{-1/2}.
    if let Some(w) = omega {
        let ws: Vec<f64> = (0..n).map(|j| w(j as f64 * h)).collect();
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] /= C64::new(ws[i] * ws[j], 0.0);
            }
        }
    }
    let se = a.symmetric_eigen();
    let mut vals: Vec<f64> = se.eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals.truncate(nev);
    vals
}

/// h²-Richardson extrapolation of [`fd_band_energies`] from grids `n`, `2n`.
pub fn fd_band_energies_richardson<G, W>(
    g: G,
    omega: Option<W>,
    k: f64,
    n: usize,
    nev: usize,
) -> Vec<f64>
where
    G: Fn(f64) -> f64 + Copy,
    W: Fn(f64) -> f64 + Copy,
{
    let coarse = fd_band_energies(g, omega, k, n, nev);
    let fine = fd_band_energies(g, omega, k, 2 * n, nev);
    coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect()
}

/// Ground-state eigenvector of the FD problem at k = 0 (real symmetric),
/// found by inverse iteration on the shifted matrix `A + I` (robust at
/// sizes where dense eigenvector accumulation degrades), normalized in the
/// discrete `L₂(0,1)` norm and sign-fixed positive.
/// Returns samples at `x_j = j/n`.
#[allow(dead_code)]
pub fn fd_ground_state_k0<G>(g: G, n: usize) -> Vec<f64>
where
    G: Fn(f64) -> f64,
{
    let h = 1.0 / n as f64;
    let gh: Vec<f64> = (0..n).map(|j| g((j as f64 + 0.5) * h)).collect();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let gp = gh[j];
        let gm = gh[(j + n - 1) % n];
        a[(j, j)] = (gp + gm) / (h * h) + 1.0;
        a[(j, (j + 1) % n)] += -gp / (h * h);
        a[((j + 1) % n, j)] += -gp / (h * h);
    }
    let chol = a.cholesky().expect("shifted FD matrix must be SPD");
    let mut v = nalgebra::DVector::<f64>::from_fn(n, |j, _| {
        1.0 + 0.5 * (2.0 * std::f64::consts::PI * j as f64 * h).cos()
    });
    for _ in 0..12 {
        v = chol.solve(&v);
        v /= v.norm();
    }
    let norm = (v.iter().map(|x| x * x).sum::<f64>() / n as f64).sqrt();
    let sign = if v.iter().sum::<f64>() >= 0.0 { 1.0 } else { -1.0 };
    v.iter().map(|x| sign * x / norm).collect()
}
