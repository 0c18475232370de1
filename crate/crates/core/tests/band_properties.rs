//! Band-function properties across the builtin coefficient sets, checked
//! against closed forms and the finite-difference oracle.

mod common;

use hfhom::cell_eig::{band_table, free_band, uniform_kgrid, BandTable};
use hfhom::coefficients::PeriodicCoefficients;
use hfhom::C64;
use std::f64::consts::PI;

fn builtins() -> Vec<(&'static str, PeriodicCoefficients)> {
    ["free", "cosine", "weighted"]
        .iter()
        .map(|&n| (n, PeriodicCoefficients::builtin(n).unwrap()))
        .collect()
}

fn table_for(c: &PeriodicCoefficients, n_grid: usize, n_trunc: usize, l_max: usize) -> BandTable {
    band_table(c, &uniform_kgrid(n_grid), n_trunc, l_max).unwrap()
}

#[test]
fn free_bands_match_closed_forms_to_1e10() {
    let c = PeriodicCoefficients::builtin("free").unwrap();
    let t = table_for(&c, 65, 32, 5);
    for (ik, &k) in t.kgrid.iter().enumerate() {
        for l in 1..=5 {
            let want = free_band(l, k);
            let got = t.energy(l, ik);
            assert!(
                (got - want).abs() <= 1e-10 * (1.0 + want),
                "l={l} k={k}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn cosine_bands_match_fd_oracle() {
    let g = |x: f64| 1.0 + 0.5 * (2.0 * PI * x).cos();
    let c = PeriodicCoefficients::builtin("cosine").unwrap();
    let t = table_for(&c, 9, 32, 2);
    for &k in &[0.0, PI / 2.0, PI] {
        let oracle =
            common::fd_band_energies_richardson(g, None::<fn(f64) -> f64>, k, 384, 2);
        let ik = t.kgrid.iter().position(|&kk| (kk - k).abs() < 1e-12).unwrap();
        for l in 1..=2 {
            let got = t.energy(l, ik);
            assert!(
                (got - oracle[l - 1]).abs() < 1e-6,
                "k={k} l={l}: {got} vs oracle {}",
                oracle[l - 1]
            );
        }
    }
}

#[test]
fn weighted_bands_match_fd_oracle() {
    let c = PeriodicCoefficients::builtin("weighted").unwrap();
    // Independent normalization: c_w from a 2^16-point midpoint quadrature.
    let nq = 1 << 16;
    let mut s2 = 0.0;
    for j in 0..nq {
        let x = (j as f64 + 0.5) / nq as f64;
        s2 += (0.4 * (2.0 * PI * x).cos()).exp();
    }
    let c_w = (s2 / nq as f64).sqrt().recip();
    let w = move |x: f64| c_w * (0.2 * (2.0 * PI * x).cos()).exp();
    // The flux coefficient of the φ-form is g = ω²ǧ = ω².
    let g = move |x: f64| w(x) * w(x);
    let t = table_for(&c, 9, 32, 2);
    for &k in &[PI / 4.0, PI] {
        let ik = t.kgrid.iter().position(|&kk| (kk - k).abs() < 1e-12);
        let Some(ik) = ik else { continue };
        let oracle = common::fd_band_energies_richardson(g, Some(&w), k, 384, 2);
        for l in 1..=2 {
            let got = t.energy(l, ik);
            assert!(
                (got - oracle[l - 1]).abs() < 1e-5,
                "k={k} l={l}: {got} vs oracle {}",
                oracle[l - 1]
            );
        }
    }
}

#[test]
fn evenness_of_bands() {
    for (name, c) in builtins() {
        let t = table_for(&c, 65, 24, 5);
        let n = t.kgrid.len();
        for ik in 0..n {
            for l in 1..=5 {
                let diff = (t.energy(l, ik) - t.energy(l, n - 1 - ik)).abs();
                assert!(diff <= 1e-9, "{name} l={l} k={}: asymmetry {diff}", t.kgrid[ik]);
            }
        }
    }
}

#[test]
fn monotonicity_on_half_zone() {
    // Odd bands increase on [0, π], even bands decrease; at most one
    // violation of solver-tolerance size near touching points.
    for (name, c) in builtins() {
        let t = table_for(&c, 65, 24, 5);
        let i0 = t.kgrid.iter().position(|&k| k.abs() < 1e-12).unwrap();
        for l in 1..=5 {
            let mut violations = 0;
            for i in i0..(t.kgrid.len() - 1) {
                let step = t.energy(l, i + 1) - t.energy(l, i);
                let ok = if l % 2 == 1 { step >= -1e-7 } else { step <= 1e-7 };
                if !ok {
                    violations += 1;
                    assert!(
                        step.abs() <= 1e-6 * (1.0 + t.energy(l, i).abs()),
                        "{name} l={l}: non-monotone step {step} at k={}",
                        t.kgrid[i]
                    );
                }
            }
            assert!(violations <= 1, "{name} l={l}: {violations} violations");
        }
    }
}

#[test]
fn band_crossings_sit_at_parity_points() {
    // E_{l+1}(k) = E_l(k) can only happen at k = ±π for odd l and k = 0 for
    // even l.
    for (name, c) in builtins() {
        let t = table_for(&c, 65, 24, 6);
        for (ik, &k) in t.kgrid.iter().enumerate() {
            for l in 1..=5 {
                let gap = t.energy(l + 1, ik) - t.energy(l, ik);
                if gap < 1e-6 {
                    if l % 2 == 1 {
                        assert!(
                            (k.abs() - PI).abs() < 1e-12,
                            "{name}: odd-band touching at k={k}"
                        );
                    } else {
                        assert!(k.abs() < 1e-12, "{name}: even-band touching at k={k}");
                    }
                }
            }
        }
    }
}

#[test]
fn two_sided_band_estimate() {
    // α₀β₀²β₁⁻² k² ≤ E_l(k) ≤ α₁β₀⁻²β₁² k² with k the unfolded zone
    // frequency |k| ∈ [(l-1)π, lπ].
    for (name, c) in builtins() {
        let t = table_for(&c, 65, 24, 5);
        let lo_c = c.alpha0 * c.beta0 * c.beta0 / (c.beta1 * c.beta1);
        let hi_c = c.alpha1 * c.beta1 * c.beta1 / (c.beta0 * c.beta0);
        for (ik, &k) in t.kgrid.iter().enumerate() {
            for l in 1..=5 {
                let k_unf = if l % 2 == 1 {
                    (l as f64 - 1.0) * PI + k.abs()
                } else {
                    l as f64 * PI - k.abs()
                };
                let e = t.energy(l, ik);
                let lo = lo_c * k_unf * k_unf;
                let hi = hi_c * k_unf * k_unf;
                let slack = 1e-9 * (1.0 + k_unf * k_unf);
                assert!(
                    e >= lo - slack && e <= hi + slack,
                    "{name} l={l} k={k}: E={e} outside [{lo}, {hi}]"
                );
            }
        }
    }
}

#[test]
fn cell_parseval_with_full_basis() {
    // With l_max = 2N+1 the eigenvectors are a complete orthonormal family
    // for trigonometric polynomials of degree ≤ N (cosine builtin: ω ≡ 1).
    let n_trunc = 12;
    let c = PeriodicCoefficients::builtin("cosine").unwrap();
    let grid = vec![-PI, -0.7, 0.0, 0.7, PI];
    let t = band_table(&c, &grid, n_trunc, 2 * n_trunc + 1).unwrap();
    let ik = 3; // k = 0.7
    let hw = t.mode_halfwidth;
    // Random trig polynomial of degree ≤ N with fixed coefficients.
    let mut v = vec![C64::new(0.0, 0.0); 2 * hw + 1];
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut rnd = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    for n in -(n_trunc as i64)..=(n_trunc as i64) {
        v[(n + hw as i64) as usize] = C64::new(rnd(), rnd());
    }
    let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let mut captured = 0.0;
    for l in 1..=(2 * n_trunc + 1) {
        let mut ip = C64::new(0.0, 0.0);
        for (a, b) in t.eigvecs[ik][l - 1].iter().zip(v.iter()) {
            ip += a.conj() * b;
        }
        captured += ip.norm_sqr();
    }
    assert!(
        (captured - norm2).abs() <= 1e-8 * norm2,
        "Parseval defect: {captured} vs {norm2}"
    );
}

#[test]
fn bloch_amplitude_matches_fd_ground_state() {
    let g = |x: f64| 1.0 + 0.5 * (2.0 * PI * x).cos();
    let c = PeriodicCoefficients::builtin("cosine").unwrap();
    let t = table_for(&c, 9, 32, 1);
    let n_fd = 1024;
    let oracle = common::fd_ground_state_k0(g, n_fd);
    let xs: Vec<f64> = (0..n_fd).map(|j| j as f64 / n_fd as f64).collect();
    let got = t.evaluate_bloch(1, 0.0, &xs).unwrap();
    let mut sup = 0.0f64;
    for (a, b) in got.iter().zip(&oracle) {
        sup = sup.max((a - C64::new(*b, 0.0)).norm());
    }
    assert!(sup < 1e-5, "sup-norm mismatch {sup}");
    // Real positive profile under the gauge convention.
    for z in &got {
        assert!(z.im.abs() < 1e-9 && z.re > 0.0);
    }
}
