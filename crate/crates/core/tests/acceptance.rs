//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `--nocapture` to see them). Shared edge bundles are built once
//! per process.
//!
//! Criteria:
//!  1. free-operator band oracle (closed forms, 1e-10)
//!  2. band-property suite over all builtins (evenness, monotonicity,
//!     crossing parity, two-sided estimate)
//!  3. effective-coefficient oracle (harmonic mean, 1e-5)
//!  4. isometry suite (cell Parseval, round-trip, unitarity, wave energy)
//!  5. Schrödinger convergence under Cond1 and Cond3 (slope ≈ 1)
//!  6. regularity-graded rates (q=1 Schrödinger, wave bump f, wave power-law g)
//!  7. t-growth exponent and uniform ratio
//!  8. oscillatory symbol-norm windows
//!  9. order sharpness below the critical regularity
//! 10. free-operator null test

mod common;

use hfhom::analysis::{
    epsilon_sweep, lemma2_check, sharpness_probe, time_sweep, SweepData, SymbolCase,
};
use hfhom::band_edge::{classify, Condition, EdgeBundle, EdgeOptions, EdgeSide, GapReport};
use hfhom::bloch_synthesis::{
    bloch_coeff, make_profile, synthesize, FieldGrid, ProfileKind, SynthesisPlan,
};
use hfhom::cell_eig::{band_table, free_band, uniform_kgrid, BandTable};
use hfhom::coefficients::PeriodicCoefficients;
use hfhom::dynamics::{evolve_exact, wave_spectral_energy, Equation, EvolutionSpec};
use hfhom::C64;
use std::f64::consts::PI;
use std::sync::LazyLock;
use std::time::Instant;

static COSINE: LazyLock<PeriodicCoefficients> =
    LazyLock::new(|| PeriodicCoefficients::builtin("cosine").unwrap());

static COSINE_TABLE: LazyLock<BandTable> =
    LazyLock::new(|| band_table(&COSINE, &uniform_kgrid(65), 32, 6).unwrap());

fn cosine_bundle(cond: Condition) -> EdgeBundle {
    let reports = classify(&COSINE_TABLE, 1, 1e-6);
    let r = reports.into_iter().find(|r| r.condition == cond).unwrap();
    let opts = EdgeOptions { n_trunc: 48, n_points: 769, ..Default::default() };
    EdgeBundle::build(&COSINE, &r, &opts).unwrap()
}

static COS_EDGE_0: LazyLock<EdgeBundle> = LazyLock::new(|| cosine_bundle(Condition::Cond1));
static COS_EDGE_PI: LazyLock<EdgeBundle> = LazyLock::new(|| cosine_bundle(Condition::Cond3));

static FREE_EDGE: LazyLock<EdgeBundle> = LazyLock::new(|| {
    let c = PeriodicCoefficients::builtin("free").unwrap();
    let report = GapReport {
        s: 1,
        condition: Condition::Cond1,
        gap: None,
        k0: 0.0,
        edge_side: EdgeSide::Min,
    };
    let opts =
        EdgeOptions { n_trunc: 16, n_points: 257, allow_degenerate: true, ..Default::default() };
    EdgeBundle::build(&c, &report, &opts).unwrap()
});

fn report(criterion: u32, name: &str, pass: bool, detail: &str, elapsed: f64, limit: f64) {
    println!(
        "criterion {criterion:2} [{}] {name}: {detail} ({elapsed:.1} s, limit {limit:.0} s)",
        if pass && elapsed <= limit { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
    assert!(elapsed <= limit, "criterion {criterion} exceeded runtime limit: {elapsed:.1} s");
}

#[test]
fn criterion_01_free_operator_oracle() {
    let t0 = Instant::now();
    let c = PeriodicCoefficients::builtin("free").unwrap();
    let t = band_table(&c, &uniform_kgrid(65), 32, 5).unwrap();
    let mut worst = 0.0f64;
    for (ik, &k) in t.kgrid.iter().enumerate() {
        for l in 1..=5 {
            worst = worst.max((t.energy(l, ik) - free_band(l, k)).abs());
        }
    }
    report(
        1,
        "free-operator closed forms",
        worst <= 1e-10 * (1.0 + 4.0 * PI * PI * 9.0),
        &format!("max |E_l - E°_l| = {worst:.2e}"),
        t0.elapsed().as_secs_f64(),
        5.0,
    );
}

#[test]
fn criterion_02_band_property_suite() {
    let t0 = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    for name in ["free", "cosine", "weighted"] {
        let c = PeriodicCoefficients::builtin(name).unwrap();
        let t = band_table(&c, &uniform_kgrid(65), 24, 6).unwrap();
        let n = t.kgrid.len();
        let i0 = (n - 1) / 2;
        let lo_c = c.alpha0 * c.beta0 * c.beta0 / (c.beta1 * c.beta1);
        let hi_c = c.alpha1 * c.beta1 * c.beta1 / (c.beta0 * c.beta0);
        for l in 1..=5 {
            // evenness
            for ik in 0..n {
                if (t.energy(l, ik) - t.energy(l, n - 1 - ik)).abs() > 1e-9 {
                    pass = false;
                    detail = format!("{name}: evenness l={l}");
                }
            }
            // monotonicity on [0, π] with one touching-point allowance
            let mut violations = 0;
            for i in i0..(n - 1) {
                let step = t.energy(l, i + 1) - t.energy(l, i);
                let ok = if l % 2 == 1 { step >= -1e-7 } else { step <= 1e-7 };
                if !ok {
                    violations += 1;
                    if step.abs() > 1e-6 * (1.0 + t.energy(l, i).abs()) {
                        pass = false;
                        detail = format!("{name}: monotonicity l={l} step {step:.2e}");
                    }
                }
            }
            if violations > 1 {
                pass = false;
                detail = format!("{name}: {violations} monotonicity violations l={l}");
            }
            // crossing parity and two-sided estimate
            for (ik, &k) in t.kgrid.iter().enumerate() {
                if t.energy(l + 1, ik) - t.energy(l, ik) < 1e-6 {
                    let at_pi = (k.abs() - PI).abs() < 1e-12;
                    let at_0 = k.abs() < 1e-12;
                    if (l % 2 == 1 && !at_pi) || (l % 2 == 0 && !at_0) {
                        pass = false;
                        detail = format!("{name}: crossing parity l={l} k={k}");
                    }
                }
                let k_unf = if l % 2 == 1 {
                    (l as f64 - 1.0) * PI + k.abs()
                } else {
                    l as f64 * PI - k.abs()
                };
                let e = t.energy(l, ik);
                let slack = 1e-9 * (1.0 + k_unf * k_unf);
                if e < lo_c * k_unf * k_unf - slack || e > hi_c * k_unf * k_unf + slack {
                    pass = false;
                    detail = format!("{name}: two-sided estimate l={l} k={k} E={e}");
                }
            }
        }
    }
    if pass {
        detail = "evenness, monotonicity, crossing parity, two-sided estimate hold".into();
    }
    report(2, "band properties (all builtins, l ≤ 5)", pass, &detail, t0.elapsed().as_secs_f64(), 30.0);
}

#[test]
fn criterion_03_effective_coefficient_oracle() {
    let t0 = Instant::now();
    let b = COS_EDGE_0.data.b;
    let oracle = 0.75f64.sqrt(); // (∫ ǧ⁻¹)⁻¹ for ǧ = 1 + cos(2πx)/2
    let err = (b - oracle).abs();
    report(
        3,
        "effective coefficient b = harmonic mean",
        err < 1e-5,
        &format!("b = {b:.8}, oracle {oracle:.8}, |Δ| = {err:.2e}"),
        t0.elapsed().as_secs_f64(),
        30.0,
    );
}

#[test]
fn criterion_04_isometry_suite() {
    let t0 = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();

    // Cell Parseval with the full discrete basis at a generic k.
    {
        let n_trunc = 12;
        let grid = vec![-PI, -0.7, 0.0, 0.7, PI];
        let t = band_table(&COSINE, &grid, n_trunc, 2 * n_trunc + 1).unwrap();
        let hw = t.mode_halfwidth;
        let mut v = vec![C64::new(0.0, 0.0); 2 * hw + 1];
        let mut state = 0x51ab_1e23_9d0fu64;
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
            for (a, b) in t.eigvecs[3][l - 1].iter().zip(v.iter()) {
                ip += a.conj() * b;
            }
            captured += ip.norm_sqr();
        }
        let defect = (captured - norm2).abs() / norm2;
        pass &= defect <= 1e-8;
        notes.push(format!("Parseval defect {defect:.1e}"));
    }

    let eps = 1.0 / 32.0;
    let grid = FieldGrid::commensurate(eps, 40.0, 16);
    let profile = make_profile(ProfileKind::Bump { k_max: 2.0 }, 2.0, grid.dk());
    let plan = SynthesisPlan::new(&COS_EDGE_0, eps);

    // Synthesis/analysis round trip.
    {
        let synth = synthesize(&plan, &profile, grid).unwrap();
        let rec = bloch_coeff(&plan, &synth, profile.mode_min, profile.amplitudes.len()).unwrap();
        let mut err2 = 0.0;
        for (a, b) in profile.amplitudes.iter().zip(&rec) {
            err2 += (a - b).norm_sqr();
        }
        let rel = (err2 * profile.dk).sqrt();
        pass &= rel <= 1e-8;
        notes.push(format!("round-trip {rel:.1e}"));
    }

    // Schrödinger unitarity.
    {
        let n0 = synthesize(&plan, &profile, grid).unwrap().l2_norm();
        let spec = EvolutionSpec {
            equation: Equation::Schrodinger,
            plan,
            t: 1.0,
            profile_f: &profile,
            profile_g: None,
        };
        let n1 = evolve_exact(&spec, grid).unwrap().l2_norm();
        let defect = (n1 - n0).abs();
        pass &= defect <= 1e-9;
        notes.push(format!("unitarity defect {defect:.1e}"));
    }

    // Wave energy conservation across t ∈ {0, 1, 10}.
    {
        let pg = make_profile(ProfileKind::Bump { k_max: 1.5 }, 0.5, grid.dk());
        let energy_at = |t: f64| {
            let spec = EvolutionSpec {
                equation: Equation::Wave,
                plan,
                t,
                profile_f: &profile,
                profile_g: Some(&pg),
            };
            wave_spectral_energy(&spec).unwrap()
        };
        let e0 = energy_at(0.0);
        let drift = [1.0, 10.0]
            .iter()
            .map(|&t| (energy_at(t) - e0).abs() / e0.abs())
            .fold(0.0, f64::max);
        pass &= drift <= 1e-7;
        notes.push(format!("wave-energy drift {drift:.1e}"));
    }

    report(4, "isometry suite (cosine, ε = 1/32)", pass, &notes.join(", "), t0.elapsed().as_secs_f64(), 60.0);
}

#[test]
fn criterion_05_schrodinger_convergence_cond1_and_cond3() {
    let t0 = Instant::now();
    let eps_list = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
    let data = SweepData::position(ProfileKind::Bump { k_max: 2.0 }, 2.0);
    let mut pass = true;
    let mut notes = Vec::new();
    for (bundle, label) in [(&*COS_EDGE_0, "Cond1"), (&*COS_EDGE_PI, "Cond3")] {
        let r = epsilon_sweep(Equation::Schrodinger, bundle, &data, 1.0, &eps_list, 8, 1.0)
            .unwrap();
        let slope = r.fitted_slope.unwrap_or(f64::NAN);
        let ok = (0.9..=1.15).contains(&slope);
        pass &= ok;
        notes.push(format!(
            "{label}: slope {slope:.3} on {} admissible pts",
            r.points.iter().filter(|p| p.admissible).count()
        ));
    }
    report(5, "Schrödinger convergence (bump, t=1)", pass, &notes.join("; "), t0.elapsed().as_secs_f64(), 600.0);
}

#[test]
fn criterion_06_regularity_graded_rates() {
    let t0 = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();

    // Schrödinger, power-law f with q = 1: theory slope 1/2.
    {
        let eps_list = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0];
        let data = SweepData::position(
            ProfileKind::PowerLaw { q: 1.0, delta: 0.05, k_max: 96.0 },
            1.0,
        );
        let r = epsilon_sweep(Equation::Schrodinger, &COS_EDGE_PI, &data, 1.0, &eps_list, 8, 0.5)
            .unwrap();
        let slope = r.fitted_slope.unwrap_or(f64::NAN);
        let ok = (0.35..=0.65).contains(&slope);
        pass &= ok;
        notes.push(format!("powerlaw q=1: slope {slope:.3}"));
    }

    // Wave, bump f, g = 0: theory ε^{2q/3} at the q = 3/2 cap, slope 1.
    {
        let eps_list = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
        let data = SweepData::position(ProfileKind::Bump { k_max: 2.0 }, 1.5);
        let r = epsilon_sweep(Equation::Wave, &COS_EDGE_PI, &data, 1.0, &eps_list, 8, 1.0)
            .unwrap();
        let slope = r.fitted_slope.unwrap_or(f64::NAN);
        let ok = (0.9..=1.15).contains(&slope);
        pass &= ok;
        notes.push(format!("wave bump f: slope {slope:.3}"));
    }

    // Wave, f = 0, power-law g with r = 1/2: theory ε^{(2r+2)/3} = ε.
    {
        let eps_list = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0];
        let data = SweepData::velocity_only(
            ProfileKind::PowerLaw { q: 0.5, delta: 0.05, k_max: 96.0 },
            0.5,
            ProfileKind::Bump { k_max: 2.0 },
        );
        let r = epsilon_sweep(Equation::Wave, &COS_EDGE_PI, &data, 1.0, &eps_list, 8, 1.0)
            .unwrap();
        let slope = r.fitted_slope.unwrap_or(f64::NAN);
        let ok = (0.85..=1.15).contains(&slope);
        pass &= ok;
        notes.push(format!("wave powerlaw g: slope {slope:.3}"));
    }

    report(6, "regularity-graded rates", pass, &notes.join("; "), t0.elapsed().as_secs_f64(), 600.0);
}

#[test]
fn criterion_07_time_growth() {
    let t0 = Instant::now();
    let data = SweepData::position(ProfileKind::Bump { k_max: 2.0 }, 2.0);
    let ts = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let r = time_sweep(Equation::Schrodinger, &COS_EDGE_0, &data, 1.0 / 128.0, &ts, 8).unwrap();
    let exponent = r.fitted_exponent.unwrap_or(f64::NAN);
    let pass = exponent <= 0.6 && r.sup_growth_ratio.is_finite();
    report(
        7,
        "t-growth (Schrödinger, ε = 1/128)",
        pass,
        &format!("exponent {exponent:.3}, sup error/((1+√t)ε) = {:.3}", r.sup_growth_ratio),
        t0.elapsed().as_secs_f64(),
        300.0,
    );
}

#[test]
fn criterion_08_symbol_norm_windows() {
    let t0 = Instant::now();
    let edge = &COS_EDGE_PI.data;
    let (eps, t) = (1.0 / 64.0, 1.0);
    let mut pass = true;
    let mut notes = Vec::new();

    for q in [1.0, 2.0, 4.0] {
        let chk = lemma2_check(SymbolCase::SchrodingerSin, q, eps, t, edge).unwrap();
        let ok = chk.ratio >= 1.0 / 3.0 && chk.ratio <= 1.5 * PI;
        pass &= ok;
        notes.push(format!("case1 q={q}: {:.3}", chk.ratio));
    }
    {
        // q = 5 (> 4 branch): ratio vs |γ(k₀)|ε²|t| within the bracket
        // [ (8/π), 12 ]·q^{-q/2}(q-4)^{q/2-2}.
        let q: f64 = 5.0;
        let chk = lemma2_check(SymbolCase::SchrodingerSin, q, eps, t, edge).unwrap();
        let base = q.powf(-q / 2.0) * (q - 4.0f64).powf(q / 2.0 - 2.0);
        let lo = 8.0 / PI * base;
        let hi = 12.0 * base;
        let ok = chk.ratio >= lo && chk.ratio <= hi;
        pass &= ok;
        notes.push(format!("case1 q=5: {:.4} ∈ [{lo:.4}, {hi:.4}] = {ok}", chk.ratio));
    }
    for q in [1.0, 2.0, 4.0] {
        let chk = lemma2_check(SymbolCase::WaveSin3, q, eps, t, edge).unwrap();
        let ok = chk.ratio >= 0.1 && chk.ratio <= 10.0;
        pass &= ok;
        notes.push(format!("case2 q={q}: {:.3}", chk.ratio));
    }
    for r in [0.0, 1.0, 3.0] {
        let chk = lemma2_check(SymbolCase::WaveSin3InvK, r, eps, t, edge).unwrap();
        let ok = chk.ratio >= 0.1 && chk.ratio <= 10.0;
        pass &= ok;
        notes.push(format!("case3 r={r}: {:.3}", chk.ratio));
    }

    report(8, "symbol-norm windows", pass, &notes.join(", "), t0.elapsed().as_secs_f64(), 60.0);
}

#[test]
fn criterion_09_sharpness() {
    let t0 = Instant::now();
    let eps_list = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0];
    let mut pass = true;
    let mut notes = Vec::new();
    {
        let pts = sharpness_probe(&COS_EDGE_0, 1.0, 1.0, &eps_list, 8).unwrap();
        let growth = pts.last().unwrap().ratio / pts[0].ratio;
        // Monotone nondecreasing in 1/ε within 5% noise.
        let monotone = pts.windows(2).all(|w| w[1].ratio >= 0.95 * w[0].ratio);
        let ok = growth >= 2.0 && monotone;
        pass &= ok;
        notes.push(format!("q'=1 growth ×{growth:.2} monotone={monotone}"));
    }
    {
        let pts = sharpness_probe(&COS_EDGE_0, 2.0, 1.0, &eps_list, 8).unwrap();
        let hi = pts.iter().map(|p| p.ratio).fold(0.0, f64::max);
        let lo = pts.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
        let ok = hi / lo <= 1.5;
        pass &= ok;
        notes.push(format!("q'=2 band ×{:.2}", hi / lo));
    }
    report(9, "order sharpness", pass, &notes.join("; "), t0.elapsed().as_secs_f64(), 300.0);
}

#[test]
fn criterion_10_null_test() {
    let t0 = Instant::now();
    let eps_list = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
    let data = SweepData::position(ProfileKind::Bump { k_max: 2.0 }, 2.0);
    let mut pass = true;
    let mut worst = 0.0f64;
    for eqn in [Equation::Schrodinger, Equation::Wave] {
        let r = epsilon_sweep(eqn, &FREE_EDGE, &data, 1.0, &eps_list, 8, 1.0).unwrap();
        pass &= r.fitted_slope.is_none();
        for p in &r.points {
            worst = worst.max(p.error);
        }
    }
    pass &= worst <= 1e-8;
    report(
        10,
        "free-operator null test",
        pass,
        &format!("max end-to-end error {worst:.2e}, fit skipped"),
        t0.elapsed().as_secs_f64(),
        60.0,
    );
}
