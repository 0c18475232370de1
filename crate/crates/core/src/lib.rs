//! Floquet-Bloch band structure and high-frequency homogenization for
//! one-dimensional periodic operators.
//!
//! The operator under study is the factorized elliptic operator
//!
//! ```text
//! A = -ω(x)⁻¹ d/dx g(x) d/dx ω(x)⁻¹,      g = ω² ǧ,
//! ```
//!
//! with 1-periodic coefficients `ǧ` and `ω` satisfying `0 < α₀ ≤ ǧ ≤ α₁` and
//! `0 < β₀ ≤ ω ≤ β₁`, `‖ω‖_{L₂(0,1)} = 1`. Its ε-scaled version
//! `A_ε = -(ωᵉ)⁻¹ d/dx gᵉ d/dx (ωᵉ)⁻¹` (with `Fᵉ(x) = F(x/ε)`) carries each
//! spectral band edge `σ` to `ε⁻²σ`. Near a non-degenerate edge the
//! Schrödinger and wave dynamics of `A_ε`, restricted to spectrally localized
//! initial data, are approximated by a constant-coefficient effective
//! evolution modulated by the fast Bloch profile.
//!
//! The crate provides
//!
//! - [`coefficients`]: validated periodic coefficient pairs and builtins,
//! - [`cell_eig`]: the Fourier-Galerkin cell eigenproblem `A(k)` and band tables,
//! - [`band_edge`]: gap classification and band-edge expansion data
//!   (σ, b, γ, γ̃, φ, θ, κ, multiplier norm),
//! - [`bloch_synthesis`]: spectral profiles, the synthesis operators Υ_ε and
//!   the Bloch analysis transform on a periodized computational domain,
//! - [`dynamics`]: exact and effective Fourier-multiplier evolution plus the
//!   modulated approximant and error norms,
//! - [`analysis`]: convergence sweeps in ε and t, symbol-norm checks for the
//!   oscillatory multiplier bounds, and order-sharpness probes.

pub mod analysis;
pub mod band_edge;
pub mod bloch_synthesis;
pub mod cell_eig;
pub mod coefficients;
pub mod dynamics;
pub mod numeric;

pub use band_edge::{BandEdgeData, Condition, EdgeBundle, GapReport};
pub use bloch_synthesis::{FieldGrid, SpectralProfile, SynthesisPlan, WaveField};
pub use cell_eig::{BandTable, CellOperator};
pub use coefficients::PeriodicCoefficients;
pub use dynamics::{Equation, EvolutionSpec};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
