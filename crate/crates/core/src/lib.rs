//! Numerics for relational quantum mechanics: relative (conditional) states of
//! entangled subsystems over non-orthonormal bases, the complex differential
//! geometry of quantum state-space metrics, Gauss-Codazzi relative evolution
//! and its Schrödinger limit, non-integrable phase accumulation, and the
//! clock-constraint (Wheeler-DeWitt / Page-Wootters) model.
//!
//! Everything is dense, double precision, and deterministic; ħ = 1 throughout.
//! Each engine is validated against an independent brute-force oracle in the
//! crate's test suite.

pub mod bridge;
pub mod chart;
pub mod clockworks;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod linalg;
pub mod phase;
pub mod relstate;

pub use error::{CoreError, Result};
pub use linalg::{ComplexMatrix, ComplexVector, HermitianMatrix, C64};

/// Default numerical tolerances. Every threshold used by the library is
/// named here; operations accept overrides where the contract allows it.
pub mod tol {
    /// Allowed Hermiticity drift ‖M − M†‖∞ before symmetrization is refused.
    pub const HERMITICITY_TOL: f64 = 1e-10;
    /// Dual-basis pairing tolerance for ⟨dual_j|basis_i⟩ = ±δ_ij.
    pub const DUAL_TOL: f64 = 1e-10;
    /// Maximum Gram condition number for a basis family to count as usable.
    pub const COND_MAX: f64 = 1e12;
    /// Positive-definiteness floor for spacelike metric fields.
    pub const PD_FLOOR: f64 = 1e-10;
    /// Finite-difference tolerance scale for smooth fields on default grids.
    pub const FD_TOL: f64 = 1e-6;
    /// Relative residual allowed on accepted Gauss-Codazzi steps.
    pub const RESIDUAL_TOL: f64 = 1e-5;
    /// Wheeler-DeWitt constraint residual default.
    pub const WD_TOL: f64 = 1e-8;
    /// Fast/slow split validity bound: ‖∂e/∂t‖ ≤ ratio · ω‖e‖.
    pub const SLOWNESS_RATIO: f64 = 0.1;
    /// Normalization drift allowed on entangled-state coefficients.
    pub const NORMALIZATION_TOL: f64 = 1e-12;
}
