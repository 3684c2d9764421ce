//! Spectral gaps of discrete Schrödinger operators on finite path graphs.
//!
//! The crate builds `H = L_k + Σ_j α_j δ_j` on the path `{-k, …, k}`,
//! computes its two lowest eigenvalues and positive ground state with a
//! Sturm-bisection / inverse-iteration solver, evaluates the two-sided
//! eigenvalue bounds for `λ₀` and `λ₁`, and runs infinite-volume sweeps of
//! the scaled gap `|V_k|^p · Γ`.
//!
//! ```
//! use pathgap::{assemble_hamiltonian, spectrum_low, PathGraph, Potential};
//!
//! let graph = PathGraph::new(1).unwrap();
//! let potential = Potential::new([(0, 5.0)]).unwrap();
//! let op = assemble_hamiltonian(&graph, &potential).unwrap();
//! let spectrum = spectrum_low(&op).unwrap();
//! assert!((spectrum.gap - (11f64.sqrt() - 3.0)).abs() < 1e-12);
//! ```

pub mod asymptotics;
pub mod bounds;
pub mod cli;
pub mod eigen;
mod error;
pub mod format;
pub mod graph;

pub use asymptotics::{
    cubic_band_check, fit_inverse_alpha, fit_power_law, gap_series, scaled_sequence, GapPoint, GapSeries,
    InverseAlphaFit, ScalingFit,
};
pub use bounds::{verify_all, BoundsReport, CheckOutcome, SideCorrections, TrialState};
pub use eigen::{
    dirichlet_ground_energy, eigenvalue, free_spectrum, ground_state, spectrum_low, sturm_count, GroundState,
    SpectralResult,
};
pub use error::{Error, Result};
pub use graph::{assemble_hamiltonian, PathGraph, Potential, TridiagonalOperator};
