//! Lieb-Robinson correlation functions for ZZ-coupled qubit arrays.
//!
//! The correlation between two qubits is the normalized Frobenius norm of
//! the commutator of a Heisenberg-evolved local Z with a static distant Z,
//! `C(t) = ‖[Z_j(t), Z_k]‖`. It is a property of the Hamiltonian alone, not
//! of any state, and it spreads through the coupling network with a finite
//! front velocity. This crate computes it by three independent routes:
//!
//! - [`exact`]: dense diagonalization and spectral evolution, valid at all
//!   times on small registers;
//! - [`exact::SeriesEngine`]: a truncated nested-commutator expansion over
//!   symbolic Pauli sums, which also extracts the exact leading-order term
//!   over rational arithmetic;
//! - [`analytic`]: closed-form early-time values built on minimum-path
//!   analysis of the coupling graph, valid at any distance and evaluated in
//!   log space (the interesting regimes reach 1e-170 and beyond).
//!
//! Times are dimensionless throughout: `t/τ` with `τ = πħ/γ`, where γ is
//! the transverse energy. Energies are in units of γ; couplings are Δ/γ.
//! Qubit indices are 1-based.
//!
//! ```
//! use lrcore::{analytic, exact::ExactEngine, graph::CouplingGraph};
//!
//! let chain = CouplingGraph::chain(9, 1.0).unwrap();
//! let exact = ExactEngine::default()
//!     .correlation(&chain, 1, 3, &[0.05])
//!     .unwrap();
//! let closed_form = analytic::chain_correlation(3, 1.0, 0.05);
//! assert!((exact.values[0] / closed_form.to_f64() - 1.0).abs() < 1e-2);
//! ```

pub mod analytic;
pub mod error;
pub mod exact;
pub mod graph;
pub mod logval;
pub mod pauli;

pub use error::{Error, Result};
pub use logval::LogValue;
