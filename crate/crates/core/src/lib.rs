//! Intensive valuations of finite-dimensional quantum states.
//!
//! The crate is organised bottom-up:
//!
//! - [`qlin`]: dense complex matrices, Kronecker products, partial traces and
//!   transposes, Hermitian eigendecomposition.
//! - [`states`]: pure vectors, density operators, Bloch geometry, purity
//!   predicates, mixture decompositions.
//! - [`powers`]: the commutation graph of projectors, Born-rule valuations and
//!   their axioms, maximal contexts, reconstruction of `ρ` from a valuation.
//! - [`arrangements`]: screens, detectors and the intensities they expose.
//! - [`entanglement`], [`bell`]: separability criteria, witnesses, CHSH.
//! - [`locc`]: Kraus-form instruments and one-way local instruments.

pub mod arrangements;
pub mod bell;
pub mod entanglement;
pub mod error;
pub mod locc;
pub mod powers;
pub mod qlin;
pub mod random;
pub mod states;

pub use error::{Error, Result};
pub use qlin::{ComplexMatrix, C64};
pub use states::{DensityOperator, OrthonormalBasis, PureVector};
