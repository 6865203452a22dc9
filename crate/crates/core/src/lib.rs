//! Lax-Milgram representation theory for Hilbert modules over
//! finite-dimensional C*-algebras `A = M_{n_1}(C) ⊕ … ⊕ M_{n_m}(C)`.
//!
//! The crate is layered bottom-up:
//!
//! - [`algebra`]: block matrices, functional calculus, polar decomposition.
//! - [`state`]: pure (vector) states and seeded state samples.
//! - [`module_space`]: free modules `A^p`, submodules, self-dual representation.
//! - [`localization`]: the Hilbert space `H_f` obtained from a state.
//! - [`forms`]: A-sesquilinear forms and coercivity certificates.
//! - [`solver`]: representation solves, directed families, the scalar case.
//! - [`scenario`]: scenario files, built-in demonstrations and reports.

pub mod algebra;
pub mod dense;
pub mod error;
pub mod forms;
pub mod localization;
pub mod module_space;
pub mod random;
pub mod scenario;
pub mod solver;
pub mod state;

pub use algebra::{AlgebraElement, AlgebraShape, Tolerances};
pub use dense::{CMatrix, C64};
pub use error::{Error, Result};
pub use module_space::{DualFunctional, ModuleElement, ModuleSpace, Submodule};
pub use state::PureState;
