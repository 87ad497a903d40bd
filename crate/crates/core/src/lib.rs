//! corrkit-core: a numerical calculus of bimodules (correspondences) over
//! finite-dimensional tracial multi-matrix algebras.
//!
//! The crate provides, at finite dimension where everything is exactly
//! computable:
//!
//! * [`matalg`] — multi-matrix algebras with a weighted faithful trace and
//!   spectral functional calculus;
//! * [`bimodule`] — correspondences (commuting left/right actions), the
//!   trivial and coarse examples, direct sums, axiom validation;
//! * [`boundcalc`] — bound certificates for vectors, spectral cutoffs,
//!   subtracial renormalization and sequence uniformization;
//! * [`cpdict`] — the dictionary between completely positive maps and cyclic
//!   correspondences, plus cyclic decomposition;
//! * [`analysis`] — Fell-neighborhood residuals, weak containment,
//!   commutator defects and central-vector machinery;
//! * [`sigmafin`] — GNS data for faithful states, right-multiplication
//!   bounds, the sharp norm and the modular flow;
//! * [`statial`] — distinguished state families on a C*-algebra and the
//!   associated two-sided L² seminorm.
//!
//! All randomized routines take explicit seeds ([`random`]) and all values
//! are immutable after construction, so everything is safe to call from
//! concurrent threads.

pub mod analysis;
pub mod bimodule;
pub mod boundcalc;
pub mod cpdict;
pub mod descriptor;
pub mod error;
pub mod linalg;
pub mod matalg;
pub mod random;
pub mod sigmafin;
pub mod solvers;
pub mod statial;

pub use error::{CorrError, Result};
pub use linalg::{CMat, CVec};
