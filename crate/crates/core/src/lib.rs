//! Equivariant tracking control for fully actuated mechanical systems on
//! matrix Lie groups, instantiated on SO(3).
//!
//! The crate is layered bottom-up:
//!
//! - [`group`]: SO(3) with the fixed identification `so(3) ≅ ℝ³ ≅ so*(3)`;
//!   hat/vee, exp/log, `Ad`, `Ad*`, `ad`, `ad*` and the dual pairing.
//! - [`semidirect`]: the phase-space group `SO(3) ⋉ so*(3)` acting on
//!   `(Q, P)`, its trivialized tangent maps, adjoint and bracket.
//! - [`lie_poisson`]: extended/constrained Lie-Poisson vector fields,
//!   kinetic-energy Hamiltonians (constant or time-varying inertia), an
//!   RKMK4 stepper and a fixed-step closed-loop simulator.
//! - [`tracking`]: the right-invariant error `E = X X_d⁻¹`, error inputs,
//!   error inertia and recovery of the physical torque.
//! - [`control`]: navigation function, the energy-shaping stabilizer, the
//!   group-generic tracker and the four closed-form SO(3) tracking laws.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod group;
pub mod lie_poisson;
pub mod semidirect;
pub mod tracking;

mod error;

pub use error::{Error, Result};
pub use group::{AlgebraVec, CoalgebraVec, Rotation};
pub use semidirect::{SemidirectAlgebra, SemidirectElement};

/// 3×3 real matrix.
pub type Mat3 = nalgebra::Matrix3<f64>;
/// Plain 3-vector, used where no algebra/coalgebra role applies.
pub type Vec3 = nalgebra::Vector3<f64>;
