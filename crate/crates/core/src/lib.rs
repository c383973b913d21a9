//! Gerber-Shiu discounted penalty functions for renewal risk processes
//! perturbed by Brownian motion.
//!
//! The surplus process is `U(t) = u + c t - sum Z_i + sigma B(t)` with
//! phase-type interclaim times and claim amounts from the rational family
//! (densities whose Laplace transform is a ratio of polynomials). The solver
//! returns the penalty function split into the part caused by a claim
//! (`phi_w`) and the part caused by diffusion oscillation (`phi_d`), both as
//! closed-form exponential polynomials in the initial capital `u`.
//!
//! All numerical code is generic over the scalar type through [`Real`];
//! the aliases at the crate root fix it to `f64`, which is what the CLI and
//! the Monte Carlo simulator use.

// NaN must fail validation, so `!(x > 0)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod claims;
pub mod error;
pub mod exppoly;
pub mod lundberg;
pub mod model;
pub mod phase_type;
pub mod polyalg;
pub mod scalar;
pub mod simulate;
pub mod solver;

pub use claims::{Penalty, PenaltyKind, RationalClaim};
pub use error::{Error, Result};
pub use exppoly::{ExpPoly, Term};
pub use lundberg::{find_roots, LundbergRoots};
pub use model::RiskModel;
pub use phase_type::PhaseType;
pub use polyalg::{CMatrix, Poly};
pub use scalar::{Real, Tolerances};
pub use simulate::{Outcome, SimConfig, SimEstimate};
pub use solver::{
    laplace_solution, ruin_prob_special, solve, solve_with_roots, GerberShiuSolution, SolutionDiagnostics,
};

pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type Poly64 = Poly<f64>;
pub type CMatrix64 = CMatrix<f64>;
pub type ExpPoly64 = ExpPoly<f64>;
pub type PhaseType64 = PhaseType<f64>;
pub type RationalClaim64 = RationalClaim<f64>;
pub type Penalty64 = Penalty<f64>;
pub type RiskModel64 = RiskModel<f64>;
pub type LundbergRoots64 = LundbergRoots<f64>;
pub type GerberShiuSolution64 = GerberShiuSolution<f64>;

pub type Poly32 = Poly<f32>;
pub type CMatrix32 = CMatrix<f32>;
pub type ExpPoly32 = ExpPoly<f32>;
