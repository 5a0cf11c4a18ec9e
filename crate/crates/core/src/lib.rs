//! Exact arithmetic for structured matrices over prime fields.
//!
//! A matrix `A` of size `m x n` is represented by a generator `(G, H)` with
//! `L(A) = G H^t` for a Sylvester operator `A -> M A - A N` or a Stein operator
//! `A -> A - M A N`, where `M`, `N` are block companion matrices of polynomial
//! families. The crate provides reconstruction, fast structured times dense
//! products, Las Vegas inversion and system solving, and a dense oracle.

pub mod error;
pub mod field;
pub mod generators;
pub mod matrix;
pub mod operators;
pub mod oracle;
pub mod pade;
pub mod poly;
pub mod polymat;
pub mod structmul;
pub mod structsolve;

pub use error::{Error, Result};
pub use field::{Fp, Modulus, F, P62, P7, P998};
pub use generators::{gen_matvec, reconstruct_dense, toeplitz_operator, Generator};
pub use matrix::DenseMatrix;
pub use operators::{op_invertible, DisplacementOperator, OperatorKind};
pub use pade::{pade_solve, PadeOutcome, PadeProblem};
pub use poly::family::{Flavor, FlavorHint, PolyFamily};
pub use poly::Poly;
pub use structmul::struct_mul;
pub use structsolve::{inv, solve, InvOutcome, SolveOutcome, SolverConfig};
