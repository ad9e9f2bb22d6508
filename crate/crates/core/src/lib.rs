//! A laboratory for finite groupoids and their reduced C*-algebras.
//!
//! In the finite discrete setting the reduced algebra `C*_r(G)` is the
//! convolution algebra of complex functions on arrows, normed by the maximum
//! over units `x` of the operator norm of the left regular representation on
//! `ℓ²(G_x)`. This crate computes that algebra and its norms, Schur-multiplier
//! completely bounded norms via the γ₂ factorization SDP, and checks the
//! structure theorems (support containment, inner exactness, the Galois
//! correspondence for intermediate algebras, and the spectral theorem for
//! diagonal bimodules) on concrete instances.

pub mod algebra;
pub mod corpus;
pub mod error;
pub mod exec;
pub mod gamma2;
pub mod groupoid;
pub mod io;
pub mod linalg;
pub mod multiplier;
pub mod report;
pub mod sdp;
pub mod subspace;
pub mod theorems;

pub use algebra::{ArrowFunction, RepBlock};
pub use error::{Error, Result};
pub use exec::Exec;
pub use groupoid::{ArrowSet, FiniteGroupoid, GroupAction, Groupoid};
pub use multiplier::{FejerNet, MultiplierSymbol, UnitMeasure};
pub use subspace::{SubspaceBasis, SubspaceKind};

pub use num_complex::Complex64;
