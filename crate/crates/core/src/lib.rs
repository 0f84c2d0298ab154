//! Determinantal expressions over totally nonnegative matrices.
//!
//! The crate represents signed sums of products of minors ([`DetExpr`]),
//! transforms them with set row/column operations, decides the smallest
//! multiplicative inequalities, generates the classical additive families
//! and checks all of it with exact rational arithmetic against independent
//! minor oracles.

pub mod error;
pub mod expr_core;
pub mod families;
pub mod harness;
pub mod multiplicative;
pub mod planar_net;
pub mod tn_matrix;

pub use error::{Error, Result};
pub use expr_core::{
    apply_op, apply_op_unmerged, apply_sequence, inverse_sequence, is_certifiably_false,
    multiplicity, shift_multiplicity, shift_set, Axis, DetExpr, IndexSet, Minor,
    OpApplicationReport, OpSpec, Relation, Term,
};
pub use tn_matrix::{BidiagFactor, BidiagFactorization, Matrix, Scalar};
