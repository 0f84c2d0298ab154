//! Index sets, determinantal expressions and set row/column operations.

mod expr;
mod index_set;
pub mod json;
mod ops;

pub use expr::{int, DetExpr, Minor, Relation, Term};
pub use index_set::{IndexSet, IndexSetIter, MAX_AMBIENT};
pub use ops::{
    apply_op, apply_op_unmerged, apply_sequence, apply_sequence_unmerged, inverse_sequence,
    is_certifiably_false, multiplicity, shift_multiplicity, shift_set, term_shift_count, Axis,
    OpApplicationReport, OpSpec,
};
