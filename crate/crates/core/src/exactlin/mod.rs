//! Exact linear algebra over ℤ, ℤ[T, T⁻¹] and prime fields.

pub mod field;
pub mod laurent;
pub mod matrix;
pub mod nilpotent;
pub mod ring;
pub mod snf;

pub use field::{Field, FpMatrix};
pub use laurent::LaurentPoly;
pub use matrix::{IntMatrix, LaurentMatrix, Matrix};
pub use nilpotent::{
    invert_id_plus_nilpotent, is_nilpotent_upper, laurent_eval, BlockOrder, EvalPoint, Evaluated,
    NilpotencyWitness,
};
pub use ring::Ring;
pub use snf::{cokernel_presentation, smith_normal_form, SnfDecomposition};
