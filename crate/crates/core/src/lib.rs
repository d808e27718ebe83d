//! Normal forms and deduplication of fast matrix multiplication schemes over
//! small prime fields.
//!
//! A scheme with `r` rows for `n x n` matrices is a table of `r x 3`
//! matrices `(A_l, B_l, C_l)`; it is valid when the sum of the tensors
//! `A_l ⊗ B_l ⊗ C_l` is the tensor of `C^T = A B`. Equivalent schemes (related
//! by row and column permutations and by sandwiching with invertible
//! matrices) share a unique normal form, so deduplicating a collection
//! reduces to hashing normal forms.

pub mod canon;
pub mod cli;
pub mod error;
pub mod field;
pub mod index;
pub mod matrix;
pub mod scheme;
pub mod symmetry;

pub use canon::{
    brute_force_normal_form, equivalent, equivalent_with, is_normal_form, minimize_row, normal_form, normal_form_with,
    row_stabilizer, Limits, NormalFormResult, Stabilizer,
};
pub use error::{Error, Result};
pub use field::{Field, FieldElement};
pub use index::{DedupeIndex, IndexError};
pub use matrix::{enumerate_gl, minimal_biequivalent, solve_sandwich, GlSet, Mat};
pub use scheme::{parse, scheme_cmp, sorted_pattern_symmetries, ColumnSymmetry, RankPattern, Row, Scheme};
pub use symmetry::{random_element, Permutation, SandwichTriple, SymmetryElement};
