//! Exact sparse linear algebra over Z and F_p.

mod complex;
mod fp;
mod group;
mod matrix;
mod snf;

use thiserror::Error;

pub use complex::ChainComplex;
pub use fp::kernel_mod_p;
pub use group::{invariant_factors, AbGroupType, GradedGroup};
pub use matrix::IntMatrix;
pub use snf::{fp_rank, is_prime, smith_normal_form, smith_normal_form_with, SmithForm, CHECK_PRIMES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("entry ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    OutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} is too large for word-size field arithmetic")]
    PrimeTooLarge(u64),
    #[error("operation needs an integer matrix, found an F_p matrix")]
    ModulusSet,
    #[error("differentials over different coefficient rings")]
    ModulusMismatch,
    #[error("d∘d ≠ 0 at degree {0}")]
    NotAComplex(i64),
    #[error("invariant factor {0} does not fit in 64 bits")]
    TorsionTooLarge(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// Cokernel of an integer matrix.
pub fn group_of_two_term(f: &IntMatrix) -> Result<AbGroupType, LinError> {
    smith_normal_form(f)?.cokernel(f.rows())
}
