//! Derived functors of divided, exterior and symmetric powers on free abelian
//! groups, computed by brute force through the Dold-Kan construction and
//! checked against closed-form descriptions.

pub mod cartan;
pub mod closedform;
pub mod conjecture;
pub mod doldkan;
pub mod exactlin;
pub mod exec;
pub mod koszul;
pub mod polyfunc;

mod combi;

pub use exactlin::{AbGroupType, ChainComplex, GradedGroup, IntMatrix};
pub use exec::Exec;
