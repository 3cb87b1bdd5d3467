//! Symmetry classification of linear systems of three second-order ODEs.
//!
//! The crate is `no_std` and only needs `alloc`. Modules:
//!
//! * [`expr`]: exact computer algebra (normal forms, derivatives, zero tests);
//! * [`jordan`]: real Jordan types of 3x3 matrices;
//! * [`symmetry`]: prolongations and determining-equation residuals;
//! * [`canonical`]: the four canonical linear systems and their generators;
//! * [`families`]: general solution families of the determining equations;
//! * [`equivalence`]: equivalence transformations and generator normalization;
//! * [`classify`]: fitting a linear system to its canonical form.
#![no_std]

extern crate alloc;

pub mod expr;
pub mod linalg;
pub mod jordan;
pub mod symmetry;
pub mod canonical;
pub mod families;
pub mod equivalence;
pub mod classify;

pub use expr::{parse, parse_with, Expr};
