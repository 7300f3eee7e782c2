//! Drazin, group and pseudo-Drazin inverses in concrete finite-dimensional
//! Banach algebras, together with constructive additive and product formulas
//! and a verification layer that compares each formula against a
//! definition-based oracle.

pub mod context;
pub mod drazin;
pub mod element;
pub mod error;
pub mod generators;
pub mod identities;
pub mod linalg;
pub mod report;
pub mod series;
pub mod tolerance;
pub mod verify;

pub use context::{AlgebraContext, ContextKind};
pub use drazin::{
    check_pdrazin_axioms, drazin_index, drazin_inverse, drazin_power_formula, group_inverse,
    is_numerically_zero, is_quasinilpotent, numerical_rank, pdrazin, PDrazinResult,
    Quasinilpotence,
};
pub use element::{validate_element, AlgebraElement};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use num_complex::Complex64;
pub use report::VerificationReport;
pub use series::{terminating_series, terminating_series_scaled, SeriesPolicy, SeriesSum};
pub use tolerance::Tolerances;
pub use verify::{generate, verify, Identity, Instance};
