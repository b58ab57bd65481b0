//! Extensions of a base Lie algebra by a kernel, described by couples
//! `(D, ω)`: admissibility, the split bracket, gauge transformations and
//! equivalence.

mod build;
mod couple;
mod gauge;
mod random;
mod special;

pub use build::{build_extension, ExtendedAlgebra};
pub use couple::{
    covariant_differential, covariant_matrix, curv_d, is_admissible, AdmissibilityReport, Check, Couple,
};
pub use gauge::{apply_gauge, are_equivalent, is_shift_isomorphism, shift_isomorphism_residual, Equivalence, GaugeTransform};
pub use random::{random_admissible, random_perturbed};
pub use special::{central, heisenberg_couple, semidirect, so3_kernel_couple, so3_semidirect};
