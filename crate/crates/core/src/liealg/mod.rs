//! Lie algebras given by structure constants, their derivations and flows,
//! and Chevalley-Eilenberg cohomology.

mod algebra;
mod cochain;
mod flow;

pub use algebra::{
    abelian, aff1, heisenberg, sl2, so3, unit, Derivation, JacobiReport, LieAlgebra, Violation, ViolationKind,
};
pub(crate) use cochain::ce_matrix;
pub use cochain::{ce_differential, cohomology_dims, Cochain, Representation};
pub use flow::{automorphism_defect, derivation_flow};
