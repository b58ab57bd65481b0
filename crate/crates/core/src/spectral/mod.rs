//! The spectral sequence of an extension: bigraded splitting of cochains by
//! a connection, the three components of the differential, and the pages of
//! the filtration by horizontal degree.

mod bigraded;
mod pages;

pub use bigraded::{
    decompose, delta01, delta01_matrix, delta10, delta10_matrix, delta21, delta21_matrix, recompose,
    verify_relations, verify_sum_decomposition, verify_sum_decomposition_all, BigradedCochain,
};
pub use pages::{abutment, all_pages, page, Abutment, FilteredComplex, Page, PageEntry};
