//! Parallel transport along base paths, splitting of extension paths and
//! homotopies, and the monodromy of base homotopies and spheres.

mod monodromy;
mod split;
mod transport;

pub use monodromy::{
    cocycle_check, concatenate_homotopies, connecting_partial2, group_element, monodromy_partial,
    split_homotopy_check, transported_curvature, unsplit_family, MonodromyElement, SplitHomotopy,
};
pub use split::{concat_split, split_path, unsplit, SplitPath};
pub use transport::{parallel_transport, transport_nodes, Transport};
