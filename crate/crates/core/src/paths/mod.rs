//! Paths in a Lie algebra, homotopies given by the evolution equation,
//! flow commutation and spheres.

mod evolution;
mod grid;
mod path;
mod sphere;

pub(crate) use evolution::{faithful, rep_flow};
pub(crate) use grid::Structure;

pub use evolution::{
    is_homotopy, is_homotopy_default, reparametrization_family, solve_evolution, solve_evolution_integral,
    verify_hgeom,
};
pub use grid::{tol_grid, ASphere, Grid, HomotopyGrid};
pub use path::{concatenate, flatten, flatten_rate, reverse, APath};
pub use sphere::{sphere_theta, sphere_theta_ok, BetaJet, ExponentialFamily, Profile, SphereFamily, ThetaReport};
