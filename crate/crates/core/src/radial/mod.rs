//! Radial functions on `ℝⁿ`: grids, profiles, quadrature, Newton potentials.

mod csvio;
mod grid;
mod laplacian;
mod potential;
mod profile;

pub use csvio::{read_profile_csv, write_columns, write_profile_csv, ProfileTable};
pub use grid::{ball_volume, gamma_half, make_grid, surface_area, GridScheme, RadialGrid};
pub use laplacian::radial_laplacian;
pub use potential::{hminus1_from, hminus1_sq, newton_potential, PotentialResult, MASS_TOL};
pub use profile::{inner, integrate, lp_norm, rescale, Norm, RadialProfile, Tail};
