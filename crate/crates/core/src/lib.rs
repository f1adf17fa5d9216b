//! Numerics for the dual Nash inequality on radial profiles.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod error;
pub mod infconv;
pub mod numfmt;
pub mod quadrature;
pub mod radial;
pub mod sharp;
pub mod verify;

pub use error::{Error, Result};
pub use radial::{
    hminus1_sq, integrate, lp_norm, make_grid, newton_potential, radial_laplacian, rescale,
    GridScheme, Norm, PotentialResult, RadialGrid, RadialProfile, Tail,
};
pub use eigen::{
    consistency_root, neumann_mu1, radial_bessel, robin_eigen, ConsistencyVariant, EigenKind,
    EigenSolution,
};
pub use infconv::{infconv_value, optimal_c, projected_solve, truncation_h, CScan, InfConvSolution, Subproblem};
pub use sharp::{build_unweighted_optimizer, build_weighted_optimizer, constants_report, exponents, suboptimal_k, ConstantsReport, OptimizerMeta, OptimizerProfile, VariantChoice};
pub use verify::{dual_quotient, el_residual, nash_quotient, run_battery, BatterySpec, Family, VerificationReport};
