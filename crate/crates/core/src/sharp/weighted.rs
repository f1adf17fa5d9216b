use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::eigen::{consistency_root, radial_bessel, radial_bessel_many, ConsistencyVariant};
use crate::error::{Error, Result};
use crate::radial::{integrate, lp_norm, make_grid, newton_potential, GridScheme, Norm, RadialGrid, RadialProfile};
use crate::verify::el_residual;

use super::unweighted::OPTIMIZER_CELLS;
use super::{OptimizerMeta, OptimizerProfile};

/// Largest accepted relative Euler–Lagrange residual.
pub const EL_TRIPWIRE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantChoice {
    Printed,
    Rederived,
    Auto,
}

impl VariantChoice {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "printed" => Some(Self::Printed),
            "rederived" => Some(Self::Rederived),
            "auto" => Some(Self::Auto),
            _ => None,
        }
    }
}

/// One weighted candidate before adjudication.
#[derive(Clone, Debug)]
pub struct WeightedCandidate {
    pub variant: ConsistencyVariant,
    pub profile: OptimizerProfile,
    /// `max |C(−Δ)g − (g − α r²)|` on the open unit ball.
    pub el_residual: f64,
    /// The same, divided by `‖g‖_∞`.
    pub el_relative: f64,
}

/// Build `g` from one consistency variant on `grid` (unit ball, node at 1).
pub fn weighted_candidate(grid: Arc<RadialGrid>, variant: ConsistencyVariant) -> Result<WeightedCandidate> {
    let n = grid.dim();
    let k1 = grid
        .node_index(1.0)
        .ok_or_else(|| Error::InvalidGrid("r = 1 must be a grid node".into()))?;
    let eig = consistency_root(n, variant)?;
    let lam = eig.lambda;
    let c_const = 1.0 / (lam * lam);
    let rho0 = variant.factor() * lam * lam / (lam * lam - 2.0 * n as f64);
    let (j1, _) = radial_bessel(n, lam);
    let amp = (2.0 / rho0) / j1;

    let scaled: Vec<f64> = grid.nodes().iter().map(|r| lam * r).collect();
    let js = radial_bessel_many(n, &scaled);
    let shift = -1.0 + 2.0 / rho0;
    let g0: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(&js)
        .enumerate()
        // g0(1) = 0 exactly
        .map(|(i, (&r, &(j, _)))| if i < k1 { amp * j - (r * r + shift) } else { 0.0 })
        .collect();
    let g0 = RadialProfile::new(grid.clone(), g0)?;
    // r² 1_B, with the jump at r = 1
    let quad: Vec<f64> = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &r)| if i <= k1 { r * r } else { 0.0 })
        .collect();
    let mut quad = RadialProfile::new(grid.clone(), quad)?;
    if k1 + 1 < grid.len() {
        quad = quad.with_jump(k1, 0.0)?;
    }
    let alpha0 = integrate(&g0, 0.0)? / integrate(&quad, 0.0)?;
    let model = quad.scaled(alpha0);
    let pot = newton_potential(&g0.sub(&model)?)?;
    let s = 1.0 / pot.weighted_phi_integral(2.0);
    if !s.is_finite() {
        return Err(Error::InvalidInput("weighted normalization is singular".into()));
    }
    let g = g0.scaled(s);
    let res = el_residual(&g, c_const, 2.0)?;
    let scale = lp_norm(&g, Norm::Inf)?;
    Ok(WeightedCandidate {
        variant,
        el_residual: res,
        el_relative: res / scale,
        profile: OptimizerProfile {
            g,
            meta: OptimizerMeta::Weighted {
                lambda0: lam,
                rho0,
                alpha: s * alpha0,
                c_const,
                variant,
                normalization: s,
            },
        },
    })
}

/// Both candidates and the accepted one.
#[derive(Clone, Debug)]
pub struct WeightedBuild {
    pub accepted: WeightedCandidate,
    pub printed: WeightedCandidate,
    pub rederived: WeightedCandidate,
}

pub fn weighted_grid(n: usize) -> Result<Arc<RadialGrid>> {
    Ok(Arc::new(make_grid(n, 1.5, OPTIMIZER_CELLS, GridScheme::Uniform)?))
}

/// Weighted (`p = 2`) optimizer. `Auto` keeps the variant with the smaller
/// Euler–Lagrange residual and fails if neither is below [`EL_TRIPWIRE`].
pub fn build_weighted_optimizer(n: usize, choice: VariantChoice) -> Result<WeightedBuild> {
    build_weighted_optimizer_on(weighted_grid(n)?, choice)
}

/// As [`build_weighted_optimizer`] on a given grid with a node at `r = 1`.
pub fn build_weighted_optimizer_on(grid: Arc<RadialGrid>, choice: VariantChoice) -> Result<WeightedBuild> {
    let printed = weighted_candidate(grid.clone(), ConsistencyVariant::Printed)?;
    let rederived = weighted_candidate(grid, ConsistencyVariant::Rederived)?;
    let accepted = match choice {
        VariantChoice::Printed => printed.clone(),
        VariantChoice::Rederived => rederived.clone(),
        VariantChoice::Auto => {
            let best = if rederived.el_relative <= printed.el_relative { &rederived } else { &printed };
            if !(best.el_relative < EL_TRIPWIRE) {
                return Err(Error::VariantTripwire {
                    printed: printed.el_relative,
                    rederived: rederived.el_relative,
                });
            }
            best.clone()
        }
    };
    Ok(WeightedBuild { accepted, printed, rederived })
}
