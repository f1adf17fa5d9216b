use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::{make_grid, GridScheme, RadialGrid, RadialProfile};
use crate::sharp::{build_unweighted_optimizer_on, build_weighted_optimizer_on, OptimizerProfile, VariantChoice};

/// Named radial test profiles shared by the battery and the command line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// `exp(−r²/2σ²)`, cut at `8σ`.
    Gaussian { sigma: f64 },
    /// `(1 − r)₊`.
    Triangle,
    /// 1 on `[0, 1 − w]`, a cosine ramp down to 0 at `r = 1`.
    SmoothedIndicator { width: f64 },
    /// `(1 − r²)²₊`.
    Bump,
    /// The extremal profile for the weight in use.
    Optimizer,
}

impl Family {
    pub const NAMES: [&'static str; 5] = ["gaussian", "triangle", "smoothed-indicator", "bump", "optimizer"];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Gaussian { .. } => "gaussian",
            Self::Triangle => "triangle",
            Self::SmoothedIndicator { .. } => "smoothed-indicator",
            Self::Bump => "bump",
            Self::Optimizer => "optimizer",
        }
    }

    /// Family from its name; `param` is σ or the ramp width.
    pub fn from_name(name: &str, param: Option<f64>) -> Result<Self> {
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::InvalidInput(format!("{what} must be positive, got {v}")))
            }
        };
        match name {
            "gaussian" => Ok(Self::Gaussian { sigma: positive(param.unwrap_or(1.0), "sigma")? }),
            "triangle" => Ok(Self::Triangle),
            "smoothed-indicator" => {
                let w = positive(param.unwrap_or(0.25), "width")?;
                if w > 1.0 {
                    return Err(Error::InvalidInput(format!("width must be at most 1, got {w}")));
                }
                Ok(Self::SmoothedIndicator { width: w })
            }
            "bump" => Ok(Self::Bump),
            "optimizer" => Ok(Self::Optimizer),
            _ => Err(Error::InvalidInput(format!(
                "unknown family {name:?}; expected one of {}",
                Self::NAMES.join(", ")
            ))),
        }
    }

    /// The four non-extremal families at their default parameters.
    pub fn standard() -> Vec<Self> {
        vec![
            Self::Gaussian { sigma: 0.5 },
            Self::Triangle,
            Self::SmoothedIndicator { width: 0.25 },
            Self::Bump,
        ]
    }

    pub fn default_r_max(&self) -> f64 {
        match self {
            Self::Gaussian { sigma } => 8.0 * sigma,
            _ => 1.5,
        }
    }

    /// Default uniform grid with `cells` cells on `[0, r_max]`.
    pub fn grid(&self, n: usize, r_max: Option<f64>, cells: usize) -> Result<Arc<RadialGrid>> {
        let r_max = r_max.unwrap_or_else(|| self.default_r_max());
        let cells = if *self == Self::Optimizer {
            // keep r = 1 on a node
            if r_max <= 1.0 {
                return Err(Error::InvalidInput(format!("optimizer needs r_max > 1, got {r_max}")));
            }
            let per_unit = (cells as f64 / r_max / 2.0).ceil().max(8.0) * 2.0;
            let m = (per_unit * r_max).round();
            if (m / per_unit - r_max).abs() > 1e-12 * r_max {
                return Err(Error::InvalidInput(format!(
                    "r_max = {r_max} cannot place r = 1 on a uniform node; try r_max = 1.5"
                )));
            }
            m as usize
        } else {
            cells
        };
        Ok(Arc::new(make_grid(n, r_max, cells, GridScheme::Uniform)?))
    }

    /// Sample on `grid`; `p` selects the optimizer (0 or 2).
    pub fn profile_on(&self, grid: Arc<RadialGrid>, p: f64) -> Result<RadialProfile> {
        match *self {
            Self::Gaussian { sigma } => {
                let cut = 8.0 * sigma;
                RadialProfile::from_fn(grid, |r| if r <= cut { (-r * r / (2.0 * sigma * sigma)).exp() } else { 0.0 })
            }
            Self::Triangle => RadialProfile::from_fn(grid, |r| (1.0 - r).max(0.0)),
            Self::SmoothedIndicator { width } => RadialProfile::from_fn(grid, |r| {
                if r <= 1.0 - width {
                    1.0
                } else if r < 1.0 {
                    0.5 * (1.0 + (std::f64::consts::PI * (r - 1.0 + width) / width).cos())
                } else {
                    0.0
                }
            }),
            Self::Bump => RadialProfile::from_fn(grid, |r| {
                let s = (1.0 - r * r).max(0.0);
                s * s
            }),
            Self::Optimizer => Ok(optimizer_on(grid, p)?.g),
        }
    }

    pub fn profile(&self, n: usize, p: f64, cells: usize) -> Result<RadialProfile> {
        self.profile_on(self.grid(n, None, cells)?, p)
    }
}

/// The unweighted (`p = 0`) or accepted weighted (`p = 2`) optimizer on `grid`.
pub fn optimizer_on(grid: Arc<RadialGrid>, p: f64) -> Result<OptimizerProfile> {
    if p == 0.0 {
        build_unweighted_optimizer_on(grid, 1.0)
    } else if p == 2.0 {
        Ok(build_weighted_optimizer_on(grid, VariantChoice::Auto)?.accepted.profile)
    } else {
        Err(Error::InvalidInput(format!("optimizer profiles exist for p = 0 and p = 2, got {p}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in Family::NAMES {
            assert_eq!(Family::from_name(name, None).unwrap().name(), name);
        }
        assert!(Family::from_name("cauchy", None).is_err());
        assert!(Family::from_name("gaussian", Some(-1.0)).is_err());
        assert!(Family::from_name("smoothed-indicator", Some(2.0)).is_err());
    }

    #[test]
    fn families_are_nonnegative_nonincreasing() {
        for f in Family::standard() {
            let g = f.profile(3, 0.0, 256).unwrap();
            assert!(g.is_nonnegative(), "{}", f.name());
            assert!(g.is_nonincreasing(), "{}", f.name());
        }
    }

    #[test]
    fn gaussian_tail_is_negligible() {
        let sigma = 0.5;
        let g = Family::Gaussian { sigma }.profile(3, 0.0, 256).unwrap();
        let last = *g.values().last().unwrap();
        assert!(last < 1e-13);
    }

    #[test]
    fn optimizer_grid_has_node_at_one() {
        let grid = Family::Optimizer.grid(3, None, 1000).unwrap();
        assert!(grid.node_index(1.0).is_some());
    }
}
