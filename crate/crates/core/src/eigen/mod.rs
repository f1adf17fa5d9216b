//! Radial eigenfunctions of `−Δ` on the unit ball and their boundary roots.

mod bessel;
mod roots;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use bessel::{radial_bessel, radial_bessel_many};

use crate::error::{Error, Result};
use crate::radial::{make_grid, GridScheme, RadialGrid, RadialProfile};
use roots::{first_root, SCAN_START};

/// Upper end of every root search.
pub const SEARCH_LIMIT: f64 = 4.0 * PI;

/// Cells of the default profile grid on `[0, 1]`.
pub const PROFILE_CELLS: usize = 1024;

/// Right-hand side of the weighted consistency equation
/// `λJ'(λ)/J(λ) = k λ²/(λ² − 2n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConsistencyVariant {
    /// `k = 1`.
    Printed,
    /// `k = 2`, from `ρ = 2/(1 − 2nC)`, `C = 1/λ²`.
    Rederived,
}

impl ConsistencyVariant {
    pub fn factor(self) -> f64 {
        match self {
            Self::Printed => 1.0,
            Self::Rederived => 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Printed => "printed",
            Self::Rederived => "rederived",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum EigenKind {
    Neumann,
    Robin { rho: f64 },
    Consistency { variant: ConsistencyVariant },
}

/// A root `λ` together with `r ↦ J(λr)` sampled on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct EigenSolution {
    pub dim: usize,
    pub lambda: f64,
    /// `μ = λ²`.
    pub mu: f64,
    pub profile: RadialProfile,
    /// `J(λ)`.
    pub boundary_value: f64,
    /// `λ J'(λ)`.
    pub boundary_slope: f64,
    pub kind: EigenKind,
    /// Sign-changing bracket that encloses `λ`.
    pub bracket: (f64, f64),
    /// The search interval in which the root was found.
    pub searched: (f64, f64),
}

impl EigenSolution {
    fn build(
        n: usize,
        lambda: f64,
        bracket: (f64, f64),
        searched: (f64, f64),
        kind: EigenKind,
    ) -> Result<Self> {
        let grid = Arc::new(make_grid(n, 1.0, PROFILE_CELLS, GridScheme::Uniform)?);
        let profile = sample_j(grid, lambda)?;
        let (j, dj) = radial_bessel(n, lambda);
        Ok(Self {
            dim: n,
            lambda,
            mu: lambda * lambda,
            profile,
            boundary_value: j,
            boundary_slope: lambda * dj,
            kind,
            bracket,
            searched,
        })
    }

    /// `J(λr)` on another grid.
    pub fn sample_on(&self, grid: Arc<RadialGrid>) -> Result<RadialProfile> {
        sample_j(grid, self.lambda)
    }

    /// `λJ'(λ)/J(λ)`.
    pub fn robin_ratio(&self) -> f64 {
        self.boundary_slope / self.boundary_value
    }
}

/// `r ↦ J(λr)` at the nodes of `grid`.
pub fn sample_j(grid: Arc<RadialGrid>, lambda: f64) -> Result<RadialProfile> {
    let n = grid.dim();
    let scaled: Vec<f64> = grid.nodes().iter().map(|r| lambda * r).collect();
    let values = radial_bessel_many(n, &scaled).into_iter().map(|(j, _)| j).collect();
    RadialProfile::new(grid, values)
}

fn check_dim(n: usize) -> Result<()> {
    if (1..=10).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("dimension must be in 1..=10, got {n}")))
    }
}

/// First positive root of `J'(λ) = 0`; `μ₁ = λ²`.
pub fn neumann_mu1(n: usize) -> Result<EigenSolution> {
    check_dim(n)?;
    let (lam, br) = first_root(n, SCAN_START, SEARCH_LIMIT, |_, _, dj| dj)?;
    EigenSolution::build(n, lam, br, (SCAN_START, SEARCH_LIMIT), EigenKind::Neumann)
}

/// Smallest `λ > 0` with `λJ'(λ) = ρJ(λ)` in `(0, 4π]`.
pub fn robin_eigen(n: usize, rho: f64) -> Result<EigenSolution> {
    robin_eigen_within(n, rho, SEARCH_LIMIT)
}

/// As [`robin_eigen`] but searching only up to `hi`.
pub fn robin_eigen_within(n: usize, rho: f64, hi: f64) -> Result<EigenSolution> {
    check_dim(n)?;
    if !rho.is_finite() {
        return Err(Error::InvalidInput("Robin ratio must be finite".into()));
    }
    let (lam, br) = first_root(n, SCAN_START, hi, |l, j, dj| l * dj - rho * j)?;
    EigenSolution::build(n, lam, br, (SCAN_START, hi), EigenKind::Robin { rho })
}

/// Smallest positive root of `λJ'(λ)(λ² − 2n) = kλ²J(λ)`, searched first in
/// `(0, √(2n))` and then in `(√(2n), 4π)`.
pub fn consistency_root(n: usize, variant: ConsistencyVariant) -> Result<EigenSolution> {
    check_dim(n)?;
    let k = variant.factor();
    let two_n = 2.0 * n as f64;
    let f = |l: f64, j: f64, dj: f64| l * dj * (l * l - two_n) - k * l * l * j;
    let s = two_n.sqrt();
    let kind = EigenKind::Consistency { variant };
    // stop the first scan just short of √(2n), where the equation degenerates
    let inner_hi = s * (1.0 - 1e-12);
    match first_root(n, SCAN_START, inner_hi, f) {
        Ok((lam, br)) => EigenSolution::build(n, lam, br, (0.0, s), kind),
        Err(_) => {
            let lo = s * (1.0 + 1e-12);
            let (lam, br) = first_root(n, lo, SEARCH_LIMIT, f)?;
            EigenSolution::build(n, lam, br, (s, SEARCH_LIMIT), kind)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::radial_laplacian;

    #[test]
    fn neumann_n1_is_pi() {
        let s = neumann_mu1(1).unwrap();
        assert!((s.lambda - PI).abs() < 1e-10);
        assert!(s.bracket.1 - s.bracket.0 <= 1e-12);
    }

    #[test]
    fn robin_zero_is_neumann() {
        let a = robin_eigen(3, 0.0).unwrap();
        let b = neumann_mu1(3).unwrap();
        assert!((a.lambda - b.lambda).abs() < 1e-11);
    }

    #[test]
    fn robin_round_trip() {
        let (j, dj) = radial_bessel(3, 1.0);
        let s = robin_eigen(3, dj / j).unwrap();
        assert!((s.lambda - 1.0).abs() < 1e-11);
        assert!((s.robin_ratio() - dj / j).abs() < 1e-9);
    }

    #[test]
    fn robin_error_names_bracket() {
        // for ρ > 0 the ratio is negative on (0, first zero of J)
        match robin_eigen_within(3, 1.0, 3.0) {
            Err(Error::RootNotFound { hi, .. }) => assert_eq!(hi, 3.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn helmholtz_residual_second_order() {
        let s = neumann_mu1(3).unwrap();
        let res = |m: usize| {
            let g = Arc::new(make_grid(3, 1.0, m, GridScheme::Uniform).unwrap());
            let p = s.sample_on(g).unwrap();
            let lap = radial_laplacian(&p);
            (0..m)
                .map(|i| (lap.values()[i] + s.mu * p.values()[i]).abs())
                .fold(0.0, f64::max)
        };
        let (a, b) = (res(128), res(256));
        assert!(a / b > 3.5, "{a} {b}");
    }

    #[test]
    fn j_decreases_before_first_zero() {
        for n in [1, 2, 3, 5] {
            let rs: Vec<f64> = (1..400).map(|i| i as f64 * 0.01).collect();
            let v = radial_bessel_many(n, &rs);
            let mut prev = 1.0;
            for (j, dj) in v {
                if j <= 0.0 {
                    break;
                }
                assert!(dj < 0.0 && j < prev);
                prev = j;
            }
        }
    }

    #[test]
    fn goldens() {
        let cases = [
            (neumann_mu1(3).unwrap().lambda, 4.4934094579),
            (neumann_mu1(2).unwrap().lambda, 3.8317059702),
            (consistency_root(3, ConsistencyVariant::Printed).unwrap().lambda, 1.969866462877),
            (consistency_root(3, ConsistencyVariant::Rederived).unwrap().lambda, 3.870238580222),
            (consistency_root(1, ConsistencyVariant::Printed).unwrap().lambda, 1.265286065402),
            (robin_eigen(1, -1.0).unwrap().lambda, 0.860333589019),
        ];
        for (got, want) in cases {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn consistency_brackets() {
        let p = consistency_root(3, ConsistencyVariant::Printed).unwrap();
        assert_eq!(p.searched.0, 0.0);
        let r = consistency_root(3, ConsistencyVariant::Rederived).unwrap();
        assert!(r.searched.0 > 2.44 && r.lambda > 6f64.sqrt());
    }
}
