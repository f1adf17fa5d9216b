//! The infimal convolution
//! `𝒢(g) = inf_h ½‖g − h‖²_{H^{-1}} + ‖h/|x|^p‖_∞`
//! for radial `g`, split as `𝒢 = min_c c + A_g(c)`.

mod optimal;
mod projected;
mod shell;
mod structure;
mod truncation;

use serde::Serialize;

pub use optimal::{
    c_scan, infconv_value, infconv_value_with, optimal_c, optimal_c_with, CScan, Diagnostics,
    InfConvOptions, InfConvRecord, InfConvSolution, OptimalC,
};
pub use projected::{projected_solve, MAX_ITERATIONS};
pub use shell::ShellModel;
pub use structure::{classify, structure_report, NodeState, StructureReport};
pub use truncation::truncation_h;

use crate::error::{Error, Result};
use crate::radial::RadialProfile;

/// Which solver produced a subproblem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverPath {
    Truncation,
    Projected,
}

/// Minimizer of the inner problem `A_g(c)` at a fixed budget `c`.
#[derive(Clone, Debug)]
pub struct Subproblem {
    pub c: f64,
    pub p: f64,
    pub h: RadialProfile,
    /// Potential of `g − h`.
    pub phi: RadialProfile,
    /// `A_g(c)`.
    pub a_value: f64,
    /// Radius of the ball whose volume equals that of the active set.
    pub free_radius: f64,
    /// Whether the mass of `g − h` balances inside the grid.
    pub balanced: bool,
    /// `|∫ (g − h) dx|`.
    pub mass_balance_err: f64,
    pub kkt_residual: f64,
    /// `∫ φ |x|^p dx`.
    pub phi_integral: f64,
    /// `−dA/dc = ∫ |φ| |x|^p dx`.
    pub decrease_rate: f64,
    pub iterations: usize,
    pub path: SolverPath,
    pub(crate) bounds: Vec<f64>,
    pub(crate) g_avg: Vec<f64>,
}

impl Subproblem {
    pub(crate) fn assemble(
        model: &ShellModel,
        c: f64,
        h: Vec<f64>,
        iterations: usize,
        path: SolverPath,
    ) -> Result<Self> {
        let q = model.masses(&h);
        let (m, phi) = model.potential(&q);
        let energy = model.energy(&m);
        let bounds = model.bounds(c);
        let len = h.len();
        let g_avg: Vec<f64> = (0..len).map(|j| model.g_avg(j)).collect();
        let volume: f64 = (0..len)
            .map(|j| {
                let u = bounds[j];
                let theta = if h[j].abs() >= u {
                    1.0
                } else if (u - g_avg[j].abs()).abs() > 0.0 {
                    ((h[j] - g_avg[j]).abs() / (u - g_avg[j].abs()).abs()).min(1.0)
                } else {
                    0.0
                };
                theta * model.w[j]
            })
            .sum();
        let n = model.n as f64;
        let g_l1: f64 = model.g_mass.iter().map(|x| x.abs()).sum();
        let m_n = m[len - 1];
        let mass_balance_err = model.omega * m_n.abs();
        Ok(Self {
            c,
            p: model.p,
            kkt_residual: projected::kkt(&bounds, &h, &phi),
            phi_integral: model.weighted_integral(&phi),
            decrease_rate: model.weighted_abs_integral(&phi),
            a_value: 0.5 * model.omega * energy,
            free_radius: (n * volume).powf(1.0 / n),
            balanced: m_n.abs() <= 1e-9 * g_l1,
            mass_balance_err,
            iterations,
            path,
            h: model.profile(h)?,
            phi: model.profile(phi)?,
            bounds,
            g_avg,
        })
    }

    /// Upper bounds `c r_j^p` at the nodes.
    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    /// Node averages of `g` used by the discrete model.
    pub fn g_average(&self) -> &[f64] {
        &self.g_avg
    }

    pub fn structure(&self) -> StructureReport {
        structure_report(self)
    }
}

/// `A_g(c)` and the potential of `g − h` for non-increasing `g ≥ 0`.
pub fn eval_a(g: &RadialProfile, c: f64, p: f64) -> Result<(f64, RadialProfile)> {
    let sub = truncation_h(g, c, p)?;
    Ok((sub.a_value, sub.phi))
}

/// Node averages `(left_j f⁻_j + right_j f⁺_j) / w_j` of any profile, the
/// representation the discrete model uses for `g`.
pub fn node_average(f: &RadialProfile) -> Vec<f64> {
    let grid = f.grid();
    let (l, r, w) = (grid.left_weights(), grid.right_weights(), grid.weights());
    (0..f.len())
        .map(|j| (l[j] * f.values()[j] + r[j] * f.right_value(j)) / w[j])
        .collect()
}

pub(crate) fn check_finite(g: &RadialProfile) -> Result<()> {
    if let Some(i) = g.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: i });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{make_grid, GridScheme};
    use std::sync::Arc;

    fn grid(n: usize, r_max: f64, m: usize) -> Arc<crate::radial::RadialGrid> {
        Arc::new(make_grid(n, r_max, m, GridScheme::Uniform).unwrap())
    }

    #[test]
    fn triangle_n1_half_budget() {
        let g = RadialProfile::from_fn(grid(1, 2.0, 2048), |r| (1.0 - r).max(0.0)).unwrap();
        let sub = truncation_h(&g, 0.5, 0.0).unwrap();
        assert!((sub.free_radius - 1.0).abs() < 1e-6, "{}", sub.free_radius);
        assert!((sub.a_value - 1.0 / 120.0).abs() < 1e-7, "{}", sub.a_value);
        assert!(sub.balanced);
    }

    #[test]
    fn indicator_n3_half_budget() {
        let g = RadialProfile::indicator(grid(3, 2.0, 4096), 1.0, 1.0).unwrap();
        let sub = truncation_h(&g, 0.5, 0.0).unwrap();
        assert!((sub.free_radius - 2f64.cbrt()).abs() < 1e-6, "{}", sub.free_radius);
    }

    #[test]
    fn inactive_budget_returns_g() {
        let g = RadialProfile::from_fn(grid(3, 2.0, 256), |r| (1.0 - r * r).max(0.0)).unwrap();
        let sub = truncation_h(&g, 2.0, 0.0).unwrap();
        assert_eq!(sub.free_radius, 0.0);
        assert!(sub.a_value.abs() < 1e-30);
        let proj = projected_solve(&g, 2.0, 0.0, 1e-8).unwrap();
        assert!(proj.iterations <= 1);
        assert!(proj.a_value.abs() < 1e-30);
    }

    #[test]
    fn projected_matches_truncation() {
        for n in [1, 2, 3, 5] {
            let g = RadialProfile::from_fn(grid(n, 3.0, 600), |r| (-r * r).exp() * (r < 2.9) as u8 as f64).unwrap();
            for c in [0.35, 0.5, 0.9] {
                let t = truncation_h(&g, c, 0.0).unwrap();
                let p = projected_solve(&g, c, 0.0, 1e-10).unwrap();
                let gap = t.h.values().iter().zip(p.h.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(gap < 1e-6, "n={n} c={c} gap={gap} it={}", p.iterations);
                assert!((t.a_value - p.a_value).abs() <= 1e-8 * t.a_value, "n={n} c={c}");
            }
        }
    }

    #[test]
    fn weighted_projected_matches_truncation() {
        let g = RadialProfile::from_fn(grid(3, 3.0, 600), |r| (1.0 - r * r).max(0.0)).unwrap();
        for c in [0.5, 2.0] {
            let t = truncation_h(&g, c, 2.0).unwrap();
            let p = projected_solve(&g, c, 2.0, 1e-10).unwrap();
            assert!((t.a_value - p.a_value).abs() <= 1e-8 * t.a_value);
        }
    }
}
