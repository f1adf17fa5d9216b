//! Discrete model shared by both solvers.
//!
//! The mass of `g − h` is lumped onto spheres at the grid radii: node `j`
//! carries `q_j = G_j − w_j h_j`, with `G_j` the exact integral of the
//! piecewise-linear `g` against the hat function of node `j`. Between shells
//! the cumulative mass `M_i = Σ_{l≤i} q_l` is constant, so the potential and
//! the energy are exact for this mass distribution:
//!
//! `φ_j = Σ_{i≥j} I_i M_i + T M_N`, `E = Σ_i I_i M_i² + T M_N²`,
//!
//! with `I_i = ∫_{r_i}^{r_{i+1}} t^{1-n} dt` and the exterior tail
//! `T = r_N^{2-n}/(n-2)` (absent for `n ≤ 2`, where `M_N = 0` is imposed).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::radial::{RadialGrid, RadialProfile};

#[derive(Clone, Debug)]
pub struct ShellModel {
    pub(crate) grid: Arc<RadialGrid>,
    pub(crate) n: usize,
    pub(crate) p: f64,
    /// Lumped weights `w_j`.
    pub(crate) w: Vec<f64>,
    /// Node masses of `g`.
    pub(crate) g_mass: Vec<f64>,
    /// `r_j^p`.
    pub(crate) rp: Vec<f64>,
    /// Cell factors `I_i`, one per cell.
    pub(crate) cell: Vec<f64>,
    /// `T`, zero when `n ≤ 2`.
    pub(crate) tail: f64,
    pub(crate) omega: f64,
}

/// `∫_a^b t^{1-n} dt` for `0 < a < b`, without cancellation.
fn cell_factor(n: usize, a: f64, b: f64) -> f64 {
    let x = (b - a) / a;
    match n {
        1 => b - a,
        2 => x.ln_1p(),
        _ => {
            let e = 2.0 - n as f64;
            -a.powf(e) * (e * x.ln_1p()).exp_m1() / (n as f64 - 2.0)
        }
    }
}

impl ShellModel {
    pub fn new(g: &RadialProfile, p: f64) -> Result<Self> {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::InvalidInput(format!("weight power must be >= 0, got {p}")));
        }
        let grid = g.grid_arc().clone();
        let n = grid.dim();
        let nodes = grid.nodes();
        let len = nodes.len();
        let (l, r) = (grid.left_weights(), grid.right_weights());
        let g_mass = (0..len)
            .map(|j| l[j] * g.values()[j] + r[j] * g.right_value(j))
            .collect();
        let mut cell = Vec::with_capacity(len - 1);
        cell.push(0.5 * nodes[1].powf(2.0 - n as f64));
        for i in 1..len - 1 {
            cell.push(cell_factor(n, nodes[i], nodes[i + 1]));
        }
        let tail = if n >= 3 {
            nodes[len - 1].powf(2.0 - n as f64) / (n as f64 - 2.0)
        } else {
            0.0
        };
        Ok(Self {
            n,
            p,
            w: grid.weights().to_vec(),
            g_mass,
            rp: nodes.iter().map(|r| r.powf(p)).collect(),
            cell,
            tail,
            omega: grid.surface_factor(),
            grid,
        })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Upper bounds `c r_j^p`.
    pub fn bounds(&self, c: f64) -> Vec<f64> {
        self.rp.iter().map(|r| c * r).collect()
    }

    /// Node average of `g`, `G_j / w_j`.
    pub fn g_avg(&self, j: usize) -> f64 {
        self.g_mass[j] / self.w[j]
    }

    pub fn masses(&self, h: &[f64]) -> Vec<f64> {
        self.g_mass
            .iter()
            .zip(&self.w)
            .zip(h)
            .map(|((g, w), h)| g - w * h)
            .collect()
    }

    /// Cumulative masses and potential of node masses `q`.
    pub fn potential(&self, q: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let len = q.len();
        let mut m = vec![0.0; len];
        let mut acc = 0.0;
        for (mj, qj) in m.iter_mut().zip(q) {
            acc += qj;
            *mj = acc;
        }
        let mut phi = vec![0.0; len];
        phi[len - 1] = self.tail * m[len - 1];
        for i in (0..len - 1).rev() {
            phi[i] = phi[i + 1] + self.cell[i] * m[i];
        }
        (m, phi)
    }

    /// `E = Σ I_i M_i² + T M_N²` (no surface factor).
    pub fn energy(&self, m: &[f64]) -> f64 {
        let len = m.len();
        let mut e: f64 = (0..len - 1).map(|i| self.cell[i] * m[i] * m[i]).sum();
        e += self.tail * m[len - 1] * m[len - 1];
        e
    }

    /// `ω Σ w_j |φ_j| r_j^p`, the decrease rate of `A` in `c`.
    pub fn weighted_abs_integral(&self, phi: &[f64]) -> f64 {
        self.omega
            * phi
                .iter()
                .zip(&self.w)
                .zip(&self.rp)
                .map(|((f, w), r)| f.abs() * w * r)
                .sum::<f64>()
    }

    /// `ω Σ w_j φ_j r_j^p`.
    pub fn weighted_integral(&self, phi: &[f64]) -> f64 {
        self.omega
            * phi
                .iter()
                .zip(&self.w)
                .zip(&self.rp)
                .map(|((f, w), r)| f * w * r)
                .sum::<f64>()
    }

    /// Diagonal and super-diagonal of `D = K^{-1}`, the inverse of the Green's
    /// matrix of [`ShellModel::potential`].
    pub fn inverse_green(&self) -> (Vec<f64>, Vec<f64>) {
        let len = self.len();
        let mut diag = vec![0.0; len];
        let mut upper = vec![0.0; len - 1];
        for i in 0..len - 1 {
            let k = 1.0 / self.cell[i];
            diag[i] += k;
            diag[i + 1] += k;
            upper[i] = -k;
        }
        if self.n >= 3 {
            diag[len - 1] += 1.0 / self.tail;
        }
        (diag, upper)
    }

    /// Profile with the nodal values `v` on the model grid.
    pub fn profile(&self, v: Vec<f64>) -> Result<RadialProfile> {
        RadialProfile::new(self.grid.clone(), v)
    }
}
