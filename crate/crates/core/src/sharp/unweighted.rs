use std::sync::Arc;

use crate::eigen::{neumann_mu1, radial_bessel_many};
use crate::error::{Error, Result};
use crate::infconv::infconv_value;
use crate::quadrature::gauss_unit;
use crate::radial::{ball_volume, lp_norm, make_grid, surface_area, GridScheme, Norm, RadialGrid, RadialProfile};

use super::{OptimizerMeta, OptimizerProfile};

/// Default grid of the optimizers: uniform on `[0, 1.5 R]`.
pub const OPTIMIZER_CELLS: usize = 3072;

/// Relative tolerance of the `L_n` cross-check against the solver.
pub const CROSS_CHECK_TOL: f64 = 5e-4;

/// Closed-form data of the unweighted optimizer on `B(R)`:
/// `g = a J(λ r / R) + c` with `c = μ/|B(R)|`, `μ = (λ/R)²`, `a = −c/J(λ)`.
#[derive(Clone, Copy, Debug)]
pub struct UnweightedData {
    pub n: usize,
    pub radius: f64,
    /// Neumann frequency on the unit ball.
    pub lambda: f64,
    /// Eigenvalue on `B(R)`.
    pub mu: f64,
    pub a: f64,
    pub mean: f64,
    pub ball_volume: f64,
}

impl UnweightedData {
    pub fn new(n: usize, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
        }
        let eig = neumann_mu1(n)?;
        let lam_r = eig.lambda / radius;
        let mu = lam_r * lam_r;
        let vol = ball_volume(n, radius);
        let mean = mu / vol;
        Ok(Self {
            n,
            radius,
            lambda: eig.lambda,
            mu,
            a: -mean / eig.boundary_value,
            mean,
            ball_volume: vol,
        })
    }

    /// `‖g‖₂²` by composite Gauss on `[0, R]`, independent of any grid.
    pub fn l2_sq(&self) -> f64 {
        let panels = 256;
        let (x, w) = gauss_unit();
        let h = self.radius / panels as f64;
        let mut rs = Vec::with_capacity(panels * x.len());
        for i in 0..panels {
            for xk in x {
                rs.push(h * (i as f64 + xk));
            }
        }
        let scaled: Vec<f64> = rs.iter().map(|r| self.lambda * r / self.radius).collect();
        let js = radial_bessel_many(self.n, &scaled);
        let n1 = self.n as i32 - 1;
        let mut acc = 0.0;
        for (k, (r, (j, _))) in rs.iter().zip(js).enumerate() {
            let g = self.a * j + self.mean;
            acc += w[k % x.len()] * g * g * r.powi(n1);
        }
        surface_area(self.n) * acc * h
    }

    /// `L_n = ½(‖g‖²/μ + ⟨g⟩) ‖g‖^{-2(n+2)/(n+4)}`.
    pub fn sharp_constant(&self) -> f64 {
        let l2 = self.l2_sq();
        let nf = self.n as f64;
        0.5 * (l2 / self.mu + self.mean) * l2.sqrt().powf(-2.0 * (nf + 2.0) / (nf + 4.0))
    }

    /// `𝒢(g) = ½(‖g‖²/μ + ⟨g⟩)`.
    pub fn dual_value(&self) -> f64 {
        0.5 * (self.l2_sq() / self.mu + self.mean)
    }
}

/// Unweighted optimizer on the unit ball, default grid.
pub fn build_unweighted_optimizer(n: usize) -> Result<OptimizerProfile> {
    let grid = Arc::new(make_grid(n, 1.5, OPTIMIZER_CELLS, GridScheme::Uniform)?);
    build_unweighted_optimizer_on(grid, 1.0)
}

/// Unweighted optimizer on `B(R)`; `R` must be a node of `grid`.
pub fn build_unweighted_optimizer_on(grid: Arc<RadialGrid>, radius: f64) -> Result<OptimizerProfile> {
    let n = grid.dim();
    let data = UnweightedData::new(n, radius)?;
    if grid.node_index(radius).is_none() {
        return Err(Error::InvalidGrid(format!("radius {radius} must be a grid node")));
    }
    let scaled: Vec<f64> = grid.nodes().iter().map(|r| data.lambda * r / radius).collect();
    let js = radial_bessel_many(n, &scaled);
    let values = grid
        .nodes()
        .iter()
        .zip(js)
        .map(|(&r, (j, _))| if r <= radius * (1.0 + 1e-12) { (data.a * j + data.mean).max(0.0) } else { 0.0 })
        .collect();
    let g = RadialProfile::new(grid, values)?;
    Ok(OptimizerProfile {
        g,
        meta: OptimizerMeta::Unweighted {
            mu1: data.mu,
            a: data.a,
            mean_g: data.mean,
            ball_volume: data.ball_volume,
        },
    })
}

/// `L_n`, cross-checked against the infimal-convolution solver at 5e-4.
pub fn sharp_constant_l(n: usize) -> Result<f64> {
    let data = UnweightedData::new(n, 1.0)?;
    let l = data.sharp_constant();
    let opt = build_unweighted_optimizer(n)?;
    let sol = infconv_value(&opt.g, 0.0)?;
    let nf = n as f64;
    let norm = lp_norm(&opt.g, Norm::L2)?;
    let predicted = l * norm.powf((2.0 * nf + 4.0) / (nf + 4.0));
    let rel = (sol.g_value - predicted).abs() / predicted;
    if rel > CROSS_CHECK_TOL {
        return Err(Error::CrossCheck {
            what: "sharp constant",
            got: sol.g_value,
            expected: predicted,
            rel,
        });
    }
    Ok(l)
}
