use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_cell;

/// Node placement for [`make_grid`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScheme {
    Uniform,
    /// Clustered near `r = 0` and near `r = 1`.
    Graded,
}

/// Radial nodes `0 = r_0 < ... < r_M` in dimension `n` together with the
/// product weights of `∫ f(r) r^{n-1} dr` for the piecewise-linear
/// interpolant of `f`.
///
/// Every node carries a left and a right half-weight (the integral of its hat
/// function against `r^{n-1}` over the cell to its left and right). Splitting
/// them lets profiles with a jump at a node integrate exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    dim: usize,
    nodes: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
    weights: Vec<f64>,
    surface: f64,
}

/// `ω_{n-1} = 2π^{n/2}/Γ(n/2)`; for `n = 1` this is 2 (even extension).
pub fn surface_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// `Γ(k/2)` for a positive integer `k`.
pub fn gamma_half(k: usize) -> f64 {
    assert!(k > 0);
    if k % 2 == 0 {
        (1..k / 2).map(|j| j as f64).product()
    } else {
        // Γ(1/2) = √π, Γ(x+1) = xΓ(x)
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x + 1e-9 < k as f64 / 2.0 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Volume of the ball of radius `r` in dimension `n`.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    surface_area(n) * r.powi(n as i32) / n as f64
}

/// Build a grid on `[0, r_max]` with `m` cells.
pub fn make_grid(n: usize, r_max: f64, m: usize, scheme: GridScheme) -> Result<RadialGrid> {
    if n == 0 {
        return Err(Error::InvalidGrid("dimension must be at least 1".into()));
    }
    if !r_max.is_finite() || r_max <= 0.0 {
        return Err(Error::InvalidGrid(format!("r_max must be finite and positive, got {r_max}")));
    }
    if m < 16 {
        return Err(Error::InvalidGrid(format!("need at least 16 cells, got {m}")));
    }
    let nodes = match scheme {
        GridScheme::Uniform => {
            let h = r_max / m as f64;
            (0..=m).map(|i| if i == m { r_max } else { h * i as f64 }).collect()
        }
        GridScheme::Graded => graded_nodes(r_max, m),
    };
    RadialGrid::from_nodes(n, nodes)
}

fn graded_nodes(r_max: f64, m: usize) -> Vec<f64> {
    // cosine clustering at both ends of [0, min(1, r_max)], then clustering at 1 only
    let inner_end = r_max.min(1.0);
    let inner_cells = if r_max <= 1.0 {
        m
    } else {
        ((m as f64) / r_max).round().clamp(8.0, (m - 8) as f64) as usize
    };
    let mut nodes: Vec<f64> = (0..=inner_cells)
        .map(|i| {
            let s = i as f64 / inner_cells as f64;
            inner_end * 0.5 * (1.0 - (PI * s).cos())
        })
        .collect();
    nodes[inner_cells] = inner_end;
    if r_max > 1.0 {
        let outer = m - inner_cells;
        for i in 1..=outer {
            let s = i as f64 / outer as f64;
            let r = 1.0 + (r_max - 1.0) * (1.0 - (0.5 * PI * s).cos());
            nodes.push(if i == outer { r_max } else { r });
        }
    }
    nodes
}

impl RadialGrid {
    /// Grid from explicit nodes; the first must be exactly zero.
    pub fn from_nodes(dim: usize, nodes: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if nodes.len() < 3 {
            return Err(Error::InvalidGrid("need at least 3 nodes".into()));
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidGrid("first node must be 0".into()));
        }
        if let Some(i) = nodes.iter().position(|r| !r.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("nodes must be strictly increasing".into()));
        }
        let len = nodes.len();
        let mut left = vec![0.0; len];
        let mut right = vec![0.0; len];
        let pw = dim as i32 - 1;
        for i in 0..len - 1 {
            let (a, b) = (nodes[i], nodes[i + 1]);
            let h = b - a;
            right[i] = gauss_cell(a, b, |r| (b - r) / h * r.powi(pw));
            left[i + 1] = gauss_cell(a, b, |r| (r - a) / h * r.powi(pw));
        }
        let weights = left.iter().zip(&right).map(|(l, r)| l + r).collect();
        Ok(Self {
            dim,
            nodes,
            left,
            right,
            weights,
            surface: surface_area(dim),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of nodes (cells + 1).
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Weights of `∫ f r^{n-1} dr` (without the surface factor).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Half-weights from the cell to the left of each node.
    pub fn left_weights(&self) -> &[f64] {
        &self.left
    }

    /// Half-weights from the cell to the right of each node.
    pub fn right_weights(&self) -> &[f64] {
        &self.right
    }

    /// `ω_{n-1}`.
    pub fn surface_factor(&self) -> f64 {
        self.surface
    }

    /// Index of the node equal to `r` up to a relative 1e-12, if any.
    pub fn node_index(&self, r: f64) -> Option<usize> {
        let i = self.nodes.partition_point(|&x| x < r);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&j| j < self.nodes.len())
            .find(|&j| (self.nodes[j] - r).abs() <= 1e-12 * r.abs().max(1e-300))
    }

    /// Cell index containing `r` (clamped to the last cell).
    pub fn cell_of(&self, r: f64) -> usize {
        let i = self.nodes.partition_point(|&x| x <= r);
        i.saturating_sub(1).min(self.cells() - 1)
    }

    /// `∫_{B(R)} 1 dx` from the grid weights. Exact when `R` is a node.
    pub fn ball_volume(&self, radius: f64) -> f64 {
        let pw = self.dim as i32 - 1;
        let mut acc = 0.0;
        for i in 0..self.cells() {
            let (a, b) = (self.nodes[i], self.nodes[i + 1]);
            if a >= radius {
                break;
            }
            if b <= radius {
                acc += self.right[i] + self.left[i + 1];
            } else {
                acc += gauss_cell(a, radius, |r| r.powi(pw));
            }
        }
        if radius > self.r_max() {
            let n = self.dim as f64;
            acc += (radius.powf(n) - self.r_max().powf(n)) / n;
        }
        self.surface * acc
    }

    /// Same spacing extended beyond `r_max` until at least `new_r_max`,
    /// appending cells of the current last width.
    pub fn extended(&self, new_r_max: f64) -> Result<Self> {
        let mut nodes = self.nodes.clone();
        let len = nodes.len();
        let h = nodes[len - 1] - nodes[len - 2];
        let base = nodes[len - 1];
        let mut k = 1;
        while *nodes.last().unwrap() < new_r_max {
            nodes.push(base + h * k as f64);
            k += 1;
        }
        Self::from_nodes(self.dim, nodes)
    }

    /// Nodes divided by `lam`.
    pub fn rescaled(&self, lam: f64) -> Result<Self> {
        Self::from_nodes(self.dim, self.nodes.iter().map(|r| r / lam).collect())
    }
}
