use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use crate::error::{Error, Result};
use crate::quadrature::gauss_cell;

/// Behaviour of a profile beyond the last node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tail {
    Zero,
    /// `f(r) = f(r_M) (r_M / r)^exponent` for `r > r_M`.
    PowerDecay { exponent: f64 },
}

/// Norm selector for [`lp_norm`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Inf,
}

/// A radial function sampled at the nodes of a [`RadialGrid`] and
/// interpolated linearly between them.
///
/// `values[j]` is the limit from the left at node `j`. A jump records a
/// different limit from the right, so indicators of balls whose radius is a
/// node are represented without smearing.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    jumps: Vec<(usize, f64)>,
    tail: Tail,
}

impl RadialProfile {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "profile has {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }
        Ok(Self {
            grid,
            values,
            jumps: Vec::new(),
            tail: Tail::Zero,
        })
    }

    /// Sample `f` at every node.
    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self {
            grid,
            values,
            jumps: Vec::new(),
            tail: Tail::Zero,
        }
    }

    /// `height · 1_{B(radius)}`; `radius` must be a node of the grid.
    pub fn indicator(grid: Arc<RadialGrid>, radius: f64, height: f64) -> Result<Self> {
        let k = grid.node_index(radius).ok_or_else(|| {
            Error::InvalidInput(format!("indicator radius {radius} is not a grid node"))
        })?;
        let values = (0..grid.len())
            .map(|j| if j <= k { height } else { 0.0 })
            .collect();
        let mut p = Self::new(grid, values)?;
        if k + 1 < p.values.len() {
            p.jumps.push((k, 0.0));
        }
        Ok(p)
    }

    /// Record a right limit at node `j` (replacing any earlier one).
    pub fn with_jump(mut self, j: usize, right_limit: f64) -> Result<Self> {
        if j + 1 >= self.values.len() {
            return Err(Error::InvalidInput("jump must be at an interior node".into()));
        }
        if !right_limit.is_finite() {
            return Err(Error::NonFinite { index: j });
        }
        self.jumps.retain(|&(k, _)| k != j);
        self.jumps.push((j, right_limit));
        self.jumps.sort_by_key(|&(k, _)| k);
        Ok(self)
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn jumps(&self) -> &[(usize, f64)] {
        &self.jumps
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Limit from the right at node `j`.
    pub fn right_value(&self, j: usize) -> f64 {
        self.jumps
            .iter()
            .find(|&&(k, _)| k == j)
            .map_or(self.values[j], |&(_, v)| v)
    }

    /// Endpoint values of cell `i` as (value just right of `r_i`, value at `r_{i+1}`).
    #[inline]
    pub fn cell_ends(&self, i: usize) -> (f64, f64) {
        (self.right_value(i), self.values[i + 1])
    }

    /// Linear interpolant (right-continuous at jumps), tail beyond `r_M`.
    pub fn eval(&self, r: f64) -> f64 {
        let nodes = self.grid.nodes();
        let r_max = self.grid.r_max();
        if r > r_max {
            return match self.tail {
                Tail::Zero => 0.0,
                Tail::PowerDecay { exponent } => {
                    self.values[nodes.len() - 1] * (r_max / r).powf(exponent)
                }
            };
        }
        if r == r_max {
            return self.values[nodes.len() - 1];
        }
        let i = self.grid.cell_of(r.max(0.0));
        let (a, b) = (nodes[i], nodes[i + 1]);
        let (fa, fb) = self.cell_ends(i);
        fa + (fb - fa) * (r - a) / (b - a)
    }

    /// Same grid and tail, values mapped pointwise (jumps included).
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            jumps: self.jumps.iter().map(|&(j, v)| (j, f(v))).collect(),
            tail: self.tail,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    /// Pointwise combination on a shared grid; the tail of `self` is kept.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && *self.grid != *other.grid {
            return Err(Error::InvalidInput("profiles live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let mut idx: Vec<usize> = self
            .jumps
            .iter()
            .chain(&other.jumps)
            .map(|&(j, _)| j)
            .collect();
        idx.sort_unstable();
        idx.dedup();
        let jumps = idx
            .into_iter()
            .map(|j| (j, f(self.right_value(j), other.right_value(j))))
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
            jumps,
            tail: self.tail,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Non-increasing in `r`, jumps included (tolerance 0).
    pub fn is_nonincreasing(&self) -> bool {
        (0..self.values.len() - 1).all(|i| {
            let (a, b) = self.cell_ends(i);
            self.right_value(i) <= self.values[i] && b <= a
        })
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0) && self.jumps.iter().all(|&(_, v)| v >= 0.0)
    }

    /// Largest radius where the profile is nonzero (cell end included).
    pub fn support_radius(&self) -> f64 {
        let nodes = self.grid.nodes();
        for i in (0..self.values.len() - 1).rev() {
            let (a, b) = self.cell_ends(i);
            if b != 0.0 {
                return nodes[i + 1];
            }
            if a != 0.0 {
                return nodes[i + 1];
            }
            if self.values[i] != 0.0 {
                return nodes[i];
            }
        }
        0.0
    }

    /// Cellwise Gauss integral of `w(r, f(r))` over `[0, r_M]`.
    pub(crate) fn cell_integral(&self, mut w: impl FnMut(f64, f64) -> f64) -> f64 {
        let nodes = self.grid.nodes();
        let mut acc = 0.0;
        for i in 0..nodes.len() - 1 {
            let (a, b) = (nodes[i], nodes[i + 1]);
            let (fa, fb) = self.cell_ends(i);
            let h = b - a;
            acc += gauss_cell(a, b, |r| w(r, fa + (fb - fa) * (r - a) / h));
        }
        acc
    }
}

fn tail_moment(f: &RadialProfile, power: f64, order: f64) -> Result<f64> {
    // ∫_{r_M}^∞ |f|^order r^{power} dr for the declared tail
    match f.tail {
        Tail::Zero => Ok(0.0),
        Tail::PowerDecay { exponent } => {
            let fm = f.values[f.values.len() - 1].abs();
            if fm == 0.0 {
                return Ok(0.0);
            }
            let k = exponent * order;
            let needed = (power + 1.0) / order;
            if k <= power + 1.0 {
                return Err(Error::DivergentTail { exponent, needed });
            }
            let rm = f.grid.r_max();
            Ok(fm.powf(order) * rm.powf(power + 1.0) / (k - power - 1.0))
        }
    }
}

/// `∫_{ℝⁿ} f(|x|) |x|^p dx`, declared tail included.
pub fn integrate(f: &RadialProfile, weight_power: f64) -> Result<f64> {
    if !(weight_power >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "weight power must be nonnegative, got {weight_power}"
        )));
    }
    let pw = f.dim() as f64 - 1.0 + weight_power;
    let grid_part = if weight_power == 0.0 {
        let (l, r) = (f.grid.left_weights(), f.grid.right_weights());
        (0..f.len())
            .map(|j| l[j] * f.values[j] + r[j] * f.right_value(j))
            .sum()
    } else {
        f.cell_integral(|r, v| v * r.powf(pw))
    };
    let sign = f.values[f.len() - 1].signum();
    let tail = sign * tail_moment(f, pw, 1.0)?;
    Ok(f.grid.surface_factor() * (grid_part + tail))
}

/// `‖f‖_p` on ℝⁿ.
pub fn lp_norm(f: &RadialProfile, p: Norm) -> Result<f64> {
    let pw = f.dim() as f64 - 1.0;
    let n1 = f.dim() as i32 - 1;
    let omega = f.grid.surface_factor();
    match p {
        Norm::Inf => Ok(f
            .values
            .iter()
            .chain(f.jumps.iter().map(|(_, v)| v))
            .fold(0.0_f64, |m, v| m.max(v.abs()))),
        Norm::L2 => {
            let s = f.cell_integral(|r, v| v * v * r.powi(n1));
            Ok((omega * (s + tail_moment(f, pw, 2.0)?)).sqrt())
        }
        Norm::L1 => {
            let nodes = f.grid.nodes();
            let mut s = 0.0;
            for i in 0..nodes.len() - 1 {
                let (a, b) = (nodes[i], nodes[i + 1]);
                let (fa, fb) = f.cell_ends(i);
                let lin = |r: f64| (fa + (fb - fa) * (r - a) / (b - a)).abs() * r.powi(n1);
                if fa * fb < 0.0 {
                    let z = a + (b - a) * fa / (fa - fb);
                    s += gauss_cell(a, z, lin) + gauss_cell(z, b, lin);
                } else {
                    s += gauss_cell(a, b, lin);
                }
            }
            Ok(omega * (s + tail_moment(f, pw, 1.0)?))
        }
    }
}

/// `x ↦ λ^a f(λx)`, sampled on the grid with nodes divided by `λ`.
pub fn rescale(f: &RadialProfile, lam: f64, a: f64) -> Result<RadialProfile> {
    if !(lam > 0.0) || !lam.is_finite() {
        return Err(Error::InvalidInput(format!("scale must be positive, got {lam}")));
    }
    let grid = Arc::new(f.grid.rescaled(lam)?);
    let s = lam.powf(a);
    Ok(RadialProfile {
        grid,
        values: f.values.iter().map(|v| s * v).collect(),
        jumps: f.jumps.iter().map(|&(j, v)| (j, s * v)).collect(),
        tail: f.tail,
    })
}

/// Weighted `L²` inner product `∫ f g dx` of two profiles on one grid.
pub fn inner(f: &RadialProfile, g: &RadialProfile) -> Result<f64> {
    if f.grid != g.grid && *f.grid != *g.grid {
        return Err(Error::InvalidInput("profiles live on different grids".into()));
    }
    let nodes = f.grid.nodes();
    let n1 = f.dim() as i32 - 1;
    let mut s = 0.0;
    for i in 0..nodes.len() - 1 {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let (fa, fb) = f.cell_ends(i);
        let (ga, gb) = g.cell_ends(i);
        let h = b - a;
        s += gauss_cell(a, b, |r| {
            let t = (r - a) / h;
            (fa + (fb - fa) * t) * (ga + (gb - ga) * t) * r.powi(n1)
        });
    }
    Ok(f.grid.surface_factor() * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::grid::{make_grid, GridScheme};
    use std::f64::consts::PI;

    fn grid(n: usize, r_max: f64, m: usize) -> Arc<RadialGrid> {
        Arc::new(make_grid(n, r_max, m, GridScheme::Uniform).unwrap())
    }

    #[test]
    fn indicator_integrals() {
        let g = grid(3, 2.0, 256);
        let f = RadialProfile::indicator(g, 1.0, 1.0).unwrap();
        assert!((integrate(&f, 0.0).unwrap() - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((integrate(&f, 2.0).unwrap() - 4.0 * PI / 5.0).abs() < 1e-12);
        let l2 = lp_norm(&f, Norm::L2).unwrap();
        assert!((l2 - (4.0 * PI / 3.0).sqrt()).abs() < 1e-12);
        let c = f.scaled(2.5);
        assert_eq!(lp_norm(&c, Norm::Inf).unwrap(), 2.5);
    }

    #[test]
    fn zero_integrates_to_zero() {
        let f = RadialProfile::zeros(grid(2, 1.0, 32));
        assert_eq!(integrate(&f, 0.0).unwrap(), 0.0);
        assert_eq!(lp_norm(&f, Norm::L1).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_l1_n3() {
        let g = grid(3, 12.0, 4096);
        let f = RadialProfile::from_fn(g, |r| (-0.5 * r * r).exp()).unwrap();
        let want = (2.0 * PI).powf(1.5);
        assert!((lp_norm(&f, Norm::L1).unwrap() - want).abs() < 1e-4);
    }

    #[test]
    fn divergent_tail_rejected() {
        let g = grid(3, 1.0, 32);
        let f = RadialProfile::from_fn(g, |_| 1.0)
            .unwrap()
            .with_tail(Tail::PowerDecay { exponent: 4.0 });
        assert!(integrate(&f, 0.0).is_ok());
        assert!(matches!(integrate(&f, 2.0), Err(Error::DivergentTail { .. })));
    }

    #[test]
    fn rescale_identities() {
        let g = grid(3, 2.0, 512);
        let f = RadialProfile::from_fn(g, |r| (1.0 - r * r).max(0.0).powi(2)).unwrap();
        let same = rescale(&f, 1.0, 5.0).unwrap();
        assert_eq!(same.values(), f.values());
        let lam: f64 = 2.0;
        let a = 5.0;
        let fl = rescale(&f, lam, a).unwrap();
        let ratio = lp_norm(&fl, Norm::L2).unwrap().powi(2) / lp_norm(&f, Norm::L2).unwrap().powi(2);
        assert!((ratio / lam.powf(2.0 * a - 3.0) - 1.0).abs() < 1e-10);
        let inf = lp_norm(&fl, Norm::Inf).unwrap() / lp_norm(&f, Norm::Inf).unwrap();
        assert!((inf / lam.powf(a) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn l1_handles_sign_change_inside_cell() {
        let g = Arc::new(RadialGrid::from_nodes(1, vec![0.0, 1.0, 2.0]).unwrap());
        let f = RadialProfile::new(g, vec![1.0, -1.0, -1.0]).unwrap();
        // |1 - 2r| on [0,1] integrates to 1/2, then 1 on [1,2]; times ω₀ = 2
        assert!((lp_norm(&f, Norm::L1).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eval_respects_jump() {
        let g = grid(1, 2.0, 16);
        let f = RadialProfile::indicator(g, 1.0, 3.0).unwrap();
        assert_eq!(f.eval(1.0), 0.0);
        assert_eq!(f.eval(0.999), 3.0);
        assert!(f.is_nonincreasing());
        assert_eq!(f.support_radius(), 1.0);
    }
}
