use super::profile::{lp_norm, Norm, RadialProfile, Tail};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_unit, GAUSS_POINTS};

/// Relative mass tolerance below which a profile counts as mean-zero in
/// dimensions 1 and 2.
pub const MASS_TOL: f64 = 1e-10;

/// Newton potential of a radial profile.
#[derive(Clone, Debug)]
pub struct PotentialResult {
    /// `φ` at the nodes.
    pub phi: RadialProfile,
    /// `M(r_i) = ∫₀^{r_i} s^{n-1} f ds` (no surface factor).
    pub cumulative_mass: Vec<f64>,
    /// `∫ f dx`.
    pub total_mass: f64,
    /// `∫ φ dx`; infinite for `n ≥ 3` when the total mass is not zero.
    pub phi_integral: f64,
    /// Height of the support indicator subtracted to remove round-off mass
    /// (`n ≤ 2` only, zero otherwise).
    pub mass_correction: f64,
    source: RadialProfile,
    gauss_mass: Vec<[f64; GAUSS_POINTS]>,
}

impl PotentialResult {
    /// `∫ φ |x|^p dx`, by parts: `φ(R)R^{n+p}/(n+p) + 1/(n+p) ∫ r^{1+p} M dr`.
    pub fn weighted_phi_integral(&self, p: f64) -> f64 {
        let grid = self.source.grid();
        let n = grid.dim() as f64;
        let m_n = *self.cumulative_mass.last().unwrap();
        if grid.dim() >= 3 && m_n.abs() > MASS_TOL * self.scale() {
            return f64::INFINITY;
        }
        let (x, w) = gauss_unit();
        let nodes = grid.nodes();
        let mut acc = 0.0;
        for (i, gm) in self.gauss_mass.iter().enumerate() {
            let (a, b) = (nodes[i], nodes[i + 1]);
            let h = b - a;
            for k in 0..GAUSS_POINTS {
                let r = a + h * x[k];
                acc += h * w[k] * r.powf(1.0 + p) * gm[k];
            }
        }
        let r_max = grid.r_max();
        let phi_end = *self.phi.values().last().unwrap();
        grid.surface_factor() * (phi_end * r_max.powf(n + p) + acc) / (n + p)
    }

    /// The profile the potential was computed from, after any mass correction.
    pub fn source(&self) -> &RadialProfile {
        &self.source
    }

    fn scale(&self) -> f64 {
        self.cumulative_mass
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE)
    }
}

fn check_source(f: &RadialProfile) -> Result<()> {
    if let Tail::PowerDecay { .. } = f.tail() {
        if f.values().last().copied().unwrap_or(0.0) != 0.0 {
            return Err(Error::InvalidInput(
                "potential requires a profile that vanishes beyond the grid".into(),
            ));
        }
    }
    Ok(())
}

/// `M` at the Gauss points of every cell and at every node.
fn cumulative(f: &RadialProfile) -> (Vec<f64>, Vec<[f64; GAUSS_POINTS]>) {
    let nodes = f.grid().nodes();
    let n1 = f.dim() as i32 - 1;
    let (x, w) = gauss_unit();
    let cells = nodes.len() - 1;
    let mut m = vec![0.0; nodes.len()];
    let mut gm = vec![[0.0; GAUSS_POINTS]; cells];
    for i in 0..cells {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let (fa, fb) = f.cell_ends(i);
        let h = b - a;
        let lin = |r: f64| (fa + (fb - fa) * (r - a) / h) * r.powi(n1);
        for k in 0..GAUSS_POINTS {
            let t = a + h * x[k];
            let ht = t - a;
            let mut s = 0.0;
            for l in 0..GAUSS_POINTS {
                s += w[l] * lin(a + ht * x[l]);
            }
            gm[i][k] = m[i] + ht * s;
        }
        let mut s = 0.0;
        for l in 0..GAUSS_POINTS {
            s += w[l] * lin(a + h * x[l]);
        }
        m[i + 1] = m[i] + h * s;
    }
    (m, gm)
}

/// Subtract `κ·1_{[0, r_s]}` so that the total mass vanishes (n ≤ 2).
fn remove_mass(f: &RadialProfile, m_total: f64) -> Result<(RadialProfile, f64)> {
    let grid = f.grid_arc().clone();
    let l1 = lp_norm(f, Norm::L1)?;
    let omega = grid.surface_factor();
    let tol = MASS_TOL * l1;
    if (omega * m_total).abs() > tol {
        return Err(Error::NonzeroMass {
            dim: grid.dim(),
            mass: omega * m_total,
            tol,
        });
    }
    if m_total == 0.0 {
        return Ok((f.clone(), 0.0));
    }
    let rs = f.support_radius();
    let k = grid.node_index(rs).unwrap_or(grid.len() - 1);
    let vol: f64 = (0..=k)
        .map(|j| grid.left_weights()[j] + if j < k { grid.right_weights()[j] } else { 0.0 })
        .sum();
    let kappa = m_total / vol;
    let mut values = f.values().to_vec();
    for v in values.iter_mut().take(k + 1) {
        *v -= kappa;
    }
    let mut g = RadialProfile::new(grid, values)?.with_tail(f.tail());
    for &(j, v) in f.jumps() {
        g = g.with_jump(j, if j < k { v - kappa } else { v })?;
    }
    if k + 1 < g.len() && !f.jumps().iter().any(|&(j, _)| j == k) {
        g = g.with_jump(k, f.values()[k])?;
    }
    Ok((g, kappa))
}

/// `φ(r) = ∫_r^∞ t^{1-n} M(t) dt`, exact for the piecewise-linear
/// interpolant up to Gauss quadrature of smooth cell integrands.
pub fn newton_potential(f: &RadialProfile) -> Result<PotentialResult> {
    check_source(f)?;
    let n = f.dim();
    let (mut m, mut gm) = cumulative(f);
    let mut source = f.clone();
    let mut correction = 0.0;
    if n <= 2 {
        let (g, kappa) = remove_mass(f, *m.last().unwrap())?;
        if kappa != 0.0 {
            (m, gm) = cumulative(&g);
            // the correction leaves round-off; the balance is exact by construction
            *m.last_mut().unwrap() = 0.0;
        }
        source = g;
        correction = kappa;
    }
    let grid = f.grid_arc().clone();
    let nodes = grid.nodes();
    let len = nodes.len();
    let (x, w) = gauss_unit();
    let pw = 1 - n as i32;
    let m_n = m[len - 1];
    let mut phi = vec![0.0; len];
    phi[len - 1] = if n >= 3 {
        m_n * nodes[len - 1].powi(2 - n as i32) / (n as f64 - 2.0)
    } else {
        0.0
    };
    for i in (0..len - 1).rev() {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let h = b - a;
        let mut s = 0.0;
        for k in 0..GAUSS_POINTS {
            s += w[k] * (a + h * x[k]).powi(pw) * gm[i][k];
        }
        phi[i] = phi[i + 1] + h * s;
    }
    let omega = grid.surface_factor();
    let phi = RadialProfile::new(grid, phi)?;
    let mut out = PotentialResult {
        phi,
        cumulative_mass: m,
        total_mass: omega * m_n,
        phi_integral: 0.0,
        mass_correction: correction,
        source,
        gauss_mass: gm,
    };
    out.phi_integral = out.weighted_phi_integral(0.0);
    Ok(out)
}

/// `⟨f, (−Δ)^{-1} f⟩ = ω ∫ r^{1-n} M(r)² dr`.
pub fn hminus1_sq(f: &RadialProfile) -> Result<f64> {
    let pot = newton_potential(f)?;
    Ok(hminus1_from(&pot))
}

/// Energy of an already computed potential.
pub fn hminus1_from(pot: &PotentialResult) -> f64 {
    let grid = pot.source.grid();
    let n = grid.dim();
    let nodes = grid.nodes();
    let (x, w) = gauss_unit();
    let pw = 1 - n as i32;
    let mut acc = 0.0;
    for (i, gm) in pot.gauss_mass.iter().enumerate() {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let h = b - a;
        let mut s = 0.0;
        for k in 0..GAUSS_POINTS {
            s += w[k] * (a + h * x[k]).powi(pw) * gm[k] * gm[k];
        }
        acc += h * s;
    }
    if n >= 3 {
        let m_n = *pot.cumulative_mass.last().unwrap();
        acc += m_n * m_n * grid.r_max().powi(2 - n as i32) / (n as f64 - 2.0);
    }
    grid.surface_factor() * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::grid::{make_grid, GridScheme};
    use crate::radial::laplacian::radial_laplacian;
    use crate::radial::profile::rescale;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn grid(n: usize, r_max: f64, m: usize) -> Arc<crate::radial::RadialGrid> {
        Arc::new(make_grid(n, r_max, m, GridScheme::Uniform).unwrap())
    }

    #[test]
    fn indicator_potential_n3() {
        let g = grid(3, 2.0, 512);
        let f = RadialProfile::indicator(g.clone(), 1.0, 1.0).unwrap();
        let pot = newton_potential(&f).unwrap();
        assert!((pot.phi.values()[0] - 0.5).abs() < 1e-13);
        for (r, v) in g.nodes().iter().zip(pot.phi.values()) {
            let want = if *r <= 1.0 { 0.5 - r * r / 6.0 } else { 1.0 / (3.0 * r) };
            assert!((v - want).abs() < 1e-13, "r = {r}");
        }
        assert!((hminus1_sq(&f).unwrap() - 8.0 * PI / 15.0).abs() < 1e-12);
    }

    #[test]
    fn zero_profile() {
        let f = RadialProfile::zeros(grid(3, 1.0, 32));
        let pot = newton_potential(&f).unwrap();
        assert!(pot.phi.values().iter().all(|&v| v == 0.0));
        assert_eq!(hminus1_sq(&f).unwrap(), 0.0);
    }

    #[test]
    fn step_n1() {
        let g = grid(1, 2.0, 64);
        let k = g.node_index(0.5).unwrap();
        let k1 = g.node_index(1.0).unwrap();
        let values = (0..g.len())
            .map(|j| if j <= k { 1.0 } else if j <= k1 { -1.0 } else { 0.0 })
            .collect();
        let f = RadialProfile::new(g.clone(), values)
            .unwrap()
            .with_jump(k, -1.0)
            .unwrap()
            .with_jump(k1, 0.0)
            .unwrap();
        let pot = newton_potential(&f).unwrap();
        assert!((pot.phi.values()[0] - 0.25).abs() < 1e-14);
        for (r, v) in g.nodes().iter().zip(pot.phi.values()) {
            if *r >= 1.0 {
                assert!(v.abs() < 1e-14);
            }
        }
        assert!(pot.mass_correction.abs() < 1e-15);
    }

    #[test]
    fn nonzero_mass_low_dim_rejected() {
        for n in [1, 2] {
            let f = RadialProfile::indicator(grid(n, 2.0, 64), 1.0, 1.0).unwrap();
            assert!(matches!(
                newton_potential(&f),
                Err(Error::NonzeroMass { .. })
            ));
        }
    }

    #[test]
    fn tiny_mass_is_projected_out() {
        let g = grid(2, 2.0, 64);
        let k = g.node_index(1.0).unwrap();
        let base = RadialProfile::from_fn(g.clone(), |r| if r <= 1.0 { (PI * r).cos() } else { 0.0 })
            .unwrap()
            .with_jump(k, 0.0)
            .unwrap();
        let ind = RadialProfile::indicator(g.clone(), 1.0, 1.0).unwrap();
        let shift = crate::radial::integrate(&base, 0.0).unwrap() / g.ball_volume(1.0) - 1e-13;
        let f = base.sub(&ind.scaled(shift)).unwrap();
        let pot = newton_potential(&f).unwrap();
        assert!(pot.mass_correction != 0.0);
        assert!(pot.mass_correction.abs() < 1e-10);
        assert!(pot.cumulative_mass[k..].iter().all(|m| m.abs() < 1e-14));
        assert!(pot.phi.values()[k..].iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn laplacian_of_potential_converges() {
        let err = |m: usize| {
            let g = grid(3, 2.0, m);
            let f = RadialProfile::from_fn(g, |r| (1.0 - r * r).max(0.0).powi(2)).unwrap();
            let phi = newton_potential(&f).unwrap().phi;
            let lap = radial_laplacian(&phi);
            lap.values()[..m]
                .iter()
                .zip(f.values())
                .map(|(l, v)| (l + v).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(256), err(512));
        assert!(e1 / e2 >= 3.0, "{e1} {e2}");
    }

    #[test]
    fn scaling_of_energy() {
        let g = grid(3, 2.0, 1024);
        let f = RadialProfile::from_fn(g, |r| (1.0 - r * r).max(0.0).powi(2)).unwrap();
        let e = hminus1_sq(&f).unwrap();
        for lam in [0.5, 2.0] {
            let fl = rescale(&f, lam, 5.0).unwrap();
            let ratio = hminus1_sq(&fl).unwrap() / e;
            assert!((ratio / lam.powi(5) - 1.0).abs() < 1e-8);
        }
    }
}
