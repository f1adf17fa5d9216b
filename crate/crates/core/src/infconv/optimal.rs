use std::sync::Arc;

use serde::Serialize;

use super::projected::{projected_on, MAX_ITERATIONS};
use super::shell::ShellModel;
use super::truncation::truncation_on;
use super::{check_finite, SolverPath, StructureReport, Subproblem};
use crate::error::{Error, Result};
use crate::radial::RadialProfile;

/// Knobs for [`optimal_c`] and [`infconv_value`].
#[derive(Clone, Copy, Debug)]
pub struct InfConvOptions {
    /// KKT tolerance of the projected solver, relative to `max |φ_g|`.
    pub tol: f64,
    /// Accept sign-changing `g` (projected solver only).
    pub allow_signed: bool,
    /// Use the projected solver even when the truncation formula applies.
    pub force_projected: bool,
    /// Maximum number of grid doublings.
    pub max_expansions: usize,
}

impl Default for InfConvOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            allow_signed: false,
            force_projected: false,
            max_expansions: 6,
        }
    }
}

/// `A_g(c)` and `m(c) = ∫ φ_{(c)} |x|^p dx` on a set of budgets.
#[derive(Clone, Debug, Serialize)]
pub struct CScan {
    pub c: Vec<f64>,
    pub a: Vec<f64>,
    pub m: Vec<f64>,
    /// Backward difference quotient of `A`, absent at the first point.
    pub left_derivative: Vec<Option<f64>>,
    /// Forward difference quotient of `A`, absent at the last point.
    pub right_derivative: Vec<Option<f64>>,
}

impl CScan {
    /// Smallest second difference of `A` (non-uniform spacing).
    pub fn min_second_difference(&self) -> f64 {
        (1..self.c.len().saturating_sub(1))
            .map(|i| {
                let (c0, c1, c2) = (self.c[i - 1], self.c[i], self.c[i + 1]);
                let s0 = (self.a[i] - self.a[i - 1]) / (c1 - c0);
                let s1 = (self.a[i + 1] - self.a[i]) / (c2 - c1);
                s1 - s0
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn m_strictly_decreasing(&self) -> bool {
        self.m.windows(2).all(|w| w[1] < w[0])
    }
}

/// Result of the search for `c₀` with `m(c₀) = 1`.
#[derive(Clone, Debug)]
pub struct OptimalC {
    pub c0: f64,
    pub solution: Subproblem,
    /// Every evaluation made during the search, sorted by `c`.
    pub scan: CScan,
    pub grid_expansions: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub mass_balance_err: f64,
    pub kkt_residual: f64,
    pub phi_integral: f64,
    pub iterations: usize,
    pub grid_expansions: usize,
    pub balanced: bool,
    pub path: SolverPath,
}

/// `𝒢(g)` together with the optimal budget and minimizer.
#[derive(Clone, Debug)]
pub struct InfConvSolution {
    pub n: usize,
    pub p: f64,
    pub c_star: f64,
    pub h: RadialProfile,
    pub phi: RadialProfile,
    pub a_value: f64,
    pub g_value: f64,
    pub free_radius: f64,
    pub diagnostics: Diagnostics,
    /// The subproblem at `c_star`; `None` for `g = 0`.
    pub subproblem: Option<Subproblem>,
}

/// The JSON record of a solution.
#[derive(Clone, Debug, Serialize)]
pub struct InfConvRecord {
    pub n: usize,
    pub p: f64,
    pub c_star: f64,
    pub g_value: f64,
    pub a_value: f64,
    pub free_radius: f64,
    pub mass_balance_err: f64,
    pub kkt_residual: f64,
    pub phi_integral: f64,
}

impl InfConvSolution {
    pub fn record(&self) -> InfConvRecord {
        InfConvRecord {
            n: self.n,
            p: self.p,
            c_star: self.c_star,
            g_value: self.g_value,
            a_value: self.a_value,
            free_radius: self.free_radius,
            mass_balance_err: self.diagnostics.mass_balance_err,
            kkt_residual: self.diagnostics.kkt_residual,
            phi_integral: self.diagnostics.phi_integral,
        }
    }

    pub fn structure(&self) -> Option<StructureReport> {
        self.subproblem.as_ref().map(|s| s.structure())
    }
}

fn choose_path(g: &RadialProfile, opts: &InfConvOptions) -> Result<SolverPath> {
    check_finite(g)?;
    let nonneg = g.is_nonnegative();
    if !nonneg && !opts.allow_signed {
        return Err(Error::InvalidInput(
            "profile changes sign; enable signed profiles to use the projected solver".into(),
        ));
    }
    if opts.force_projected || !nonneg || !g.is_nonincreasing() {
        Ok(SolverPath::Projected)
    } else {
        Ok(SolverPath::Truncation)
    }
}

fn solve(model: &ShellModel, c: f64, path: SolverPath, tol: f64, warm: Option<&[f64]>) -> Result<Subproblem> {
    match path {
        SolverPath::Truncation => truncation_on(model, c),
        SolverPath::Projected => projected_on(model, c, tol, warm, MAX_ITERATIONS),
    }
}

/// `g` on a grid reaching `2 r_max`, zero on the new cells.
fn extend(g: &RadialProfile) -> Result<RadialProfile> {
    let grid = Arc::new(g.grid().extended(2.0 * g.grid().r_max())?);
    let old = g.len();
    let mut values = g.values().to_vec();
    values.resize(grid.len(), 0.0);
    let mut out = RadialProfile::new(grid, values)?;
    for &(j, v) in g.jumps() {
        out = out.with_jump(j, v)?;
    }
    if g.values()[old - 1] != 0.0 {
        out = out.with_jump(old - 1, 0.0)?;
    }
    Ok(out)
}

/// Sorted record of evaluations.
fn scan_from(mut pts: Vec<(f64, f64, f64)>) -> CScan {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    let c: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let a: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let m: Vec<f64> = pts.iter().map(|p| p.2).collect();
    let k = c.len();
    let slope = |i: usize| (a[i + 1] - a[i]) / (c[i + 1] - c[i]);
    CScan {
        left_derivative: (0..k).map(|i| (i > 0).then(|| slope(i - 1))).collect(),
        right_derivative: (0..k).map(|i| (i + 1 < k).then(|| slope(i))).collect(),
        c,
        a,
        m,
    }
}

/// `A_g(c)` and `m(c)` at the given budgets (any order; output sorted).
pub fn c_scan(g: &RadialProfile, p: f64, cs: &[f64]) -> Result<CScan> {
    let opts = InfConvOptions::default();
    let path = choose_path(g, &opts)?;
    let model = ShellModel::new(g, p)?;
    let mut pts = Vec::with_capacity(cs.len());
    let mut warm: Option<Vec<f64>> = None;
    let mut sorted = cs.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    for &c in &sorted {
        let sub = solve(&model, c, path, opts.tol, warm.as_deref())?;
        pts.push((c, sub.a_value, sub.decrease_rate));
        warm = Some(sub.h.values().to_vec());
    }
    Ok(scan_from(pts))
}

/// The unique `c₀` with `∫ φ_{(c₀)} |x|^p dx = 1`, by bisection on `log c`.
pub fn optimal_c(g: &RadialProfile, p: f64) -> Result<OptimalC> {
    optimal_c_with(g, p, &InfConvOptions::default())
}

pub fn optimal_c_with(g: &RadialProfile, p: f64, opts: &InfConvOptions) -> Result<OptimalC> {
    let path = choose_path(g, opts)?;
    if g.values().iter().all(|&v| v == 0.0) && g.jumps().iter().all(|&(_, v)| v == 0.0) {
        return Err(Error::InvalidInput("profile is identically zero".into()));
    }
    let mut g = g.clone();
    for expansion in 0..=opts.max_expansions {
        let model = ShellModel::new(&g, p)?;
        let mut pts = Vec::new();
        let mut warm: Option<Vec<f64>> = None;
        // m(c), with an infeasible budget counted as "c too small"
        let mut eval = |c: f64, pts: &mut Vec<(f64, f64, f64)>| -> Result<Option<Subproblem>> {
            match solve(&model, c, path, opts.tol, warm.as_deref()) {
                Ok(sub) => {
                    pts.push((c, sub.a_value, sub.decrease_rate));
                    warm = Some(sub.h.values().to_vec());
                    Ok(Some(sub))
                }
                Err(Error::GridTooSmall(_)) => Ok(None),
                Err(e) => Err(e),
            }
        };
        // unbalanced mass leaves a potential whose moment diverges
        let above = |s: &Option<Subproblem>| s.as_ref().is_none_or(|s| !s.balanced || s.decrease_rate > 1.0);

        let g_max = g.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut c = g_max.max(f64::MIN_POSITIVE);
        let first = eval(c, &mut pts)?;
        let (mut lo, mut hi) = if above(&first) { (c, f64::NAN) } else { (f64::NAN, c) };
        let mut steps = 0;
        while hi.is_nan() {
            c *= 4.0;
            steps += 1;
            if steps > 200 {
                return Err(Error::InvalidInput("no budget with m(c) < 1".into()));
            }
            if !above(&eval(c, &mut pts)?) {
                hi = c;
            } else {
                lo = c;
            }
        }
        c = hi;
        steps = 0;
        while lo.is_nan() {
            c /= 4.0;
            steps += 1;
            if steps > 200 {
                return Err(Error::ProfileTooSmall { c_max: hi });
            }
            if above(&eval(c, &mut pts)?) {
                lo = c;
            } else {
                hi = c;
            }
        }
        for _ in 0..200 {
            if hi / lo - 1.0 <= 1e-15 {
                break;
            }
            let mid = (lo * hi).sqrt();
            if mid <= lo || mid >= hi {
                break;
            }
            if above(&eval(mid, &mut pts)?) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let c0 = (lo * hi).sqrt();
        let sol = eval(c0, &mut pts)?;
        let r_max = g.grid().r_max();
        match sol {
            Some(sub) if sub.balanced && sub.free_radius <= 0.9 * r_max => {
                return Ok(OptimalC {
                    c0,
                    solution: sub,
                    scan: scan_from(pts),
                    grid_expansions: expansion,
                });
            }
            _ => g = extend(&g)?,
        }
    }
    Err(Error::GridTooSmall(format!(
        "free radius still near the boundary after {} grid doublings",
        opts.max_expansions
    )))
}

/// `𝒢(g) = c₀ + A_g(c₀)`.
pub fn infconv_value(g: &RadialProfile, p: f64) -> Result<InfConvSolution> {
    infconv_value_with(g, p, &InfConvOptions::default())
}

pub fn infconv_value_with(g: &RadialProfile, p: f64, opts: &InfConvOptions) -> Result<InfConvSolution> {
    let path = choose_path(g, opts)?;
    let n = g.dim();
    if g.values().iter().all(|&v| v == 0.0) && g.jumps().iter().all(|&(_, v)| v == 0.0) {
        return Ok(InfConvSolution {
            n,
            p,
            c_star: 0.0,
            h: g.clone(),
            phi: RadialProfile::zeros(g.grid_arc().clone()),
            a_value: 0.0,
            g_value: 0.0,
            free_radius: 0.0,
            diagnostics: Diagnostics {
                mass_balance_err: 0.0,
                kkt_residual: 0.0,
                phi_integral: 0.0,
                iterations: 0,
                grid_expansions: 0,
                balanced: true,
                path,
            },
            subproblem: None,
        });
    }
    let opt = optimal_c_with(g, p, opts)?;
    let s = opt.solution;
    Ok(InfConvSolution {
        n,
        p,
        c_star: opt.c0,
        h: s.h.clone(),
        phi: s.phi.clone(),
        a_value: s.a_value,
        g_value: opt.c0 + s.a_value,
        free_radius: s.free_radius,
        diagnostics: Diagnostics {
            mass_balance_err: s.mass_balance_err,
            kkt_residual: s.kkt_residual,
            phi_integral: s.phi_integral,
            iterations: s.iterations,
            grid_expansions: opt.grid_expansions,
            balanced: s.balanced,
            path: s.path,
        },
        subproblem: Some(s),
    })
}
