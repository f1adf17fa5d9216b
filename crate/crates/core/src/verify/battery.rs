use std::sync::Arc;

use serde::Serialize;

use super::families::{optimizer_on, Family};
use super::quotients::{dual_quotient, dual_quotient_of, el_residual, nash_quotient};
use crate::error::{Error, Result};
use crate::infconv::{c_scan, infconv_value, InfConvSolution};
use crate::radial::{lp_norm, rescale, Norm, RadialGrid, RadialProfile};
use crate::sharp::{weighted_constant_l, OptimizerMeta, UnweightedData};

/// Pass thresholds of the battery.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tolerances {
    /// Slack in `quotient ≤ reference (1 + slack)`.
    pub domination: f64,
    /// Relative gap allowed for the optimizer itself.
    pub equality: f64,
    /// Mass balance, relative to `‖g‖₁`.
    pub mass: f64,
    /// `h = g` and `φ = 0` off the active set, relative to `max(‖g‖_∞, ‖φ‖_∞)`.
    pub structure: f64,
    /// Second differences of `A`, relative to `max A`.
    pub convexity: f64,
    pub scale: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            domination: 1e-3,
            equality: 5e-4,
            mass: 1e-9,
            structure: 1e-8,
            convexity: 1e-8,
            scale: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BatterySpec {
    pub dims: Vec<usize>,
    pub p: f64,
    pub families: Vec<Family>,
    pub cells: usize,
    pub scan_points: usize,
    pub tolerances: Tolerances,
}

impl BatterySpec {
    /// The standard families plus the optimizer on a 2048-cell grid.
    pub fn standard(dims: Vec<usize>, p: f64) -> Self {
        let mut families = Family::standard();
        families.push(Family::Optimizer);
        Self {
            dims,
            p,
            families,
            cells: 2048,
            scan_points: 12,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PassFlags {
    pub domination: bool,
    pub nash_maximality: bool,
    pub structure: bool,
    pub convexity: bool,
    pub scale_covariance: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equality: Option<bool>,
}

impl PassFlags {
    pub fn all(&self) -> bool {
        self.domination
            && self.nash_maximality
            && self.structure
            && self.convexity
            && self.scale_covariance
            && self.equality != Some(false)
    }

    fn failed(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (ok, name) in [
            (self.domination, "domination"),
            (self.nash_maximality, "nash_maximality"),
            (self.structure, "structure"),
            (self.convexity, "convexity"),
            (self.scale_covariance, "scale_covariance"),
            (self.equality != Some(false), "equality"),
        ] {
            if !ok {
                out.push(name);
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Residuals {
    pub mass_balance_err: f64,
    pub kkt_residual: f64,
    pub free_h_gap: f64,
    pub free_phi: f64,
    pub bound_ratio: f64,
    pub min_second_difference: f64,
    pub scale_covariance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub el_residual: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseMetrics {
    pub dual_quotient: f64,
    pub nash_quotient: f64,
    /// `dual_quotient / L`.
    pub dual_ratio: f64,
    /// `nash_quotient / nash_quotient(optimizer)`.
    pub nash_ratio: f64,
    pub c_star: f64,
    pub pass: PassFlags,
    pub residuals: Residuals,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseRecord {
    #[serde(flatten)]
    pub family: Family,
    pub n: usize,
    pub p: f64,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<CaseMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CaseRecord {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.metrics.as_ref().is_some_and(|m| m.pass.all())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReferenceValues {
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub nash_quotient: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridMeta {
    pub cells: usize,
    pub scheme: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportMeta {
    pub version: &'static str,
    pub grid: GridMeta,
    pub dims: Vec<usize>,
    pub p: f64,
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub cases: usize,
    pub passed: usize,
    /// `max dual_quotient / L` over non-optimizer cases.
    pub max_dual_ratio: Option<f64>,
    /// `max |dual_quotient / L − 1|` over optimizer cases.
    pub equality_gap: Option<f64>,
    pub references: Vec<ReferenceValues>,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub meta: ReportMeta,
    pub cases: Vec<CaseRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.summary.failures.is_empty()
    }
}

fn reference(n: usize, p: f64, cells: usize) -> Result<ReferenceValues> {
    let l = if p == 0.0 {
        UnweightedData::new(n, 1.0)?.sharp_constant()
    } else if p == 2.0 {
        weighted_constant_l(n)?.l
    } else {
        return Err(Error::InvalidInput(format!("battery supports p = 0 and p = 2, got {p}")));
    };
    let opt = Family::Optimizer.profile(n, p, cells)?;
    Ok(ReferenceValues {
        n,
        l,
        nash_quotient: nash_quotient(&opt, p)?,
    })
}

/// `g` on a larger grid that extends its own, zero beyond its end.
fn on_grid(g: &RadialProfile, grid: &Arc<RadialGrid>) -> Result<RadialProfile> {
    if Arc::ptr_eq(g.grid_arc(), grid) || **g.grid_arc() == **grid {
        return Ok(g.clone());
    }
    let len = g.len();
    let mut values = vec![0.0; grid.len()];
    values[..len].copy_from_slice(g.values());
    let mut out = RadialProfile::new(grid.clone(), values)?;
    for &(j, v) in g.jumps() {
        out = out.with_jump(j, v)?;
    }
    if g.values()[len - 1] != 0.0 && g.jumps().iter().all(|&(j, _)| j != len - 1) {
        out = out.with_jump(len - 1, 0.0)?;
    }
    Ok(out)
}

fn scan_budgets(sol: &InfConvSolution, g: &RadialProfile, points: usize) -> Vec<f64> {
    let c = sol.c_star;
    let lo = if g.dim() >= 3 { 0.5 * c } else { c };
    let hi = if sol.p == 0.0 {
        let top = lp_norm(g, Norm::Inf).unwrap_or(c);
        c + 0.9 * (top - c)
    } else {
        4.0 * c
    };
    if !(hi > lo) || points < 3 {
        return Vec::new();
    }
    (0..points)
        .map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64))
        .collect()
}

fn run_case(family: Family, n: usize, spec: &BatterySpec, refv: &ReferenceValues) -> Result<CaseMetrics> {
    let p = spec.p;
    let tol = &spec.tolerances;
    let grid = family.grid(n, None, spec.cells)?;
    let (g, meta) = if family == Family::Optimizer {
        let opt = optimizer_on(grid, p)?;
        (opt.g, Some(opt.meta))
    } else {
        (family.profile_on(grid, p)?, None)
    };
    let sol = infconv_value(&g, p)?;
    let dq = dual_quotient_of(&g, &sol)?;
    let nq = nash_quotient(&g, p)?;

    let st = sol
        .structure()
        .ok_or_else(|| Error::InvalidInput("zero profile in battery".into()))?;
    let g_scale = lp_norm(&g, Norm::Inf)?;
    let phi_scale = lp_norm(&sol.phi, Norm::Inf)?;
    let scale = g_scale.max(phi_scale);
    let l1 = lp_norm(&g, Norm::L1)?;
    let structure = st.mass_balance_err <= tol.mass * l1
        && st.free_h_gap <= tol.structure * scale
        && st.free_phi <= tol.structure * scale
        && st.bound_ratio <= 1.0 + 1e-12;

    let budgets = scan_budgets(&sol, &g, spec.scan_points);
    let (min_d2, convexity) = if budgets.is_empty() {
        (0.0, true)
    } else {
        let scan = c_scan(&on_grid(&g, sol.h.grid_arc())?, p, &budgets)?;
        let a_max = scan.a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let d2 = scan.min_second_difference();
        (d2, d2 >= -tol.convexity * a_max && scan.m_strictly_decreasing())
    };

    let lam = 2.0;
    let dq_scaled = dual_quotient(&rescale(&g, lam, n as f64 + 2.0 + p)?, p)?;
    let scale_err = (dq_scaled / dq - 1.0).abs();

    let dual_ratio = dq / refv.l;
    let nash_ratio = nq / refv.nash_quotient;
    let is_opt = meta.is_some();
    let el = match meta {
        Some(OptimizerMeta::Unweighted { mu1, .. }) => Some(el_residual(&g, 1.0 / mu1, p)?),
        Some(OptimizerMeta::Weighted { c_const, .. }) => Some(el_residual(&g, c_const, p)?),
        None => None,
    };
    Ok(CaseMetrics {
        dual_quotient: dq,
        nash_quotient: nq,
        dual_ratio,
        nash_ratio,
        c_star: sol.c_star,
        pass: PassFlags {
            domination: dual_ratio <= 1.0 + tol.domination,
            nash_maximality: nash_ratio <= 1.0 + tol.domination,
            structure,
            convexity,
            scale_covariance: scale_err <= tol.scale,
            equality: is_opt.then(|| (dual_ratio - 1.0).abs() <= tol.equality),
        },
        residuals: Residuals {
            mass_balance_err: st.mass_balance_err,
            kkt_residual: sol.diagnostics.kkt_residual,
            free_h_gap: st.free_h_gap,
            free_phi: st.free_phi,
            bound_ratio: st.bound_ratio,
            min_second_difference: min_d2,
            scale_covariance: scale_err,
            el_residual: el,
        },
    })
}

/// Run every (dimension, family) case. Case failures are recorded in the
/// report; only failures to compute the reference constants are returned.
pub fn run_battery(spec: &BatterySpec) -> Result<VerificationReport> {
    let mut cases = Vec::new();
    let mut references = Vec::new();
    if !spec.families.is_empty() {
        for &n in &spec.dims {
            if !(1..=10).contains(&n) {
                return Err(Error::InvalidInput(format!("dimension must be in 1..=10, got {n}")));
            }
            let refv = reference(n, spec.p, spec.cells)?;
            for &family in &spec.families {
                let (metrics, error) = match run_case(family, n, spec, &refv) {
                    Ok(m) => (Some(m), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                cases.push(CaseRecord {
                    family,
                    n,
                    p: spec.p,
                    metrics,
                    error,
                });
            }
            references.push(refv);
        }
    }
    let summary = summarize(&cases, references);
    Ok(VerificationReport {
        meta: ReportMeta {
            version: env!("CARGO_PKG_VERSION"),
            grid: GridMeta {
                cells: spec.cells,
                scheme: "uniform",
            },
            dims: spec.dims.clone(),
            p: spec.p,
            tolerances: spec.tolerances,
        },
        cases,
        summary,
    })
}

fn summarize(cases: &[CaseRecord], references: Vec<ReferenceValues>) -> Summary {
    let mut failures = Vec::new();
    let mut max_ratio: Option<f64> = None;
    let mut gap: Option<f64> = None;
    for c in cases {
        let label = format!("{} n={}", c.family.name(), c.n);
        if let Some(e) = &c.error {
            failures.push(format!("{label}: {e}"));
            continue;
        }
        let Some(m) = &c.metrics else { continue };
        if c.family == Family::Optimizer {
            let d = (m.dual_ratio - 1.0).abs();
            gap = Some(gap.map_or(d, |g| g.max(d)));
        } else {
            max_ratio = Some(max_ratio.map_or(m.dual_ratio, |r| r.max(m.dual_ratio)));
        }
        let failed = m.pass.failed();
        if !failed.is_empty() {
            failures.push(format!("{label}: {}", failed.join(", ")));
        }
    }
    Summary {
        cases: cases.len(),
        passed: cases.iter().filter(|c| c.passed()).count(),
        max_dual_ratio: max_ratio,
        equality_gap: gap,
        references,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_battery_passes() {
        let spec = BatterySpec {
            families: Vec::new(),
            ..BatterySpec::standard(vec![3], 0.0)
        };
        let rep = run_battery(&spec).unwrap();
        assert!(rep.cases.is_empty());
        assert!(rep.passed());
        assert_eq!(rep.summary.cases, 0);
    }

    #[test]
    fn bad_p_is_an_infrastructure_error() {
        let spec = BatterySpec::standard(vec![3], 1.0);
        assert!(run_battery(&spec).is_err());
    }
}
