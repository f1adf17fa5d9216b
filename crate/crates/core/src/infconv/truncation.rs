use super::shell::ShellModel;
use super::{SolverPath, Subproblem};
use crate::error::{Error, Result};
use crate::radial::RadialProfile;

/// Explicit minimizer for nonnegative, non-increasing `g`: `h = c r^p` on
/// `B(r_c)`, `h = g` outside, with `r_c` the smallest mass-balancing radius.
pub fn truncation_h(g: &RadialProfile, c: f64, p: f64) -> Result<Subproblem> {
    if !g.is_nonnegative() || !g.is_nonincreasing() {
        return Err(Error::NotMonotone);
    }
    let model = ShellModel::new(g, p)?;
    truncation_on(&model, c)
}

pub(crate) fn truncation_on(model: &ShellModel, c: f64) -> Result<Subproblem> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidInput(format!("budget c must be positive, got {c}")));
    }
    let len = model.len();
    let u = model.bounds(c);
    let mut h = vec![0.0; len];
    let mut s = 0.0;
    let mut stop = None;
    for j in 0..len {
        let full = model.g_mass[j] - model.w[j] * u[j];
        if s + full < 0.0 {
            h[j] = (model.g_mass[j] + s) / model.w[j];
            stop = Some(j);
            break;
        }
        s += full;
        h[j] = u[j];
    }
    let volume = match stop {
        Some(k) => {
            for j in k + 1..len {
                h[j] = model.g_avg(j);
            }
            let gk = model.g_avg(k);
            let theta = if u[k] != gk { (h[k] - gk) / (u[k] - gk) } else { 0.0 };
            model.w[..k].iter().sum::<f64>() + theta.clamp(0.0, 1.0) * model.w[k]
        }
        None => model.w.iter().sum(),
    };
    let r_c = (model.n as f64 * volume).powf(1.0 / model.n as f64);
    let mut sub = Subproblem::assemble(model, c, h, 0, SolverPath::Truncation)?;
    sub.free_radius = r_c;
    sub.balanced = stop.is_some();
    Ok(sub)
}
