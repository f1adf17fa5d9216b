use super::shell::ShellModel;
use super::{SolverPath, Subproblem};
use crate::error::{Error, Result};
use crate::radial::RadialProfile;

/// Default cap on outer iterations.
pub const MAX_ITERATIONS: usize = 100_000;
const ARMIJO: f64 = 1e-4;
const POWER_STEPS: usize = 20;

/// KKT violation at one node: `|φ|` where free, the wrong-signed part of `φ`
/// where a bound is attained, zero where both bounds coincide.
#[inline]
pub(crate) fn kkt_node(u: f64, h: f64, phi: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else if h >= u {
        (-phi).max(0.0)
    } else if h <= -u {
        phi.max(0.0)
    } else {
        phi.abs()
    }
}

pub(crate) fn kkt(u: &[f64], h: &[f64], phi: &[f64]) -> f64 {
    (0..u.len()).map(|j| kkt_node(u[j], h[j], phi[j])).fold(0.0, f64::max)
}

/// Minimize `½⟨g−h, (−Δ)^{-1}(g−h)⟩` over `|h| ≤ c|x|^p` for any finite `g`.
///
/// Projected gradient (step `1/L`, Armijo backtracking) alternates with an
/// exact minimization over the nodes whose bounds are not binding. `tol` is
/// relative to the largest potential of `g` itself.
pub fn projected_solve(g: &RadialProfile, c: f64, p: f64, tol: f64) -> Result<Subproblem> {
    let model = ShellModel::new(g, p)?;
    projected_on(&model, c, tol, None, MAX_ITERATIONS)
}

pub(crate) struct Feasible<'a> {
    model: &'a ShellModel,
    u: Vec<f64>,
    /// `Σ G`, imposed on `Σ w h` when `n ≤ 2`.
    target: Option<f64>,
}

impl Feasible<'_> {
    fn clip(&self, j: usize, v: f64) -> f64 {
        v.clamp(-self.u[j], self.u[j])
    }

    /// Projection in the `w`-weighted metric.
    fn project(&self, y: &mut [f64]) -> Result<()> {
        match self.target {
            None => {
                for (j, v) in y.iter_mut().enumerate() {
                    *v = self.clip(j, *v);
                }
                Ok(())
            }
            Some(t) => self.project_affine(y, t),
        }
    }

    /// `h_j = clip(y_j + ν)` with `Σ w h = t`; monotone in `ν`.
    fn project_affine(&self, y: &mut [f64], t: f64) -> Result<()> {
        let w = &self.model.w;
        let total = |nu: f64| -> f64 { (0..y.len()).map(|j| w[j] * self.clip(j, y[j] + nu)).sum() };
        let cap: f64 = (0..y.len()).map(|j| w[j] * self.u[j]).sum();
        if t.abs() > cap * (1.0 + 1e-14) {
            return Err(Error::GridTooSmall(format!(
                "mass {t:e} exceeds the budget {cap:e} available on the grid"
            )));
        }
        let span = y.iter().zip(&self.u).fold(0.0_f64, |m, (v, u)| m.max(v.abs() + u)) + 1.0;
        let (mut lo, mut hi) = (-span, span);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total(mid) < t {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-16 * span {
                break;
            }
        }
        let mut nu = 0.5 * (lo + hi);
        // exact fix on the free nodes of the final shift
        let free_w: f64 = (0..y.len())
            .filter(|&j| (y[j] + nu).abs() < self.u[j])
            .map(|j| w[j])
            .sum();
        if free_w > 0.0 {
            let cand = nu + (t - total(nu)) / free_w;
            if (total(cand) - t).abs() <= (total(nu) - t).abs() {
                nu = cand;
            }
        }
        for (j, v) in y.iter_mut().enumerate() {
            *v = self.clip(j, *v + nu);
        }
        // spread the last rounding over the free nodes
        let err = t - (0..y.len()).map(|j| w[j] * y[j]).sum::<f64>();
        if free_w > 0.0 && err != 0.0 {
            for (j, v) in y.iter_mut().enumerate() {
                if v.abs() < self.u[j] {
                    *v = self.clip(j, *v + err / free_w);
                }
            }
        }
        Ok(())
    }
}

struct State {
    h: Vec<f64>,
    phi: Vec<f64>,
    f: f64,
}

fn evaluate(model: &ShellModel, h: Vec<f64>) -> State {
    let q = model.masses(&h);
    let (m, phi) = model.potential(&q);
    let f = 0.5 * model.energy(&m);
    State { h, phi, f }
}

/// Largest eigenvalue of `K W` by power iteration.
fn lipschitz(model: &ShellModel) -> f64 {
    let len = model.len();
    let mut v: Vec<f64> = (0..len).map(|j| 1.0 + (j % 7) as f64 * 1e-3).collect();
    let mut lam = 0.0;
    for _ in 0..POWER_STEPS {
        let wv: Vec<f64> = v.iter().zip(&model.w).map(|(a, b)| a * b).collect();
        let (_, kv) = model.potential(&wv);
        let norm = |x: &[f64]| -> f64 {
            x.iter().zip(&model.w).map(|(a, b)| a * a * b).sum::<f64>().sqrt()
        };
        let nk = norm(&kv);
        let nv = norm(&v);
        if nk == 0.0 {
            break;
        }
        lam = nk / nv;
        v = kv.iter().map(|x| x / nk).collect();
    }
    lam
}

/// Solve `D_BB x = rhs` on the nodes flagged in `bind`, one Thomas sweep per
/// contiguous run.
fn solve_binding(diag: &[f64], upper: &[f64], bind: &[bool], rhs: &[f64]) -> Vec<f64> {
    let len = diag.len();
    let mut x = vec![0.0; len];
    let mut start = 0;
    while start < len {
        if !bind[start] {
            start += 1;
            continue;
        }
        let mut end = start;
        while end + 1 < len && bind[end + 1] {
            end += 1;
        }
        let k = end - start + 1;
        let mut cp = vec![0.0; k];
        let mut dp = vec![0.0; k];
        for i in 0..k {
            let j = start + i;
            let a = if i > 0 { upper[j - 1] } else { 0.0 };
            let denom = diag[j] - if i > 0 { a * cp[i - 1] } else { 0.0 };
            cp[i] = if i + 1 < k { upper[j] / denom } else { 0.0 };
            dp[i] = (rhs[j] - if i > 0 { a * dp[i - 1] } else { 0.0 }) / denom;
        }
        for i in (0..k).rev() {
            x[start + i] = dp[i] - if i + 1 < k { cp[i] * x[start + i + 1] } else { 0.0 };
        }
        start = end + 1;
    }
    x
}

pub(crate) fn projected_on(
    model: &ShellModel,
    c: f64,
    tol: f64,
    warm: Option<&[f64]>,
    max_iter: usize,
) -> Result<Subproblem> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidInput(format!("budget c must be positive, got {c}")));
    }
    let len = model.len();
    let bx = Feasible {
        model,
        u: model.bounds(c),
        target: (model.n <= 2).then(|| model.g_mass.iter().sum()),
    };
    let (_, phi_g) = model.potential(&model.g_mass);
    let scale = phi_g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let abs_tol = tol * scale;

    let mut h: Vec<f64> = match warm {
        Some(w) => w.to_vec(),
        None => (0..len).map(|j| model.g_avg(j)).collect(),
    };
    bx.project(&mut h)?;
    let mut st = evaluate(model, h);
    let (diag, upper) = model.inverse_green();
    let mut step = {
        let l = lipschitz(model);
        if l > 0.0 { 1.0 / l } else { 1.0 }
    };

    let mut iterations = 0;
    let mut res = kkt(&bx.u, &st.h, &st.phi);
    while res > abs_tol {
        if iterations >= max_iter {
            return Err(Error::IterationCap { iterations, residual: res });
        }
        iterations += 1;

        // projected gradient with Armijo backtracking
        let mut tau = step;
        loop {
            let mut trial: Vec<f64> = st.h.iter().zip(&st.phi).map(|(h, f)| h + tau * f).collect();
            bx.project(&mut trial)?;
            let decrease: f64 = (0..len).map(|j| model.w[j] * st.phi[j] * (trial[j] - st.h[j])).sum();
            let cand = evaluate(model, trial);
            if cand.f <= st.f - ARMIJO * decrease || tau < 1e-300 {
                if cand.f <= st.f {
                    st = cand;
                }
                break;
            }
            tau *= 0.5;
        }
        step = (2.0 * tau).min(step * 4.0);

        // exact minimization with binding bounds held fixed
        let bind: Vec<bool> = (0..len)
            .map(|j| {
                let u = bx.u[j];
                u == 0.0 || (st.h[j] >= u && st.phi[j] > 0.0) || (st.h[j] <= -u && st.phi[j] < 0.0)
            })
            .collect();
        if bind.iter().any(|b| !b) {
            let q = model.masses(&st.h);
            let rhs: Vec<f64> = (0..len).map(|j| if bind[j] { q[j] } else { 0.0 }).collect();
            let phi_b = solve_binding(&diag, &upper, &bind, &rhs);
            let mut target = st.h.clone();
            for j in 0..len {
                if bind[j] {
                    continue;
                }
                let mut qf = 0.0;
                if j > 0 && bind[j - 1] {
                    qf += upper[j - 1] * phi_b[j - 1];
                }
                if j + 1 < len && bind[j + 1] {
                    qf += upper[j] * phi_b[j + 1];
                }
                target[j] = (model.g_mass[j] - qf) / model.w[j];
            }
            let feasible = (0..len).all(|j| target[j].abs() <= bx.u[j]);
            if feasible {
                let cand = evaluate(model, target);
                if cand.f <= st.f {
                    st = cand;
                }
            } else {
                // longest feasible step toward the subspace minimizer, then its projection
                let mut t_max: f64 = 1.0;
                for j in 0..len {
                    let d = target[j] - st.h[j];
                    if d > 0.0 && st.h[j] + d > bx.u[j] {
                        t_max = t_max.min((bx.u[j] - st.h[j]) / d);
                    } else if d < 0.0 && st.h[j] + d < -bx.u[j] {
                        t_max = t_max.min((-bx.u[j] - st.h[j]) / d);
                    }
                }
                let line: Vec<f64> = (0..len)
                    .map(|j| bx.clip(j, st.h[j] + t_max * (target[j] - st.h[j])))
                    .collect();
                let a = evaluate(model, line);
                let mut proj = target;
                bx.project(&mut proj)?;
                let b = evaluate(model, proj);
                let best = if b.f < a.f { b } else { a };
                if best.f <= st.f {
                    st = best;
                }
            }
        }
        let new_res = kkt(&bx.u, &st.h, &st.phi);
        res = new_res;
    }
    Subproblem::assemble(model, c, st.h, iterations, SolverPath::Projected)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_runs() {
        // two runs: {0,1} and {3}
        let diag = [2.0, 2.0, 2.0, 4.0];
        let upper = [-1.0, -1.0, -1.0];
        let bind = [true, true, false, true];
        let rhs = [1.0, 1.0, 0.0, 2.0];
        let x = solve_binding(&diag, &upper, &bind, &rhs);
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
        assert_eq!(x[2], 0.0);
        assert!((x[3] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn kkt_signs() {
        assert_eq!(kkt_node(1.0, 1.0, 0.5), 0.0);
        assert_eq!(kkt_node(1.0, 1.0, -0.5), 0.5);
        assert_eq!(kkt_node(1.0, -1.0, -0.5), 0.0);
        assert_eq!(kkt_node(1.0, 0.2, -0.5), 0.5);
        assert_eq!(kkt_node(0.0, 0.0, 3.0), 0.0);
    }
}
