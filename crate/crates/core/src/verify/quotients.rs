use crate::error::{Error, Result};
use crate::infconv::{infconv_value, InfConvSolution};
use crate::quadrature::gauss_cell;
use crate::radial::{integrate, lp_norm, radial_laplacian, Norm, RadialProfile};
use crate::sharp::exponents;

/// `𝒢(g)/‖g‖₂^{2β}` with `β` from [`exponents`].
pub fn dual_quotient(g: &RadialProfile, p: f64) -> Result<f64> {
    let sol = infconv_value(g, p)?;
    dual_quotient_of(g, &sol)
}

/// The dual quotient from an existing solution for `g`.
pub fn dual_quotient_of(g: &RadialProfile, sol: &InfConvSolution) -> Result<f64> {
    let (_, beta) = exponents(g.dim(), sol.p);
    let norm = lp_norm(g, Norm::L2)?;
    if norm == 0.0 {
        return Err(Error::InvalidInput("dual quotient of the zero profile".into()));
    }
    Ok(sol.g_value / norm.powf(2.0 * beta))
}

/// `‖∇f‖₂²` of the piecewise-linear interpolant.
pub fn gradient_sq(f: &RadialProfile) -> Result<f64> {
    if f.jumps().iter().any(|&(j, v)| v != f.values()[j]) {
        return Err(Error::InvalidInput("gradient of a discontinuous profile is unbounded".into()));
    }
    let r = f.grid().nodes();
    let v = f.values();
    let n1 = f.dim() as i32 - 1;
    let mut s = 0.0;
    for i in 0..r.len() - 1 {
        let slope = (v[i + 1] - v[i]) / (r[i + 1] - r[i]);
        if slope != 0.0 {
            s += slope * slope * gauss_cell(r[i], r[i + 1], |x| x.powi(n1));
        }
    }
    Ok(f.grid().surface_factor() * s)
}

/// `‖f‖₂^{2+γ} / (‖∇f‖₂² ‖|x|^p f‖₁^γ)` with `γ` from [`exponents`].
pub fn nash_quotient(f: &RadialProfile, p: f64) -> Result<f64> {
    let (gamma, _) = exponents(f.dim(), p);
    let l2 = lp_norm(f, Norm::L2)?;
    let grad = gradient_sq(f)?;
    let moment = integrate(&f.map(f64::abs), p)?;
    let den = grad * moment.powf(gamma);
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::InvalidInput(format!("nash quotient denominator is {den}")));
    }
    Ok(l2.powf(2.0 + gamma) / den)
}

/// `max |C(−Δg)(r_i) − (g(r_i) − α r_i^p)|` over nodes with `r_i < 1`, where
/// `α = ∫ g / ∫_B |x|^p`.
pub fn el_residual(g: &RadialProfile, c: f64, p: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::InvalidInput(format!("C must be positive, got {c}")));
    }
    let n = g.dim() as f64;
    let alpha = integrate(g, 0.0)? / (g.grid().surface_factor() / (n + p));
    let lap = radial_laplacian(g);
    let res = g
        .grid()
        .nodes()
        .iter()
        .zip(g.values().iter().zip(lap.values()))
        .take_while(|(&r, _)| r < 1.0 - 1e-12)
        .map(|(&r, (&v, &l))| {
            let model = if p == 0.0 { alpha } else { alpha * r.powf(p) };
            (-c * l - (v - model)).abs()
        })
        .fold(0.0_f64, f64::max);
    Ok(res)
}
