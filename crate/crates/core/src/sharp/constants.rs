use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::gauss_composite;
use crate::radial::{gamma_half, surface_area};

/// Scaling exponents `(γ, β)` for the weight `|x|^p`.
///
/// `γ = 4/(n+2p)` balances `‖f‖₂^{2+γ} ≤ C‖∇f‖₂²‖|x|^p f‖₁^γ` under dilations;
/// `β = (n+2+2p)/(n+4+2p)` balances `𝒢_w(g) ≤ L‖g‖₂^{2β}` under
/// `g ↦ λ^{n+2+p} g(λ·)`.
pub fn exponents(n: usize, p: f64) -> (f64, f64) {
    let n = n as f64;
    (4.0 / (n + 2.0 * p), (n + 2.0 + 2.0 * p) / (n + 4.0 + 2.0 * p))
}

/// Aubin–Talenti constant `S_n` of `‖f‖²_{2n/(n-2)} ≤ S_n ‖∇f‖₂²`:
/// `(π n (n−2))^{-1} (Γ(n)/Γ(n/2))^{2/n}`.
pub fn aubin_talenti(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("Sobolev constant needs n >= 3, got {n}")));
    }
    let gamma_n: f64 = (1..n).map(|k| k as f64).product();
    let nf = n as f64;
    Ok((gamma_n / gamma_half(n)).powf(2.0 / nf) / (PI * nf * (nf - 2.0)))
}

/// Sobolev quotient `‖f‖²_{2*} / ‖∇f‖₂²` of `(1 + r²)^{-(n-2)/2}`,
/// integrated in `r = tan θ`.
pub fn sobolev_quotient_extremal(n: usize) -> f64 {
    let nf = n as f64;
    let omega = surface_area(n);
    let panels = 256;
    let half_pi = 0.5 * PI;
    let num = gauss_composite(0.0, half_pi, panels, |t| (t.sin() * t.cos()).powi(n as i32 - 1));
    let grad = gauss_composite(0.0, half_pi, panels, |t| {
        t.sin().powi(n as i32 + 1) * t.cos().powi(n as i32 - 3)
    });
    (omega * num).powf((nf - 2.0) / nf) / (omega * (nf - 2.0).powi(2) * grad)
}

/// `S_n` after checking it against [`sobolev_quotient_extremal`] to 1e-3.
pub fn validated_sobolev(n: usize) -> Result<f64> {
    let lit = aubin_talenti(n)?;
    let num = sobolev_quotient_extremal(n);
    let rel = (num - lit).abs() / lit;
    if rel > 1e-3 {
        return Err(Error::CrossCheck {
            what: "Sobolev constant",
            got: num,
            expected: lit,
            rel,
        });
    }
    Ok(lit)
}

/// `K_n = ((4/n)^{n/(n+4)} + (n/4)^{4/(n+4)}) S_n^{n/(n+4)}`, the constant
/// obtained by optimizing `c + S_n ‖g‖₂^{2(n+2)/n} c^{-4/n}` over `c`.
pub fn suboptimal_k(n: usize) -> Result<f64> {
    let s = validated_sobolev(n)?;
    let nf = n as f64;
    let e = nf / (nf + 4.0);
    Ok(((4.0 / nf).powf(e) + (nf / 4.0).powf(4.0 / (nf + 4.0))) * s.powf(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents_reduce_to_unweighted() {
        let (g, b) = exponents(3, 0.0);
        assert!((g - 4.0 / 3.0).abs() < 1e-15);
        assert!((2.0 * b - 10.0 / 7.0).abs() < 1e-15);
        let (g, b) = exponents(3, 2.0);
        assert!((g - 4.0 / 7.0).abs() < 1e-15);
        assert!((b - 9.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn sobolev_constant_n3() {
        // S_3 = (1/3)(2/π)^{4/3}
        let want = (2.0 / PI).powf(4.0 / 3.0) / 3.0;
        assert!((aubin_talenti(3).unwrap() / want - 1.0).abs() < 1e-14);
        for n in 3..=8 {
            let lit = aubin_talenti(n).unwrap();
            assert!((sobolev_quotient_extremal(n) / lit - 1.0).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn k_minimizes_the_chain() {
        // K_n = min_c c + S β c^{-4/n} at β = 1
        let n = 5;
        let s = aubin_talenti(n).unwrap();
        let k = suboptimal_k(n).unwrap();
        let f = |c: f64| c + s * c.powf(-4.0 / n as f64);
        let mut best = f64::INFINITY;
        for i in 1..200_000 {
            best = best.min(f(i as f64 * 1e-5));
        }
        assert!((best - k).abs() < 1e-8, "{best} {k}");
    }
}
