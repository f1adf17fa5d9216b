//! Extremal profiles and sharp constants.

mod constants;
mod unweighted;
mod weighted;

use serde::Serialize;

pub use constants::{aubin_talenti, exponents, sobolev_quotient_extremal, suboptimal_k, validated_sobolev};
pub use unweighted::{
    build_unweighted_optimizer, build_unweighted_optimizer_on, sharp_constant_l, UnweightedData,
    CROSS_CHECK_TOL, OPTIMIZER_CELLS,
};
pub use weighted::{
    build_weighted_optimizer, build_weighted_optimizer_on, weighted_candidate, weighted_grid, VariantChoice, WeightedBuild,
    WeightedCandidate, EL_TRIPWIRE,
};

use crate::eigen::{radial_bessel, ConsistencyVariant};
use crate::error::{Error, Result};
use crate::infconv::infconv_value;
use crate::radial::{lp_norm, Norm, RadialProfile};

/// λ₀ quoted in the literature for `n = 3, p = 2`; kept for comparison only.
pub const REFERENCE_LAMBDA0: f64 = 1.60412258;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OptimizerMeta {
    Unweighted {
        mu1: f64,
        a: f64,
        mean_g: f64,
        ball_volume: f64,
    },
    Weighted {
        lambda0: f64,
        rho0: f64,
        alpha: f64,
        #[serde(rename = "C")]
        c_const: f64,
        variant: ConsistencyVariant,
        normalization: f64,
    },
}

/// An extremal profile supported in the closed unit ball.
#[derive(Clone, Debug)]
pub struct OptimizerProfile {
    pub g: RadialProfile,
    pub meta: OptimizerMeta,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantsReport {
    pub n: usize,
    pub p: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<ConsistencyVariant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda0_printed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda0_rederived: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub el_residual_printed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub el_residual_rederived: Option<f64>,
    pub gamma: f64,
    pub beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hls_constant: Option<f64>,
    pub discrepancy_notes: Vec<String>,
}

fn exponent_notes(n: usize, p: f64, notes: &mut Vec<String>) {
    let nf = n as f64;
    let alt_gamma = nf / (4.0 + 2.0 * p);
    let (gamma, beta) = exponents(n, p);
    if (alt_gamma - gamma).abs() > 1e-12 {
        notes.push(format!(
            "gamma = 4/(n+2p) = {gamma:.6} from dilation balance; the form n/(4+2p) = {alt_gamma:.6} is not scale invariant"
        ));
    }
    if p > 0.0 {
        let alt_beta = (nf + 2.0 + p) / (nf + 4.0 + 2.0 * p);
        notes.push(format!(
            "beta = (n+2+2p)/(n+4+2p) = {beta:.6}; the form (n+2+p)/(n+4+2p) = {alt_beta:.6} is not invariant under g -> lambda^(n+2+p) g(lambda x)"
        ));
    }
}

/// `λJ'(λ)/J(λ) − kλ²/(λ² − 2n)`.
fn consistency_mismatch(n: usize, lam: f64, variant: ConsistencyVariant) -> f64 {
    let (j, dj) = radial_bessel(n, lam);
    lam * dj / j - variant.factor() * lam * lam / (lam * lam - 2.0 * n as f64)
}

/// Unweighted (`p = 0`) constants.
pub fn unweighted_report(n: usize) -> Result<ConstantsReport> {
    let data = UnweightedData::new(n, 1.0)?;
    let l = sharp_constant_l(n)?;
    let (gamma, beta) = exponents(n, 0.0);
    let mut notes = Vec::new();
    let (k, hls) = if n >= 3 {
        notes.push("sub-optimal constant uses the norm exponent 2(n+2)/n in the Sobolev step".into());
        (Some(suboptimal_k(n)?), Some(validated_sobolev(n)?))
    } else {
        (None, None)
    };
    exponent_notes(n, 0.0, &mut notes);
    Ok(ConstantsReport {
        n,
        p: 0.0,
        l,
        k,
        mu1: Some(data.mu),
        lambda0: None,
        rho0: None,
        variant: None,
        lambda0_printed: None,
        lambda0_rederived: None,
        el_residual_printed: None,
        el_residual_rederived: None,
        gamma,
        beta,
        hls_constant: hls,
        discrepancy_notes: notes,
    })
}

/// `L_{n,2} = 𝒢_w(g)/‖g‖₂^{2β}` for the accepted weighted optimizer.
pub fn weighted_constant_l(n: usize) -> Result<ConstantsReport> {
    let p = 2.0;
    let build = build_weighted_optimizer(n, VariantChoice::Auto)?;
    let g = &build.accepted.profile.g;
    let sol = infconv_value(g, p)?;
    let (gamma, beta) = exponents(n, p);
    let norm = lp_norm(g, Norm::L2)?;
    let l = sol.g_value / norm.powf(2.0 * beta);
    let (lambda0, rho0, alpha, variant) = match build.accepted.profile.meta {
        OptimizerMeta::Weighted { lambda0, rho0, alpha, variant, .. } => (lambda0, rho0, alpha, variant),
        OptimizerMeta::Unweighted { .. } => unreachable!("weighted build"),
    };
    let rel = (sol.c_star - alpha).abs() / alpha.abs();
    if rel > 1e-4 {
        return Err(Error::CrossCheck {
            what: "weighted budget",
            got: sol.c_star,
            expected: alpha,
            rel,
        });
    }
    let lam_of = |c: &WeightedCandidate| match c.profile.meta {
        OptimizerMeta::Weighted { lambda0, .. } => lambda0,
        OptimizerMeta::Unweighted { .. } => f64::NAN,
    };
    let (lp, lr) = (lam_of(&build.printed), lam_of(&build.rederived));
    let mut notes = vec![
        format!(
            "consistency roots: printed {lp:.10}, rederived {lr:.10}; accepted {} by Euler-Lagrange residual (relative {:.3e} printed, {:.3e} rederived)",
            variant.name(),
            build.printed.el_relative,
            build.rederived.el_relative
        ),
    ];
    if n == 3 {
        notes.push(format!(
            "reference value lambda0 = {REFERENCE_LAMBDA0} solves neither consistency equation (mismatch {:.6e} printed, {:.6e} rederived); reported, not used",
            consistency_mismatch(n, REFERENCE_LAMBDA0, ConsistencyVariant::Printed),
            consistency_mismatch(n, REFERENCE_LAMBDA0, ConsistencyVariant::Rederived)
        ));
    }
    exponent_notes(n, p, &mut notes);
    Ok(ConstantsReport {
        n,
        p,
        l,
        k: None,
        mu1: None,
        lambda0: Some(lambda0),
        rho0: Some(rho0),
        variant: Some(variant),
        lambda0_printed: Some(lp),
        lambda0_rederived: Some(lr),
        el_residual_printed: Some(build.printed.el_relative),
        el_residual_rederived: Some(build.rederived.el_relative),
        gamma,
        beta,
        hls_constant: None,
        discrepancy_notes: notes,
    })
}

/// Constants for `p = 0` or `p = 2`.
pub fn constants_report(n: usize, p: f64) -> Result<ConstantsReport> {
    if !(1..=10).contains(&n) {
        return Err(Error::InvalidInput(format!("dimension must be in 1..=10, got {n}")));
    }
    if p == 0.0 {
        unweighted_report(n)
    } else if p == 2.0 {
        weighted_constant_l(n)
    } else {
        Err(Error::InvalidInput(format!("constants are available for p = 0 and p = 2, got {p}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unweighted_report_n3() {
        let r = constants_report(3, 0.0).unwrap();
        assert!((r.mu1.unwrap() - 20.1907).abs() < 1e-4);
        assert!(r.k.unwrap() >= r.l);
        assert!((r.beta - 5.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn low_dimensions_have_no_k() {
        let r = constants_report(1, 0.0).unwrap();
        assert!(r.k.is_none() && r.hls_constant.is_none());
    }

    #[test]
    fn unsupported_inputs() {
        assert!(constants_report(0, 0.0).is_err());
        assert!(constants_report(11, 0.0).is_err());
        assert!(constants_report(3, 1.0).is_err());
    }

    #[test]
    fn weighted_report_quarantines_reference_root() {
        let r = constants_report(3, 2.0).unwrap();
        assert_eq!(r.variant, Some(ConsistencyVariant::Rederived));
        assert!(r.el_residual_rederived.unwrap() < EL_TRIPWIRE);
        assert!(r.el_residual_printed.unwrap() > 10.0 * r.el_residual_rederived.unwrap());
        let json = serde_json::to_value(&r).unwrap();
        let notes = json["discrepancy_notes"].to_string();
        assert!(notes.contains("1.60412258"));
        let mut rest = json.clone();
        rest.as_object_mut().unwrap().remove("discrepancy_notes");
        assert!(!rest.to_string().contains("1.604"));
    }
}
