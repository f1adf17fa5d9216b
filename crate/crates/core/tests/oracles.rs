//! Independent closed forms and series checked against the library.

use std::f64::consts::PI;
use std::sync::Arc;

use nashdual_core::infconv::infconv_value;
use nashdual_core::sharp::{
    build_unweighted_optimizer, build_unweighted_optimizer_on, build_weighted_optimizer, sharp_constant_l,
    UnweightedData, VariantChoice,
};
use nashdual_core::verify::el_residual;
use nashdual_core::{
    lp_norm, make_grid, radial_bessel, GridScheme, Norm, OptimizerMeta, RadialProfile,
};

fn j0_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= -(x * x / 4.0) / (k as f64 * k as f64);
        sum += term;
    }
    sum
}

#[test]
fn radial_bessel_closed_forms() {
    for i in 1..60 {
        let x = 0.2 * i as f64;
        let (j1, d1) = radial_bessel(1, x);
        assert!((j1 - x.cos()).abs() < 1e-11 && (d1 + x.sin()).abs() < 1e-11, "n=1 x={x}");
        let (j3, d3) = radial_bessel(3, x);
        let s = x.sin() / x;
        let ds = (x * x.cos() - x.sin()) / (x * x);
        assert!((j3 - s).abs() < 1e-11 && (d3 - ds).abs() < 1e-11, "n=3 x={x}");
        let (j2, _) = radial_bessel(2, x);
        assert!((j2 - j0_series(x)).abs() < 1e-11, "n=2 x={x}");
    }
}

#[test]
fn gaussian_l1_norm_n3() {
    let grid = Arc::new(make_grid(3, 12.0, 4096, GridScheme::Uniform).unwrap());
    let f = RadialProfile::from_fn(grid, |r| (-r * r / 2.0).exp()).unwrap();
    let got = lp_norm(&f, Norm::L1).unwrap();
    assert!((got - (2.0 * PI).powf(1.5)).abs() < 1e-4);
}

#[test]
fn sharp_constant_n1_closed_form() {
    // ĝ = (π²/2)(1 + cos πr): ‖ĝ‖² = 3π⁴/4, μ = π², ⟨ĝ⟩ = π²/2, 𝒢 = 5π²/8
    let want = 5.0 * PI * PI / 8.0 * (0.75 * PI.powi(4)).powf(-0.6);
    let data = UnweightedData::new(1, 1.0).unwrap();
    assert!((data.l2_sq() - 0.75 * PI.powi(4)).abs() < 1e-10);
    assert!((data.sharp_constant() / want - 1.0).abs() < 1e-12);
    assert!((sharp_constant_l(1).unwrap() / want - 1.0).abs() < 1e-12);
}

#[test]
fn sharp_constant_independent_of_radius() {
    for n in [1, 3, 4] {
        let base = UnweightedData::new(n, 1.0).unwrap().sharp_constant();
        for r in [0.5, 2.0] {
            let grid = Arc::new(make_grid(n, 1.5 * r, 3072, GridScheme::Uniform).unwrap());
            let opt = build_unweighted_optimizer_on(grid, r).unwrap();
            let sol = infconv_value(&opt.g, 0.0).unwrap();
            let norm = lp_norm(&opt.g, Norm::L2).unwrap();
            let nf = n as f64;
            let l = sol.g_value / norm.powf((2.0 * nf + 4.0) / (nf + 4.0));
            assert!((l - base).abs() < 1e-5 * base.max(1.0), "n={n} r={r}: {l} vs {base}");
            assert!((UnweightedData::new(n, r).unwrap().sharp_constant() / base - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn unweighted_minimizer_is_mean_on_ball() {
    for n in [1, 3, 4] {
        let opt = build_unweighted_optimizer(n).unwrap();
        let OptimizerMeta::Unweighted { mean_g, .. } = opt.meta else { unreachable!() };
        let sol = infconv_value(&opt.g, 0.0).unwrap();
        assert!((sol.c_star / mean_g - 1.0).abs() < 1e-4, "n={n}");
        let scale = lp_norm(&opt.g, Norm::Inf).unwrap();
        for (&r, &h) in sol.h.grid().nodes().iter().zip(sol.h.values()) {
            let want = if r < 1.0 - 1e-3 { mean_g } else if r > 1.0 + 1e-3 { 0.0 } else { continue };
            assert!((h - want).abs() <= 1e-4 * scale, "n={n} r={r}: {h} vs {want}");
        }
    }
}

#[test]
fn weighted_minimizer_is_quadratic_on_ball() {
    let b = build_weighted_optimizer(3, VariantChoice::Auto).unwrap();
    let OptimizerMeta::Weighted { alpha, normalization, .. } = b.accepted.profile.meta else { unreachable!() };
    // the rederived construction has α₀ = −1 before normalization
    assert!((alpha / normalization + 1.0).abs() < 1e-6);
    let g = &b.accepted.profile.g;
    let sol = infconv_value(g, 2.0).unwrap();
    assert!((sol.c_star / alpha - 1.0).abs() < 1e-4);
    let scale = lp_norm(g, Norm::Inf).unwrap();
    for (&r, &h) in sol.h.grid().nodes().iter().zip(sol.h.values()) {
        let want = if r < 1.0 - 1e-3 { alpha * r * r } else if r > 1.0 + 1e-3 { 0.0 } else { continue };
        assert!((h - want).abs() <= 1e-4 * scale, "r={r}: {h} vs {want}");
    }
}

#[test]
fn eigen_equation_residual_is_second_order() {
    let mut res = Vec::new();
    for m in [768, 1536] {
        let grid = Arc::new(make_grid(3, 1.5, m, GridScheme::Uniform).unwrap());
        let opt = build_unweighted_optimizer_on(grid, 1.0).unwrap();
        let OptimizerMeta::Unweighted { mu1, .. } = opt.meta else { unreachable!() };
        res.push(el_residual(&opt.g, 1.0 / mu1, 0.0).unwrap());
    }
    assert!(res[0] / res[1] > 3.5, "{res:?}");
}
