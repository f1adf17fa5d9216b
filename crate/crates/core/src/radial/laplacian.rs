use super::profile::RadialProfile;

/// Second-order finite-difference `f'' + (n-1)/r f'` at every node.
///
/// Interior nodes use the three-point stencil on the (possibly non-uniform)
/// grid; `r = 0` uses `2n (f_1 - f_0)/r_1²` from the symmetry condition, the
/// last node a one-sided quadratic. Jumps are ignored (left limits are used).
pub fn radial_laplacian(f: &RadialProfile) -> RadialProfile {
    let r = f.grid().nodes();
    let v = f.values();
    let n = f.dim() as f64;
    let len = r.len();
    let mut out = vec![0.0; len];
    out[0] = 2.0 * n * (v[1] - v[0]) / (r[1] * r[1]);
    for i in 1..len - 1 {
        out[i] = stencil(r[i - 1], r[i], r[i + 1], v[i - 1], v[i], v[i + 1], n);
    }
    let k = len - 1;
    let (r0, r1, r2) = (r[k - 2], r[k - 1], r[k]);
    let (f0, f1, f2) = (v[k - 2], v[k - 1], v[k]);
    // derivatives of the quadratic through the last three points, at r2
    let d01 = (f1 - f0) / (r1 - r0);
    let d12 = (f2 - f1) / (r2 - r1);
    let second = 2.0 * (d12 - d01) / (r2 - r0);
    let first = d12 + 0.5 * second * (r2 - r1);
    out[k] = second + (n - 1.0) / r2 * first;
    RadialProfile::new(f.grid_arc().clone(), out).expect("finite stencil output")
}

#[inline]
fn stencil(rm: f64, r: f64, rp: f64, fm: f64, f: f64, fp: f64, n: f64) -> f64 {
    let hm = r - rm;
    let hp = rp - r;
    let den = hm * hp * (hm + hp);
    let d2 = 2.0 * (hm * fp - (hm + hp) * f + hp * fm) / den;
    let d1 = (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f) / den;
    d2 + (n - 1.0) / r * d1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::grid::{make_grid, GridScheme};
    use std::sync::Arc;

    #[test]
    fn quadratic_gives_two_n() {
        for scheme in [GridScheme::Uniform, GridScheme::Graded] {
            let g = Arc::new(make_grid(3, 2.0, 64, scheme).unwrap());
            let f = RadialProfile::from_fn(g, |r| r * r).unwrap();
            let lap = radial_laplacian(&f);
            assert!(lap.values().iter().all(|v| (v - 6.0).abs() < 1e-9));
        }
    }

    #[test]
    fn constant_gives_zero() {
        let g = Arc::new(make_grid(4, 1.0, 32, GridScheme::Graded).unwrap());
        let f = RadialProfile::from_fn(g, |_| 3.0).unwrap();
        assert!(radial_laplacian(&f).values().iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn sinc_is_helmholtz_eigenfunction() {
        let err = |m: usize| {
            let g = Arc::new(make_grid(3, 3.0, m, GridScheme::Uniform).unwrap());
            let f = RadialProfile::from_fn(g, |r| if r == 0.0 { 1.0 } else { r.sin() / r }).unwrap();
            let lap = radial_laplacian(&f);
            (0..m)
                .map(|i| (lap.values()[i] + f.values()[i]).abs())
                .fold(0.0, f64::max)
        };
        let (a, b) = (err(128), err(256));
        assert!(a < 1e-3);
        assert!(a / b > 3.5);
    }
}
