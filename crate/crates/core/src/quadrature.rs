//! Gauss-Legendre rules on the unit interval.

use std::sync::OnceLock;

/// Number of points in the per-cell rule. Exact for polynomials of degree 15.
pub const GAUSS_POINTS: usize = 8;

/// Nodes and weights of the 8-point Gauss-Legendre rule mapped to `[0, 1]`.
pub fn gauss_unit() -> &'static ([f64; GAUSS_POINTS], [f64; GAUSS_POINTS]) {
    static RULE: OnceLock<([f64; GAUSS_POINTS], [f64; GAUSS_POINTS])> = OnceLock::new();
    RULE.get_or_init(legendre_rule::<GAUSS_POINTS>)
}

/// Newton iteration on the Legendre polynomial, starting from the Tricomi guesses.
fn legendre_rule<const N: usize>() -> ([f64; N], [f64; N]) {
    let mut x = [0.0; N];
    let mut w = [0.0; N];
    let n = N as f64;
    for i in 0..N {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=N {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        // map [-1, 1] -> [0, 1]
        x[N - 1 - i] = 0.5 * (1.0 + z);
        w[N - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Integrate `f` over `[a, b]` with one application of the rule.
#[inline]
pub fn gauss_cell(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (x, w) = gauss_unit();
    let h = b - a;
    let mut acc = 0.0;
    for k in 0..GAUSS_POINTS {
        acc += w[k] * f(a + h * x[k]);
    }
    acc * h
}

/// Composite rule with `panels` equal panels.
pub fn gauss_composite(a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + h * i as f64;
            gauss_cell(lo, lo + h, &mut f)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        let (_, w) = gauss_unit();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exact_for_degree_fifteen() {
        let got = gauss_cell(0.0, 2.0, |x| x.powi(15));
        let want = 2f64.powi(16) / 16.0;
        assert!((got - want).abs() / want < 1e-14);
    }

    #[test]
    fn composite_sine() {
        let got = gauss_composite(0.0, std::f64::consts::PI, 8, f64::sin);
        assert!((got - 2.0).abs() < 1e-14);
    }
}
