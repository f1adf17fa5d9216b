use crate::error::{Error, Result};

use super::bessel::radial_bessel_many;

pub(crate) const SCAN_START: f64 = 0.01;
pub(crate) const SCAN_STEP: f64 = 0.01;
pub(crate) const BRACKET_WIDTH: f64 = 1e-12;

/// First sign change of `f(λ, J(λ), J'(λ))` on `[lo, hi]`, refined to a
/// bracket of width at most [`BRACKET_WIDTH`]. Returns `(root, bracket)`.
pub(crate) fn first_root(
    n: usize,
    lo: f64,
    hi: f64,
    f: impl Fn(f64, f64, f64) -> f64,
) -> Result<(f64, (f64, f64))> {
    let steps = ((hi - lo) / SCAN_STEP).ceil() as usize;
    let lams: Vec<f64> = (0..=steps)
        .map(|k| (lo + SCAN_STEP * k as f64).min(hi))
        .collect();
    let vals = radial_bessel_many(n, &lams);
    let fv: Vec<f64> = lams
        .iter()
        .zip(&vals)
        .map(|(&l, &(j, dj))| f(l, j, dj))
        .collect();
    for k in 0..lams.len() - 1 {
        if fv[k] == 0.0 {
            return Ok((lams[k], (lams[k], lams[k])));
        }
        if fv[k] * fv[k + 1] < 0.0 {
            return Ok(illinois(n, lams[k], lams[k + 1], fv[k], fv[k + 1], &f));
        }
    }
    if *fv.last().unwrap() == 0.0 {
        let l = *lams.last().unwrap();
        return Ok((l, (l, l)));
    }
    Err(Error::RootNotFound { lo, hi })
}

fn eval(n: usize, lam: f64, f: &impl Fn(f64, f64, f64) -> f64) -> f64 {
    let (j, dj) = super::bessel::radial_bessel(n, lam);
    f(lam, j, dj)
}

/// Illinois false position with a bisection step every fourth iteration.
fn illinois(
    n: usize,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    f: &impl Fn(f64, f64, f64) -> f64,
) -> (f64, (f64, f64)) {
    let mut side = 0;
    for it in 0..400 {
        if b - a <= BRACKET_WIDTH {
            break;
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        if it % 4 == 3 || !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = eval(n, x, f);
        if fx == 0.0 {
            return (x, (x, x));
        }
        if fx * fa > 0.0 {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    (0.5 * (a + b), (a, b))
}
