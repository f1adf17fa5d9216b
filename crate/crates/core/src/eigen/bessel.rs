//! `J'' + (n-1)/r J' = -J`, `J(0) = 1`, `J'(0) = 0`.

const SERIES_RADIUS: f64 = 0.5;
const SERIES_TERMS: usize = 12;
const TOL: f64 = 1e-14;

/// Power series `Σ a_k r^{2k}`, `a_k = -a_{k-1} / (2k(2k+n-2))`.
fn series(n: usize, r: f64) -> (f64, f64) {
    let n = n as f64;
    let r2 = r * r;
    let mut a = 1.0;
    let mut pow = 1.0; // r^{2k}
    let mut j = 1.0;
    let mut dj = 0.0;
    for k in 1..=SERIES_TERMS {
        let k2 = 2.0 * k as f64;
        a = -a / (k2 * (k2 + n - 2.0));
        // derivative term uses r^{2k-1} = pow * r
        dj += k2 * a * pow * r;
        pow *= r2;
        j += a * pow;
    }
    (j, dj)
}

#[inline]
fn rhs(n1: f64, r: f64, y: [f64; 2]) -> [f64; 2] {
    [y[1], -y[0] - n1 / r * y[1]]
}

fn rk4(n1: f64, r: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let k1 = rhs(n1, r, y);
    let k2 = rhs(n1, r + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
    let k3 = rhs(n1, r + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
    let k4 = rhs(n1, r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Adaptive integrator state, marching outwards.
struct March {
    n1: f64,
    r: f64,
    y: [f64; 2],
    h: f64,
}

impl March {
    fn new(n: usize) -> Self {
        let (j, dj) = series(n, SERIES_RADIUS);
        Self {
            n1: n as f64 - 1.0,
            r: SERIES_RADIUS,
            y: [j, dj],
            h: 0.01,
        }
    }

    /// Advance exactly to `target >= self.r`.
    fn advance_to(&mut self, target: f64) {
        while self.r < target {
            let remaining = target - self.r;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            let full = rk4(self.n1, self.r, self.y, h);
            let half = rk4(self.n1, self.r, self.y, 0.5 * h);
            let two = rk4(self.n1, self.r + 0.5 * h, half, 0.5 * h);
            let scale = 1.0_f64.max(self.y[0].abs()).max(self.y[1].abs());
            let err = (two[0] - full[0]).abs().max((two[1] - full[1]).abs()) / 15.0;
            if err <= TOL * scale || h < 1e-10 {
                self.y = [
                    two[0] + (two[0] - full[0]) / 15.0,
                    two[1] + (two[1] - full[1]) / 15.0,
                ];
                self.r = if last { target } else { self.r + h };
                let grow = if err == 0.0 { 4.0 } else { (0.9 * (TOL * scale / err).powf(0.2)).min(4.0) };
                if !last || grow < 1.0 {
                    self.h = h * grow.max(0.2);
                }
            } else {
                self.h = h * (0.9 * (TOL * scale / err).powf(0.2)).max(0.1);
            }
        }
    }
}

/// `(J(r), J'(r))` for the radial Helmholtz profile in dimension `n`.
pub fn radial_bessel(n: usize, r: f64) -> (f64, f64) {
    assert!(r >= 0.0 && r.is_finite(), "radius must be finite and nonnegative");
    if r <= SERIES_RADIUS {
        return series(n, r);
    }
    let mut m = March::new(n);
    m.advance_to(r);
    (m.y[0], m.y[1])
}

/// [`radial_bessel`] at many radii with a single march; `rs` must be sorted.
pub fn radial_bessel_many(n: usize, rs: &[f64]) -> Vec<(f64, f64)> {
    assert!(rs.windows(2).all(|w| w[0] <= w[1]), "radii must be sorted");
    let mut m = March::new(n);
    rs.iter()
        .map(|&r| {
            if r <= SERIES_RADIUS {
                series(n, r)
            } else {
                m.advance_to(r);
                (m.y[0], m.y[1])
            }
        })
        .collect()
}
