//! Independent reference values for the integration tests.

#![allow(dead_code)]

/// `φ(R)` for the radial problem `φ'' + coth(r) φ' + λ φ = 0`, `φ(0) = 1`,
/// `φ'(0) = 0`, by classical RK4 started from the series at small `r`.
fn shoot(lambda: f64, radius: f64, steps: usize) -> f64 {
    let r0 = 1e-6;
    let mut y = 1.0 - lambda * r0 * r0 / 4.0;
    let mut p = -lambda * r0 / 2.0;
    let h = (radius - r0) / steps as f64;
    let f = |r: f64, y: f64, p: f64| (p, -p / r.tanh() - lambda * y);
    let mut r = r0;
    for _ in 0..steps {
        let k1 = f(r, y, p);
        let k2 = f(r + h / 2.0, y + h / 2.0 * k1.0, p + h / 2.0 * k1.1);
        let k3 = f(r + h / 2.0, y + h / 2.0 * k2.0, p + h / 2.0 * k2.1);
        let k4 = f(r + h, y + h * k3.0, p + h * k3.1);
        y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        r += h;
    }
    y
}

/// First Dirichlet eigenvalue of the hyperbolic disk of the given radius:
/// scan upward from 1/4 for the first sign change of `φ(R)`, then bisect.
pub fn disk_lambda0(radius: f64) -> f64 {
    let steps = 20_000;
    let mut lo = 0.25;
    let step = 0.05 / (radius * radius).max(0.05);
    let mut hi = lo + step;
    while shoot(hi, radius, steps) > 0.0 {
        lo = hi;
        hi += step;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if shoot(mid, radius, steps) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// First zero of the Bessel function J0, for the Euclidean unit disk.
pub const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

/// Upper half-plane isometries as 2x2 real matrices of determinant 1.
pub type Sl2 = [[f64; 2]; 2];

pub fn mul(a: &Sl2, b: &Sl2) -> Sl2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Translation by `t` along the imaginary axis.
pub fn translate(t: f64) -> Sl2 {
    [[(t / 2.0).exp(), 0.0], [0.0, (-t / 2.0).exp()]]
}

/// Rotation by `theta` about `i`.
pub fn rotate(theta: f64) -> Sl2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[c, s], [-s, c]]
}

/// Walks the sides in order, turning by a right angle after each, and
/// returns the distance of the final frame from the identity (up to sign).
pub fn right_angled_walk_defect(sides: &[f64]) -> f64 {
    let mut g: Sl2 = [[1.0, 0.0], [0.0, 1.0]];
    for &s in sides {
        g = mul(&g, &mul(&translate(s), &rotate(std::f64::consts::FRAC_PI_2)));
    }
    let d = |sign: f64| (g[0][0] - sign).abs() + g[0][1].abs() + g[1][0].abs() + (g[1][1] - sign).abs();
    d(1.0).min(d(-1.0))
}

/// Hyperbolic distance between points of the upper half-plane.
pub fn uhp_distance(z: (f64, f64), w: (f64, f64)) -> f64 {
    let num = (z.0 - w.0).powi(2) + (z.1 - w.1).powi(2);
    (1.0 + num / (2.0 * z.1 * w.1)).acosh()
}

/// Image of `i` under `g`.
pub fn apply_to_i(g: &Sl2) -> (f64, f64) {
    // (a i + b) / (c i + d)
    let (a, b, c, d) = (g[0][0], g[0][1], g[1][0], g[1][1]);
    let den = c * c + d * d;
    ((a * c + b * d) / den, (a * d - b * c) / den)
}
