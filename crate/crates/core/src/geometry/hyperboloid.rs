//! Points and frames in the hyperboloid model of the hyperbolic plane.
//!
//! Vectors are `[t, x, y]` with the Lorentz form `-t t' + x x' + y y'`;
//! points satisfy `<p, p> = -1`, `t > 0`.

pub type Lorentz = [f64; 3];

#[inline]
pub fn mdot(a: &Lorentz, b: &Lorentz) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn add(a: &Lorentz, b: &Lorentz) -> Lorentz {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &Lorentz, b: &Lorentz) -> Lorentz {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: &Lorentz, s: f64) -> Lorentz {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn lincomb(a: f64, x: &Lorentz, b: f64, y: &Lorentz) -> Lorentz {
    [a * x[0] + b * y[0], a * x[1] + b * y[1], a * x[2] + b * y[2]]
}

/// Geodesic distance between two points on the hyperboloid.
///
/// Uses `sinh(d/2) = |p - q| / 2`, which keeps full relative precision for
/// short edges where `arcosh(-<p, q>)` would cancel.
pub fn distance(p: &Lorentz, q: &Lorentz) -> f64 {
    let d = sub(p, q);
    let n2 = mdot(&d, &d).max(0.0);
    2.0 * (0.5 * n2.sqrt()).asinh()
}

/// Re-projects a point onto the upper sheet; used after long chains of
/// frame updates.
pub fn renormalize_point(p: &Lorentz) -> Lorentz {
    let n = (-mdot(p, p)).sqrt();
    scale(p, 1.0 / n)
}

/// Orthonormal frame: base point, unit tangent and left unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub p: Lorentz,
    pub t: Lorentz,
    pub n: Lorentz,
}

impl Frame {
    pub fn origin() -> Self {
        Frame {
            p: [1.0, 0.0, 0.0],
            t: [0.0, 1.0, 0.0],
            n: [0.0, 0.0, 1.0],
        }
    }

    /// Moves along the geodesic in direction `t` by `len`.
    pub fn advance_geodesic(&self, len: f64) -> Self {
        let (c, s) = (len.cosh(), len.sinh());
        Frame {
            p: lincomb(c, &self.p, s, &self.t),
            t: lincomb(s, &self.p, c, &self.t),
            n: self.n,
        }
    }

    /// Light-like vector of the horocycle through `p` tangent to `t` whose
    /// centre lies on the right (the horoball is on the side of `-n`).
    pub fn horocycle_center(&self) -> Lorentz {
        sub(&self.p, &self.n)
    }

    /// Moves along the horocycle tangent to `t` with the horoball on the
    /// right by arc length `len`.
    pub fn advance_horocycle(&self, len: f64) -> Self {
        let l = self.horocycle_center();
        let p = add(&add(&self.p, &scale(&self.t, len)), &scale(&l, 0.5 * len * len));
        let t = add(&self.t, &scale(&l, len));
        let n = sub(&p, &l);
        Frame { p, t, n }
    }

    /// Rotates the frame by a right angle to the left.
    pub fn turn_left(&self) -> Self {
        Frame {
            p: self.p,
            t: self.n,
            n: scale(&self.t, -1.0),
        }
    }

    /// Largest deviation from orthonormality, for diagnostics.
    pub fn orthonormality_defect(&self) -> f64 {
        let checks = [
            mdot(&self.p, &self.p) + 1.0,
            mdot(&self.t, &self.t) - 1.0,
            mdot(&self.n, &self.n) - 1.0,
            mdot(&self.p, &self.t),
            mdot(&self.p, &self.n),
            mdot(&self.t, &self.n),
        ];
        checks.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Fermi chart about the geodesic through `frame.p` in direction `frame.t`:
/// `s` is arc length along it, `r` signed distance towards `frame.n`.
pub fn fermi_point(frame: &Frame, s: f64, r: f64) -> Lorentz {
    let g = lincomb(s.cosh(), &frame.p, s.sinh(), &frame.t);
    lincomb(r.cosh(), &g, r.sinh(), &frame.n)
}

/// Horocyclic chart about the horocycle through `frame.p` tangent to
/// `frame.t`: `s` is arc length on it, `r` distance away from its centre.
pub fn horocyclic_point(frame: &Frame, s: f64, r: f64) -> Lorentz {
    let l = frame.horocycle_center();
    let h = add(&add(&frame.p, &scale(&frame.t, s)), &scale(&l, 0.5 * s * s));
    lincomb(r.exp(), &h, -r.sinh(), &l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geodesic_advance_preserves_frame_and_distance() {
        let f = Frame::origin().advance_geodesic(1.7).turn_left().advance_geodesic(0.3);
        assert!(f.orthonormality_defect() < 1e-12);
        let q = Frame::origin().advance_geodesic(2.5).p;
        assert!((distance(&Frame::origin().p, &q) - 2.5).abs() < 1e-13);
    }

    #[test]
    fn horocycle_arc_has_expected_chord() {
        let f = Frame::origin();
        let g = f.advance_horocycle(0.8);
        assert!(g.orthonormality_defect() < 1e-12);
        // chord of a horocyclic arc of length a: sinh(d/2) = a/2
        let d = distance(&f.p, &g.p);
        assert!((d - 2.0 * (0.4f64).asinh()).abs() < 1e-13);
    }

    #[test]
    fn short_distances_keep_precision() {
        let f = Frame::origin();
        let g = f.advance_geodesic(1e-9);
        assert!((distance(&f.p, &g.p) - 1e-9).abs() < 1e-22);
        // away from the origin the loss is set by coordinate size, not by acosh
        let f = Frame::origin().advance_geodesic(1.0);
        let g = f.advance_geodesic(1e-9);
        assert!((distance(&f.p, &g.p) - 1e-9).abs() < 1e-14);
    }

    #[test]
    fn fermi_chart_distance_to_axis() {
        let f = Frame::origin();
        let x = fermi_point(&f, 0.7, 1.3);
        assert!((mdot(&x, &f.n).asinh() - 1.3).abs() < 1e-13);
        assert!((mdot(&x, &x) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn horocyclic_chart_depth() {
        let f = Frame::origin();
        let x = horocyclic_point(&f, 0.4, 0.9);
        let l = f.horocycle_center();
        assert!(((-mdot(&x, &l)).ln() - 0.9).abs() < 1e-13);
        assert!((mdot(&x, &x) + 1.0).abs() < 1e-12);
    }
}
