//! Hyperbolic trigonometry: collars and right-angled hexagons.

use crate::error::GeometryError;
use crate::geometry::hyperboloid::{distance, Frame, Lorentz};

/// `arsinh` in the log1p form, accurate for tiny and huge arguments alike.
pub fn stable_asinh(x: f64) -> f64 {
    let a = x.abs();
    let v = if a > 1e150 {
        a.ln() + std::f64::consts::LN_2
    } else {
        (a + a * a / (1.0 + (1.0 + a * a).sqrt())).ln_1p()
    };
    v.copysign(x)
}

fn check_length(l: f64) -> Result<(), GeometryError> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::NonPositiveLength(l))
    }
}

/// Width of the embedded collar about a simple closed geodesic of length `l`.
pub fn collar_width(l: f64) -> Result<f64, GeometryError> {
    check_length(l)?;
    Ok(stable_asinh(1.0 / (0.5 * l).sinh()))
}

/// Length at which the collar width equals `width`; the inverse of
/// [`collar_width`].
pub fn length_for_collar_width(width: f64) -> Result<f64, GeometryError> {
    check_length(width)?;
    Ok(2.0 * stable_asinh(1.0 / width.sinh()))
}

/// Right-angled hexagon with alternate sides `a` and opposite sides `b`
/// (`b[i]` is opposite `a[i]`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hexagon {
    pub a: [f64; 3],
    pub b: [f64; 3],
}

impl Hexagon {
    /// Sides in cyclic order a1, b3, a2, b1, a3, b2.
    pub fn sides(&self) -> [f64; 6] {
        [self.a[0], self.b[2], self.a[1], self.b[0], self.a[2], self.b[1]]
    }

    /// Relative residuals of `cosh b_i sinh a_j sinh a_k = cosh a_i + cosh a_j cosh a_k`
    /// for the three rotations.
    pub fn relation_residuals(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let lhs = self.b[i].cosh() * self.a[j].sinh() * self.a[k].sinh();
            let rhs = self.a[i].cosh() + self.a[j].cosh() * self.a[k].cosh();
            *o = (lhs - rhs).abs() / rhs.abs();
        }
        out
    }
}

/// Hexagon obtained by cutting the pair of pants with boundary lengths
/// `l1, l2, l3` along its three seams; its alternate sides are `l_i / 2`.
pub fn hexagons_from_pants(l1: f64, l2: f64, l3: f64) -> Result<Hexagon, GeometryError> {
    for l in [l1, l2, l3] {
        check_length(l)?;
    }
    let a = [0.5 * l1, 0.5 * l2, 0.5 * l3];
    let mut b = [0.0; 3];
    for (i, bi) in b.iter_mut().enumerate() {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let c = (a[i].cosh() + a[j].cosh() * a[k].cosh()) / (a[j].sinh() * a[k].sinh());
        *bi = c.acosh();
    }
    Ok(Hexagon { a, b })
}

/// A side of a (possibly truncated) hexagon carrying half of a pants
/// boundary: either a geodesic segment or a horocyclic arc cutting off a cusp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HalfBoundary {
    Geodesic(f64),
    Horocycle(f64),
}

impl HalfBoundary {
    pub fn length(&self) -> f64 {
        match *self {
            HalfBoundary::Geodesic(l) | HalfBoundary::Horocycle(l) => l,
        }
    }

    pub fn is_cusp(&self) -> bool {
        matches!(self, HalfBoundary::Horocycle(_))
    }

    fn cosh_or_one(&self) -> f64 {
        match *self {
            HalfBoundary::Geodesic(a) => a.cosh(),
            HalfBoundary::Horocycle(_) => 1.0,
        }
    }
}

/// Hexagon with right angles whose alternate sides may be horocyclic arcs
/// (the limit of a right-angled hexagon as a side shrinks to a cusp,
/// truncated along a horocycle).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PantsHexagon {
    pub sides: [HalfBoundary; 3],
    /// `b[i]` is the side opposite `sides[i]`, between the other two.
    pub b: [f64; 3],
}

impl PantsHexagon {
    pub fn new(sides: [HalfBoundary; 3]) -> Result<Self, GeometryError> {
        for s in &sides {
            check_length(s.length())?;
        }
        let mut b = [0.0; 3];
        for (k, bk) in b.iter_mut().enumerate() {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let ck = sides[k].cosh_or_one();
            *bk = match (sides[i], sides[j]) {
                (HalfBoundary::Geodesic(ai), HalfBoundary::Geodesic(aj)) => {
                    ((ck + ai.cosh() * aj.cosh()) / (ai.sinh() * aj.sinh())).acosh()
                }
                (HalfBoundary::Horocycle(li), HalfBoundary::Geodesic(aj)) => ((ck + aj.cosh()) / (li * aj.sinh())).ln(),
                (HalfBoundary::Geodesic(ai), HalfBoundary::Horocycle(lj)) => ((ck + ai.cosh()) / (lj * ai.sinh())).ln(),
                (HalfBoundary::Horocycle(li), HalfBoundary::Horocycle(lj)) => ((ck + 1.0) / (2.0 * li * lj)).ln(),
            };
            if !(*bk > 0.0) || !bk.is_finite() {
                return Err(GeometryError::InvalidArgument(format!(
                    "horocycle lengths too large: truncated seam {k} has length {bk}"
                )));
            }
        }
        Ok(PantsHexagon { sides, b })
    }

    /// Walks the boundary counterclockwise from the origin frame, returning
    /// the frame at the start of each side in the order a1, b3, a2, b1, a3,
    /// b2 plus the closing frame.
    pub fn walk(&self) -> [Frame; 7] {
        let mut frames = [Frame::origin(); 7];
        let mut f = Frame::origin();
        for step in 0..6 {
            frames[step] = f;
            f = if step % 2 == 0 {
                match self.sides[step / 2] {
                    HalfBoundary::Geodesic(a) => f.advance_geodesic(a),
                    HalfBoundary::Horocycle(l) => f.advance_horocycle(l),
                }
            } else {
                // b side following a_i is b_{i+2} (a1 -> b3, a2 -> b1, a3 -> b2)
                f.advance_geodesic(self.b[(step / 2 + 2) % 3])
            };
            f = f.turn_left();
        }
        frames[6] = f;
        frames
    }

    /// Distance between the start and end of the boundary walk; zero for a
    /// consistent hexagon.
    pub fn closure_defect(&self) -> f64 {
        let w = self.walk();
        let (a, b) = (&w[0], &w[6]);
        let dp = distance(&a.p, &b.p);
        let dt = tangent_gap(&a.t, &b.t);
        dp.max(dt)
    }
}

fn tangent_gap(a: &Lorentz, b: &Lorentz) -> f64 {
    a.iter().zip(b.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asinh_matches_std_in_the_bulk() {
        for x in [-3.0f64, -1e-3, 0.0, 1e-8, 0.5, 2.0, 1e6, 1e200] {
            let want: f64 = if x > 1e150 {
                x.ln() + std::f64::consts::LN_2
            } else {
                x.asinh()
            };
            assert!((stable_asinh(x) - want).abs() <= 1e-15 * want.abs().max(1e-300) * 4.0);
        }
        assert_eq!(stable_asinh(1e-300), 1e-300);
    }

    #[test]
    fn collar_width_values() {
        let l = 2.0 * 1f64.asinh();
        assert!((collar_width(l).unwrap() - 1f64.asinh()).abs() < 1e-14);
        let series = 2.0 * (-1f64).exp().atanh();
        assert!((collar_width(2.0).unwrap() - series).abs() < 1e-14);
        assert!((collar_width(2.0).unwrap() - 0.77193).abs() < 1e-5);
        assert!((collar_width(0.1).unwrap() - 2.0 * (-0.05f64).exp().atanh()).abs() < 1e-13);
        assert!((collar_width(0.1).unwrap() - 3.68909).abs() < 1e-5);
        assert!(collar_width(0.0).is_err());
        assert!(collar_width(-1.0).is_err());
        assert!(collar_width(f64::NAN).is_err());
    }

    #[test]
    fn collar_inverse() {
        for l in [1e-3, 0.05, 1.0, 7.5] {
            let w = collar_width(l).unwrap();
            assert!((length_for_collar_width(w).unwrap() - l).abs() < 1e-12 * l.max(1.0));
        }
    }

    #[test]
    fn symmetric_hexagon() {
        let h = hexagons_from_pants(1.0, 1.0, 1.0).unwrap();
        assert!((h.b[0] - 2.8687).abs() < 1e-4);
        assert_eq!(h.b[0], h.b[1]);
        assert_eq!(h.b[1], h.b[2]);
        assert!(h.relation_residuals().iter().all(|r| *r < 1e-12));
    }

    #[test]
    fn pants_hexagon_agrees_with_geodesic_formula() {
        let h = hexagons_from_pants(1.0, 1.3, 2.0).unwrap();
        let g = PantsHexagon::new([
            HalfBoundary::Geodesic(0.5),
            HalfBoundary::Geodesic(0.65),
            HalfBoundary::Geodesic(1.0),
        ])
        .unwrap();
        for i in 0..3 {
            assert!((h.b[i] - g.b[i]).abs() < 1e-13);
        }
        assert!(g.closure_defect() < 1e-11);
    }

    #[test]
    fn cusp_hexagons_close() {
        use HalfBoundary::*;
        let cases = [
            [Geodesic(0.4), Geodesic(0.9), Horocycle(0.5)],
            [Horocycle(0.5), Geodesic(0.3), Horocycle(0.25)],
            [Horocycle(0.5), Horocycle(0.5), Horocycle(0.5)],
            [Geodesic(0.02), Horocycle(0.3), Geodesic(2.0)],
        ];
        for sides in cases {
            let h = PantsHexagon::new(sides).unwrap();
            assert!(h.closure_defect() < 1e-9, "{sides:?}: {}", h.closure_defect());
        }
    }

    #[test]
    fn oversized_horocycles_rejected() {
        use HalfBoundary::*;
        assert!(PantsHexagon::new([Horocycle(1.2), Horocycle(1.2), Horocycle(1.2)]).is_err());
    }
}
