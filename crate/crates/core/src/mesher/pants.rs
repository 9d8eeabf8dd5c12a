//! Meshing a pair of pants as two mirrored right-angled hexagons.
//!
//! Each hexagon is split into three regions, one per boundary half-side:
//! the points closer to that side than to the other two. In the Fermi (or
//! horocyclic) chart of its side a region is `{0 <= s <= len, 0 <= r <= R(s)}`
//! and is meshed by rows at the common heights `r = j * dr`. Rows end on the
//! seam sides of the hexagon or on the bisectors, whose points are shared by
//! the neighbouring regions, so the three regions fit together conformingly.

use std::collections::BTreeMap;

use crate::error::MeshError;
use crate::geometry::hyperboloid::{distance, fermi_point, horocyclic_point, lincomb, mdot, scale, Frame, Lorentz};
use crate::geometry::surface::PantsBlock;
use crate::geometry::trig::{stable_asinh, HalfBoundary, PantsHexagon};

use super::mesh::{edge_key, BoundaryLoop, HyperbolicMesh, LoopTag, Metric, Provenance};
use super::strip::{stitch, stitch_cyclic};

/// Default length of the horocycle that cuts a cusp off a pants block.
pub const DEFAULT_CUSP_LENGTH: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshOptions {
    /// Upper bound for every edge length.
    pub h: f64,
    /// Length of the horocycle where a cusp is cut off.
    pub cusp_length: f64,
    /// Depth of the truncated cusp; defaults to a rim of length `h / 10`.
    pub cusp_depth: Option<f64>,
}

impl MeshOptions {
    pub fn new(h: f64) -> Self {
        MeshOptions {
            h,
            cusp_length: DEFAULT_CUSP_LENGTH,
            cusp_depth: None,
        }
    }

    pub fn cusp_depth(&self) -> f64 {
        self.cusp_depth
            .unwrap_or_else(|| (10.0 * self.cusp_length / self.h).ln())
    }
}

/// Chart attached to one boundary side of a hexagon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideChart {
    pub horocyclic: bool,
    pub frame: Frame,
    pub len: f64,
}

impl SideChart {
    pub fn point(&self, s: f64, r: f64) -> Lorentz {
        if self.horocyclic {
            horocyclic_point(&self.frame, s, r)
        } else {
            fermi_point(&self.frame, s, r)
        }
    }

    /// Signed distance from the side's geodesic, or from its horocycle.
    pub fn distance(&self, x: &Lorentz) -> f64 {
        if self.horocyclic {
            (-mdot(x, &self.frame.horocycle_center())).ln()
        } else {
            stable_asinh(mdot(x, &self.frame.n))
        }
    }

    /// Arc-length coordinate of the foot point of `x`.
    pub fn param(&self, x: &Lorentz) -> f64 {
        if self.horocyclic {
            mdot(x, &self.frame.t) / (-mdot(x, &self.frame.horocycle_center()))
        } else {
            (mdot(x, &self.frame.t) / -mdot(x, &self.frame.p)).atanh()
        }
    }

    /// Length scale of the row at height `r` relative to the side.
    pub fn stretch(&self, r: f64) -> f64 {
        if self.horocyclic {
            r.exp()
        } else {
            r.cosh()
        }
    }
}

/// A hexagon placed in the hyperboloid, cut into three regions by its
/// altitudes.
///
/// The altitudes of a right-angled hexagon (the common perpendiculars of a
/// boundary side and the opposite seam) meet in one point, the centre.
/// Dropping them cuts the hexagon into six quadrilaterals with three right
/// angles; the two over boundary side `i` form region `i`. Its top edge runs
/// from the foot on the seam before side `i` up to the centre and down to the
/// foot on the seam after it, and rises monotonically towards the centre.
#[derive(Debug, Clone, PartialEq)]
pub struct HexagonChart {
    pub hexagon: PantsHexagon,
    pub sides: [SideChart; 3],
    /// Inward unit normal of the seam between side `i` and side `i + 1`.
    pub seam_normals: [Lorentz; 3],
    /// Where an altitude meets seam `i`.
    pub feet: [Lorentz; 3],
    /// Height of `feet[i]` above side `i` and above side `i + 1`.
    pub foot_heights: [[f64; 2]; 3],
    /// The common point of the altitudes.
    pub center: Lorentz,
    /// Height of the centre above each side.
    pub center_heights: [f64; 3],
}

fn boost_to_origin(o: &Lorentz) -> impl Fn(&Lorentz) -> Lorentz {
    let g = o[0];
    let u = [o[1], o[2]];
    move |v: &Lorentz| {
        let ud = u[0] * v[1] + u[1] * v[2];
        let k = ud / (g + 1.0);
        [
            g * v[0] - ud,
            -u[0] * v[0] + v[1] + u[0] * k,
            -u[1] * v[0] + v[2] + u[1] * k,
        ]
    }
}

/// Vector orthogonal to `a` and `b` in the Lorentz form.
fn lcross(a: &Lorentz, b: &Lorentz) -> Lorentz {
    [
        -(a[1] * b[2] - a[2] * b[1]),
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn unit_spacelike(v: Lorentz) -> Lorentz {
    scale(&v, 1.0 / mdot(&v, &v).max(f64::MIN_POSITIVE).sqrt())
}

/// The point on the upper sheet along a timelike vector.
fn to_point(v: Lorentz) -> Option<Lorentz> {
    let q = -mdot(&v, &v);
    (q > 0.0).then(|| scale(&v, v[0].signum() / q.sqrt()))
}

/// Positive when the geodesic triangle `a b c` is counterclockwise.
pub fn orientation(a: &Lorentz, b: &Lorentz, c: &Lorentz) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

impl HexagonChart {
    pub fn new(sides: [HalfBoundary; 3]) -> Result<Self, MeshError> {
        let hexagon = PantsHexagon::new(sides).map_err(|e| MeshError::InvalidArgument(e.to_string()))?;
        let frames = hexagon.walk();
        let provisional = HexagonChart::assemble(hexagon, sides, &frames)?;
        let boost = boost_to_origin(&provisional.center);
        let moved: [Frame; 7] = std::array::from_fn(|k| Frame {
            p: boost(&frames[k].p),
            t: boost(&frames[k].t),
            n: boost(&frames[k].n),
        });
        HexagonChart::assemble(hexagon, sides, &moved)
    }

    fn assemble(hexagon: PantsHexagon, halves: [HalfBoundary; 3], frames: &[Frame; 7]) -> Result<Self, MeshError> {
        let distorted = |what: String| MeshError::Invalid(format!("{what}; hexagon too distorted"));
        let sides: [SideChart; 3] = std::array::from_fn(|i| SideChart {
            horocyclic: halves[i].is_cusp(),
            frame: frames[2 * i],
            len: halves[i].length(),
        });
        let seam_normals: [Lorentz; 3] = std::array::from_fn(|i| frames[2 * i + 1].n);
        // altitude k joins side k to seam k + 1; from a cusp it is the
        // geodesic out of the ideal point
        let altitudes: [Lorentz; 3] = std::array::from_fn(|k| {
            let f = &sides[k].frame;
            let anchor = if sides[k].horocyclic { f.horocycle_center() } else { f.n };
            unit_spacelike(lcross(&anchor, &seam_normals[(k + 1) % 3]))
        });
        let center =
            to_point(lcross(&altitudes[0], &altitudes[1])).ok_or_else(|| distorted("altitudes do not meet".into()))?;
        let miss = mdot(&center, &altitudes[2]).abs();
        if miss > 1e-5 * center[0] {
            return Err(distorted(format!("altitudes miss by {miss:e}")));
        }
        let mut feet = [[0.0; 3]; 3];
        let mut foot_heights = [[0.0; 2]; 3];
        for i in 0..3 {
            let g = to_point(lcross(&seam_normals[i], &altitudes[(i + 2) % 3]))
                .ok_or_else(|| distorted(format!("altitude misses seam {i}")))?;
            let hs = [sides[i].distance(&g), sides[(i + 1) % 3].distance(&g)];
            let b = hexagon.b[(i + 2) % 3];
            if !(hs[0] > 0.0 && hs[1] > 0.0) || (hs[0] + hs[1] - b).abs() > 1e-4 * (1.0 + b) {
                return Err(distorted(format!(
                    "foot on seam {i} outside the seam ({}, {}; {b})",
                    hs[0], hs[1]
                )));
            }
            feet[i] = g;
            foot_heights[i] = hs;
        }
        let center_heights: [f64; 3] = std::array::from_fn(|i| sides[i].distance(&center));
        for i in 0..3 {
            let s = sides[i].param(&center);
            if !(center_heights[i] > 0.0 && s > 0.0 && s < sides[i].len && mdot(&center, &seam_normals[i]) > 0.0) {
                return Err(distorted(format!("centre outside region {i}")));
            }
        }
        Ok(HexagonChart {
            hexagon,
            sides,
            seam_normals,
            feet,
            foot_heights,
            center,
            center_heights,
        })
    }

    /// Length of the seam between side `i` and side `i + 1`.
    pub fn seam_length(&self, i: usize) -> f64 {
        self.hexagon.b[(i + 2) % 3]
    }

    /// Index of the nearest side and the distance to it.
    pub fn nearest_side(&self, x: &Lorentz) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, s) in self.sides.iter().enumerate() {
            let d = s.distance(x);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Length of the wall from foot `i` to the centre.
    pub fn wall_length(&self, i: usize) -> f64 {
        distance(&self.feet[i], &self.center)
    }

    /// Point at arc length `t` on the wall from foot `i` to the centre.
    pub fn wall_point(&self, i: usize, t: f64) -> Lorentz {
        let (g, o) = (&self.feet[i], &self.center);
        let d = self.wall_length(i);
        let tangent = scale(&lincomb(1.0, o, -d.cosh(), g), 1.0 / d.sinh());
        lincomb(t.cosh(), g, t.sinh(), &tangent)
    }

    /// Arc length on wall `i` where the height above side `i + k` is `r`.
    /// The wall leaves the seam at a right angle, so the height grows like
    /// `sinh r = sinh r_0 cosh t` (or `e^r = e^r_0 cosh t` over a horocycle).
    pub fn wall_param(&self, i: usize, k: usize, r: f64) -> f64 {
        let r0 = self.foot_heights[i][k];
        let ratio = if self.sides[(i + k) % 3].horocyclic {
            (r - r0).exp()
        } else {
            r.sinh() / r0.sinh()
        };
        ratio.max(1.0).acosh().min(self.wall_length(i))
    }
}

/// Hexagon mesh with the bookkeeping needed to double it into pants.
struct HexMesh {
    pos: Vec<Lorentz>,
    on_seam: Vec<bool>,
    triangles: Vec<[usize; 3]>,
    /// Vertices of each side, from its start to its end.
    side_rows: [Vec<usize>; 3],
}

impl HexMesh {
    fn add(&mut self, x: Lorentz, seam: bool) -> usize {
        self.pos.push(x);
        self.on_seam.push(seam);
        self.pos.len() - 1
    }

    /// Rejects inverted triangles and ones too flat to pass the strict
    /// triangle inequality in floating point.
    fn acceptable(&self, a: usize, b: usize, c: usize) -> bool {
        let (pa, pb, pc) = (&self.pos[a], &self.pos[b], &self.pos[c]);
        if orientation(pa, pb, pc) <= 0.0 {
            return false;
        }
        let (x, y, z) = (distance(pb, pc), distance(pa, pc), distance(pa, pb));
        let slack = (x + y - z).min(y + z - x).min(x + z - y);
        slack > 1e-6 * (x + y + z)
    }
}

/// Number of segments for each half-side when the mesh size is `h`; the
/// two copies share the count, so a boundary curve carries twice this many.
/// Segments are kept at `0.7 h` so that the diagonals to the next row stay
/// below `h`.
pub fn half_segments(len: f64, h: f64) -> usize {
    ((len / (0.7 * h)).ceil() as usize).max(2)
}

/// Vertex on a wall and the level of each adjacent region
/// (`[region i, region i + 1]`) whose row ends there.
#[derive(Clone, Copy)]
struct WallVertex {
    v: usize,
    level: [Option<usize>; 2],
}

fn mesh_hexagon(chart: &HexagonChart, h_t: f64, counts: [usize; 3]) -> Result<HexMesh, String> {
    let dr = h_t;
    let snap = 0.25 * dr;
    let levels: [Vec<f64>; 3] = std::array::from_fn(|i| {
        let d = chart.center_heights[i];
        let mut v = vec![0.0];
        while (v.len() as f64) * dr < d - 0.3 * dr {
            v.push(v.len() as f64 * dr);
        }
        v
    });
    for (i, &d) in chart.center_heights.iter().enumerate() {
        if d < 0.5 * dr {
            return Err(format!(
                "centre height {d} over side {i} is below the layer spacing {dr}"
            ));
        }
    }
    let mut hm = HexMesh {
        pos: Vec::new(),
        on_seam: Vec::new(),
        triangles: Vec::new(),
        side_rows: Default::default(),
    };
    let center = hm.add(chart.center, false);

    // Wall i carries the row ends of both adjacent regions. Ends of the two
    // regions closer than `snap` share one vertex, and long gaps are split.
    let mut walls: [Vec<WallVertex>; 3] = Default::default();
    for i in 0..3 {
        let owners = [i, (i + 1) % 3];
        let mut foot_level = [None, None];
        let mut marks: Vec<(f64, usize, usize)> = Vec::new();
        for k in 0..2 {
            let r0 = chart.foot_heights[i][k];
            for (j, &r) in levels[owners[k]].iter().enumerate().skip(1) {
                // a row may end above its level but never below it: the
                // wall leaves the seam horizontally, so a lower end would
                // push the row out through the wall
                if r <= r0 && r0 - r <= snap {
                    foot_level[k] = Some(j);
                } else if r > r0 {
                    marks.push((chart.wall_param(i, k, r), k, j));
                }
            }
        }
        marks.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut pts = vec![(0.0, foot_level)];
        for (t, k, j) in marks {
            let joins = pts.len() > 1 && pts[pts.len() - 1].1[k].is_none() && t - pts[pts.len() - 1].0 <= snap;
            if joins {
                let last = pts.last_mut().expect("mark");
                last.0 = t;
                last.1[k] = Some(j);
            } else {
                let mut level = [None, None];
                level[k] = Some(j);
                pts.push((t, level));
            }
        }
        let len = chart.wall_length(i);
        let mut wall = Vec::new();
        for (n, &(t, level)) in pts.iter().enumerate() {
            let v = if n == 0 {
                hm.add(chart.feet[i], true)
            } else {
                hm.add(chart.wall_point(i, t), false)
            };
            wall.push(WallVertex { v, level });
            let next = pts.get(n + 1).map_or(len, |p| p.0);
            let pieces = ((next - t) / h_t).ceil() as usize;
            for m in 1..pieces {
                let tm = t + (next - t) * m as f64 / pieces as f64;
                let v = hm.add(chart.wall_point(i, tm), false);
                wall.push(WallVertex { v, level: [None, None] });
            }
        }
        wall.push(WallVertex {
            v: center,
            level: [None, None],
        });
        walls[i] = wall;
    }

    for i in 0..3 {
        let side = chart.sides[i];
        let len = side.len;
        let s_center = side.param(&chart.center).clamp(0.0, len);
        // region i has wall i - 1 on its left (as the region after it) and
        // wall i on its right
        let (lw, rw) = (&walls[(i + 2) % 3], &walls[i]);
        let (l_foot, r_foot) = (chart.foot_heights[(i + 2) % 3][1], chart.foot_heights[i][0]);
        let find = |w: &[WallVertex], k: usize, j: usize| w.iter().position(|p| p.level[k] == Some(j));

        // row ends as (vertex, s, wall index); no index means on the seam
        // below the foot
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
        let mut ends: Vec<[Option<usize>; 2]> = Vec::new();
        let mut full_count = counts[i];
        for (j, &r) in levels[i].iter().enumerate() {
            let (lv, ls, li) = if j == 0 {
                (hm.add(side.point(0.0, 0.0), true), 0.0, None)
            } else if let Some(p) = find(lw, 1, j) {
                let s = if p == 0 {
                    0.0
                } else {
                    side.param(&hm.pos[lw[p].v]).clamp(0.0, len)
                };
                (lw[p].v, s, Some(p))
            } else if r < l_foot {
                (hm.add(side.point(0.0, r), true), 0.0, None)
            } else {
                return Err(format!("row {j} of region {i} has no left end"));
            };
            let (rv, rs, ri) = if j == 0 {
                (hm.add(side.point(len, 0.0), true), len, None)
            } else if let Some(p) = find(rw, 0, j) {
                let s = if p == 0 {
                    len
                } else {
                    side.param(&hm.pos[rw[p].v]).clamp(0.0, len)
                };
                (rw[p].v, s, Some(p))
            } else if r < r_foot {
                (hm.add(side.point(len, r), true), len, None)
            } else {
                return Err(format!("row {j} of region {i} has no right end"));
            };
            if rs <= ls {
                return Err(format!("row {j} of region {i} is empty"));
            }
            let full = li.is_none_or(|p| p == 0) && ri.is_none_or(|p| p == 0);
            let row_len = (rs - ls) * side.stretch(r);
            let n = if j == 0 {
                counts[i]
            } else if full {
                while row_len / full_count as f64 > h_t {
                    full_count *= 2;
                }
                full_count
            } else {
                ((row_len / h_t).ceil() as usize).max(1)
            };
            let mut row = vec![(lv, ls)];
            for k in 1..n {
                let s = ls + (rs - ls) * k as f64 / n as f64;
                row.push((hm.add(side.point(s, r), false), s));
            }
            row.push((rv, rs));
            rows.push(row);
            ends.push([li, ri]);
        }
        hm.side_rows[i] = rows[0].iter().map(|&(v, _)| v).collect();

        let s_of = |w: &[WallVertex], p: usize, foot_s: f64| {
            if p == 0 {
                foot_s
            } else {
                side.param(&hm.pos[w[p].v]).clamp(0.0, len)
            }
        };
        let tie = 1e-9 * len;
        let n_levels = rows.len();
        for j in 0..n_levels {
            let top = j + 1 == n_levels;
            let span = |w: &[WallVertex], k: usize| {
                let from = ends[j][k].map_or(0, |p| p + 1);
                let to = if top { w.len() - 1 } else { ends[j + 1][k].unwrap_or(0) };
                from..to.max(from)
            };
            let mut upper: Vec<(usize, f64)> = span(lw, 0).map(|p| (lw[p].v, s_of(lw, p, 0.0))).collect();
            if top {
                upper.push((center, s_center));
            } else {
                upper.extend(rows[j + 1].iter().copied());
            }
            upper.extend(span(rw, 1).rev().map(|p| (rw[p].v, s_of(rw, p, len))));
            let mut tris = Vec::new();
            stitch(
                &rows[j],
                &upper,
                tie,
                |a, b, c, d| distance(&hm.pos[a], &hm.pos[b]) <= distance(&hm.pos[c], &hm.pos[d]),
                |a, b, c| hm.acceptable(a, b, c),
                &mut tris,
            );
            if let Some(t) = tris.iter().find(|t| !hm.acceptable(t[0], t[1], t[2])) {
                let at = |v: usize| {
                    let x = &hm.pos[v];
                    (v, side.param(x), side.distance(x))
                };
                return Err(format!(
                    "band {j} of region {i} folds at {:?} {:?} {:?}; lower {:?} upper {:?}",
                    at(t[0]),
                    at(t[1]),
                    at(t[2]),
                    rows[j].iter().map(|p| at(p.0)).collect::<Vec<_>>(),
                    upper.iter().map(|p| at(p.0)).collect::<Vec<_>>()
                ));
            }
            hm.triangles.extend(tris);
        }
    }
    Ok(hm)
}

/// A meshed pants block together with its chart data.
#[derive(Debug, Clone)]
pub struct PantsMesh {
    pub mesh: HyperbolicMesh,
    pub chart: HexagonChart,
    /// Boundary cycle of each slot: the seam loop of a hole, or the rim of a
    /// truncated cusp.
    pub slot_loops: [Vec<usize>; 3],
    /// Half-side segment count per slot.
    pub half_counts: [usize; 3],
    pub layer_spacing: f64,
}

/// Meshes a block with edges no longer than `h`, returning the bare mesh.
pub fn mesh_pants(block: &PantsBlock, h: f64) -> Result<HyperbolicMesh, MeshError> {
    Ok(mesh_pants_with(block, &MeshOptions::new(h), 0)?.mesh)
}

/// Meshes a block; `block_id` labels errors and provenance.
pub fn mesh_pants_with(block: &PantsBlock, opts: &MeshOptions, block_id: usize) -> Result<PantsMesh, MeshError> {
    let err = |reason: String| MeshError::Meshing {
        block: block_id,
        reason,
    };
    if !(opts.h > 0.0 && opts.h.is_finite()) {
        return Err(MeshError::InvalidArgument(format!(
            "mesh size h = {} must be positive",
            opts.h
        )));
    }
    // A long cutting horocycle can put the altitudes' meeting point outside
    // the hexagon; shorten it until the partition is valid.
    let mut opts = *opts;
    let (halves, chart) = loop {
        let halves: [HalfBoundary; 3] = std::array::from_fn(|i| match block.boundary_lengths[i] {
            Some(l) => HalfBoundary::Geodesic(0.5 * l),
            None => HalfBoundary::Horocycle(0.5 * opts.cusp_length),
        });
        match HexagonChart::new(halves) {
            Ok(c) => break (halves, c),
            Err(e) if block.kind.holes() == 3 || opts.cusp_length < 1e-3 => return Err(err(e.to_string())),
            Err(_) => opts.cusp_length *= 0.5,
        }
    };
    let opts = &opts;
    let mut h_t = 0.7 * opts.h;
    let mut last = String::new();
    for _ in 0..12 {
        let counts: [usize; 3] = std::array::from_fn(|i| half_segments(halves[i].length(), opts.h));
        match build_pants(block, opts, block_id, &chart, h_t, counts) {
            Ok(pm) => {
                let q = pm.mesh.quality();
                if q.h_max <= opts.h {
                    return Ok(pm);
                }
                last = format!("h_max {} exceeds {}", q.h_max, opts.h);
            }
            Err(e) => last = e,
        }
        h_t *= 0.85;
    }
    Err(err(last))
}

fn build_pants(
    block: &PantsBlock,
    opts: &MeshOptions,
    block_id: usize,
    chart: &HexagonChart,
    h_t: f64,
    counts: [usize; 3],
) -> Result<PantsMesh, String> {
    let hex = mesh_hexagon(chart, h_t, counts)?;
    let nh = hex.pos.len();
    // copy 0 keeps ids, copy 1 shares seam vertices and mirrors the rest
    let mut mirror = vec![0usize; nh];
    let mut next = nh;
    for v in 0..nh {
        mirror[v] = if hex.on_seam[v] {
            v
        } else {
            next += 1;
            next - 1
        };
    }
    let mut provenance = Vec::with_capacity(next);
    for v in 0..nh {
        provenance.push(Provenance {
            block: block_id,
            copy: 0,
            chart: hex.pos[v],
        });
    }
    for v in 0..nh {
        if !hex.on_seam[v] {
            provenance.push(Provenance {
                block: block_id,
                copy: 1,
                chart: hex.pos[v],
            });
        }
    }
    let mut triangles = hex.triangles.clone();
    triangles.extend(hex.triangles.iter().map(|t| [mirror[t[0]], mirror[t[2]], mirror[t[1]]]));
    let mut lengths = BTreeMap::new();
    for t in &hex.triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let l = distance(&hex.pos[a], &hex.pos[b]);
            lengths.insert(edge_key(a, b), l);
            lengths.insert(edge_key(mirror[a], mirror[b]), l);
        }
    }
    let mut loops = Vec::new();
    let mut slot_loops: [Vec<usize>; 3] = Default::default();
    for i in 0..3 {
        let row = &hex.side_rows[i];
        let mut cycle: Vec<usize> = row.clone();
        cycle.extend(row[1..row.len() - 1].iter().rev().map(|&v| mirror[v]));
        match block.boundary_lengths[i] {
            Some(_) => {
                slot_loops[i] = cycle.clone();
                loops.push(BoundaryLoop {
                    vertices: cycle,
                    tag: LoopTag::GlueSeam,
                    label: format!("b{block_id}s{i}"),
                });
            }
            None => {
                let rim = attach_cusp(
                    &cycle,
                    &chart.sides[i],
                    opts,
                    h_t,
                    block_id,
                    &mut triangles,
                    &mut lengths,
                    &mut provenance,
                )?;
                slot_loops[i] = rim.clone();
                loops.push(BoundaryLoop {
                    vertices: rim,
                    tag: LoopTag::CuspRim,
                    label: format!("b{block_id}s{i}"),
                });
            }
        }
    }
    let vertex_count = provenance.len();
    let mesh = HyperbolicMesh::new(Metric::Hyperbolic, vertex_count, triangles, &lengths, loops, provenance)
        .map_err(|e| e.to_string())?;
    Ok(PantsMesh {
        mesh,
        chart: chart.clone(),
        slot_loops,
        half_counts: counts,
        layer_spacing: h_t,
    })
}

/// Upper-half-plane distance between cusp points at circle coordinates
/// `u` and depths `rho`, with circumference `c` at depth 0.
fn cusp_distance(c: f64, u1: f64, rho1: f64, u2: f64, rho2: f64) -> f64 {
    let mut du = (u1 - u2).abs() % c;
    du = du.min(c - du);
    let (y1, y2) = (rho1.exp(), rho2.exp());
    let dy = y1 - y2;
    2.0 * stable_asinh((du * du + dy * dy).sqrt() / (2.0 * (y1 * y2).sqrt()))
}

struct CuspRows {
    rows: Vec<Vec<usize>>,
    depths: Vec<f64>,
}

/// Builds the annulus below a horocycle loop `top` of circumference `c`;
/// vertex `k` of `top` sits at circle coordinate `k c / top.len()`.
fn cusp_rows(
    top: &[usize],
    c: f64,
    depth: f64,
    h_t: f64,
    next_vertex: &mut usize,
    triangles: &mut Vec<[usize; 3]>,
    lengths: &mut BTreeMap<[usize; 2], f64>,
) -> Result<CuspRows, String> {
    if !(depth > 0.0) || !depth.is_finite() {
        return Err(format!("cusp depth {depth} must be positive"));
    }
    if c * (-depth).exp() < 10.0 * f64::EPSILON {
        return Err(format!("cusp rim length {} below resolution", c * (-depth).exp()));
    }
    let layers = ((depth / h_t).ceil() as usize).max(1);
    let d_rho = depth / layers as f64;
    let mut rows = vec![top.to_vec()];
    let mut depths = vec![0.0];
    let mut count = top.len();
    for k in 1..=layers {
        let rho = k as f64 * d_rho;
        let circ = c * (-rho).exp();
        if count.is_multiple_of(2) && count / 2 >= 4 && circ / (count / 2) as f64 <= h_t {
            count /= 2;
        }
        let row: Vec<usize> = (0..count)
            .map(|_| {
                *next_vertex += 1;
                *next_vertex - 1
            })
            .collect();
        rows.push(row);
        depths.push(rho);
    }
    for k in 1..rows.len() {
        let mut coord = BTreeMap::new();
        for kk in [k, k - 1] {
            let n = rows[kk].len();
            for (pos, &v) in rows[kk].iter().enumerate() {
                coord.insert(v, (pos as f64 * c / n as f64, depths[kk]));
            }
        }
        let d = |p: usize, q: usize| {
            let ((u1, r1), (u2, r2)) = (coord[&p], coord[&q]);
            cusp_distance(c, u1, r1, u2, r2)
        };
        let mut tris = Vec::new();
        stitch_cyclic(&rows[k], &rows[k - 1], |a, b, x, y| d(a, b) <= d(x, y), &mut tris);
        for t in &tris {
            for a in 0..3 {
                let (p, q) = (t[a], t[(a + 1) % 3]);
                lengths.entry(edge_key(p, q)).or_insert_with(|| d(p, q));
            }
        }
        triangles.extend(tris);
    }
    Ok(CuspRows { rows, depths })
}

#[allow(clippy::too_many_arguments)]
fn attach_cusp(
    cycle: &[usize],
    side: &SideChart,
    opts: &MeshOptions,
    h_t: f64,
    block_id: usize,
    triangles: &mut Vec<[usize; 3]>,
    lengths: &mut BTreeMap<[usize; 2], f64>,
    provenance: &mut Vec<Provenance>,
) -> Result<Vec<usize>, String> {
    let c = 2.0 * side.len;
    let mut next = provenance.len();
    let cr = cusp_rows(cycle, c, opts.cusp_depth(), h_t, &mut next, triangles, lengths)?;
    for k in 1..cr.rows.len() {
        let n = cr.rows[k].len();
        for m in 0..n {
            let u = m as f64 * c / n as f64;
            let (copy, s) = if u <= side.len { (0, u) } else { (1, c - u) };
            provenance.push(Provenance {
                block: block_id,
                copy,
                chart: side.point(s, -cr.depths[k]),
            });
        }
    }
    Ok(cr.rows.last().unwrap().clone())
}

/// Truncated cusp of circumference `cusp_length` down to depth `r_max`, as
/// a stand-alone annulus: the horocycle at depth 0 is tagged `GlueSeam`,
/// the rim `CuspRim`.
pub fn truncate_cusp(cusp_length: f64, r_max: f64, h: f64) -> Result<HyperbolicMesh, MeshError> {
    if !(cusp_length > 0.0) || !(h > 0.0) {
        return Err(MeshError::InvalidArgument("cusp length and h must be positive".into()));
    }
    if !(r_max > 0.0) {
        return Err(MeshError::InvalidArgument(format!(
            "cusp depth {r_max} must be positive"
        )));
    }
    let h_t = 0.7 * h;
    let n = ((cusp_length / h_t).ceil() as usize).max(4);
    let top: Vec<usize> = (0..n).collect();
    let mut next = n;
    let mut triangles = Vec::new();
    let mut lengths = BTreeMap::new();
    for k in 0..n {
        let (u1, u2) = (
            k as f64 * cusp_length / n as f64,
            (k + 1) as f64 * cusp_length / n as f64,
        );
        lengths.insert(edge_key(k, (k + 1) % n), cusp_distance(cusp_length, u1, 0.0, u2, 0.0));
    }
    let cr = cusp_rows(&top, cusp_length, r_max, h_t, &mut next, &mut triangles, &mut lengths)
        .map_err(MeshError::InvalidArgument)?;
    let loops = vec![
        BoundaryLoop {
            vertices: std::iter::once(0).chain((1..n).rev()).collect(),
            tag: LoopTag::GlueSeam,
            label: "horocycle".into(),
        },
        BoundaryLoop {
            vertices: cr.rows.last().unwrap().clone(),
            tag: LoopTag::CuspRim,
            label: "rim".into(),
        },
    ];
    HyperbolicMesh::new(Metric::Hyperbolic, next, triangles, &lengths, loops, Vec::new())
}
