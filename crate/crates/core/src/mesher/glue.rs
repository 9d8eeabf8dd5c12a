//! Gluing meshed pants along their seams, and cyclic covers.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::MeshError;
use crate::geometry::surface::{FNSurface, SlotRef};

use super::mesh::{edge_key, BoundaryLoop, HyperbolicMesh, Metric, Provenance};
use super::pants::{mesh_pants_with, HexagonChart, MeshOptions, PantsMesh};

/// How a seam was actually identified.
#[derive(Debug, Clone, PartialEq)]
pub struct SeamRecord {
    /// Index into the surface's gluing list.
    pub gluing: usize,
    /// Instances (cover sheets times blocks) on either side.
    pub instances: (usize, usize),
    pub requested_twist: f64,
    /// Twist realised by the vertex identification, a whole number of segments.
    pub applied_twist: f64,
    pub shift: usize,
    pub segments: usize,
    /// Seam vertices in the glued mesh, in the order of the `from` loop.
    pub vertices: Vec<usize>,
}

/// A copy of a base block inside a glued mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockInstance {
    pub base_block: usize,
    pub sheet: usize,
}

/// A glued surface mesh with enough bookkeeping to evaluate chart
/// distances at every vertex.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub mesh: HyperbolicMesh,
    pub instances: Vec<BlockInstance>,
    /// Hexagon chart of each base block.
    pub charts: Vec<HexagonChart>,
    pub seams: Vec<SeamRecord>,
    /// Every block position a glued vertex came from; seam vertices have
    /// one entry per block they touch.
    pub homes: Vec<Vec<Provenance>>,
    /// Glued vertex ids of the loop of every (instance, slot).
    pub slot_loops: BTreeMap<(usize, usize), Vec<usize>>,
    /// Largest layer spacing used by any block.
    pub layer_spacing: f64,
    pub sheets: usize,
}

impl SurfaceMesh {
    /// Distance from the home `p` to boundary slot `slot` of its block,
    /// measured in the block chart.
    pub fn slot_distance(&self, p: &Provenance, slot: usize) -> f64 {
        let base = self.instances[p.block].base_block;
        self.charts[base].sides[slot].distance(&p.chart)
    }

    /// Distance from the home `p` to the nearest boundary of its block.
    pub fn block_boundary_distance(&self, p: &Provenance) -> f64 {
        let base = self.instances[p.block].base_block;
        self.charts[base].nearest_side(&p.chart).1
    }

    /// Instances of a cover sheet, indexed by base block.
    pub fn instance(&self, sheet: usize, base_block: usize) -> usize {
        sheet * self.charts.len() + base_block
    }
}

struct Join {
    gluing: usize,
    a: (usize, usize),
    b: (usize, usize),
    twist: f64,
    length: f64,
}

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

fn assemble(
    surface: &FNSurface,
    pants: &[PantsMesh],
    instances: Vec<BlockInstance>,
    joins: &[Join],
    sheets: usize,
) -> Result<SurfaceMesh, MeshError> {
    let mut offsets = Vec::with_capacity(instances.len());
    let mut total = 0;
    for inst in &instances {
        offsets.push(total);
        total += pants[inst.base_block].mesh.vertex_count();
    }
    let slot = |inst: usize, s: usize| -> Vec<usize> {
        let pm = &pants[instances[inst].base_block];
        pm.slot_loops[s].iter().map(|&v| v + offsets[inst]).collect()
    };
    let local_len = |inst: usize, a: usize, b: usize| -> f64 {
        let pm = &pants[instances[inst].base_block];
        let o = offsets[inst];
        pm.mesh.length(a - o, b - o).expect("seam edge")
    };
    let mut parent: Vec<usize> = (0..total).collect();
    let mut pending = Vec::new();
    for j in joins {
        let la = slot(j.a.0, j.a.1);
        let lb = slot(j.b.0, j.b.1);
        let n = la.len();
        if n != lb.len() {
            return Err(MeshError::SeamMismatch(format!(
                "gluing {}: seam counts {} and {} differ",
                j.gluing,
                n,
                lb.len()
            )));
        }
        let seg = j.length / n as f64;
        let steps = (j.twist / seg).round();
        let shift = steps.rem_euclid(n as f64) as usize;
        let partner = |k: usize| lb[(shift + n - k % n) % n];
        for k in 0..n {
            let (a0, a1) = (la[k], la[(k + 1) % n]);
            let (b0, b1) = (partner(k), partner(k + 1));
            let (x, y) = (local_len(j.a.0, a0, a1), local_len(j.b.0, b0, b1));
            if (x - y).abs() > 1e-9 * x.max(y) {
                return Err(MeshError::SeamMismatch(format!(
                    "gluing {}: seam edge {k} has lengths {x} and {y}",
                    j.gluing
                )));
            }
        }
        for k in 0..n {
            let (ra, rb) = (find(&mut parent, la[k]), find(&mut parent, partner(k)));
            if ra != rb {
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[hi] = lo;
            }
        }
        pending.push((j.gluing, (j.a.0, j.b.0), j.twist, steps * seg, shift, n, la));
    }
    // renumber classes in order of their smallest member
    let mut new_id = vec![usize::MAX; total];
    let mut map = vec![0usize; total];
    let mut count = 0;
    for v in 0..total {
        let r = find(&mut parent, v);
        if new_id[r] == usize::MAX {
            new_id[r] = count;
            count += 1;
        }
        map[v] = new_id[r];
    }
    let mut homes: Vec<Vec<Provenance>> = vec![Vec::new(); count];
    let mut triangles = Vec::new();
    let mut lengths: BTreeMap<[usize; 2], f64> = BTreeMap::new();
    for (inst, info) in instances.iter().enumerate() {
        let pm = &pants[info.base_block];
        let o = offsets[inst];
        for (v, p) in pm.mesh.provenance.iter().enumerate() {
            homes[map[v + o]].push(Provenance { block: inst, ..*p });
        }
        for t in pm.mesh.triangles() {
            triangles.push([map[t[0] + o], map[t[1] + o], map[t[2] + o]]);
        }
        for (e, l) in pm.mesh.edges().iter().zip(pm.mesh.edge_lengths()) {
            let key = edge_key(map[e[0] + o], map[e[1] + o]);
            lengths.entry(key).or_insert(*l);
        }
    }
    let provenance = homes.iter().map(|h| h[0]).collect();
    let mut glued = vec![false; instances.len() * 3];
    for j in joins {
        glued[j.a.0 * 3 + j.a.1] = true;
        glued[j.b.0 * 3 + j.b.1] = true;
    }
    let mut loops = Vec::new();
    let mut slot_loops = BTreeMap::new();
    for (inst, info) in instances.iter().enumerate() {
        let pm = &pants[info.base_block];
        for s in 0..3 {
            let verts: Vec<usize> = slot(inst, s).iter().map(|&v| map[v]).collect();
            slot_loops.insert((inst, s), verts.clone());
            if glued[inst * 3 + s] {
                continue;
            }
            let base = SlotRef::new(info.base_block, s);
            let tag = pm.mesh.boundary_loops[s].tag;
            let label = match surface.cusp_labels.get(&base) {
                Some(l) if sheets == 1 => l.clone(),
                Some(l) => format!("{l}@{}", info.sheet),
                None => format!("b{}s{}@{}", info.base_block, s, info.sheet),
            };
            loops.push(BoundaryLoop {
                vertices: verts,
                tag,
                label,
            });
        }
    }
    let seams = pending
        .into_iter()
        .map(|(gluing, insts, req, applied, shift, n, la)| SeamRecord {
            gluing,
            instances: insts,
            requested_twist: req,
            applied_twist: applied,
            shift,
            segments: n,
            vertices: la.iter().map(|&v| map[v]).collect(),
        })
        .collect();
    let mesh = HyperbolicMesh::new(Metric::Hyperbolic, count, triangles, &lengths, loops, provenance)?;
    let layer_spacing = pants.iter().map(|p| p.layer_spacing).fold(0.0, f64::max);
    Ok(SurfaceMesh {
        mesh,
        instances,
        charts: pants.iter().map(|p| p.chart.clone()).collect(),
        seams,
        homes,
        slot_loops,
        layer_spacing,
        sheets,
    })
}

/// Meshes every block of `surface` (in parallel).
pub fn mesh_blocks(surface: &FNSurface, opts: &MeshOptions) -> Result<Vec<PantsMesh>, MeshError> {
    surface
        .blocks
        .par_iter()
        .enumerate()
        .map(|(i, b)| mesh_pants_with(b, opts, i))
        .collect()
}

fn curve_length(surface: &FNSurface, g: usize) -> f64 {
    surface
        .slot_length(surface.gluings[g].from)
        .expect("glued slots are holes")
}

/// Glues per-block meshes according to the surface's gluings, realising
/// each twist to the nearest seam segment.
pub fn glue(surface: &FNSurface, pants: &[PantsMesh]) -> Result<SurfaceMesh, MeshError> {
    if pants.len() != surface.blocks.len() {
        return Err(MeshError::InvalidArgument(format!(
            "{} block meshes for {} blocks",
            pants.len(),
            surface.blocks.len()
        )));
    }
    let instances = (0..surface.blocks.len())
        .map(|b| BlockInstance {
            base_block: b,
            sheet: 0,
        })
        .collect();
    let joins: Vec<Join> = surface
        .gluings
        .iter()
        .enumerate()
        .map(|(g, gl)| Join {
            gluing: g,
            a: (gl.from.block, gl.from.slot),
            b: (gl.to.block, gl.to.slot),
            twist: gl.twist,
            length: curve_length(surface, g),
        })
        .collect();
    let sm = assemble(surface, pants, instances, &joins, 1)?;
    sm.mesh.validate(Some(surface.euler_characteristic()))?;
    Ok(sm)
}

/// Meshes and glues a whole surface.
pub fn mesh_surface(surface: &FNSurface, opts: &MeshOptions) -> Result<SurfaceMesh, MeshError> {
    let pants = mesh_blocks(surface, opts)?;
    glue(surface, &pants)
}

/// Cyclic cover of order `(k + 2) n` obtained by cutting along gluing
/// `curve` and attaching the copies of the cut surface in a cycle. Sheet
/// `q`'s `to` side of the curve is glued to sheet `q + 1`'s `from` side.
pub fn cyclic_cover_mesh(
    surface: &FNSurface,
    curve: usize,
    k: usize,
    n: usize,
    opts: &MeshOptions,
) -> Result<SurfaceMesh, MeshError> {
    if k == 0 || n == 0 {
        return Err(MeshError::InvalidArgument(format!(
            "cover needs k >= 1 and n >= 1, got k={k}, n={n}"
        )));
    }
    if curve >= surface.gluings.len() {
        return Err(MeshError::InvalidArgument(format!(
            "gluing {curve} does not exist ({} gluings)",
            surface.gluings.len()
        )));
    }
    if !surface.is_nonseparating(curve) {
        return Err(MeshError::SeparatingCurve(format!(
            "cutting gluing {curve} disconnects the surface, so no cyclic cover unwraps it"
        )));
    }
    let pants = mesh_blocks(surface, opts)?;
    let nb = surface.blocks.len();
    let m = (k + 2) * n;
    let instances = (0..m)
        .flat_map(|q| {
            (0..nb).map(move |b| BlockInstance {
                base_block: b,
                sheet: q,
            })
        })
        .collect();
    let mut joins = Vec::new();
    for q in 0..m {
        for (g, gl) in surface.gluings.iter().enumerate() {
            let len = curve_length(surface, g);
            let (a, b) = if g == curve {
                (
                    (q * nb + gl.to.block, gl.to.slot),
                    (((q + 1) % m) * nb + gl.from.block, gl.from.slot),
                )
            } else {
                (
                    (q * nb + gl.from.block, gl.from.slot),
                    (q * nb + gl.to.block, gl.to.slot),
                )
            };
            joins.push(Join {
                gluing: g,
                a,
                b,
                twist: gl.twist,
                length: len,
            });
        }
    }
    let sm = assemble(surface, &pants, instances, &joins, m)?;
    sm.mesh.validate(Some(m as i64 * surface.euler_characteristic()))?;
    Ok(sm)
}
