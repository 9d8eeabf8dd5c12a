//! Plain-text mesh files.
//!
//! ```text
//! HYPMESH v1            (or FLATMESH v1 for Euclidean lengths)
//! vertices V
//! triangles F
//! a b c                 (F lines)
//! edges E
//! a b length            (E lines, a < b, sorted)
//! loops L
//! tag label n v1 .. vn  (L lines)
//! provenance P          (P = 0 or V)
//! block copy t x y      (P lines)
//! ```
//! Floats are written in shortest round-trip form, so reading a written
//! mesh gives back identical bits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, MeshError};

use super::mesh::{BoundaryLoop, HyperbolicMesh, LoopTag, Metric, Provenance};

pub fn write_mesh(mesh: &HyperbolicMesh) -> String {
    let mut s = String::new();
    let header = match mesh.metric {
        Metric::Hyperbolic => "HYPMESH v1",
        Metric::Euclidean => "FLATMESH v1",
    };
    let _ = writeln!(s, "{header}");
    let _ = writeln!(s, "vertices {}", mesh.vertex_count());
    let _ = writeln!(s, "triangles {}", mesh.triangles().len());
    for t in mesh.triangles() {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "edges {}", mesh.edges().len());
    for (e, l) in mesh.edges().iter().zip(mesh.edge_lengths()) {
        let _ = writeln!(s, "{} {} {:e}", e[0], e[1], l);
    }
    let _ = writeln!(s, "loops {}", mesh.boundary_loops.len());
    for l in &mesh.boundary_loops {
        let label: String = l
            .label
            .chars()
            .map(|c| if c.is_whitespace() { '_' } else { c })
            .collect();
        let _ = write!(s, "{} {} {}", l.tag.as_str(), label, l.vertices.len());
        for v in &l.vertices {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "provenance {}", mesh.provenance.len());
    for p in &mesh.provenance {
        let _ = writeln!(
            s,
            "{} {} {:e} {:e} {:e}",
            p.block, p.copy, p.chart[0], p.chart[1], p.chart[2]
        );
    }
    s
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<Vec<&'a str>, MeshError> {
        for (i, l) in self.it.by_ref() {
            self.line = i + 1;
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Ok(t.split_whitespace().collect());
            }
        }
        Err(MeshError::Format {
            line: self.line + 1,
            reason: "unexpected end of file".into(),
        })
    }

    fn err(&self, reason: impl Into<String>) -> MeshError {
        MeshError::Format {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn count(&mut self, key: &str) -> Result<usize, MeshError> {
        let f = self.next()?;
        if f.len() != 2 || f[0] != key {
            return Err(self.err(format!("expected '{key} <count>'")));
        }
        f[1].parse()
            .map_err(|_| self.err(format!("bad {key} count '{}'", f[1])))
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T, MeshError> {
        s.parse().map_err(|_| self.err(format!("cannot parse '{s}'")))
    }
}

pub fn read_mesh(text: &str) -> Result<HyperbolicMesh, MeshError> {
    let mut r = Lines {
        it: text.lines().enumerate(),
        line: 0,
    };
    let head = r.next()?.join(" ");
    let metric = match head.as_str() {
        "HYPMESH v1" => Metric::Hyperbolic,
        "FLATMESH v1" => Metric::Euclidean,
        _ => return Err(r.err(format!("unknown header '{head}'"))),
    };
    let nv = r.count("vertices")?;
    let nt = r.count("triangles")?;
    let mut tris = Vec::with_capacity(nt);
    for _ in 0..nt {
        let f = r.next()?;
        if f.len() != 3 {
            return Err(r.err("triangle needs three vertices"));
        }
        tris.push([r.num(f[0])?, r.num(f[1])?, r.num(f[2])?]);
    }
    let ne = r.count("edges")?;
    let mut lengths = BTreeMap::new();
    for _ in 0..ne {
        let f = r.next()?;
        if f.len() != 3 {
            return Err(r.err("edge needs two vertices and a length"));
        }
        let (a, b): (usize, usize) = (r.num(f[0])?, r.num(f[1])?);
        lengths.insert(super::mesh::edge_key(a, b), r.num::<f64>(f[2])?);
    }
    let nl = r.count("loops")?;
    let mut loops = Vec::with_capacity(nl);
    for _ in 0..nl {
        let f = r.next()?;
        if f.len() < 3 {
            return Err(r.err("loop needs tag, label and count"));
        }
        let tag = LoopTag::parse(f[0]).ok_or_else(|| r.err(format!("unknown tag '{}'", f[0])))?;
        let n: usize = r.num(f[2])?;
        if f.len() != 3 + n {
            return Err(r.err(format!("loop declares {n} vertices but lists {}", f.len() - 3)));
        }
        let vertices = f[3..].iter().map(|s| r.num(s)).collect::<Result<_, _>>()?;
        loops.push(BoundaryLoop {
            vertices,
            tag,
            label: f[1].to_string(),
        });
    }
    let np = r.count("provenance")?;
    let mut prov = Vec::with_capacity(np);
    for _ in 0..np {
        let f = r.next()?;
        if f.len() != 5 {
            return Err(r.err("provenance needs block, copy and three coordinates"));
        }
        prov.push(Provenance {
            block: r.num(f[0])?,
            copy: r.num(f[1])?,
            chart: [r.num(f[2])?, r.num(f[3])?, r.num(f[4])?],
        });
    }
    if lengths.len() != ne {
        return Err(r.err("duplicate edges"));
    }
    let mesh = HyperbolicMesh::new(metric, nv, tris, &lengths, loops, prov)?;
    if mesh.edges().len() != ne {
        return Err(MeshError::Invalid(format!(
            "{ne} edges listed but triangles use {}",
            mesh.edges().len()
        )));
    }
    Ok(mesh)
}

pub fn save_mesh(mesh: &HyperbolicMesh, path: &Path) -> Result<(), Error> {
    std::fs::write(path, write_mesh(mesh))?;
    Ok(())
}

pub fn load_mesh(path: &Path) -> Result<HyperbolicMesh, Error> {
    let text = std::fs::read_to_string(path)?;
    Ok(read_mesh(&text)?)
}
