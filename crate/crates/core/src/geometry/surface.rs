//! Fenchel–Nielsen description of a surface: pants blocks, gluings with
//! twists, cusp labels.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, GeometryError};

/// Orientable pants block types. The Möbius block is recognised only so
/// that it can be rejected with a clear message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    ThreeHoles,
    TwoHolesOneCusp,
    OneHoleTwoCusps,
    ThreeCusps,
}

impl BlockKind {
    pub fn holes(self) -> usize {
        match self {
            BlockKind::ThreeHoles => 3,
            BlockKind::TwoHolesOneCusp => 2,
            BlockKind::OneHoleTwoCusps => 1,
            BlockKind::ThreeCusps => 0,
        }
    }

    fn from_holes(h: usize) -> Self {
        match h {
            3 => BlockKind::ThreeHoles,
            2 => BlockKind::TwoHolesOneCusp,
            1 => BlockKind::OneHoleTwoCusps,
            _ => BlockKind::ThreeCusps,
        }
    }
}

/// A pair of pants: three slots, each a geodesic boundary of given length
/// or a cusp.
#[derive(Debug, Clone, PartialEq)]
pub struct PantsBlock {
    pub kind: BlockKind,
    /// `Some(length)` for a hole, `None` for a cusp; always three entries.
    pub boundary_lengths: [Option<f64>; 3],
}

impl PantsBlock {
    pub fn new(boundary_lengths: [Option<f64>; 3]) -> Result<Self, GeometryError> {
        for l in boundary_lengths.iter().flatten() {
            if !(*l > 0.0 && l.is_finite()) {
                return Err(GeometryError::NonPositiveLength(*l));
            }
        }
        let holes = boundary_lengths.iter().filter(|l| l.is_some()).count();
        Ok(PantsBlock {
            kind: BlockKind::from_holes(holes),
            boundary_lengths,
        })
    }

    pub fn three_holes(l1: f64, l2: f64, l3: f64) -> Result<Self, GeometryError> {
        Self::new([Some(l1), Some(l2), Some(l3)])
    }

    pub fn euler_characteristic(&self) -> i64 {
        -1
    }

    pub fn is_cusp(&self, slot: usize) -> bool {
        self.boundary_lengths[slot].is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SlotRef {
    pub block: usize,
    pub slot: usize,
}

impl SlotRef {
    pub fn new(block: usize, slot: usize) -> Self {
        SlotRef { block, slot }
    }
}

/// Two hole slots glued with a twist, measured as arc length along the
/// common boundary curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gluing {
    pub from: SlotRef,
    pub to: SlotRef,
    pub twist: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FNSurface {
    pub blocks: Vec<PantsBlock>,
    pub gluings: Vec<Gluing>,
    pub free_boundaries: Vec<SlotRef>,
    pub cusp_labels: BTreeMap<SlotRef, String>,
}

/// Topological signature: genus, punctures, holes (no Möbius bands).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub genus: i64,
    pub punctures: i64,
    pub holes: i64,
}

/// `2 - 2γ - p - q - r`; only orientable surfaces (`r = 0`) are supported.
pub fn euler_characteristic(genus: i64, p: i64, q: i64, r: i64) -> Result<i64, GeometryError> {
    if genus < 0 || p < 0 || q < 0 || !(0..=2).contains(&r) {
        return Err(GeometryError::InvalidArgument(format!(
            "signature ({genus}, {p}, {q}, {r}) out of range"
        )));
    }
    if r > 0 {
        return Err(GeometryError::UnsupportedTopology(format!(
            "{r} embedded Möbius band(s); only orientable surfaces are supported"
        )));
    }
    Ok(2 - 2 * genus - p - q - r)
}

impl FNSurface {
    pub fn new(
        blocks: Vec<PantsBlock>,
        gluings: Vec<Gluing>,
        cusp_labels: BTreeMap<SlotRef, String>,
    ) -> Result<Self, GeometryError> {
        let mut s = FNSurface {
            blocks,
            gluings,
            free_boundaries: Vec::new(),
            cusp_labels,
        };
        s.free_boundaries = s.validate()?;
        Ok(s)
    }

    /// Checks the gluing invariants and returns the unglued hole slots.
    fn validate(&self) -> Result<Vec<SlotRef>, GeometryError> {
        let bad = |m: String| GeometryError::InvalidSurface(m);
        if self.blocks.is_empty() {
            return Err(bad("surface has no blocks".into()));
        }
        let mut used: BTreeMap<SlotRef, usize> = BTreeMap::new();
        for (gi, g) in self.gluings.iter().enumerate() {
            for r in [g.from, g.to] {
                if r.block >= self.blocks.len() || r.slot > 2 {
                    return Err(bad(format!("gluing {gi} refers to missing slot {r:?}")));
                }
                if self.blocks[r.block].is_cusp(r.slot) {
                    return Err(bad(format!("gluing {gi} uses cusp slot {r:?}")));
                }
                if let Some(prev) = used.insert(r, gi) {
                    return Err(bad(format!("slot {r:?} glued twice (gluings {prev} and {gi})")));
                }
            }
            if g.from == g.to {
                return Err(bad(format!("gluing {gi} glues a slot to itself")));
            }
            if !g.twist.is_finite() {
                return Err(bad(format!("gluing {gi} has non-finite twist")));
            }
            let la = self.slot_length(g.from).unwrap_or(0.0);
            let lb = self.slot_length(g.to).unwrap_or(0.0);
            if (la - lb).abs() > 1e-12 * la.max(lb) {
                return Err(bad(format!(
                    "gluing {gi} joins boundaries of different lengths {la} and {lb}"
                )));
            }
        }
        for r in self.cusp_labels.keys() {
            if r.block >= self.blocks.len() || r.slot > 2 || !self.blocks[r.block].is_cusp(r.slot) {
                return Err(bad(format!("cusp label on non-cusp slot {r:?}")));
            }
        }
        if !self.is_connected_without(None) {
            return Err(bad("gluing graph is not connected".into()));
        }
        let mut free = Vec::new();
        for (b, block) in self.blocks.iter().enumerate() {
            for slot in 0..3 {
                let r = SlotRef::new(b, slot);
                if !block.is_cusp(slot) && !used.contains_key(&r) {
                    free.push(r);
                }
            }
        }
        Ok(free)
    }

    pub fn slot_length(&self, r: SlotRef) -> Option<f64> {
        self.blocks[r.block].boundary_lengths[r.slot]
    }

    /// Connectivity of the gluing graph, optionally with one gluing removed.
    pub fn is_connected_without(&self, skip: Option<usize>) -> bool {
        let n = self.blocks.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (gi, g) in self.gluings.iter().enumerate() {
            if Some(gi) == skip {
                continue;
            }
            let (a, b) = (find(&mut parent, g.from.block), find(&mut parent, g.to.block));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (0..n).all(|i| find(&mut parent, i) == root)
    }

    /// A gluing curve is non-separating when cutting it keeps the surface
    /// connected.
    pub fn is_nonseparating(&self, gluing: usize) -> bool {
        gluing < self.gluings.len() && self.is_connected_without(Some(gluing))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.blocks.iter().map(PantsBlock::euler_characteristic).sum()
    }

    pub fn cusp_count(&self) -> usize {
        self.blocks.iter().map(|b| 3 - b.kind.holes()).sum()
    }

    pub fn signature(&self) -> Signature {
        let chi = self.euler_characteristic();
        let p = self.cusp_count() as i64;
        let q = self.free_boundaries.len() as i64;
        Signature {
            genus: (2 - chi - p - q) / 2,
            punctures: p,
            holes: q,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_boundaries.is_empty() && self.cusp_count() == 0
    }

    /// Pants-curve lengths, one per gluing.
    pub fn curve_lengths(&self) -> Vec<f64> {
        self.gluings
            .iter()
            .map(|g| self.slot_length(g.from).unwrap_or(f64::NAN))
            .collect()
    }

    pub fn from_json_str(text: &str) -> Result<Self, Error> {
        let raw: SurfaceFile = serde_json::from_str(text)?;
        Ok(raw.into_surface()?)
    }

    pub fn from_json_file(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&SurfaceFile::from_surface(self)).expect("surface serialization cannot fail")
    }
}

/// On-disk surface description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub blocks: Vec<BlockFile>,
    #[serde(default)]
    pub gluings: Vec<GluingFile>,
    #[serde(default)]
    pub cusps: Vec<CuspFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockFile {
    pub kind: String,
    pub lengths: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GluingFile {
    pub from: [usize; 2],
    pub to: [usize; 2],
    #[serde(default)]
    pub twist: f64,
}

/// A cusp is listed either as a bare `[block, slot]` pair or with a label.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CuspFile {
    Slot([usize; 2]),
    Labelled { slot: [usize; 2], label: String },
}

fn parse_kind(name: &str) -> Result<BlockKind, GeometryError> {
    let key: String = name
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase();
    match key.as_str() {
        "threeholes" | "3h" => Ok(BlockKind::ThreeHoles),
        "twoholesonecusp" | "2h" => Ok(BlockKind::TwoHolesOneCusp),
        "oneholetwocusps" | "1h" => Ok(BlockKind::OneHoleTwoCusps),
        "threecusps" | "0h" => Ok(BlockKind::ThreeCusps),
        "mobius" | "twoholesonemobius" | "1c" | "crosscap" => Err(GeometryError::UnsupportedTopology(
            "Möbius pants blocks are not supported (orientable blocks only)".into(),
        )),
        _ => Err(GeometryError::InvalidSurface(format!("unknown block kind {name:?}"))),
    }
}

impl SurfaceFile {
    pub fn into_surface(self) -> Result<FNSurface, GeometryError> {
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (bi, b) in self.blocks.iter().enumerate() {
            let kind = parse_kind(&b.kind)?;
            if b.lengths.len() > 3 {
                return Err(GeometryError::InvalidSurface(format!(
                    "block {bi} lists {} lengths",
                    b.lengths.len()
                )));
            }
            let mut lengths = [None; 3];
            for (i, l) in b.lengths.iter().enumerate() {
                lengths[i] = *l;
            }
            let block = PantsBlock::new(lengths)?;
            if block.kind != kind {
                return Err(GeometryError::InvalidSurface(format!(
                    "block {bi} declared {:?} but has {} hole(s)",
                    kind,
                    block.kind.holes()
                )));
            }
            blocks.push(block);
        }
        let gluings = self
            .gluings
            .iter()
            .map(|g| Gluing {
                from: SlotRef::new(g.from[0], g.from[1]),
                to: SlotRef::new(g.to[0], g.to[1]),
                twist: g.twist,
            })
            .collect();
        let mut labels = BTreeMap::new();
        for (ci, c) in self.cusps.iter().enumerate() {
            let (slot, label) = match c {
                CuspFile::Slot(s) => (*s, format!("cusp{ci}")),
                CuspFile::Labelled { slot, label } => (*slot, label.clone()),
            };
            labels.insert(SlotRef::new(slot[0], slot[1]), label);
        }
        FNSurface::new(blocks, gluings, labels)
    }

    pub fn from_surface(s: &FNSurface) -> Self {
        let blocks = s
            .blocks
            .iter()
            .map(|b| BlockFile {
                kind: serde_json::to_value(b.kind)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default(),
                lengths: b.boundary_lengths.to_vec(),
            })
            .collect();
        let gluings = s
            .gluings
            .iter()
            .map(|g| GluingFile {
                from: [g.from.block, g.from.slot],
                to: [g.to.block, g.to.slot],
                twist: g.twist,
            })
            .collect();
        let cusps = s
            .cusp_labels
            .iter()
            .map(|(r, l)| CuspFile::Labelled {
                slot: [r.block, r.slot],
                label: l.clone(),
            })
            .collect();
        SurfaceFile { blocks, gluings, cusps }
    }
}

/// Closed surface of genus `genus` with every pants curve of length
/// `lengths[i]` (one entry per curve, `3γ - 3` of them) and given twists.
///
/// Blocks form a cycle glued slot 1 to slot 0, and consecutive pairs are
/// additionally glued along slot 2. For genus two this is the theta graph.
pub fn closed_surface(genus: usize, lengths: &[f64], twists: &[f64]) -> Result<FNSurface, GeometryError> {
    if genus < 2 {
        return Err(GeometryError::InvalidArgument(format!(
            "closed hyperbolic surfaces need genus >= 2, got {genus}"
        )));
    }
    let nb = 2 * genus - 2;
    let nc = 3 * genus - 3;
    if lengths.len() != nc || twists.len() != nc {
        return Err(GeometryError::InvalidArgument(format!(
            "genus {genus} needs {nc} curve lengths and twists"
        )));
    }
    let mut pairs = Vec::with_capacity(nc);
    for i in 0..nb {
        pairs.push((SlotRef::new(i, 1), SlotRef::new((i + 1) % nb, 0)));
    }
    for j in 0..nb / 2 {
        pairs.push((SlotRef::new(2 * j, 2), SlotRef::new(2 * j + 1, 2)));
    }
    let mut slot_len = vec![[0.0; 3]; nb];
    for (c, (a, b)) in pairs.iter().enumerate() {
        slot_len[a.block][a.slot] = lengths[c];
        slot_len[b.block][b.slot] = lengths[c];
    }
    let blocks = slot_len
        .iter()
        .map(|l| PantsBlock::three_holes(l[0], l[1], l[2]))
        .collect::<Result<Vec<_>, _>>()?;
    let gluings = pairs
        .iter()
        .zip(twists)
        .map(|((a, b), t)| Gluing {
            from: *a,
            to: *b,
            twist: *t,
        })
        .collect();
    FNSurface::new(blocks, gluings, BTreeMap::new())
}
