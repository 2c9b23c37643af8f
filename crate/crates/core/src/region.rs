//! Qubit regions built from axis-aligned boxes, the four-region partitions
//! used by the invariants, and the cut-star geometry (`A_R`, `n_R`, `N_R`).
//!
//! Membership rule: a box with cell corners `lo` (inclusive) and `hi`
//! (exclusive) contains every edge whose midpoint `m` satisfies
//! `lo ≤ m < hi` componentwise. A box of `s` cells per side therefore holds
//! the three edges based at each of its `s³` vertices, and adjacent boxes tile
//! without overlap. Internally boxes are stored as closed ranges in doubled
//! coordinates, which keeps reflections onto high faces exact.

use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{CodeLattice, Coord, Face, GeneratorKind};
use crate::pauli::Bits;

/// Closed range of doubled coordinates per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Box3 {
    lo2: Coord,
    hi2: Coord,
}

impl Box3 {
    /// Cells `lo..hi` on every axis (`hi` exclusive).
    pub fn cells(lo: Coord, hi: Coord) -> Self {
        Self {
            lo2: [2 * lo[0], 2 * lo[1], 2 * lo[2]],
            hi2: [2 * hi[0] - 1, 2 * hi[1] - 1, 2 * hi[2] - 1],
        }
    }

    /// A box covering the whole lattice.
    pub fn everything() -> Self {
        Self {
            lo2: [i64::MIN / 4; 3],
            hi2: [i64::MAX / 4; 3],
        }
    }

    pub fn is_degenerate(&self) -> bool {
        (0..3).any(|a| self.lo2[a] > self.hi2[a])
    }

    pub fn contains2(&self, m: Coord) -> bool {
        (0..3).all(|a| self.lo2[a] <= m[a] && m[a] <= self.hi2[a])
    }

    /// Mirror along `axis` about doubled coordinate `center2 / 2`.
    fn reflect(&self, axis: usize, twice_center: i64) -> Self {
        let mut b = *self;
        b.lo2[axis] = twice_center - self.hi2[axis];
        b.hi2[axis] = twice_center - self.lo2[axis];
        b
    }
}

/// A set of qubits of one lattice with a human-readable provenance.
#[derive(Clone, PartialEq, Eq)]
pub struct Region {
    mask: Bits,
    label: String,
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Region({}, {} qubits)", self.label, self.len())
    }
}

impl Region {
    pub fn empty(n: usize) -> Self {
        Self {
            mask: Bits::zeros(n),
            label: "∅".into(),
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            mask: Bits::ones(n),
            label: "all".into(),
        }
    }

    pub fn from_qubits<I: IntoIterator<Item = usize>>(n: usize, qubits: I) -> Result<Self> {
        let mut mask = Bits::zeros(n);
        for q in qubits {
            if q >= n {
                return Err(Error::IndexOutOfRange { index: q, n });
            }
            mask.set(q, true);
        }
        Ok(Self {
            mask,
            label: "qubits".into(),
        })
    }

    pub fn from_mask(mask: Bits) -> Self {
        Self {
            mask,
            label: "mask".into(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mask(&self) -> &Bits {
        &self.mask
    }

    pub fn n_total(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_zero()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.mask.get(q)
    }

    pub fn qubits(&self) -> Vec<usize> {
        self.mask.iter_ones().collect()
    }

    pub fn union(&self, other: &Region) -> Region {
        let mut mask = self.mask.clone();
        mask.or_assign(&other.mask);
        Region {
            mask,
            label: format!("({} ∪ {})", self.label, other.label),
        }
    }

    pub fn intersection(&self, other: &Region) -> Region {
        let mut mask = self.mask.clone();
        mask.and_assign(&other.mask);
        Region {
            mask,
            label: format!("({} ∩ {})", self.label, other.label),
        }
    }

    pub fn difference(&self, other: &Region) -> Region {
        let mut mask = self.mask.clone();
        mask.and_not_assign(&other.mask);
        Region {
            mask,
            label: format!("({} ∖ {})", self.label, other.label),
        }
    }

    pub fn complement(&self) -> Region {
        Region {
            mask: self.mask.not(),
            label: format!("¬{}", self.label),
        }
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        !self.mask.intersects(&other.mask)
    }
}

pub fn box_region(lattice: &CodeLattice, b: &Box3) -> Region {
    let n = lattice.n_qubits();
    let mut mask = Bits::zeros(n);
    if !b.is_degenerate() {
        for q in 0..n {
            if b.contains2(lattice.midpoint2(q)) {
                mask.set(q, true);
            }
        }
    }
    Region {
        mask,
        label: format!("box{:?}..{:?}", b.lo2, b.hi2),
    }
}

/// Union of boxes minus another union of boxes.
pub fn compose(lattice: &CodeLattice, include: &[Box3], exclude: &[Box3]) -> Region {
    let n = lattice.n_qubits();
    let mut r = Region::empty(n);
    for b in include {
        r = r.union(&box_region(lattice, b));
    }
    for b in exclude {
        r = r.difference(&box_region(lattice, b));
    }
    r
}

/// Outer box minus inner box.
pub fn annulus(lattice: &CodeLattice, outer: Box3, inner: Box3) -> Region {
    box_region(lattice, &outer)
        .difference(&box_region(lattice, &inner))
        .with_label("annulus")
}

/// Pairwise-disjoint regions covering the lattice: A is the complement of BCD.
#[derive(Clone, Debug)]
pub struct PartitionABCD {
    pub a: Region,
    pub b: Region,
    pub c: Region,
    pub d: Region,
    /// Excitation sites inside A next to D (qubit indices), metadata only.
    pub excitation_sites: Vec<usize>,
}

impl PartitionABCD {
    /// Builds a partition from B, C, D with A their complement, checking
    /// disjointness and non-emptiness.
    pub fn from_bcd(b: Region, c: Region, d: Region, sites: Vec<usize>) -> Result<Self> {
        for (x, y, name) in [(&b, &c, "B/C"), (&b, &d, "B/D"), (&c, &d, "C/D")] {
            if !x.is_disjoint(y) {
                return Err(Error::Overlap(name.into()));
            }
        }
        for (r, name) in [(&b, "B"), (&c, "C"), (&d, "D")] {
            if r.is_empty() {
                return Err(Error::Geometry(format!("region {name} is empty")));
            }
        }
        let a = b.union(&c).union(&d).complement().with_label("A");
        if a.is_empty() {
            return Err(Error::Geometry("region A is empty".into()));
        }
        Ok(Self {
            a,
            b: b.with_label("B"),
            c: c.with_label("C"),
            d: d.with_label("D"),
            excitation_sites: sites,
        })
    }

    pub fn bc(&self) -> Region {
        self.b.union(&self.c).with_label("BC")
    }

    pub fn cd(&self) -> Region {
        self.c.union(&self.d).with_label("CD")
    }

    /// True if the four regions are pairwise disjoint and cover every qubit.
    pub fn is_valid(&self) -> bool {
        let parts = [&self.a, &self.b, &self.c, &self.d];
        let disjoint = (0..4).all(|i| (i + 1..4).all(|j| parts[i].is_disjoint(parts[j])));
        let cover = self.a.union(&self.b).union(&self.c).union(&self.d);
        disjoint && cover.len() == cover.n_total()
    }
}

/// Size parameters of the boundary partitions, in cells.
///
/// The regions form a box resting on the designated face: `B ∪ C ∪ D` is a
/// box of `wall + core + wall` cells along the tangent axes and
/// `height + wall` cells along the inward normal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PartitionParams {
    /// Thickness of the D slabs/ring and of the B cap and walls.
    pub wall: i64,
    /// Width of C along the first tangent axis (the gap bridged between the D
    /// slabs, or the side of the C column for the line partition).
    pub core: i64,
    /// Extent of C along the second tangent axis (point partition only).
    pub depth: i64,
    /// Height of C and D above the face.
    pub height: i64,
    /// Offset of the partition box along the two tangent axes.
    pub offset: [i64; 2],
}

impl Default for PartitionParams {
    fn default() -> Self {
        Self {
            wall: 2,
            core: 2,
            depth: 2,
            height: 2,
            offset: [3, 3],
        }
    }
}

impl PartitionParams {
    fn validate(&self, line: bool) -> Result<()> {
        let mut dims = vec![("wall", self.wall), ("core", self.core), ("height", self.height)];
        if !line {
            dims.push(("depth", self.depth));
        }
        for (name, v) in dims {
            if v < 1 {
                return Err(Error::Overlap(format!(
                    "{name} = {v}: regions would touch or overlap"
                )));
            }
        }
        Ok(())
    }

    /// Footprint along (first tangent, second tangent, normal).
    pub fn footprint(&self, line: bool) -> [i64; 3] {
        let t2 = if line { self.core } else { self.depth };
        [
            2 * self.wall + self.core,
            2 * self.wall + t2,
            self.height + self.wall,
        ]
    }

    /// All dimensions grown by one cell.
    pub fn dilated(&self) -> Self {
        Self {
            wall: self.wall + 1,
            core: self.core + 1,
            depth: self.depth + 1,
            height: self.height + 1,
            offset: self.offset,
        }
    }
}

/// Local frame attached to a physical face: two tangent axes and an inward
/// normal, with boxes given in local cell coordinates (normal coordinate 0 is
/// the face itself).
struct FaceFrame<'a> {
    lattice: &'a CodeLattice,
    face: Face,
    tangents: [usize; 2],
}

impl<'a> FaceFrame<'a> {
    fn new(lattice: &'a CodeLattice, face: Face) -> Result<Self> {
        let spec = lattice.spec();
        if spec.dimension() != 3 {
            return Err(Error::Geometry("boundary partitions need a 3D lattice".into()));
        }
        if spec.is_periodic(face.axis) {
            return Err(Error::Geometry(format!("face {face} is periodic")));
        }
        let t: Vec<usize> = (0..3).filter(|&a| a != face.axis).collect();
        Ok(Self {
            lattice,
            face,
            tangents: [t[0], t[1]],
        })
    }

    /// Local box `[lo, hi)` in (t0, t1, normal) cells → lattice box.
    fn to_box(&self, lo: [i64; 3], hi: [i64; 3]) -> Result<Box3> {
        let spec = self.lattice.spec();
        let mut glo = [0; 3];
        let mut ghi = [0; 3];
        for (k, &axis) in self.tangents.iter().enumerate() {
            glo[axis] = lo[k];
            ghi[axis] = hi[k];
        }
        glo[self.face.axis] = lo[2];
        ghi[self.face.axis] = hi[2];
        for axis in 0..3 {
            let limit = spec.extents()[axis] as i64;
            if glo[axis] < 0 || ghi[axis] > limit {
                return Err(Error::Geometry(format!(
                    "partition exceeds the lattice along axis {axis} ({}..{} not within 0..{limit})",
                    glo[axis], ghi[axis]
                )));
            }
        }
        let b = Box3::cells(glo, ghi);
        Ok(if self.face.high {
            let l = spec.extents()[self.face.axis] as i64;
            // Doubled coordinate 2L is the high vertex layer; shifting by one
            // half cell maps the half-open low-face box onto the high face.
            b.reflect(self.face.axis, 2 * l)
        } else {
            b
        })
    }

    fn region(&self, lo: [i64; 3], hi: [i64; 3]) -> Result<Region> {
        Ok(box_region(self.lattice, &self.to_box(lo, hi)?))
    }
}

/// The partition for the point invariant at `face`.
///
/// `B ∪ C ∪ D` is a box on the face. D is two slabs on the face at both ends
/// of the first tangent axis, C is the gap between them, and B is the rest of
/// the box: a cap over C and D plus two walls closing C off along the second
/// tangent axis. C touches only B, D and the face.
pub fn partition_point(lattice: &CodeLattice, face: Face, p: &PartitionParams) -> Result<PartitionABCD> {
    p.validate(false)?;
    let f = FaceFrame::new(lattice, face)?;
    let [o0, o1] = p.offset;
    let [w0, w1, h_total] = p.footprint(false);
    let (t, h) = (p.wall, p.height);
    let whole = f.region([o0, o1, 0], [o0 + w0, o1 + w1, h_total])?;
    let d1 = f.region([o0, o1 + t, 0], [o0 + t, o1 + t + p.depth, h])?;
    let d2 = f.region([o0 + t + p.core, o1 + t, 0], [o0 + w0, o1 + t + p.depth, h])?;
    let c = f.region([o0 + t, o1 + t, 0], [o0 + t + p.core, o1 + t + p.depth, h])?;
    let d = d1.union(&d2);
    let b = whole.difference(&c).difference(&d);
    let sites = excitation_sites(&f, [o0 - 1, o1 + t, 0], [o0 + w0, o1 + t, 0]);
    PartitionABCD::from_bcd(b, c, d, sites)
}

/// The partition for the line invariant at `face`.
///
/// D is a ring on the face around a square C column; B is a cap slab over
/// both. B does not touch the face.
pub fn partition_line(lattice: &CodeLattice, face: Face, p: &PartitionParams) -> Result<PartitionABCD> {
    p.validate(true)?;
    let f = FaceFrame::new(lattice, face)?;
    let [o0, o1] = p.offset;
    let [w0, w1, h_total] = p.footprint(true);
    let (t, h) = (p.wall, p.height);
    let ring_outer = f.region([o0, o1, 0], [o0 + w0, o1 + w1, h])?;
    let c = f.region([o0 + t, o1 + t, 0], [o0 + t + p.core, o1 + t + p.core, h])?;
    let d = ring_outer.difference(&c);
    let b = f.region([o0, o1, h], [o0 + w0, o1 + w1, h_total])?;
    let sites = excitation_sites(&f, [o0 + t, o1 + t, 0], [o0 + t, o1 + t, 0]);
    PartitionABCD::from_bcd(b, c, d, sites)
}

fn excitation_sites(f: &FaceFrame<'_>, p: [i64; 3], q: [i64; 3]) -> Vec<usize> {
    [p, q]
        .iter()
        .filter_map(|&s| {
            let b = f.to_box(s, [s[0] + 1, s[1] + 1, s[2] + 1]).ok()?;
            box_region(f.lattice, &b).qubits().first().copied()
        })
        .collect()
}

/// Size parameters of the 2D partition, in cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Partition2dParams {
    pub wall: i64,
    pub core: i64,
    pub depth: i64,
    pub offset: [i64; 2],
}

impl Default for Partition2dParams {
    fn default() -> Self {
        Self {
            wall: 2,
            core: 2,
            depth: 2,
            offset: [1, 1],
        }
    }
}

/// The 2D partition: D is two blocks at the ends of a bar, C the middle of the
/// bar, and B two strips running along the whole bar on either side. P and Q are the qubits just
/// outside the two D blocks.
pub fn partition_2d(lattice: &CodeLattice, p: &Partition2dParams) -> Result<PartitionABCD> {
    if lattice.spec().dimension() != 2 {
        return Err(Error::Geometry("partition_2d needs a 2D lattice".into()));
    }
    for (name, v) in [("wall", p.wall), ("core", p.core), ("depth", p.depth)] {
        if v < 1 {
            return Err(Error::Overlap(format!(
                "{name} = {v}: regions would touch or overlap"
            )));
        }
    }
    let [ox, oy] = p.offset;
    let (t, w, dep) = (p.wall, p.core, p.depth);
    let ext = lattice.spec().extents();
    if ox < 0 || oy < 0 || ox + 2 * t + w > ext[0] as i64 || oy + 2 * t + dep > ext[1] as i64 {
        return Err(Error::Geometry("2D partition exceeds the lattice".into()));
    }
    let bx = |x0: i64, y0: i64, x1: i64, y1: i64| {
        box_region(lattice, &Box3::cells([x0, y0, 0], [x1, y1, 1]))
    };
    let yb = oy + t;
    let d = bx(ox, yb, ox + t, yb + dep).union(&bx(ox + t + w, yb, ox + 2 * t + w, yb + dep));
    let c = bx(ox + t, yb, ox + t + w, yb + dep);
    let x1 = ox + 2 * t + w;
    let b = bx(ox, oy, x1, yb).union(&bx(ox, yb + dep, x1, yb + dep + t));
    let sites = [[ox - 1, yb], [ox + 2 * t + w, yb]]
        .iter()
        .filter_map(|&[x, y]| lattice.edge_index([x, y, 0], 0))
        .collect();
    PartitionABCD::from_bcd(b, c, d, sites)
}

/// Cut-star geometry of a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct AreaReport {
    /// `A_R`: stars acting on both the region and its complement.
    pub area: usize,
    /// `n_R`: connected components of the cut stars.
    pub components_total: usize,
    /// `N_R`: components that do not reach a rough boundary.
    pub components_rough_free: usize,
}

/// Counts cut stars and their components.
///
/// Two cut stars are adjacent when some plaquette, restricted to the region,
/// anticommutes with both restricted stars. A component reaches a rough
/// boundary when one of its plaquettes anticommutes with a single restricted
/// star only; such plaquettes are the truncated ones next to a rough face.
pub fn area_report(lattice: &CodeLattice, region: &Region) -> AreaReport {
    let cut = cut_structure(lattice, region);
    let area = cut.stars.len();
    let mut uf = UnionFind::new(area);
    for e in &cut.edges {
        for w in e.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let mut dangling = vec![false; area];
    for e in &cut.edges {
        if e.len() == 1 {
            dangling[uf.find(e[0])] = true;
        }
    }
    let roots: Vec<usize> = (0..area).filter(|&i| uf.find(i) == i).collect();
    let rough_free = roots.iter().filter(|&&r| !dangling[r]).count();
    AreaReport {
        area,
        components_total: roots.len(),
        components_rough_free: rough_free,
    }
}

/// Cut stars (generator ids) and, for every plaquette, the local indices of the
/// cut stars its restriction anticommutes with (only non-empty lists).
pub(crate) struct CutStructure {
    pub stars: Vec<usize>,
    pub edges: Vec<Vec<usize>>,
    pub plaquettes: Vec<usize>,
}

pub(crate) fn is_cut(lattice: &CodeLattice, region: &Region, gid: usize) -> bool {
    let g = lattice.generator(gid);
    let inside = g.support.iter().filter(|&&q| region.contains(q)).count();
    inside > 0 && inside < g.support.len()
}

pub(crate) fn cut_structure_for(
    lattice: &CodeLattice,
    region: &Region,
    plaquettes: impl IntoIterator<Item = usize>,
) -> CutStructure {
    let stars: Vec<usize> = lattice
        .star_ids()
        .filter(|&s| is_cut(lattice, region, s))
        .collect();
    let local: std::collections::HashMap<usize, usize> =
        stars.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut edges = Vec::new();
    let mut plaq_ids = Vec::new();
    for p in plaquettes {
        let g = lattice.generator(p);
        debug_assert_eq!(g.kind, GeneratorKind::Plaquette);
        if !is_cut(lattice, region, p) {
            continue;
        }
        // Odd overlap of the restricted plaquette with a restricted star.
        let mut odd: std::collections::BTreeMap<usize, bool> = Default::default();
        for &q in g.support.iter().filter(|&&q| region.contains(q)) {
            for &s in lattice.incident_generators(q) {
                if let Some(&i) = local.get(&s) {
                    *odd.entry(i).or_insert(false) ^= true;
                }
            }
        }
        let ends: Vec<usize> = odd.into_iter().filter(|&(_, o)| o).map(|(i, _)| i).collect();
        if !ends.is_empty() {
            edges.push(ends);
            plaq_ids.push(p);
        }
    }
    CutStructure {
        stars,
        edges,
        plaquettes: plaq_ids,
    }
}

fn cut_structure(lattice: &CodeLattice, region: &Region) -> CutStructure {
    cut_structure_for(lattice, region, lattice.plaquette_ids())
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
