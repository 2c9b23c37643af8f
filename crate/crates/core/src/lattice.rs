//! Toric-code lattices with periodic, smooth or rough faces.
//!
//! Geometry conventions (frozen; region files depend on them):
//!
//! * Vertices have integer coordinates `(x, y, z)`. Along a periodic axis of
//!   extent `L` coordinates run over `0..L` and wrap. Along a bounded axis they
//!   run over `0..=L`, i.e. `L` cells between `L + 1` vertex layers.
//! * A qubit sits on every edge, named by its base vertex and axis; the edge
//!   runs from `base` to `base + e_axis`. Qubit indices are assigned in
//!   lexicographic order of `(x, y, z, axis)` over the edges that exist.
//! * A smooth face keeps its outermost vertex layer: the lattice ends on
//!   vertices, boundary stars are truncated and plaquettes are complete.
//! * A rough face drops its outermost vertex layer together with every edge
//!   lying in it. The perpendicular edges leading to that layer remain as
//!   dangling edges with a single star, and the plaquettes containing them are
//!   truncated to weight 3.
//! * Generators whose truncated support has weight < 2 are dropped.
//!
//! Stars are X-type, plaquettes are Z-type. Z-strings therefore create point
//! excitations on stars and X-membranes create loop excitations on plaquettes.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{group_rank, independent_subset, BitMatrix, Bits, EchelonBasis, PauliWord};

pub type Coord = [i64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Smooth,
    Rough,
}

/// One of the six faces of the cuboid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub axis: usize,
    pub high: bool,
}

impl Face {
    pub const X_LOW: Face = Face { axis: 0, high: false };
    pub const X_HIGH: Face = Face { axis: 0, high: true };
    pub const Y_LOW: Face = Face { axis: 1, high: false };
    pub const Y_HIGH: Face = Face { axis: 1, high: true };
    pub const Z_LOW: Face = Face { axis: 2, high: false };
    pub const Z_HIGH: Face = Face { axis: 2, high: true };

    pub fn name(&self) -> &'static str {
        match (self.axis, self.high) {
            (0, false) => "x_low",
            (0, true) => "x_high",
            (1, false) => "y_low",
            (1, true) => "y_high",
            (2, false) => "z_low",
            _ => "z_high",
        }
    }

    pub fn parse(s: &str) -> Result<Face> {
        Ok(match s {
            "x_low" => Face::X_LOW,
            "x_high" => Face::X_HIGH,
            "y_low" => Face::Y_LOW,
            "y_high" => Face::Y_HIGH,
            "z_low" => Face::Z_LOW,
            "z_high" => Face::Z_HIGH,
            other => return Err(Error::InvalidLattice(format!("unknown face {other:?}"))),
        })
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Dimension, extents (in unit cells) and per-face boundary labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeSpec {
    dimension: usize,
    extents: [usize; 3],
    faces: [[Boundary; 2]; 3],
}

impl LatticeSpec {
    /// `faces[axis] = [low, high]`. For a 2D spec the z entries are ignored.
    pub fn new(dimension: usize, extents: [usize; 3], faces: [[Boundary; 2]; 3]) -> Result<Self> {
        if dimension != 2 && dimension != 3 {
            return Err(Error::InvalidLattice(format!(
                "dimension must be 2 or 3, got {dimension}"
            )));
        }
        let mut extents = extents;
        let mut faces = faces;
        if dimension == 2 {
            extents[2] = 1;
            faces[2] = [Boundary::Periodic; 2];
        }
        for axis in 0..dimension {
            if extents[axis] < 2 {
                return Err(Error::InvalidLattice(format!(
                    "extent along axis {axis} must be at least 2, got {}",
                    extents[axis]
                )));
            }
            let [lo, hi] = faces[axis];
            if (lo == Boundary::Periodic) != (hi == Boundary::Periodic) {
                return Err(Error::InvalidLattice(format!(
                    "axis {axis}: periodic must be paired with periodic"
                )));
            }
        }
        Ok(Self {
            dimension,
            extents,
            faces,
        })
    }

    pub fn torus_3d(l: usize) -> Result<Self> {
        Self::new(3, [l; 3], [[Boundary::Periodic; 2]; 3])
    }

    pub fn torus_2d(l: usize) -> Result<Self> {
        Self::new(2, [l, l, 1], [[Boundary::Periodic; 2]; 3])
    }

    /// Periodic in x and y; bounded in z with the given bottom and top faces.
    pub fn slab_3d(lx: usize, ly: usize, lz: usize, bottom: Boundary, top: Boundary) -> Result<Self> {
        Self::new(
            3,
            [lx, ly, lz],
            [[Boundary::Periodic; 2], [Boundary::Periodic; 2], [bottom, top]],
        )
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn extents(&self) -> [usize; 3] {
        self.extents
    }

    pub fn boundary(&self, face: Face) -> Boundary {
        self.faces[face.axis][face.high as usize]
    }

    pub fn is_periodic(&self, axis: usize) -> bool {
        self.faces[axis][0] == Boundary::Periodic
    }

    /// Number of distinct vertex coordinates along `axis`.
    pub fn vertex_count(&self, axis: usize) -> i64 {
        if axis >= self.dimension {
            1
        } else if self.is_periodic(axis) {
            self.extents[axis] as i64
        } else {
            self.extents[axis] as i64 + 1
        }
    }

    /// Whether vertex layer `c` along `axis` carries vertices and in-layer edges.
    pub fn layer_present(&self, axis: usize, c: i64) -> bool {
        if axis >= self.dimension {
            return c == 0;
        }
        let l = self.extents[axis] as i64;
        if self.is_periodic(axis) {
            return (0..l).contains(&c);
        }
        if c == 0 {
            self.faces[axis][0] == Boundary::Smooth
        } else if c == l {
            self.faces[axis][1] == Boundary::Smooth
        } else {
            0 < c && c < l
        }
    }

    /// Whether `c` is a valid base coordinate for an edge running along `axis`.
    pub fn edge_base_valid(&self, axis: usize, c: i64) -> bool {
        axis < self.dimension && (0..self.extents[axis] as i64).contains(&c)
    }

    /// Wraps a coordinate along periodic axes; `None` if it leaves the lattice.
    pub fn normalize(&self, mut v: Coord) -> Option<Coord> {
        for (axis, c) in v.iter_mut().enumerate() {
            let n = self.vertex_count(axis);
            if axis < self.dimension && self.is_periodic(axis) {
                *c = c.rem_euclid(n);
            } else if !(0..n).contains(c) {
                return None;
            }
        }
        Some(v)
    }

    pub fn physical_faces(&self) -> Vec<Face> {
        (0..self.dimension)
            .filter(|&a| !self.is_periodic(a))
            .flat_map(|axis| [Face { axis, high: false }, Face { axis, high: true }])
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub base: Coord,
    pub axis: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Star,
    Plaquette,
}

/// A star or plaquette with its anchor (vertex, or face base vertex) and
/// for plaquettes the pair of spanning axes `(a, b)`, `a < b`.
#[derive(Clone, Debug)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub anchor: Coord,
    pub plane: Option<(usize, usize)>,
    pub word: PauliWord,
    pub support: Vec<usize>,
}

/// The qubits and all (over-complete) stars and plaquettes of a lattice.
#[derive(Clone, Debug)]
pub struct CodeLattice {
    spec: LatticeSpec,
    edges: Vec<Edge>,
    index: HashMap<(Coord, usize), usize>,
    generators: Vec<Generator>,
    n_stars: usize,
    incident: Vec<Vec<usize>>,
    star_at: HashMap<Coord, usize>,
}

fn unit(axis: usize) -> Coord {
    let mut e = [0; 3];
    e[axis] = 1;
    e
}

fn add(a: Coord, b: Coord) -> Coord {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: Coord, b: Coord) -> Coord {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Builds the lattice with every star and plaquette enumerated.
pub fn build_toric_code(spec: &LatticeSpec) -> Result<CodeLattice> {
    CodeLattice::build(spec.clone())
}

impl CodeLattice {
    pub fn build(spec: LatticeSpec) -> Result<Self> {
        let d = spec.dimension();
        let counts: Vec<i64> = (0..3).map(|a| spec.vertex_count(a)).collect();

        let mut edges = Vec::new();
        let mut index = HashMap::new();
        for x in 0..counts[0] {
            for y in 0..counts[1] {
                for z in 0..counts[2] {
                    let v = [x, y, z];
                    for axis in 0..d {
                        let ok = spec.edge_base_valid(axis, v[axis])
                            && (0..3).all(|b| b == axis || spec.layer_present(b, v[b]));
                        if ok {
                            index.insert((v, axis), edges.len());
                            edges.push(Edge { base: v, axis });
                        }
                    }
                }
            }
        }
        let n = edges.len();
        if n == 0 {
            return Err(Error::InvalidLattice("lattice has no qubits".into()));
        }

        let lookup = |base: Coord, axis: usize| -> Option<usize> {
            let base = spec.normalize(base)?;
            index.get(&(base, axis)).copied()
        };

        let mut generators = Vec::new();
        let mut star_at = HashMap::new();
        for x in 0..counts[0] {
            for y in 0..counts[1] {
                for z in 0..counts[2] {
                    let v = [x, y, z];
                    if !(0..3).all(|a| spec.layer_present(a, v[a])) {
                        continue;
                    }
                    let mut support: Vec<usize> = (0..d)
                        .flat_map(|a| [lookup(v, a), lookup(sub(v, unit(a)), a)])
                        .flatten()
                        .collect();
                    support.sort_unstable();
                    support.dedup();
                    if support.len() >= 2 {
                        star_at.insert(v, generators.len());
                        generators.push(Generator {
                            kind: GeneratorKind::Star,
                            anchor: v,
                            plane: None,
                            word: PauliWord::x_on(n, support.iter().copied()),
                            support,
                        });
                    }
                }
            }
        }
        let n_stars = generators.len();

        for x in 0..counts[0] {
            for y in 0..counts[1] {
                for z in 0..counts[2] {
                    let v = [x, y, z];
                    for a in 0..d {
                        for b in (a + 1)..d {
                            let normal_ok = (0..3)
                                .filter(|&c| c != a && c != b)
                                .all(|c| spec.layer_present(c, v[c]));
                            if !normal_ok
                                || !spec.edge_base_valid(a, v[a])
                                || !spec.edge_base_valid(b, v[b])
                            {
                                continue;
                            }
                            let mut support: Vec<usize> = [
                                lookup(v, a),
                                lookup(add(v, unit(b)), a),
                                lookup(v, b),
                                lookup(add(v, unit(a)), b),
                            ]
                            .into_iter()
                            .flatten()
                            .collect();
                            support.sort_unstable();
                            support.dedup();
                            if support.len() >= 2 {
                                generators.push(Generator {
                                    kind: GeneratorKind::Plaquette,
                                    anchor: v,
                                    plane: Some((a, b)),
                                    word: PauliWord::z_on(n, support.iter().copied()),
                                    support,
                                });
                            }
                        }
                    }
                }
            }
        }

        let mut incident = vec![Vec::new(); n];
        for (gi, g) in generators.iter().enumerate() {
            for &q in &g.support {
                incident[q].push(gi);
            }
        }

        Ok(Self {
            spec,
            edges,
            index,
            generators,
            n_stars,
            incident,
            star_at,
        })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn n_qubits(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, q: usize) -> Edge {
        self.edges[q]
    }

    /// Qubit index of the edge `(base, axis)`, wrapping periodic coordinates.
    pub fn edge_index(&self, base: Coord, axis: usize) -> Option<usize> {
        let base = self.spec.normalize(base)?;
        self.index.get(&(base, axis)).copied()
    }

    /// Edge midpoint in doubled coordinates (vertex `v` sits at `2v`).
    pub fn midpoint2(&self, q: usize) -> Coord {
        let e = self.edges[q];
        let mut m = [2 * e.base[0], 2 * e.base[1], 2 * e.base[2]];
        m[e.axis] += 1;
        m
    }

    /// Both endpoints of an edge, wrapped. The far endpoint of a dangling
    /// edge may be a vertex without a star.
    pub fn endpoints(&self, q: usize) -> [Coord; 2] {
        let e = self.edges[q];
        let far = add(e.base, unit(e.axis));
        let far = self.spec.normalize(far).unwrap_or(far);
        [e.base, far]
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, id: usize) -> &Generator {
        &self.generators[id]
    }

    pub fn n_stars(&self) -> usize {
        self.n_stars
    }

    pub fn star_ids(&self) -> std::ops::Range<usize> {
        0..self.n_stars
    }

    pub fn plaquette_ids(&self) -> std::ops::Range<usize> {
        self.n_stars..self.generators.len()
    }

    pub fn star_at(&self, v: Coord) -> Option<usize> {
        self.spec.normalize(v).and_then(|v| self.star_at.get(&v).copied())
    }

    /// Generators (stars and plaquettes) acting on qubit `q`.
    pub fn incident_generators(&self, q: usize) -> &[usize] {
        &self.incident[q]
    }

    pub fn words(&self) -> Vec<PauliWord> {
        self.generators.iter().map(|g| g.word.clone()).collect()
    }

    /// Rank of the full stabilizer group of the code.
    pub fn stabilizer_rank(&self) -> usize {
        group_rank(self.n_qubits(), &self.words())
    }

    pub fn n_logical(&self) -> usize {
        self.n_qubits() - self.stabilizer_rank()
    }

    /// Recipe generating set: all stars, all plaquettes in xy and yz planes,
    /// and xz plaquettes only in the plane `y = plane_y`. In 2D all plaquettes
    /// are xy plaquettes and the recipe keeps them all. The set generates the
    /// whole stabilizer group but still contains dependencies; see
    /// [`independent_generating_set`].
    pub fn recipe_generating_set(&self, plane_y: i64) -> Result<Vec<usize>> {
        if self.spec.dimension() == 3 && !(0..self.spec.vertex_count(1)).contains(&plane_y) {
            return Err(Error::Geometry(format!(
                "plane y = {plane_y} outside the lattice"
            )));
        }
        Ok((0..self.generators.len())
            .filter(|&id| match self.generators[id].plane {
                Some((0, 2)) => self.generators[id].anchor[1] == plane_y,
                _ => true,
            })
            .collect())
    }
}

/// The recipe set pruned to an independent generating set: stars first, then
/// plaquettes in xz, xy, yz order; a generator is kept if it is independent of
/// the ones kept before it.
pub fn independent_generating_set(lattice: &CodeLattice, plane_y: i64) -> Result<Vec<usize>> {
    let mut ids = lattice.recipe_generating_set(plane_y)?;
    let order = |id: &usize| -> (u8, usize) {
        match lattice.generator(*id).plane {
            None => (0, *id),
            Some((0, 2)) => (1, *id),
            Some((0, 1)) => (2, *id),
            Some(_) => (3, *id),
        }
    };
    ids.sort_by_key(order);
    let rows: Vec<Bits> = ids
        .iter()
        .map(|&id| lattice.generator(id).word.symplectic_row())
        .collect();
    Ok(independent_subset(&rows).into_iter().map(|i| ids[i]).collect())
}

/// How the logical degrees of freedom are fixed when completing the code
/// stabilizer group to a pure state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LogicalChoice {
    /// Straight Z lines, lowest coordinates first.
    #[default]
    ZLowest,
    /// Straight Z lines, highest coordinates first.
    ZHighest,
    /// X-type logicals from the null space of the plaquette check matrix.
    XType,
}

/// A stabilizer state: `n` independent commuting words fixing a pure state.
#[derive(Clone, Debug)]
pub struct StabilizerState {
    n: usize,
    generators: Vec<PauliWord>,
    n_logical: usize,
    lattice: Option<Arc<CodeLattice>>,
}

impl StabilizerState {
    /// Validates that `generators` are `n` independent, pairwise commuting
    /// words on `n` qubits.
    pub fn new(n: usize, generators: Vec<PauliWord>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.n_qubits() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: g.n_qubits(),
            });
        }
        if generators.len() != n {
            return Err(Error::InvalidState(format!(
                "expected {n} generators, got {}",
                generators.len()
            )));
        }
        for (i, a) in generators.iter().enumerate() {
            if let Some(j) = generators[i + 1..].iter().position(|b| a.anticommutes(b)) {
                return Err(Error::InvalidState(format!(
                    "generators {i} and {} anticommute",
                    i + 1 + j
                )));
            }
        }
        let rank = group_rank(n, &generators);
        if rank != n {
            return Err(Error::InvalidState(format!(
                "generators have rank {rank}, need {n}"
            )));
        }
        Ok(Self {
            n,
            generators,
            n_logical: 0,
            lattice: None,
        })
    }

    /// Accepts an over-complete list, keeping the first independent subset.
    pub fn from_generators(n: usize, generators: Vec<PauliWord>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.n_qubits() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: g.n_qubits(),
            });
        }
        let rows: Vec<Bits> = generators.iter().map(PauliWord::symplectic_row).collect();
        let keep = independent_subset(&rows);
        let kept = keep.into_iter().map(|i| generators[i].clone()).collect();
        Self::new(n, kept)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliWord] {
        &self.generators
    }

    /// How many of the generators are appended logical representatives.
    pub fn n_logical(&self) -> usize {
        self.n_logical
    }

    pub fn lattice(&self) -> Option<&Arc<CodeLattice>> {
        self.lattice.as_ref()
    }

    pub fn require_lattice(&self) -> Result<&Arc<CodeLattice>> {
        self.lattice
            .as_ref()
            .ok_or_else(|| Error::InvalidState("state has no lattice attached".into()))
    }

    /// The same state with each generator's sign flipped where it
    /// anticommutes with `u`, i.e. the stabilizers of `u|ψ⟩`.
    pub fn conjugated_by(&self, u: &PauliWord) -> Result<StabilizerState> {
        if u.n_qubits() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: u.n_qubits(),
            });
        }
        let mut out = self.clone();
        for g in out.generators.iter_mut() {
            if g.anticommutes(u) {
                *g = g.clone().negated();
            }
        }
        Ok(out)
    }
}

/// Completes the code stabilizer group to a pure state with the default
/// logical choice.
pub fn fix_ground_state(lattice: &CodeLattice) -> Result<StabilizerState> {
    fix_ground_state_with(Arc::new(lattice.clone()), LogicalChoice::default())
}

pub fn fix_ground_state_with(
    lattice: Arc<CodeLattice>,
    choice: LogicalChoice,
) -> Result<StabilizerState> {
    let n = lattice.n_qubits();
    let mut basis = EchelonBasis::new(2 * n);
    let mut generators = Vec::with_capacity(n);
    for g in lattice.generators() {
        if basis.insert(&g.word.symplectic_row()) {
            generators.push(g.word.clone());
        }
    }
    let k = n - generators.len();
    let mut logicals = Vec::with_capacity(k);

    let offer = |w: PauliWord, basis: &mut EchelonBasis, logicals: &mut Vec<PauliWord>| {
        if logicals.len() < k && basis.insert(&w.symplectic_row()) {
            logicals.push(w);
        }
    };

    match choice {
        LogicalChoice::ZLowest | LogicalChoice::ZHighest => {
            let mut lines = straight_z_lines(&lattice);
            if choice == LogicalChoice::ZHighest {
                lines.reverse();
            }
            for w in lines {
                offer(w, &mut basis, &mut logicals);
            }
            for w in css_logicals(&lattice, GeneratorKind::Star) {
                offer(w, &mut basis, &mut logicals);
            }
        }
        LogicalChoice::XType => {
            for w in css_logicals(&lattice, GeneratorKind::Plaquette) {
                offer(w, &mut basis, &mut logicals);
            }
        }
    }
    if logicals.len() != k {
        return Err(Error::InvalidState(format!(
            "found {} of {k} logical representatives",
            logicals.len()
        )));
    }
    generators.extend(logicals);
    let mut state = StabilizerState::new(n, generators)?;
    state.n_logical = k;
    state.lattice = Some(lattice);
    Ok(state)
}

/// Straight Z lines along each axis that commute with every star, ordered by
/// axis and then by the lowest perpendicular coordinates.
fn straight_z_lines(lattice: &CodeLattice) -> Vec<PauliWord> {
    let spec = lattice.spec();
    let n = lattice.n_qubits();
    let mut out = Vec::new();
    for axis in 0..spec.dimension() {
        let others: Vec<usize> = (0..3).filter(|&a| a != axis).collect();
        for p in 0..spec.vertex_count(others[0]) {
            for q in 0..spec.vertex_count(others[1]) {
                let line: Vec<usize> = (0..spec.extents()[axis] as i64)
                    .filter_map(|c| {
                        let mut v = [0; 3];
                        v[axis] = c;
                        v[others[0]] = p;
                        v[others[1]] = q;
                        lattice.edge_index(v, axis)
                    })
                    .collect();
                if line.is_empty() {
                    continue;
                }
                let w = PauliWord::z_on(n, line);
                let commutes = lattice
                    .star_ids()
                    .all(|s| !lattice.generator(s).word.anticommutes(&w));
                if commutes {
                    out.push(w);
                }
            }
        }
    }
    out
}

/// Null-space vectors of the check matrix of one generator kind, as words of
/// the opposite type: Z-type words commuting with all stars, or X-type words
/// commuting with all plaquettes.
fn css_logicals(lattice: &CodeLattice, against: GeneratorKind) -> Vec<PauliWord> {
    let n = lattice.n_qubits();
    let rows: Vec<Bits> = lattice
        .generators()
        .iter()
        .filter(|g| g.kind == against)
        .map(|g| Bits::from_indices(n, g.support.iter().copied()))
        .collect();
    let m = BitMatrix::from_rows(n, rows).expect("rows have n bits");
    m.nullspace()
        .into_iter()
        .map(|v| match against {
            GeneratorKind::Star => PauliWord::z_on(n, v.iter_ones()),
            GeneratorKind::Plaquette => PauliWord::x_on(n, v.iter_ones()),
        })
        .collect()
}
