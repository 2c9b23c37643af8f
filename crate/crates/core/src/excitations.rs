//! Excitation operators (Z-strings, X-membranes), syndromes, deformability,
//! monodromy norms and boundary condensation.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{CodeLattice, Coord, Face, GeneratorKind, StabilizerState};
use crate::pauli::{EchelonBasis, PauliWord};
use crate::region::{Region, UnionFind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcitationKind {
    ZString,
    XMembrane,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExcitationProcess {
    pub kind: ExcitationKind,
    /// Sorted edge indices.
    pub support: Vec<usize>,
    pub operator: PauliWord,
    /// Strings: vertices of odd degree. Membranes: anchors of the plaquettes
    /// holding an odd number of membrane edges (the boundary curve).
    pub endpoints: Vec<Coord>,
}

fn check_edges(lattice: &CodeLattice, edges: &[usize]) -> Result<Vec<usize>> {
    if edges.is_empty() {
        return Err(Error::Geometry("empty edge set".into()));
    }
    let n = lattice.n_qubits();
    let mut seen = BTreeSet::new();
    for &q in edges {
        if q >= n {
            return Err(Error::IndexOutOfRange { index: q, n });
        }
        if !seen.insert(q) {
            return Err(Error::Geometry(format!("edge {q} listed twice")));
        }
    }
    Ok(seen.into_iter().collect())
}

/// Z on every edge of a connected path.
pub fn z_string(lattice: &CodeLattice, path: &[usize]) -> Result<ExcitationProcess> {
    let support = check_edges(lattice, path)?;
    let mut degree: BTreeMap<Coord, usize> = BTreeMap::new();
    for &q in &support {
        for v in lattice.endpoints(q) {
            *degree.entry(v).or_default() += 1;
        }
    }
    let index: BTreeMap<Coord, usize> = degree.keys().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(index.len());
    for &q in &support {
        let [a, b] = lattice.endpoints(q);
        uf.union(index[&a], index[&b]);
    }
    if (0..index.len()).any(|i| uf.find(i) != 0) {
        return Err(Error::Disconnected("string edges do not form one path".into()));
    }
    Ok(ExcitationProcess {
        kind: ExcitationKind::ZString,
        operator: PauliWord::z_on(lattice.n_qubits(), support.iter().copied()),
        endpoints: degree.into_iter().filter(|&(_, d)| d % 2 == 1).map(|(v, _)| v).collect(),
        support,
    })
}

/// X on every edge whose dual face belongs to a connected surface. Two dual
/// faces are adjacent when their edges lie in a common plaquette.
pub fn x_membrane(lattice: &CodeLattice, surface: &[usize]) -> Result<ExcitationProcess> {
    let support = check_edges(lattice, surface)?;
    let local: BTreeMap<usize, usize> = support.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let mut uf = UnionFind::new(support.len());
    let mut count: BTreeMap<usize, usize> = BTreeMap::new();
    for &q in &support {
        for &g in lattice.incident_generators(q) {
            let gen = lattice.generator(g);
            if gen.kind != GeneratorKind::Plaquette {
                continue;
            }
            *count.entry(g).or_default() += 1;
            for &p in &gen.support {
                if let Some(&j) = local.get(&p) {
                    uf.union(local[&q], j);
                }
            }
        }
    }
    if (0..support.len()).any(|i| uf.find(i) != 0) {
        return Err(Error::Disconnected("membrane dual faces are not connected".into()));
    }
    Ok(ExcitationProcess {
        kind: ExcitationKind::XMembrane,
        operator: PauliWord::x_on(lattice.n_qubits(), support.iter().copied()),
        endpoints: count
            .into_iter()
            .filter(|&(_, c)| c % 2 == 1)
            .map(|(g, _)| lattice.generator(g).anchor)
            .collect(),
        support,
    })
}

fn check_n(expected: usize, p: &PauliWord) -> Result<()> {
    if p.n_qubits() != expected {
        return Err(Error::Dimension {
            expected,
            got: p.n_qubits(),
        });
    }
    Ok(())
}

/// Indices of the state's generators that anticommute with `p`.
pub fn syndrome(state: &StabilizerState, p: &PauliWord) -> Result<Vec<usize>> {
    check_n(state.n_qubits(), p)?;
    Ok(state
        .generators()
        .iter()
        .enumerate()
        .filter(|(_, g)| g.anticommutes(p))
        .map(|(i, _)| i)
        .collect())
}

/// Lattice star and plaquette ids (the full over-complete list) that
/// anticommute with `p`.
pub fn code_syndrome(lattice: &CodeLattice, p: &PauliWord) -> Result<Vec<usize>> {
    check_n(lattice.n_qubits(), p)?;
    let mut out = BTreeSet::new();
    for q in p.support().iter_ones() {
        for &g in lattice.incident_generators(q) {
            if lattice.generator(g).word.anticommutes(p) {
                out.insert(g);
            }
        }
    }
    Ok(out.into_iter().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Deformation {
    pub equivalent: bool,
    /// `u|ψ⟩ = sign · u_def|ψ⟩` when equivalent.
    pub sign: Option<i8>,
}

/// Whether `u_def⁻¹ u` lies in the code stabilizer group (the state's
/// generators without the appended logical representatives), and the
/// resulting relative sign on the state.
pub fn is_deformable_equivalent(state: &StabilizerState, u: &PauliWord, u_def: &PauliWord) -> Result<Deformation> {
    check_n(state.n_qubits(), u)?;
    check_n(state.n_qubits(), u_def)?;
    let w = u_def.inverse().multiply(u)?;
    let code = &state.generators()[..state.n_qubits() - state.n_logical()];
    let mut basis = EchelonBasis::new(2 * state.n_qubits());
    for g in code {
        basis.insert(&g.symplectic_row());
    }
    let Some(ids) = basis.solve(&w.symplectic_row()) else {
        return Ok(Deformation {
            equivalent: false,
            sign: None,
        });
    };
    let mut g = PauliWord::identity(state.n_qubits());
    for i in ids {
        g.mul_assign(&code[i]);
    }
    Ok(Deformation {
        equivalent: true,
        sign: Some(if g.is_negative() == w.is_negative() { 1 } else { -1 }),
    })
}

/// `‖(UV − VU)|ψ⟩‖` for Pauli `u` and a process `v` that acts trivially on the
/// state: 0 when they commute and 2 when they anticommute.
pub fn monodromy_norm(state: &StabilizerState, u: &PauliWord, v: &PauliWord) -> Result<f64> {
    check_n(state.n_qubits(), u)?;
    let violated = syndrome(state, v)?;
    if !violated.is_empty() {
        return Err(Error::Contract(format!(
            "v does not act trivially on the state ({} generators violated)",
            violated.len()
        )));
    }
    Ok(if u.anticommutes(v) { 2.0 } else { 0.0 })
}

/// True if `u` acts on `x` only through the restriction of the stabilizer
/// group, so that `uρu†` and `ρ` have the same marginal on `x`.
pub fn marginal_unchanged(state: &StabilizerState, u: &PauliWord, x: &Region) -> Result<bool> {
    check_n(state.n_qubits(), u)?;
    if x.n_total() != state.n_qubits() {
        return Err(Error::Dimension {
            expected: state.n_qubits(),
            got: x.n_total(),
        });
    }
    let pos = x.qubits();
    let row = |w: &PauliWord| {
        let r = PauliWord::from_bits(w.x_bits().gather(&pos), w.z_bits().gather(&pos), false)
            .expect("gathered halves have equal length");
        r.symplectic_row()
    };
    let mut basis = EchelonBasis::new(2 * pos.len());
    for g in state.generators() {
        if g.support().intersects(x.mask()) {
            basis.insert(&row(g));
        }
    }
    Ok(basis.contains(&row(u)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CondensationKind {
    Point,
    Line,
}

/// Doubled coordinates of a generator's centre.
fn centre2(lattice: &CodeLattice, id: usize) -> Coord {
    let g = lattice.generator(id);
    let mut c = [2 * g.anchor[0], 2 * g.anchor[1], 2 * g.anchor[2]];
    if let Some((a, b)) = g.plane {
        c[a] += 1;
        c[b] += 1;
    }
    c
}

/// The half-excitation used by [`condensation_check`]: a straight Z-string
/// from the middle of `face` halfway into the bulk, or a rectangular
/// X-membrane standing on the face.
pub fn half_excitation(lattice: &CodeLattice, face: Face, kind: CondensationKind) -> Result<ExcitationProcess> {
    let spec = lattice.spec();
    let dim = spec.dimension();
    if face.axis >= dim || spec.is_periodic(face.axis) {
        return Err(Error::Geometry(format!("face {face} is not a physical boundary")));
    }
    let w = face.axis;
    let tangents: Vec<usize> = (0..dim).filter(|&a| a != w).collect();
    let ext = spec.extents();
    let l = ext[w] as i64;
    let depth = (l / 2).max(1);
    let mid = |a: usize| ext[a] as i64 / 2;
    let layer = |k: i64| if face.high { l - k } else { k };
    let mut edges = Vec::new();
    match kind {
        CondensationKind::Point => {
            for k in 0..depth {
                let mut base = [0; 3];
                for &t in &tangents {
                    base[t] = mid(t);
                }
                // Edge k steps in from the face along the normal.
                base[w] = if face.high { l - 1 - k } else { k };
                edges.extend(lattice.edge_index(base, w));
            }
        }
        CondensationKind::Line => {
            if dim != 3 {
                return Err(Error::Geometry("line condensation needs a 3D lattice".into()));
            }
            let (u, v) = (tangents[0], tangents[1]);
            for k in 0..=depth {
                for dv in -1..1 {
                    let mut base = [0; 3];
                    base[u] = mid(u);
                    base[v] = mid(v) + dv;
                    base[w] = layer(k);
                    edges.extend(lattice.edge_index(base, u));
                }
            }
        }
    }
    match kind {
        CondensationKind::Point => z_string(lattice, &edges),
        CondensationKind::Line => x_membrane(lattice, &edges),
    }
}

/// True if the half-excitation terminating on `face` leaves no violated
/// generator beyond its face-side extremity, i.e. the face absorbs it.
pub fn condensation_check(state: &StabilizerState, face: Face, kind: CondensationKind) -> Result<bool> {
    let lattice = state.require_lattice()?;
    let ex = half_excitation(lattice, face, kind)?;
    let w = face.axis;
    let l2 = 2 * lattice.spec().extents()[w] as i64;
    let inward = |c: Coord| if face.high { l2 - c[w] } else { c[w] };
    let extremity = ex
        .support
        .iter()
        .map(|&q| inward(lattice.midpoint2(q)))
        .min()
        .expect("non-empty support");
    let violated = code_syndrome(lattice, &ex.operator)?;
    Ok(violated.iter().all(|&g| inward(centre2(lattice, g)) >= extremity))
}

/// Support of `p` as a region.
pub fn support_region(p: &PauliWord) -> Region {
    Region::from_mask(p.support()).with_label("support")
}

/// Edges of a lattice path given by its vertex coordinates. Consecutive
/// vertices must be nearest neighbours.
pub fn path_edges(lattice: &CodeLattice, vertices: &[Coord]) -> Result<Vec<usize>> {
    let spec = lattice.spec();
    let mut out = Vec::new();
    for pair in vertices.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let mut found = None;
        for axis in 0..spec.dimension() {
            for (lo, hi) in [(a, b), (b, a)] {
                let mut next = lo;
                next[axis] += 1;
                if spec.normalize(next) == spec.normalize(hi) && spec.normalize(next).is_some() {
                    found = found.or(lattice.edge_index(lo, axis));
                }
            }
        }
        out.push(found.ok_or_else(|| Error::Geometry(format!("no edge between {a:?} and {b:?}")))?);
    }
    Ok(out)
}
