//! Restriction graphs of cut stars and cut plaquettes, and the four reduction
//! rules (circuit, loose end, loop, extended circuit).
//!
//! Every rule is carried out as a substitution on the restricted words held
//! by the vertices and edges, so each step can be audited against the
//! symplectic pair count of the words that remain.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::entropy::fattal_pairs;
use crate::error::{Error, Result};
use crate::lattice::{CodeLattice, Coord};
use crate::pauli::{Bits, PauliWord};
use crate::region::{cut_structure_for, Region, UnionFind};

/// A cut star and its current word (a product of restricted stars).
#[derive(Clone, Debug)]
pub struct GraphVertex {
    pub star: usize,
    pub anchor: Coord,
    pub word: PauliWord,
    /// Lattice generators whose restrictions multiply to `word`.
    pub combo: Bits,
}

/// A cut plaquette joining one or two vertices.
#[derive(Clone, Debug)]
pub struct GraphEdge {
    pub plaquette: usize,
    pub ends: Vec<usize>,
    pub word: PauliWord,
    pub combo: Bits,
}

impl GraphEdge {
    pub fn is_dangling(&self) -> bool {
        self.ends.len() == 1
    }

    fn other_end(&self, v: usize) -> Option<usize> {
        self.ends.iter().copied().find(|&u| u != v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Circuit,
    ExtendedCircuit,
    LooseEnd,
    Loop,
    IsolatedVertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RuleApplication {
    pub rule: RuleKind,
    /// Number of edges in the series the rule was applied to.
    pub length: usize,
    pub ebits: usize,
}

#[derive(Clone, Debug)]
pub struct RestrictionGraph {
    vertices: Vec<Option<GraphVertex>>,
    edges: Vec<Option<GraphEdge>>,
    adjacency: Vec<Vec<usize>>,
    accumulated_ebits: usize,
    log: Vec<RuleApplication>,
}

/// Serializable snapshot of a graph's live vertices and edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphDump {
    pub vertices: Vec<(usize, Coord)>,
    pub edges: Vec<(usize, Vec<usize>)>,
    pub accumulated_ebits: usize,
}

fn not_live(what: &str, id: usize) -> Error {
    Error::RulePrecondition(format!("{what} {id} is not in the graph"))
}

impl RestrictionGraph {
    /// Builds a graph from explicit words. `ends` are derived from
    /// anticommutation, so callers only supply vertex and edge words.
    pub fn from_words(vertex_words: Vec<PauliWord>, edge_words: Vec<PauliWord>) -> Result<Self> {
        let total = vertex_words.len() + edge_words.len();
        let one_hot = |i: usize| Bits::from_indices(total, [i]);
        let vertices: Vec<Option<GraphVertex>> = vertex_words
            .into_iter()
            .enumerate()
            .map(|(i, word)| {
                Some(GraphVertex {
                    star: i,
                    anchor: [0; 3],
                    word,
                    combo: one_hot(i),
                })
            })
            .collect();
        let nv = vertices.len();
        let mut edges = Vec::new();
        for (j, word) in edge_words.into_iter().enumerate() {
            let ends: Vec<usize> = (0..nv)
                .filter(|&v| vertices[v].as_ref().expect("live").word.anticommutes(&word))
                .collect();
            edges.push(Some(GraphEdge {
                plaquette: nv + j,
                ends,
                word,
                combo: one_hot(nv + j),
            }));
        }
        Self::assemble(vertices, edges)
    }

    fn assemble(vertices: Vec<Option<GraphVertex>>, edges: Vec<Option<GraphEdge>>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (e, edge) in edges.iter().enumerate() {
            let edge = edge.as_ref().expect("fresh edges are live");
            match edge.ends.len() {
                1 | 2 => {}
                0 => return Err(Error::UnsupportedGeometry(format!("edge {e} meets no vertex"))),
                k => {
                    return Err(Error::UnsupportedGeometry(format!(
                        "edge {e} meets {k} vertices"
                    )))
                }
            }
            for &v in &edge.ends {
                adjacency[v].push(e);
            }
        }
        Ok(Self {
            vertices,
            edges,
            adjacency,
            accumulated_ebits: 0,
            log: Vec::new(),
        })
    }

    pub fn accumulated_ebits(&self) -> usize {
        self.accumulated_ebits
    }

    pub fn log(&self) -> &[RuleApplication] {
        &self.log
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(|&v| self.vertices[v].is_some())
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.edges[e].is_some())
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_ids().count()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_ids().count()
    }

    pub fn is_empty(&self) -> bool {
        self.n_vertices() == 0 && self.n_edges() == 0
    }

    pub fn vertex(&self, v: usize) -> Option<&GraphVertex> {
        self.vertices.get(v)?.as_ref()
    }

    pub fn edge(&self, e: usize) -> Option<&GraphEdge> {
        self.edges.get(e)?.as_ref()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency.get(v).map_or(0, Vec::len)
    }

    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn n_dangling(&self) -> usize {
        self.edge_ids().filter(|&e| self.edges[e].as_ref().unwrap().is_dangling()).count()
    }

    /// Live words, vertices first.
    pub fn words(&self) -> Vec<PauliWord> {
        let v = self.vertices.iter().flatten().map(|v| v.word.clone());
        let e = self.edges.iter().flatten().map(|e| e.word.clone());
        v.chain(e).collect()
    }

    /// Entanglement still carried by the live words.
    pub fn residual_entropy(&self) -> usize {
        fattal_pairs(self.words())
    }

    pub fn dump(&self) -> GraphDump {
        GraphDump {
            vertices: self
                .vertex_ids()
                .map(|v| (v, self.vertices[v].as_ref().unwrap().anchor))
                .collect(),
            edges: self
                .edge_ids()
                .map(|e| (e, self.edges[e].as_ref().unwrap().ends.clone()))
                .collect(),
            accumulated_ebits: self.accumulated_ebits,
        }
    }

    /// Checks that stored incidences match anticommutation of the words and
    /// that edges have one or two distinct ends.
    pub fn check_consistency(&self) -> Result<()> {
        for e in self.edge_ids() {
            let edge = self.edges[e].as_ref().unwrap();
            if edge.ends.is_empty() || edge.ends.len() > 2 {
                return Err(Error::Contract(format!("edge {e} has {} ends", edge.ends.len())));
            }
            if edge.ends.len() == 2 && edge.ends[0] == edge.ends[1] {
                return Err(Error::Contract(format!("edge {e} is a self-loop")));
            }
            for v in self.vertex_ids() {
                let anti = self.vertices[v].as_ref().unwrap().word.anticommutes(&edge.word);
                if anti != edge.ends.contains(&v) {
                    return Err(Error::Contract(format!(
                        "incidence of vertex {v} and edge {e} disagrees with their words"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Ebits harvested so far plus those still in the graph must equal
    /// `expected`.
    pub fn verify_soundness(&self, expected: usize) -> Result<()> {
        self.check_consistency()?;
        let total = self.accumulated_ebits + self.residual_entropy();
        if total != expected {
            return Err(Error::Contract(format!(
                "{} harvested + {} residual ebits != {expected}",
                self.accumulated_ebits,
                total - self.accumulated_ebits
            )));
        }
        Ok(())
    }

    fn live_edge(&self, e: usize) -> Result<&GraphEdge> {
        self.edge(e).ok_or_else(|| not_live("edge", e))
    }

    fn remove_edge(&mut self, e: usize) {
        let edge = self.edges[e].take().expect("removing a live edge");
        for v in edge.ends {
            self.adjacency[v].retain(|&x| x != e);
        }
    }

    fn remove_vertex(&mut self, v: usize) {
        debug_assert!(self.adjacency[v].is_empty());
        self.vertices[v] = None;
    }

    fn record(&mut self, rule: RuleKind, length: usize, ebits: usize) {
        self.accumulated_ebits += ebits;
        self.log.push(RuleApplication { rule, length, ebits });
    }

    fn check_distinct(&self, edges: &[usize]) -> Result<()> {
        for (i, &e) in edges.iter().enumerate() {
            self.live_edge(e)?;
            if edges[..i].contains(&e) {
                return Err(Error::RulePrecondition(format!("edge {e} repeats")));
            }
        }
        Ok(())
    }

    /// Vertices visited by a closed walk along `edges`, starting at the end
    /// of `edges[0]` that is not followed by `edges[1]`.
    fn closed_walk(&self, edges: &[usize]) -> Result<Vec<usize>> {
        let not_circuit = || Error::RulePrecondition("edges do not form a circuit".into());
        if edges.len() < 2 {
            return Err(not_circuit());
        }
        self.check_distinct(edges)?;
        if edges.iter().any(|&e| self.edges[e].as_ref().unwrap().ends.len() != 2) {
            return Err(not_circuit());
        }
        let first = &self.edges[edges[0]].as_ref().unwrap().ends;
        'start: for &s in first {
            let mut walk = vec![s];
            let mut cur = s;
            for &e in edges {
                let edge = self.edges[e].as_ref().unwrap();
                if !edge.ends.contains(&cur) {
                    continue 'start;
                }
                cur = edge.other_end(cur).expect("two distinct ends");
                walk.push(cur);
            }
            if cur == s {
                walk.pop();
                return Ok(walk);
            }
        }
        Err(not_circuit())
    }

    fn series_product(&self, edges: &[usize]) -> (PauliWord, Bits) {
        let first = self.edges[edges[0]].as_ref().unwrap();
        let mut word = first.word.clone();
        let mut combo = first.combo.clone();
        for &e in &edges[1..] {
            let edge = self.edges[e].as_ref().unwrap();
            word.mul_assign(&edge.word);
            combo.xor_assign(&edge.combo);
        }
        (word, combo)
    }

    /// Replaces edge `edges[remove]` by the product of the whole series, which
    /// commutes with every vertex, and drops it.
    fn substitute_and_drop(&mut self, edges: &[usize], remove: usize) -> Result<()> {
        let d = *edges
            .get(remove)
            .ok_or_else(|| Error::RulePrecondition(format!("no edge at position {remove}")))?;
        let (word, combo) = self.series_product(edges);
        if let Some(v) = self.vertex_ids().find(|&v| self.vertices[v].as_ref().unwrap().word.anticommutes(&word)) {
            return Err(Error::Contract(format!("series product anticommutes with vertex {v}")));
        }
        let edge = self.edges[d].as_mut().unwrap();
        edge.word = word;
        edge.combo = combo;
        self.remove_edge(d);
        Ok(())
    }

    /// Rule 1: removes `edges[remove]` from a circuit. No ebits change.
    pub fn apply_circuit_rule(&mut self, edges: &[usize], remove: usize) -> Result<()> {
        self.closed_walk(edges)?;
        self.substitute_and_drop(edges, remove)?;
        self.record(RuleKind::Circuit, edges.len(), 0);
        Ok(())
    }

    /// Rule 4: removes `edges[remove]` from a series whose first and last
    /// edges are dangling. No ebits change.
    pub fn apply_extended_circuit_rule(&mut self, edges: &[usize], remove: usize) -> Result<()> {
        let not_ext = || Error::RulePrecondition("edges do not form an extended circuit".into());
        if edges.len() < 2 {
            return Err(not_ext());
        }
        self.check_distinct(edges)?;
        let edge = |e: usize| self.edges[e].as_ref().unwrap();
        let (head, tail) = (edge(edges[0]), edge(edges[edges.len() - 1]));
        if !head.is_dangling() || !tail.is_dangling() {
            return Err(not_ext());
        }
        let mut cur = head.ends[0];
        for &e in &edges[1..edges.len() - 1] {
            let ed = edge(e);
            if ed.is_dangling() || !ed.ends.contains(&cur) {
                return Err(not_ext());
            }
            cur = ed.other_end(cur).unwrap();
        }
        if tail.ends[0] != cur {
            return Err(not_ext());
        }
        self.substitute_and_drop(edges, remove)?;
        self.record(RuleKind::ExtendedCircuit, edges.len(), 0);
        Ok(())
    }

    /// One loose-end step: `tip` has the single edge `e`. The pair is split
    /// off as one ebit after multiplying the neighbour (if any) by `tip`.
    fn harvest_tip(&mut self, tip: usize, e: usize) -> Option<usize> {
        let other = self.edges[e].as_ref().unwrap().other_end(tip);
        if let Some(u) = other {
            let (w, c) = {
                let t = self.vertices[tip].as_ref().unwrap();
                (t.word.clone(), t.combo.clone())
            };
            let nb = self.vertices[u].as_mut().unwrap();
            nb.word.mul_assign(&w);
            nb.combo.xor_assign(&c);
        }
        self.remove_edge(e);
        self.remove_vertex(tip);
        other
    }

    /// Rule 2: a loose end of `edges.len()` edges starting at vertex `tip`
    /// yields that many ebits. An empty series removes an isolated vertex.
    pub fn apply_loose_end_rule(&mut self, tip: usize, edges: &[usize]) -> Result<usize> {
        self.vertex(tip).ok_or_else(|| not_live("vertex", tip))?;
        if edges.is_empty() {
            if self.degree(tip) != 0 {
                return Err(Error::RulePrecondition(format!("vertex {tip} is not isolated")));
            }
            self.remove_vertex(tip);
            self.record(RuleKind::IsolatedVertex, 0, 0);
            return Ok(0);
        }
        self.check_distinct(edges)?;
        let not_loose = || Error::RulePrecondition("edges do not form a loose end".into());
        if self.degree(tip) != 1 {
            return Err(not_loose());
        }
        let mut cur = Some(tip);
        for (i, &e) in edges.iter().enumerate() {
            let v = cur.ok_or_else(not_loose)?;
            let edge = self.edges[e].as_ref().unwrap();
            if !edge.ends.contains(&v) || (i > 0 && self.degree(v) != 2) {
                return Err(not_loose());
            }
            cur = edge.other_end(v);
        }
        let mut v = tip;
        for &e in edges {
            match self.harvest_tip(v, e) {
                Some(u) => v = u,
                None => break,
            }
        }
        self.record(RuleKind::LooseEnd, edges.len(), edges.len());
        Ok(edges.len())
    }

    /// Rule 3: a loop of `x` edges whose vertices all have degree two yields
    /// `x − 1` ebits.
    pub fn apply_loop_rule(&mut self, edges: &[usize]) -> Result<usize> {
        let walk = self.closed_walk(edges)?;
        if walk.iter().any(|&v| self.degree(v) != 2) {
            return Err(Error::RulePrecondition("loop vertices must have degree two".into()));
        }
        let x = edges.len();
        // v1 ← product of all loop vertices, e1 ← product of all loop edges.
        // Both commute with everything and leave the graph.
        let v1 = walk[0];
        let (ew, ec) = self.series_product(edges);
        let mut vw = self.vertices[v1].as_ref().unwrap().word.clone();
        let mut vc = self.vertices[v1].as_ref().unwrap().combo.clone();
        for &v in &walk[1..] {
            let vert = self.vertices[v].as_ref().unwrap();
            vw.mul_assign(&vert.word);
            vc.xor_assign(&vert.combo);
        }
        {
            let e1 = self.edges[edges[0]].as_mut().unwrap();
            e1.word = ew;
            e1.combo = ec;
        }
        self.remove_edge(edges[0]);
        let last = edges[x - 1];
        self.edges[last].as_mut().unwrap().ends.retain(|&u| u != v1);
        self.adjacency[v1].retain(|&e| e != last);
        {
            let vert = self.vertices[v1].as_mut().unwrap();
            vert.word = vw;
            vert.combo = vc;
        }
        self.remove_vertex(v1);
        // What is left is a loose end of x − 1 edges from walk[1].
        let mut v = walk[1];
        for &e in &edges[1..] {
            match self.harvest_tip(v, e) {
                Some(u) => v = u,
                None => break,
            }
        }
        self.record(RuleKind::Loop, x, x - 1);
        Ok(x - 1)
    }
}

/// Graph of the cut stars and the cut plaquettes of the recipe generating set
/// (xz plaquettes only in the plane `y = xz_plane_y`), restricted to
/// `region`. Parallel edges are collapsed with the circuit rule.
///
/// Plaquettes meeting more than two cut stars are outside the supported
/// region families and give an unsupported-geometry error.
pub fn build_restriction_graph(lattice: &CodeLattice, region: &Region, xz_plane_y: i64) -> Result<RestrictionGraph> {
    if region.n_total() != lattice.n_qubits() {
        return Err(Error::Dimension {
            expected: lattice.n_qubits(),
            got: region.n_total(),
        });
    }
    let recipe = lattice.recipe_generating_set(xz_plane_y)?;
    let plaquettes = recipe.into_iter().filter(|&id| id >= lattice.n_stars());
    let cut = cut_structure_for(lattice, region, plaquettes);
    if let Some((i, e)) = cut.edges.iter().enumerate().find(|(_, e)| e.len() > 2) {
        return Err(Error::UnsupportedGeometry(format!(
            "plaquette {} anticommutes with {} restricted stars",
            cut.plaquettes[i],
            e.len()
        )));
    }
    let positions = region.qubits();
    let n_gen = lattice.generators().len();
    let restricted = |id: usize| {
        let w = &lattice.generator(id).word;
        PauliWord::from_bits(w.x_bits().gather(&positions), w.z_bits().gather(&positions), false)
            .expect("gathered halves have equal length")
    };
    let vertices = cut
        .stars
        .iter()
        .map(|&s| {
            Some(GraphVertex {
                star: s,
                anchor: lattice.generator(s).anchor,
                word: restricted(s),
                combo: Bits::from_indices(n_gen, [s]),
            })
        })
        .collect();
    let edges = cut
        .plaquettes
        .iter()
        .zip(&cut.edges)
        .map(|(&p, ends)| {
            Some(GraphEdge {
                plaquette: p,
                ends: ends.clone(),
                word: restricted(p),
                combo: Bits::from_indices(n_gen, [p]),
            })
        })
        .collect();
    let mut g = RestrictionGraph::assemble(vertices, edges)?;
    g.collapse_parallel_edges()?;
    Ok(g)
}

impl RestrictionGraph {
    /// Removes all but one edge of every set of parallel edges (including
    /// dangling edges on the same vertex) as 2-circuits.
    pub fn collapse_parallel_edges(&mut self) -> Result<()> {
        let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let ids: Vec<usize> = self.edge_ids().collect();
        for e in ids {
            let mut key = self.edges[e].as_ref().unwrap().ends.clone();
            key.sort_unstable();
            match seen.get(&key) {
                None => {
                    seen.insert(key, e);
                }
                Some(&keep) if key.len() == 2 => self.apply_circuit_rule(&[e, keep], 0)?,
                Some(&keep) => self.apply_extended_circuit_rule(&[e, keep], 0)?,
            }
        }
        Ok(())
    }
}

/// What to do next on a graph.
#[derive(Clone, Debug)]
enum Move {
    Isolated(usize),
    LooseEnd(usize, Vec<usize>),
    Loop(Vec<usize>),
    Circuit(Vec<usize>, usize),
    Extended(Vec<usize>, usize),
}

struct Component {
    vertices: Vec<usize>,
    edges: Vec<usize>,
    dangling: bool,
}

impl RestrictionGraph {
    fn components(&self) -> Vec<Component> {
        let nv = self.vertices.len();
        let mut uf = UnionFind::new(nv);
        for e in self.edge_ids() {
            let ends = &self.edges[e].as_ref().unwrap().ends;
            if ends.len() == 2 {
                uf.union(ends[0], ends[1]);
            }
        }
        let mut by_root: BTreeMap<usize, Component> = BTreeMap::new();
        for v in self.vertex_ids() {
            by_root
                .entry(uf.find(v))
                .or_insert_with(|| Component {
                    vertices: Vec::new(),
                    edges: Vec::new(),
                    dangling: false,
                })
                .vertices
                .push(v);
        }
        for e in self.edge_ids() {
            let edge = self.edges[e].as_ref().unwrap();
            let c = by_root.get_mut(&uf.find(edge.ends[0])).expect("edge ends are live");
            c.edges.push(e);
            c.dangling |= edge.is_dangling();
        }
        by_root.into_values().collect()
    }

    /// Maximal loose end starting at a degree-1 vertex.
    fn loose_end_from(&self, tip: usize, max_len: usize) -> Vec<usize> {
        let mut series = vec![self.adjacency[tip][0]];
        let mut prev = tip;
        while series.len() < max_len {
            let e = *series.last().unwrap();
            let Some(u) = self.edges[e].as_ref().unwrap().other_end(prev) else {
                break;
            };
            if self.degree(u) != 2 {
                break;
            }
            let next = self.adjacency[u].iter().copied().find(|&f| f != e).unwrap();
            series.push(next);
            prev = u;
        }
        series
    }

    /// A cycle through the virtual ground node joined to every dangling
    /// edge, closed by the first non-tree edge in `order` (one component).
    fn find_cycle(&self, order: &[usize]) -> Option<Move> {
        let ground = self.vertices.len();
        let mut uf = UnionFind::new(ground + 1);
        let mut tree: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        let ends_of = |e: usize| {
            let ends = &self.edges[e].as_ref().unwrap().ends;
            (ends[0], ends.get(1).copied().unwrap_or(ground))
        };
        for &e in order {
            let (a, b) = ends_of(e);
            if uf.find(a) == uf.find(b) {
                let mut path = tree_path(&tree, b, a)?;
                // Cycle as (edge, node it leads to), starting at a with edge e.
                let mut cycle = vec![(e, b)];
                cycle.append(&mut path);
                if let Some(pos) = cycle.iter().position(|&(_, n)| n == ground) {
                    cycle.rotate_left(pos + 1);
                    let series: Vec<usize> = cycle.iter().map(|&(e, _)| e).collect();
                    let at = series.iter().position(|&x| x == e).unwrap();
                    return Some(Move::Extended(series, at));
                }
                return Some(Move::Circuit(cycle.iter().map(|&(e, _)| e).collect(), 0));
            }
            uf.union(a, b);
            tree.entry(a).or_default().push((e, b));
            tree.entry(b).or_default().push((e, a));
        }
        None
    }

    fn moves(&self) -> Vec<Move> {
        let mut out = Vec::new();
        for v in self.vertex_ids() {
            match self.degree(v) {
                0 => out.push(Move::Isolated(v)),
                1 => out.push(Move::LooseEnd(v, self.loose_end_from(v, usize::MAX))),
                _ => {}
            }
        }
        for c in self.components() {
            // Cycle rank above one (closed) or above zero (dangling, with ground).
            let surplus = c.edges.len() > c.vertices.len();
            if surplus {
                if let Some(m) = self.find_cycle(&c.edges) {
                    out.push(m);
                }
            } else if !c.dangling && c.edges.len() == c.vertices.len() && c.vertices.iter().all(|&v| self.degree(v) == 2) {
                let walk = self.cycle_edges(c.vertices[0]);
                out.push(Move::Loop(walk));
            }
        }
        out
    }

    /// Edges of the simple cycle through `start`.
    fn cycle_edges(&self, start: usize) -> Vec<usize> {
        let mut series = vec![self.adjacency[start][0]];
        let mut cur = self.edges[series[0]].as_ref().unwrap().other_end(start).unwrap();
        while cur != start {
            let last = *series.last().unwrap();
            let next = self.adjacency[cur].iter().copied().find(|&f| f != last).unwrap();
            series.push(next);
            cur = self.edges[next].as_ref().unwrap().other_end(cur).unwrap();
        }
        series
    }

    fn apply(&mut self, m: Move) -> Result<()> {
        match m {
            Move::Isolated(v) => self.apply_loose_end_rule(v, &[]).map(drop),
            Move::LooseEnd(v, s) => self.apply_loose_end_rule(v, &s).map(drop),
            Move::Loop(s) => self.apply_loop_rule(&s).map(drop),
            Move::Circuit(s, r) => self.apply_circuit_rule(&s, r),
            Move::Extended(s, r) => self.apply_extended_circuit_rule(&s, r),
        }
    }
}

/// Path in a forest from `from` to `to` as (edge, next node) steps.
fn tree_path(tree: &BTreeMap<usize, Vec<(usize, usize)>>, from: usize, to: usize) -> Option<Vec<(usize, usize)>> {
    let mut prev: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::from([from]);
    let mut seen = std::collections::BTreeSet::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &(e, y) in tree.get(&x).into_iter().flatten() {
            if seen.insert(y) {
                prev.insert(y, (e, x));
                queue.push_back(y);
            }
        }
    }
    let mut steps = Vec::new();
    let mut cur = to;
    while cur != from {
        let &(e, p) = prev.get(&cur)?;
        steps.push((e, cur));
        cur = p;
    }
    steps.reverse();
    Some(steps)
}

#[derive(Clone, Debug)]
pub struct ReduceOutcome {
    pub ebits: usize,
    pub residual: RestrictionGraph,
    pub steps: usize,
}

impl ReduceOutcome {
    /// The ebit total, or an irreducible-graph error if anything is left.
    pub fn require_complete(&self) -> Result<usize> {
        if self.residual.is_empty() {
            Ok(self.ebits)
        } else {
            Err(Error::IrreducibleGraph {
                remaining_vertices: self.residual.n_vertices(),
                remaining_edges: self.residual.n_edges(),
            })
        }
    }
}

/// Deterministic reduction: isolated vertices, then loose ends, then cycle
/// removals with the circuit or extended-circuit rule, then loops. Circuit
/// removals stop once each closed component has a single cycle left, and
/// each component with dangling edges is a tree when its dangling edges are
/// joined to one extra node.
pub fn reduce(g: RestrictionGraph) -> ReduceOutcome {
    drive(g, None, None).expect("deterministic moves satisfy their preconditions")
}

/// Same rules, with the next move and the edge to remove picked at random.
pub fn reduce_randomized<R: Rng>(g: RestrictionGraph, rng: &mut R) -> ReduceOutcome {
    drive(g, Some(rng as &mut dyn rand::RngCore), None).expect("chosen moves satisfy their preconditions")
}

/// Reduction that re-checks the ebit accounting after every move.
pub fn reduce_verified(g: RestrictionGraph, expected: usize) -> Result<ReduceOutcome> {
    drive(g, None, Some(expected))
}

pub fn reduce_randomized_verified<R: Rng>(g: RestrictionGraph, rng: &mut R, expected: usize) -> Result<ReduceOutcome> {
    drive(g, Some(rng as &mut dyn rand::RngCore), Some(expected))
}

fn drive(mut g: RestrictionGraph, mut rng: Option<&mut dyn rand::RngCore>, expected: Option<usize>) -> Result<ReduceOutcome> {
    let mut steps = 0;
    if let Some(x) = expected {
        g.verify_soundness(x)?;
    }
    loop {
        let mut moves = g.moves();
        if moves.is_empty() {
            break;
        }
        let m = match rng.as_deref_mut() {
            None => {
                let rank = |m: &Move| match m {
                    Move::Isolated(_) => 0,
                    Move::LooseEnd(..) => 1,
                    Move::Circuit(..) | Move::Extended(..) => 2,
                    Move::Loop(_) => 3,
                };
                moves.sort_by_key(rank);
                moves.swap_remove(0)
            }
            Some(r) => randomize(&g, moves.swap_remove(r.gen_range(0..moves.len())), r),
        };
        g.apply(m)?;
        steps += 1;
        if let Some(x) = expected {
            g.verify_soundness(x)?;
        }
    }
    Ok(ReduceOutcome {
        ebits: g.accumulated_ebits(),
        residual: g,
        steps,
    })
}

fn randomize(g: &RestrictionGraph, m: Move, rng: &mut dyn rand::RngCore) -> Move {
    match m {
        Move::LooseEnd(v, s) => {
            let len = rng.gen_range(1..=s.len());
            Move::LooseEnd(v, s[..len].to_vec())
        }
        Move::Circuit(s, _) | Move::Extended(s, _) => {
            // Re-search the cycle with a shuffled edge order, and remove a
            // random edge of it.
            let comps = g.components();
            let c = comps.iter().find(|c| c.edges.contains(&s[0])).expect("edge is live");
            let mut order = c.edges.clone();
            order.shuffle(rng);
            match g.find_cycle(&order).expect("surplus component has a cycle") {
                Move::Circuit(s, _) => {
                    let r = rng.gen_range(0..s.len());
                    Move::Circuit(s, r)
                }
                Move::Extended(s, _) => {
                    let r = rng.gen_range(0..s.len());
                    Move::Extended(s, r)
                }
                _ => unreachable!(),
            }
        }
        Move::Loop(mut s) => {
            let r = rng.gen_range(0..s.len());
            s.rotate_left(r);
            Move::Loop(s)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::entropy_by_rank;
    use crate::lattice::{build_toric_code, Boundary, LatticeSpec};
    use crate::pauli::{rank_gf2, BitMatrix};
    use crate::region::{area_report, box_region, Box3};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// One qubit per incidence: vertex words are X and edge words Z on the
    /// incidences they take part in.
    fn abstract_graph(nv: usize, edges: &[&[usize]]) -> RestrictionGraph {
        let n: usize = edges.iter().map(|e| e.len()).sum();
        let mut vq = vec![Vec::new(); nv];
        let mut eq = vec![Vec::new(); edges.len()];
        let mut q = 0;
        for (j, e) in edges.iter().enumerate() {
            for &v in e.iter() {
                vq[v].push(q);
                eq[j].push(q);
                q += 1;
            }
        }
        let vw = vq.into_iter().map(|s| PauliWord::x_on(n, s)).collect();
        let ew = eq.into_iter().map(|s| PauliWord::z_on(n, s)).collect();
        RestrictionGraph::from_words(vw, ew).unwrap()
    }

    fn incidence_rank(nv: usize, edges: &[Vec<usize>]) -> usize {
        let rows = edges.iter().map(|e| Bits::from_indices(nv, e.iter().copied())).collect();
        rank_gf2(&BitMatrix::from_rows(nv, rows).unwrap())
    }

    #[test]
    fn circuit_rule() {
        let mut g = abstract_graph(2, &[&[0, 1], &[0, 1]]);
        g.apply_circuit_rule(&[0, 1], 0).unwrap();
        assert_eq!(g.n_edges(), 1);
        let mut sq = abstract_graph(4, &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]]);
        assert!(sq.apply_circuit_rule(&[0, 1, 2], 0).is_err());
        sq.apply_circuit_rule(&[1, 2, 3, 0], 2).unwrap();
        assert_eq!(sq.n_edges(), 3);
        assert_eq!(sq.accumulated_ebits(), 0);
        sq.verify_soundness(3).unwrap();
    }

    #[test]
    fn loose_end_rule() {
        let mut g = abstract_graph(2, &[&[0, 1]]);
        assert_eq!(g.apply_loose_end_rule(0, &[0]).unwrap(), 1);
        g.verify_soundness(1).unwrap();
        let mut path = abstract_graph(4, &[&[3, 2], &[2, 1], &[1, 0]]);
        assert!(path.apply_loose_end_rule(2, &[0]).is_err());
        assert_eq!(path.apply_loose_end_rule(3, &[0, 1, 2]).unwrap(), 3);
        assert_eq!(path.n_vertices(), 1);
        assert_eq!(path.apply_loose_end_rule(0, &[]).unwrap(), 0);
        assert!(path.is_empty());
        let mut single = abstract_graph(1, &[&[0]]);
        assert_eq!(single.apply_loose_end_rule(0, &[0]).unwrap(), 1);
        assert!(single.is_empty());
    }

    #[test]
    fn loop_rule() {
        let mut g = abstract_graph(4, &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]]);
        assert_eq!(g.apply_loop_rule(&[2, 3, 0, 1]).unwrap(), 3);
        assert!(g.is_empty());
        let mut tail = abstract_graph(4, &[&[0, 1], &[1, 2], &[2, 0], &[2, 3]]);
        assert!(tail.apply_loop_rule(&[0, 1, 2]).is_err());
    }

    #[test]
    fn extended_circuit_rule() {
        let mut g = abstract_graph(2, &[&[0], &[0, 1], &[1]]);
        g.apply_extended_circuit_rule(&[0, 1, 2], 1).unwrap();
        assert_eq!(g.n_edges(), 2);
        g.verify_soundness(2).unwrap();
        assert!(g.apply_extended_circuit_rule(&[0], 0).is_err());
        assert!(g.apply_extended_circuit_rule(&[0, 2], 0).is_err());
    }

    fn random_graph() -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
        (1usize..9).prop_flat_map(|nv| {
            let edge = proptest::collection::btree_set(0..nv, 1..=2.min(nv))
                .prop_map(|s| s.into_iter().collect::<Vec<_>>());
            (Just(nv), proptest::collection::vec(edge, 0..16))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn reduction_counts_incidence_rank((nv, edges) in random_graph(), seed in any::<u64>()) {
            let refs: Vec<&[usize]> = edges.iter().map(|e| e.as_slice()).collect();
            let expected = incidence_rank(nv, &edges);
            let g = abstract_graph(nv, &refs);
            prop_assert_eq!(g.residual_entropy(), expected);
            let det = reduce_verified(g.clone(), expected).unwrap();
            prop_assert_eq!(det.require_complete().unwrap(), expected);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rnd = reduce_randomized_verified(g, &mut rng, expected).unwrap();
            prop_assert_eq!(rnd.require_complete().unwrap(), expected);
        }
    }

    fn family(bottom: Option<Boundary>, side: i64) -> (CodeLattice, Region) {
        let spec = match bottom {
            None => LatticeSpec::torus_3d(10).unwrap(),
            Some(b) => LatticeSpec::slab_3d(10, 10, 8, b, Boundary::Smooth).unwrap(),
        };
        let l = build_toric_code(&spec).unwrap();
        let z0 = if bottom.is_some() { 0 } else { 2 };
        let r = box_region(&l, &Box3::cells([2, 2, z0], [2 + side, 2 + side, z0 + side]));
        (l, r)
    }

    #[test]
    fn ball_families() {
        for (bottom, topo) in [(None, 1), (Some(Boundary::Smooth), 1), (Some(Boundary::Rough), 0)] {
            for side in 2..=3 {
                let (l, r) = family(bottom, side);
                let g = build_restriction_graph(&l, &r, 9).unwrap();
                g.check_consistency().unwrap();
                let area = area_report(&l, &r).area;
                let expected = area - topo;
                let out = reduce_verified(g, expected).unwrap();
                assert_eq!(out.require_complete().unwrap(), expected, "{bottom:?} side {side}");
                let loops = out.residual.log().iter().filter(|a| a.rule == RuleKind::Loop).count();
                assert_eq!(loops, topo);
                // Same value from the full generator set restricted to r.
                let gens: Vec<PauliWord> = l.words();
                assert_eq!(entropy_by_rank(&gens, &r.qubits()), expected);
            }
        }
    }

    #[test]
    fn combos_reproduce_words() {
        let (l, r) = family(Some(Boundary::Rough), 2);
        let mut g = build_restriction_graph(&l, &r, 9).unwrap();
        for _ in 0..6 {
            let m = g.moves().swap_remove(0);
            g.apply(m).unwrap();
        }
        assert!(g.log().iter().any(|a| a.rule == RuleKind::LooseEnd));
        let positions = r.qubits();
        for v in g.vertex_ids() {
            let vert = g.vertex(v).unwrap();
            let mut w = PauliWord::identity(positions.len());
            for id in vert.combo.iter_ones() {
                let full = &l.generator(id).word;
                let packed = PauliWord::from_bits(full.x_bits().gather(&positions), full.z_bits().gather(&positions), false).unwrap();
                w.mul_assign(&packed);
            }
            assert_eq!(w.x_bits(), vert.word.x_bits());
            assert_eq!(w.z_bits(), vert.word.z_bits());
        }
    }

    #[test]
    fn randomized_orders_agree() {
        let (l, r) = family(Some(Boundary::Smooth), 3);
        let g = build_restriction_graph(&l, &r, 9).unwrap();
        let det = reduce(g.clone()).require_complete().unwrap();
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            assert_eq!(reduce_randomized(g.clone(), &mut rng).require_complete().unwrap(), det);
        }
    }

    #[test]
    fn hyperedges_are_unsupported() {
        // Two opposite edges of one plaquette: all four corner stars are cut
        // and the plaquette meets each of them once.
        let l = build_toric_code(&LatticeSpec::torus_3d(4).unwrap()).unwrap();
        let q = |base: Coord, axis: usize| l.edge_index(base, axis).unwrap();
        let r = Region::from_qubits(l.n_qubits(), [q([1, 1, 1], 0), q([1, 2, 1], 0)]).unwrap();
        assert!(matches!(build_restriction_graph(&l, &r, 0), Err(Error::UnsupportedGeometry(_))));
        let single = Region::from_qubits(l.n_qubits(), [0]).unwrap();
        assert!(build_restriction_graph(&l, &single, 0).is_ok());
    }
}
