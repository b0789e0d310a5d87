//! Constraint graphs, orientations and the NCL move relation.
//!
//! Edge ids are dense (`0..edge_count`). Vertex ids are arbitrary `u32`
//! values kept in ascending order. An [`Orientation`] stores one direction
//! bit per edge: a clear bit means the edge points from its `u` endpoint to
//! its `v` endpoint, a set bit means the reverse. Loops always keep a clear
//! bit, count their weight once toward their vertex and never move.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{NclError, Result};

pub type VertexId = u32;
pub type EdgeId = usize;

/// Every vertex must receive at least this much in-weight.
pub const MIN_IN_WEIGHT: u32 = 2;

/// Edge colour. Red edges weigh 1 and blue edges weigh 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Weight {
    Red,
    Blue,
}

impl Weight {
    pub fn value(self) -> u32 {
        match self {
            Weight::Red => 1,
            Weight::Blue => 2,
        }
    }

    pub fn from_value(value: u64) -> Option<Self> {
        match value {
            1 => Some(Weight::Red),
            2 => Some(Weight::Blue),
            _ => None,
        }
    }

    pub fn is_blue(self) -> bool {
        self == Weight::Blue
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: Weight,
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId, weight: Weight) -> Self {
        Edge { u, v, weight }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// Returns the endpoint opposite to `x`; for a loop this is `x` itself.
    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }
}

/// Local type of a vertex in an AND/OR constraint graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexKind {
    /// Degree three with exactly one blue incidence.
    And,
    /// Degree three with three blue incidences.
    Or,
    Other,
}

/// Undirected multigraph with loops whose edges are coloured red or blue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintGraph {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    incidence: Vec<Vec<EdgeId>>,
}

impl ConstraintGraph {
    /// Builds a graph; vertex ids are sorted and must be unique, and every
    /// edge endpoint must be one of them.
    pub fn new(mut vertices: Vec<VertexId>, edges: Vec<Edge>) -> Result<Self> {
        vertices.sort_unstable();
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(NclError::DuplicateVertex(w[0]));
        }
        let mut incidence = vec![Vec::new(); vertices.len()];
        for (id, e) in edges.iter().enumerate() {
            let iu = vertices
                .binary_search(&e.u)
                .map_err(|_| NclError::UnknownVertex { edge: id, vertex: e.u })?;
            let iv = vertices
                .binary_search(&e.v)
                .map_err(|_| NclError::UnknownVertex { edge: id, vertex: e.v })?;
            incidence[iu].push(id);
            if iv != iu {
                incidence[iv].push(id);
            }
        }
        Ok(ConstraintGraph {
            vertices,
            edges,
            incidence,
        })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Position of `v` in the ascending vertex list.
    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.index_of(v).is_some()
    }

    /// Edges incident to `v` in ascending id order; a loop is listed once.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        match self.index_of(v) {
            Some(i) => &self.incidence[i],
            None => &[],
        }
    }

    /// Degree of `v`, where a loop contributes two.
    pub fn degree(&self, v: VertexId) -> usize {
        self.incident(v)
            .iter()
            .map(|&e| if self.edges[e].is_loop() { 2 } else { 1 })
            .sum()
    }

    /// Number of blue edge ends at `v`, where a blue loop contributes two.
    pub fn blue_incidences(&self, v: VertexId) -> usize {
        self.incident(v)
            .iter()
            .filter(|&&e| self.edges[e].weight.is_blue())
            .map(|&e| if self.edges[e].is_loop() { 2 } else { 1 })
            .sum()
    }

    pub fn count_weight(&self, weight: Weight) -> usize {
        self.edges.iter().filter(|e| e.weight == weight).count()
    }

    pub fn non_loop_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| !e.is_loop()).count()
    }

    /// Tail and head of edge `id` under `orientation`.
    pub fn arc(&self, orientation: &Orientation, id: EdgeId) -> (VertexId, VertexId) {
        let e = &self.edges[id];
        if orientation.is_reversed(id) {
            (e.v, e.u)
        } else {
            (e.u, e.v)
        }
    }

    pub fn head(&self, orientation: &Orientation, id: EdgeId) -> VertexId {
        self.arc(orientation, id).1
    }

    /// In-weight of every vertex, indexed like [`Self::vertices`].
    pub fn in_weights(&self, orientation: &Orientation) -> Vec<u32> {
        let mut weights = vec![0u32; self.vertices.len()];
        for (id, e) in self.edges.iter().enumerate() {
            let head = self.head(orientation, id);
            let i = self.index_of(head).expect("edge endpoints are graph vertices");
            weights[i] += e.weight.value();
        }
        weights
    }

    pub fn in_weight(&self, orientation: &Orientation, v: VertexId) -> u32 {
        self.incident(v)
            .iter()
            .filter(|&&e| self.head(orientation, e) == v)
            .map(|&e| self.edges[e].weight.value())
            .sum()
    }

    /// True when every vertex has in-weight at least two.
    pub fn is_feasible(&self, orientation: &Orientation) -> bool {
        orientation.len() == self.edges.len() && self.in_weights(orientation).iter().all(|&w| w >= MIN_IN_WEIGHT)
    }

    /// Checks that `orientation` matches the edge count and keeps loops
    /// unreversed.
    pub fn check_orientation(&self, orientation: &Orientation) -> Result<()> {
        if orientation.len() != self.edges.len() {
            return Err(NclError::OrientationLength {
                expected: self.edges.len(),
                actual: orientation.len(),
            });
        }
        for (id, e) in self.edges.iter().enumerate() {
            if e.is_loop() && orientation.is_reversed(id) {
                return Err(NclError::LoopReversed(id));
            }
        }
        Ok(())
    }

    /// Non-loop edges whose reversal turns `orientation` into another
    /// feasible orientation, in ascending id order.
    pub fn legal_moves(&self, orientation: &Orientation) -> Vec<EdgeId> {
        let weights = self.in_weights(orientation);
        let deficient: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] < MIN_IN_WEIGHT).collect();
        let mut moves = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            if e.is_loop() {
                continue;
            }
            let (tail, head) = self.arc(orientation, id);
            let ti = self.index_of(tail).expect("edge endpoints are graph vertices");
            let hi = self.index_of(head).expect("edge endpoints are graph vertices");
            if weights[hi] < MIN_IN_WEIGHT + e.weight.value() {
                continue;
            }
            let tail_after = weights[ti] + e.weight.value();
            let others_ok = deficient.iter().all(|&i| i == ti && tail_after >= MIN_IN_WEIGHT);
            if others_ok {
                moves.push(id);
            }
        }
        moves
    }

    /// Checks that every orientation in `sequence` is feasible and that
    /// consecutive ones differ by the reversal of exactly one non-loop edge.
    pub fn validate_sequence(&self, sequence: &[Orientation]) -> Result<()> {
        for (index, orientation) in sequence.iter().enumerate() {
            self.check_orientation(orientation)
                .map_err(|err| NclError::InvalidSequence {
                    index,
                    reason: err.to_string(),
                })?;
            if !self.is_feasible(orientation) {
                return Err(NclError::InvalidSequence {
                    index,
                    reason: "orientation is not feasible".into(),
                });
            }
            if index > 0 {
                let changed = sequence[index - 1].difference(orientation);
                if changed.len() != 1 {
                    return Err(NclError::InvalidSequence {
                        index,
                        reason: format!("{} edges changed, expected exactly one", changed.len()),
                    });
                }
            }
        }
        Ok(())
    }

    /// Classifies every vertex, in ascending vertex order.
    pub fn classify_vertices(&self) -> Vec<(VertexId, VertexKind)> {
        self.vertices
            .iter()
            .map(|&v| {
                let kind = match (self.degree(v), self.blue_incidences(v)) {
                    (3, 1) => VertexKind::And,
                    (3, 3) => VertexKind::Or,
                    _ => VertexKind::Other,
                };
                (v, kind)
            })
            .collect()
    }

    pub fn kind_of(&self, v: VertexId) -> VertexKind {
        match (self.degree(v), self.blue_incidences(v)) {
            (3, 1) => VertexKind::And,
            (3, 3) => VertexKind::Or,
            _ => VertexKind::Other,
        }
    }

    /// True when every vertex is an AND or an OR vertex.
    pub fn is_and_or(&self) -> bool {
        self.classify_vertices().iter().all(|&(_, k)| k != VertexKind::Other)
    }

    /// Fresh vertex id above every existing one.
    pub fn next_vertex_id(&self) -> VertexId {
        self.vertices.last().map_or(0, |&v| v + 1)
    }
}

/// Direction bits for every edge of a graph. Orientations order
/// lexicographically by their bits in edge-id order, unreversed first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Orientation {
    words: Vec<u64>,
    len: usize,
}

impl Orientation {
    /// Every edge points from `u` to `v`.
    pub fn forward(len: usize) -> Self {
        Orientation {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_flags(flags: &[bool]) -> Self {
        let mut o = Orientation::forward(flags.len());
        for (i, &f) in flags.iter().enumerate() {
            o.set_reversed(i, f);
        }
        o
    }

    /// Builds the orientation whose edge `i` points into `heads[i]`.
    pub fn from_heads(graph: &ConstraintGraph, heads: &[VertexId]) -> Result<Self> {
        if heads.len() != graph.edge_count() {
            return Err(NclError::OrientationLength {
                expected: graph.edge_count(),
                actual: heads.len(),
            });
        }
        let mut o = Orientation::forward(heads.len());
        for (id, (&h, e)) in heads.iter().zip(graph.edges()).enumerate() {
            if h == e.u && !e.is_loop() {
                o.set_reversed(id, true);
            } else if h != e.v {
                return Err(NclError::MissingVertex(h));
            }
        }
        Ok(o)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_reversed(&self, id: EdgeId) -> bool {
        self.words[id / 64] >> (id % 64) & 1 == 1
    }

    pub fn set_reversed(&mut self, id: EdgeId, reversed: bool) {
        let mask = 1u64 << (id % 64);
        if reversed {
            self.words[id / 64] |= mask;
        } else {
            self.words[id / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, id: EdgeId) {
        self.words[id / 64] ^= 1u64 << (id % 64);
    }

    pub fn flipped(&self, id: EdgeId) -> Self {
        let mut o = self.clone();
        o.flip(id);
        o
    }

    /// Edge ids on which the two orientations disagree, ascending.
    pub fn difference(&self, other: &Orientation) -> Vec<EdgeId> {
        let n = self.len.max(other.len);
        (0..n)
            .filter(|&i| {
                let a = i < self.len && self.is_reversed(i);
                let b = i < other.len && other.is_reversed(i);
                a != b || i >= self.len || i >= other.len
            })
            .collect()
    }

    pub fn flags(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.is_reversed(i)).collect()
    }
}

impl Ord for Orientation {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let key = |o: &Orientation| o.words.iter().map(|w| w.reverse_bits()).collect::<Vec<_>>();
        key(self).cmp(&key(other)).then(self.len.cmp(&other.len))
    }
}

impl PartialOrd for Orientation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: String = (0..self.len)
            .map(|i| if self.is_reversed(i) { '1' } else { '0' })
            .collect();
        write!(f, "Orientation({bits})")
    }
}

/// What an instance asks about its initial orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    /// Configuration-to-configuration: reach this orientation.
    Configuration(Orientation),
    /// Configuration-to-edge: reach any orientation reversing this edge.
    Edge(EdgeId),
}

/// A reconfiguration instance: a graph, a feasible initial orientation and
/// a query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub graph: ConstraintGraph,
    pub initial: Orientation,
    pub query: Query,
}

impl Instance {
    /// Validates orientations and feasibility and returns the instance.
    pub fn new(graph: ConstraintGraph, initial: Orientation, query: Query) -> Result<Self> {
        graph.check_orientation(&initial)?;
        if !graph.is_feasible(&initial) {
            return Err(NclError::Infeasible("initial"));
        }
        match &query {
            Query::Configuration(target) => {
                graph.check_orientation(target)?;
                if !graph.is_feasible(target) {
                    return Err(NclError::Infeasible("target"));
                }
            }
            Query::Edge(e) => {
                if *e >= graph.edge_count() {
                    return Err(NclError::MissingEdge(*e));
                }
            }
        }
        Ok(Instance { graph, initial, query })
    }

    /// True when `orientation` answers the query.
    pub fn is_goal(&self, orientation: &Orientation) -> bool {
        match &self.query {
            Query::Configuration(target) => orientation == target,
            Query::Edge(e) => orientation.is_reversed(*e) != self.initial.is_reversed(*e),
        }
    }

    /// Checks that `witness` starts at the initial orientation, is a valid
    /// move sequence and ends at a goal orientation.
    pub fn check_witness(&self, witness: &[Orientation]) -> Result<()> {
        let first = witness.first().ok_or_else(|| NclError::InvalidSequence {
            index: 0,
            reason: "witness is empty".into(),
        })?;
        if first != &self.initial {
            return Err(NclError::InvalidSequence {
                index: 0,
                reason: "witness does not start at the initial orientation".into(),
            });
        }
        self.graph.validate_sequence(witness)?;
        let last = witness.last().expect("witness is non-empty");
        if !self.is_goal(last) {
            return Err(NclError::InvalidSequence {
                index: witness.len() - 1,
                reason: "witness does not end at a goal orientation".into(),
            });
        }
        Ok(())
    }
}

/// Answer of a decision procedure, with an optional move sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub answer: bool,
    pub witness: Option<Vec<Orientation>>,
}

impl Verdict {
    pub fn no() -> Self {
        Verdict {
            answer: false,
            witness: None,
        }
    }

    pub fn yes(witness: Option<Vec<Orientation>>) -> Self {
        Verdict { answer: true, witness }
    }
}

/// Appends `tail` to `path`, dropping the first element of `tail` when it
/// repeats the last element of `path`.
pub(crate) fn extend_path(path: &mut Vec<Orientation>, tail: Vec<Orientation>) {
    let mut it = tail.into_iter().peekable();
    if let (Some(last), Some(first)) = (path.last(), it.peek()) {
        if last == first {
            it.next();
        }
    }
    path.extend(it);
}
