//! Kernelization parameterized by the number of red edges.
//!
//! Four reduction rules run round-robin in a fixed order until none applies:
//!
//! 1. A connected component that is a blue cycle is frozen. It is deleted
//!    when both orientations agree on it and otherwise the answer is no.
//! 2. A blue component with at least two cycles loses its blue vertices and
//!    all of its edges, and every red vertex of it receives a copy of the
//!    constant-size [gadget](GADGET_ARCS), which supplies blue in-weight two
//!    forever. The rule fires only when this strictly lowers `|V| + |E|`,
//!    so every application shrinks the instance and a component that is
//!    already a gadget is left alone.
//! 3. A blue vertex of degree one is deleted with its edge.
//! 4. A blue vertex of degree two whose two neighbours are distinct and
//!    non-adjacent is replaced by a single blue edge between the neighbours.
//!
//! Red edges are never removed, so the parameter is preserved. The
//! edge-reversal variant adapts rules 1 to 4 so that the target edge is
//! tracked and never contracted away.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{NclError, Result};
use crate::graph::{ConstraintGraph, Edge, EdgeId, Instance, Orientation, Query, VertexId, Weight};

/// Arcs of the gadget as `(tail, head)` over local vertices `0..5`, with
/// `5` standing for the attachment vertex. The first arc connects the
/// gadget to the attachment vertex; the other seven form a five-cycle on
/// `0..5` with chords `{1,3}` and `{2,4}`. Every gadget vertex and the
/// attachment vertex receive at least one of these arcs.
pub const GADGET_ARCS: [(usize, usize); 8] = [(0, 5), (0, 1), (1, 2), (3, 1), (4, 0), (4, 2), (3, 4), (2, 3)];

/// Number of vertices a gadget adds.
pub const GADGET_VERTICES: usize = 5;

/// Vertices plus edges a gadget adds.
pub const GADGET_SIZE: usize = GADGET_VERTICES + GADGET_ARCS.len();

/// Reduction rule recorded in a trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// Rule 1: a component that is a blue cycle.
    FrozenCycle,
    /// Rule 2: a blue component with at least two cycles.
    CyclicComponent,
    /// Rule 2 for a blue target edge whose far side is a tree: only the
    /// side holding the cycles is replaced.
    CyclicSide,
    /// Rule 2 for a blue target edge that the cycles can always reverse.
    FlexibleTarget,
    /// Rule 3: a pendant blue vertex.
    Pendant,
    /// Rule 4: a blue vertex on a path of length two.
    Series,
    /// The target edge is a loop and can never be reversed.
    TargetLoop,
}

/// One rule application. Ids refer to the working instance, in which
/// original edges keep their ids and new vertices and edges receive ids past
/// every id used before.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub rule: Rule,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decided: Option<bool>,
}

/// Where an edge of the reduced instance came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "edge")]
pub enum EdgeOrigin {
    /// Edge of the input instance with this id.
    Original(EdgeId),
    /// Edge created by rule 4.
    Contracted,
    /// Edge of an attached gadget.
    Gadget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelResult {
    /// The rules settled the instance.
    Decided { answer: bool, trace: Vec<TraceStep> },
    /// An equivalent instance with the same number of red edges.
    Reduced {
        instance: Instance,
        origin: Vec<EdgeOrigin>,
        trace: Vec<TraceStep>,
    },
}

impl KernelResult {
    pub fn trace(&self) -> &[TraceStep] {
        match self {
            KernelResult::Decided { trace, .. } | KernelResult::Reduced { trace, .. } => trace,
        }
    }
}

#[derive(Clone, Debug)]
struct WorkEdge {
    u: VertexId,
    v: VertexId,
    weight: Weight,
    ini: bool,
    tar: bool,
    origin: EdgeOrigin,
}

impl WorkEdge {
    fn is_loop(&self) -> bool {
        self.u == self.v
    }

    fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    fn head_ini(&self) -> VertexId {
        if self.ini {
            self.u
        } else {
            self.v
        }
    }

    fn head_tar(&self) -> VertexId {
        if self.tar {
            self.u
        } else {
            self.v
        }
    }
}

enum Step {
    Applied,
    Decided(bool),
    Nothing,
}

struct Component {
    vertices: Vec<VertexId>,
    edges: Vec<usize>,
}

struct Work {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<usize, WorkEdge>,
    next_vertex: VertexId,
    next_edge: usize,
    /// Working id of the target edge for the edge-reversal variant.
    target: Option<usize>,
    trace: Vec<TraceStep>,
}

impl Work {
    fn from_instance(instance: &Instance) -> Self {
        let g = &instance.graph;
        let tar = match &instance.query {
            Query::Configuration(t) => t.clone(),
            Query::Edge(_) => instance.initial.clone(),
        };
        let edges = g
            .edges()
            .iter()
            .enumerate()
            .map(|(id, e)| {
                (
                    id,
                    WorkEdge {
                        u: e.u,
                        v: e.v,
                        weight: e.weight,
                        ini: instance.initial.is_reversed(id),
                        tar: tar.is_reversed(id),
                        origin: EdgeOrigin::Original(id),
                    },
                )
            })
            .collect();
        Work {
            vertices: g.vertices().iter().copied().collect(),
            edges,
            next_vertex: g.next_vertex_id(),
            next_edge: g.edge_count(),
            target: match instance.query {
                Query::Edge(e) => Some(e),
                Query::Configuration(_) => None,
            },
            trace: Vec::new(),
        }
    }

    fn adjacency(&self) -> BTreeMap<VertexId, Vec<usize>> {
        let mut adj: BTreeMap<VertexId, Vec<usize>> = self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for (&id, e) in &self.edges {
            adj.get_mut(&e.u).expect("endpoint present").push(id);
            if !e.is_loop() {
                adj.get_mut(&e.v).expect("endpoint present").push(id);
            }
        }
        adj
    }

    fn degree(&self, adj: &BTreeMap<VertexId, Vec<usize>>, v: VertexId) -> usize {
        adj[&v]
            .iter()
            .map(|id| if self.edges[id].is_loop() { 2 } else { 1 })
            .sum()
    }

    fn is_blue_vertex(&self, adj: &BTreeMap<VertexId, Vec<usize>>, v: VertexId) -> bool {
        adj[&v].iter().all(|id| self.edges[id].weight.is_blue())
    }

    fn is_red_vertex(&self, adj: &BTreeMap<VertexId, Vec<usize>>, v: VertexId) -> bool {
        !self.is_blue_vertex(adj, v)
    }

    /// Connected components of `(V, {e : keep(e)})`, ordered by smallest
    /// vertex; every vertex belongs to exactly one of them.
    fn components(&self, adj: &BTreeMap<VertexId, Vec<usize>>, keep: impl Fn(&WorkEdge) -> bool) -> Vec<Component> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in &self.vertices {
            if !seen.insert(start) {
                continue;
            }
            let mut vertices = vec![start];
            let mut edges = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for &id in &adj[&x] {
                    let e = &self.edges[&id];
                    if !keep(e) {
                        continue;
                    }
                    edges.insert(id);
                    let y = e.other(x);
                    if seen.insert(y) {
                        vertices.push(y);
                        queue.push_back(y);
                    }
                }
            }
            vertices.sort_unstable();
            out.push(Component {
                vertices,
                edges: edges.into_iter().collect(),
            });
        }
        out
    }

    fn add_edge(
        &mut self,
        u: VertexId,
        v: VertexId,
        weight: Weight,
        ini: bool,
        tar: bool,
        origin: EdgeOrigin,
    ) -> usize {
        let id = self.next_edge;
        self.next_edge += 1;
        self.edges.insert(
            id,
            WorkEdge {
                u,
                v,
                weight,
                ini,
                tar,
                origin,
            },
        );
        id
    }

    fn attach_gadget(&mut self, attachment: VertexId) -> (Vec<VertexId>, Vec<usize>) {
        let local: Vec<VertexId> = (0..GADGET_VERTICES as VertexId).map(|i| self.next_vertex + i).collect();
        self.next_vertex += GADGET_VERTICES as VertexId;
        self.vertices.extend(&local);
        let name = |i: usize| if i == GADGET_VERTICES { attachment } else { local[i] };
        let edges = GADGET_ARCS
            .iter()
            .map(|&(t, h)| self.add_edge(name(t), name(h), Weight::Blue, false, false, EdgeOrigin::Gadget))
            .collect();
        (local, edges)
    }

    fn remove_edges(&mut self, ids: &[usize]) {
        for id in ids {
            self.edges.remove(id);
        }
    }

    fn record(&mut self, rule: Rule, vertices: Vec<VertexId>, edges: Vec<usize>, decided: Option<bool>) {
        self.trace.push(TraceStep {
            rule,
            vertices,
            edges,
            decided,
        });
    }

    fn frozen_cycle(&mut self) -> Step {
        let adj = self.adjacency();
        for comp in self.components(&adj, |_| true) {
            let all_blue = comp.edges.iter().all(|id| self.edges[id].weight.is_blue());
            let two_regular = comp.vertices.iter().all(|&v| self.degree(&adj, v) == 2);
            if comp.edges.is_empty() || !all_blue || !two_regular || comp.edges.len() != comp.vertices.len() {
                continue;
            }
            let blocked = match self.target {
                Some(t) => comp.edges.contains(&t),
                None => comp.edges.iter().any(|id| self.edges[id].ini != self.edges[id].tar),
            };
            if blocked {
                self.record(Rule::FrozenCycle, comp.vertices, comp.edges, Some(false));
                return Step::Decided(false);
            }
            self.remove_edges(&comp.edges);
            for v in &comp.vertices {
                self.vertices.remove(v);
            }
            self.record(Rule::FrozenCycle, comp.vertices, comp.edges, None);
            return Step::Applied;
        }
        Step::Nothing
    }

    fn cyclic_component(&mut self) -> Step {
        let adj = self.adjacency();
        for comp in self.components(&adj, |e| e.weight.is_blue()) {
            if comp.edges.len() < comp.vertices.len() + 1 {
                continue;
            }
            if let Some(t) = self.target.filter(|t| comp.edges.contains(t)) {
                match self.cyclic_component_with_target(&adj, &comp, t) {
                    Step::Nothing => continue,
                    step => return step,
                }
            }
            let red: Vec<VertexId> = comp
                .vertices
                .iter()
                .copied()
                .filter(|&v| self.is_red_vertex(&adj, v))
                .collect();
            let removed = comp.vertices.len() - red.len() + comp.edges.len();
            if removed <= red.len() * GADGET_SIZE {
                continue;
            }
            self.remove_edges(&comp.edges);
            for v in &comp.vertices {
                if !red.contains(v) {
                    self.vertices.remove(v);
                }
            }
            let mut created = Vec::new();
            for &r in &red {
                created.extend(self.attach_gadget(r).1);
            }
            let mut edges = comp.edges;
            edges.extend(created);
            self.record(Rule::CyclicComponent, comp.vertices, edges, None);
            return Step::Applied;
        }
        Step::Nothing
    }

    /// Rule 2 when the blue target edge lies inside the component.
    fn cyclic_component_with_target(
        &mut self,
        adj: &BTreeMap<VertexId, Vec<usize>>,
        comp: &Component,
        target: usize,
    ) -> Step {
        let te = self.edges[&target].clone();
        let side_of = |start: VertexId| -> (Vec<VertexId>, Vec<usize>) {
            let mut seen = BTreeSet::from([start]);
            let mut queue = VecDeque::from([start]);
            let mut edges = BTreeSet::new();
            while let Some(x) = queue.pop_front() {
                for id in &adj[&x] {
                    let e = &self.edges[id];
                    if *id == target || !e.weight.is_blue() {
                        continue;
                    }
                    edges.insert(*id);
                    if seen.insert(e.other(x)) {
                        queue.push_back(e.other(x));
                    }
                }
            }
            (seen.into_iter().collect(), edges.into_iter().collect())
        };
        let (side_u, edges_u) = side_of(te.u);
        if side_u.contains(&te.v) {
            self.record(Rule::FlexibleTarget, comp.vertices.clone(), vec![target], Some(true));
            return Step::Decided(true);
        }
        let (side_v, edges_v) = side_of(te.v);
        let cyclic_u = edges_u.len() >= side_u.len();
        let cyclic_v = edges_v.len() >= side_v.len();
        if cyclic_u && cyclic_v {
            self.record(Rule::FlexibleTarget, comp.vertices.clone(), vec![target], Some(true));
            return Step::Decided(true);
        }
        let (s, side, side_edges) = if cyclic_u {
            (te.u, side_u, edges_u)
        } else {
            (te.v, side_v, edges_v)
        };
        if te.head_ini() == s {
            // The target points toward the cycles, which can always absorb it.
            self.record(Rule::FlexibleTarget, comp.vertices.clone(), vec![target], Some(true));
            return Step::Decided(true);
        }
        let anchors: Vec<VertexId> = side
            .iter()
            .copied()
            .filter(|&x| x == s || self.is_red_vertex(adj, x))
            .collect();
        if side.len() - anchors.len() + side_edges.len() <= anchors.len() * GADGET_SIZE {
            return Step::Nothing;
        }
        self.remove_edges(&side_edges);
        for x in &side {
            if !anchors.contains(x) {
                self.vertices.remove(x);
            }
        }
        let mut edges = side_edges;
        for &a in &anchors {
            edges.extend(self.attach_gadget(a).1);
        }
        self.record(Rule::CyclicSide, side, edges, None);
        Step::Applied
    }

    fn pendant(&mut self) -> Step {
        let adj = self.adjacency();
        for &v in &self.vertices {
            let inc = &adj[&v];
            if inc.len() != 1 || self.edges[&inc[0]].is_loop() || !self.is_blue_vertex(&adj, v) {
                continue;
            }
            let id = inc[0];
            if self.target == Some(id) {
                self.record(Rule::Pendant, vec![v], vec![id], Some(false));
                return Step::Decided(false);
            }
            self.edges.remove(&id);
            self.vertices.remove(&v);
            self.record(Rule::Pendant, vec![v], vec![id], None);
            return Step::Applied;
        }
        Step::Nothing
    }

    fn series(&mut self) -> Step {
        let adj = self.adjacency();
        let adjacent = |a: VertexId, b: VertexId| adj[&a].iter().any(|id| self.edges[id].other(a) == b);
        let found = self.vertices.iter().copied().find_map(|v| {
            let inc = &adj[&v];
            if inc.len() != 2 || !self.is_blue_vertex(&adj, v) || self.degree(&adj, v) != 2 {
                return None;
            }
            if self.target.is_some_and(|t| inc.contains(&t)) {
                return None;
            }
            let (e1, e2) = (inc[0], inc[1]);
            let u = self.edges[&e1].other(v);
            let w = self.edges[&e2].other(v);
            if u == w || adjacent(u, w) {
                return None;
            }
            Some((v, e1, e2, u, w))
        });
        let Some((v, e1, e2, u, w)) = found else {
            return Step::Nothing;
        };
        // The new edge is stored as (u, w); it points to w exactly when the
        // old arc between u and v pointed to v.
        let first = &self.edges[&e1];
        let ini = first.head_ini() != v;
        let tar = first.head_tar() != v;
        self.edges.remove(&e1);
        self.edges.remove(&e2);
        self.vertices.remove(&v);
        let new_id = self.add_edge(u, w, Weight::Blue, ini, tar, EdgeOrigin::Contracted);
        self.record(Rule::Series, vec![u, v, w], vec![e1, e2, new_id], None);
        Step::Applied
    }

    fn run(&mut self) -> Option<bool> {
        if let Some(t) = self.target {
            if self.edges[&t].is_loop() {
                self.record(Rule::TargetLoop, vec![self.edges[&t].u], vec![t], Some(false));
                return Some(false);
            }
        }
        loop {
            let mut changed = false;
            for rule in 0..4 {
                loop {
                    let step = match rule {
                        0 => self.frozen_cycle(),
                        1 => self.cyclic_component(),
                        2 => self.pendant(),
                        _ => self.series(),
                    };
                    match step {
                        Step::Applied => changed = true,
                        Step::Decided(answer) => return Some(answer),
                        Step::Nothing => break,
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if self.edges.is_empty() {
            return Some(true);
        }
        None
    }

    fn into_result(mut self, answer: Option<bool>, edge_query: bool) -> Result<KernelResult> {
        let trace = std::mem::take(&mut self.trace);
        if let Some(answer) = answer {
            return Ok(KernelResult::Decided { answer, trace });
        }
        let ids: Vec<usize> = self.edges.keys().copied().collect();
        let edges: Vec<Edge> = self.edges.values().map(|e| Edge::new(e.u, e.v, e.weight)).collect();
        let graph = ConstraintGraph::new(self.vertices.iter().copied().collect(), edges)?;
        let ini: Vec<bool> = self.edges.values().map(|e| e.ini).collect();
        let tar: Vec<bool> = self.edges.values().map(|e| e.tar).collect();
        let query = if edge_query {
            let t = self.target.expect("edge query keeps its target");
            Query::Edge(ids.binary_search(&t).map_err(|_| NclError::MissingEdge(t))?)
        } else {
            Query::Configuration(Orientation::from_flags(&tar))
        };
        let origin = self.edges.values().map(|e| e.origin).collect();
        let instance = Instance::new(graph, Orientation::from_flags(&ini), query)?;
        Ok(KernelResult::Reduced {
            instance,
            origin,
            trace,
        })
    }
}

/// Applies the four rules exhaustively to a configuration-to-configuration
/// instance.
pub fn kernelize_c2c(instance: &Instance) -> Result<KernelResult> {
    if !matches!(instance.query, Query::Configuration(_)) {
        return Err(NclError::Input {
            path: "$.problem".into(),
            message: "expected a configuration query".into(),
        });
    }
    let mut work = Work::from_instance(instance);
    let answer = work.run();
    work.into_result(answer, false)
}

/// Applies the edge-reversal variant of the rules.
pub fn kernelize_c2e(instance: &Instance) -> Result<KernelResult> {
    if !matches!(instance.query, Query::Edge(_)) {
        return Err(NclError::Input {
            path: "$.problem".into(),
            message: "expected an edge query".into(),
        });
    }
    let mut work = Work::from_instance(instance);
    let answer = work.run();
    work.into_result(answer, true)
}

/// Dispatches on the query kind.
pub fn kernelize(instance: &Instance) -> Result<KernelResult> {
    match instance.query {
        Query::Configuration(_) => kernelize_c2c(instance),
        Query::Edge(_) => kernelize_c2e(instance),
    }
}

/// The gadget together with its attachment vertex `5` as a standalone
/// graph, and the gadget's stored orientation.
pub fn gadget_example() -> (ConstraintGraph, Orientation) {
    let edges: Vec<Edge> = GADGET_ARCS
        .iter()
        .map(|&(t, h)| Edge::new(t as u32, h as u32, Weight::Blue))
        .collect();
    let graph = ConstraintGraph::new((0..6).collect(), edges).expect("gadget is well formed");
    let orientation = Orientation::forward(graph.edge_count());
    (graph, orientation)
}
