//! AND/OR graphs reduced to binary constraint satisfaction reconfiguration.
//!
//! Every non-loop blue edge is first split in two by a fresh middle vertex,
//! which keeps the answer unchanged. In the split graph each OR vertex
//! becomes a variable whose value is the set of middle neighbours it points
//! at, and each edge at an AND vertex becomes a variable whose value is its
//! head. Binary constraints encode the in-weight condition at middle
//! vertices and AND vertices, so proper assignments correspond one to one
//! with feasible orientations of the split graph. Reachability is then
//! decided by breadth-first search over proper assignments, where a move
//! changes one variable.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use crate::error::{NclError, Result};
use crate::graph::{
    ConstraintGraph, Edge, EdgeId, Instance, Orientation, Query, Verdict, VertexId, VertexKind, Weight,
};

/// Default bound on the base-two logarithm of the product of domain sizes.
pub const DEFAULT_CAP_BITS: usize = 48;

/// The split graph and how it relates to the original graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    pub original: ConstraintGraph,
    pub graph: ConstraintGraph,
    /// Edges of the split graph that replace each original edge: two halves
    /// `(u, z)` and `(z, v)` for a split edge `(u, v)`, otherwise the edge
    /// itself.
    pub parts: Vec<Vec<EdgeId>>,
    /// Middle vertex of each original edge that was split.
    pub middle: Vec<Option<VertexId>>,
}

impl Subdivision {
    /// Splits every non-loop blue edge of an AND/OR graph.
    pub fn new(original: &ConstraintGraph) -> Result<Self> {
        if let Some((v, _)) = original
            .classify_vertices()
            .into_iter()
            .find(|&(_, k)| k == VertexKind::Other)
        {
            return Err(NclError::NotAndOr(format!(
                "vertex {v} is neither an AND nor an OR vertex"
            )));
        }
        let mut vertices = original.vertices().to_vec();
        let mut next = original.next_vertex_id();
        let mut edges = Vec::new();
        let mut parts = Vec::with_capacity(original.edge_count());
        let mut middle = Vec::with_capacity(original.edge_count());
        for e in original.edges() {
            if e.weight.is_blue() && !e.is_loop() {
                let z = next;
                next += 1;
                vertices.push(z);
                parts.push(vec![edges.len(), edges.len() + 1]);
                edges.push(Edge::new(e.u, z, Weight::Blue));
                edges.push(Edge::new(z, e.v, Weight::Blue));
                middle.push(Some(z));
            } else {
                parts.push(vec![edges.len()]);
                edges.push(*e);
                middle.push(None);
            }
        }
        let graph = ConstraintGraph::new(vertices, edges)?;
        Ok(Subdivision {
            original: original.clone(),
            graph,
            parts,
            middle,
        })
    }

    /// Orientation of the split graph in which both halves of a split edge
    /// follow the original direction.
    pub fn lift(&self, orientation: &Orientation) -> Orientation {
        let mut out = Orientation::forward(self.graph.edge_count());
        for (e, parts) in self.parts.iter().enumerate() {
            for &p in parts {
                out.set_reversed(p, orientation.is_reversed(e));
            }
        }
        out
    }

    /// Orientation of the original graph in which a split edge `(u, v)`
    /// points at `v` exactly when its second half does.
    pub fn project(&self, orientation: &Orientation) -> Orientation {
        let mut out = Orientation::forward(self.original.edge_count());
        for (e, parts) in self.parts.iter().enumerate() {
            out.set_reversed(
                e,
                orientation.is_reversed(*parts.last().expect("every edge has a part")),
            );
        }
        out
    }

    /// Edge of the split graph whose reversal stands for reversing original
    /// edge `e` from `initial`: the half at the current head.
    pub fn tracked_half(&self, e: EdgeId, initial: &Orientation) -> EdgeId {
        let parts = &self.parts[e];
        if parts.len() == 1 || !initial.is_reversed(e) {
            *parts.last().expect("every edge has a part")
        } else {
            parts[0]
        }
    }
}

/// Splits the instance's graph and lifts its orientations and query.
pub fn subdivide_blue(instance: &Instance) -> Result<(Instance, Subdivision)> {
    let sub = Subdivision::new(&instance.graph)?;
    let query = match &instance.query {
        Query::Configuration(t) => Query::Configuration(sub.lift(t)),
        Query::Edge(e) => Query::Edge(sub.tracked_half(*e, &instance.initial)),
    };
    let lifted = Instance::new(sub.graph.clone(), sub.lift(&instance.initial), query)?;
    Ok((lifted, sub))
}

/// What a variable stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "id")]
pub enum VariableKind {
    /// The edges at an OR vertex; a value lists the neighbours it points at.
    Or(VertexId),
    /// One edge at an AND vertex; a value names its head.
    Edge(EdgeId),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Variable {
    pub kind: VariableKind,
    /// Each value is a sorted vertex set.
    pub domain: Vec<Vec<VertexId>>,
}

/// Allowed value pairs, by domain index, for variables `x < y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub x: usize,
    pub y: usize,
    pub allowed: Vec<(u8, u8)>,
}

/// Either a target assignment, or a variable that must take one of the
/// listed values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BcsrQuery {
    Configuration(Vec<u8>),
    Values { variable: usize, values: Vec<u8> },
}

/// A binary constraint satisfaction reconfiguration instance. Assignments
/// store one domain index per variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BcsrInstance {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub initial: Vec<u8>,
    pub query: BcsrQuery,
}

impl BcsrInstance {
    /// Largest domain size.
    pub fn max_domain(&self) -> usize {
        self.variables.iter().map(|v| v.domain.len()).max().unwrap_or(0)
    }

    /// Number of variables with more than two values.
    pub fn non_boolean_count(&self) -> usize {
        self.variables.iter().filter(|v| v.domain.len() > 2).count()
    }

    /// True when every constraint holds.
    pub fn is_proper(&self, assignment: &[u8]) -> bool {
        assignment.len() == self.variables.len()
            && assignment
                .iter()
                .zip(&self.variables)
                .all(|(&a, v)| usize::from(a) < v.domain.len())
            && self
                .constraints
                .iter()
                .all(|c| c.allowed.contains(&(assignment[c.x], assignment[c.y])))
    }

    fn is_goal(&self, assignment: &[u8]) -> bool {
        match &self.query {
            BcsrQuery::Configuration(t) => assignment == t.as_slice(),
            BcsrQuery::Values { variable, values } => values.contains(&assignment[*variable]),
        }
    }

    fn check_cap(&self, cap_bits: usize) -> Result<()> {
        let mut bits = 0.0f64;
        for v in &self.variables {
            bits += (v.domain.len().max(1) as f64).log2();
        }
        if bits > cap_bits as f64 {
            return Err(NclError::CapExceeded {
                what: "bits of assignment space",
                actual: bits.ceil() as usize,
                cap: cap_bits,
            });
        }
        Ok(())
    }

    /// Number of proper assignments, by backtracking in variable order.
    pub fn count_proper(&self, cap_bits: usize) -> Result<u64> {
        self.check_cap(cap_bits)?;
        let tables = Tables::new(self);
        let mut assignment = vec![0u8; self.variables.len()];
        let mut count = 0u64;
        fn recurse(inst: &BcsrInstance, tables: &Tables, i: usize, assignment: &mut [u8], count: &mut u64) {
            if i == inst.variables.len() {
                *count += 1;
                return;
            }
            for a in 0..inst.variables[i].domain.len() as u8 {
                assignment[i] = a;
                let ok = tables.incident[i]
                    .iter()
                    .all(|&(c, other, x_side)| other > i || tables.allows(c, x_side, a, assignment[other]));
                if ok {
                    recurse(inst, tables, i + 1, assignment, count);
                }
            }
        }
        recurse(self, &tables, 0, &mut assignment, &mut count);
        Ok(count)
    }

    /// Shortest sequence of proper assignments from the initial one to a
    /// goal, changing one variable per step, or `None`.
    pub fn solve_bfs(&self, cap_bits: usize) -> Result<Option<Vec<Vec<u8>>>> {
        self.check_cap(cap_bits)?;
        if !self.is_proper(&self.initial) {
            return Err(NclError::Infeasible("initial assignment"));
        }
        let tables = Tables::new(self);
        let mut states = vec![self.initial.clone()];
        let mut parent = vec![usize::MAX];
        let mut seen: HashMap<Vec<u8>, usize> = HashMap::from([(self.initial.clone(), 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            if self.is_goal(&states[i]) {
                let mut path = Vec::new();
                let mut at = i;
                while at != usize::MAX {
                    path.push(states[at].clone());
                    at = parent[at];
                }
                path.reverse();
                return Ok(Some(path));
            }
            for x in 0..self.variables.len() {
                for a in 0..self.variables[x].domain.len() as u8 {
                    let current = &states[i];
                    if a == current[x] {
                        continue;
                    }
                    let ok = tables.incident[x]
                        .iter()
                        .all(|&(c, other, x_side)| tables.allows(c, x_side, a, current[other]));
                    if !ok {
                        continue;
                    }
                    let mut next = current.clone();
                    next[x] = a;
                    if !seen.contains_key(&next) {
                        seen.insert(next.clone(), states.len());
                        states.push(next);
                        parent.push(i);
                        queue.push_back(states.len() - 1);
                    }
                }
            }
        }
        Ok(None)
    }
}

/// Constraint lookups: per variable, the incident constraints as
/// `(constraint, other variable, variable is the x side)`, and per
/// constraint a bit matrix of allowed pairs.
struct Tables {
    incident: Vec<Vec<(usize, usize, bool)>>,
    matrix: Vec<[u8; 8]>,
}

impl Tables {
    fn new(inst: &BcsrInstance) -> Self {
        let mut incident = vec![Vec::new(); inst.variables.len()];
        let mut matrix = Vec::with_capacity(inst.constraints.len());
        for (k, c) in inst.constraints.iter().enumerate() {
            incident[c.x].push((k, c.y, true));
            incident[c.y].push((k, c.x, false));
            let mut m = [0u8; 8];
            for &(a, b) in &c.allowed {
                m[usize::from(a)] |= 1 << b;
            }
            matrix.push(m);
        }
        Tables { incident, matrix }
    }

    fn allows(&self, c: usize, x_side: bool, mine: u8, other: u8) -> bool {
        let (a, b) = if x_side { (mine, other) } else { (other, mine) };
        self.matrix[c][usize::from(a)] >> b & 1 == 1
    }
}

/// The reduction together with the maps needed to translate assignments
/// back into orientations of the split graph.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub bcsr: BcsrInstance,
    or_variable: BTreeMap<VertexId, usize>,
    edge_variable: BTreeMap<EdgeId, usize>,
}

impl Reduction {
    /// Variable of an OR vertex.
    pub fn or_variable(&self, v: VertexId) -> Option<usize> {
        self.or_variable.get(&v).copied()
    }

    /// Variable of an edge at an AND vertex.
    pub fn edge_variable(&self, e: EdgeId) -> Option<usize> {
        self.edge_variable.get(&e).copied()
    }

    /// Orientation of the split graph described by a proper assignment.
    pub fn decode(&self, graph: &ConstraintGraph, assignment: &[u8]) -> Orientation {
        let mut out = Orientation::forward(graph.edge_count());
        for (x, var) in self.bcsr.variables.iter().enumerate() {
            let value = &var.domain[usize::from(assignment[x])];
            match var.kind {
                VariableKind::Edge(e) => {
                    let edge = graph.edge(e);
                    out.set_reversed(e, !edge.is_loop() && value[0] == edge.u);
                }
                VariableKind::Or(v) => {
                    for &e in graph.incident(v) {
                        let edge = graph.edge(e);
                        if edge.is_loop() {
                            continue;
                        }
                        let z = edge.other(v);
                        let head = if value.contains(&z) { z } else { v };
                        out.set_reversed(e, head == edge.u);
                    }
                }
            }
        }
        out
    }

    /// Assignment describing an orientation of the split graph.
    pub fn encode(&self, graph: &ConstraintGraph, orientation: &Orientation) -> Vec<u8> {
        self.bcsr
            .variables
            .iter()
            .map(|var| {
                let value: Vec<VertexId> = match var.kind {
                    VariableKind::Edge(e) => vec![graph.head(orientation, e)],
                    VariableKind::Or(v) => {
                        let mut s: Vec<VertexId> = graph
                            .incident(v)
                            .iter()
                            .filter(|&&e| !graph.edge(e).is_loop() && graph.head(orientation, e) != v)
                            .map(|&e| graph.edge(e).other(v))
                            .collect();
                        s.sort_unstable();
                        s
                    }
                };
                var.domain
                    .iter()
                    .position(|d| *d == value)
                    .expect("feasible orientations encode into the domain") as u8
            })
            .collect()
    }

    /// Expands one assignment change into single edge reversals of the split
    /// graph. An OR change first turns the removed neighbours inward and
    /// then turns the added ones outward.
    fn expand(
        &self,
        graph: &ConstraintGraph,
        from: &[u8],
        to: &[u8],
        current: &mut Orientation,
        out: &mut Vec<Orientation>,
    ) {
        let Some(x) = (0..from.len()).find(|&x| from[x] != to[x]) else {
            return;
        };
        let var = &self.bcsr.variables[x];
        match var.kind {
            VariableKind::Edge(e) => {
                current.flip(e);
                out.push(current.clone());
            }
            VariableKind::Or(v) => {
                let old = &var.domain[usize::from(from[x])];
                let new = &var.domain[usize::from(to[x])];
                let removed = old.iter().filter(|z| !new.contains(z));
                let added = new.iter().filter(|z| !old.contains(z));
                for &z in removed.chain(added) {
                    let e = *graph
                        .incident(v)
                        .iter()
                        .find(|&&e| !graph.edge(e).is_loop() && graph.edge(e).other(v) == z)
                        .expect("domain values name neighbours");
                    current.flip(e);
                    out.push(current.clone());
                }
            }
        }
    }
}

fn add_constraint<F>(
    table: &mut BTreeMap<(usize, usize), Vec<(u8, u8)>>,
    variables: &[Variable],
    a: usize,
    b: usize,
    allowed: F,
) where
    F: Fn(&[VertexId], &[VertexId]) -> bool,
{
    let (x, y) = if a <= b { (a, b) } else { (b, a) };
    let mut pairs = Vec::new();
    for (i, dx) in variables[x].domain.iter().enumerate() {
        for (j, dy) in variables[y].domain.iter().enumerate() {
            let ok = if a <= b { allowed(dx, dy) } else { allowed(dy, dx) };
            if ok && (x != y || i == j) {
                pairs.push((i as u8, j as u8));
            }
        }
    }
    match table.get_mut(&(x, y)) {
        Some(existing) => existing.retain(|p| pairs.contains(p)),
        None => {
            table.insert((x, y), pairs);
        }
    }
}

/// Builds the constraint instance for a split AND/OR graph.
pub fn reduce_to_bcsr(instance: &Instance, sub: &Subdivision) -> Result<Reduction> {
    let graph = &sub.graph;
    let is_middle = |v: VertexId| !sub.original.contains_vertex(v);
    let kind = |v: VertexId| sub.original.kind_of(v);
    let mut variables = Vec::new();
    let mut or_variable = BTreeMap::new();
    let mut edge_variable = BTreeMap::new();
    for &v in sub.original.vertices() {
        if kind(v) != VertexKind::Or {
            continue;
        }
        let mut middles: Vec<VertexId> = graph
            .incident(v)
            .iter()
            .filter(|&&e| !graph.edge(e).is_loop())
            .map(|&e| graph.edge(e).other(v))
            .collect();
        middles.sort_unstable();
        if middles.iter().any(|&z| !is_middle(z)) {
            return Err(NclError::NotAndOr(format!(
                "OR vertex {v} has a neighbour that is not a middle vertex"
            )));
        }
        let domain = match middles.as_slice() {
            [z] => vec![vec![], vec![*z]],
            [a, b, c] => vec![
                vec![],
                vec![*a],
                vec![*b],
                vec![*c],
                vec![*a, *b],
                vec![*b, *c],
                vec![*a, *c],
            ],
            _ => {
                return Err(NclError::NotAndOr(format!(
                    "OR vertex {v} has {} middle neighbours",
                    middles.len()
                )))
            }
        };
        or_variable.insert(v, variables.len());
        variables.push(Variable {
            kind: VariableKind::Or(v),
            domain,
        });
    }
    for (e, edge) in graph.edges().iter().enumerate() {
        let at_and = [edge.u, edge.v]
            .iter()
            .any(|&x| !is_middle(x) && kind(x) == VertexKind::And);
        if !at_and {
            continue;
        }
        let mut domain = vec![vec![edge.u], vec![edge.v]];
        domain.dedup();
        edge_variable.insert(e, variables.len());
        variables.push(Variable {
            kind: VariableKind::Edge(e),
            domain,
        });
    }
    let mut table: BTreeMap<(usize, usize), Vec<(u8, u8)>> = BTreeMap::new();
    for &z in graph.vertices().iter().filter(|&&z| is_middle(z)) {
        let sides: Vec<usize> = graph
            .incident(z)
            .iter()
            .map(|&e| {
                let other = graph.edge(e).other(z);
                match or_variable.get(&other) {
                    Some(&x) => x,
                    None => edge_variable[&e],
                }
            })
            .collect();
        add_constraint(&mut table, &variables, sides[0], sides[1], |s1, s2| {
            s1.contains(&z) || s2.contains(&z)
        });
    }
    for &v in sub.original.vertices() {
        if kind(v) != VertexKind::And {
            continue;
        }
        let incident = graph.incident(v);
        let blue = *incident
            .iter()
            .find(|&&e| graph.edge(e).weight.is_blue())
            .expect("AND vertices have a blue edge");
        let reds: Vec<EdgeId> = incident
            .iter()
            .copied()
            .filter(|&e| !graph.edge(e).weight.is_blue())
            .collect();
        let xb = edge_variable[&blue];
        match reds.as_slice() {
            [lp] if graph.edge(*lp).is_loop() => {
                add_constraint(&mut table, &variables, edge_variable[lp], xb, |_, s3| s3.contains(&v));
            }
            [r1, r2] => {
                for r in [r1, r2] {
                    add_constraint(&mut table, &variables, edge_variable[r], xb, |s, s3| {
                        s.contains(&v) || s3.contains(&v)
                    });
                }
            }
            _ => {
                return Err(NclError::NotAndOr(format!(
                    "AND vertex {v} does not have two red incidences"
                )))
            }
        }
    }
    let constraints = table
        .into_iter()
        .map(|((x, y), allowed)| Constraint { x, y, allowed })
        .collect();
    let mut reduction = Reduction {
        bcsr: BcsrInstance {
            variables,
            constraints,
            initial: Vec::new(),
            query: BcsrQuery::Configuration(Vec::new()),
        },
        or_variable,
        edge_variable,
    };
    reduction.bcsr.initial = reduction.encode(graph, &instance.initial);
    reduction.bcsr.query = match &instance.query {
        Query::Configuration(t) => BcsrQuery::Configuration(reduction.encode(graph, t)),
        Query::Edge(h) => {
            let edge = graph.edge(*h);
            let head = graph.head(&instance.initial, *h);
            let tail = edge.other(head);
            if edge.is_loop() {
                BcsrQuery::Values {
                    variable: 0,
                    values: Vec::new(),
                }
            } else if let Some(&x) = reduction.edge_variable.get(h) {
                let values = reduction.bcsr.variables[x]
                    .domain
                    .iter()
                    .position(|d| d[0] == tail)
                    .into_iter()
                    .map(|i| i as u8)
                    .collect();
                BcsrQuery::Values { variable: x, values }
            } else {
                let x = reduction.or_variable[&head];
                let values = reduction.bcsr.variables[x]
                    .domain
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| d.contains(&tail))
                    .map(|(i, _)| i as u8)
                    .collect();
                BcsrQuery::Values { variable: x, values }
            }
        }
    };
    Ok(reduction)
}

/// Decides an AND/OR instance through the split graph and the constraint
/// instance, and translates the assignment path back into a witness on the
/// original graph.
pub fn solve_or(instance: &Instance, cap_bits: usize) -> Result<Verdict> {
    let (lifted, sub) = subdivide_blue(instance)?;
    if let Query::Edge(e) = instance.query {
        if instance.graph.edge(e).is_loop() {
            return Ok(Verdict::no());
        }
    }
    let reduction = reduce_to_bcsr(&lifted, &sub)?;
    let Some(path) = reduction.bcsr.solve_bfs(cap_bits)? else {
        return Ok(Verdict::no());
    };
    let mut current = lifted.initial.clone();
    let mut split_steps = vec![current.clone()];
    for w in path.windows(2) {
        reduction.expand(&sub.graph, &w[0], &w[1], &mut current, &mut split_steps);
    }
    if let Query::Edge(e) = instance.query {
        let parts = &sub.parts[e];
        if parts.len() == 2 && sub.project(&current).is_reversed(e) == instance.initial.is_reversed(e) {
            let other = if parts[0] == sub.tracked_half(e, &instance.initial) {
                parts[1]
            } else {
                parts[0]
            };
            current.flip(other);
            split_steps.push(current.clone());
        }
    }
    let mut witness: Vec<Orientation> = Vec::new();
    for o in &split_steps {
        let p = sub.project(o);
        if witness.last() != Some(&p) {
            witness.push(p);
        }
        if instance.is_goal(witness.last().expect("just pushed")) {
            break;
        }
    }
    Ok(Verdict::yes(Some(witness)))
}
