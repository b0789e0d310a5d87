//! Solver whose running time is exponential only in the number of blue
//! edges.
//!
//! Feasible orientations are grouped into classes. A class pairs the
//! orientation of the blue edges with a capped red in-degree for every
//! vertex touched by a blue edge. Whether a pair is the class of some
//! feasible orientation is decided by a flow with lower bounds. Two classes
//! are adjacent when they share the red part and differ in one blue edge,
//! or when they share the blue part. Search over classes decides whether
//! the blue part and the red in-degrees of the target can be reached; the
//! remaining difference splits into directed red cycles, each of which is
//! reversible exactly when one of its vertices can be given in-weight three.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use crate::error::{NclError, Result};
use crate::graph::{extend_path, ConstraintGraph, EdgeId, Instance, Orientation, Query, Verdict, VertexId, Weight};
use crate::netflow::{Capacity, FlowNetwork};

/// Default bound on the number of blue edges the class search accepts.
pub const DEFAULT_CAP: usize = 20;

/// Which class family to work in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Red in-degrees capped at two on the vertices touched by blue edges.
    Base,
    /// Red in-degrees capped at three on the vertices touched by blue edges
    /// and on the given vertex.
    Slack(VertexId),
}

/// Class of a feasible orientation: the direction bit of every blue edge in
/// ascending edge-id order, and the capped red in-degree of every tracked
/// vertex in ascending vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassPair {
    pub blue: Vec<bool>,
    pub demand: Vec<u8>,
}

/// A directed cycle: `edges[i]` runs from `vertices[i]` to
/// `vertices[(i + 1) % len]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dicycle {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

/// An arc of a red orientation: edge id, tail and head.
pub type RedArc = (EdgeId, VertexId, VertexId);

/// Flow-network arc ids carrying a red edge to each of its endpoints.
type EndpointArcs = [Option<usize>; 2];

/// The classes of one family over one graph.
#[derive(Clone, Debug)]
pub struct ClassSpace<'g> {
    graph: &'g ConstraintGraph,
    blue_edges: Vec<EdgeId>,
    red_edges: Vec<EdgeId>,
    tracked: Vec<VertexId>,
    cap: u8,
}

impl<'g> ClassSpace<'g> {
    pub fn new(graph: &'g ConstraintGraph, family: Family) -> Result<Self> {
        let blue_edges: Vec<EdgeId> = (0..graph.edge_count())
            .filter(|&e| graph.edge(e).weight.is_blue())
            .collect();
        let red_edges: Vec<EdgeId> = (0..graph.edge_count())
            .filter(|&e| !graph.edge(e).weight.is_blue())
            .collect();
        let mut tracked: Vec<VertexId> = blue_edges
            .iter()
            .flat_map(|&e| [graph.edge(e).u, graph.edge(e).v])
            .collect();
        let cap = match family {
            Family::Base => 2,
            Family::Slack(u) => {
                if !graph.contains_vertex(u) {
                    return Err(NclError::MissingVertex(u));
                }
                tracked.push(u);
                3
            }
        };
        tracked.sort_unstable();
        tracked.dedup();
        Ok(ClassSpace {
            graph,
            blue_edges,
            red_edges,
            tracked,
            cap,
        })
    }

    pub fn graph(&self) -> &'g ConstraintGraph {
        self.graph
    }

    /// Tracked vertices in ascending order.
    pub fn tracked(&self) -> &[VertexId] {
        &self.tracked
    }

    /// Largest demand entry.
    pub fn cap(&self) -> u8 {
        self.cap
    }

    pub fn blue_edges(&self) -> &[EdgeId] {
        &self.blue_edges
    }

    /// Upper bound on the number of classes: one per blue orientation and
    /// demand vector.
    pub fn candidate_count(&self) -> u128 {
        let blue = 1u128.checked_shl(self.blue_edges.len() as u32).unwrap_or(u128::MAX);
        let per_vertex = u128::from(self.cap) + 1;
        (0..self.tracked.len()).fold(blue, |acc, _| acc.saturating_mul(per_vertex))
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        if self.blue_edges.len() > cap {
            return Err(NclError::CapExceeded {
                what: "blue edges",
                actual: self.blue_edges.len(),
                cap,
            });
        }
        Ok(())
    }

    /// Class of a feasible orientation.
    pub fn class_of(&self, orientation: &Orientation) -> Result<ClassPair> {
        self.graph.check_orientation(orientation)?;
        if !self.graph.is_feasible(orientation) {
            return Err(NclError::Infeasible("classified"));
        }
        let blue = self.blue_edges.iter().map(|&e| orientation.is_reversed(e)).collect();
        let mut red_in: BTreeMap<VertexId, u8> = BTreeMap::new();
        for &e in &self.red_edges {
            *red_in.entry(self.graph.head(orientation, e)).or_default() += 1;
        }
        let demand = self
            .tracked
            .iter()
            .map(|v| red_in.get(v).copied().unwrap_or(0).min(self.cap))
            .collect();
        Ok(ClassPair { blue, demand })
    }

    fn check_shape(&self, class: &ClassPair) -> Result<()> {
        if class.blue.len() != self.blue_edges.len() {
            return Err(NclError::MalformedClass(format!(
                "{} blue bits for {} blue edges",
                class.blue.len(),
                self.blue_edges.len()
            )));
        }
        if class.demand.len() != self.tracked.len() {
            return Err(NclError::MalformedClass(format!(
                "{} demand entries for {} tracked vertices",
                class.demand.len(),
                self.tracked.len()
            )));
        }
        if let Some(&d) = class.demand.iter().find(|&&d| d > self.cap) {
            return Err(NclError::MalformedClass(format!(
                "demand {d} exceeds the cap {}",
                self.cap
            )));
        }
        for (&e, &reversed) in self.blue_edges.iter().zip(&class.blue) {
            if reversed && self.graph.edge(e).is_loop() {
                return Err(NclError::LoopReversed(e));
            }
        }
        Ok(())
    }

    /// Blue in-degree of every tracked vertex under the blue bits.
    fn blue_in(&self, blue: &[bool]) -> Vec<u8> {
        let mut count = vec![0u8; self.tracked.len()];
        for (&e, &reversed) in self.blue_edges.iter().zip(blue) {
            let edge = self.graph.edge(e);
            let head = if reversed { edge.u } else { edge.v };
            let i = self.tracked.binary_search(&head).expect("blue endpoints are tracked");
            count[i] += 1;
        }
        count
    }

    /// Every tracked vertex reaches in-weight two from its blue in-degree and
    /// its demand.
    fn covers(&self, blue_in: &[u8], demand: &[u8]) -> bool {
        blue_in
            .iter()
            .zip(demand)
            .all(|(&b, &d)| 2 * u32::from(b) + u32::from(d) >= 2)
    }

    /// Flow network whose feasible flows are red orientations meeting the
    /// demand. Entries of `demand` past its length are left unconstrained.
    fn network(&self, demand: &[u8]) -> Result<(FlowNetwork<i64>, Vec<EndpointArcs>)> {
        let n = self.graph.vertex_count();
        let first_vertex = 2 + self.red_edges.len();
        let mut net = FlowNetwork::new(first_vertex + n);
        let mut endpoint_arcs = Vec::with_capacity(self.red_edges.len());
        for (i, &e) in self.red_edges.iter().enumerate() {
            let w = 2 + i;
            net.add_arc(0, w, 1, Capacity::Finite(1))?;
            let edge = self.graph.edge(e);
            let node = |v: VertexId| first_vertex + self.graph.index_of(v).expect("edge endpoints are graph vertices");
            let to_v = net.add_arc(w, node(edge.v), 0, Capacity::Finite(1))?;
            let to_u = if edge.is_loop() {
                None
            } else {
                Some(net.add_arc(w, node(edge.u), 0, Capacity::Finite(1))?)
            };
            endpoint_arcs.push([to_u, Some(to_v)]);
        }
        let cap = i64::from(self.cap);
        for (i, &v) in self.graph.vertices().iter().enumerate() {
            let node = first_vertex + i;
            match self.tracked.binary_search(&v) {
                Ok(t) if t < demand.len() => {
                    let d = i64::from(demand[t]);
                    if d < cap {
                        net.add_arc(node, 1, d, Capacity::Finite(d))?;
                    } else {
                        net.add_arc(node, 1, cap, Capacity::Unbounded)?;
                    }
                }
                Ok(_) => {
                    net.add_arc(node, 1, 0, Capacity::Unbounded)?;
                }
                Err(_) => {
                    net.add_arc(node, 1, 2, Capacity::Unbounded)?;
                }
            }
        }
        Ok((net, endpoint_arcs))
    }

    /// Red direction bits realizing `demand`, or `None` when none exists.
    /// The result is indexed like the red edges in ascending id order.
    fn realize_demand(&self, demand: &[u8]) -> Result<Option<Vec<bool>>> {
        let (net, endpoint_arcs) = self.network(demand)?;
        let Some(flow) = net.feasible_flow(0, 1)? else {
            return Ok(None);
        };
        Ok(Some(
            endpoint_arcs
                .iter()
                .map(|arcs| arcs[0].is_some_and(|a| flow[a] == 1))
                .collect(),
        ))
    }

    /// True when some red orientation satisfies the demand.
    pub fn is_realizable(&self, demand: &[u8]) -> Result<bool> {
        Ok(self.realize_demand(demand)?.is_some())
    }

    /// Decides membership of a class.
    pub fn is_member(&self, class: &ClassPair) -> Result<bool> {
        self.check_shape(class)?;
        if !self.covers(&self.blue_in(&class.blue), &class.demand) {
            return Ok(false);
        }
        self.is_realizable(&class.demand)
    }

    /// All realizable demand vectors in lexicographic order. Prefixes are
    /// pruned by a flow test that leaves later tracked vertices free.
    pub fn realizable_demands(&self) -> Result<Vec<Vec<u8>>> {
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(self.tracked.len());
        self.extend_demands(&mut prefix, &mut out)?;
        Ok(out)
    }

    fn extend_demands(&self, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) -> Result<()> {
        if prefix.len() == self.tracked.len() {
            out.push(prefix.clone());
            return Ok(());
        }
        for d in 0..=self.cap {
            prefix.push(d);
            if self.is_realizable(prefix)? {
                self.extend_demands(prefix, out)?;
            }
            prefix.pop();
        }
        Ok(())
    }

    /// Every member class, sorted.
    pub fn enumerate(&self, cap: usize) -> Result<Vec<ClassPair>> {
        self.check_cap(cap)?;
        let demands = self.realizable_demands()?;
        let flippable: Vec<usize> = (0..self.blue_edges.len())
            .filter(|&i| !self.graph.edge(self.blue_edges[i]).is_loop())
            .collect();
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << flippable.len()) {
            let mut blue = vec![false; self.blue_edges.len()];
            for (bit, &i) in flippable.iter().enumerate() {
                blue[i] = mask >> bit & 1 == 1;
            }
            let blue_in = self.blue_in(&blue);
            for demand in &demands {
                if self.covers(&blue_in, demand) {
                    out.push(ClassPair {
                        blue: blue.clone(),
                        demand: demand.clone(),
                    });
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Shortest class path from `start` to a class satisfying `goal`.
    /// Classes are generated on demand from the realizable demand vectors.
    pub fn path<G>(&self, start: &ClassPair, cap: usize, mut goal: G) -> Result<Option<Vec<ClassPair>>>
    where
        G: FnMut(&ClassPair) -> bool,
    {
        self.check_cap(cap)?;
        if !self.is_member(start)? {
            return Err(NclError::MalformedClass("the start class is not a member".into()));
        }
        let demands = self.realizable_demands()?;
        let flippable: Vec<usize> = (0..self.blue_edges.len())
            .filter(|&i| !self.graph.edge(self.blue_edges[i]).is_loop())
            .collect();
        let mut states = vec![start.clone()];
        let mut parent = vec![usize::MAX];
        let mut seen: HashMap<ClassPair, usize> = HashMap::from([(start.clone(), 0)]);
        let mut expanded: HashSet<Vec<bool>> = HashSet::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let current = states[i].clone();
            if goal(&current) {
                let mut path = Vec::new();
                let mut at = i;
                while at != usize::MAX {
                    path.push(states[at].clone());
                    at = parent[at];
                }
                path.reverse();
                return Ok(Some(path));
            }
            let mut next = Vec::new();
            if expanded.insert(current.blue.clone()) {
                let blue_in = self.blue_in(&current.blue);
                for demand in &demands {
                    if self.covers(&blue_in, demand) {
                        next.push(ClassPair {
                            blue: current.blue.clone(),
                            demand: demand.clone(),
                        });
                    }
                }
            }
            for &b in &flippable {
                let mut blue = current.blue.clone();
                blue[b] = !blue[b];
                if self.covers(&self.blue_in(&blue), &current.demand) {
                    next.push(ClassPair {
                        blue,
                        demand: current.demand.clone(),
                    });
                }
            }
            for class in next {
                if !seen.contains_key(&class) {
                    seen.insert(class.clone(), states.len());
                    states.push(class);
                    parent.push(i);
                    queue.push_back(states.len() - 1);
                }
            }
        }
        Ok(None)
    }

    /// Turns a class path starting at the class of `start` into a move
    /// sequence from `start` to an orientation whose class is the last one
    /// on the path.
    pub fn realize_path(&self, start: &Orientation, path: &[ClassPair]) -> Result<Vec<Orientation>> {
        let mut witness = vec![start.clone()];
        let mut current = start.clone();
        if let Some(first) = path.first() {
            if self.class_of(start)? != *first {
                return Err(NclError::MalformedClass(
                    "the path does not start at the class of the orientation".into(),
                ));
            }
        }
        for pair in path.windows(2) {
            let (from, to) = (&pair[0], &pair[1]);
            if from.blue == to.blue {
                if from.demand == to.demand {
                    continue;
                }
                let flags = self
                    .realize_demand(&to.demand)?
                    .ok_or_else(|| NclError::MalformedClass("a class on the path is not realizable".into()))?;
                let mut target = current.clone();
                for (&e, &reversed) in self.red_edges.iter().zip(&flags) {
                    target.set_reversed(e, reversed);
                }
                let steps = align_red_indegrees(self.graph, &current, &target)?;
                current = steps.last().expect("alignment returns its start").clone();
                extend_path(&mut witness, steps);
            } else {
                let changed: Vec<usize> = (0..from.blue.len()).filter(|&i| from.blue[i] != to.blue[i]).collect();
                if changed.len() != 1 || from.demand != to.demand {
                    return Err(NclError::MalformedClass("consecutive classes are not adjacent".into()));
                }
                current.flip(self.blue_edges[changed[0]]);
                witness.push(current.clone());
            }
        }
        Ok(witness)
    }
}

/// Class of a feasible orientation in the base family.
pub fn class_of(graph: &ConstraintGraph, orientation: &Orientation) -> Result<ClassPair> {
    ClassSpace::new(graph, Family::Base)?.class_of(orientation)
}

/// Decides membership of `class` in `family`.
pub fn is_member(graph: &ConstraintGraph, class: &ClassPair, family: Family) -> Result<bool> {
    ClassSpace::new(graph, family)?.is_member(class)
}

/// Every member of `family`, sorted.
pub fn enumerate_classes(graph: &ConstraintGraph, family: Family, cap: usize) -> Result<Vec<ClassPair>> {
    ClassSpace::new(graph, family)?.enumerate(cap)
}

/// True when `to` can be reached from `from` through member classes.
pub fn classes_connected(graph: &ConstraintGraph, family: Family, from: &ClassPair, to: &ClassPair) -> Result<bool> {
    let space = ClassSpace::new(graph, family)?;
    space.check_shape(to)?;
    if !space.is_member(to)? {
        return Err(NclError::MalformedClass("the target class is not a member".into()));
    }
    Ok(space.path(from, usize::MAX, |c| c == to)?.is_some())
}

fn red_in_degrees(graph: &ConstraintGraph, orientation: &Orientation) -> Vec<u32> {
    let mut count = vec![0u32; graph.vertex_count()];
    for (e, edge) in graph.edges().iter().enumerate() {
        if edge.weight == Weight::Red {
            count[graph
                .index_of(graph.head(orientation, e))
                .expect("edge endpoints are graph vertices")] += 1;
        }
    }
    count
}

/// Reverses red edges of `start` one at a time until its red in-degrees
/// equal those of `target`. Each step picks the smallest vertex whose red
/// in-degree is too high and reverses the smallest-id red arc entering it
/// that `target` orients the other way. No vertex ever drops below the
/// smaller of its two end in-degrees. Blue edges keep their direction from
/// `start`. The returned sequence begins with `start`.
pub fn align_red_indegrees(
    graph: &ConstraintGraph,
    start: &Orientation,
    target: &Orientation,
) -> Result<Vec<Orientation>> {
    graph.check_orientation(start)?;
    graph.check_orientation(target)?;
    let goal = red_in_degrees(graph, target);
    let mut current = start.clone();
    let mut sequence = vec![current.clone()];
    loop {
        let now = red_in_degrees(graph, &current);
        let Some(i) = (0..now.len()).find(|&i| now[i] > goal[i]) else {
            return Ok(sequence);
        };
        let v = graph.vertices()[i];
        let e = graph
            .incident(v)
            .iter()
            .copied()
            .filter(|&e| graph.edge(e).weight == Weight::Red && !graph.edge(e).is_loop())
            .filter(|&e| graph.head(&current, e) == v && graph.head(target, e) != v)
            .min()
            .expect("an excess red in-degree has an arc that the target reverses");
        current.flip(e);
        sequence.push(current.clone());
    }
}

/// Red arcs of `a` that `b` orients the other way, in edge-id order.
pub fn red_difference(graph: &ConstraintGraph, a: &Orientation, b: &Orientation) -> Vec<RedArc> {
    a.difference(b)
        .into_iter()
        .filter(|&e| e < graph.edge_count() && graph.edge(e).weight == Weight::Red)
        .map(|e| {
            let (tail, head) = graph.arc(a, e);
            (e, tail, head)
        })
        .collect()
}

/// Splits a balanced arc set into arc-disjoint directed cycles. Each walk
/// starts at the tail of the smallest remaining arc and follows the
/// smallest-id unused out-arc until a vertex repeats.
pub fn dicycle_decompose(arcs: &[RedArc]) -> Result<Vec<Dicycle>> {
    let mut balance: BTreeMap<VertexId, i64> = BTreeMap::new();
    for &(_, tail, head) in arcs {
        *balance.entry(tail).or_default() -= 1;
        *balance.entry(head).or_default() += 1;
    }
    if let Some((&v, _)) = balance.iter().find(|(_, &b)| b != 0) {
        return Err(NclError::Unbalanced(v));
    }
    let mut remaining: Vec<RedArc> = arcs.to_vec();
    remaining.sort_unstable();
    let mut cycles = Vec::new();
    while let Some(&(_, start, _)) = remaining.first() {
        let mut walk_vertices = vec![start];
        let mut walk_edges: Vec<usize> = Vec::new();
        let mut position: HashMap<VertexId, usize> = HashMap::from([(start, 0)]);
        loop {
            let at = *walk_vertices.last().expect("walk is non-empty");
            let k = (0..remaining.len())
                .find(|&k| remaining[k].1 == at && !walk_edges.contains(&k))
                .ok_or(NclError::Unbalanced(at))?;
            walk_edges.push(k);
            let head = remaining[k].2;
            if let Some(&p) = position.get(&head) {
                let cycle_slots: Vec<usize> = walk_edges[p..].to_vec();
                let cycle = Dicycle {
                    vertices: walk_vertices[p..].to_vec(),
                    edges: cycle_slots.iter().map(|&k| remaining[k].0).collect(),
                };
                let mut drop = cycle_slots;
                drop.sort_unstable_by(|a, b| b.cmp(a));
                for k in drop {
                    remaining.remove(k);
                }
                cycles.push(cycle);
                break;
            }
            position.insert(head, walk_vertices.len());
            walk_vertices.push(head);
        }
    }
    Ok(cycles)
}

/// Searches for an orientation reachable from `start` in which `u` has
/// in-weight at least three. Returns a move sequence from `start` ending
/// at such an orientation, or `None` when none is reachable.
pub fn find_slack(
    graph: &ConstraintGraph,
    start: &Orientation,
    u: VertexId,
    cap: usize,
) -> Result<Option<Vec<Orientation>>> {
    let space = ClassSpace::new(graph, Family::Slack(u))?;
    let ui = space.tracked.binary_search(&u).expect("the slack vertex is tracked");
    let blue_at_u: Vec<usize> = (0..space.blue_edges.len())
        .filter(|&i| graph.edge(space.blue_edges[i]).touches(u))
        .collect();
    let start_class = space.class_of(start)?;
    let path = space.path(&start_class, cap, |c| {
        let blue_in = blue_at_u
            .iter()
            .filter(|&&i| {
                let edge = graph.edge(space.blue_edges[i]);
                let head = if c.blue[i] { edge.u } else { edge.v };
                head == u
            })
            .count() as u32;
        2 * blue_in + u32::from(c.demand[ui]) >= 3
    })?;
    match path {
        None => Ok(None),
        Some(p) => Ok(Some(space.realize_path(start, &p)?)),
    }
}

/// Given a move sequence `to_slack` from an orientation containing the
/// dicycle `cycle` to one where some vertex has in-weight at least three,
/// builds a move sequence from the same start to the start with `cycle`
/// reversed.
pub fn reverse_dicycle(graph: &ConstraintGraph, to_slack: &[Orientation], cycle: &Dicycle) -> Result<Vec<Orientation>> {
    let slack_at = |o: &Orientation| cycle.vertices.iter().position(|&v| graph.in_weight(o, v) >= 3);
    let j = to_slack
        .iter()
        .position(|o| slack_at(o).is_some())
        .ok_or_else(|| NclError::InvalidSequence {
            index: to_slack.len(),
            reason: "no cycle vertex gains slack".into(),
        })?;
    let prefix = &to_slack[..=j];
    if prefix
        .windows(2)
        .any(|w| w[0].difference(&w[1]).iter().any(|e| cycle.edges.contains(e)))
    {
        return Err(NclError::InvalidSequence {
            index: j,
            reason: "the prefix reverses a cycle arc".into(),
        });
    }
    let flip_cycle = |o: &Orientation| {
        let mut o = o.clone();
        for &e in &cycle.edges {
            o.flip(e);
        }
        o
    };
    let mut witness = prefix.to_vec();
    let mut current = prefix[j].clone();
    let p = slack_at(&current).expect("slack was found at this index");
    let n = cycle.edges.len();
    for step in 1..=n {
        current.flip(cycle.edges[(p + n - step) % n]);
        witness.push(current.clone());
    }
    for o in prefix[..j].iter().rev() {
        witness.push(flip_cycle(o));
    }
    Ok(witness)
}

fn truncate_at_goal(instance: &Instance, mut witness: Vec<Orientation>) -> Option<Vec<Orientation>> {
    let end = witness.iter().position(|o| instance.is_goal(o))?;
    witness.truncate(end + 1);
    Some(witness)
}

/// Decides a configuration-to-configuration instance by class search,
/// red in-degree alignment and dicycle reversal.
pub fn solve_c2c(instance: &Instance, cap: usize) -> Result<Verdict> {
    let Query::Configuration(target) = &instance.query else {
        return Err(NclError::Input {
            path: "$.problem".into(),
            message: "expected a configuration query".into(),
        });
    };
    let graph = &instance.graph;
    let space = ClassSpace::new(graph, Family::Base)?;
    let start_class = space.class_of(&instance.initial)?;
    let target_class = space.class_of(target)?;
    let Some(path) = space.path(&start_class, cap, |c| *c == target_class)? else {
        return Ok(Verdict::no());
    };
    let mut witness = space.realize_path(&instance.initial, &path)?;
    let current = witness.last().expect("witness is non-empty").clone();
    extend_path(&mut witness, align_red_indegrees(graph, &current, target)?);
    loop {
        let current = witness.last().expect("witness is non-empty").clone();
        let difference = red_difference(graph, &current, target);
        if difference.is_empty() {
            return Ok(Verdict::yes(Some(witness)));
        }
        let cycle = dicycle_decompose(&difference)?.swap_remove(0);
        let Some(to_slack) = find_slack(graph, &current, cycle.vertices[0], cap)? else {
            return Ok(Verdict::no());
        };
        extend_path(&mut witness, reverse_dicycle(graph, &to_slack, &cycle)?);
    }
}

/// Decides a configuration-to-edge instance. A blue target is settled by
/// class search for a class with the edge reversed; a red target by giving
/// its head slack and then reversing it.
pub fn solve_c2e(instance: &Instance, cap: usize) -> Result<Verdict> {
    let Query::Edge(target) = instance.query else {
        return Err(NclError::Input {
            path: "$.problem".into(),
            message: "expected an edge query".into(),
        });
    };
    let graph = &instance.graph;
    let edge = graph.edge(target);
    if edge.is_loop() {
        return Ok(Verdict::no());
    }
    let witness = if edge.weight.is_blue() {
        let space = ClassSpace::new(graph, Family::Base)?;
        let slot = space
            .blue_edges
            .binary_search(&target)
            .expect("blue target is a blue edge");
        let start_class = space.class_of(&instance.initial)?;
        let initial_bit = start_class.blue[slot];
        match space.path(&start_class, cap, |c| c.blue[slot] != initial_bit)? {
            None => return Ok(Verdict::no()),
            Some(path) => space.realize_path(&instance.initial, &path)?,
        }
    } else {
        let head = graph.head(&instance.initial, target);
        match find_slack(graph, &instance.initial, head, cap)? {
            None => return Ok(Verdict::no()),
            Some(mut to_slack) => {
                let last = to_slack.last().expect("witness is non-empty").clone();
                if !instance.is_goal(&last) {
                    to_slack.push(last.flipped(target));
                }
                to_slack
            }
        }
    };
    Ok(Verdict::yes(truncate_at_goal(instance, witness)))
}

/// Dispatches on the query kind.
pub fn solve(instance: &Instance, cap: usize) -> Result<Verdict> {
    match instance.query {
        Query::Configuration(_) => solve_c2c(instance, cap),
        Query::Edge(_) => solve_c2e(instance, cap),
    }
}
