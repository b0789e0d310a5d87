//! Seeded random instance generators.
//!
//! Every generator draws from ChaCha8 seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`. A bounded draw in `0..n` takes the
//! high 64 bits of the 128-bit product `next_u64() * n`. Both steps are
//! fully specified, so a corpus is reproducible from its seeds.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{NclError, Result};
use crate::graph::{ConstraintGraph, Edge, Instance, Orientation, Query, VertexId, Weight, MIN_IN_WEIGHT};
use crate::single::{CisInstance, DemandGraph, ElementSet, PartitionMatroid, SingleWeightInstance};

/// How many times a generator retries before giving up.
pub const MAX_ATTEMPTS: usize = 200;

/// Search nodes one backtracking attempt may visit.
const SEARCH_BUDGET: usize = 200_000;

/// Which query a generated instance asks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    C2C,
    C2E,
}

/// Deterministic source of bounded integers.
pub struct Draw {
    rng: ChaCha8Rng,
}

impl Draw {
    pub fn new(seed: u64) -> Self {
        Draw {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform value in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.rng.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Uniform value in `lo..=hi`.
    pub fn between(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    pub fn coin(&mut self) -> bool {
        self.below(2) == 1
    }

    /// Fisher–Yates shuffle driven by [`Self::below`].
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

/// Searches for a feasible orientation, trying the two directions of each
/// edge in random order. Returns `None` when none exists or the search
/// budget runs out.
pub fn random_feasible(graph: &ConstraintGraph, draw: &mut Draw) -> Option<Orientation> {
    let m = graph.edge_count();
    let mut finished_at: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (i, &v) in graph.vertices().iter().enumerate() {
        finished_at[*graph.incident(v).iter().max()?].push(i);
    }
    let order: Vec<Vec<bool>> = (0..m)
        .map(|e| {
            if graph.edge(e).is_loop() {
                vec![false]
            } else if draw.coin() {
                vec![true, false]
            } else {
                vec![false, true]
            }
        })
        .collect();
    let mut weights = vec![0u32; graph.vertex_count()];
    let mut current = Orientation::forward(m);
    let mut budget = SEARCH_BUDGET;

    fn recurse(
        graph: &ConstraintGraph,
        e: usize,
        order: &[Vec<bool>],
        finished_at: &[Vec<usize>],
        weights: &mut [u32],
        current: &mut Orientation,
        budget: &mut usize,
    ) -> bool {
        if e == graph.edge_count() {
            return true;
        }
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let edge = *graph.edge(e);
        for &reversed in &order[e] {
            current.set_reversed(e, reversed);
            let head = if reversed { edge.u } else { edge.v };
            let hi = graph.index_of(head).expect("edge endpoints are graph vertices");
            weights[hi] += edge.weight.value();
            if finished_at[e].iter().all(|&i| weights[i] >= MIN_IN_WEIGHT)
                && recurse(graph, e + 1, order, finished_at, weights, current, budget)
            {
                return true;
            }
            weights[hi] -= edge.weight.value();
        }
        current.set_reversed(e, false);
        false
    }

    recurse(graph, 0, &order, &finished_at, &mut weights, &mut current, &mut budget).then_some(current)
}

/// Performs up to `steps` uniformly chosen legal moves from `start`.
pub fn random_walk(graph: &ConstraintGraph, start: &Orientation, steps: usize, draw: &mut Draw) -> Orientation {
    let mut current = start.clone();
    for _ in 0..steps {
        let moves = graph.legal_moves(&current);
        if moves.is_empty() {
            break;
        }
        current.flip(moves[draw.below(moves.len())]);
    }
    current
}

/// Drops isolated vertices and renumbers the rest as `0..n` in order.
fn compact(vertex_count: usize, edges: Vec<Edge>) -> Result<ConstraintGraph> {
    let mut used = vec![false; vertex_count];
    for e in &edges {
        used[e.u as usize] = true;
        used[e.v as usize] = true;
    }
    let mut rename = vec![0 as VertexId; vertex_count];
    let mut next = 0;
    for (v, &u) in used.iter().enumerate() {
        if u {
            rename[v] = next;
            next += 1;
        }
    }
    let edges = edges
        .into_iter()
        .map(|e| Edge::new(rename[e.u as usize], rename[e.v as usize], e.weight))
        .collect();
    ConstraintGraph::new((0..next).collect(), edges)
}

fn finish(graph: ConstraintGraph, problem: ProblemKind, draw: &mut Draw) -> Option<Instance> {
    let initial = random_feasible(&graph, draw)?;
    let query = match problem {
        ProblemKind::C2C => Query::Configuration(random_feasible(&graph, draw)?),
        ProblemKind::C2E => {
            let movable: Vec<usize> = (0..graph.edge_count()).filter(|&e| !graph.edge(e).is_loop()).collect();
            if movable.is_empty() {
                return None;
            }
            Query::Edge(movable[draw.below(movable.len())])
        }
    };
    Instance::new(graph, initial, query).ok()
}

/// Random multigraph with loops, `red` red edges and `blue` blue edges, on
/// at most `(red + 2 * blue) / 2` vertices so that a feasible orientation
/// can exist. Both orientations are found by randomized backtracking.
pub fn general_instance(red: usize, blue: usize, seed: u64, problem: ProblemKind) -> Result<Instance> {
    let mut draw = Draw::new(seed);
    if red + blue == 0 {
        return Err(NclError::GeneratorExhausted(0));
    }
    for _ in 0..MAX_ATTEMPTS {
        let max_vertices = ((red + 2 * blue) / 2).max(1);
        let n = draw.between(1, max_vertices);
        let mut edges = Vec::with_capacity(red + blue);
        for i in 0..red + blue {
            let weight = if i < red { Weight::Red } else { Weight::Blue };
            let u = draw.below(n) as VertexId;
            let v = draw.below(n) as VertexId;
            edges.push(Edge::new(u, v, weight));
        }
        draw.shuffle(&mut edges);
        let graph = compact(n, edges)?;
        if let Some(instance) = finish(graph, problem, &mut draw) {
            return Ok(instance);
        }
    }
    Err(NclError::GeneratorExhausted(MAX_ATTEMPTS))
}

/// Random AND/OR graph on `vertex_count` vertices, rounded up to an even
/// number. Each vertex is AND or OR with equal probability, and red and
/// blue edge ends are paired uniformly at random, so loops and parallel
/// edges occur.
pub fn and_or_instance(vertex_count: usize, seed: u64, problem: ProblemKind) -> Result<Instance> {
    let mut draw = Draw::new(seed);
    let n = vertex_count.max(2).div_ceil(2) * 2;
    for _ in 0..MAX_ATTEMPTS {
        let mut red_ends = Vec::new();
        let mut blue_ends = Vec::new();
        for v in 0..n as VertexId {
            if draw.coin() {
                red_ends.extend([v, v]);
                blue_ends.push(v);
            } else {
                blue_ends.extend([v, v, v]);
            }
        }
        draw.shuffle(&mut red_ends);
        draw.shuffle(&mut blue_ends);
        let mut edges: Vec<Edge> = red_ends.chunks(2).map(|p| Edge::new(p[0], p[1], Weight::Red)).collect();
        edges.extend(blue_ends.chunks(2).map(|p| Edge::new(p[0], p[1], Weight::Blue)));
        draw.shuffle(&mut edges);
        let graph = ConstraintGraph::new((0..n as VertexId).collect(), edges)?;
        if !graph.is_and_or() {
            continue;
        }
        if let Some(instance) = finish(graph, problem, &mut draw) {
            return Ok(instance);
        }
    }
    Err(NclError::GeneratorExhausted(MAX_ATTEMPTS))
}

/// Random single-weight instance with `edge_count` loop-free edges. The
/// demands are drawn below what a random initial orientation supplies, and
/// the target is either a random walk from it or an unrelated feasible
/// orientation.
pub fn single_weight_instance(edge_count: usize, seed: u64) -> Result<SingleWeightInstance> {
    let mut draw = Draw::new(seed);
    let n = draw.between(2, edge_count.max(2));
    let weight = draw.between(1, 3) as u32;
    let edges: Vec<(VertexId, VertexId)> = (0..edge_count)
        .map(|_| {
            let u = draw.below(n);
            let v = (u + 1 + draw.below(n - 1)) % n;
            (u as VertexId, v as VertexId)
        })
        .collect();
    let flags: Vec<bool> = (0..edge_count).map(|_| draw.coin()).collect();
    let initial = Orientation::from_flags(&flags);
    let mut in_degree = vec![0usize; n];
    for (e, &(u, v)) in edges.iter().enumerate() {
        in_degree[if flags[e] { u } else { v } as usize] += 1;
    }
    let demands = in_degree
        .iter()
        .map(|&d| draw.below(d * weight as usize + 1) as u32)
        .collect();
    let graph = DemandGraph::new((0..n as VertexId).collect(), edges, demands, weight)?;
    let target = if draw.coin() {
        let mut current = initial.clone();
        for _ in 0..2 * edge_count {
            let moves = graph.neighbours(&current);
            if moves.is_empty() {
                break;
            }
            current = moves[draw.below(moves.len())].clone();
        }
        current
    } else {
        (0..MAX_ATTEMPTS)
            .map(|_| Orientation::from_flags(&(0..edge_count).map(|_| draw.coin()).collect::<Vec<_>>()))
            .find(|o| graph.is_feasible(o))
            .unwrap_or_else(|| initial.clone())
    };
    SingleWeightInstance::new(graph, initial, target)
}

/// Random pair of partition matroids on `ground` elements with random
/// common independent source and target sets and a random floor.
pub fn random_cis(ground: usize, seed: u64) -> Result<CisInstance> {
    let mut draw = Draw::new(seed);
    let matroid = |draw: &mut Draw| {
        let count = draw.between(1, ground.max(1));
        let mut parts = vec![Vec::new(); count];
        for x in 0..ground {
            parts[draw.below(count)].push(x);
        }
        let capacities = parts.iter().map(|p| draw.below(p.len() + 1) as u32).collect();
        PartitionMatroid::new(ground, parts, capacities)
    };
    let first = matroid(&mut draw)?;
    let second = matroid(&mut draw)?;
    let greedy = |draw: &mut Draw| {
        let mut order: Vec<usize> = (0..ground).collect();
        draw.shuffle(&mut order);
        let keep = draw.between(0, ground);
        let mut set: ElementSet = 0;
        for &x in order.iter().take(keep) {
            let next = set | 1 << x;
            if first.is_independent(next) && second.is_independent(next) {
                set = next;
            }
        }
        set
    };
    let source = greedy(&mut draw);
    let target = greedy(&mut draw);
    let floor = draw.between(0, source.count_ones().min(target.count_ones()) as usize);
    CisInstance::new(first, second, source, target, floor)
}
