//! Brute-force reference solver.
//!
//! Explores the configuration graph directly and refuses instances with more
//! non-loop edges than a configurable cap. Every other solver in the crate is
//! checked against this module.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::error::{NclError, Result};
use crate::graph::{ConstraintGraph, EdgeId, Instance, Orientation, Verdict, MIN_IN_WEIGHT};

/// Default bound on the number of non-loop edges the oracle accepts.
pub const DEFAULT_CAP: usize = 24;

/// Environment variable overriding [`DEFAULT_CAP`].
pub const CAP_VARIABLE: &str = "NCL_ORACLE_CAP";

/// Cap from `NCL_ORACLE_CAP`, or [`DEFAULT_CAP`] when unset or unparsable.
pub fn configured_cap() -> usize {
    std::env::var(CAP_VARIABLE)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

fn check_cap(graph: &ConstraintGraph, cap: usize) -> Result<()> {
    let n = graph.non_loop_edge_count();
    if n > cap {
        return Err(NclError::CapExceeded {
            what: "non-loop edges",
            actual: n,
            cap,
        });
    }
    Ok(())
}

/// Breadth-first search from `start`. Neighbours are explored in the order
/// `neighbours` returns them, so the returned path is the first shortest
/// path in that order. Returns `None` when no visited state satisfies `goal`.
pub fn bfs_path<S, N, G>(start: S, mut neighbours: N, mut goal: G) -> Option<Vec<S>>
where
    S: Clone + Eq + Hash,
    N: FnMut(&S) -> Vec<S>,
    G: FnMut(&S) -> bool,
{
    let mut states = vec![start.clone()];
    let mut parent: Vec<usize> = vec![usize::MAX];
    let mut seen: HashMap<S, usize> = HashMap::new();
    seen.insert(start, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if goal(&states[i]) {
            let mut path = Vec::new();
            let mut cur = i;
            while cur != usize::MAX {
                path.push(states[cur].clone());
                cur = parent[cur];
            }
            path.reverse();
            return Some(path);
        }
        for next in neighbours(&states[i]) {
            if !seen.contains_key(&next) {
                let j = states.len();
                seen.insert(next.clone(), j);
                states.push(next);
                parent.push(i);
                queue.push_back(j);
            }
        }
    }
    None
}

/// Every state reachable from `start`, in breadth-first discovery order.
pub fn bfs_reachable<S, N>(start: S, mut neighbours: N) -> Vec<S>
where
    S: Clone + Eq + Hash,
    N: FnMut(&S) -> Vec<S>,
{
    let mut order = vec![start.clone()];
    let mut seen = std::collections::HashSet::from([start]);
    let mut head = 0;
    while head < order.len() {
        let next_states = neighbours(&order[head]);
        head += 1;
        for next in next_states {
            if seen.insert(next.clone()) {
                order.push(next);
            }
        }
    }
    order
}

fn successors(graph: &ConstraintGraph, orientation: &Orientation) -> Vec<Orientation> {
    graph
        .legal_moves(orientation)
        .into_iter()
        .map(|e| orientation.flipped(e))
        .collect()
}

/// Walks every orientation by backtracking over edges in id order and calls
/// `visit` on the feasible ones, in lexicographic order of direction bits.
fn for_each_feasible(graph: &ConstraintGraph, mut visit: impl FnMut(&Orientation)) {
    let m = graph.edge_count();
    let n = graph.vertex_count();
    // Vertices whose last incident edge is `e` get checked right after `e`.
    let mut finished_at: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut isolated = false;
    for (i, &v) in graph.vertices().iter().enumerate() {
        match graph.incident(v).iter().max() {
            Some(&last) => finished_at[last].push(i),
            None => isolated = true,
        }
    }
    if isolated {
        return;
    }
    let mut weights = vec![0u32; n];
    let mut current = Orientation::forward(m);

    fn recurse(
        graph: &ConstraintGraph,
        e: EdgeId,
        finished_at: &[Vec<usize>],
        weights: &mut Vec<u32>,
        current: &mut Orientation,
        visit: &mut dyn FnMut(&Orientation),
    ) {
        if e == graph.edge_count() {
            visit(current);
            return;
        }
        let edge = *graph.edge(e);
        let choices: &[bool] = if edge.is_loop() { &[false] } else { &[false, true] };
        for &reversed in choices {
            current.set_reversed(e, reversed);
            let head = if reversed { edge.u } else { edge.v };
            let hi = graph.index_of(head).expect("edge endpoints are graph vertices");
            weights[hi] += edge.weight.value();
            if finished_at[e].iter().all(|&i| weights[i] >= MIN_IN_WEIGHT) {
                recurse(graph, e + 1, finished_at, weights, current, visit);
            }
            weights[hi] -= edge.weight.value();
        }
        current.set_reversed(e, false);
    }

    recurse(graph, 0, &finished_at, &mut weights, &mut current, &mut visit);
}

/// All feasible orientations in lexicographic order of their direction bits.
pub fn enumerate_feasible(graph: &ConstraintGraph, cap: usize) -> Result<Vec<Orientation>> {
    check_cap(graph, cap)?;
    let mut out = Vec::new();
    for_each_feasible(graph, |o| out.push(o.clone()));
    Ok(out)
}

/// Number of feasible orientations.
pub fn count_feasible(graph: &ConstraintGraph, cap: usize) -> Result<u64> {
    check_cap(graph, cap)?;
    let mut count = 0u64;
    for_each_feasible(graph, |_| count += 1);
    Ok(count)
}

/// Orientations reachable from `start` by legal moves, in BFS order.
pub fn reachable_set(graph: &ConstraintGraph, start: &Orientation, cap: usize) -> Result<Vec<Orientation>> {
    check_cap(graph, cap)?;
    graph.check_orientation(start)?;
    if !graph.is_feasible(start) {
        return Err(NclError::Infeasible("initial"));
    }
    Ok(bfs_reachable(start.clone(), |o| successors(graph, o)))
}

/// Decides the instance by breadth-first search. A positive answer carries
/// a shortest witness; ties between equally short witnesses are broken by
/// trying edge reversals in ascending id order.
pub fn solve_bfs(instance: &Instance, cap: usize) -> Result<Verdict> {
    check_cap(&instance.graph, cap)?;
    let graph = &instance.graph;
    let path = bfs_path(
        instance.initial.clone(),
        |o| successors(graph, o),
        |o| instance.is_goal(o),
    );
    Ok(match path {
        Some(p) => Verdict::yes(Some(p)),
        None => Verdict::no(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Query, Weight};

    #[test]
    fn enumeration_matches_exhaustive_filter() {
        let g = ConstraintGraph::new(
            vec![0, 1, 2],
            vec![
                Edge::new(0, 1, Weight::Blue),
                Edge::new(1, 2, Weight::Red),
                Edge::new(2, 0, Weight::Blue),
                Edge::new(1, 2, Weight::Red),
                Edge::new(2, 2, Weight::Red),
            ],
        )
        .unwrap();
        let listed = enumerate_feasible(&g, DEFAULT_CAP).unwrap();
        let mut filtered = Vec::new();
        for bits in 0u32..16 {
            let flags: Vec<bool> = (0..5).map(|i| i < 4 && bits >> i & 1 == 1).collect();
            let o = Orientation::from_flags(&flags);
            if g.is_feasible(&o) {
                filtered.push(o);
            }
        }
        filtered.sort();
        assert_eq!(listed, filtered);
    }

    #[test]
    fn cap_is_a_hard_refusal() {
        let edges = (0..5).map(|_| Edge::new(0, 1, Weight::Blue)).collect();
        let g = ConstraintGraph::new(vec![0, 1], edges).unwrap();
        let err = enumerate_feasible(&g, 4).unwrap_err();
        assert!(matches!(err, NclError::CapExceeded { actual: 5, cap: 4, .. }));
    }

    #[test]
    fn trivial_query_has_single_state_witness() {
        let g = ConstraintGraph::new(vec![0], vec![Edge::new(0, 0, Weight::Blue)]).unwrap();
        let o = Orientation::forward(1);
        let inst = Instance::new(g, o.clone(), Query::Configuration(o.clone())).unwrap();
        let v = solve_bfs(&inst, DEFAULT_CAP).unwrap();
        assert_eq!(v, Verdict::yes(Some(vec![o])));
    }

    #[test]
    fn witness_is_shortest() {
        let g = ConstraintGraph::new(
            vec![0, 1],
            vec![
                Edge::new(0, 1, Weight::Blue),
                Edge::new(0, 1, Weight::Blue),
                Edge::new(0, 1, Weight::Blue),
            ],
        )
        .unwrap();
        let ini = Orientation::from_flags(&[false, false, true]);
        let tar = Orientation::from_flags(&[true, true, false]);
        let inst = Instance::new(g, ini, Query::Configuration(tar)).unwrap();
        let v = solve_bfs(&inst, DEFAULT_CAP).unwrap();
        assert!(v.answer);
        let w = v.witness.unwrap();
        assert_eq!(w.len(), 4);
        inst.check_witness(&w).unwrap();
    }
}
