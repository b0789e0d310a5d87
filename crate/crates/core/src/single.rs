//! The uniform-weight variant: every edge weighs `k` and each vertex `v`
//! has its own demand `d_v`.
//!
//! An orientation is feasible when `k * in_degree(v) >= d_v` everywhere,
//! which is the same as capping the out-degree of `v` at
//! `deg(v) - ceil(d_v / k)`. Each edge contributes two ground elements, one
//! per direction. One partition matroid allows at most one direction per
//! edge, and the other caps the out-arcs at every vertex. Full common
//! independent sets are then exactly the feasible orientations. Reversing
//! an edge corresponds to dropping its arc and adding the opposite one, so
//! reachability is decided over common independent sets of size at least
//! `|E| - 1`.

use crate::error::{NclError, Result};
use crate::graph::{EdgeId, Orientation, Verdict, VertexId};
use crate::oracle::bfs_path;

/// Default bound on the ground set size.
pub const DEFAULT_CAP: usize = 40;

/// Largest ground set representable by the bit-mask sets used here.
pub const MAX_GROUND: usize = 64;

/// A subset of the ground set, bit `x` standing for element `x`.
pub type ElementSet = u64;

/// Ground element for edge `e`: `2e` is the arc `u -> v`, `2e + 1` the arc
/// `v -> u`.
pub fn element(e: EdgeId, reversed: bool) -> usize {
    2 * e + usize::from(reversed)
}

/// Loop-free multigraph with vertex demands and one edge weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandGraph {
    vertices: Vec<VertexId>,
    edges: Vec<(VertexId, VertexId)>,
    demands: Vec<u32>,
    weight: u32,
}

impl DemandGraph {
    /// `demands` is aligned with `vertices`, which must be distinct. Edges
    /// may be parallel but not loops.
    pub fn new(
        vertices: Vec<VertexId>,
        edges: Vec<(VertexId, VertexId)>,
        demands: Vec<u32>,
        weight: u32,
    ) -> Result<Self> {
        if weight == 0 {
            return Err(NclError::MalformedDemands("the edge weight must be at least 1".into()));
        }
        if demands.len() != vertices.len() {
            return Err(NclError::MalformedDemands(format!(
                "{} demands for {} vertices",
                demands.len(),
                vertices.len()
            )));
        }
        let mut paired: Vec<(VertexId, u32)> = vertices.into_iter().zip(demands).collect();
        paired.sort_unstable();
        if let Some(w) = paired.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(NclError::DuplicateVertex(w[0].0));
        }
        let (vertices, demands): (Vec<_>, Vec<_>) = paired.into_iter().unzip();
        for (id, &(u, v)) in edges.iter().enumerate() {
            for x in [u, v] {
                if vertices.binary_search(&x).is_err() {
                    return Err(NclError::UnknownVertex { edge: id, vertex: x });
                }
            }
            if u == v {
                return Err(NclError::MalformedDemands(format!("edge {id} is a loop")));
            }
        }
        let graph = DemandGraph {
            vertices,
            edges,
            demands,
            weight,
        };
        for (i, &v) in graph.vertices.iter().enumerate() {
            let needed = graph.required_in_degree(i);
            if needed > graph.degree(v) as u32 {
                return Err(NclError::MalformedDemands(format!(
                    "vertex {v} needs in-degree {needed} but has degree {}",
                    graph.degree(v)
                )));
            }
        }
        Ok(graph)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn demands(&self) -> &[u32] {
        &self.demands
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn index_of(&self, v: VertexId) -> usize {
        self.vertices.binary_search(&v).expect("vertex of the graph")
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum()
    }

    /// Smallest in-degree meeting the demand of the vertex at `index`.
    fn required_in_degree(&self, index: usize) -> u32 {
        self.demands[index].div_ceil(self.weight)
    }

    /// In-degree of every vertex, aligned with [`Self::vertices`].
    pub fn in_degrees(&self, orientation: &Orientation) -> Vec<u32> {
        let mut out = vec![0u32; self.vertices.len()];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            let head = if orientation.is_reversed(e) { u } else { v };
            out[self.index_of(head)] += 1;
        }
        out
    }

    /// True when `weight * in_degree(v) >= d_v` at every vertex.
    pub fn is_feasible(&self, orientation: &Orientation) -> bool {
        orientation.len() == self.edges.len()
            && self
                .in_degrees(orientation)
                .iter()
                .zip(&self.demands)
                .all(|(&d, &need)| u64::from(d) * u64::from(self.weight) >= u64::from(need))
    }

    /// Feasible orientations one reversal away.
    pub fn neighbours(&self, orientation: &Orientation) -> Vec<Orientation> {
        (0..self.edges.len())
            .map(|e| orientation.flipped(e))
            .filter(|o| self.is_feasible(o))
            .collect()
    }

    /// Ground set of the arc encoding: both directions of every edge.
    pub fn arcs_of(&self, orientation: &Orientation) -> ElementSet {
        (0..self.edges.len()).fold(0, |acc, e| acc | 1 << element(e, orientation.is_reversed(e)))
    }
}

/// A uniform-weight reconfiguration instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleWeightInstance {
    pub graph: DemandGraph,
    pub initial: Orientation,
    pub target: Orientation,
}

impl SingleWeightInstance {
    pub fn new(graph: DemandGraph, initial: Orientation, target: Orientation) -> Result<Self> {
        for (o, which) in [(&initial, "initial"), (&target, "target")] {
            if o.len() != graph.edge_count() {
                return Err(NclError::OrientationLength {
                    expected: graph.edge_count(),
                    actual: o.len(),
                });
            }
            if !graph.is_feasible(o) {
                return Err(NclError::Infeasible(which));
            }
        }
        Ok(SingleWeightInstance { graph, initial, target })
    }
}

/// A partition matroid on elements `0..ground`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionMatroid {
    parts: Vec<Vec<usize>>,
    capacities: Vec<u32>,
    part_of: Vec<usize>,
}

impl PartitionMatroid {
    /// `parts` must be disjoint and cover `0..ground`.
    pub fn new(ground: usize, parts: Vec<Vec<usize>>, capacities: Vec<u32>) -> Result<Self> {
        if ground > MAX_GROUND {
            return Err(NclError::CapExceeded {
                what: "ground elements",
                actual: ground,
                cap: MAX_GROUND,
            });
        }
        if parts.len() != capacities.len() {
            return Err(NclError::MalformedDemands(format!(
                "{} parts but {} capacities",
                parts.len(),
                capacities.len()
            )));
        }
        let mut part_of = vec![usize::MAX; ground];
        for (i, part) in parts.iter().enumerate() {
            for &x in part {
                if x >= ground || part_of[x] != usize::MAX {
                    return Err(NclError::MalformedDemands(format!(
                        "element {x} is outside the ground set or in two parts"
                    )));
                }
                part_of[x] = i;
            }
        }
        if let Some(x) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(NclError::MalformedDemands(format!("element {x} is in no part")));
        }
        Ok(PartitionMatroid {
            parts,
            capacities,
            part_of,
        })
    }

    pub fn ground(&self) -> usize {
        self.part_of.len()
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn capacities(&self) -> &[u32] {
        &self.capacities
    }

    pub fn part_of(&self, x: usize) -> usize {
        self.part_of[x]
    }

    fn mask(&self, part: usize) -> ElementSet {
        self.parts[part].iter().fold(0, |acc, &x| acc | 1 << x)
    }

    /// True when no part holds more chosen elements than its capacity.
    pub fn is_independent(&self, set: ElementSet) -> bool {
        (0..self.parts.len()).all(|i| (set & self.mask(i)).count_ones() <= self.capacities[i])
    }
}

/// Common independent set reconfiguration: move from `source` to `target`
/// by adding or removing one element at a time, staying independent in
/// both matroids and never dropping below `floor` elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CisInstance {
    pub first: PartitionMatroid,
    pub second: PartitionMatroid,
    pub source: ElementSet,
    pub target: ElementSet,
    pub floor: usize,
}

impl CisInstance {
    pub fn new(
        first: PartitionMatroid,
        second: PartitionMatroid,
        source: ElementSet,
        target: ElementSet,
        floor: usize,
    ) -> Result<Self> {
        if first.ground() != second.ground() {
            return Err(NclError::MalformedDemands(
                "the matroids have different ground sets".into(),
            ));
        }
        let cis = CisInstance {
            first,
            second,
            source,
            target,
            floor,
        };
        for (set, which) in [(source, "source"), (target, "target")] {
            if !cis.is_common_independent(set) {
                return Err(NclError::Infeasible(which));
            }
        }
        Ok(cis)
    }

    pub fn ground(&self) -> usize {
        self.first.ground()
    }

    pub fn is_common_independent(&self, set: ElementSet) -> bool {
        set >> self.ground() == 0 && self.first.is_independent(set) && self.second.is_independent(set)
    }

    fn admits(&self, set: ElementSet) -> bool {
        set.count_ones() as usize >= self.floor && self.is_common_independent(set)
    }
}

/// Builds the matroid pair for a single-weight instance. The first matroid
/// pairs the two directions of every edge with capacity 1. The second
/// groups the out-arcs of every vertex with capacity
/// `deg(v) - ceil(d_v / k)`. The floor is `|E| - 1`, so a move removes one
/// arc and then adds its reverse.
pub fn reduce_to_cis(instance: &SingleWeightInstance) -> Result<CisInstance> {
    let g = &instance.graph;
    let ground = 2 * g.edge_count();
    let first = PartitionMatroid::new(
        ground,
        (0..g.edge_count())
            .map(|e| vec![element(e, false), element(e, true)])
            .collect(),
        vec![1; g.edge_count()],
    )?;
    let mut out_arcs = vec![Vec::new(); g.vertices.len()];
    for (e, &(u, v)) in g.edges.iter().enumerate() {
        out_arcs[g.index_of(u)].push(element(e, false));
        out_arcs[g.index_of(v)].push(element(e, true));
    }
    let capacities = (0..g.vertices.len())
        .map(|i| g.degree(g.vertices[i]) as u32 - g.required_in_degree(i))
        .collect();
    let second = PartitionMatroid::new(ground, out_arcs, capacities)?;
    CisInstance::new(
        first,
        second,
        g.arcs_of(&instance.initial),
        g.arcs_of(&instance.target),
        g.edge_count().saturating_sub(1),
    )
}

/// Shortest reconfiguration sequence of common independent sets, or `None`.
pub fn cis_solve_bfs(cis: &CisInstance, cap: usize) -> Result<Option<Vec<ElementSet>>> {
    let ground = cis.ground();
    if ground > cap {
        return Err(NclError::CapExceeded {
            what: "ground elements",
            actual: ground,
            cap,
        });
    }
    Ok(bfs_path(
        cis.source,
        |&set| {
            (0..ground)
                .map(|x| set ^ 1 << x)
                .filter(|&next| cis.admits(next))
                .collect()
        },
        |&set| set == cis.target,
    ))
}

/// Bipartite multigraph whose left vertices are the parts of the first
/// matroid and whose right vertices are the parts of the second. Element
/// `x` is the edge joining its two parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BMatchingGraph {
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    pub edges: Vec<(usize, usize)>,
}

impl BMatchingGraph {
    /// True when every vertex meets at most its capacity of chosen edges.
    pub fn is_b_matching(&self, set: ElementSet) -> bool {
        let mut left = vec![0u32; self.left.len()];
        let mut right = vec![0u32; self.right.len()];
        for (x, &(i, j)) in self.edges.iter().enumerate() {
            if set >> x & 1 == 1 {
                left[i] += 1;
                right[j] += 1;
            }
        }
        left.iter().zip(&self.left).all(|(n, b)| n <= b) && right.iter().zip(&self.right).all(|(n, b)| n <= b)
    }
}

pub fn build_bmatching_graph(cis: &CisInstance) -> BMatchingGraph {
    BMatchingGraph {
        left: cis.first.capacities().to_vec(),
        right: cis.second.capacities().to_vec(),
        edges: (0..cis.ground())
            .map(|x| (cis.first.part_of(x), cis.second.part_of(x)))
            .collect(),
    }
}

/// Orientation whose arcs are the full set `set`.
fn orientation_of(edge_count: usize, set: ElementSet) -> Orientation {
    let flags: Vec<bool> = (0..edge_count).map(|e| set >> element(e, true) & 1 == 1).collect();
    Orientation::from_flags(&flags)
}

/// Decides a single-weight instance through common independent sets. The
/// witness lists the orientations met along the way.
pub fn solve_single_weight(instance: &SingleWeightInstance, cap: usize) -> Result<Verdict> {
    let cis = reduce_to_cis(instance)?;
    let Some(path) = cis_solve_bfs(&cis, cap)? else {
        return Ok(Verdict::no());
    };
    let m = instance.graph.edge_count();
    let witness = path
        .into_iter()
        .filter(|set| set.count_ones() as usize == m)
        .map(|set| orientation_of(m, set))
        .collect();
    Ok(Verdict::yes(Some(witness)))
}

/// Breadth-first search over feasible orientations, reversing one edge per
/// move. Used as the reference for [`solve_single_weight`].
pub fn solve_demand_oracle(instance: &SingleWeightInstance, cap: usize) -> Result<Verdict> {
    let m = instance.graph.edge_count();
    if m > cap {
        return Err(NclError::CapExceeded {
            what: "edges",
            actual: m,
            cap,
        });
    }
    Ok(
        match bfs_path(
            instance.initial.clone(),
            |o| instance.graph.neighbours(o),
            |o| *o == instance.target,
        ) {
            Some(path) => Verdict::yes(Some(path)),
            None => Verdict::no(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parallel_pair() -> SingleWeightInstance {
        let g = DemandGraph::new(vec![0, 1], vec![(0, 1), (0, 1)], vec![1, 1], 1).unwrap();
        SingleWeightInstance::new(
            g,
            Orientation::from_flags(&[false, true]),
            Orientation::from_flags(&[true, false]),
        )
        .unwrap()
    }

    #[test]
    fn partition_matroid_independence() {
        let m = PartitionMatroid::new(3, vec![vec![0, 1], vec![2]], vec![1, 1]).unwrap();
        assert!(m.is_independent(0));
        assert!(m.is_independent(0b101));
        assert!(!m.is_independent(0b011));
        let full = PartitionMatroid::new(2, vec![vec![0, 1]], vec![2]).unwrap();
        assert!(full.is_independent(0b11));
    }

    #[test]
    fn malformed_partitions_are_rejected() {
        assert!(PartitionMatroid::new(2, vec![vec![0]], vec![1]).is_err());
        assert!(PartitionMatroid::new(2, vec![vec![0, 1], vec![1]], vec![1, 1]).is_err());
    }

    #[test]
    fn weight_two_demand_two_caps_out_degree_below_degree() {
        let g = DemandGraph::new(vec![0, 1, 2], vec![(0, 1), (1, 2), (2, 0)], vec![2, 2, 2], 2).unwrap();
        let o = Orientation::forward(3);
        let cis = reduce_to_cis(&SingleWeightInstance::new(g, o.clone(), o).unwrap()).unwrap();
        assert_eq!(cis.second.capacities(), &[1, 1, 1]);
        assert_eq!(cis.floor, 2);
    }

    #[test]
    fn parallel_pair_caps_and_answer() {
        let inst = parallel_pair();
        let cis = reduce_to_cis(&inst).unwrap();
        assert_eq!(cis.second.capacities(), &[1, 1]);
        assert_eq!(cis.source.count_ones(), 2);
        assert!(cis.is_common_independent(cis.source));
        assert!(!solve_single_weight(&inst, DEFAULT_CAP).unwrap().answer);
        assert!(!solve_demand_oracle(&inst, DEFAULT_CAP).unwrap().answer);
    }

    #[test]
    fn equal_orientations_are_connected() {
        let mut inst = parallel_pair();
        inst.target = inst.initial.clone();
        let verdict = solve_single_weight(&inst, DEFAULT_CAP).unwrap();
        assert!(verdict.answer);
        assert_eq!(verdict.witness.unwrap(), vec![inst.initial]);
    }

    #[test]
    fn free_lattice_is_always_connected() {
        let m1 = PartitionMatroid::new(4, vec![vec![0, 1], vec![2, 3]], vec![2, 2]).unwrap();
        let m2 = PartitionMatroid::new(4, vec![vec![0, 1, 2, 3]], vec![4]).unwrap();
        let cis = CisInstance::new(m1, m2, 0b0011, 0b1100, 0).unwrap();
        assert_eq!(cis_solve_bfs(&cis, DEFAULT_CAP).unwrap().unwrap().len(), 5);
    }

    #[test]
    fn empty_set_is_an_empty_matching() {
        let cis = reduce_to_cis(&parallel_pair()).unwrap();
        let b = build_bmatching_graph(&cis);
        assert_eq!(b.left, vec![1, 1]);
        assert_eq!(b.right, vec![1, 1]);
        assert!(b.is_b_matching(0));
    }

    #[test]
    fn impossible_demands_and_loops_are_rejected() {
        assert!(DemandGraph::new(vec![0, 1], vec![(0, 1)], vec![3, 0], 1).is_err());
        assert!(DemandGraph::new(vec![0], vec![(0, 0)], vec![0], 1).is_err());
        assert!(DemandGraph::new(vec![0, 1], vec![(0, 1)], vec![0, 0], 0).is_err());
    }
}
