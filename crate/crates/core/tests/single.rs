use std::collections::{HashSet, VecDeque};

use ncl_core::generate::{random_cis, single_weight_instance};
use ncl_core::single::{
    build_bmatching_graph, cis_solve_bfs, reduce_to_cis, solve_demand_oracle, solve_single_weight, CisInstance,
    ElementSet, PartitionMatroid, SingleWeightInstance, DEFAULT_CAP,
};
use ncl_core::Orientation;
use proptest::prelude::*;

fn all_orientations(m: usize) -> impl Iterator<Item = Orientation> {
    (0u32..1 << m).map(move |bits| Orientation::from_flags(&(0..m).map(|e| bits >> e & 1 == 1).collect::<Vec<_>>()))
}

/// In-degree test written from the demand definition alone.
fn meets_demands(inst: &SingleWeightInstance, o: &Orientation) -> bool {
    let g = &inst.graph;
    g.vertices().iter().zip(g.demands()).all(|(&v, &d)| {
        let in_degree = g
            .edges()
            .iter()
            .enumerate()
            .filter(|&(e, &(a, b))| (if o.is_reversed(e) { a } else { b }) == v)
            .count() as u32;
        in_degree * g.weight() >= d
    })
}

fn brute_reachable(inst: &SingleWeightInstance) -> bool {
    let m = inst.graph.edge_count();
    let mut seen = HashSet::from([inst.initial.clone()]);
    let mut queue = VecDeque::from([inst.initial.clone()]);
    while let Some(o) = queue.pop_front() {
        if o == inst.target {
            return true;
        }
        for e in 0..m {
            let next = o.flipped(e);
            if meets_demands(inst, &next) && seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    false
}

/// Edges of a reconfiguration graph whose vertices are the sets accepted by
/// `member`, adjacent when they differ in one element.
fn reconfiguration_graph(ground: usize, member: impl Fn(ElementSet) -> bool) -> Vec<(ElementSet, ElementSet)> {
    let mut out = Vec::new();
    for set in 0..1u64 << ground {
        if !member(set) {
            continue;
        }
        for x in 0..ground {
            let next = set | 1 << x;
            if next != set && member(next) {
                out.push((set, next));
            }
        }
    }
    out
}

fn raise_capacity(m: &PartitionMatroid, part: usize) -> PartitionMatroid {
    let mut caps = m.capacities().to_vec();
    caps[part] += 1;
    PartitionMatroid::new(m.ground(), m.parts().to_vec(), caps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn single_weight_matches_reachability(m in 1usize..9, seed in any::<u64>()) {
        let inst = single_weight_instance(m, seed).unwrap();
        let expected = brute_reachable(&inst);
        let verdict = solve_single_weight(&inst, DEFAULT_CAP).unwrap();
        prop_assert_eq!(verdict.answer, expected);
        prop_assert_eq!(solve_demand_oracle(&inst, DEFAULT_CAP).unwrap().answer, expected);
        if let Some(w) = verdict.witness {
            prop_assert_eq!(w.first(), Some(&inst.initial));
            prop_assert_eq!(w.last(), Some(&inst.target));
            for o in &w {
                prop_assert!(meets_demands(&inst, o));
            }
            for pair in w.windows(2) {
                prop_assert_eq!(pair[0].difference(&pair[1]).len(), 1);
            }
        }
    }

    #[test]
    fn full_common_independent_sets_are_feasible_orientations(m in 1usize..9, seed in any::<u64>()) {
        let inst = single_weight_instance(m, seed).unwrap();
        let cis = reduce_to_cis(&inst).unwrap();
        for o in all_orientations(m) {
            prop_assert_eq!(cis.is_common_independent(inst.graph.arcs_of(&o)), meets_demands(&inst, &o));
        }
        let full = (0..1u64 << (2 * m))
            .filter(|&s| s.count_ones() as usize == m && cis.is_common_independent(s))
            .count();
        prop_assert_eq!(full, all_orientations(m).filter(|o| meets_demands(&inst, o)).count());
    }

    #[test]
    fn bmatching_graph_is_isomorphic(ground in 1usize..11, seed in any::<u64>()) {
        let cis = random_cis(ground, seed).unwrap();
        let b = build_bmatching_graph(&cis);
        prop_assert_eq!(b.edges.len(), ground);
        let left = reconfiguration_graph(ground, |s| cis.is_common_independent(s));
        let right = reconfiguration_graph(ground, |s| b.is_b_matching(s));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn raising_a_capacity_keeps_yes(ground in 1usize..9, seed in any::<u64>(), pick in any::<usize>()) {
        let cis = random_cis(ground, seed).unwrap();
        let before = cis_solve_bfs(&cis, DEFAULT_CAP).unwrap().is_some();
        let part = pick % cis.second.parts().len();
        let raised = CisInstance::new(cis.first.clone(), raise_capacity(&cis.second, part), cis.source, cis.target, cis.floor).unwrap();
        let after = cis_solve_bfs(&raised, DEFAULT_CAP).unwrap().is_some();
        prop_assert!(!before || after);
    }
}
