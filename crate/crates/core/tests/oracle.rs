use ncl_core::generate::{general_instance, random_walk, Draw, ProblemKind};
use ncl_core::oracle::{solve_bfs, DEFAULT_CAP};
use ncl_core::{ConstraintGraph, Edge, Instance, Orientation, Query};
use proptest::prelude::*;

fn generated(red: usize, blue: usize, seed: u64, walk: bool) -> Option<Instance> {
    let inst = general_instance(red, blue, seed, ProblemKind::C2C).ok()?;
    if !walk {
        return Some(inst);
    }
    let mut draw = Draw::new(seed ^ 0x0dd);
    let target = random_walk(&inst.graph, &inst.initial, 8, &mut draw);
    Instance::new(inst.graph, inst.initial, Query::Configuration(target)).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn yes_answers_carry_valid_witnesses(red in 0usize..6, blue in 1usize..6, seed in any::<u64>(), c2e in any::<bool>()) {
        let problem = if c2e { ProblemKind::C2E } else { ProblemKind::C2C };
        let inst = general_instance(red, blue, seed, problem);
        prop_assume!(inst.is_ok());
        let inst = inst.unwrap();
        let verdict = solve_bfs(&inst, DEFAULT_CAP).unwrap();
        if verdict.answer {
            prop_assert!(inst.check_witness(&verdict.witness.unwrap()).is_ok());
        } else {
            prop_assert!(verdict.witness.is_none());
        }
    }

    #[test]
    fn reachability_is_symmetric(red in 0usize..6, blue in 1usize..6, seed in any::<u64>(), walk in any::<bool>()) {
        let inst = generated(red, blue, seed, walk);
        prop_assume!(inst.is_some());
        let inst = inst.unwrap();
        let Query::Configuration(target) = inst.query.clone() else { unreachable!() };
        let back = Instance::new(inst.graph.clone(), target, Query::Configuration(inst.initial.clone())).unwrap();
        prop_assert_eq!(solve_bfs(&inst, DEFAULT_CAP).unwrap().answer, solve_bfs(&back, DEFAULT_CAP).unwrap().answer);
    }

    #[test]
    fn relabeling_edges_keeps_the_answer(red in 0usize..6, blue in 1usize..6, seed in any::<u64>(), walk in any::<bool>()) {
        let inst = generated(red, blue, seed, walk);
        prop_assume!(inst.is_some());
        let inst = inst.unwrap();
        let m = inst.graph.edge_count();
        let mut perm: Vec<usize> = (0..m).collect();
        Draw::new(seed).shuffle(&mut perm);
        let edges: Vec<Edge> = perm.iter().map(|&old| *inst.graph.edge(old)).collect();
        let graph = ConstraintGraph::new(inst.graph.vertices().to_vec(), edges).unwrap();
        let relabel = |o: &Orientation| Orientation::from_flags(&perm.iter().map(|&old| o.is_reversed(old)).collect::<Vec<_>>());
        let Query::Configuration(target) = &inst.query else { unreachable!() };
        let moved = Instance::new(graph, relabel(&inst.initial), Query::Configuration(relabel(target))).unwrap();
        prop_assert_eq!(solve_bfs(&inst, DEFAULT_CAP).unwrap().answer, solve_bfs(&moved, DEFAULT_CAP).unwrap().answer);
    }
}
