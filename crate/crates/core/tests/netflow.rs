use ncl_core::netflow::{Capacity, FlowNetwork};
use ncl_core::FlowNetworkI64;
use proptest::prelude::*;

type ArcSpec = (usize, usize, i64, Option<i64>);

fn arcs_strategy() -> impl Strategy<Value = Vec<ArcSpec>> {
    prop::collection::vec(
        (0usize..4, 0usize..4, 0i64..3, prop::option::weighted(0.7, 0i64..3))
            .prop_map(|(a, b, l, extra)| (a, b, l, extra.map(|x| l + x))),
        0..5,
    )
}

fn build(arcs: &[ArcSpec]) -> FlowNetworkI64 {
    let mut net = FlowNetworkI64::new(4);
    for &(a, b, l, u) in arcs {
        net.add_arc(a, b, l, u.map_or(Capacity::Unbounded, Capacity::Finite))
            .unwrap();
    }
    net
}

fn conserves(arcs: &[ArcSpec], flows: &[i64]) -> bool {
    (1..3).all(|v| {
        let balance: i64 = arcs
            .iter()
            .zip(flows)
            .map(|(&(a, b, _, _), &f)| i64::from(b == v) * f - i64::from(a == v) * f)
            .sum();
        balance == 0
    })
}

/// Every flow with values up to `bound` on each arc, as (respects bounds,
/// conserves, value into the sink).
fn brute(arcs: &[ArcSpec], bound: i64, lower: bool) -> Vec<i64> {
    let mut out = Vec::new();
    let mut flows = vec![0i64; arcs.len()];
    loop {
        let ok = arcs
            .iter()
            .zip(&flows)
            .all(|(&(_, _, l, u), &f)| (!lower || f >= l) && u.is_none_or(|u| f <= u));
        if ok && conserves(arcs, &flows) {
            out.push(
                arcs.iter()
                    .zip(&flows)
                    .map(|(&(a, b, _, _), &f)| i64::from(b == 3) * f - i64::from(a == 3) * f)
                    .sum(),
            );
        }
        let mut i = 0;
        while i < flows.len() && flows[i] == bound {
            flows[i] = 0;
            i += 1;
        }
        if i == flows.len() {
            return out;
        }
        flows[i] += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn feasible_flow_matches_brute_force(arcs in arcs_strategy()) {
        let net = build(&arcs);
        let bound = arcs.iter().map(|&(_, _, l, u)| l + u.unwrap_or(0)).sum::<i64>() + 1;
        let exists = brute(&arcs, bound, true).into_iter().any(|value| value >= 0);
        let found = net.feasible_flow(0, 3).unwrap();
        prop_assert_eq!(found.is_some(), exists);
        if let Some(flows) = found {
            prop_assert!(conserves(&arcs, &flows));
            for (&(_, _, l, u), &f) in arcs.iter().zip(&flows) {
                prop_assert!(f >= l && u.is_none_or(|u| f <= u));
            }
        }
    }

    #[test]
    fn max_flow_matches_brute_force(arcs in arcs_strategy()) {
        let arcs: Vec<ArcSpec> = arcs.into_iter().map(|(a, b, l, u)| (a, b, l, Some(u.unwrap_or(2)))).collect();
        let best = brute(&arcs, 4, false).into_iter().max().unwrap_or(0);
        prop_assert_eq!(build(&arcs).max_flow_value(0, 3).unwrap(), best);
    }

    #[test]
    fn narrow_scalars_agree_with_wide(arcs in arcs_strategy()) {
        let mut narrow: FlowNetwork<i16> = FlowNetwork::new(4);
        for &(a, b, l, u) in &arcs {
            narrow.add_arc(a, b, l as i16, u.map_or(Capacity::Unbounded, |u| Capacity::Finite(u as i16))).unwrap();
        }
        prop_assert_eq!(narrow.feasible_flow(0, 3).unwrap().is_some(), build(&arcs).feasible_flow(0, 3).unwrap().is_some());
    }
}

#[test]
fn lower_bound_above_upper_is_rejected() {
    let mut net = FlowNetworkI64::new(2);
    assert!(net.add_arc(0, 1, 2, Capacity::Finite(1)).is_err());
}
