use ncl_core::generate::{and_or_instance, general_instance, single_weight_instance, ProblemKind};
use ncl_core::io::{parse_instance, parse_witness, to_canonical_json, write_instance, ParsedInstance, SolveOutput};
use ncl_core::oracle::{solve_bfs, DEFAULT_CAP};
use ncl_core::NclError;
use proptest::prelude::*;

fn round_trip(parsed: ParsedInstance) -> Result<(), TestCaseError> {
    let text = write_instance(&parsed);
    let again = parse_instance(&text).unwrap();
    prop_assert_eq!(&again, &parsed);
    prop_assert_eq!(write_instance(&again), text);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn general_documents_round_trip(red in 0usize..6, blue in 1usize..6, seed in any::<u64>(), c2e in any::<bool>()) {
        let problem = if c2e { ProblemKind::C2E } else { ProblemKind::C2C };
        let generated = general_instance(red, blue, seed, problem);
        prop_assume!(generated.is_ok());
        round_trip(ParsedInstance::Ncl(generated.unwrap()))?;
    }

    #[test]
    fn and_or_documents_round_trip(n in 2usize..10, seed in any::<u64>()) {
        let generated = and_or_instance(n, seed, ProblemKind::C2E);
        prop_assume!(generated.is_ok());
        round_trip(ParsedInstance::Ncl(generated.unwrap()))?;
    }

    #[test]
    fn single_weight_documents_round_trip(m in 1usize..8, seed in any::<u64>()) {
        round_trip(ParsedInstance::SingleWeight(single_weight_instance(m, seed).unwrap()))?;
    }

    #[test]
    fn witnesses_round_trip(red in 0usize..4, blue in 1usize..5, seed in any::<u64>()) {
        let generated = general_instance(red, blue, seed, ProblemKind::C2E);
        prop_assume!(generated.is_ok());
        let inst = generated.unwrap();
        let verdict = solve_bfs(&inst, DEFAULT_CAP).unwrap();
        let output = SolveOutput::new(verdict.answer, verdict.witness.as_deref(), "oracle");
        let loops: Vec<bool> = inst.graph.edges().iter().map(|e| e.is_loop()).collect();
        if let Some(w) = &verdict.witness {
            prop_assert_eq!(&parse_witness(&to_canonical_json(&output), &loops).unwrap(), w);
        }
    }
}

#[test]
fn dangling_ids_report_their_path() {
    let text = r#"{"vertices":[0],"edges":[{"id":0,"u":0,"v":7,"weight":2}],"ini":{"0":"u>v"},"tar":{"0":"u>v"},"problem":"c2c"}"#;
    let err = parse_instance(text).unwrap_err();
    assert!(
        matches!(err, NclError::Input { ref path, .. } if path == "edges[0].v"),
        "{err}"
    );
    let text = r#"{"vertices":[0],"edges":[{"id":0,"u":0,"v":0,"weight":2}],"ini":{"0":"u>v"},"problem":"c2e","target_edge":3}"#;
    let err = parse_instance(text).unwrap_err();
    assert!(
        matches!(err, NclError::Input { ref path, .. } if path == "target_edge"),
        "{err}"
    );
}

#[test]
fn unknown_fields_are_rejected() {
    let text = r#"{"vertices":[],"edges":[],"ini":{},"tar":{},"problem":"c2c","extra":1}"#;
    assert!(matches!(parse_instance(text), Err(NclError::Input { .. })));
}

#[test]
fn empty_graph_parses() {
    let text = r#"{"vertices":[],"edges":[],"ini":{},"tar":{},"problem":"c2c"}"#;
    assert!(parse_instance(text).is_ok());
}
