//! JSON instance documents.
//!
//! A document lists `vertices`, `edges` as `{"id", "u", "v", "weight"}`,
//! the `ini` orientation as a map from edge id to `"u>v"` or `"v>u"`, the
//! `problem` (`"c2c"` with a `tar` map, or `"c2e"` with a `target_edge`).
//! A document carrying `demands` (aligned with `vertices`) and a
//! `uniform_weight` describes a single-weight instance, in which every edge
//! weight must equal the uniform weight. Canonical text has sorted keys,
//! two-space indentation and a final newline.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{NclError, Result};
use crate::graph::{ConstraintGraph, Edge, EdgeId, Instance, Orientation, Query, VertexId, Weight, MIN_IN_WEIGHT};
use crate::single::{DemandGraph, SingleWeightInstance};

/// Direction of one edge: along `u -> v` or against it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "u>v")]
    Forward,
    #[serde(rename = "v>u")]
    Backward,
}

/// Orientation keyed by decimal edge id.
pub type OrientationMap = BTreeMap<String, Direction>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemName {
    C2c,
    C2e,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDocument {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub weight: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeDocument>,
    pub ini: OrientationMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tar: Option<OrientationMap>,
    pub problem: ProblemName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_edge: Option<EdgeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demands: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform_weight: Option<u32>,
}

/// A validated instance of either kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedInstance {
    Ncl(Instance),
    SingleWeight(SingleWeightInstance),
}

fn input_error(path: impl Into<String>, message: impl Into<String>) -> NclError {
    NclError::Input {
        path: path.into(),
        message: message.into(),
    }
}

/// Deserializes `text` as `T`, reporting the JSON path of any schema error.
pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| input_error(e.path().to_string(), e.inner().to_string()))?;
    de.end().map_err(|e| input_error(".", e.to_string()))?;
    Ok(value)
}

/// Canonical text of any serializable value: keys sorted, two-space
/// indentation, final newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("documents serialize to JSON");
    let mut text = serde_json::to_string_pretty(&value).expect("JSON values print");
    text.push('\n');
    text
}

/// Map form of an orientation.
pub fn orientation_map(orientation: &Orientation) -> OrientationMap {
    (0..orientation.len())
        .map(|e| {
            (
                e.to_string(),
                if orientation.is_reversed(e) {
                    Direction::Backward
                } else {
                    Direction::Forward
                },
            )
        })
        .collect()
}

/// Orientation from its map form, checking that it names every edge once
/// and never reverses a loop.
pub fn orientation_from_map(map: &OrientationMap, loops: &[bool], path: &str) -> Result<Orientation> {
    let mut flags = vec![None; loops.len()];
    for (key, &direction) in map {
        let e: EdgeId = key
            .parse()
            .map_err(|_| input_error(format!("{path}.{key}"), "edge ids are decimal integers"))?;
        if e >= loops.len() || key != &e.to_string() {
            return Err(input_error(format!("{path}.{key}"), format!("no edge with id {key}")));
        }
        if loops[e] && direction == Direction::Backward {
            return Err(input_error(
                format!("{path}.{key}"),
                "a loop can only be written \"u>v\"",
            ));
        }
        flags[e] = Some(direction == Direction::Backward);
    }
    let flags: Vec<bool> = flags
        .into_iter()
        .enumerate()
        .map(|(e, f)| f.ok_or_else(|| input_error(path, format!("edge {e} has no direction"))))
        .collect::<Result<_>>()?;
    Ok(Orientation::from_flags(&flags))
}

/// Orders edges by id, which must run over `0..edges.len()`.
fn edges_by_id(doc: &InstanceDocument) -> Result<Vec<&EdgeDocument>> {
    let mut slots: Vec<Option<&EdgeDocument>> = vec![None; doc.edges.len()];
    for (i, e) in doc.edges.iter().enumerate() {
        if e.id >= slots.len() || slots[e.id].is_some() {
            return Err(input_error(
                format!("edges[{i}].id"),
                format!("edge ids must be distinct and below {}", slots.len()),
            ));
        }
        slots[e.id] = Some(e);
    }
    Ok(slots.into_iter().map(|e| e.expect("ids form a permutation")).collect())
}

fn check_vertices(doc: &InstanceDocument) -> Result<()> {
    let mut sorted = doc.vertices.clone();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(input_error(
            "vertices",
            format!("vertex {} is listed more than once", w[0]),
        ));
    }
    for (i, e) in doc.edges.iter().enumerate() {
        for (end, x) in [("u", e.u), ("v", e.v)] {
            if sorted.binary_search(&x).is_err() {
                return Err(input_error(
                    format!("edges[{i}].{end}"),
                    format!("vertex {x} is not listed"),
                ));
            }
        }
    }
    Ok(())
}

fn starved(label: &str, deficits: impl Iterator<Item = (VertexId, u32, u32)>) -> Result<()> {
    for (v, got, need) in deficits {
        if got < need {
            return Err(input_error(
                label,
                format!("vertex {v} receives in-weight {got}, below its demand {need}"),
            ));
        }
    }
    Ok(())
}

/// Parses and validates a document.
pub fn parse_instance(text: &str) -> Result<ParsedInstance> {
    let doc: InstanceDocument = from_json(text)?;
    parse_document(&doc)
}

/// Validates an already deserialized document.
pub fn parse_document(doc: &InstanceDocument) -> Result<ParsedInstance> {
    check_vertices(doc)?;
    let edges = edges_by_id(doc)?;
    let loops: Vec<bool> = edges.iter().map(|e| e.u == e.v).collect();
    let initial = orientation_from_map(&doc.ini, &loops, "ini")?;
    let target = match (doc.problem, &doc.tar, doc.target_edge) {
        (ProblemName::C2c, Some(tar), None) => Some(orientation_from_map(tar, &loops, "tar")?),
        (ProblemName::C2c, None, _) => return Err(input_error("tar", "a c2c instance needs a target orientation")),
        (ProblemName::C2c, Some(_), Some(_)) => {
            return Err(input_error("target_edge", "a c2c instance has no target edge"))
        }
        (ProblemName::C2e, None, Some(e)) => {
            if e >= edges.len() {
                return Err(input_error("target_edge", format!("no edge with id {e}")));
            }
            None
        }
        (ProblemName::C2e, _, None) => return Err(input_error("target_edge", "a c2e instance needs a target edge")),
        (ProblemName::C2e, Some(_), Some(_)) => {
            return Err(input_error("tar", "a c2e instance has no target orientation"))
        }
    };
    match (&doc.demands, doc.uniform_weight) {
        (None, None) => {
            let mut list = Vec::with_capacity(edges.len());
            for e in &edges {
                let weight = Weight::from_value(u64::from(e.weight)).ok_or_else(|| {
                    input_error(format!("edges[{}].weight", e.id), "weight must be 1 (red) or 2 (blue)")
                })?;
                list.push(Edge::new(e.u, e.v, weight));
            }
            let graph = ConstraintGraph::new(doc.vertices.clone(), list)?;
            let check = |o: &Orientation, label: &str| {
                let weights = graph.in_weights(o);
                starved(
                    label,
                    graph
                        .vertices()
                        .iter()
                        .zip(weights)
                        .map(|(&v, w)| (v, w, MIN_IN_WEIGHT)),
                )
            };
            check(&initial, "ini")?;
            let query = match target {
                Some(t) => {
                    check(&t, "tar")?;
                    Query::Configuration(t)
                }
                None => Query::Edge(doc.target_edge.expect("checked above")),
            };
            Ok(ParsedInstance::Ncl(Instance::new(graph, initial, query)?))
        }
        (Some(demands), Some(k)) => {
            let Some(target) = target else {
                return Err(input_error("problem", "single-weight instances are c2c"));
            };
            if let Some(e) = edges.iter().find(|e| e.weight != k) {
                return Err(input_error(
                    format!("edges[{}].weight", e.id),
                    "every edge must carry the uniform weight",
                ));
            }
            if let Some(e) = edges.iter().find(|e| e.u == e.v) {
                return Err(input_error(
                    format!("edges[{}]", e.id),
                    "single-weight instances have no loops",
                ));
            }
            let graph = DemandGraph::new(
                doc.vertices.clone(),
                edges.iter().map(|e| (e.u, e.v)).collect(),
                demands.clone(),
                k,
            )
            .map_err(|err| input_error("demands", err.to_string()))?;
            for (o, label) in [(&initial, "ini"), (&target, "tar")] {
                let degrees = graph.in_degrees(o);
                starved(
                    label,
                    graph
                        .vertices()
                        .iter()
                        .zip(degrees)
                        .zip(graph.demands())
                        .map(|((&v, d), &need)| (v, d * k, need)),
                )?;
            }
            Ok(ParsedInstance::SingleWeight(SingleWeightInstance::new(
                graph, initial, target,
            )?))
        }
        (Some(_), None) => Err(input_error("uniform_weight", "demands need a uniform weight")),
        (None, Some(_)) => Err(input_error("demands", "a uniform weight needs demands")),
    }
}

/// Document describing an NCL instance.
pub fn instance_document(instance: &Instance) -> InstanceDocument {
    let g = &instance.graph;
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .map(|(id, e)| EdgeDocument {
            id,
            u: e.u,
            v: e.v,
            weight: e.weight.value(),
        })
        .collect();
    let (problem, tar, target_edge) = match &instance.query {
        Query::Configuration(t) => (ProblemName::C2c, Some(orientation_map(t)), None),
        Query::Edge(e) => (ProblemName::C2e, None, Some(*e)),
    };
    InstanceDocument {
        vertices: g.vertices().to_vec(),
        edges,
        ini: orientation_map(&instance.initial),
        tar,
        problem,
        target_edge,
        demands: None,
        uniform_weight: None,
    }
}

/// Document describing a single-weight instance.
pub fn single_weight_document(instance: &SingleWeightInstance) -> InstanceDocument {
    let g = &instance.graph;
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .map(|(id, &(u, v))| EdgeDocument {
            id,
            u,
            v,
            weight: g.weight(),
        })
        .collect();
    InstanceDocument {
        vertices: g.vertices().to_vec(),
        edges,
        ini: orientation_map(&instance.initial),
        tar: Some(orientation_map(&instance.target)),
        problem: ProblemName::C2c,
        target_edge: None,
        demands: Some(g.demands().to_vec()),
        uniform_weight: Some(g.weight()),
    }
}

pub fn document_of(parsed: &ParsedInstance) -> InstanceDocument {
    match parsed {
        ParsedInstance::Ncl(i) => instance_document(i),
        ParsedInstance::SingleWeight(s) => single_weight_document(s),
    }
}

/// Canonical text of an instance.
pub fn write_instance(parsed: &ParsedInstance) -> String {
    to_canonical_json(&document_of(parsed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
}

impl From<bool> for Answer {
    fn from(value: bool) -> Self {
        if value {
            Answer::Yes
        } else {
            Answer::No
        }
    }
}

/// What `solve` prints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOutput {
    pub answer: Answer,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<OrientationMap>>,
    pub method: String,
}

impl SolveOutput {
    pub fn new(answer: bool, witness: Option<&[Orientation]>, method: &str) -> Self {
        SolveOutput {
            answer: answer.into(),
            witness: witness.map(|w| w.iter().map(orientation_map).collect()),
            method: method.to_string(),
        }
    }
}

/// Reads a witness for a graph whose loops are flagged in `loops`. The text
/// is either a solve output carrying a `witness` or a bare list of
/// orientations.
pub fn parse_witness(text: &str, loops: &[bool]) -> Result<Vec<Orientation>> {
    let value: serde_json::Value = from_json(text)?;
    let maps: Vec<OrientationMap> = match value {
        serde_json::Value::Object(mut fields) => {
            let witness = fields
                .remove("witness")
                .ok_or_else(|| input_error("witness", "the document carries no witness"))?;
            serde_path_to_error::deserialize(witness)
                .map_err(|e| input_error(format!("witness{}", e.path()), e.inner().to_string()))?
        }
        list => serde_path_to_error::deserialize(list)
            .map_err(|e| input_error(e.path().to_string(), e.inner().to_string()))?,
    };
    maps.iter()
        .enumerate()
        .map(|(i, m)| orientation_from_map(m, loops, &format!("witness[{i}]")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BLUE_LOOP: &str = r#"{"vertices":[0],"edges":[{"id":0,"u":0,"v":0,"weight":2}],"ini":{"0":"u>v"},"tar":{"0":"u>v"},"problem":"c2c"}"#;

    #[test]
    fn minimal_blue_loop_parses() {
        let parsed = parse_instance(BLUE_LOOP).unwrap();
        assert!(matches!(parsed, ParsedInstance::Ncl(_)));
        assert_eq!(parse_instance(&write_instance(&parsed)).unwrap(), parsed);
    }

    #[test]
    fn starved_vertex_is_named() {
        let text = r#"{"vertices":[0,1],"edges":[{"id":0,"u":0,"v":1,"weight":2},{"id":1,"u":1,"v":1,"weight":2}],
            "ini":{"0":"u>v","1":"u>v"},"tar":{"0":"u>v","1":"u>v"},"problem":"c2c"}"#;
        let err = parse_instance(text).unwrap_err();
        assert_eq!(
            err,
            input_error("ini", "vertex 0 receives in-weight 0, below its demand 2")
        );
    }

    #[test]
    fn schema_errors_carry_paths() {
        let text = r#"{"vertices":[0],"edges":[{"id":0,"u":0,"v":0,"weight":"blue"}],"ini":{},"problem":"c2c"}"#;
        let NclError::Input { path, .. } = parse_instance(text).unwrap_err() else {
            panic!("expected an input error")
        };
        assert_eq!(path, "edges[0].weight");
        let reversed_loop = BLUE_LOOP.replace(r#""ini":{"0":"u>v"}"#, r#""ini":{"0":"v>u"}"#);
        let NclError::Input { path, .. } = parse_instance(&reversed_loop).unwrap_err() else {
            panic!("expected an input error")
        };
        assert_eq!(path, "ini.0");
    }

    #[test]
    fn canonical_text_sorts_keys() {
        let text = write_instance(&parse_instance(BLUE_LOOP).unwrap());
        let edges = text.find("\"edges\"").unwrap();
        let ini = text.find("\"ini\"").unwrap();
        let vertices = text.find("\"vertices\"").unwrap();
        assert!(edges < ini && ini < vertices);
        assert!(text.ends_with("}\n"));
        assert!(!text.contains(" \n") && !text.contains('\r'));
    }

    #[test]
    fn witness_errors_name_their_path() {
        let no_witness = parse_witness(r#"{"answer":"no","method":"oracle"}"#, &[false]).unwrap_err();
        assert_eq!(no_witness.to_string(), "witness: the document carries no witness");
        let bad_direction = parse_witness(r#"{"witness":[{"0":"up"}]}"#, &[false]).unwrap_err();
        assert!(
            bad_direction.to_string().starts_with("witness[0].0: "),
            "{bad_direction}"
        );
        let bare = parse_witness(r#"[{"0":"up"}]"#, &[false]).unwrap_err();
        assert!(bare.to_string().starts_with("[0].0: "), "{bare}");
    }
}
