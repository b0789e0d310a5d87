//! Graphviz export. Red edges weigh 1 and blue edges weigh 2; uniform-weight
//! edges are drawn black. Without an orientation edges carry no arrowheads.

use std::fmt::Write;

use crate::graph::{ConstraintGraph, Orientation, VertexId};
use crate::single::DemandGraph;

struct DotEdge {
    tail: VertexId,
    head: VertexId,
    color: &'static str,
    directed: bool,
}

fn render(vertices: &[VertexId], edges: &[DotEdge]) -> String {
    let mut out = String::from("digraph ncl {\n");
    for v in vertices {
        writeln!(out, "  {v};").expect("writing to a string");
    }
    for (id, e) in edges.iter().enumerate() {
        let dir = if e.directed { "forward" } else { "none" };
        writeln!(
            out,
            "  {} -> {} [color={}, dir={dir}, label=\"{id}\"];",
            e.tail, e.head, e.color
        )
        .expect("writing to a string");
    }
    out.push_str("}\n");
    out
}

/// Constraint graph, oriented by `orientation` when given.
pub fn export_dot(graph: &ConstraintGraph, orientation: Option<&Orientation>) -> String {
    let edges: Vec<DotEdge> = (0..graph.edge_count())
        .map(|e| {
            let (tail, head) = match orientation {
                Some(o) => graph.arc(o, e),
                None => (graph.edge(e).u, graph.edge(e).v),
            };
            let color = if graph.edge(e).weight.is_blue() { "blue" } else { "red" };
            DotEdge {
                tail,
                head,
                color,
                directed: orientation.is_some(),
            }
        })
        .collect();
    render(graph.vertices(), &edges)
}

/// Uniform-weight graph, oriented by `orientation` when given.
pub fn export_demand_dot(graph: &DemandGraph, orientation: Option<&Orientation>) -> String {
    let edges: Vec<DotEdge> = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| {
            let reversed = orientation.is_some_and(|o| o.is_reversed(e));
            let (tail, head) = if reversed { (v, u) } else { (u, v) };
            DotEdge {
                tail,
                head,
                color: "black",
                directed: orientation.is_some(),
            }
        })
        .collect();
    render(graph.vertices(), &edges)
}
