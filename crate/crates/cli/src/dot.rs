//! Graphviz rendering of instances, flows and auxiliary digraphs.

use std::fmt::Write;

use mif_core::{ArcKind, AuxiliaryGraph, Digraph, Flow};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn header(out: &mut String, name: &str, g: &Digraph) {
    writeln!(out, "digraph {name} {{").unwrap();
    out.push_str("  rankdir=LR;\n");
    for v in 0..g.node_count() {
        let v = mif_core::NodeId(v);
        if v == g.sink() {
            writeln!(out, "  {} [shape=doublecircle];", quote(g.name(v))).unwrap();
        } else {
            writeln!(out, "  {};", quote(g.name(v))).unwrap();
        }
    }
}

/// Edges labelled `c`, or `f/c` when a flow is given.
pub fn network(g: &Digraph, flow: Option<&Flow>) -> String {
    let mut out = String::new();
    header(&mut out, "network", g);
    for (id, e) in g.edges().iter().enumerate() {
        let label = match flow {
            Some(f) => format!("{}/{}", f.get(id), e.capacity),
            None => e.capacity.to_string(),
        };
        writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(g.name(e.tail)),
            quote(g.name(e.head)),
            quote(&label)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// Arcs labelled by capacity, with the arc kind as the `class` attribute.
pub fn auxiliary(g: &Digraph, aux: &AuxiliaryGraph) -> String {
    let mut out = String::new();
    header(&mut out, "auxiliary", g);
    for a in aux.arcs() {
        let (class, style) = match a.kind {
            ArcKind::Forward => ("Forward", "solid"),
            ArcKind::Backward => ("Backward", "dotted"),
            ArcKind::Dependence => ("Dependence", "dashed"),
        };
        let label = a.capacity.map(|c| c.to_string()).unwrap_or_default();
        writeln!(
            out,
            "  {} -> {} [label={}, class={class}, style={style}];",
            quote(g.name(a.tail)),
            quote(g.name(a.head)),
            quote(&label)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
