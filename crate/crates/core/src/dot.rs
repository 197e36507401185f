//! Graphviz export. Vertices and edges are written in canonical order, so
//! equal graphs give identical files.

use std::fmt::Write;

use crate::graph::Graph;
use crate::map::SimplicialMap;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn quote(s: &str) -> String {
    format!("\"{}\"", escape(s))
}

/// Undirected DOT for `g`, optionally labelling each vertex with its image.
fn render(g: &Graph, name: &str, label: Option<&SimplicialMap>) -> String {
    let mut out = String::new();
    writeln!(out, "graph {} {{", quote(name)).unwrap();
    for (i, v) in g.vertices().iter().enumerate() {
        match label {
            Some(f) => {
                let image = escape(f.codomain().name(f.at(i)).as_str());
                writeln!(out, "  {} [label=\"{}\\n{image}\"];", quote(v.as_str()), escape(v.as_str())).unwrap()
            }
            None => writeln!(out, "  {};", quote(v.as_str())).unwrap(),
        }
    }
    for &(a, b) in g.edges() {
        writeln!(out, "  {} -- {};", quote(g.name(a).as_str()), quote(g.name(b).as_str())).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn graph_to_dot(g: &Graph, name: &str) -> String {
    render(g, name, None)
}

/// The domain of `f`, each vertex labelled `x` over `f(x)`.
pub fn map_to_dot(f: &SimplicialMap, name: &str) -> String {
    render(f.domain(), name, Some(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::build_family;

    #[test]
    fn stable_and_complete() {
        let f = build_family(3).unwrap();
        let a = graph_to_dot(f.x1.graph(), "x1");
        assert_eq!(a, graph_to_dot(f.x1.graph(), "x1"));
        assert_eq!(a.matches(" -- ").count(), f.x1.graph().edge_count());
        assert!(a.starts_with("graph \"x1\" {\n  \"u1\";"));
        let m = map_to_dot(&f.phi, "phi");
        assert!(m.contains("\"u1\" [label=\"u1\\nv2\"];"), "{m}");
    }
}
