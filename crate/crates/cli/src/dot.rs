//! Graphviz export.

use std::fmt::Write;

use thincomb_core::graph::{EdgeLabel, Graph};

/// DOT text for `graph`. Vertices appear in index order with their labels,
/// cone vertices as filled diamonds; edges are sorted.
pub fn export_dot(graph: &Graph, name: &str, label: impl Fn(usize) -> String) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{}\" {{", escape(name));
    let _ = writeln!(out, "  node [shape=circle, fontsize=10];");
    for v in 0..graph.vertex_count() {
        let style = if graph.is_cone(v) { ", shape=diamond, style=filled, fillcolor=gold" } else { "" };
        let _ = writeln!(out, "  v{v} [label=\"{}\"{style}];", escape(&label(v)));
    }
    for (u, v) in graph.edges() {
        let attr = match graph.edge_label(u, v) {
            Some(EdgeLabel::Cone(_)) => " [style=dashed]",
            Some(EdgeLabel::Rips) => " [style=dotted]",
            _ => "",
        };
        let _ = writeln!(out, "  v{u} -- v{v}{attr};");
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Vertex and edge counts of a DOT file written by [`export_dot`].
pub fn count_dot(text: &str) -> (usize, usize) {
    let mut vertices = 0;
    let mut edges = 0;
    for line in text.lines().map(str::trim) {
        if line.contains(" -- ") {
            edges += 1;
        } else if line.starts_with('v') && line.contains("[label=") {
            vertices += 1;
        }
    }
    (vertices, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use thincomb_core::cone::{cone_off, ConeFamily};
    use thincomb_core::graph::build_ball;
    use thincomb_core::{Alphabet, GroupSpec};

    #[test]
    fn round_trip_counts() {
        let s = GroupSpec::free(Alphabet::standard(2));
        let b = build_ball(&s, 2, 1000).unwrap();
        let c = cone_off(&b, &[ConeFamily { tag: "H".into(), generator: s.element("a").unwrap().word }]).unwrap();
        let dot = export_dot(c.graph(), "f2", |v| v.to_string());
        assert_eq!(count_dot(&dot), (c.vertex_count(), c.graph().edge_count()));
        assert_eq!(dot.matches("diamond").count(), c.cones().len());
    }

    #[test]
    fn cone_vertices_rendered_per_coset() {
        let s = GroupSpec::free(Alphabet::standard(2));
        let b = build_ball(&s, 2, 1000).unwrap();
        let c = cone_off(&b, &[ConeFamily { tag: "H".into(), generator: s.element("a").unwrap().word }]).unwrap();
        // e, b, b⁻¹, ab, ab⁻¹, a⁻¹b, a⁻¹b⁻¹, b², b⁻² times ⟨a⟩
        assert_eq!(export_dot(c.graph(), "f2", |v| v.to_string()).matches("diamond").count(), 9);
        let s = GroupSpec::free(Alphabet::standard(1));
        let b = build_ball(&s, 2, 1000).unwrap();
        let c = cone_off(&b, &[ConeFamily { tag: "H".into(), generator: s.element("a").unwrap().word }]).unwrap();
        assert_eq!(export_dot(c.graph(), "z", |v| v.to_string()).matches("diamond").count(), 1);
    }

    #[test]
    fn no_cones_matches_plain_ball() {
        let s = GroupSpec::free(Alphabet::standard(2));
        let b = build_ball(&s, 2, 1000).unwrap();
        let c = cone_off(&b, &[]).unwrap();
        assert_eq!(export_dot(c.graph(), "g", |v| v.to_string()), export_dot(&b.graph, "g", |v| v.to_string()));
    }
}
