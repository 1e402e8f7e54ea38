//! DOT rendering of a forest. Output is byte-stable for a given forest:
//! nodes and edges are emitted in identifier order.

use std::fmt::Write;

use crate::tree::{render_goal, Forest, Selection};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn render_dot(forest: &Forest) -> String {
    let mut out = String::new();
    out.push_str("digraph slt_forest {\n");
    out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
    for (i, n) in forest.nodes.iter().enumerate() {
        let goal = render_goal(&n.goal);
        let mut body = if goal.is_empty() { String::new() } else { goal };
        if let Some(k) = n.leaf {
            if body.is_empty() {
                body = k.to_string();
            } else {
                let _ = write!(body, "  {k}");
            }
        }
        let loop_mark = if n.is_loop_node { " [loop]" } else { "" };
        let _ = writeln!(out, "  n{i} [label=\"N{i}{loop_mark}: {}\"];", escape(&body));
    }
    for (i, n) in forest.nodes.iter().enumerate() {
        if let Some(p) = n.parent {
            let _ = writeln!(out, "  n{p} -> n{i} [label=\"{}\"];", escape(&n.edge.label()));
        }
    }
    for t in &forest.trees {
        let Some(pn) = t.parent_node else { continue };
        let label = match forest.nodes[pn].selection.as_ref() {
            Some(Selection::Neg { atom, .. }) => format!("\\+ {atom}"),
            _ => String::new(),
        };
        let _ = writeln!(
            out,
            "  n{pn} -> n{} [style=dotted, label=\"{}\"];",
            t.root,
            escape(&label)
        );
    }
    out.push_str("}\n");
    out
}
