//! Graphviz export.

use std::fmt::Write;

use super::KripkeModel;

/// Renders the model as a DOT digraph. Clusters with more than one node, or any reflexive
/// node, become `subgraph cluster_i`; `highlight` is drawn as a double circle.
pub fn to_dot(model: &KripkeModel, highlight: Option<usize>) -> String {
    let mut out = String::from("digraph kripke {\n  node [shape=circle];\n");
    let label = |k: usize| {
        let atoms: Vec<&str> = model
            .valuation()
            .iter()
            .filter(|(_, set)| set.contains(&k))
            .map(|(a, _)| a.as_str())
            .collect();
        if atoms.is_empty() {
            model.name(k).to_string()
        } else {
            format!("{}\\n{}", model.name(k), atoms.join(","))
        }
    };
    let node_line = |out: &mut String, indent: &str, k: usize| {
        let shape = if highlight == Some(k) {
            ", shape=doublecircle"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "{indent}\"{}\" [label=\"{}\"{shape}];",
            model.name(k),
            label(k)
        );
    };
    match model.clusters() {
        Some(clusters) => {
            for (i, cluster) in clusters.iter().enumerate() {
                let boxed = cluster.len() > 1 || cluster.iter().any(|&k| model.is_reflexive(k));
                if boxed {
                    let _ = writeln!(out, "  subgraph cluster_{i} {{\n    style=rounded;");
                    for &k in cluster {
                        node_line(&mut out, "    ", k);
                    }
                    out.push_str("  }\n");
                } else {
                    for &k in cluster {
                        node_line(&mut out, "  ", k);
                    }
                }
            }
        }
        None => {
            for k in 0..model.len() {
                node_line(&mut out, "  ", k);
            }
        }
    }
    for (a, b) in model.edges() {
        let _ = writeln!(out, "  \"{}\" -> \"{}\";", model.name(a), model.name(b));
    }
    out.push_str("}\n");
    out
}
