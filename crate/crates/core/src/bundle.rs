//! Bundle diagrams: the compatibility graph with an outcome fiber over each
//! measurement and an edge for every possible joint outcome. Global
//! assignments are loops through every fiber; an edge on no loop is a
//! logical-contextuality witness.

use serde::Serialize;

use crate::behavior::PossibilisticBehavior;
use crate::classical;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fiber {
    pub measurement: String,
    pub position: usize,
    pub outcomes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BundleEdge {
    pub context: Vec<String>,
    pub outcome: Vec<String>,
    pub in_some_loop: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BundleDiagram {
    pub fibers: Vec<Fiber>,
    pub edges: Vec<BundleEdge>,
}

impl BundleDiagram {
    /// Requires a simple scenario; loop flags come from the support, so the
    /// enumeration cap applies.
    pub fn new(pb: &PossibilisticBehavior, cap: u128) -> Result<Self> {
        let s = pb.scenario();
        s.require_simple()?;
        let (covered, _) = classical::covered_entries(pb, cap)?;
        let fibers = (0..s.measurement_count())
            .map(|m| Fiber {
                measurement: s.name(m).to_string(),
                position: m,
                outcomes: s.outcomes(m).to_vec(),
            })
            .collect();
        let mut edges = Vec::new();
        for c in 0..s.context_count() {
            let names: Vec<String> = s.context(c).iter().map(|&m| s.name(m).to_string()).collect();
            for (i, &possible) in pb.table(c).iter().enumerate() {
                if possible {
                    edges.push(BundleEdge {
                        context: names.clone(),
                        outcome: s.labels(c, &s.decode(c, i)),
                        in_some_loop: covered[c][i],
                    });
                }
            }
        }
        Ok(BundleDiagram { fibers, edges })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Graphviz text: one cluster per fiber, edges on no loop drawn red and
    /// dashed.
    pub fn to_dot(&self) -> String {
        let node = |m: &str, o: &str| format!("\"{}={}\"", escape(m), escape(o));
        let mut out = String::from("graph bundle {\n  rankdir=LR;\n  node [shape=circle];\n");
        for f in &self.fibers {
            out.push_str(&format!(
                "  subgraph \"cluster_{}\" {{\n    label=\"{}\";\n",
                escape(&f.measurement),
                escape(&f.measurement)
            ));
            for o in &f.outcomes {
                out.push_str(&format!("    {} [label=\"{}\"];\n", node(&f.measurement, o), escape(o)));
            }
            out.push_str("  }\n");
        }
        for e in &self.edges {
            let ends: Vec<String> = e.context.iter().zip(&e.outcome).map(|(m, o)| node(m, o)).collect();
            let style = if e.in_some_loop { "" } else { " [color=red, style=dashed]" };
            out.push_str(&format!("  {}{};\n", ends.join(" -- "), style));
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::DEFAULT_ENUMERATION_CAP as CAP;
    use crate::fixtures;

    #[test]
    fn hardy_has_exactly_one_edge_off_every_loop() {
        let d = BundleDiagram::new(&fixtures::hardy_model(), CAP).unwrap();
        let off: Vec<&BundleEdge> = d.edges.iter().filter(|e| !e.in_some_loop).collect();
        assert_eq!(off.len(), 1);
        assert_eq!(off[0].context, vec!["A1", "B1"]);
        assert_eq!(off[0].outcome, vec!["1", "1"]);
    }

    #[test]
    fn pr_box_has_no_loop_and_bell_is_all_loops() {
        let pr = BundleDiagram::new(&fixtures::pr_box(), CAP).unwrap();
        assert_eq!(pr.edges.len(), 8);
        assert!(pr.edges.iter().all(|e| !e.in_some_loop));
        let bell = BundleDiagram::new(&fixtures::bell_model(), CAP).unwrap();
        assert!(bell.edges.iter().all(|e| e.in_some_loop));
    }

    #[test]
    fn dot_output_is_stable() {
        let a = BundleDiagram::new(&fixtures::hardy_model(), CAP).unwrap().to_dot();
        let b = BundleDiagram::new(&fixtures::hardy_model(), CAP).unwrap().to_dot();
        assert_eq!(a, b);
        assert!(a.contains("\"A1=1\" -- \"B1=1\" [color=red, style=dashed];"));
        assert_eq!(a.matches(" -- ").count(), 13);
    }
}
