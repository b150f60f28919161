//! Predicate dependency graph and stratification.

use std::collections::{BTreeMap, HashMap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::program::{Builtin, Literal, Program};
use super::term::PredKey;
use super::EngineError;

/// Predicate → stratum. Every NAF (or aggregate) edge strictly increases the
/// stratum; positive edges never decrease it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stratification {
    strata: BTreeMap<PredKey, usize>,
}

impl Stratification {
    pub fn stratum(&self, key: &PredKey) -> Option<usize> {
        self.strata.get(key).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PredKey, usize)> {
        self.strata.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn max_stratum(&self) -> usize {
        self.strata.values().copied().max().unwrap_or(0)
    }
}

/// Dependency edges `(from body predicate, to head predicate, negative?)`.
pub fn dependency_edges(program: &Program) -> Vec<(PredKey, PredKey, bool)> {
    let mut edges = Vec::new();
    for rule in program.rules() {
        let Some(head) = rule.head.as_ref().and_then(|h| h.pred_key()) else { continue };
        for lit in &rule.body {
            match lit {
                Literal::Pos(t) => {
                    if let Some(k) = t.pred_key() {
                        edges.push((k, head.clone(), false));
                    }
                }
                Literal::Naf(t) => {
                    if let Some(k) = t.pred_key() {
                        edges.push((k, head.clone(), true));
                    }
                }
                // findall needs its goal's table complete, same as negation.
                Literal::Builtin(Builtin::Findall { goal, .. }) => {
                    if let Some(k) = goal.pred_key() {
                        edges.push((k, head.clone(), true));
                    }
                }
                Literal::Builtin(_) => {}
            }
        }
    }
    edges
}

pub fn stratify(program: &Program) -> Result<Stratification, EngineError> {
    let mut graph: DiGraph<PredKey, bool> = DiGraph::new();
    let mut nodes: HashMap<PredKey, NodeIndex> = HashMap::new();
    let mut node =
        |g: &mut DiGraph<PredKey, bool>, k: &PredKey| *nodes.entry(k.clone()).or_insert_with(|| g.add_node(k.clone()));
    for key in program.predicates() {
        node(&mut graph, key);
    }
    let edges = dependency_edges(program);
    for (from, to, neg) in &edges {
        let a = node(&mut graph, from);
        let b = node(&mut graph, to);
        graph.add_edge(a, b, *neg);
    }

    // tarjan_scc yields components in reverse topological order.
    let mut sccs = tarjan_scc(&graph);
    sccs.reverse();
    let mut comp_of = vec![0usize; graph.node_count()];
    for (ci, comp) in sccs.iter().enumerate() {
        for n in comp {
            comp_of[n.index()] = ci;
        }
    }
    for e in graph.edge_indices() {
        let (a, b) = graph.edge_endpoints(e).expect("edge endpoints");
        if graph[e] && comp_of[a.index()] == comp_of[b.index()] {
            let mut cycle: Vec<String> = sccs[comp_of[a.index()]].iter().map(|n| graph[*n].to_string()).collect();
            cycle.sort();
            return Err(EngineError::UnstratifiableProgram { cycle });
        }
    }

    let mut level = vec![0usize; sccs.len()];
    for (ci, comp) in sccs.iter().enumerate() {
        for n in comp {
            for e in graph.edges_directed(*n, petgraph::Direction::Incoming) {
                use petgraph::visit::EdgeRef;
                let src = comp_of[e.source().index()];
                if src == ci {
                    continue;
                }
                let w = usize::from(*e.weight());
                level[ci] = level[ci].max(level[src] + w);
            }
        }
    }
    let strata = graph.node_indices().map(|n| (graph[n].clone(), level[comp_of[n.index()]])).collect();
    Ok(Stratification { strata })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::parse_program;

    fn key(name: &str, arity: usize) -> PredKey {
        PredKey { name: name.into(), arity }
    }

    #[test]
    fn naf_edge_raises_stratum() {
        let p = parse_program("p :- not q. q :- r.").unwrap();
        let s = p.stratification();
        assert_eq!(s.stratum(&key("r", 0)), Some(0));
        assert_eq!(s.stratum(&key("q", 0)), Some(0));
        assert_eq!(s.stratum(&key("p", 0)), Some(1));
    }

    #[test]
    fn self_negation_is_rejected() {
        let err = parse_program("p :- not p.").unwrap_err();
        match err {
            EngineError::UnstratifiableProgram { cycle } => assert_eq!(cycle, vec!["p/0".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn facts_sit_at_stratum_zero() {
        let p = parse_program("a(1). b(2). c(x).").unwrap();
        assert!(p.stratification().iter().all(|(_, s)| s == 0));
    }

    #[test]
    fn positive_recursion_is_fine() {
        let p =
            parse_program("e(a,b). t(X,Y) :- e(X,Y). t(X,Z) :- t(X,Y), e(Y,Z). u(X) :- e(X,_), not t(X,X).").unwrap();
        assert_eq!(p.stratification().stratum(&key("u", 1)), Some(1));
    }
}
