//! Moral-graph separation test, used as an independent baseline for statement
//! verification.
//!
//! The statement `I(J, L, K)` holds iff `L` intercepts every undirected path
//! between `J` and `K` in the moral graph of the ancestral subgraph of
//! `J ∪ K ∪ L`.

use std::collections::{BTreeSet, VecDeque};

use crate::dag::{ancestral_set, descendant_table, Dag, NodeId, NodeSet};
use crate::error::Result;
use crate::separation::IndependenceStatement;

/// Which co-parents get joined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum MarriageRule {
    /// Only parents of a common child that is in `L` or has a descendant in `L`.
    #[default]
    Restricted,
    /// Parents of every common child (textbook moralization).
    Full,
}

#[derive(Clone, Debug)]
pub struct MoralGraph {
    nodes: NodeSet,
    edges: BTreeSet<(NodeId, NodeId)>,
    adjacency: Vec<Vec<NodeId>>,
}

impl MoralGraph {
    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    /// Undirected edges as `(smaller, larger)` id pairs.
    pub fn edges(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.edges
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v.index()]
    }

    /// True iff every path from `from` to `to` passes through `blocked`.
    pub fn separates(&self, from: &NodeSet, blocked: &NodeSet, to: &NodeSet) -> bool {
        let n = self.adjacency.len();
        let blocked = blocked.mask(n);
        let target = to.mask(n);
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for v in from.iter() {
            seen[v.index()] = true;
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            if target[v.index()] {
                return false;
            }
            for &w in &self.adjacency[v.index()] {
                if !seen[w.index()] && !blocked[w.index()] {
                    seen[w.index()] = true;
                    queue.push_back(w);
                }
            }
        }
        true
    }
}

pub fn moralize(dag: &Dag, s: &IndependenceStatement) -> Result<MoralGraph> {
    moralize_with(dag, s, MarriageRule::Restricted)
}

pub fn moralize_with(dag: &Dag, s: &IndependenceStatement, rule: MarriageRule) -> Result<MoralGraph> {
    let nodes = ancestral_set(dag, &s.j().union(s.k()).union(s.l()))?;
    let inside = nodes.mask(dag.node_count());
    let table = descendant_table(dag, s.l())?;
    let mut edges = BTreeSet::new();
    let undirected = |a: NodeId, b: NodeId| (a.min(b), a.max(b));
    // Ancestral sets are closed under parents, so every parent of an inside
    // node is inside too.
    for child in nodes.iter() {
        let parents: Vec<NodeId> = dag.parents(child).collect();
        for &p in &parents {
            edges.insert(undirected(p, child));
        }
        let marry = match rule {
            MarriageRule::Full => true,
            MarriageRule::Restricted => table.is_marked(child),
        };
        if marry {
            for (i, &a) in parents.iter().enumerate() {
                for &b in &parents[i + 1..] {
                    edges.insert(undirected(a, b));
                }
            }
        }
    }
    debug_assert!(edges.iter().all(|&(a, b)| inside[a.index()] && inside[b.index()]));
    let mut adjacency = vec![Vec::new(); dag.node_count()];
    for &(a, b) in &edges {
        adjacency[a.index()].push(b);
        adjacency[b.index()].push(a);
    }
    Ok(MoralGraph {
        nodes,
        edges,
        adjacency,
    })
}

/// Does `I(J, L, K)` hold, judged on the moral graph?
pub fn moral_check(dag: &Dag, s: &IndependenceStatement) -> Result<bool> {
    moral_check_with(dag, s, MarriageRule::Restricted)
}

pub fn moral_check_with(dag: &Dag, s: &IndependenceStatement, rule: MarriageRule) -> Result<bool> {
    let graph = moralize_with(dag, s, rule)?;
    Ok(graph.separates(s.j(), s.l(), s.k()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn statement(dag: &Dag, j: &[&str], l: &[&str], k: &[&str]) -> IndependenceStatement {
        IndependenceStatement::from_names(dag, j, l, k).unwrap()
    }

    fn edge_names(dag: &Dag, g: &MoralGraph) -> BTreeSet<(String, String)> {
        g.edges()
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (dag.name(a).to_owned(), dag.name(b).to_owned());
                if x < y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect()
    }

    fn pairs(list: &[(&str, &str)]) -> BTreeSet<(String, String)> {
        list.iter().map(|&(a, b)| (a.to_owned(), b.to_owned())).collect()
    }

    #[test]
    fn fork_collider_moral_graph_without_marriage() {
        let dag = fixtures::fork_collider();
        let g = moralize(&dag, &statement(&dag, &["n4"], &["n2"], &["n3"])).unwrap();
        assert_eq!(g.nodes(), &dag.resolve_set(&["n1", "n2", "n3", "n4"]).unwrap());
        assert_eq!(edge_names(&dag, &g), pairs(&[("n1", "n4"), ("n2", "n4"), ("n2", "n3")]));
        let full = moralize_with(&dag, &statement(&dag, &["n4"], &["n2"], &["n3"]), MarriageRule::Full).unwrap();
        assert!(full.has_edge(dag.resolve("n1").unwrap(), dag.resolve("n2").unwrap()));
    }

    #[test]
    fn v_structure_marriage_through_observed_child() {
        let dag = fixtures::v_structure();
        let g = moralize(&dag, &statement(&dag, &["3"], &["4"], &["2"])).unwrap();
        assert_eq!(g.nodes().len(), 4);
        assert_eq!(
            edge_names(&dag, &g),
            pairs(&[("1", "3"), ("1", "4"), ("2", "4"), ("1", "2")])
        );
    }

    #[test]
    fn single_edge() {
        let dag = Dag::build(&["a", "b"], &[("a", "b")]).unwrap();
        let g = moralize(&dag, &statement(&dag, &["a"], &[], &["b"])).unwrap();
        assert_eq!(g.nodes().len(), 2);
        assert_eq!(edge_names(&dag, &g), pairs(&[("a", "b")]));
    }

    #[test]
    fn verdicts() {
        let fork_collider = fixtures::fork_collider();
        assert!(moral_check(&fork_collider, &statement(&fork_collider, &["n4"], &["n2"], &["n3"])).unwrap());
        assert!(!moral_check(
            &fork_collider,
            &statement(&fork_collider, &["n4"], &["n2", "n6"], &["n3"])
        )
        .unwrap());
        let v_structure = fixtures::v_structure();
        assert!(moral_check(&v_structure, &statement(&v_structure, &["3"], &[], &["2"])).unwrap());
        assert!(!moral_check(&v_structure, &statement(&v_structure, &["3"], &["4"], &["2"])).unwrap());
    }
}
