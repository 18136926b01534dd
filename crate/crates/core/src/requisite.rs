//! Which stored tables matter for a query `P(x_J | x_L)`, and which variables.
//!
//! Each node's conditional table is modeled as a parentless dummy node `v'`
//! with the single edge `v' -> v`. The table at `v` can influence the query
//! exactly when `v'` is d-connected to `J` given `L` in the augmented graph.

use crate::dag::{Dag, NodeId, NodeSet};
use crate::error::Result;
use crate::separation::{dsep_set_fast, SeparationQuery};

#[derive(Clone, Debug)]
pub struct AugmentedDag {
    graph: Dag,
    base_count: usize,
}

impl AugmentedDag {
    /// The augmented graph: base ids unchanged, dummy of `v` at `v + |V|`.
    pub fn graph(&self) -> &Dag {
        &self.graph
    }

    pub fn base_count(&self) -> usize {
        self.base_count
    }

    pub fn dummy_of(&self, v: NodeId) -> NodeId {
        debug_assert!(v.index() < self.base_count);
        NodeId::new(v.index() + self.base_count)
    }

    pub fn is_dummy(&self, v: NodeId) -> bool {
        v.index() >= self.base_count
    }

    /// The base node whose table `dummy` stands for.
    pub fn base_of(&self, dummy: NodeId) -> Option<NodeId> {
        self.is_dummy(dummy)
            .then(|| NodeId::new(dummy.index() - self.base_count))
    }
}

pub fn augment_dummies(dag: &Dag) -> AugmentedDag {
    let n = dag.node_count();
    let names: Vec<String> = dag
        .names()
        .iter()
        .cloned()
        .chain(dag.names().iter().map(|name| format!("{name}'")))
        .collect();
    let edges = dag
        .edges()
        .iter()
        .map(|e| (e.tail.index(), e.head.index()))
        .chain((0..n).map(|v| (v + n, v)));
    // A base graph with a name ending in a prime could collide with a dummy; the
    // text formats reject such names.
    let graph = Dag::from_named_indices(names, edges).expect("adding parentless dummies keeps the graph acyclic");
    AugmentedDag { graph, base_count: n }
}

/// Base nodes whose stored tables can affect `P(x_J | x_L)`.
pub fn requisite_parameters(dag: &Dag, q: &SeparationQuery) -> Result<NodeSet> {
    let aug = augment_dummies(dag);
    let lifted = SeparationQuery::new(aug.graph(), q.j().clone(), q.l().clone())?;
    let separated = dsep_set_fast(aug.graph(), &lifted)?;
    Ok(dag.nodes().filter(|&v| !separated.contains(aug.dummy_of(v))).collect())
}

/// Base nodes whose observed value can affect `P(x_J | x_L)`.
pub fn relevant_variables(dag: &Dag, q: &SeparationQuery) -> Result<NodeSet> {
    let separated = dsep_set_fast(dag, q)?;
    Ok(dag
        .nodes()
        .filter(|&v| !separated.contains(v) && !q.j().contains(v) && !q.l().contains(v))
        .collect())
}
