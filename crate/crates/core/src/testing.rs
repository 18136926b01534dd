use proptest::prelude::*;

use crate::dag::{Dag, NodeSet};
use crate::separation::SeparationQuery;

/// DAGs with up to `max_nodes` nodes: edges only go from lower to higher
/// positions of a random permutation.
pub(crate) fn arb_dag(max_nodes: usize) -> impl Strategy<Value = Dag> {
    (1..=max_nodes)
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (
                Just(n),
                Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
                proptest::collection::vec(any::<bool>(), pairs),
            )
        })
        .prop_map(|(n, order, keep)| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if keep[k] {
                        edges.push((order[i], order[j]));
                    }
                    k += 1;
                }
            }
            Dag::from_indices(n, edges).expect("forward edges are acyclic")
        })
}

/// A DAG with a valid query: each node is outside, in `J` or in `L`, and `J`
/// is never empty.
pub(crate) fn arb_query(max_nodes: usize) -> impl Strategy<Value = (Dag, SeparationQuery)> {
    arb_dag(max_nodes).prop_flat_map(|dag| {
        let n = dag.node_count();
        (Just(dag), proptest::collection::vec(0u8..3, n)).prop_map(|(dag, mut roles)| {
            if !roles.contains(&1) {
                roles[0] = 1;
            }
            let pick = |r: u8| NodeSet::from_indices((0..roles.len()).filter(|&i| roles[i] == r));
            let q = SeparationQuery::new(&dag, pick(1), pick(2)).expect("roles are disjoint");
            (dag, q)
        })
    })
}
