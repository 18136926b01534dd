//! Exhaustive trail enumeration straight from the definition of d-separation.

use crate::dag::{Dag, DescendantTable, EdgeId, NodeId, NodeSet};
use crate::error::{Error, Result};
use crate::separation::{is_active_trail_with, SeparationQuery, Trail};

/// Trail enumeration is exponential; larger graphs are refused.
pub const MAX_TRAIL_NODES: usize = 12;

pub(crate) fn check_trail_scale(dag: &Dag) -> Result<()> {
    if dag.node_count() > MAX_TRAIL_NODES {
        return Err(Error::OracleScaleExceeded {
            what: "trail enumeration",
            actual: dag.node_count(),
            limit: MAX_TRAIL_NODES,
        });
    }
    Ok(())
}

/// Incident edges of `v` with the neighbor across each.
fn incident(dag: &Dag, v: NodeId) -> impl Iterator<Item = (EdgeId, NodeId)> + '_ {
    dag.out_list(v)
        .iter()
        .map(move |&e| (e, dag.edge(e).head))
        .chain(dag.in_list(v).iter().map(move |&e| (e, dag.edge(e).tail)))
}

/// Every trail from `a` to `b` that repeats no node.
pub fn enumerate_simple_trails(dag: &Dag, a: NodeId, b: NodeId) -> Result<Vec<Trail>> {
    check_trail_scale(dag)?;
    for v in [a, b] {
        if !dag.contains(v) {
            return Err(Error::ForeignNode {
                index: v.index(),
                node_count: dag.node_count(),
            });
        }
    }
    if a == b {
        return Err(Error::MalformedTrail {
            reason: "trail endpoints coincide".into(),
        });
    }
    let mut found = Vec::new();
    let mut on_path = vec![false; dag.node_count()];
    let mut nodes = vec![a];
    let mut edges = Vec::new();
    on_path[a.index()] = true;
    extend(dag, b, &mut on_path, &mut nodes, &mut edges, &mut found)?;
    Ok(found)
}

fn extend(
    dag: &Dag,
    target: NodeId,
    on_path: &mut [bool],
    nodes: &mut Vec<NodeId>,
    edges: &mut Vec<EdgeId>,
    found: &mut Vec<Trail>,
) -> Result<()> {
    let v = *nodes.last().expect("path is never empty");
    if v == target {
        found.push(Trail::new(dag, nodes.clone(), edges)?);
        return Ok(());
    }
    for (edge, w) in incident(dag, v) {
        if on_path[w.index()] {
            continue;
        }
        on_path[w.index()] = true;
        nodes.push(w);
        edges.push(edge);
        extend(dag, target, on_path, nodes, edges, found)?;
        edges.pop();
        nodes.pop();
        on_path[w.index()] = false;
    }
    Ok(())
}

/// Nodes outside `J ∪ L` with no active simple trail from any node of `J`.
pub fn dsep_bruteforce(dag: &Dag, q: &SeparationQuery) -> Result<NodeSet> {
    check_trail_scale(dag)?;
    let table = DescendantTable::new(dag, q.l())?;
    let mut separated = Vec::new();
    for alpha in dag.nodes() {
        if q.j().contains(alpha) || q.l().contains(alpha) {
            continue;
        }
        let mut connected = false;
        for j in q.j().iter() {
            for trail in enumerate_simple_trails(dag, j, alpha)? {
                if is_active_trail_with(&trail, &table)? {
                    connected = true;
                    break;
                }
            }
            if connected {
                break;
            }
        }
        if !connected {
            separated.push(alpha);
        }
    }
    Ok(NodeSet::new(separated))
}

/// Is there an active walk from `a` to `b` of at most `max_links` links? Walks
/// may revisit nodes and links but never turn straight back over the link they
/// arrived on. Activeness is checked node by node along the walk, so the search
/// runs over `(node, arriving link, direction)` states level by level.
pub fn active_walk_exists(dag: &Dag, table: &DescendantTable, a: NodeId, b: NodeId, max_links: usize) -> Result<bool> {
    check_trail_scale(dag)?;
    if a == b {
        return Err(Error::MalformedTrail {
            reason: "walk endpoints coincide".into(),
        });
    }
    let l = table.conditioning_set();
    if l.contains(a) || l.contains(b) {
        return Err(Error::EndpointInConditioningSet { index: 0 });
    }
    let m = dag.edge_count();
    // state index: edge * 2 + (1 if walked tail to head); node is the arrival end.
    let arrival = |state: usize| -> NodeId {
        let e = dag.edge(EdgeId::new(state / 2));
        if state % 2 == 1 {
            e.head
        } else {
            e.tail
        }
    };
    let mut frontier = vec![false; 2 * m];
    for (edge, _) in incident(dag, a) {
        let forward = dag.edge(edge).tail == a;
        frontier[edge.index() * 2 + forward as usize] = true;
    }
    for _ in 0..max_links {
        if frontier.iter().enumerate().any(|(s, &on)| on && arrival(s) == b) {
            return Ok(true);
        }
        let mut next = vec![false; 2 * m];
        for state in (0..2 * m).filter(|&s| frontier[s]) {
            let v = arrival(state);
            let came_forward = state % 2 == 1;
            for (edge, _) in incident(dag, v) {
                if edge.index() == state / 2 {
                    continue;
                }
                let go_forward = dag.edge(edge).tail == v;
                let head_to_head = came_forward && !go_forward;
                let open = if head_to_head {
                    table.is_marked(v)
                } else {
                    !l.contains(v)
                };
                if open {
                    next[edge.index() * 2 + go_forward as usize] = true;
                }
            }
        }
        frontier = next;
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn node_names(dag: &Dag, t: &Trail) -> Vec<String> {
        t.nodes().iter().map(|&v| dag.name(v).to_owned()).collect()
    }

    #[test]
    fn fork_collider_trails_between_n4_and_n3() {
        let dag = fixtures::fork_collider();
        let trails = enumerate_simple_trails(&dag, dag.resolve("n4").unwrap(), dag.resolve("n3").unwrap()).unwrap();
        let mut got: Vec<Vec<String>> = trails.iter().map(|t| node_names(&dag, t)).collect();
        got.sort();
        assert_eq!(got, vec![vec!["n4", "n2", "n3"], vec!["n4", "n5", "n3"]]);
    }

    #[test]
    fn v_structure_trails_between_3_and_2() {
        let dag = fixtures::v_structure();
        let trails = enumerate_simple_trails(&dag, dag.resolve("3").unwrap(), dag.resolve("2").unwrap()).unwrap();
        assert_eq!(trails.len(), 1);
        assert_eq!(node_names(&dag, &trails[0]), vec!["3", "1", "4", "2"]);
        assert!(trails[0].is_head_to_head(2));
    }

    #[test]
    fn disconnected_pair_has_no_trails() {
        let dag = Dag::from_indices(2, []).unwrap();
        assert!(enumerate_simple_trails(&dag, NodeId::new(0), NodeId::new(1))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn scale_guard() {
        let dag = crate::generate::chain(13);
        assert!(matches!(
            enumerate_simple_trails(&dag, NodeId::new(0), NodeId::new(1)),
            Err(Error::OracleScaleExceeded { .. })
        ));
    }

    #[test]
    fn bruteforce_values() {
        let fork_collider = fixtures::fork_collider();
        let q = SeparationQuery::from_names(&fork_collider, &["n4"], &["n2"]).unwrap();
        assert_eq!(
            dsep_bruteforce(&fork_collider, &q).unwrap(),
            fork_collider.resolve_set(&["n3"]).unwrap()
        );
        let v_structure = fixtures::v_structure();
        let q = SeparationQuery::from_names(&v_structure, &["2"], &[]).unwrap();
        assert_eq!(
            dsep_bruteforce(&v_structure, &q).unwrap(),
            v_structure.resolve_set(&["1", "3"]).unwrap()
        );
        let isolated = Dag::from_indices(2, []).unwrap();
        let q = SeparationQuery::new(&isolated, NodeSet::from_indices([0]), NodeSet::empty()).unwrap();
        assert_eq!(dsep_bruteforce(&isolated, &q).unwrap(), NodeSet::from_indices([1]));
    }

    #[test]
    fn looping_walk_in_fork_collider_is_active() {
        // n1 n4 n5 n3 n2 n4 n5 n7 given {n6}, and its simple shortcut n1 n4 n5 n7.
        let dag = fixtures::fork_collider();
        let table = DescendantTable::new(&dag, &dag.resolve_set(&["n6"]).unwrap()).unwrap();
        let (n1, n7) = (dag.resolve("n1").unwrap(), dag.resolve("n7").unwrap());
        assert!(active_walk_exists(&dag, &table, n1, n7, 2 * dag.edge_count()).unwrap());
        assert!(active_walk_exists(&dag, &table, n1, n7, 3).unwrap());
        assert!(!active_walk_exists(&dag, &table, n1, n7, 2).unwrap());
    }
}
