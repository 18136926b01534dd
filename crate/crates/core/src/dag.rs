//! Immutable DAG storage, node sets, ancestor marking and the doubled graph.
//!
//! Nodes are dense indices `0..node_count`. Every edge has an [`EdgeId`] equal
//! to its position in declaration order, and both adjacency directions are
//! kept in compressed (offset + flat array) form so per-node lists are slices.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index exceeds u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(u32);

impl EdgeId {
    pub fn new(index: usize) -> Self {
        EdgeId(u32::try_from(index).expect("edge index exceeds u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
}

/// Graphs are equal when they have the same names in the same order and the
/// same edges in the same order.
impl PartialEq for Dag {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edges == other.edges
    }
}

impl Eq for Dag {}

/// Compressed incidence lists. Node `v` owns `items[bounds[2v]..bounds[2v + 2]]`:
/// its outgoing edges up to `bounds[2v + 1]`, then its incoming ones. `ends`
/// holds the node across each edge. Keeping both lists of a node together
/// means a sweep touches one region per node.
#[derive(Clone, Debug)]
struct Incidence {
    bounds: Vec<u32>,
    items: Vec<EdgeId>,
    ends: Vec<NodeId>,
}

impl Incidence {
    fn build(node_count: usize, edges: &[Edge]) -> Self {
        let mut bounds = vec![0u32; 2 * node_count + 1];
        for e in edges {
            bounds[2 * e.tail.index() + 1] += 1;
            bounds[2 * e.head.index() + 2] += 1;
        }
        for i in 0..2 * node_count {
            bounds[i + 1] += bounds[i];
        }
        let mut cursor = bounds.clone();
        let mut items = vec![EdgeId(0); 2 * edges.len()];
        let mut ends = vec![NodeId(0); 2 * edges.len()];
        for (i, e) in edges.iter().enumerate() {
            for (slot, end) in [(2 * e.tail.index(), e.head), (2 * e.head.index() + 1, e.tail)] {
                let at = cursor[slot] as usize;
                items[at] = EdgeId::new(i);
                ends[at] = end;
                cursor[slot] += 1;
            }
        }
        Incidence { bounds, items, ends }
    }

    #[inline]
    fn range(&self, v: NodeId, incoming: bool) -> std::ops::Range<usize> {
        let i = 2 * v.index() + incoming as usize;
        self.bounds[i] as usize..self.bounds[i + 1] as usize
    }
}

/// A validated directed acyclic graph with named nodes.
#[derive(Clone, Debug)]
pub struct Dag {
    names: Vec<String>,
    lookup: HashMap<String, NodeId>,
    edges: Vec<Edge>,
    incidence: Incidence,
}

impl Dag {
    /// Builds a DAG from node names and name pairs. Node ids follow the order of
    /// `node_names`.
    pub fn build<N, T>(node_names: &[N], edges: &[(T, T)]) -> Result<Dag>
    where
        N: AsRef<str>,
        T: AsRef<str>,
    {
        let mut lookup = HashMap::with_capacity(node_names.len());
        let mut names = Vec::with_capacity(node_names.len());
        for (i, name) in node_names.iter().enumerate() {
            let name = name.as_ref();
            if lookup.insert(name.to_owned(), NodeId::new(i)).is_some() {
                return Err(Error::DuplicateNode { name: name.to_owned() });
            }
            names.push(name.to_owned());
        }
        let resolve = |name: &str| {
            lookup
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownEndpoint { name: name.to_owned() })
        };
        let mut resolved = Vec::with_capacity(edges.len());
        for (tail, head) in edges {
            resolved.push(Edge {
                tail: resolve(tail.as_ref())?,
                head: resolve(head.as_ref())?,
            });
        }
        Dag::assemble(names, lookup, resolved)
    }

    /// Builds a DAG over nodes `0..node_count` named `v0, v1, ...`.
    pub fn from_indices<I>(node_count: usize, edges: I) -> Result<Dag>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let names: Vec<String> = (0..node_count).map(|i| format!("v{i}")).collect();
        Dag::from_named_indices(names, edges)
    }

    /// Builds a DAG over caller-supplied names with edges given as indices.
    pub fn from_named_indices<I>(names: Vec<String>, edges: I) -> Result<Dag>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let node_count = names.len();
        let mut lookup = HashMap::with_capacity(node_count);
        for (i, name) in names.iter().enumerate() {
            if lookup.insert(name.clone(), NodeId::new(i)).is_some() {
                return Err(Error::DuplicateNode { name: name.clone() });
            }
        }
        let check = |index: usize| {
            if index < node_count {
                Ok(NodeId::new(index))
            } else {
                Err(Error::ForeignNode { index, node_count })
            }
        };
        let mut resolved = Vec::new();
        for (tail, head) in edges {
            resolved.push(Edge {
                tail: check(tail)?,
                head: check(head)?,
            });
        }
        Dag::assemble(names, lookup, resolved)
    }

    fn assemble(names: Vec<String>, lookup: HashMap<String, NodeId>, edges: Vec<Edge>) -> Result<Dag> {
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.tail == e.head {
                return Err(Error::SelfLoop {
                    node: names[e.tail.index()].clone(),
                });
            }
            if !seen.insert((e.tail, e.head)) {
                return Err(Error::DuplicateEdge {
                    tail: names[e.tail.index()].clone(),
                    head: names[e.head.index()].clone(),
                });
            }
        }
        let n = names.len();
        let dag = Dag {
            incidence: Incidence::build(n, &edges),
            names,
            lookup,
            edges,
        };
        if let Some(cycle) = dag.find_cycle() {
            return Err(Error::CycleDetected {
                cycle: cycle.into_iter().map(|v| dag.names[v.index()].clone()).collect(),
            });
        }
        Ok(dag)
    }

    /// Kahn's algorithm; on failure returns the nodes of one directed cycle in
    /// edge order.
    fn find_cycle(&self) -> Option<Vec<NodeId>> {
        let n = self.node_count();
        let mut indegree: Vec<usize> = (0..n).map(|v| self.in_list(NodeId::new(v)).len()).collect();
        let mut queue: VecDeque<NodeId> = (0..n).filter(|&v| indegree[v] == 0).map(NodeId::new).collect();
        let mut processed = 0;
        while let Some(v) = queue.pop_front() {
            processed += 1;
            for w in self.children(v) {
                indegree[w.index()] -= 1;
                if indegree[w.index()] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if processed == n {
            return None;
        }
        // Every unprocessed node keeps an unprocessed parent, so walking parents
        // inside the remainder must revisit a node.
        let start = (0..n).find(|&v| indegree[v] > 0)?;
        let mut position = vec![usize::MAX; n];
        let mut walk = Vec::new();
        let mut v = NodeId::new(start);
        while position[v.index()] == usize::MAX {
            position[v.index()] = walk.len();
            walk.push(v);
            v = self
                .parents(v)
                .find(|p| indegree[p.index()] > 0)
                .expect("unprocessed node without unprocessed parent");
        }
        let mut cycle = walk.split_off(position[v.index()]);
        cycle.reverse();
        Some(cycle)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.node_count()).map(NodeId::new)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id.index()]
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() < self.node_count()
    }

    /// Edges leaving `v`, in declaration order.
    #[inline]
    pub fn out_list(&self, v: NodeId) -> &[EdgeId] {
        &self.incidence.items[self.incidence.range(v, false)]
    }

    /// Edges entering `v`, in declaration order.
    #[inline]
    pub fn in_list(&self, v: NodeId) -> &[EdgeId] {
        &self.incidence.items[self.incidence.range(v, true)]
    }

    pub fn children(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.children_slice(v).iter().copied()
    }

    pub fn parents(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.parents_slice(v).iter().copied()
    }

    /// Where the incidence lists of `v` sit: children are
    /// `neighbors_in(span[0]..span[1])`, parents `neighbors_in(span[1]..span[2])`.
    #[inline]
    pub(crate) fn incidence_span(&self, v: NodeId) -> [u32; 3] {
        let b = &self.incidence.bounds[2 * v.index()..2 * v.index() + 3];
        [b[0], b[1], b[2]]
    }

    #[inline]
    pub(crate) fn neighbors_in(&self, from: u32, to: u32) -> &[NodeId] {
        &self.incidence.ends[from as usize..to as usize]
    }

    /// Heads of `out_list(v)`, position for position.
    #[inline]
    pub fn children_slice(&self, v: NodeId) -> &[NodeId] {
        &self.incidence.ends[self.incidence.range(v, false)]
    }

    /// Tails of `in_list(v)`, position for position.
    #[inline]
    pub fn parents_slice(&self, v: NodeId) -> &[NodeId] {
        &self.incidence.ends[self.incidence.range(v, true)]
    }

    /// The edge joining `a` and `b` in either direction, if any.
    pub fn edge_between(&self, a: NodeId, b: NodeId) -> Option<EdgeId> {
        self.out_list(a)
            .iter()
            .copied()
            .find(|&e| self.edge(e).head == b)
            .or_else(|| self.in_list(a).iter().copied().find(|&e| self.edge(e).tail == b))
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.lookup.get(name).copied()
    }

    pub fn resolve(&self, name: &str) -> Result<NodeId> {
        self.node_id(name)
            .ok_or_else(|| Error::UnknownNode { name: name.to_owned() })
    }

    /// Resolves names into a node set, rejecting unknown names.
    pub fn resolve_set<S: AsRef<str>>(&self, names: &[S]) -> Result<NodeSet> {
        names.iter().map(|n| self.resolve(n.as_ref())).collect()
    }

    /// Renders a node set as space-separated names in ascending id order.
    pub fn format_set(&self, set: &NodeSet) -> String {
        set.iter().map(|v| self.name(v)).collect::<Vec<_>>().join(" ")
    }

    /// The same graph with every edge flipped.
    pub fn reversed(&self) -> Dag {
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Edge {
                tail: e.head,
                head: e.tail,
            })
            .collect();
        let n = self.node_count();
        Dag {
            incidence: Incidence::build(n, &edges),
            names: self.names.clone(),
            lookup: self.lookup.clone(),
            edges,
        }
    }

    pub fn topological_order(&self) -> Vec<NodeId> {
        let n = self.node_count();
        let mut indegree: Vec<usize> = (0..n).map(|v| self.in_list(NodeId::new(v)).len()).collect();
        let mut queue: VecDeque<NodeId> = (0..n).filter(|&v| indegree[v] == 0).map(NodeId::new).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for w in self.children(v) {
                indegree[w.index()] -= 1;
                if indegree[w.index()] == 0 {
                    queue.push_back(w);
                }
            }
        }
        order
    }
}

/// A set of node ids kept sorted and free of duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NodeSet(Vec<NodeId>);

impl NodeSet {
    pub fn new<I: IntoIterator<Item = NodeId>>(nodes: I) -> Self {
        let mut members: Vec<NodeId> = nodes.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        NodeSet(members)
    }

    pub fn empty() -> Self {
        NodeSet(Vec::new())
    }

    pub fn singleton(v: NodeId) -> Self {
        NodeSet(vec![v])
    }

    /// Convenience for tests and generators: ids given as raw indices.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        NodeSet::new(indices.into_iter().map(NodeId::new))
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        NodeSet(
            mask.iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| NodeId::new(i))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        NodeSet::new(self.iter().chain(other.iter()))
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        !self.iter().any(|v| other.contains(v))
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    /// Membership as a dense boolean vector of length `node_count`.
    pub fn mask(&self, node_count: usize) -> Vec<bool> {
        let mut mask = vec![false; node_count];
        for v in self.iter() {
            mask[v.index()] = true;
        }
        mask
    }

    /// Fails with [`Error::ForeignNode`] if any member is outside `dag`.
    pub fn check_within(&self, dag: &Dag) -> Result<()> {
        match self.0.last() {
            Some(&v) if !dag.contains(v) => Err(Error::ForeignNode {
                index: v.index(),
                node_count: dag.node_count(),
            }),
            _ => Ok(()),
        }
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        NodeSet::new(iter)
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = NodeId;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, NodeId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

/// Marks every node in `seeds` and every node with a directed path into `seeds`,
/// following in-lists from the seeds. Each edge is examined at most once.
fn mark_ancestors(dag: &Dag, seeds: &NodeSet) -> Vec<bool> {
    let mut marked = seeds.mask(dag.node_count());
    // Each entry holds the bounds of a node's parent list, read when the node
    // is pushed so that those loads overlap.
    let parent_bounds = |v: NodeId| {
        let span = dag.incidence_span(v);
        (span[1], span[2])
    };
    let mut stack: Vec<(u32, u32)> = seeds.iter().map(parent_bounds).collect();
    while let Some((from, to)) = stack.pop() {
        for &p in dag.neighbors_in(from, to) {
            if !marked[p.index()] {
                marked[p.index()] = true;
                stack.push(parent_bounds(p));
            }
        }
    }
    marked
}

/// Per-node flag: the node is in the conditioning set or has a descendant there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescendantTable {
    flags: Vec<bool>,
    conditioning: NodeSet,
}

impl DescendantTable {
    pub fn new(dag: &Dag, conditioning: &NodeSet) -> Result<Self> {
        conditioning.check_within(dag)?;
        Ok(DescendantTable {
            flags: mark_ancestors(dag, conditioning),
            conditioning: conditioning.clone(),
        })
    }

    #[inline]
    pub fn is_marked(&self, v: NodeId) -> bool {
        self.flags[v.index()]
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn conditioning_set(&self) -> &NodeSet {
        &self.conditioning
    }
}

pub fn descendant_table(dag: &Dag, conditioning: &NodeSet) -> Result<DescendantTable> {
    DescendantTable::new(dag, conditioning)
}

/// `seeds` together with all their ancestors.
pub fn ancestral_set(dag: &Dag, seeds: &NodeSet) -> Result<NodeSet> {
    seeds.check_within(dag)?;
    Ok(NodeSet::from_mask(&mark_ancestors(dag, seeds)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Traverses the base edge tail to head.
    Original,
    /// Traverses the base edge head to tail.
    Reversed,
}

/// Identifier of a link in a [`DoubledGraph`] (or any [`crate::reachability::Digraph`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(u32);

impl LinkId {
    pub fn new(index: usize) -> Self {
        LinkId(u32::try_from(index).expect("link index exceeds u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Link {
    pub id: LinkId,
    pub edge: EdgeId,
    pub orientation: Orientation,
    pub tail: NodeId,
    pub head: NodeId,
}

/// The base DAG plus a reversed copy of every edge. Link `2e` is edge `e` as
/// declared and link `2e + 1` is its reversal; nothing is materialized beyond the
/// base adjacency lists.
#[derive(Clone, Copy, Debug)]
pub struct DoubledGraph<'a> {
    base: &'a Dag,
}

impl<'a> DoubledGraph<'a> {
    pub fn new(base: &'a Dag) -> Self {
        DoubledGraph { base }
    }

    pub fn base(&self) -> &'a Dag {
        self.base
    }

    #[inline]
    pub fn original(edge: EdgeId) -> LinkId {
        LinkId(edge.0 * 2)
    }

    #[inline]
    pub fn reversed(edge: EdgeId) -> LinkId {
        LinkId(edge.0 * 2 + 1)
    }

    #[inline]
    pub fn link(&self, id: LinkId) -> Link {
        let edge = EdgeId(id.0 / 2);
        let e = self.base.edge(edge);
        if id.0 % 2 == 0 {
            Link {
                id,
                edge,
                orientation: Orientation::Original,
                tail: e.tail,
                head: e.head,
            }
        } else {
            Link {
                id,
                edge,
                orientation: Orientation::Reversed,
                tail: e.head,
                head: e.tail,
            }
        }
    }

    pub fn link_count(&self) -> usize {
        2 * self.base.edge_count()
    }

    pub fn links(&self) -> impl Iterator<Item = Link> + '_ {
        (0..self.link_count()).map(move |i| self.link(LinkId::new(i)))
    }

    /// Links leaving `v`: its base out-list followed by its reversed in-list.
    pub fn out_links(&self, v: NodeId) -> impl Iterator<Item = LinkId> + 'a {
        let base = self.base;
        base.out_list(v)
            .iter()
            .map(|&e| Self::original(e))
            .chain(base.in_list(v).iter().map(|&e| Self::reversed(e)))
    }
}

pub fn doubled_graph(dag: &Dag) -> DoubledGraph<'_> {
    DoubledGraph::new(dag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn ids(dag: &Dag, names: &[&str]) -> NodeSet {
        dag.resolve_set(names).unwrap()
    }

    #[test]
    fn single_node_no_edges() {
        let dag = Dag::build(&["a"], &[] as &[(&str, &str)]).unwrap();
        assert_eq!(dag.node_count(), 1);
        assert_eq!(dag.edge_count(), 0);
    }

    #[test]
    fn two_cycle_is_rejected_with_witness() {
        let err = Dag::build(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        match err {
            Error::CycleDetected { cycle } => {
                assert_eq!(cycle.len(), 2);
                assert!(cycle.contains(&"a".to_string()) && cycle.contains(&"b".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cycle_witness_follows_edges() {
        let dag_err = Dag::build(&["x", "a", "b", "c"], &[("x", "a"), ("a", "b"), ("b", "c"), ("c", "a")]).unwrap_err();
        let Error::CycleDetected { cycle } = dag_err else {
            panic!("expected cycle");
        };
        assert_eq!(cycle.len(), 3);
        let edges = [("a", "b"), ("b", "c"), ("c", "a")];
        for i in 0..cycle.len() {
            let pair = (cycle[i].as_str(), cycle[(i + 1) % cycle.len()].as_str());
            assert!(edges.contains(&pair), "{pair:?} is not an edge");
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            Dag::build(&["a"], &[("a", "a")]).unwrap_err(),
            Error::SelfLoop { node: "a".into() }
        );
        assert_eq!(
            Dag::build(&["a", "b"], &[("a", "b"), ("a", "b")]).unwrap_err(),
            Error::DuplicateEdge {
                tail: "a".into(),
                head: "b".into()
            }
        );
        assert_eq!(
            Dag::build(&["a"], &[("a", "z")]).unwrap_err(),
            Error::UnknownEndpoint { name: "z".into() }
        );
        assert_eq!(
            Dag::build(&["a", "a"], &[] as &[(&str, &str)]).unwrap_err(),
            Error::DuplicateNode { name: "a".into() }
        );
        assert!(matches!(
            Dag::from_indices(2, [(0, 5)]),
            Err(Error::ForeignNode { index: 5, .. })
        ));
    }

    #[test]
    fn fork_collider_is_valid() {
        let dag = fixtures::fork_collider();
        assert_eq!(dag.node_count(), 7);
        assert_eq!(dag.edge_count(), 7);
        assert_eq!(dag.topological_order().len(), 7);
        for v in dag.nodes() {
            for &e in dag.out_list(v) {
                assert!(dag.in_list(dag.edge(e).head).contains(&e));
            }
        }
    }

    #[test]
    fn descendant_table_fork_collider() {
        let dag = fixtures::fork_collider();
        let table = descendant_table(&dag, &ids(&dag, &["n6"])).unwrap();
        for name in ["n1", "n2", "n3", "n4", "n5", "n6"] {
            assert!(table.is_marked(dag.resolve(name).unwrap()), "{name}");
        }
        assert!(!table.is_marked(dag.resolve("n7").unwrap()));
    }

    #[test]
    fn descendant_table_empty_conditioning() {
        let dag = fixtures::fork_collider();
        let table = descendant_table(&dag, &NodeSet::empty()).unwrap();
        assert!(table.flags().iter().all(|&f| !f));
    }

    #[test]
    fn descendant_table_v_structure() {
        let dag = fixtures::v_structure();
        let table = descendant_table(&dag, &ids(&dag, &["4"])).unwrap();
        let marked: Vec<&str> = dag
            .nodes()
            .filter(|&v| table.is_marked(v))
            .map(|v| dag.name(v))
            .collect();
        assert_eq!(
            NodeSet::new(dag.nodes().filter(|&v| table.is_marked(v))),
            ids(&dag, &["1", "2", "4"])
        );
        assert!(!marked.contains(&"3"));
    }

    #[test]
    fn descendant_table_rejects_foreign_nodes() {
        let dag = fixtures::v_structure();
        assert!(matches!(
            descendant_table(&dag, &NodeSet::from_indices([9])),
            Err(Error::ForeignNode { index: 9, .. })
        ));
    }

    #[test]
    fn ancestral_sets() {
        let v_structure = fixtures::v_structure();
        assert_eq!(
            ancestral_set(&v_structure, &ids(&v_structure, &["3"])).unwrap(),
            ids(&v_structure, &["1", "3"])
        );
        assert!(ancestral_set(&v_structure, &NodeSet::empty()).unwrap().is_empty());
        let fork_collider = fixtures::fork_collider();
        assert_eq!(
            ancestral_set(&fork_collider, &ids(&fork_collider, &["n4", "n2", "n3"])).unwrap(),
            ids(&fork_collider, &["n1", "n2", "n3", "n4"])
        );
    }

    #[test]
    fn doubled_graph_links() {
        let dag = Dag::build(&["a", "b"], &[("a", "b")]).unwrap();
        let d = doubled_graph(&dag);
        let links: Vec<Link> = d.links().collect();
        assert_eq!(links.len(), 2);
        assert_eq!(
            (links[0].tail, links[0].head, links[0].orientation),
            (NodeId::new(0), NodeId::new(1), Orientation::Original)
        );
        assert_eq!(
            (links[1].tail, links[1].head, links[1].orientation),
            (NodeId::new(1), NodeId::new(0), Orientation::Reversed)
        );

        let fork_collider = fixtures::fork_collider();
        assert_eq!(doubled_graph(&fork_collider).links().count(), 14);

        let empty = Dag::from_indices(3, []).unwrap();
        assert_eq!(doubled_graph(&empty).links().count(), 0);
    }

    #[test]
    fn doubled_out_links_cover_every_link_once() {
        let dag = fixtures::fork_collider();
        let d = doubled_graph(&dag);
        let mut seen = vec![0; d.link_count()];
        for v in dag.nodes() {
            for l in d.out_links(v) {
                assert_eq!(d.link(l).tail, v);
                seen[l.index()] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn node_set_operations() {
        let a = NodeSet::from_indices([3, 1, 1, 2]);
        assert_eq!(a.as_slice(), &[NodeId::new(1), NodeId::new(2), NodeId::new(3)]);
        let b = NodeSet::from_indices([2, 5]);
        assert_eq!(a.union(&b), NodeSet::from_indices([1, 2, 3, 5]));
        assert_eq!(a.difference(&b), NodeSet::from_indices([1, 3]));
        assert!(!a.is_disjoint(&b));
        assert!(NodeSet::from_indices([1, 3]).is_subset(&a));
    }

    fn reaches(dag: &Dag, from: NodeId, to: NodeId) -> bool {
        let mut seen = vec![false; dag.node_count()];
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            if !std::mem::replace(&mut seen[v.index()], true) {
                stack.extend(dag.children(v));
            }
        }
        false
    }

    fn arb_dag_with_subsets(max: usize) -> impl Strategy<Value = (Dag, Vec<bool>, Vec<bool>)> {
        crate::testing::arb_dag(max).prop_flat_map(|dag| {
            let n = dag.node_count();
            (
                Just(dag),
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(any::<bool>(), n),
            )
        })
    }

    proptest! {
        #[test]
        fn table_marks_nodes_with_a_path_into_l((dag, a, _) in arb_dag_with_subsets(9)) {
            let l = NodeSet::from_mask(&a);
            let table = descendant_table(&dag, &l).unwrap();
            for v in dag.nodes() {
                let expected = l.iter().any(|x| reaches(&dag, v, x));
                prop_assert_eq!(table.is_marked(v), expected);
            }
            prop_assert_eq!(NodeSet::from_mask(table.flags()), ancestral_set(&dag, &l).unwrap());
        }

        #[test]
        fn ancestral_set_is_monotone_and_idempotent((dag, a, b) in arb_dag_with_subsets(9)) {
            let small = NodeSet::from_mask(&a);
            let big = small.union(&NodeSet::from_mask(&b));
            let anc_small = ancestral_set(&dag, &small).unwrap();
            let anc_big = ancestral_set(&dag, &big).unwrap();
            prop_assert!(small.is_subset(&anc_small));
            prop_assert!(anc_small.is_subset(&anc_big));
            prop_assert_eq!(ancestral_set(&dag, &anc_small).unwrap(), anc_small);
        }

        #[test]
        fn doubled_links_pair_up_with_edges(dag in crate::testing::arb_dag(9)) {
            let d = doubled_graph(&dag);
            prop_assert_eq!(d.link_count(), 2 * dag.edge_count());
            for (i, e) in dag.edges().iter().enumerate() {
                let fwd = d.link(DoubledGraph::original(EdgeId::new(i)));
                let back = d.link(DoubledGraph::reversed(EdgeId::new(i)));
                prop_assert_eq!((fwd.tail, fwd.head, fwd.orientation), (e.tail, e.head, Orientation::Original));
                prop_assert_eq!((back.tail, back.head, back.orientation), (e.head, e.tail, Orientation::Reversed));
                prop_assert_eq!(fwd.edge.index(), i);
                prop_assert_eq!(back.edge.index(), i);
            }
        }
    }
}
