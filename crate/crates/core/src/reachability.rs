//! Breadth-first reachability under forbidden consecutive link pairs.
//!
//! The search labels links rather than nodes: a link `v -> w` receives level
//! `i + 1` when some link `u -> v` already carries level `i` and the pair
//! `(u -> v, v -> w)` is legal. Links leaving a start node are seeded at level 1,
//! standing in for the virtual source that precedes every start node.

use std::collections::{HashSet, VecDeque};

use crate::dag::{DoubledGraph, LinkId, NodeId, NodeSet};
use crate::error::{Error, Result};

/// A directed graph (cycles allowed) with dense node and link ids.
pub trait Digraph {
    fn node_count(&self) -> usize;
    fn link_count(&self) -> usize;
    /// `(tail, head)` of a link.
    fn endpoints(&self, link: LinkId) -> (NodeId, NodeId);
    fn out_links(&self, node: NodeId) -> impl Iterator<Item = LinkId> + '_;
}

impl Digraph for DoubledGraph<'_> {
    fn node_count(&self) -> usize {
        self.base().node_count()
    }

    fn link_count(&self) -> usize {
        DoubledGraph::link_count(self)
    }

    fn endpoints(&self, link: LinkId) -> (NodeId, NodeId) {
        let l = self.link(link);
        (l.tail, l.head)
    }

    fn out_links(&self, node: NodeId) -> impl Iterator<Item = LinkId> + '_ {
        DoubledGraph::out_links(self, node)
    }
}

/// A plain link list, used for general directed graphs.
#[derive(Clone, Debug, Default)]
pub struct LinkList {
    node_count: usize,
    links: Vec<(NodeId, NodeId)>,
    out: Vec<Vec<LinkId>>,
}

impl LinkList {
    pub fn new(node_count: usize, links: &[(usize, usize)]) -> Result<Self> {
        let mut out = vec![Vec::new(); node_count];
        let mut stored = Vec::with_capacity(links.len());
        for (i, &(u, v)) in links.iter().enumerate() {
            for x in [u, v] {
                if x >= node_count {
                    return Err(Error::ForeignNode { index: x, node_count });
                }
            }
            out[u].push(LinkId::new(i));
            stored.push((NodeId::new(u), NodeId::new(v)));
        }
        Ok(LinkList {
            node_count,
            links: stored,
            out,
        })
    }
}

impl Digraph for LinkList {
    fn node_count(&self) -> usize {
        self.node_count
    }

    fn link_count(&self) -> usize {
        self.links.len()
    }

    fn endpoints(&self, link: LinkId) -> (NodeId, NodeId) {
        self.links[link.index()]
    }

    fn out_links(&self, node: NodeId) -> impl Iterator<Item = LinkId> + '_ {
        self.out[node.index()].iter().copied()
    }
}

/// Decides whether two adjacent links may appear consecutively on a path.
pub trait LegalPairRelation {
    fn is_legal(&self, first: LinkId, second: LinkId) -> bool;
}

/// No pair is forbidden.
#[derive(Clone, Copy, Debug, Default)]
pub struct Unrestricted;

impl LegalPairRelation for Unrestricted {
    fn is_legal(&self, _: LinkId, _: LinkId) -> bool {
        true
    }
}

/// An explicit list of forbidden pairs.
#[derive(Clone, Debug, Default)]
pub struct ForbiddenPairs(HashSet<(LinkId, LinkId)>);

impl ForbiddenPairs {
    pub fn new<I: IntoIterator<Item = (LinkId, LinkId)>>(pairs: I) -> Self {
        ForbiddenPairs(pairs.into_iter().collect())
    }
}

impl LegalPairRelation for ForbiddenPairs {
    fn is_legal(&self, first: LinkId, second: LinkId) -> bool {
        !self.0.contains(&(first, second))
    }
}

impl<F: Fn(LinkId, LinkId) -> bool> LegalPairRelation for F {
    fn is_legal(&self, first: LinkId, second: LinkId) -> bool {
        self(first, second)
    }
}

/// Operation counts of one sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub links_labeled: u64,
    pub pairs_examined: u64,
}

const UNLABELED: u32 = 0;
const NO_PREDECESSOR: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct ReachabilityResult {
    reached: Vec<bool>,
    start: NodeSet,
    level: Vec<u32>,
    predecessor: Vec<u32>,
    stats: SearchStats,
    stopped_early: bool,
}

impl ReachabilityResult {
    pub fn is_reached(&self, v: NodeId) -> bool {
        self.reached[v.index()]
    }

    pub fn reached(&self) -> NodeSet {
        NodeSet::from_mask(&self.reached)
    }

    pub fn reached_mask(&self) -> &[bool] {
        &self.reached
    }

    pub fn start(&self) -> &NodeSet {
        &self.start
    }

    /// BFS level of a link, `None` when it was never labeled.
    pub fn link_level(&self, link: LinkId) -> Option<u32> {
        match self.level[link.index()] {
            UNLABELED => None,
            l => Some(l),
        }
    }

    /// The labeled link from which `link` was first labeled.
    pub fn predecessor(&self, link: LinkId) -> Option<LinkId> {
        match self.predecessor.get(link.index()) {
            Some(&p) if p != NO_PREDECESSOR => Some(LinkId::new(p as usize)),
            _ => None,
        }
    }

    /// The legal path ending in `link`, starting from a link that leaves a start
    /// node. `None` if the link is unlabeled.
    pub fn witness_path(&self, link: LinkId) -> Option<Vec<LinkId>> {
        self.link_level(link)?;
        let mut path = vec![link];
        let mut cur = link;
        while let Some(p) = self.predecessor(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    /// True if the sweep was cut short by a stop condition.
    pub fn stopped_early(&self) -> bool {
        self.stopped_early
    }
}

/// All nodes reachable from `start` by a legal path.
pub fn find_reachable<G, R>(graph: &G, legal: &R, start: &NodeSet) -> Result<ReachabilityResult>
where
    G: Digraph,
    R: LegalPairRelation + ?Sized,
{
    find_reachable_until(graph, legal, start, |_| false)
}

/// Like [`find_reachable`], but stops as soon as `stop` returns true for a newly
/// reached node. Start nodes are not offered to `stop`.
pub fn find_reachable_until<G, R, S>(graph: &G, legal: &R, start: &NodeSet, mut stop: S) -> Result<ReachabilityResult>
where
    G: Digraph,
    R: LegalPairRelation + ?Sized,
    S: FnMut(NodeId) -> bool,
{
    if start.is_empty() {
        return Err(Error::EmptyStartSet);
    }
    let n = graph.node_count();
    if let Some(v) = start.iter().find(|v| v.index() >= n) {
        return Err(Error::ForeignNode {
            index: v.index(),
            node_count: n,
        });
    }
    let mut result = ReachabilityResult {
        reached: start.mask(n),
        start: start.clone(),
        level: vec![UNLABELED; graph.link_count()],
        predecessor: vec![NO_PREDECESSOR; graph.link_count()],
        stats: SearchStats::default(),
        stopped_early: false,
    };
    let mut queue = VecDeque::new();

    macro_rules! label {
        ($link:expr, $level:expr, $pred:expr) => {{
            let link: LinkId = $link;
            result.level[link.index()] = $level;
            result.predecessor[link.index()] = $pred;
            result.stats.links_labeled += 1;
            queue.push_back(link);
            let (_, head) = graph.endpoints(link);
            if !result.reached[head.index()] {
                result.reached[head.index()] = true;
                if stop(head) {
                    result.stopped_early = true;
                    return Ok(result);
                }
            }
        }};
    }

    for j in start.iter() {
        for link in graph.out_links(j) {
            if result.level[link.index()] == UNLABELED {
                label!(link, 1, NO_PREDECESSOR);
            }
        }
    }

    while let Some(first) = queue.pop_front() {
        let level = result.level[first.index()];
        let (_, v) = graph.endpoints(first);
        for second in graph.out_links(v) {
            if result.level[second.index()] != UNLABELED {
                continue;
            }
            result.stats.pairs_examined += 1;
            if legal.is_legal(first, second) {
                label!(second, level + 1, first.index() as u32);
            }
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chain() -> LinkList {
        LinkList::new(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn unconstrained_chain() {
        let r = find_reachable(&chain(), &Unrestricted, &NodeSet::from_indices([0])).unwrap();
        assert_eq!(r.reached(), NodeSet::from_indices([0, 1, 2]));
        assert_eq!(r.link_level(LinkId::new(0)), Some(1));
        assert_eq!(r.link_level(LinkId::new(1)), Some(2));
    }

    #[test]
    fn forbidden_continuation_stops_the_chain() {
        let forbid = ForbiddenPairs::new([(LinkId::new(0), LinkId::new(1))]);
        let r = find_reachable(&chain(), &forbid, &NodeSet::from_indices([0])).unwrap();
        assert_eq!(r.reached(), NodeSet::from_indices([0, 1]));
        assert_eq!(r.link_level(LinkId::new(1)), None);
    }

    #[test]
    fn errors() {
        assert_eq!(
            find_reachable(&chain(), &Unrestricted, &NodeSet::empty()).unwrap_err(),
            Error::EmptyStartSet
        );
        assert!(matches!(
            find_reachable(&chain(), &Unrestricted, &NodeSet::from_indices([7])),
            Err(Error::ForeignNode { index: 7, .. })
        ));
    }

    #[test]
    fn cyclic_graph_terminates() {
        let g = LinkList::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let r = find_reachable(&g, &Unrestricted, &NodeSet::from_indices([1])).unwrap();
        assert_eq!(r.reached(), NodeSet::from_indices([0, 1, 2]));
        assert_eq!(r.stats().links_labeled, 3);
    }

    #[test]
    fn early_stop_reports_itself() {
        let r = find_reachable_until(&chain(), &Unrestricted, &NodeSet::from_indices([0]), |v| v.index() == 1).unwrap();
        assert!(r.stopped_early());
        assert!(!r.is_reached(NodeId::new(2)));
    }

    fn bfs_oracle(n: usize, links: &[(usize, usize)], start: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = start.to_vec();
        for &s in start {
            seen[s] = true;
        }
        while let Some(u) = stack.pop() {
            for &(a, b) in links {
                if a == u && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen
    }

    fn digraph_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (1usize..=8).prop_flat_map(|n| (Just(n), proptest::collection::vec((0..n, 0..n), 0..20)))
    }

    proptest! {
        #[test]
        fn unrestricted_matches_plain_bfs((n, links) in digraph_strategy(), s in 0usize..8) {
            let s = s % n;
            let g = LinkList::new(n, &links).unwrap();
            let r = find_reachable(&g, &Unrestricted, &NodeSet::from_indices([s])).unwrap();
            prop_assert_eq!(r.reached_mask(), &bfs_oracle(n, &links, &[s])[..]);
        }

        #[test]
        fn reached_is_monotone_in_start(
            (n, links) in digraph_strategy(),
            forbidden in proptest::collection::vec((0usize..20, 0usize..20), 0..15),
            a in 0usize..8,
            b in 0usize..8,
        ) {
            let g = LinkList::new(n, &links).unwrap();
            let rel = ForbiddenPairs::new(forbidden.into_iter().map(|(x, y)| (LinkId::new(x), LinkId::new(y))));
            let small = NodeSet::from_indices([a % n]);
            let large = NodeSet::from_indices([a % n, b % n]);
            let r1 = find_reachable(&g, &rel, &small).unwrap().reached();
            let r2 = find_reachable(&g, &rel, &large).unwrap().reached();
            prop_assert!(r1.is_subset(&r2));
        }

        #[test]
        fn labeled_links_have_legal_witnesses(
            (n, links) in digraph_strategy(),
            forbidden in proptest::collection::vec((0usize..20, 0usize..20), 0..15),
            s in 0usize..8,
        ) {
            let g = LinkList::new(n, &links).unwrap();
            let rel = ForbiddenPairs::new(forbidden.into_iter().map(|(x, y)| (LinkId::new(x), LinkId::new(y))));
            let start = NodeSet::from_indices([s % n]);
            let r = find_reachable(&g, &rel, &start).unwrap();
            for link in (0..links.len()).map(LinkId::new) {
                let Some(path) = r.witness_path(link) else { continue };
                prop_assert!(start.contains(g.endpoints(path[0]).0));
                for (k, pair) in path.windows(2).enumerate() {
                    prop_assert_eq!(g.endpoints(pair[0]).1, g.endpoints(pair[1]).0);
                    prop_assert!(rel.is_legal(pair[0], pair[1]));
                    // BFS consistency: levels rise by one along the witness.
                    prop_assert_eq!(r.link_level(pair[0]), Some(k as u32 + 1));
                }
                prop_assert_eq!(r.link_level(link), Some(path.len() as u32));
            }
            for v in (0..n).map(NodeId::new) {
                if r.is_reached(v) && !start.contains(v) {
                    prop_assert!((0..links.len()).map(LinkId::new).any(|l| g.endpoints(l).1 == v && r.link_level(l).is_some()));
                }
            }
        }
    }
}
