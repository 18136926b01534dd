//! d-separation queries.
//!
//! Two engines compute the set of nodes d-separated from `J` given `L`:
//!
//! * [`Engine::Faithful`] runs the link-labeling search of
//!   [`crate::reachability`] over the doubled graph with the d-separation
//!   legality rule ([`dsep_legal_pair`]).
//! * [`Engine::Fast`] walks `(node, arrival)` states and expands a node's whole
//!   out-list or in-list at once, so every doubled-graph link is traversed at
//!   most once and the sweep is `O(|V| + |E|)`.
//!
//! Both return the same set; the test suites hold them to that.

use std::collections::VecDeque;

use crate::dag::{descendant_table, Dag, DescendantTable, DoubledGraph, EdgeId, LinkId, NodeId, NodeSet, Orientation};
use crate::error::{Error, Result};
use crate::reachability::{find_reachable_until, LegalPairRelation, SearchStats};

/// `(J, L)`: query nodes and conditioning nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeparationQuery {
    j: NodeSet,
    l: NodeSet,
}

impl SeparationQuery {
    pub fn new(dag: &Dag, j: NodeSet, l: NodeSet) -> Result<Self> {
        if j.is_empty() {
            return Err(Error::EmptyStartSet);
        }
        j.check_within(dag)?;
        l.check_within(dag)?;
        if !j.is_disjoint(&l) {
            return Err(Error::OverlappingSets {
                first: "J",
                second: "L",
            });
        }
        Ok(SeparationQuery { j, l })
    }

    pub fn from_names<S: AsRef<str>>(dag: &Dag, j: &[S], l: &[S]) -> Result<Self> {
        SeparationQuery::new(dag, dag.resolve_set(j)?, dag.resolve_set(l)?)
    }

    pub fn j(&self) -> &NodeSet {
        &self.j
    }

    pub fn l(&self) -> &NodeSet {
        &self.l
    }
}

/// `I(J, L, K)`: is `K` d-separated from `J` given `L`?
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndependenceStatement {
    j: NodeSet,
    l: NodeSet,
    k: NodeSet,
}

impl IndependenceStatement {
    pub fn new(dag: &Dag, j: NodeSet, l: NodeSet, k: NodeSet) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::EmptyTargetSet);
        }
        k.check_within(dag)?;
        let query = SeparationQuery::new(dag, j, l)?;
        if !query.j.is_disjoint(&k) {
            return Err(Error::OverlappingSets {
                first: "J",
                second: "K",
            });
        }
        if !query.l.is_disjoint(&k) {
            return Err(Error::OverlappingSets {
                first: "L",
                second: "K",
            });
        }
        Ok(IndependenceStatement {
            j: query.j,
            l: query.l,
            k,
        })
    }

    pub fn from_names<S: AsRef<str>>(dag: &Dag, j: &[S], l: &[S], k: &[S]) -> Result<Self> {
        IndependenceStatement::new(dag, dag.resolve_set(j)?, dag.resolve_set(l)?, dag.resolve_set(k)?)
    }

    pub fn j(&self) -> &NodeSet {
        &self.j
    }

    pub fn l(&self) -> &NodeSet {
        &self.l
    }

    pub fn k(&self) -> &NodeSet {
        &self.k
    }

    pub fn query(&self) -> SeparationQuery {
        SeparationQuery {
            j: self.j.clone(),
            l: self.l.clone(),
        }
    }
}

/// One link of a trail: the base edge and whether it is walked tail to head.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrailStep {
    pub edge: EdgeId,
    pub forward: bool,
}

/// A sequence of distinct edges forming a path in the undirected skeleton.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Trail {
    nodes: Vec<NodeId>,
    steps: Vec<TrailStep>,
}

impl Trail {
    pub fn new(dag: &Dag, nodes: Vec<NodeId>, edges: &[EdgeId]) -> Result<Trail> {
        let malformed = |reason: String| Err(Error::MalformedTrail { reason });
        if nodes.len() < 2 {
            return malformed("a trail needs at least one link".into());
        }
        if edges.len() + 1 != nodes.len() {
            return malformed(format!("{} nodes but {} links", nodes.len(), edges.len()));
        }
        for &v in &nodes {
            if !dag.contains(v) {
                return Err(Error::ForeignNode {
                    index: v.index(),
                    node_count: dag.node_count(),
                });
            }
        }
        let mut steps = Vec::with_capacity(edges.len());
        for (p, &edge) in edges.iter().enumerate() {
            if edge.index() >= dag.edge_count() {
                return malformed(format!("unknown edge {}", edge.index()));
            }
            let e = dag.edge(edge);
            let (a, b) = (nodes[p], nodes[p + 1]);
            let forward = if (e.tail, e.head) == (a, b) {
                true
            } else if (e.tail, e.head) == (b, a) {
                false
            } else {
                return malformed(format!("link {p} does not join {} and {}", dag.name(a), dag.name(b)));
            };
            if steps.iter().any(|s: &TrailStep| s.edge == edge) {
                return malformed(format!("link {p} repeats an earlier link"));
            }
            steps.push(TrailStep { edge, forward });
        }
        Ok(Trail { nodes, steps })
    }

    /// Builds the trail visiting `nodes`, looking up the joining edges.
    pub fn through(dag: &Dag, nodes: &[NodeId]) -> Result<Trail> {
        let mut edges = Vec::with_capacity(nodes.len().saturating_sub(1));
        for pair in nodes.windows(2) {
            let edge = dag
                .edge_between(pair[0], pair[1])
                .ok_or_else(|| Error::MalformedTrail {
                    reason: format!("{} and {} are not adjacent", pair[0], pair[1]),
                })?;
            edges.push(edge);
        }
        Trail::new(dag, nodes.to_vec(), &edges)
    }

    pub fn from_names<S: AsRef<str>>(dag: &Dag, names: &[S]) -> Result<Trail> {
        let nodes = names
            .iter()
            .map(|n| dag.resolve(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Trail::through(dag, &nodes)
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn steps(&self) -> &[TrailStep] {
        &self.steps
    }

    pub fn start(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn end(&self) -> NodeId {
        *self.nodes.last().expect("trail has nodes")
    }

    /// Head-to-head at node position `p`: both adjacent links point into it.
    /// Endpoints never are.
    pub fn is_head_to_head(&self, p: usize) -> bool {
        p > 0 && p + 1 < self.nodes.len() && self.steps[p - 1].forward && !self.steps[p].forward
    }

    /// No node repeats.
    pub fn is_simple(&self) -> bool {
        let mut sorted = self.nodes.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }
}

/// True iff every head-to-head node of `trail` is in `l` or has a descendant in
/// `l`, and every other interior node is outside `l`.
pub fn is_active_trail(dag: &Dag, trail: &Trail, l: &NodeSet) -> Result<bool> {
    let table = descendant_table(dag, l)?;
    is_active_trail_with(trail, &table)
}

/// [`is_active_trail`] against a prebuilt table for `l`.
pub fn is_active_trail_with(trail: &Trail, table: &DescendantTable) -> Result<bool> {
    let l = table.conditioning_set();
    for (index, v) in [(0, trail.start()), (trail.nodes.len() - 1, trail.end())] {
        if l.contains(v) {
            return Err(Error::EndpointInConditioningSet { index });
        }
    }
    Ok((1..trail.nodes.len() - 1).all(|p| {
        let v = trail.nodes[p];
        if trail.is_head_to_head(p) {
            table.is_marked(v)
        } else {
            !l.contains(v)
        }
    }))
}

/// The d-separation legality rule over the doubled graph: `(u -> v, v -> w)` is
/// legal iff `u != w` and either `v` is head-to-head on `u - v - w` and is or has
/// a descendant in `L`, or `v` is not head-to-head and `v` is outside `L`.
#[derive(Clone, Debug)]
pub struct DsepLegality<'a> {
    doubled: DoubledGraph<'a>,
    table: &'a DescendantTable,
    in_l: Vec<bool>,
}

impl<'a> DsepLegality<'a> {
    pub fn new(doubled: DoubledGraph<'a>, table: &'a DescendantTable) -> Self {
        let in_l = table.conditioning_set().mask(doubled.base().node_count());
        DsepLegality { doubled, table, in_l }
    }

    #[inline]
    fn judge(&self, first: LinkId, second: LinkId) -> bool {
        let a = self.doubled.link(first);
        let b = self.doubled.link(second);
        debug_assert_eq!(a.head, b.tail);
        if a.tail == b.head {
            return false;
        }
        let v = a.head;
        let head_to_head = a.orientation == Orientation::Original && b.orientation == Orientation::Reversed;
        if head_to_head {
            self.table.is_marked(v)
        } else {
            !self.in_l[v.index()]
        }
    }
}

impl LegalPairRelation for DsepLegality<'_> {
    fn is_legal(&self, first: LinkId, second: LinkId) -> bool {
        self.judge(first, second)
    }
}

/// Legality of a single pair of doubled-graph links.
pub fn dsep_legal_pair(dag: &Dag, table: &DescendantTable, l: &NodeSet, first: LinkId, second: LinkId) -> Result<bool> {
    let doubled = DoubledGraph::new(dag);
    for link in [first, second] {
        if link.index() >= doubled.link_count() {
            return Err(Error::NonAdjacentPair {
                first: first.index(),
                second: second.index(),
            });
        }
    }
    if doubled.link(first).head != doubled.link(second).tail {
        return Err(Error::NonAdjacentPair {
            first: first.index(),
            second: second.index(),
        });
    }
    debug_assert_eq!(table.conditioning_set(), l);
    let a = doubled.link(first);
    let b = doubled.link(second);
    if a.tail == b.head {
        return Ok(false);
    }
    let v = a.head;
    let head_to_head = a.orientation == Orientation::Original && b.orientation == Orientation::Reversed;
    Ok(if head_to_head {
        table.is_marked(v)
    } else {
        !l.contains(v)
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Engine {
    /// Link-labeling search with per-pair legality checks.
    #[default]
    Faithful,
    /// Per-node class expansion, linear in the number of links.
    Fast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepOptions {
    pub engine: Engine,
    /// Stop the sweep as soon as a target node is reached.
    pub early_stop: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            engine: Engine::Faithful,
            early_stop: true,
        }
    }
}

/// Outcome of one reachability sweep from `J` given `L`.
#[derive(Clone, Debug)]
pub struct Sweep {
    /// Nodes connected to `J` by a legal path (start nodes included).
    pub reached: Vec<bool>,
    pub stats: SearchStats,
    pub stopped_early: bool,
}

impl Sweep {
    /// `V - (reached ∪ J ∪ L)`.
    pub fn separated(&self, q: &SeparationQuery) -> NodeSet {
        let mut keep: Vec<bool> = self.reached.iter().map(|&r| !r).collect();
        for v in q.j.iter().chain(q.l.iter()) {
            keep[v.index()] = false;
        }
        NodeSet::from_mask(&keep)
    }
}

fn sweep_faithful(
    dag: &Dag,
    table: &DescendantTable,
    start: &NodeSet,
    stop: impl FnMut(NodeId) -> bool,
) -> Result<Sweep> {
    let doubled = DoubledGraph::new(dag);
    let legality = DsepLegality::new(doubled, table);
    let r = find_reachable_until(&doubled, &legality, start, stop)?;
    Ok(Sweep {
        stats: r.stats(),
        stopped_early: r.stopped_early(),
        reached: r.reached_mask().to_vec(),
    })
}

// Per-node state bits for the fast sweep, packed so that one visit touches
// one byte.
const QUEUED_FROM_PARENT: u8 = 1;
const QUEUED_FROM_CHILD: u8 = 2;
const OUT_DONE: u8 = 4;
const IN_DONE: u8 = 8;
const REACHED: u8 = 16;
const IN_L: u8 = 32;
const MARKED: u8 = 64;

fn sweep_fast(
    dag: &Dag,
    table: &DescendantTable,
    start: &NodeSet,
    mut stop: impl FnMut(NodeId) -> bool,
) -> Result<Sweep> {
    if start.is_empty() {
        return Err(Error::EmptyStartSet);
    }
    start.check_within(dag)?;
    let mut state: Vec<u8> = table.flags().iter().map(|&m| if m { MARKED } else { 0 }).collect();
    for v in table.conditioning_set().iter() {
        state[v.index()] |= IN_L;
    }
    for v in start.iter() {
        state[v.index()] |= REACHED;
    }
    // Queue entries carry the node's incidence span, read while its parent is
    // expanded so those loads overlap instead of waiting on the queue.
    struct Entry {
        v: NodeId,
        from_child: bool,
        span: [u32; 3],
    }
    let mut queue: VecDeque<Entry> = VecDeque::with_capacity(dag.node_count());
    let mut stats = SearchStats::default();
    let mut stopped_early = false;

    // Walks one list of `v`; returns true when `stop` fired.
    let mut expand =
        |v: NodeId, span: [u32; 3], down: bool, state: &mut Vec<u8>, queue: &mut VecDeque<Entry>| -> bool {
            let (done, neighbors, queued) = if down {
                (OUT_DONE, dag.neighbors_in(span[0], span[1]), QUEUED_FROM_PARENT)
            } else {
                (IN_DONE, dag.neighbors_in(span[1], span[2]), QUEUED_FROM_CHILD)
            };
            if state[v.index()] & done != 0 {
                return false;
            }
            state[v.index()] |= done;
            stats.links_labeled += neighbors.len() as u64;
            for &w in neighbors {
                let s = &mut state[w.index()];
                if *s & queued == 0 {
                    *s |= queued;
                    queue.push_back(Entry {
                        v: w,
                        from_child: !down,
                        span: dag.incidence_span(w),
                    });
                }
                if *s & REACHED == 0 {
                    *s |= REACHED;
                    if stop(w) {
                        return true;
                    }
                }
            }
            false
        };

    'search: {
        for j in start.iter() {
            let span = dag.incidence_span(j);
            if expand(j, span, true, &mut state, &mut queue) || expand(j, span, false, &mut state, &mut queue) {
                stopped_early = true;
                break 'search;
            }
        }
        while let Some(Entry { v, from_child, span }) = queue.pop_front() {
            let s = state[v.index()];
            let open = s & IN_L == 0;
            // From a parent: continue down a chain, or turn back up through a
            // collider. From a child: pass through in both directions.
            let (down, up) = if from_child {
                (open, open)
            } else {
                (open, s & MARKED != 0)
            };
            if (down && expand(v, span, true, &mut state, &mut queue))
                || (up && expand(v, span, false, &mut state, &mut queue))
            {
                stopped_early = true;
                break 'search;
            }
        }
    }
    Ok(Sweep {
        reached: state.iter().map(|&s| s & REACHED != 0).collect(),
        stats,
        stopped_early,
    })
}

/// Runs one sweep with the chosen engine, stopping early when `stop` fires.
pub fn sweep(dag: &Dag, q: &SeparationQuery, engine: Engine, stop: impl FnMut(NodeId) -> bool) -> Result<Sweep> {
    let table = DescendantTable::new(dag, q.l())?;
    match engine {
        Engine::Faithful => sweep_faithful(dag, &table, q.j(), stop),
        Engine::Fast => sweep_fast(dag, &table, q.j(), stop),
    }
}

/// All nodes d-separated from `J` given `L`, via the link-labeling search.
pub fn dsep_set(dag: &Dag, q: &SeparationQuery) -> Result<NodeSet> {
    dsep_set_with(dag, q, Engine::Faithful)
}

/// All nodes d-separated from `J` given `L`, in `O(|V| + |E|)`.
pub fn dsep_set_fast(dag: &Dag, q: &SeparationQuery) -> Result<NodeSet> {
    dsep_set_with(dag, q, Engine::Fast)
}

pub fn dsep_set_with(dag: &Dag, q: &SeparationQuery, engine: Engine) -> Result<NodeSet> {
    Ok(sweep(dag, q, engine, |_| false)?.separated(q))
}

/// Does `I(J, L, K)` hold? Stops at the first reached node of `K`.
pub fn is_dseparated(dag: &Dag, s: &IndependenceStatement) -> Result<bool> {
    is_dseparated_with(dag, s, SweepOptions::default())
}

pub fn is_dseparated_with(dag: &Dag, s: &IndependenceStatement, options: SweepOptions) -> Result<bool> {
    let q = s.query();
    if options.early_stop {
        let targets = s.k.mask(dag.node_count());
        let sweep = sweep(dag, &q, options.engine, |v| targets[v.index()])?;
        Ok(!s.k.iter().any(|v| sweep.reached[v.index()]))
    } else {
        let separated = dsep_set_with(dag, &q, options.engine)?;
        Ok(s.k.is_subset(&separated))
    }
}
