//! Seeded graph families for tests, verification corpora and benchmarks.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dag::Dag;

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0x5eed_d5e9;

/// Derives an independent stream seed from `(base, index)` (splitmix64 finalizer).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Family {
    /// `v0 -> v1 -> ... -> vn`
    Chain,
    /// Hub `v0` with an edge to every leaf.
    Star,
    /// Uniformly random sparse DAG with `|V| = |E| / 2`.
    Random,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Chain => "chain",
            Family::Star => "star",
            Family::Random => "random",
        }
    }

    /// An instance with (about) `edges` edges.
    pub fn instance(self, edges: usize, seed: u64) -> Dag {
        match self {
            Family::Chain => chain(edges + 1),
            Family::Star => star(edges),
            Family::Random => random_sparse((edges / 2).max(2), edges, seed),
        }
    }
}

pub fn chain(nodes: usize) -> Dag {
    Dag::from_indices(nodes, (1..nodes).map(|i| (i - 1, i))).expect("chains are acyclic")
}

/// A hub with `leaves` children.
pub fn star(leaves: usize) -> Dag {
    Dag::from_indices(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("stars are acyclic")
}

/// `edges` distinct edges drawn uniformly among the pairs consistent with a
/// random topological order. Edge count is capped at `n(n-1)/2`.
pub fn random_sparse(nodes: usize, edges: usize, seed: u64) -> Dag {
    let mut rng = rng(seed);
    let mut order: Vec<usize> = (0..nodes).collect();
    order.shuffle(&mut rng);
    let max_edges = nodes * nodes.saturating_sub(1) / 2;
    let target = edges.min(max_edges);
    let mut seen = HashSet::with_capacity(target);
    let mut list = Vec::with_capacity(target);
    while list.len() < target {
        let a = rng.gen_range(0..nodes);
        let b = rng.gen_range(0..nodes);
        if a == b {
            continue;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        if seen.insert((lo, hi)) {
            list.push((order[lo], order[hi]));
        }
    }
    Dag::from_indices(nodes, list).expect("edges follow a topological order")
}

/// Each forward pair of a random order becomes an edge with probability `p`.
pub fn erdos_renyi<R: Rng>(nodes: usize, p: f64, rng: &mut R) -> Dag {
    let mut order: Vec<usize> = (0..nodes).collect();
    order.shuffle(rng);
    let mut list = Vec::new();
    for i in 0..nodes {
        for j in i + 1..nodes {
            if rng.gen_bool(p) {
                list.push((order[i], order[j]));
            }
        }
    }
    Dag::from_indices(nodes, list).expect("edges follow a topological order")
}

/// A small DAG mixing chains, forks, colliders and Erdős-Rényi graphs, with
/// between 2 and `max_nodes` nodes.
pub fn small_dag<R: Rng>(rng: &mut R, max_nodes: usize) -> Dag {
    let n = rng.gen_range(2..=max_nodes.max(2));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let relabel = |list: Vec<(usize, usize)>| -> Vec<(usize, usize)> {
        list.into_iter().map(|(a, b)| (order[a], order[b])).collect()
    };
    let edges = match rng.gen_range(0..10) {
        0 => relabel((1..n).map(|i| (i - 1, i)).collect()),
        1 => relabel((1..n).map(|i| (0, i)).collect()),
        2 => relabel((0..n - 1).map(|i| (i, n - 1)).collect()),
        3 => {
            // Chain with chords skipping one node.
            let mut list: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
            list.extend((2..n).filter(|_| rng.gen_bool(0.5)).map(|i| (i - 2, i)));
            relabel(list)
        }
        _ => {
            let p = rng.gen_range(0.15..0.85);
            return erdos_renyi(n, p, rng);
        }
    };
    Dag::from_indices(n, edges).expect("generated shapes are acyclic")
}

/// `count` small DAGs from one seed; graph `i` depends only on `(seed, i)`.
pub fn small_corpus(count: usize, max_nodes: usize, seed: u64) -> Vec<Dag> {
    (0..count)
        .map(|i| small_dag(&mut rng(derive_seed(seed, i as u64)), max_nodes))
        .collect()
}
