//! Numeric check that graphical separation and probabilistic independence
//! coincide: every d-separated triple must be independent in every random
//! network over the graph, and d-connected triples should show dependence in
//! some network.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use crate::dag::{Dag, NodeId, NodeSet};
use crate::error::Result;
use crate::generate::{derive_seed, rng};
use crate::oracle::network::{ci_gap, DiscreteNetwork};
use crate::par::{map_indexed, Execution};
use crate::separation::{is_dseparated, IndependenceStatement};

/// Tolerance for independencies that hold exactly up to rounding.
pub const SOUNDNESS_TOLERANCE: f64 = 1e-9;
/// Gap that counts as genuine dependence.
pub const DEPENDENCE_THRESHOLD: f64 = 1e-6;

/// A single-variable statement `(j, L, k)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub j: NodeId,
    pub l: Vec<NodeId>,
    pub k: NodeId,
}

impl Triple {
    pub fn describe(&self, dag: &Dag) -> String {
        let l: Vec<&str> = self.l.iter().map(|&v| dag.name(v)).collect();
        format!("({}, {{{}}}, {})", dag.name(self.j), l.join(","), dag.name(self.k))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericConfig {
    /// Random networks per triple.
    pub trials: usize,
    pub seed: u64,
    /// Triples examined per graph; all of them when the graph has fewer.
    pub max_triples: usize,
    pub arity: usize,
    pub tolerance: f64,
    pub dependence_threshold: f64,
    /// Give missed d-connected triples one more round of fresh networks.
    pub retry_misses: bool,
    pub execution: Execution,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            trials: 5,
            seed: crate::generate::DEFAULT_SEED,
            max_triples: 64,
            arity: 2,
            tolerance: SOUNDNESS_TOLERANCE,
            dependence_threshold: DEPENDENCE_THRESHOLD,
            retry_misses: true,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NumericReport {
    pub triples: usize,
    pub separated: usize,
    /// `(separated triple, network)` pairs found independent.
    pub soundness_confirmations: usize,
    /// Separated triples found dependent in some network, with the gap.
    pub soundness_violations: Vec<(String, f64)>,
    pub connected: usize,
    /// Connected triples with a dependent network on the first round.
    pub dependence_found: usize,
    /// Connected triples without one on the first round.
    pub misses: Vec<String>,
    /// Misses that stayed independent after the retry round.
    pub persistent_misses: Vec<String>,
}

impl NumericReport {
    pub fn merge(&mut self, other: NumericReport) {
        self.triples += other.triples;
        self.separated += other.separated;
        self.soundness_confirmations += other.soundness_confirmations;
        self.soundness_violations.extend(other.soundness_violations);
        self.connected += other.connected;
        self.dependence_found += other.dependence_found;
        self.misses.extend(other.misses);
        self.persistent_misses.extend(other.persistent_misses);
    }

    /// Fraction of connected triples that showed dependence on the first round.
    pub fn completeness_rate(&self) -> f64 {
        if self.connected == 0 {
            1.0
        } else {
            self.dependence_found as f64 / self.connected as f64
        }
    }

    pub fn is_sound(&self) -> bool {
        self.soundness_violations.is_empty()
    }
}

impl fmt::Display for NumericReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "triples: {}", self.triples)?;
        writeln!(
            f,
            "separated: {} (confirmations {}, violations {})",
            self.separated,
            self.soundness_confirmations,
            self.soundness_violations.len()
        )?;
        writeln!(
            f,
            "connected: {} (dependent {}, rate {:.4}, misses {}, persistent {})",
            self.connected,
            self.dependence_found,
            self.completeness_rate(),
            self.misses.len(),
            self.persistent_misses.len()
        )?;
        for (triple, gap) in &self.soundness_violations {
            writeln!(f, "violation {triple} gap {gap:e}")?;
        }
        for triple in &self.persistent_misses {
            writeln!(f, "persistent miss {triple}")?;
        }
        Ok(())
    }
}

/// All `(j, L, k)` with `j != k` and `L` drawn from the other nodes, or a seeded
/// sample of `max` of them.
pub fn sample_triples(dag: &Dag, max: usize, seed: u64) -> Vec<Triple> {
    let n = dag.node_count();
    if n < 2 {
        return Vec::new();
    }
    let total = (n * (n - 1)) as f64 * 2f64.powi(n as i32 - 2);
    if total <= max as f64 {
        let mut all = Vec::new();
        for j in 0..n {
            for k in (0..n).filter(|&k| k != j) {
                let rest: Vec<usize> = (0..n).filter(|&v| v != j && v != k).collect();
                for mask in 0u64..(1 << rest.len()) {
                    let l = rest
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| mask >> b & 1 == 1)
                        .map(|(_, &v)| NodeId::new(v))
                        .collect();
                    all.push(Triple {
                        j: NodeId::new(j),
                        l,
                        k: NodeId::new(k),
                    });
                }
            }
        }
        return all;
    }
    let mut rng = rng(seed);
    let mut chosen = BTreeSet::new();
    while chosen.len() < max {
        let j = rng.gen_range(0..n);
        let k = rng.gen_range(0..n);
        if j == k {
            continue;
        }
        let l = (0..n)
            .filter(|&v| v != j && v != k && rng.gen_bool(0.5))
            .map(NodeId::new)
            .collect();
        chosen.insert(Triple {
            j: NodeId::new(j),
            l,
            k: NodeId::new(k),
        });
    }
    chosen.into_iter().collect()
}

/// Runs the check on one graph with `trials` networks per triple.
pub fn check_numeric(dag: &Dag, trials: usize, seed: u64) -> Result<NumericReport> {
    check_numeric_with(
        dag,
        &NumericConfig {
            trials,
            seed,
            ..NumericConfig::default()
        },
    )
}

pub fn check_numeric_with(dag: &Dag, config: &NumericConfig) -> Result<NumericReport> {
    let triples = sample_triples(dag, config.max_triples, derive_seed(config.seed, u64::MAX));
    let mut verdicts = Vec::with_capacity(triples.len());
    for t in &triples {
        let s = IndependenceStatement::new(
            dag,
            NodeSet::singleton(t.j),
            NodeSet::new(t.l.iter().copied()),
            NodeSet::singleton(t.k),
        )?;
        verdicts.push(is_dseparated(dag, &s)?);
    }

    let round = |offset: usize, subset: &[usize]| -> Result<Vec<f64>> {
        // gaps[trial][i] for triple subset[i]; per-trial seeds depend only on
        // (seed, round offset + trial).
        let per_trial = map_indexed(config.trials, config.execution, |trial| -> Result<Vec<f64>> {
            let net = DiscreteNetwork::random(dag, config.arity, derive_seed(config.seed, (offset + trial) as u64))?;
            let joint = net.joint()?;
            Ok(subset
                .iter()
                .map(|&i| {
                    let t = &triples[i];
                    ci_gap(
                        &joint,
                        &NodeSet::singleton(t.j),
                        &NodeSet::singleton(t.k),
                        &NodeSet::new(t.l.iter().copied()),
                    )
                })
                .collect())
        });
        let per_trial = per_trial.into_iter().collect::<Result<Vec<_>>>()?;
        // Largest gap per triple across trials.
        Ok((0..subset.len())
            .map(|i| per_trial.iter().map(|g| g[i]).fold(0.0, f64::max))
            .collect())
    };

    let all: Vec<usize> = (0..triples.len()).collect();
    let first = round(0, &all)?;
    let mut report = NumericReport {
        triples: triples.len(),
        ..Default::default()
    };
    let mut missed = Vec::new();
    for (i, t) in triples.iter().enumerate() {
        if verdicts[i] {
            report.separated += 1;
            if first[i] <= config.tolerance {
                report.soundness_confirmations += config.trials;
            } else {
                report.soundness_violations.push((t.describe(dag), first[i]));
            }
        } else {
            report.connected += 1;
            if first[i] > config.dependence_threshold {
                report.dependence_found += 1;
            } else {
                report.misses.push(t.describe(dag));
                missed.push(i);
            }
        }
    }
    if !missed.is_empty() {
        if config.retry_misses {
            let retry = round(config.trials, &missed)?;
            for (slot, &i) in missed.iter().enumerate() {
                if retry[slot] <= config.dependence_threshold {
                    report.persistent_misses.push(triples[i].describe(dag));
                }
            }
        } else {
            report.persistent_misses = report.misses.clone();
        }
    }
    Ok(report)
}
