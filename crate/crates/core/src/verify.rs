//! Cross-checks every separation routine against the others.
//!
//! For each graph, every singleton `J` is paired with conditioning sets drawn
//! from the remaining nodes. Per query the link-labeling engine, the fast
//! engine and trail enumeration must return the same separated set. Per derived
//! statement `(J, L, {a})` the statement check (with and without early stop)
//! and the moral-graph baseline (both marriage rules) must agree with it.

use std::fmt;

use rand::Rng;

use crate::dag::{Dag, NodeId, NodeSet};
use crate::error::{Error, Result};
use crate::generate::{derive_seed, rng};
use crate::moral::{moral_check_with, MarriageRule};
use crate::oracle::dsep_bruteforce;
use crate::par::{map_indexed, Execution};
use crate::separation::{
    dsep_set, dsep_set_fast, is_dseparated_with, Engine, IndependenceStatement, SeparationQuery, SweepOptions,
};

/// Witnesses kept per report.
const MAX_WITNESSES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AgreementConfig {
    /// Enumerate every conditioning set when at most this many candidate nodes
    /// remain; otherwise sample.
    pub enumerate_up_to: usize,
    pub sampled_conditioning_sets: usize,
    pub seed: u64,
}

impl Default for AgreementConfig {
    fn default() -> Self {
        AgreementConfig {
            enumerate_up_to: 10,
            sampled_conditioning_sets: 64,
            seed: crate::generate::DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AgreementReport {
    pub graphs: usize,
    pub queries: usize,
    pub statements: usize,
    /// Queries where trail enumeration was skipped for scale.
    pub oracle_skipped: usize,
    /// Faithful, fast and brute-force separated sets differ.
    pub set_mismatches: usize,
    /// Statement check disagrees with the moral-graph baseline.
    pub moral_mismatches: usize,
    /// Early stop changes a statement verdict.
    pub early_stop_mismatches: usize,
    /// Restricted and full marriage give different verdicts.
    pub marriage_mismatches: usize,
    /// Statement check disagrees with membership in the separated set.
    pub statement_mismatches: usize,
    pub witnesses: Vec<String>,
}

impl AgreementReport {
    pub fn disagreements(&self) -> usize {
        self.set_mismatches
            + self.moral_mismatches
            + self.early_stop_mismatches
            + self.marriage_mismatches
            + self.statement_mismatches
    }

    pub fn all_agree(&self) -> bool {
        self.disagreements() == 0
    }

    pub fn merge(&mut self, other: AgreementReport) {
        self.graphs += other.graphs;
        self.queries += other.queries;
        self.statements += other.statements;
        self.oracle_skipped += other.oracle_skipped;
        self.set_mismatches += other.set_mismatches;
        self.moral_mismatches += other.moral_mismatches;
        self.early_stop_mismatches += other.early_stop_mismatches;
        self.marriage_mismatches += other.marriage_mismatches;
        self.statement_mismatches += other.statement_mismatches;
        for w in other.witnesses {
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(w);
            }
        }
    }

    fn witness(&mut self, text: impl FnOnce() -> String) {
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(text());
        }
    }
}

impl fmt::Display for AgreementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "graphs: {}  queries: {}  statements: {}  oracle skipped: {}",
            self.graphs, self.queries, self.statements, self.oracle_skipped
        )?;
        writeln!(
            f,
            "mismatches: sets {}  moral {}  early-stop {}  marriage {}  statement {}",
            self.set_mismatches,
            self.moral_mismatches,
            self.early_stop_mismatches,
            self.marriage_mismatches,
            self.statement_mismatches
        )?;
        for w in &self.witnesses {
            writeln!(f, "  {w}")?;
        }
        Ok(())
    }
}

fn conditioning_sets(dag: &Dag, j: NodeId, config: &AgreementConfig, stream: u64) -> Vec<NodeSet> {
    let rest: Vec<NodeId> = dag.nodes().filter(|&v| v != j).collect();
    if rest.len() <= config.enumerate_up_to {
        (0u64..1 << rest.len())
            .map(|mask| {
                rest.iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect()
    } else {
        let mut rng = rng(derive_seed(config.seed, stream));
        (0..config.sampled_conditioning_sets)
            .map(|_| {
                // Sparse conditioning sets keep most trails open.
                let p = rng.gen_range(0.0..0.3);
                rest.iter().copied().filter(|_| rng.gen_bool(p)).collect()
            })
            .collect()
    }
}

fn render(dag: &Dag, set: &NodeSet) -> String {
    format!("{{{}}}", dag.format_set(set).replace(' ', ","))
}

/// Checks one graph.
pub fn check_graph(dag: &Dag, config: &AgreementConfig) -> Result<AgreementReport> {
    let mut report = AgreementReport {
        graphs: 1,
        ..Default::default()
    };
    for j in dag.nodes() {
        for l in conditioning_sets(dag, j, config, j.index() as u64) {
            let q = SeparationQuery::new(dag, NodeSet::singleton(j), l)?;
            report.queries += 1;
            let faithful = dsep_set(dag, &q)?;
            let fast = dsep_set_fast(dag, &q)?;
            let brute = match dsep_bruteforce(dag, &q) {
                Ok(set) => Some(set),
                Err(Error::OracleScaleExceeded { .. }) => {
                    report.oracle_skipped += 1;
                    None
                }
                Err(e) => return Err(e),
            };
            if faithful != fast || brute.as_ref().is_some_and(|b| *b != faithful) {
                report.set_mismatches += 1;
                report.witness(|| {
                    format!(
                        "J={} L={}: faithful {} fast {} brute {}",
                        dag.name(j),
                        render(dag, q.l()),
                        render(dag, &faithful),
                        render(dag, &fast),
                        brute.as_ref().map_or("-".into(), |b| render(dag, b))
                    )
                });
            }
            for alpha in dag.nodes().filter(|&v| v != j && !q.l().contains(v)) {
                let s = IndependenceStatement::new(dag, q.j().clone(), q.l().clone(), NodeSet::singleton(alpha))?;
                report.statements += 1;
                let expected = faithful.contains(alpha);
                let early = is_dseparated_with(
                    dag,
                    &s,
                    SweepOptions {
                        engine: Engine::Faithful,
                        early_stop: true,
                    },
                )?;
                let late = is_dseparated_with(
                    dag,
                    &s,
                    SweepOptions {
                        engine: Engine::Faithful,
                        early_stop: false,
                    },
                )?;
                let fast_early = is_dseparated_with(
                    dag,
                    &s,
                    SweepOptions {
                        engine: Engine::Fast,
                        early_stop: true,
                    },
                )?;
                let restricted = moral_check_with(dag, &s, MarriageRule::Restricted)?;
                let full = moral_check_with(dag, &s, MarriageRule::Full)?;
                let describe = || format!("I({}, {}, {})", dag.name(j), render(dag, q.l()), dag.name(alpha));
                if early != late || fast_early != late {
                    report.early_stop_mismatches += 1;
                    report.witness(|| format!("{}: early {early} late {late} fast-early {fast_early}", describe()));
                }
                if late != expected {
                    report.statement_mismatches += 1;
                    report.witness(|| format!("{}: statement {late} set membership {expected}", describe()));
                }
                if early != restricted {
                    report.moral_mismatches += 1;
                    report.witness(|| format!("{}: statement {early} moral {restricted}", describe()));
                }
                if restricted != full {
                    report.marriage_mismatches += 1;
                    report.witness(|| format!("{}: restricted {restricted} full {full}", describe()));
                }
            }
        }
    }
    Ok(report)
}

/// Checks every graph and merges the reports in graph order.
pub fn check_corpus(dags: &[Dag], config: &AgreementConfig, execution: Execution) -> Result<AgreementReport> {
    let reports = map_indexed(dags.len(), execution, |i| {
        check_graph(&dags[i], config).map(|mut r| {
            for w in &mut r.witnesses {
                *w = format!("graph {i}: {w}");
            }
            r
        })
    });
    let mut total = AgreementReport::default();
    for r in reports {
        total.merge(r?);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fork_collider_agrees_everywhere() {
        let report = check_graph(&fixtures::fork_collider(), &AgreementConfig::default()).unwrap();
        assert!(report.all_agree(), "{report}");
        // 7 start nodes, 2^6 conditioning sets each.
        assert_eq!(report.queries, 7 * 64);
    }

    #[test]
    fn sampled_conditioning_on_larger_graphs() {
        let dag = crate::generate::random_sparse(20, 40, 5);
        let config = AgreementConfig {
            sampled_conditioning_sets: 4,
            ..Default::default()
        };
        let report = check_graph(&dag, &config).unwrap();
        assert_eq!(report.queries, 20 * 4);
        assert_eq!(report.oracle_skipped, report.queries);
        assert!(report.all_agree(), "{report}");
    }

    #[test]
    fn corpus_reports_are_execution_independent() {
        let dags = crate::generate::small_corpus(30, 5, 17);
        let config = AgreementConfig::default();
        let seq = check_corpus(&dags, &config, Execution::Sequential).unwrap();
        let par = check_corpus(&dags, &config, Execution::Parallel).unwrap();
        assert_eq!(seq, par);
        assert!(seq.all_agree(), "{seq}");
    }
}
