//! Timing harness behind `dsep bench` and the linearity checks.

use std::fmt;
use std::time::{Duration, Instant};

use crate::dag::{Dag, NodeId, NodeSet};
use crate::error::Result;
use crate::generate::Family;
use crate::moral::moral_check;
use crate::separation::{sweep, Engine, IndependenceStatement, SeparationQuery};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub family: &'static str,
    pub nodes: usize,
    pub edges: usize,
    pub algorithm: &'static str,
    pub time: Duration,
    pub result_size: usize,
    /// Links traversed by the sweep; `None` for the moral baseline.
    pub ops: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl fmt::Display for BenchReport {
    /// Tab-separated rows. `ratio` is the time over the same algorithm's time
    /// on the previous, smaller instance of the family.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "family\tnodes\tedges\talgorithm\ttime_us\tratio\tresult\tops")?;
        for (i, r) in self.rows.iter().enumerate() {
            let ops = r.ops.map_or_else(|| "-".to_string(), |o| o.to_string());
            let previous = self.rows[..i]
                .iter()
                .rev()
                .find(|p| p.family == r.family && p.algorithm == r.algorithm && p.edges < r.edges);
            let ratio = previous.map_or_else(
                || "-".to_string(),
                |p| format!("{:.2}", r.time.as_secs_f64() / p.time.as_secs_f64().max(1e-12)),
            );
            writeln!(
                f,
                "{}\t{}\t{}\t{}\t{:.1}\t{}\t{}\t{}",
                r.family,
                r.nodes,
                r.edges,
                r.algorithm,
                r.time.as_secs_f64() * 1e6,
                ratio,
                r.result_size,
                ops
            )?;
        }
        Ok(())
    }
}

/// One benchmark instance: the graph, a separation query and the statement
/// asking about one far node.
///
/// * chain: from the head, nothing observed, about the tail.
/// * star: from the first leaf, nothing observed, about the last leaf.
/// * random: from the first node with a child, every sink observed, about the
///   last non-sink. Observing the sinks opens every collider, so the sweep
///   covers the whole component instead of a handful of descendants.
pub struct Instance {
    pub family: Family,
    pub dag: Dag,
    pub query: SeparationQuery,
    pub statement: IndependenceStatement,
}

impl Instance {
    pub fn new(family: Family, edges: usize, seed: u64) -> Result<Instance> {
        let dag = family.instance(edges, seed);
        let order = dag.topological_order();
        let (first, l, last) = match family {
            Family::Chain => (order[0], NodeSet::empty(), order[order.len() - 1]),
            Family::Star => (NodeId::new(1), NodeSet::empty(), NodeId::new(dag.node_count() - 1)),
            Family::Random => {
                let sinks = NodeSet::new(dag.nodes().filter(|&v| dag.out_list(v).is_empty()));
                let inner: Vec<NodeId> = order.iter().copied().filter(|&v| !sinks.contains(v)).collect();
                (inner[0], sinks, inner[inner.len() - 1])
            }
        };
        let query = SeparationQuery::new(&dag, NodeSet::singleton(first), l.clone())?;
        let statement = IndependenceStatement::new(&dag, NodeSet::singleton(first), l, NodeSet::singleton(last))?;
        Ok(Instance {
            family,
            dag,
            query,
            statement,
        })
    }
}

fn best_of<T>(repeats: usize, mut f: impl FnMut() -> Result<T>) -> Result<(Duration, T)> {
    let mut best = Duration::MAX;
    let mut last = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let value = f()?;
        best = best.min(start.elapsed());
        last = Some(value);
    }
    Ok((best, last.expect("at least one run")))
}

/// Times the fast sweep, the link-labeling sweep and the moral-graph statement
/// check on one instance, keeping the best of `repeats` runs each.
pub fn bench_instance(instance: &Instance, repeats: usize) -> Result<Vec<BenchRow>> {
    let dag = &instance.dag;
    let row = |algorithm, time, result_size, ops| BenchRow {
        family: instance.family.name(),
        nodes: dag.node_count(),
        edges: dag.edge_count(),
        algorithm,
        time,
        result_size,
        ops,
    };
    let mut rows = Vec::with_capacity(3);
    for (name, engine) in [("dsep_set_fast", Engine::Fast), ("dsep_set", Engine::Faithful)] {
        let (time, s) = best_of(repeats, || sweep(dag, &instance.query, engine, |_| false))?;
        rows.push(row(
            name,
            time,
            s.separated(&instance.query).len(),
            Some(s.stats.links_labeled),
        ));
    }
    let (time, holds) = best_of(repeats, || moral_check(dag, &instance.statement))?;
    rows.push(row("moral_check", time, holds as usize, None));
    Ok(rows)
}

/// Instances run one after another so timings do not compete for cores.
pub fn run_bench(family: Family, sizes: &[usize], seed: u64, repeats: usize) -> Result<BenchReport> {
    let mut report = BenchReport::default();
    for &size in sizes {
        let instance = Instance::new(family, size, seed)?;
        report.rows.extend(bench_instance(&instance, repeats)?);
    }
    Ok(report)
}

/// One measurement of the fast sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearityPoint {
    pub edges: usize,
    pub ops: u64,
    pub seconds: f64,
}

/// Runs the sizes round-robin `repeats` times and keeps the fastest run per
/// size, so load changes on the machine hit every size alike.
pub fn linearity_series(family: Family, sizes: &[usize], seed: u64, repeats: usize) -> Result<Vec<LinearityPoint>> {
    let instances = sizes
        .iter()
        .map(|&size| Instance::new(family, size, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut points: Vec<LinearityPoint> = instances
        .iter()
        .map(|i| LinearityPoint {
            edges: i.dag.edge_count(),
            ops: 0,
            seconds: f64::INFINITY,
        })
        .collect();
    for _ in 0..repeats.max(1) {
        for (instance, point) in instances.iter().zip(points.iter_mut()) {
            let start = Instant::now();
            let s = sweep(&instance.dag, &instance.query, Engine::Fast, |_| false)?;
            point.seconds = point.seconds.min(start.elapsed().as_secs_f64());
            point.ops = s.stats.links_labeled;
        }
    }
    Ok(points)
}

/// Spread of `ops / |E|` across the series: max over min.
pub fn ops_per_edge_spread(points: &[LinearityPoint]) -> f64 {
    let ratios: Vec<f64> = points.iter().map(|p| p.ops as f64 / p.edges as f64).collect();
    let max = ratios.iter().copied().fold(f64::MIN, f64::max);
    let min = ratios.iter().copied().fold(f64::MAX, f64::min);
    max / min
}

/// Least-squares slope of `seconds = c * |E|` and the largest factor by which a
/// point departs from it (`max(t / fit, fit / t)`).
pub fn linear_fit(points: &[LinearityPoint]) -> (f64, f64) {
    let sxy: f64 = points.iter().map(|p| p.edges as f64 * p.seconds).sum();
    let sxx: f64 = points.iter().map(|p| (p.edges as f64).powi(2)).sum();
    let slope = sxy / sxx;
    let worst = points
        .iter()
        .map(|p| {
            let fit = slope * p.edges as f64;
            (p.seconds / fit).max(fit / p.seconds)
        })
        .fold(1.0, f64::max);
    (slope, worst)
}
