//! Discrete networks, their exact joint distribution, and numeric
//! conditional-independence tests. Desk-scale only.

use rand::Rng;

use crate::dag::{Dag, NodeId, NodeSet};
use crate::error::{Error, Result};
use crate::generate;

/// Largest joint table the oracle will materialize.
pub const MAX_JOINT_ENTRIES: usize = 1 << 20;

const CPT_SUM_TOLERANCE: f64 = 1e-12;

/// A DAG with one conditional table per node.
///
/// The table of node `i` is laid out as `cpt[config * arity[i] + value]`, where
/// `config` is the mixed-radix index of the parent values, first parent (in
/// in-list order) least significant.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteNetwork {
    dag: Dag,
    arity: Vec<usize>,
    parents: Vec<Vec<NodeId>>,
    cpts: Vec<Vec<f64>>,
}

fn joint_size(arity: &[usize]) -> Result<usize> {
    let mut size: usize = 1;
    for &a in arity {
        size = size
            .checked_mul(a)
            .filter(|&s| s <= MAX_JOINT_ENTRIES)
            .ok_or(Error::OracleScaleExceeded {
                what: "joint table",
                actual: usize::MAX,
                limit: MAX_JOINT_ENTRIES,
            })?;
    }
    Ok(size)
}

fn invalid(reason: String) -> Error {
    Error::InvalidNetwork { reason }
}

impl DiscreteNetwork {
    pub fn new(dag: Dag, arity: Vec<usize>, cpts: Vec<Vec<f64>>) -> Result<Self> {
        let n = dag.node_count();
        if arity.len() != n || cpts.len() != n {
            return Err(invalid(format!(
                "{n} nodes but {} arities and {} tables",
                arity.len(),
                cpts.len()
            )));
        }
        if let Some(v) = arity.iter().position(|&a| a == 0) {
            return Err(invalid(format!(
                "node {} has an empty domain",
                dag.name(NodeId::new(v))
            )));
        }
        joint_size(&arity)?;
        let parents: Vec<Vec<NodeId>> = dag.nodes().map(|v| dag.parents(v).collect()).collect();
        for v in dag.nodes() {
            let i = v.index();
            let configs: usize = parents[i].iter().map(|p| arity[p.index()]).product();
            let table = &cpts[i];
            if table.len() != configs * arity[i] {
                return Err(invalid(format!(
                    "table of {} has {} entries, expected {}",
                    dag.name(v),
                    table.len(),
                    configs * arity[i]
                )));
            }
            if table.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(invalid(format!("table of {} has an entry outside [0, 1]", dag.name(v))));
            }
            for column in table.chunks(arity[i]) {
                let sum: f64 = column.iter().sum();
                if (sum - 1.0).abs() > CPT_SUM_TOLERANCE {
                    return Err(invalid(format!("a column of {} sums to {sum}", dag.name(v))));
                }
            }
        }
        Ok(DiscreteNetwork {
            dag,
            arity,
            parents,
            cpts,
        })
    }

    /// Strictly positive tables drawn from a seeded generator.
    pub fn random(dag: &Dag, arity: usize, seed: u64) -> Result<Self> {
        if arity < 2 {
            return Err(invalid(format!("arity must be at least 2, got {arity}")));
        }
        let arities = vec![arity; dag.node_count()];
        joint_size(&arities)?;
        let mut rng = generate::rng(seed);
        let cpts = dag
            .nodes()
            .map(|v| {
                let configs = arity.pow(dag.in_list(v).len() as u32);
                let mut table: Vec<f64> = (0..configs * arity).map(|_| rng.gen_range(0.01..1.0)).collect();
                for column in table.chunks_mut(arity) {
                    let sum: f64 = column.iter().sum();
                    column.iter_mut().for_each(|p| *p /= sum);
                }
                table
            })
            .collect();
        DiscreteNetwork::new(dag.clone(), arities, cpts)
    }

    /// Every table uniform.
    pub fn uniform(dag: &Dag, arity: usize) -> Result<Self> {
        let arities = vec![arity; dag.node_count()];
        let cpts = dag
            .nodes()
            .map(|v| vec![1.0 / arity as f64; arity.pow(dag.in_list(v).len() as u32 + 1)])
            .collect();
        DiscreteNetwork::new(dag.clone(), arities, cpts)
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn arity(&self) -> &[usize] {
        &self.arity
    }

    pub fn cpt(&self, v: NodeId) -> &[f64] {
        &self.cpts[v.index()]
    }

    /// `P(x_v = value | parents = parent_values)`, parents in in-list order.
    pub fn conditional(&self, v: NodeId, parent_values: &[usize], value: usize) -> f64 {
        let i = v.index();
        let mut config = 0;
        let mut radix = 1;
        for (p, &x) in self.parents[i].iter().zip(parent_values) {
            config += x * radix;
            radix *= self.arity[p.index()];
        }
        self.cpts[i][config * self.arity[i] + value]
    }

    /// The joint distribution as the product of all conditional tables.
    pub fn joint(&self) -> Result<JointTable> {
        let size = joint_size(&self.arity)?;
        let n = self.dag.node_count();
        let mut probs = Vec::with_capacity(size);
        let mut assignment = vec![0usize; n];
        for _ in 0..size {
            let mut p = 1.0;
            for i in 0..n {
                let mut config = 0;
                let mut radix = 1;
                for parent in &self.parents[i] {
                    config += assignment[parent.index()] * radix;
                    radix *= self.arity[parent.index()];
                }
                p *= self.cpts[i][config * self.arity[i] + assignment[i]];
            }
            probs.push(p);
            advance(&mut assignment, &self.arity);
        }
        Ok(JointTable {
            arity: self.arity.clone(),
            probs,
        })
    }
}

/// Odometer increment, first digit fastest.
fn advance(assignment: &mut [usize], arity: &[usize]) {
    for (digit, &base) in assignment.iter_mut().zip(arity) {
        *digit += 1;
        if *digit < base {
            return;
        }
        *digit = 0;
    }
}

/// Probability of every full assignment; node 0 varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTable {
    arity: Vec<usize>,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn from_parts(arity: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let size = joint_size(&arity)?;
        if probs.len() != size {
            return Err(invalid(format!("{} entries for a domain of {size}", probs.len())));
        }
        Ok(JointTable { arity, probs })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn arity(&self) -> &[usize] {
        &self.arity
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn probability(&self, assignment: &[usize]) -> f64 {
        let mut index = 0;
        let mut radix = 1;
        for (&x, &a) in assignment.iter().zip(&self.arity) {
            index += x * radix;
            radix *= a;
        }
        self.probs[index]
    }

    /// Joint marginal over `vars`, indexed mixed-radix in the order given.
    fn marginal(&self, vars: &[NodeId]) -> Vec<f64> {
        let size: usize = vars.iter().map(|v| self.arity[v.index()]).product();
        let mut out = vec![0.0; size];
        let mut assignment = vec![0usize; self.arity.len()];
        for &p in &self.probs {
            let mut index = 0;
            let mut radix = 1;
            for v in vars {
                index += assignment[v.index()] * radix;
                radix *= self.arity[v.index()];
            }
            out[index] += p;
            advance(&mut assignment, &self.arity);
        }
        out
    }
}

/// Largest `|P(x_J, x_K | x_L) - P(x_J | x_L) P(x_K | x_L)|` over all values
/// with `P(x_L) > 0`.
///
/// # Panics
///
/// If the three sets are not pairwise disjoint.
pub fn ci_gap(table: &JointTable, j: &NodeSet, k: &NodeSet, l: &NodeSet) -> f64 {
    assert!(
        j.is_disjoint(k) && j.is_disjoint(l) && k.is_disjoint(l),
        "J, K and L must be pairwise disjoint"
    );
    let vars: Vec<NodeId> = j.iter().chain(k.iter()).chain(l.iter()).collect();
    let size = |s: &NodeSet| -> usize { s.iter().map(|v| table.arity[v.index()]).product() };
    let (sj, sk, sl) = (size(j), size(k), size(l));
    // Index layout: xj + sj * (xk + sk * xl).
    let full = table.marginal(&vars);
    let mut worst: f64 = 0.0;
    for xl in 0..sl {
        let block = &full[xl * sj * sk..(xl + 1) * sj * sk];
        let pl: f64 = block.iter().sum();
        if pl <= 0.0 {
            continue;
        }
        let pj: Vec<f64> = (0..sj).map(|xj| (0..sk).map(|xk| block[xj + sj * xk]).sum()).collect();
        let pk: Vec<f64> = (0..sk).map(|xk| (0..sj).map(|xj| block[xj + sj * xk]).sum()).collect();
        for xk in 0..sk {
            for xj in 0..sj {
                let gap = (block[xj + sj * xk] / pl - (pj[xj] / pl) * (pk[xk] / pl)).abs();
                worst = worst.max(gap);
            }
        }
    }
    worst
}

/// `I(X_J, X_K | X_L)` up to `tol`.
pub fn ci_holds(table: &JointTable, j: &NodeSet, k: &NodeSet, l: &NodeSet, tol: f64) -> bool {
    ci_gap(table, j, k, l) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn names(dag: &Dag, list: &[&str]) -> NodeSet {
        dag.resolve_set(list).unwrap()
    }

    #[test]
    fn single_prior() {
        let dag = Dag::build(&["a"], &[] as &[(&str, &str)]).unwrap();
        let net = DiscreteNetwork::new(dag, vec![2], vec![vec![0.3, 0.7]]).unwrap();
        assert_eq!(net.joint().unwrap().probabilities(), &[0.3, 0.7]);
    }

    #[test]
    fn independent_uniforms() {
        let dag = Dag::from_indices(2, []).unwrap();
        let joint = DiscreteNetwork::uniform(&dag, 2).unwrap().joint().unwrap();
        assert_eq!(joint.probabilities(), &[0.25; 4]);
        assert!(ci_holds(
            &joint,
            &NodeSet::from_indices([0]),
            &NodeSet::from_indices([1]),
            &NodeSet::empty(),
            0.0
        ));
    }

    #[test]
    fn v_structure_uniform_joint() {
        let joint = DiscreteNetwork::uniform(&fixtures::v_structure(), 2)
            .unwrap()
            .joint()
            .unwrap();
        assert_eq!(joint.probabilities().len(), 16);
        assert!(joint.probabilities().iter().all(|&p| (p - 1.0 / 16.0).abs() < 1e-15));
    }

    #[test]
    fn random_networks_are_deterministic_and_positive() {
        let dag = fixtures::v_structure();
        let a = DiscreteNetwork::random(&dag, 2, 7).unwrap();
        let b = DiscreteNetwork::random(&dag, 2, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, DiscreteNetwork::random(&dag, 2, 8).unwrap());
        let joint = a.joint().unwrap();
        assert_eq!(joint.probabilities().len(), 16);
        assert!(joint.probabilities().iter().all(|&p| p > 0.0));
        assert!((joint.total_mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn random_network_rejects_degenerate_and_oversized_domains() {
        assert!(matches!(
            DiscreteNetwork::random(&fixtures::v_structure(), 1, 0),
            Err(Error::InvalidNetwork { .. })
        ));
        assert!(matches!(
            DiscreteNetwork::random(&crate::generate::chain(21), 2, 0),
            Err(Error::OracleScaleExceeded { .. })
        ));
    }

    #[test]
    fn invalid_tables_are_rejected() {
        let dag = Dag::build(&["a", "b"], &[("a", "b")]).unwrap();
        let bad_sum = DiscreteNetwork::new(
            dag.clone(),
            vec![2, 2],
            vec![vec![0.5, 0.5], vec![0.5, 0.5, 0.6, 0.4 + 1e-6]],
        );
        assert!(matches!(bad_sum, Err(Error::InvalidNetwork { .. })));
        let bad_shape = DiscreteNetwork::new(dag.clone(), vec![2, 2], vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!(matches!(bad_shape, Err(Error::InvalidNetwork { .. })));
        let negative = DiscreteNetwork::new(dag, vec![2, 2], vec![vec![1.5, -0.5], vec![0.5; 4]]);
        assert!(matches!(negative, Err(Error::InvalidNetwork { .. })));
    }

    #[test]
    fn v_structure_random_network_respects_marginal_independence() {
        let dag = fixtures::v_structure();
        let joint = DiscreteNetwork::random(&dag, 2, 7).unwrap().joint().unwrap();
        assert!(ci_holds(
            &joint,
            &names(&dag, &["2"]),
            &names(&dag, &["3"]),
            &NodeSet::empty(),
            1e-9
        ));
    }

    /// 1 -> 4 <- 2 with 4 a noisy XOR of its parents: observing 4 couples 1 and 2.
    fn noisy_xor() -> (Dag, JointTable) {
        let dag = Dag::build(&["1", "2", "4"], &[("1", "4"), ("2", "4")]).unwrap();
        let eps = 0.05;
        // configs (x1, x2) = (0,0), (1,0), (0,1), (1,1); value order (0, 1).
        let xor = vec![1.0 - eps, eps, eps, 1.0 - eps, eps, 1.0 - eps, 1.0 - eps, eps];
        let net = DiscreteNetwork::new(dag.clone(), vec![2, 2, 2], vec![vec![0.5, 0.5], vec![0.5, 0.5], xor]).unwrap();
        let joint = net.joint().unwrap();
        (dag, joint)
    }

    #[test]
    fn explaining_away() {
        let (dag, joint) = noisy_xor();
        let (a, b, c) = (names(&dag, &["1"]), names(&dag, &["2"]), names(&dag, &["4"]));
        assert!(!ci_holds(&joint, &a, &b, &c, 1e-6));
        // Marginally the parents stay independent.
        assert!(ci_holds(&joint, &a, &b, &NodeSet::empty(), 1e-12));
        // Hand value: P(1=0, 2=0 | 4=0) = 0.95 * 0.25 / 0.5 = 0.475 against 0.25.
        assert!((ci_gap(&joint, &a, &b, &c) - 0.225).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_conditions_are_skipped() {
        // a is always 0; conditioning on a = 1 must not divide by zero.
        let dag = Dag::build(&["a", "b", "c"], &[("a", "b"), ("a", "c")]).unwrap();
        let net = DiscreteNetwork::new(
            dag.clone(),
            vec![2, 2, 2],
            vec![vec![1.0, 0.0], vec![0.2, 0.8, 0.6, 0.4], vec![0.7, 0.3, 0.1, 0.9]],
        )
        .unwrap();
        let joint = net.joint().unwrap();
        assert!(ci_holds(
            &joint,
            &names(&dag, &["b"]),
            &names(&dag, &["c"]),
            &names(&dag, &["a"]),
            1e-12
        ));
        // Since a is deterministic, b and c are marginally independent as well.
        assert!(ci_holds(
            &joint,
            &names(&dag, &["b"]),
            &names(&dag, &["c"]),
            &NodeSet::empty(),
            1e-12
        ));
    }

    #[test]
    fn conditional_lookup_matches_layout() {
        let (dag, _) = noisy_xor();
        let net = DiscreteNetwork::uniform(&dag, 2).unwrap();
        assert_eq!(net.conditional(NodeId::new(2), &[1, 0], 1), 0.5);
        assert_eq!(net.cpt(NodeId::new(2)).len(), 8);
    }

    proptest! {
        #[test]
        fn joint_mass_is_one(dag in crate::testing::arb_dag(8), arity in 2usize..4, seed in any::<u64>()) {
            prop_assume!(arity.pow(dag.node_count() as u32) <= MAX_JOINT_ENTRIES);
            let joint = DiscreteNetwork::random(&dag, arity, seed).unwrap().joint().unwrap();
            prop_assert!((joint.total_mass() - 1.0).abs() < 1e-9);
            prop_assert!(joint.probabilities().iter().all(|&p| p > 0.0));
        }
    }
}
