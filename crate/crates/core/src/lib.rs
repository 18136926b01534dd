//! Conditional-independence queries on DAGs by d-separation.
//!
//! * [`separation`] finds every node d-separated from `J` given `L` in linear
//!   time and checks single statements `I(J, L, K)`.
//! * [`requisite`] tells apart the variables and the stored tables a query
//!   `P(x_J | x_L)` depends on.
//! * [`moral`] is the moral-graph baseline; [`oracle`] holds trail enumeration
//!   and exact discrete distributions used to cross-check everything.
//!
//! ```
//! use dsep::{fixtures, separation::{dsep_set, SeparationQuery}};
//!
//! let dag = fixtures::fork_collider();
//! let q = SeparationQuery::from_names(&dag, &["n4"], &["n2"]).unwrap();
//! assert_eq!(dag.format_set(&dsep_set(&dag, &q).unwrap()), "n3");
//! ```

pub mod bench;
pub mod cli;
pub mod dag;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod io;
pub mod moral;
pub mod oracle;
pub mod par;
pub mod reachability;
pub mod requisite;
pub mod separation;
pub mod verify;

#[cfg(test)]
mod testing;

pub use dag::{ancestral_set, descendant_table, doubled_graph, Dag, DescendantTable, DoubledGraph, NodeId, NodeSet};
pub use error::{Error, Result};
pub use moral::{moral_check, moralize, MarriageRule, MoralGraph};
pub use requisite::{augment_dummies, relevant_variables, requisite_parameters, AugmentedDag};
pub use separation::{
    dsep_set, dsep_set_fast, is_active_trail, is_dseparated, Engine, IndependenceStatement, SeparationQuery, Trail,
};
