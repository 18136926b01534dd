//! The two worked-example graphs shipped with the crate.
//!
//! `fork_collider`: n1 -> n4, n2 -> n3, n2 -> n4, n3 -> n5, n4 -> n5, n5 -> n6, n5 -> n7.
//! `v_structure`: 1 -> 3, 1 -> 4, 2 -> 4.

use crate::dag::Dag;
use crate::io::parse_graph;

pub const FORK_COLLIDER_TEXT: &str = include_str!("../fixtures/fork_collider.txt");
pub const V_STRUCTURE_TEXT: &str = include_str!("../fixtures/v_structure.txt");

pub fn fork_collider() -> Dag {
    parse_graph(FORK_COLLIDER_TEXT).expect("fork_collider fixture parses")
}

pub fn v_structure() -> Dag {
    parse_graph(V_STRUCTURE_TEXT).expect("v_structure fixture parses")
}
