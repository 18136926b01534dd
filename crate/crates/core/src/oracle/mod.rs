//! Ground truth at desk scale: trail enumeration from the definition and
//! exact discrete distributions.

pub mod network;
pub mod numeric;
pub mod trails;

pub use network::{ci_gap, ci_holds, DiscreteNetwork, JointTable, MAX_JOINT_ENTRIES};
pub use numeric::{check_numeric, check_numeric_with, NumericConfig, NumericReport, Triple};
pub use trails::{active_walk_exists, dsep_bruteforce, enumerate_simple_trails, MAX_TRAIL_NODES};
