//! Entropy-space models of network coding problems.

pub mod apps;
pub mod entropy;
pub mod problem;
pub mod region;

pub use apps::{guessing_number_ub, secret_sharing_info_ratio_lb, sum_rate_upper_bound, AccessStructure, Digraph, LpBound};
pub use entropy::{parse_entropy_inequality, shannon_outer_bound, EntropyIndex, VarSet};
pub use problem::{pair_equalities, Edge, Layout, NetworkProblem, Sink};
pub use region::{certify_region, format_relation, rate_region, RateRegion, RegionOptions};
