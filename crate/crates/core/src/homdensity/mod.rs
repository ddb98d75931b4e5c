//! Configuration probabilities of the branching process and their
//! expansion in tree homomorphism densities.

mod config;
mod series;
mod tree;

pub use config::{config_prob, config_prob_profile, OffspringConfig};
pub use series::{
    eval_series, tree_series, SeriesValue, TreeSeries, MAX_SERIES_COUNT, MAX_SERIES_DEPTH,
    MAX_SERIES_TERMS,
};
pub use tree::{enumerate_rooted_trees, tree_density, tree_density_profile, RootedTree};
