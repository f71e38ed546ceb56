//! Hyperparameter loss landscapes as directed graphs over grid search spaces.
//!
//! * [`space`]: search-space declarations, distances and neighborhoods.
//! * [`landscape`]: ingestion of evaluated configurations and the graph model.
//! * [`fla`]: autocorrelation, assortativity, neutrality and NDC metrics.
//! * [`local`]: local search, basins, local optima networks, escape rates.
//! * [`similarity`]: Spearman, Shake-up and γ-set comparisons.
//! * [`synthetic`]: NK landscapes and grid-sampled test functions.

pub mod error;
pub mod fla;
pub mod landscape;
pub mod local;
pub mod similarity;
pub mod space;
pub mod stats;
pub mod synthetic;

pub use error::{Error, Result};
pub use fla::{fla_report, FlaReport, WalkConfig};
pub use landscape::{
    build_landscape_graph, parse_evaluations, Direction, Evaluations, Landscape, NodeId, Scenario,
    Split,
};
pub use local::{
    build_lon, escape_improve_rates, find_local_optima, local_search, mean_basin_size, BasinMap,
    EscapeConfig, EscapeStats, LocalOptimaNetwork,
};
pub use similarity::{compare_report, SimilarityReport};
pub use space::{parse_space, Configuration, GridValue, HpKind, HyperparameterDecl, SearchSpace};
pub use synthetic::{gen_grid_function, gen_nk, GridFunction, GridFunctionSpec, NkSpec};
