//! Scenario loading, reference-table reproduction and experiment
//! orchestration.

mod corpus;
mod experiment;
mod scenario;
pub mod tables;

pub use corpus::generate_queries;
pub use experiment::{
    decisions_csv, query_sizes_csv, run_experiment, static_var_csv, Experiment,
    REFERENCE_REDUCTION_PCT,
};
pub use scenario::{Scenario, ScenarioError};
pub use tables::{reproduce_tables, table1_queries, Tables};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Sim(#[from] crate::netsim::SimError),
    #[error(transparent)]
    Codec(#[from] crate::codec::CodecError),
    #[error(transparent)]
    StaticVar(#[from] crate::static_vars::StaticVarError),
}
