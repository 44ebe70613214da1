//! Deterministic discrete-event simulation of a multi-hop sensor network
//! with joule-level energy accounting.

mod energy;
mod expect;
mod mote;
mod record;
mod sim;
mod topology;

pub use energy::{EnergyLedger, EnergyRates, NodeCounters, NodeEnergy};
pub use expect::{expected_energy, expected_round_energy};
pub use mote::{reading_tenths, InstalledQuery, Mote, DEFAULT_RAM_BUDGET_BYTES};
pub use record::{parse_records, tokenize};
pub use sim::{run, run_merged_state, DecisionRecord, Mode, Packet, SimConfig, SimReport};
pub use topology::Topology;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("topology must contain at least the base station")]
    EmptyTopology,
    #[error("branching factor must be at least 1")]
    InvalidBranching,
    #[error("scenario contains no queries")]
    NoQueries,
    #[error("query id {0} appears more than once")]
    DuplicateQueryId(u64),
    #[error("all queries in a scenario must share one attribute")]
    MixedAttributes,
    #[error("reading support must have hi > lo")]
    InvalidSupport,
    #[error("record stream is malformed")]
    MalformedRecord,
    #[error("node {node} needs {needed} B for dictionary and codebook but has {budget} B")]
    RamBudgetExceeded {
        node: u32,
        needed: usize,
        budget: usize,
    },
    #[error(transparent)]
    Codec(#[from] crate::codec::CodecError),
    #[error(transparent)]
    Merge(#[from] crate::qmerge::MergeError),
    #[error(transparent)]
    StaticVar(#[from] crate::static_vars::StaticVarError),
}
