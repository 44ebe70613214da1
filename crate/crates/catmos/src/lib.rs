//! Energy-aware wireless sensor network toolkit.
//!
//! The pipeline has two halves. Inside the network, sensed readings are
//! tokenized into delimited text records, compressed hop by hop and
//! aggregated on the way to the base station. At the base station, incoming
//! range queries are answered from already-running queries where possible,
//! merged into synthetic queries when an energy gain is predicted, and
//! shortened with a reversible static-variable dictionary before injection.
//!
//! Modules:
//!
//! - [`query_model`]: range queries and their canonical text form
//! - [`codec`]: Huffman, LZW and a Deflate-style codec plus the
//!   compression-factor metric
//! - [`static_vars`]: reversible phrase-to-token substitution
//! - [`qmerge`]: base-station cache answering, gain-driven merging and
//!   result demultiplexing
//! - [`netsim`]: deterministic multi-hop simulator with joule accounting
//! - [`harness`]: scenarios, reference tables and experiment orchestration

pub mod codec;
pub mod harness;
pub mod netsim;
pub mod qmerge;
pub mod query_model;
pub mod static_vars;
