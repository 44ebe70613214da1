//! Scenario files: flat `key = value` lines plus repeated `query = ...`
//! lines.
//!
//! ```text
//! # 20-node binary tree, defaults otherwise
//! nodes = 20
//! branching = 2
//! query = temp,10,50,5,100
//! query = temp,15,30,10
//! ```
//!
//! A query line is `attr,min,max,epoch[,lifetime]`; the lifetime defaults
//! to 100 sampling rounds. Lines starting with `#` are comments. Unknown
//! keys are rejected.

use std::path::Path;

use thiserror::Error;

use crate::codec::{CodecConfig, CodecId, SizeMode};
use crate::netsim::{
    EnergyRates, SimConfig, SimError, Topology, DEFAULT_RAM_BUDGET_BYTES,
};
use crate::query_model::{Attribute, QueryError, RangeQuery, DEFAULT_LIFETIME_EPOCHS};

use super::tables;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: {message}")]
    InvalidValue { line: usize, message: String },
    #[error("line {line}: invalid query: {source}")]
    InvalidQuery {
        line: usize,
        #[source]
        source: QueryError,
    },
    #[error("scenario declares no queries")]
    MissingQueries,
    #[error("reading bounds must be multiples of 0.1")]
    UnalignedReadingBounds,
    #[error("reading support must have hi > lo")]
    InvalidReadingSupport,
    #[error("cannot read scenario file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub nodes: usize,
    pub branching: usize,
    pub seed: u64,
    pub e_tx: f64,
    pub e_compress: f64,
    pub e_rx: f64,
    pub e_sense: f64,
    pub reading_bits: u32,
    pub header_bits: u32,
    pub readings_per_packet: f64,
    pub reading_lo: f64,
    pub reading_hi: f64,
    pub codec: CodecId,
    pub size_mode: SizeMode,
    pub deflate_envelope_bytes: usize,
    pub static_max_entries: usize,
    pub ram_budget_bytes: usize,
    pub queries: Vec<RangeQuery>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            nodes: 20,
            branching: 2,
            seed: 1,
            e_tx: 0.4e-6,
            e_compress: 0.86e-9,
            e_rx: 0.0,
            e_sense: 0.0,
            reading_bits: 16,
            header_bits: 96,
            readings_per_packet: 1.0,
            reading_lo: 0.0,
            reading_hi: 60.0,
            codec: CodecId::Huffman,
            size_mode: SizeMode::PayloadOnly,
            deflate_envelope_bytes: 64,
            static_max_entries: 16,
            ram_budget_bytes: DEFAULT_RAM_BUDGET_BYTES,
            queries: Vec::new(),
        }
    }
}

impl Scenario {
    /// The reference workload on the default 20-node binary tree.
    pub fn table1_default() -> Scenario {
        Scenario {
            queries: tables::table1_queries(),
            ..Scenario::default()
        }
    }

    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        Scenario::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        let mut scenario = Scenario::default();
        let mut next_query_id = 1u64;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| {
                ScenarioError::InvalidValue {
                    line,
                    message: "expected `key = value`".into(),
                }
            })?;
            let key = key.trim();
            let value = value.trim();
            let invalid = |message: String| ScenarioError::InvalidValue { line, message };
            match key {
                "nodes" => scenario.nodes = parse_num(value, line)?,
                "branching" => scenario.branching = parse_num(value, line)?,
                "seed" => scenario.seed = parse_num(value, line)?,
                "e_tx" => scenario.e_tx = parse_num(value, line)?,
                "e_compress" => scenario.e_compress = parse_num(value, line)?,
                "e_rx" => scenario.e_rx = parse_num(value, line)?,
                "e_sense" => scenario.e_sense = parse_num(value, line)?,
                "reading_bits" => scenario.reading_bits = parse_num(value, line)?,
                "header_bits" => scenario.header_bits = parse_num(value, line)?,
                "readings_per_packet" => {
                    scenario.readings_per_packet = parse_num(value, line)?
                }
                "reading_lo" => scenario.reading_lo = parse_num(value, line)?,
                "reading_hi" => scenario.reading_hi = parse_num(value, line)?,
                "codec" => {
                    scenario.codec = CodecId::from_name(value)
                        .map_err(|e| invalid(e.to_string()))?
                }
                "size_mode" => {
                    scenario.size_mode = SizeMode::from_name(value)
                        .map_err(|e| invalid(e.to_string()))?
                }
                "deflate_envelope_bytes" => {
                    scenario.deflate_envelope_bytes = parse_num(value, line)?
                }
                "static_max_entries" => {
                    scenario.static_max_entries = parse_num(value, line)?
                }
                "ram_budget_bytes" => scenario.ram_budget_bytes = parse_num(value, line)?,
                "query" => {
                    let q = parse_query(value, next_query_id, line)?;
                    next_query_id += 1;
                    scenario.queries.push(q);
                }
                other => {
                    return Err(ScenarioError::UnknownKey {
                        line,
                        key: other.to_string(),
                    })
                }
            }
        }
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.queries.is_empty() {
            return Err(ScenarioError::MissingQueries);
        }
        to_tenths(self.reading_lo).ok_or(ScenarioError::UnalignedReadingBounds)?;
        to_tenths(self.reading_hi).ok_or(ScenarioError::UnalignedReadingBounds)?;
        if self.reading_hi <= self.reading_lo {
            return Err(ScenarioError::InvalidReadingSupport);
        }
        Ok(())
    }

    pub fn topology(&self) -> Result<Topology, SimError> {
        Topology::balanced_tree(self.nodes, self.branching, self.seed)
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            seed: self.seed,
            codec: self.codec,
            codec_cfg: CodecConfig {
                mode: self.size_mode,
                deflate_envelope_bytes: self.deflate_envelope_bytes,
            },
            rates: EnergyRates {
                e_tx: self.e_tx,
                e_compress: self.e_compress,
                e_rx: self.e_rx,
                e_sense: self.e_sense,
            },
            header_bits: self.header_bits,
            reading_lo_tenths: to_tenths(self.reading_lo).expect("validated"),
            reading_hi_tenths: to_tenths(self.reading_hi).expect("validated"),
            static_max_entries: self.static_max_entries,
            reading_bits: self.reading_bits,
            readings_per_packet: self.readings_per_packet,
            ram_budget_bytes: self.ram_budget_bytes,
        }
    }
}

fn to_tenths(value: f64) -> Option<i64> {
    let scaled = value * 10.0;
    let rounded = scaled.round();
    if (scaled - rounded).abs() < 1e-9 {
        Some(rounded as i64)
    } else {
        None
    }
}

fn parse_num<T: std::str::FromStr>(value: &str, line: usize) -> Result<T, ScenarioError> {
    value.parse().map_err(|_| ScenarioError::InvalidValue {
        line,
        message: format!("cannot parse `{value}`"),
    })
}

fn parse_query(value: &str, id: u64, line: usize) -> Result<RangeQuery, ScenarioError> {
    let fields: Vec<&str> = value.split(',').map(str::trim).collect();
    if fields.len() != 4 && fields.len() != 5 {
        return Err(ScenarioError::InvalidValue {
            line,
            message: "query needs attr,min,max,epoch[,lifetime]".into(),
        });
    }
    let attribute = Attribute::from_keyword(fields[0]).ok_or_else(|| {
        ScenarioError::InvalidValue {
            line,
            message: format!("unknown attribute `{}`", fields[0]),
        }
    })?;
    let min: f64 = parse_num(fields[1], line)?;
    let max: f64 = parse_num(fields[2], line)?;
    let epoch: u32 = parse_num(fields[3], line)?;
    let lifetime: u32 = if fields.len() == 5 {
        parse_num(fields[4], line)?
    } else {
        DEFAULT_LIFETIME_EPOCHS
    };
    RangeQuery::new(id, attribute, min, max, epoch, lifetime)
        .map_err(|source| ScenarioError::InvalidQuery { line, source })
}
