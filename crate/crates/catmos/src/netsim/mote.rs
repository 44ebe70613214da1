//! Motes and their sensing process.
//!
//! Reading values are keyed by (seed, node, t), not by draw order, so any
//! run that samples the same node at the same instant sees the same value
//! regardless of which queries are installed or how packets flow.

use crate::query_model::RangeQuery;
use crate::static_vars::StaticVarDictionary;

use super::SimError;

pub const DEFAULT_RAM_BUDGET_BYTES: usize = 1024 * 1024;

/// Huffman code-length table footprint, counted against mote RAM.
const CODEBOOK_BYTES: usize = 256;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Uniform draw from the inclusive tenth-degree grid [lo, hi], determined
/// entirely by (seed, node, t).
pub fn reading_tenths(seed: u64, node: u32, t: u64, lo_tenths: i64, hi_tenths: i64) -> i64 {
    debug_assert!(hi_tenths >= lo_tenths);
    let span = (hi_tenths - lo_tenths + 1) as u64;
    let mixed = splitmix64(splitmix64(seed ^ 0x6d6f7465).wrapping_add(node as u64) ^ splitmix64(t));
    lo_tenths + (mixed % span) as i64
}

/// A query as installed on a mote.
#[derive(Debug, Clone, PartialEq)]
pub struct InstalledQuery {
    pub query: RangeQuery,
    pub installed_at: u64,
}

impl InstalledQuery {
    /// Due when `t` lands on a sampling instant within the lifetime.
    pub fn due_at(&self, t: u64) -> bool {
        if t < self.installed_at {
            return false;
        }
        let dt = t - self.installed_at;
        dt.is_multiple_of(self.query.epoch_s as u64)
            && (dt / self.query.epoch_s as u64) < self.query.lifetime_epochs as u64
    }

    /// All sampling instants over the lifetime.
    pub fn instants(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.query.lifetime_epochs as u64)
            .map(move |k| self.installed_at + k * self.query.epoch_s as u64)
    }
}

/// A sensor node: parent link, installed queries, optional substitution
/// dictionary, and an informational RAM budget the installed state must
/// fit into.
#[derive(Debug, Clone)]
pub struct Mote {
    pub id: u32,
    pub parent: u32,
    pub installed: Vec<InstalledQuery>,
    pub dictionary: Option<StaticVarDictionary>,
    pub ram_budget_bytes: usize,
}

impl Mote {
    pub fn new(id: u32, parent: u32, ram_budget_bytes: usize) -> Self {
        Mote {
            id,
            parent,
            installed: Vec::new(),
            dictionary: None,
            ram_budget_bytes,
        }
    }

    pub fn install_dictionary(&mut self, dict: StaticVarDictionary) -> Result<(), SimError> {
        let needed = dict.serialized_bytes() + CODEBOOK_BYTES;
        if needed > self.ram_budget_bytes {
            return Err(SimError::RamBudgetExceeded {
                node: self.id,
                needed,
                budget: self.ram_budget_bytes,
            });
        }
        self.dictionary = Some(dict);
        Ok(())
    }

    pub fn install_query(&mut self, query: RangeQuery, t: u64) {
        self.installed.retain(|iq| iq.query.id != query.id);
        self.installed.push(InstalledQuery {
            query,
            installed_at: t,
        });
    }

    pub fn withdraw_query(&mut self, id: u64) {
        self.installed.retain(|iq| iq.query.id != id);
    }

    pub fn sense(&self, seed: u64, t: u64, lo_tenths: i64, hi_tenths: i64) -> i64 {
        reading_tenths(seed, self.id, t, lo_tenths, hi_tenths)
    }
}
