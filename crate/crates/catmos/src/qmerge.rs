//! Base-station multi-query optimizer: cache answering, gain-driven
//! merging into synthetic queries, lifecycle bookkeeping and result
//! demultiplexing.
//!
//! The cost model abstracts traffic as fixed-size readings and per-packet
//! headers over a known topology, with sensor values uniform over a
//! 0.1-degree grid. `gain` compares the expected energy of the active set
//! plus the new query against the set after the best merge, over the
//! merged service window, and reports the difference per second of that
//! window. A merge is admitted only when the gain is positive.

use std::collections::VecDeque;

use thiserror::Error;

use crate::query_model::{Attribute, RangeQuery};

#[derive(Debug, Error, PartialEq)]
pub enum MergeError {
    #[error("cannot merge queries over different attributes")]
    AttributeMismatch,
    #[error("cost model invalid: {0}")]
    InvalidCostModel(String),
}

/// One sensed value, quantized to tenths of a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Reading {
    pub node: u32,
    pub t: u64,
    pub value_tenths: i64,
}

impl Reading {
    pub fn value(&self) -> f64 {
        self.value_tenths as f64 / 10.0
    }

    pub fn matches(&self, q: &RangeQuery) -> bool {
        q.contains_value(self.value())
    }
}

/// Energy and traffic abstraction used for merge decisions.
#[derive(Debug, Clone)]
pub struct CostModel {
    /// J per transmitted bit.
    pub e_tx: f64,
    /// J per bit entering a compressor.
    pub e_compress: f64,
    /// Bits per abstract reading.
    pub reading_bits: u32,
    /// Bits per packet header.
    pub header_bits: u32,
    /// Header amortization divisor.
    pub readings_per_packet: f64,
    /// Uniform sensing support, inclusive, in tenths of a unit.
    pub reading_lo_tenths: i64,
    pub reading_hi_tenths: i64,
    /// Hop count to the base station for every mote.
    pub hops: Vec<u32>,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            e_tx: 0.4e-6,
            e_compress: 0.86e-9,
            reading_bits: 16,
            header_bits: 96,
            readings_per_packet: 1.0,
            reading_lo_tenths: 0,
            reading_hi_tenths: 600,
            hops: vec![1],
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<(), MergeError> {
        if self.e_tx < 0.0 || self.e_compress < 0.0 {
            return Err(MergeError::InvalidCostModel("negative energy rate".into()));
        }
        if self.reading_hi_tenths <= self.reading_lo_tenths {
            return Err(MergeError::InvalidCostModel(
                "reading support must have hi > lo".into(),
            ));
        }
        if self.readings_per_packet <= 0.0 {
            return Err(MergeError::InvalidCostModel(
                "readings_per_packet must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn support_size(&self) -> u64 {
        (self.reading_hi_tenths - self.reading_lo_tenths + 1) as u64
    }

    /// Number of support points inside the query's range, computed
    /// arithmetically. The boundary adjustments keep the count identical
    /// to what point-by-point enumeration of `k/10.0` yields.
    pub fn match_count(&self, q: &RangeQuery) -> u64 {
        let mut k_lo = (q.min_value * 10.0).ceil() as i64;
        while k_lo > self.reading_lo_tenths && (k_lo - 1) as f64 / 10.0 >= q.min_value {
            k_lo -= 1;
        }
        while k_lo as f64 / 10.0 < q.min_value {
            k_lo += 1;
        }
        let mut k_hi = (q.max_value * 10.0).floor() as i64;
        while k_hi < self.reading_hi_tenths && (k_hi + 1) as f64 / 10.0 <= q.max_value {
            k_hi += 1;
        }
        while k_hi as f64 / 10.0 > q.max_value {
            k_hi -= 1;
        }
        let lo = k_lo.max(self.reading_lo_tenths);
        let hi = k_hi.min(self.reading_hi_tenths);
        if hi < lo {
            0
        } else {
            (hi - lo + 1) as u64
        }
    }

    /// Probability that one sensed value falls inside the query's range.
    pub fn match_probability(&self, q: &RangeQuery) -> f64 {
        self.match_count(q) as f64 / self.support_size() as f64
    }
}

/// Expected energy of serving one sampling round of `q` on every mote.
pub fn per_round_cost(q: &RangeQuery, m: &CostModel) -> f64 {
    let p = m.match_probability(q);
    let bits_per_mote =
        p * m.reading_bits as f64 + m.header_bits as f64 / m.readings_per_packet;
    let hop_sum: f64 = m.hops.iter().map(|&h| h as f64).sum();
    let tx = bits_per_mote * hop_sum * m.e_tx;
    let compress = p * m.reading_bits as f64 * m.e_compress * m.hops.len() as f64;
    tx + compress
}

/// Expected steady-state energy rate of `q`, in J per second.
pub fn estimate_cost(q: &RangeQuery, m: &CostModel) -> f64 {
    per_round_cost(q, m) / q.epoch_s as f64
}

/// An original query enrolled in a synthetic query, with its private demux
/// filter and its own remaining sampling rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberFilter {
    pub query: RangeQuery,
    pub remaining_epochs: u32,
    pub admitted_at: u64,
}

impl MemberFilter {
    fn new(query: RangeQuery, admitted_at: u64) -> Self {
        MemberFilter {
            remaining_epochs: query.lifetime_epochs,
            query,
            admitted_at,
        }
    }

    /// Seconds of service still owed to this member.
    fn remaining_horizon_s(&self) -> u64 {
        self.remaining_epochs as u64 * self.query.epoch_s as u64
    }

    fn due_at(&self, t: u64) -> bool {
        self.remaining_epochs > 0
            && t >= self.admitted_at
            && (t - self.admitted_at).is_multiple_of(self.query.epoch_s as u64)
    }
}

/// A merged query covering a set of original queries. The underlying
/// `query` is what goes on the network; members keep their own filters.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticQuery {
    pub id: u64,
    pub query: RangeQuery,
    pub members: Vec<MemberFilter>,
}

impl SyntheticQuery {
    /// Wraps a single query; the network query mirrors it exactly.
    pub fn from_query(id: u64, q: RangeQuery, now: u64) -> Self {
        let mut network = q.clone();
        network.id = id;
        SyntheticQuery {
            id,
            query: network,
            members: vec![MemberFilter::new(q, now)],
        }
    }

    pub fn member_ids(&self) -> Vec<u64> {
        self.members.iter().map(|m| m.query.id).collect()
    }

    fn remaining_horizon_s(&self) -> u64 {
        self.members
            .iter()
            .map(MemberFilter::remaining_horizon_s)
            .max()
            .unwrap_or(0)
    }

    /// Structural invariants: containment, epoch divisibility, non-empty
    /// membership.
    pub fn check_invariants(&self) -> bool {
        !self.members.is_empty()
            && self.members.iter().all(|m| {
                self.query.contains_range(&m.query)
                    && m.query.epoch_s % self.query.epoch_s == 0
                    && m.remaining_epochs > 0
            })
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Merges a new query into a synthetic query: range union, epoch gcd,
/// lifetime covering the longest member horizon at the merged rate.
pub fn merge(a: &SyntheticQuery, b: &RangeQuery, now: u64) -> Result<SyntheticQuery, MergeError> {
    if a.query.attribute != b.attribute {
        return Err(MergeError::AttributeMismatch);
    }
    let epoch = gcd(a.query.epoch_s, b.epoch_s);
    let mut members = a.members.clone();
    members.push(MemberFilter::new(b.clone(), now));
    let horizon = members
        .iter()
        .map(MemberFilter::remaining_horizon_s)
        .max()
        .unwrap();
    let lifetime = (horizon / epoch as u64).min(u32::MAX as u64) as u32;
    let query = RangeQuery {
        id: a.id,
        attribute: a.query.attribute,
        min_value: a.query.min_value.min(b.min_value),
        max_value: a.query.max_value.max(b.max_value),
        epoch_s: epoch,
        lifetime_epochs: lifetime,
    };
    Ok(SyntheticQuery {
        id: a.id,
        query,
        members,
    })
}

/// A reading retained at the base station.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CachedReading {
    pub attribute: Attribute,
    pub reading: Reading,
}

/// Base-station state: active synthetic queries plus a bounded cache of
/// recent readings.
#[derive(Debug, Clone, Default)]
pub struct QuerySetState {
    pub active: Vec<SyntheticQuery>,
    cache: VecDeque<CachedReading>,
    cache_capacity: usize,
    next_synthetic_id: u64,
}

impl QuerySetState {
    pub fn new() -> Self {
        QuerySetState {
            active: Vec::new(),
            cache: VecDeque::new(),
            cache_capacity: 4096,
            next_synthetic_id: 1,
        }
    }

    pub fn cached_readings(&self) -> impl Iterator<Item = &CachedReading> {
        self.cache.iter()
    }

    pub fn active_member_count(&self) -> usize {
        self.active.iter().map(|s| s.members.len()).sum()
    }

    pub fn check_invariants(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        for s in &self.active {
            if !s.check_invariants() {
                return false;
            }
            for id in s.member_ids() {
                if !seen.insert(id) {
                    return false;
                }
            }
        }
        true
    }
}

/// True when an active synthetic query already covers `q`'s range and
/// samples a superset of its instants, so `q` needs no network traffic of
/// its own.
pub fn can_answer_from_cache(q: &RangeQuery, state: &QuerySetState, _now: u64) -> bool {
    state.active.iter().any(|s| covers(s, q))
}

fn covers(s: &SyntheticQuery, q: &RangeQuery) -> bool {
    s.query.contains_range(q) && q.epoch_s.is_multiple_of(s.query.epoch_s)
}

/// Windowed expected energy of a query: per-round cost times remaining
/// rounds.
fn windowed_energy(q: &RangeQuery, remaining_epochs: u32, m: &CostModel) -> f64 {
    per_round_cost(q, m) * remaining_epochs as f64
}

fn best_merge_candidate(
    state: &QuerySetState,
    q_n: &RangeQuery,
    m: &CostModel,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, s) in state.active.iter().enumerate() {
        if s.query.attribute != q_n.attribute {
            continue;
        }
        let merged = merge(s, q_n, 0).expect("attribute checked");
        let window = merged.remaining_horizon_s();
        if window == 0 {
            continue;
        }
        let s_rounds = (s.remaining_horizon_s() / s.query.epoch_s as u64) as u32;
        let before = windowed_energy(&s.query, s_rounds, m)
            + windowed_energy(q_n, q_n.lifetime_epochs, m);
        let after = windowed_energy(&merged.query, merged.query.lifetime_epochs, m);
        let g = (before - after) / window as f64;
        let better = match best {
            None => true,
            Some((best_idx, best_gain)) => {
                g > best_gain
                    || (g == best_gain && state.active[idx].id < state.active[best_idx].id)
            }
        };
        if better {
            best = Some((idx, g));
        }
    }
    best
}

/// Energy gained per second of the merged window by folding `q_n` into its
/// best candidate, zero when nothing can absorb it.
pub fn gain(state: &QuerySetState, q_n: &RangeQuery, m: &CostModel) -> f64 {
    best_merge_candidate(state, q_n, m).map_or(0.0, |(_, g)| g)
}

/// How `admit` disposed of a query.
#[derive(Debug, Clone, PartialEq)]
pub enum Decision {
    CacheAnswered { synthetic_id: u64 },
    Merged { synthetic_id: u64, gain: f64 },
    Standalone { synthetic_id: u64 },
}

impl Decision {
    pub fn label(&self) -> &'static str {
        match self {
            Decision::CacheAnswered { .. } => "cache-answered",
            Decision::Merged { .. } => "merged",
            Decision::Standalone { .. } => "standalone",
        }
    }
}

/// Network side effects of an admission or expiry, applied by the caller.
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkAction {
    /// Disseminate a new query.
    Install(RangeQuery),
    /// Replace a running query's definition.
    Reinstall(RangeQuery),
    /// Remove a fulfilled query.
    Withdraw(u64),
}

/// Admits a new query: answer from the covered stream when possible,
/// otherwise merge when the gain is positive, otherwise run standalone.
pub fn admit(
    state: &mut QuerySetState,
    q_n: &RangeQuery,
    m: &CostModel,
    now: u64,
) -> Result<(Decision, Vec<NetworkAction>), MergeError> {
    m.validate()?;

    // Cache answering also demands the covering query outlive the new
    // member; otherwise the member would starve after the cover expires.
    if can_answer_from_cache(q_n, state, now) {
        if let Some(s) = state
            .active
            .iter_mut()
            .filter(|s| covers(s, q_n) && s.remaining_horizon_s() >= q_n.horizon_s())
            .min_by_key(|s| s.id)
        {
            s.members.push(MemberFilter::new(q_n.clone(), now));
            return Ok((Decision::CacheAnswered { synthetic_id: s.id }, Vec::new()));
        }
    }

    if let Some((idx, g)) = best_merge_candidate(state, q_n, m) {
        if g > 0.0 {
            let merged = merge(&state.active[idx], q_n, now)?;
            let id = merged.id;
            let action = NetworkAction::Reinstall(merged.query.clone());
            state.active[idx] = merged;
            return Ok((
                Decision::Merged {
                    synthetic_id: id,
                    gain: g,
                },
                vec![action],
            ));
        }
    }

    let id = state.next_synthetic_id;
    state.next_synthetic_id += 1;
    let synthetic = SyntheticQuery::from_query(id, q_n.clone(), now);
    let action = NetworkAction::Install(synthetic.query.clone());
    state.active.push(synthetic);
    Ok((Decision::Standalone { synthetic_id: id }, vec![action]))
}

/// Readings routed to one member query.
#[derive(Debug, Clone, PartialEq)]
pub struct Delivery {
    pub member_id: u64,
    pub synthetic_id: u64,
    pub readings: Vec<Reading>,
}

/// Routes the instant's readings to every member due at `t`, decrements
/// lifetimes, drops fulfilled members and withdraws emptied synthetics.
pub fn demux(
    state: &mut QuerySetState,
    t: u64,
    readings: &[Reading],
) -> (Vec<Delivery>, Vec<NetworkAction>) {
    let mut deliveries = Vec::new();
    let mut actions = Vec::new();
    for r in readings.iter().filter(|r| r.t == t) {
        if let Some(s) = state.active.iter().find(|s| r.matches(&s.query)) {
            let attribute = s.query.attribute;
            if state.cache.len() == state.cache_capacity {
                state.cache.pop_front();
            }
            state.cache.push_back(CachedReading {
                attribute,
                reading: *r,
            });
        }
    }
    for s in &mut state.active {
        for member in &mut s.members {
            if !member.due_at(t) {
                continue;
            }
            let matched: Vec<Reading> = readings
                .iter()
                .filter(|r| r.t == t && r.matches(&member.query))
                .copied()
                .collect();
            member.remaining_epochs -= 1;
            deliveries.push(Delivery {
                member_id: member.query.id,
                synthetic_id: s.id,
                readings: matched,
            });
        }
        s.members.retain(|m| m.remaining_epochs > 0);
        if s.members.is_empty() {
            actions.push(NetworkAction::Withdraw(s.id));
        }
    }
    state.active.retain(|s| !s.members.is_empty());
    (deliveries, actions)
}
