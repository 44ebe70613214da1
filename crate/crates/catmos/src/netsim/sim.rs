//! Deterministic event loop: sensing, tokenization, in-network
//! compression and aggregation, dissemination, and delivery.
//!
//! Three modes share one pipeline. Baseline injects each query's raw text
//! and forwards one packet per (source, query, instant) hop by hop.
//! Compress-only injects compressed query text and coalesces each node's
//! subtree records into a single recompressed packet per link per instant.
//! Catmos additionally substitutes static variables into query text and
//! runs admissions through the base-station optimizer, so only synthetic
//! queries reach the network.
//!
//! Dissemination is modeled as flooding: every mote retransmits an
//! injected packet once, and the dictionary install is charged the same
//! way at setup. The base station's own radio is replenishable and never
//! appears in ledgers or bits-on-air.

use std::collections::{BTreeMap, BTreeSet};

use crate::codec::{self, CodecConfig, CodecId};
use crate::qmerge::{self, CostModel, NetworkAction, QuerySetState, Reading};
use crate::query_model::{serialize, RangeQuery};
use crate::static_vars::{self, StaticVarDictionary};

use super::energy::{EnergyLedger, EnergyRates};
use super::mote::{InstalledQuery, Mote, DEFAULT_RAM_BUDGET_BYTES};
use super::record;
use super::topology::Topology;
use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Baseline,
    CompressOnly,
    Catmos,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Baseline, Mode::CompressOnly, Mode::Catmos];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Baseline => "baseline",
            Mode::CompressOnly => "compress-only",
            Mode::Catmos => "catmos",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub seed: u64,
    pub codec: CodecId,
    pub codec_cfg: CodecConfig,
    pub rates: EnergyRates,
    /// Bits per packet header on the simulated air.
    pub header_bits: u32,
    /// Inclusive sensing support in tenths of a unit.
    pub reading_lo_tenths: i64,
    pub reading_hi_tenths: i64,
    /// Static-variable dictionary size; zero disables substitution.
    pub static_max_entries: usize,
    /// Abstract bits per reading in the merge cost model.
    pub reading_bits: u32,
    /// Header amortization divisor in the merge cost model.
    pub readings_per_packet: f64,
    pub ram_budget_bytes: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 1,
            codec: CodecId::Huffman,
            codec_cfg: CodecConfig::default(),
            rates: EnergyRates::default(),
            header_bits: 96,
            reading_lo_tenths: 0,
            reading_hi_tenths: 600,
            static_max_entries: 16,
            reading_bits: 16,
            readings_per_packet: 1.0,
            ram_budget_bytes: DEFAULT_RAM_BUDGET_BYTES,
        }
    }
}

impl SimConfig {
    pub fn cost_model(&self, topo: &Topology) -> CostModel {
        CostModel {
            e_tx: self.rates.e_tx,
            e_compress: self.rates.e_compress,
            reading_bits: self.reading_bits,
            header_bits: self.header_bits,
            readings_per_packet: self.readings_per_packet,
            reading_lo_tenths: self.reading_lo_tenths,
            reading_hi_tenths: self.reading_hi_tenths,
            hops: topo.mote_hops(),
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.reading_hi_tenths <= self.reading_lo_tenths {
            return Err(SimError::InvalidSupport);
        }
        Ok(())
    }
}

/// One base-station admission, for the decision log.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRecord {
    pub query_id: u64,
    pub decision: &'static str,
    pub gain_j_per_s: f64,
    pub active_set_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub mode: Mode,
    pub ledger: EnergyLedger,
    /// Transmitted bits per instant with any traffic.
    pub bits_series: Vec<(u64, u64)>,
    /// Readings delivered per original query id, in (node, t) order.
    pub delivered: BTreeMap<u64, Vec<Reading>>,
    /// Every record that reached the base station, duplicates included,
    /// sorted. Transport must neither lose nor duplicate records, so this
    /// multiset is invariant across per-source and aggregated forwarding.
    pub arrivals: Vec<Reading>,
    /// Admission log; empty outside catmos mode.
    pub decisions: Vec<DecisionRecord>,
}

impl SimReport {
    pub fn bits_on_air(&self) -> u64 {
        self.ledger.bits_on_air()
    }

    pub fn total_j(&self) -> f64 {
        self.ledger.total_j()
    }

    pub fn bits_series_csv(&self) -> String {
        let mut out = String::from("t,bits\n");
        for &(t, bits) in &self.bits_series {
            out.push_str(&format!("{t},{bits}\n"));
        }
        out
    }
}

fn validate_queries(queries: &[RangeQuery]) -> Result<(), SimError> {
    if queries.is_empty() {
        return Err(SimError::NoQueries);
    }
    let mut ids = BTreeSet::new();
    for q in queries {
        if !ids.insert(q.id) {
            return Err(SimError::DuplicateQueryId(q.id));
        }
        if q.attribute != queries[0].attribute {
            return Err(SimError::MixedAttributes);
        }
    }
    Ok(())
}

/// Runs a scenario's queries to completion in the given mode.
pub fn run(
    topo: &Topology,
    queries: &[RangeQuery],
    cfg: &SimConfig,
    mode: Mode,
) -> Result<SimReport, SimError> {
    cfg.validate()?;
    validate_queries(queries)?;
    match mode {
        Mode::Baseline | Mode::CompressOnly => run_originals(topo, queries, cfg, mode),
        Mode::Catmos => run_catmos(topo, queries, cfg),
    }
}

fn run_originals(
    topo: &Topology,
    queries: &[RangeQuery],
    cfg: &SimConfig,
    mode: Mode,
) -> Result<SimReport, SimError> {
    let mut net = Network::new(topo, cfg, mode == Mode::CompressOnly);
    for q in queries {
        net.disseminate_query(0, q, None)?;
    }
    let mut station = BaseStation::Originals(
        queries
            .iter()
            .map(|q| InstalledQuery {
                query: q.clone(),
                installed_at: 0,
            })
            .collect(),
    );
    net.run_to_completion(&mut station, Vec::new())
}

fn run_catmos(
    topo: &Topology,
    queries: &[RangeQuery],
    cfg: &SimConfig,
) -> Result<SimReport, SimError> {
    let mut net = Network::new(topo, cfg, true);

    let dict = if cfg.static_max_entries > 0 {
        let corpus: Vec<_> = queries.iter().map(serialize).collect();
        static_vars::build_dictionary(&corpus, cfg.static_max_entries)?
    } else {
        StaticVarDictionary::empty()
    };
    if !dict.is_empty() {
        net.install_dictionary(0, &dict)?;
    }

    let cost = cfg.cost_model(topo);
    let mut state = QuerySetState::new();
    let mut decisions = Vec::new();
    for q in queries {
        let gain = qmerge::gain(&state, q, &cost);
        let (decision, actions) = qmerge::admit(&mut state, q, &cost, 0)?;
        decisions.push(DecisionRecord {
            query_id: q.id,
            decision: decision.label(),
            gain_j_per_s: gain,
            active_set_size: state.active.len(),
        });
        net.apply_actions(0, &actions, &dict)?;
    }

    let mut station = BaseStation::Merged(state);
    net.run_to_completion(&mut station, decisions)
}

/// Runs a pre-built query set (already merged synthetic queries) through
/// the compressed pipeline. Delivery keys are the member query ids.
pub fn run_merged_state(
    topo: &Topology,
    state: QuerySetState,
    cfg: &SimConfig,
) -> Result<SimReport, SimError> {
    cfg.validate()?;
    let mut net = Network::new(topo, cfg, true);
    for s in &state.active {
        net.disseminate_query(0, &s.query, None)?;
    }
    let mut station = BaseStation::Merged(state);
    net.run_to_completion(&mut station, Vec::new())
}

enum BaseStation {
    Originals(Vec<InstalledQuery>),
    Merged(QuerySetState),
}

impl BaseStation {
    fn delivery_ids(&self) -> Vec<u64> {
        match self {
            BaseStation::Originals(queries) => queries.iter().map(|iq| iq.query.id).collect(),
            BaseStation::Merged(state) => state
                .active
                .iter()
                .flat_map(|s| s.member_ids())
                .collect(),
        }
    }

    fn mode(&self, compress: bool) -> Mode {
        match self {
            BaseStation::Originals(_) if compress => Mode::CompressOnly,
            BaseStation::Originals(_) => Mode::Baseline,
            BaseStation::Merged(_) => Mode::Catmos,
        }
    }
}

struct Network<'a> {
    topo: &'a Topology,
    cfg: &'a SimConfig,
    compress: bool,
    ledger: EnergyLedger,
    motes: Vec<Mote>,
    bits_by_t: BTreeMap<u64, u64>,
}

impl<'a> Network<'a> {
    fn new(topo: &'a Topology, cfg: &'a SimConfig, compress: bool) -> Self {
        let motes = (0..topo.node_count() as u32)
            .map(|id| Mote::new(id, topo.parent(id).unwrap_or(0), cfg.ram_budget_bytes))
            .collect();
        Network {
            topo,
            cfg,
            compress,
            ledger: EnergyLedger::new(cfg.rates, topo.node_count()),
            motes,
            bits_by_t: BTreeMap::new(),
        }
    }

    /// Flood: the base station broadcasts and every mote rebroadcasts once.
    fn flood(&mut self, t: u64, payload_bits: u64) {
        let packet_bits = self.cfg.header_bits as u64 + payload_bits;
        for node in self.topo.motes() {
            self.ledger.charge_rx(node, packet_bits);
            self.ledger.charge_tx(node, packet_bits);
            *self.bits_by_t.entry(t).or_insert(0) += packet_bits;
        }
    }

    fn install_dictionary(&mut self, t: u64, dict: &StaticVarDictionary) -> Result<(), SimError> {
        self.flood(t, dict.serialized_bytes() as u64 * 8);
        for node in self.topo.motes() {
            self.motes[node as usize].install_dictionary(dict.clone())?;
        }
        Ok(())
    }

    /// Injects a query: serialize, substitute when a dictionary is given,
    /// compress in the compressed modes, then flood and install.
    fn disseminate_query(
        &mut self,
        t: u64,
        q: &RangeQuery,
        dict: Option<&StaticVarDictionary>,
    ) -> Result<(), SimError> {
        let text = serialize(q);
        let payload = match dict {
            Some(dict) if !dict.is_empty() => static_vars::substitute(&text, dict),
            _ => text.as_bytes().to_vec(),
        };
        let payload_bits = if self.compress {
            codec::encode(self.cfg.codec, &payload, &self.cfg.codec_cfg)?.total_bits() as u64
        } else {
            payload.len() as u64 * 8
        };
        self.flood(t, payload_bits);
        for node in self.topo.motes() {
            self.motes[node as usize].install_query(q.clone(), t);
        }
        Ok(())
    }

    fn apply_actions(
        &mut self,
        t: u64,
        actions: &[NetworkAction],
        dict: &StaticVarDictionary,
    ) -> Result<(), SimError> {
        for action in actions {
            match action {
                NetworkAction::Install(q) | NetworkAction::Reinstall(q) => {
                    self.disseminate_query(t, q, Some(dict))?;
                }
                NetworkAction::Withdraw(id) => self.withdraw(*id),
            }
        }
        Ok(())
    }

    fn withdraw(&mut self, id: u64) {
        for node in self.topo.motes() {
            self.motes[node as usize].withdraw_query(id);
        }
    }

    fn instants(&self) -> BTreeSet<u64> {
        let mut set = BTreeSet::new();
        // Every mote holds the same installs; read the first one.
        if let Some(node) = self.topo.motes().next() {
            for iq in &self.motes[node as usize].installed {
                set.extend(iq.instants());
            }
        }
        set
    }

    fn run_to_completion(
        &mut self,
        station: &mut BaseStation,
        decisions: Vec<DecisionRecord>,
    ) -> Result<SimReport, SimError> {
        let mut delivered: BTreeMap<u64, Vec<Reading>> = station
            .delivery_ids()
            .into_iter()
            .map(|id| (id, Vec::new()))
            .collect();

        let mut arrivals: Vec<Reading> = Vec::new();
        let mut pending: BTreeSet<u64> = self.instants();
        while let Some(t) = pending.iter().next().copied() {
            pending.remove(&t);
            let arriving = self.transport_round(t)?;
            arrivals.extend(arriving.iter().copied());
            let unique: BTreeSet<Reading> = arriving.into_iter().collect();
            let readings: Vec<Reading> = unique.into_iter().collect();
            match station {
                BaseStation::Originals(queries) => {
                    for iq in queries.iter() {
                        if iq.due_at(t) {
                            delivered
                                .get_mut(&iq.query.id)
                                .expect("delivery key")
                                .extend(readings.iter().filter(|r| r.matches(&iq.query)));
                        }
                    }
                }
                BaseStation::Merged(state) => {
                    let (deliveries, actions) = qmerge::demux(state, t, &readings);
                    for d in deliveries {
                        delivered
                            .get_mut(&d.member_id)
                            .expect("delivery key")
                            .extend(d.readings);
                    }
                    for action in &actions {
                        if let NetworkAction::Withdraw(id) = action {
                            self.withdraw(*id);
                        }
                    }
                    if !actions.is_empty() {
                        // Withdrawals may strand later instants; keep only
                        // those still due.
                        let still: BTreeSet<u64> = self.instants();
                        pending.retain(|&x| still.contains(&x));
                    }
                }
            }
        }

        for readings in delivered.values_mut() {
            readings.sort();
        }
        arrivals.sort();
        let bits_series = self
            .bits_by_t
            .iter()
            .map(|(&t, &bits)| (t, bits))
            .collect();
        Ok(SimReport {
            mode: station.mode(self.compress),
            ledger: self.ledger.clone(),
            bits_series,
            delivered,
            arrivals,
            decisions,
        })
    }

    /// Senses, packetizes and forwards one instant's traffic; returns the
    /// records arriving at the base station.
    fn transport_round(&mut self, t: u64) -> Result<Vec<Reading>, SimError> {
        // One physical measurement per (node, t); one record per due query
        // whose range admits it.
        let mut own: BTreeMap<u32, Vec<Reading>> = BTreeMap::new();
        for node in self.topo.motes() {
            let mote = &self.motes[node as usize];
            let due: Vec<&InstalledQuery> =
                mote.installed.iter().filter(|iq| iq.due_at(t)).collect();
            if due.is_empty() {
                continue;
            }
            let value_tenths = mote.sense(
                self.cfg.seed,
                t,
                self.cfg.reading_lo_tenths,
                self.cfg.reading_hi_tenths,
            );
            self.ledger.charge_sense(node, 1);
            let reading = Reading {
                node,
                t,
                value_tenths,
            };
            for iq in due {
                if reading.matches(&iq.query) {
                    own.entry(node).or_default().push(reading);
                }
            }
        }
        if self.compress {
            self.forward_aggregated(t, own)
        } else {
            Ok(self.forward_per_source(t, own))
        }
    }

    /// Baseline transport: one packet per record, re-sent on every hop.
    fn forward_per_source(&mut self, t: u64, own: BTreeMap<u32, Vec<Reading>>) -> Vec<Reading> {
        let mut arriving = Vec::new();
        for (node, records) in own {
            for reading in records {
                let text = record::tokenize(&[reading]);
                let packet_bits = self.cfg.header_bits as u64 + text.len() as u64 * 8;
                let mut cur = node;
                while let Some(parent) = self.topo.parent(cur) {
                    self.ledger.charge_tx(cur, packet_bits);
                    self.ledger.charge_rx(parent, packet_bits);
                    *self.bits_by_t.entry(t).or_insert(0) += packet_bits;
                    cur = parent;
                }
                arriving.push(reading);
            }
        }
        arriving
    }

    /// Aggregated transport: run bottom-up so every child's packet is on
    /// hand when its parent coalesces; whatever reaches node 0 has arrived.
    fn forward_aggregated(
        &mut self,
        t: u64,
        mut own: BTreeMap<u32, Vec<Reading>>,
    ) -> Result<Vec<Reading>, SimError> {
        let mut inbox: BTreeMap<u32, Vec<Packet>> = BTreeMap::new();
        for node in self.topo.aggregation_order() {
            let child_packets = inbox.remove(&node).unwrap_or_default();
            let own_records = own.remove(&node).unwrap_or_default();
            if let Some(packet) =
                self.aggregate_and_forward(node, t, child_packets, own_records)?
            {
                let parent = self.topo.parent(node).expect("motes have parents");
                inbox.entry(parent).or_default().push(packet);
            }
        }
        let mut arriving = Vec::new();
        for packet in inbox.remove(&0).unwrap_or_default() {
            arriving.extend(packet.decode_records()?);
        }
        Ok(arriving)
    }

    /// One relay step: decode the children's payloads, coalesce them with
    /// the node's own records, recompress into a single packet and send it
    /// one hop up, paying the header once. Charges receive energy for the
    /// incoming bits, compression energy per input bit and transmit energy
    /// per output bit.
    fn aggregate_and_forward(
        &mut self,
        node: u32,
        t: u64,
        child_packets: Vec<Packet>,
        own_records: Vec<Reading>,
    ) -> Result<Option<Packet>, SimError> {
        let mut records = own_records;
        for packet in child_packets {
            records.extend(packet.decode_records()?);
        }
        if records.is_empty() {
            return Ok(None);
        }
        let text = record::tokenize(&records);
        self.ledger.charge_compress(node, text.len() as u64 * 8);
        let payload = codec::encode(self.cfg.codec, &text, &self.cfg.codec_cfg)?;
        let packet = Packet {
            header_bits: self.cfg.header_bits as u64,
            payload,
            source: node,
            t,
        };
        let parent = self.topo.parent(node).expect("motes have parents");
        self.ledger.charge_tx(node, packet.total_bits());
        self.ledger.charge_rx(parent, packet.total_bits());
        *self.bits_by_t.entry(t).or_insert(0) += packet.total_bits();
        Ok(Some(packet))
    }
}

/// One transmission in the aggregated pipeline: a compressed payload of
/// records behind a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    pub header_bits: u64,
    pub payload: codec::CompressedBlob,
    pub source: u32,
    pub t: u64,
}

impl Packet {
    pub fn total_bits(&self) -> u64 {
        self.header_bits + self.payload.total_bits() as u64
    }

    /// The records the payload carries; decoding must reproduce them
    /// exactly.
    pub fn decode_records(&self) -> Result<Vec<Reading>, SimError> {
        record::parse_records(&codec::decode(&self.payload)?)
    }
}
