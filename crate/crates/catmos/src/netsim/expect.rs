//! Expected-energy computation by exhaustive enumeration.
//!
//! Walks every point of the discretized reading support for every mote and
//! sampling round and accumulates the abstract traffic model's energy.
//! This is the brute-force counterpart to the closed-form probability
//! arithmetic in [`crate::qmerge::estimate_cost`]; the two must agree, and
//! tests hold them to 1e-9 relative.

use crate::qmerge::CostModel;
use crate::query_model::RangeQuery;

use super::topology::Topology;

/// Expected energy, in joules, of serving each query for its whole
/// lifetime on the given topology under the cost model's abstraction.
pub fn expected_energy(topo: &Topology, queries: &[RangeQuery], m: &CostModel) -> f64 {
    let mut total = 0.0;
    for q in queries {
        total += expected_round_energy(topo, q, m) * q.lifetime_epochs as f64;
    }
    total
}

/// Expected energy of one sampling round of `q` across all motes, by
/// enumerating the support point by point.
pub fn expected_round_energy(topo: &Topology, q: &RangeQuery, m: &CostModel) -> f64 {
    let support = m.reading_lo_tenths..=m.reading_hi_tenths;
    let support_size = (m.reading_hi_tenths - m.reading_lo_tenths + 1) as f64;
    let mut round = 0.0;
    for node in topo.motes() {
        let hops = topo.hops(node) as f64;
        let mut acc = 0.0;
        for k in support.clone() {
            let value = k as f64 / 10.0;
            let reading_bits = if q.contains_value(value) {
                m.reading_bits as f64
            } else {
                0.0
            };
            let tx_bits = reading_bits + m.header_bits as f64 / m.readings_per_packet;
            acc += tx_bits * hops * m.e_tx + reading_bits * m.e_compress;
        }
        round += acc / support_size;
    }
    round
}
