//! Per-node joule accounting.
//!
//! Ledgers count bits and readings as integers and convert to joules only
//! when read, so transmit energy is exactly bits-on-air times the per-bit
//! rate and reports are bit-identical across runs.

/// Per-bit and per-reading energy rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRates {
    /// J per transmitted bit.
    pub e_tx: f64,
    /// J per bit entering a compressor.
    pub e_compress: f64,
    /// J per received bit.
    pub e_rx: f64,
    /// J per sensed reading.
    pub e_sense: f64,
}

impl Default for EnergyRates {
    fn default() -> Self {
        EnergyRates {
            e_tx: 0.4e-6,
            e_compress: 0.86e-9,
            e_rx: 0.0,
            e_sense: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NodeCounters {
    pub tx_bits: u64,
    pub rx_bits: u64,
    pub compress_in_bits: u64,
    pub readings: u64,
}

/// Joule totals for one node at given rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeEnergy {
    pub tx_j: f64,
    pub rx_j: f64,
    pub compress_j: f64,
    pub sense_j: f64,
}

impl NodeEnergy {
    pub fn total_j(&self) -> f64 {
        self.tx_j + self.rx_j + self.compress_j + self.sense_j
    }
}

/// Energy ledger over all nodes. Node 0 is the base station; its energy is
/// replenishable and is never charged.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    rates: EnergyRates,
    nodes: Vec<NodeCounters>,
}

impl EnergyLedger {
    pub fn new(rates: EnergyRates, node_count: usize) -> Self {
        EnergyLedger {
            rates,
            nodes: vec![NodeCounters::default(); node_count],
        }
    }

    pub fn rates(&self) -> &EnergyRates {
        &self.rates
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn charge_tx(&mut self, node: u32, bits: u64) {
        if node != 0 {
            self.nodes[node as usize].tx_bits += bits;
        }
    }

    pub fn charge_rx(&mut self, node: u32, bits: u64) {
        if node != 0 {
            self.nodes[node as usize].rx_bits += bits;
        }
    }

    pub fn charge_compress(&mut self, node: u32, input_bits: u64) {
        if node != 0 {
            self.nodes[node as usize].compress_in_bits += input_bits;
        }
    }

    pub fn charge_sense(&mut self, node: u32, readings: u64) {
        if node != 0 {
            self.nodes[node as usize].readings += readings;
        }
    }

    pub fn counters(&self, node: u32) -> &NodeCounters {
        &self.nodes[node as usize]
    }

    pub fn node_energy(&self, node: u32) -> NodeEnergy {
        let c = &self.nodes[node as usize];
        NodeEnergy {
            tx_j: c.tx_bits as f64 * self.rates.e_tx,
            rx_j: c.rx_bits as f64 * self.rates.e_rx,
            compress_j: c.compress_in_bits as f64 * self.rates.e_compress,
            sense_j: c.readings as f64 * self.rates.e_sense,
        }
    }

    /// Total transmitted bits across all links.
    pub fn bits_on_air(&self) -> u64 {
        self.nodes.iter().map(|c| c.tx_bits).sum()
    }

    pub fn total_counters(&self) -> NodeCounters {
        let mut total = NodeCounters::default();
        for c in &self.nodes {
            total.tx_bits += c.tx_bits;
            total.rx_bits += c.rx_bits;
            total.compress_in_bits += c.compress_in_bits;
            total.readings += c.readings;
        }
        total
    }

    pub fn total_energy(&self) -> NodeEnergy {
        let c = self.total_counters();
        NodeEnergy {
            tx_j: c.tx_bits as f64 * self.rates.e_tx,
            rx_j: c.rx_bits as f64 * self.rates.e_rx,
            compress_j: c.compress_in_bits as f64 * self.rates.e_compress,
            sense_j: c.readings as f64 * self.rates.e_sense,
        }
    }

    pub fn total_j(&self) -> f64 {
        self.total_energy().total_j()
    }

    /// Per-node rows plus a summary row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "node,tx_bits,rx_bits,compress_in_bits,readings,tx_j,rx_j,compress_j,sense_j,total_j\n",
        );
        for node in 0..self.nodes.len() as u32 {
            let c = &self.nodes[node as usize];
            let e = self.node_energy(node);
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                node,
                c.tx_bits,
                c.rx_bits,
                c.compress_in_bits,
                c.readings,
                e.tx_j,
                e.rx_j,
                e.compress_j,
                e.sense_j,
                e.total_j()
            ));
        }
        let c = self.total_counters();
        let e = self.total_energy();
        out.push_str(&format!(
            "total,{},{},{},{},{},{},{},{},{}\n",
            c.tx_bits,
            c.rx_bits,
            c.compress_in_bits,
            c.readings,
            e.tx_j,
            e.rx_j,
            e.compress_j,
            e.sense_j,
            e.total_j()
        ));
        out
    }
}
