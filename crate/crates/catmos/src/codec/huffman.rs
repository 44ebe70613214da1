//! Canonical Huffman coding over byte alphabets.
//!
//! Code lengths come from the classic frequency-merge construction with a
//! deterministic tie-break; codes are then assigned canonically in
//! (length, symbol) order, so a codebook is reconstructible from its
//! lengths alone. A degenerate single-symbol alphabet is given a 1-bit
//! code rather than an empty codeword.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::bits::{BitBuf, BitReader};
use super::{CodecConfig, CodecError, CodecId, CompressedBlob, SizeMode};

/// Longest codeword accepted. Reaching depth 60 would take terabytes of
/// Fibonacci-skewed input; the cap keeps canonical-code arithmetic inside
/// a u64 with room for the full-tree check.
pub const MAX_CODE_LEN: u8 = 60;

/// Bits spent shipping the 256 code lengths in self-contained mode.
pub const HEADER_BITS: usize = 256 * 8;

/// Per-symbol canonical code lengths. Length 0 means the symbol is absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanCodebook {
    lengths: [u8; 256],
}

impl HuffmanCodebook {
    /// Builds optimal code lengths for the given symbol frequencies.
    ///
    /// At least one frequency must be nonzero. A lone symbol receives a
    /// 1-bit code.
    pub fn from_frequencies(freq: &[u64; 256]) -> Result<Self, CodecError> {
        let symbols: Vec<usize> = (0..256).filter(|&s| freq[s] > 0).collect();
        if symbols.is_empty() {
            return Err(CodecError::EmptyInput);
        }
        let mut lengths = [0u8; 256];
        if symbols.len() == 1 {
            lengths[symbols[0]] = 1;
            return Ok(HuffmanCodebook { lengths });
        }

        // Merge tree nodes: (frequency, creation sequence) ordering makes
        // the construction deterministic.
        struct Node {
            children: Option<(usize, usize)>,
            symbol: usize,
        }
        let mut nodes: Vec<Node> = Vec::with_capacity(symbols.len() * 2 - 1);
        let mut heap: BinaryHeap<Reverse<(u64, usize, usize)>> = BinaryHeap::new();
        for &s in &symbols {
            let idx = nodes.len();
            nodes.push(Node {
                children: None,
                symbol: s,
            });
            heap.push(Reverse((freq[s], s, idx)));
        }
        let mut seq = 256usize;
        while heap.len() > 1 {
            let Reverse((fa, _, a)) = heap.pop().unwrap();
            let Reverse((fb, _, b)) = heap.pop().unwrap();
            let idx = nodes.len();
            nodes.push(Node {
                children: Some((a, b)),
                symbol: 0,
            });
            heap.push(Reverse((fa + fb, seq, idx)));
            seq += 1;
        }
        let Reverse((_, _, root)) = heap.pop().unwrap();

        let mut stack = vec![(root, 0u8)];
        while let Some((idx, depth)) = stack.pop() {
            match nodes[idx].children {
                Some((a, b)) => {
                    debug_assert!(depth < MAX_CODE_LEN);
                    stack.push((a, depth + 1));
                    stack.push((b, depth + 1));
                }
                None => lengths[nodes[idx].symbol] = depth,
            }
        }
        Ok(HuffmanCodebook { lengths })
    }

    /// Restores a codebook from transmitted lengths, rejecting any set that
    /// does not describe a full prefix-code tree (Kraft sum 1), except for
    /// the degenerate single-symbol form with one 1-bit code.
    pub fn from_lengths(lengths: [u8; 256]) -> Result<Self, CodecError> {
        let book = HuffmanCodebook { lengths };
        book.validate()?;
        Ok(book)
    }

    pub fn lengths(&self) -> &[u8; 256] {
        &self.lengths
    }

    fn sorted_symbols(&self) -> Vec<usize> {
        let mut symbols: Vec<usize> = (0..256).filter(|&s| self.lengths[s] > 0).collect();
        symbols.sort_by_key(|&s| (self.lengths[s], s));
        symbols
    }

    fn validate(&self) -> Result<(), CodecError> {
        let symbols = self.sorted_symbols();
        if symbols.is_empty() {
            return Err(CodecError::InvalidCodebook);
        }
        if symbols.iter().any(|&s| self.lengths[s] > MAX_CODE_LEN) {
            return Err(CodecError::InvalidCodebook);
        }
        if symbols.len() == 1 {
            // Degenerate alphabet: exactly one symbol with a 1-bit code.
            return if self.lengths[symbols[0]] == 1 {
                Ok(())
            } else {
                Err(CodecError::InvalidCodebook)
            };
        }
        // Kraft equality checked through canonical assignment: codes must
        // exactly fill a binary tree, neither overflowing nor leaving gaps.
        let mut code: u64 = 0;
        let mut prev_len = self.lengths[symbols[0]];
        for (i, &s) in symbols.iter().enumerate() {
            let len = self.lengths[s];
            if i > 0 {
                code += 1;
                code <<= len - prev_len;
            }
            if code >= 1u64 << len {
                return Err(CodecError::InvalidCodebook);
            }
            prev_len = len;
        }
        if code + 1 != 1u64 << prev_len {
            return Err(CodecError::InvalidCodebook);
        }
        Ok(())
    }

    /// Kraft sum equals one exactly (full binary tree). The degenerate
    /// single-symbol codebook sums to one half and reports false.
    pub fn kraft_is_exact(&self) -> bool {
        let symbols = self.sorted_symbols();
        if symbols.len() < 2 {
            return false;
        }
        self.validate().is_ok()
    }

    /// Canonical (code, length) for every present symbol.
    pub fn codes(&self) -> Vec<(u8, u64, u8)> {
        let symbols = self.sorted_symbols();
        let mut out = Vec::with_capacity(symbols.len());
        let mut code: u64 = 0;
        let mut prev_len = 0u8;
        for &s in &symbols {
            let len = self.lengths[s];
            if prev_len != 0 {
                code += 1;
                code <<= len - prev_len;
            }
            out.push((s as u8, code, len));
            prev_len = len;
        }
        out
    }

    fn decode_tables(&self) -> DecodeTables {
        let symbols = self.sorted_symbols();
        let max_len = symbols
            .iter()
            .map(|&s| self.lengths[s])
            .max()
            .unwrap_or(0) as usize;
        let mut count = vec![0u32; max_len + 1];
        for &s in &symbols {
            count[self.lengths[s] as usize] += 1;
        }
        let mut first_code = vec![0u64; max_len + 1];
        let mut first_index = vec![0u32; max_len + 1];
        let mut code = 0u64;
        let mut index = 0u32;
        for len in 1..=max_len {
            first_code[len] = code;
            first_index[len] = index;
            code = (code + count[len] as u64) << 1;
            index += count[len];
        }
        DecodeTables {
            symbols: symbols.into_iter().map(|s| s as u8).collect(),
            count,
            first_code,
            first_index,
        }
    }
}

struct DecodeTables {
    symbols: Vec<u8>,
    count: Vec<u32>,
    first_code: Vec<u64>,
    first_index: Vec<u32>,
}

impl DecodeTables {
    fn decode_symbol(&self, reader: &mut BitReader<'_>) -> Result<u8, CodecError> {
        let mut acc = 0u64;
        for len in 1..self.count.len() {
            acc = (acc << 1) | reader.read_bit().ok_or(CodecError::TruncatedPayload)? as u64;
            let offset = acc.wrapping_sub(self.first_code[len]);
            if acc >= self.first_code[len] && offset < self.count[len] as u64 {
                return Ok(self.symbols[(self.first_index[len] as u64 + offset) as usize]);
            }
        }
        Err(CodecError::UnknownCode)
    }
}

pub fn encode(input: &[u8], cfg: &CodecConfig) -> Result<CompressedBlob, CodecError> {
    if input.is_empty() {
        return Err(CodecError::EmptyInput);
    }
    let mut freq = [0u64; 256];
    for &b in input {
        freq[b as usize] += 1;
    }
    let codebook = HuffmanCodebook::from_frequencies(&freq)?;
    let mut code_of = [(0u64, 0u8); 256];
    for (sym, code, len) in codebook.codes() {
        code_of[sym as usize] = (code, len);
    }
    let mut payload = BitBuf::new();
    for &b in input {
        let (code, len) = code_of[b as usize];
        payload.push_bits(code, len as u32);
    }
    let header_bits = match cfg.mode {
        SizeMode::PayloadOnly => 0,
        SizeMode::SelfContained => HEADER_BITS,
    };
    Ok(CompressedBlob {
        codec: CodecId::Huffman,
        payload,
        original_bytes: input.len(),
        header_bits,
        codebook: Some(codebook),
    })
}

pub fn decode(blob: &CompressedBlob) -> Result<Vec<u8>, CodecError> {
    let codebook = blob.codebook.as_ref().ok_or(CodecError::MissingCodebook)?;
    codebook.validate()?;
    let tables = codebook.decode_tables();
    let mut reader = blob.payload.reader();
    let mut out = Vec::with_capacity(blob.original_bytes);
    for _ in 0..blob.original_bytes {
        out.push(tables.decode_symbol(&mut reader)?);
    }
    if reader.remaining() != 0 {
        return Err(CodecError::TrailingBits);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn encode_default(input: &[u8]) -> CompressedBlob {
        encode(input, &CodecConfig::default()).unwrap()
    }

    /// Minimal total code length over every full binary code tree, found by
    /// trying all merge orders. Independent of the heap construction above.
    fn brute_force_optimal_bits(freqs: &[u64]) -> u64 {
        fn solve(weights: &[u64]) -> u64 {
            if weights.len() <= 1 {
                return 0;
            }
            let mut best = u64::MAX;
            for i in 0..weights.len() {
                for j in (i + 1)..weights.len() {
                    let (wi, wj) = (weights[i], weights[j]);
                    let mut rest: Vec<u64> = weights
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != i && k != j)
                        .map(|(_, &w)| w)
                        .collect();
                    rest.push(wi + wj);
                    best = best.min(wi + wj + solve(&rest));
                }
            }
            best
        }
        solve(freqs)
    }

    #[test]
    fn two_symbol_input_uses_one_bit_codes() {
        let blob = encode_default(b"abab");
        assert_eq!(blob.payload_bits(), 4);
        assert_eq!(decode(&blob).unwrap(), b"abab");
    }

    #[test]
    fn single_symbol_input_gets_one_bit_code() {
        let blob = encode_default(b"aaaa");
        assert_eq!(blob.payload_bits(), 4);
        let book = blob.codebook.as_ref().unwrap();
        assert_eq!(book.lengths()[b'a' as usize], 1);
        assert_eq!(decode(&blob).unwrap(), b"aaaa");
    }

    #[test]
    fn abracadabra_round_trips() {
        let blob = encode_default(b"abracadabra");
        assert_eq!(decode(&blob).unwrap(), b"abracadabra");
    }

    #[test]
    fn payload_bits_is_frequency_weighted_length_sum() {
        let input = b"the compression of repeated expressions";
        let blob = encode_default(input);
        let book = blob.codebook.as_ref().unwrap();
        let expected: u64 = input
            .iter()
            .map(|&b| book.lengths()[b as usize] as u64)
            .sum();
        assert_eq!(blob.payload_bits() as u64, expected);
    }

    #[test]
    fn truncated_payload_is_an_error() {
        let mut blob = encode_default(b"abracadabra");
        let len = blob.payload.len();
        blob.payload.truncate(len - 3);
        assert!(matches!(
            decode(&blob),
            Err(CodecError::TruncatedPayload) | Err(CodecError::UnknownCode)
        ));
    }

    #[test]
    fn corrupted_lengths_violating_kraft_are_rejected() {
        let mut lengths = [0u8; 256];
        lengths[0] = 1;
        lengths[1] = 2;
        lengths[2] = 3;
        // Missing the second 3-bit code: Kraft sum 7/8.
        assert!(matches!(
            HuffmanCodebook::from_lengths(lengths),
            Err(CodecError::InvalidCodebook)
        ));
        lengths[3] = 3;
        assert!(HuffmanCodebook::from_lengths(lengths).is_ok());
        // Oversubscribed: Kraft sum 9/8.
        lengths[4] = 3;
        assert!(matches!(
            HuffmanCodebook::from_lengths(lengths),
            Err(CodecError::InvalidCodebook)
        ));
    }

    #[test]
    fn decode_rejects_blob_with_corrupted_codebook() {
        let mut blob = encode_default(b"abracadabra");
        let mut lengths = *blob.codebook.as_ref().unwrap().lengths();
        lengths[b'z' as usize] = 7;
        blob.codebook = Some(HuffmanCodebook { lengths });
        assert!(matches!(decode(&blob), Err(CodecError::InvalidCodebook)));
    }

    #[test]
    fn codebook_is_prefix_free_and_kraft_exact() {
        let blob = encode_default(b"abracadabra alakazam");
        let book = blob.codebook.as_ref().unwrap();
        assert!(book.kraft_is_exact());
        let codes = book.codes();
        for (i, &(_, code_a, len_a)) in codes.iter().enumerate() {
            for &(_, code_b, len_b) in codes.iter().skip(i + 1) {
                let shorter = len_a.min(len_b) as u32;
                let prefix_a = code_a >> (len_a as u32 - shorter);
                let prefix_b = code_b >> (len_b as u32 - shorter);
                assert_ne!(prefix_a, prefix_b, "codeword is a prefix of another");
            }
        }
    }

    #[test]
    fn matches_exhaustive_optimum_on_small_alphabets() {
        let cases: Vec<Vec<u64>> = vec![
            vec![1, 1],
            vec![5, 1],
            vec![3, 2, 1],
            vec![1, 1, 1, 1],
            vec![8, 3, 2, 1],
            vec![13, 8, 5, 3, 2],
            vec![1, 1, 1, 1, 1],
            vec![100, 1, 1, 1, 1],
            vec![7, 7, 7, 6, 6],
        ];
        for weights in cases {
            let mut input = Vec::new();
            for (sym, &w) in weights.iter().enumerate() {
                input.extend(std::iter::repeat_n(b'a' + sym as u8, w as usize));
            }
            let blob = encode_default(&input);
            let optimal = brute_force_optimal_bits(&weights);
            assert_eq!(
                blob.payload_bits() as u64,
                optimal,
                "weights {weights:?}: payload not optimal"
            );
            assert_eq!(decode(&blob).unwrap(), input);
        }
    }

    #[test]
    fn self_contained_mode_charges_length_table() {
        let cfg = CodecConfig {
            mode: SizeMode::SelfContained,
            ..CodecConfig::default()
        };
        let blob = encode(b"abab", &cfg).unwrap();
        assert_eq!(blob.header_bits, HEADER_BITS);
        assert_eq!(blob.total_bits(), HEADER_BITS + 4);
    }

    fn empirical_entropy(input: &[u8]) -> f64 {
        let mut freq = [0u64; 256];
        for &b in input {
            freq[b as usize] += 1;
        }
        let n = input.len() as f64;
        freq.iter()
            .filter(|&&f| f > 0)
            .map(|&f| {
                let p = f as f64 / n;
                -p * p.log2()
            })
            .sum()
    }

    proptest! {
        #[test]
        fn round_trip(input in prop::collection::vec(any::<u8>(), 1..2048)) {
            let blob = encode_default(&input);
            prop_assert_eq!(decode(&blob).unwrap(), input);
        }

        #[test]
        fn payload_within_entropy_bounds(input in prop::collection::vec(0u8..8, 2..2048)) {
            let distinct = {
                let mut seen = [false; 256];
                input.iter().for_each(|&b| seen[b as usize] = true);
                seen.iter().filter(|&&s| s).count()
            };
            let blob = encode_default(&input);
            let n = input.len() as f64;
            let bits = blob.payload_bits() as f64;
            if distinct == 1 {
                // Degenerate alphabet: one bit per symbol by construction.
                prop_assert_eq!(blob.payload_bits(), input.len());
            } else {
                let h = empirical_entropy(&input);
                prop_assert!(bits >= n * h - 1e-6 * n.max(1.0));
                prop_assert!(bits < n * (h + 1.0));
            }
        }
    }
}
