//! Deflate-style codec: greedy LZ77 over a 32 KiB window followed by the
//! fixed literal/length/distance prefix codes, plus a configurable stream
//! envelope charged against every blob. The envelope models container
//! overhead, which is what makes very short inputs expand.

use std::collections::HashMap;

use super::bits::{BitBuf, BitReader};
use super::{CodecConfig, CodecError, CodecId, CompressedBlob};

pub const WINDOW_SIZE: usize = 32 * 1024;
pub const MIN_MATCH: usize = 3;
pub const MAX_MATCH: usize = 258;
const MAX_CHAIN: usize = 64;
const END_OF_BLOCK: u16 = 256;

/// (base length, extra bits) per length symbol 257..=285.
const LENGTH_TABLE: [(u16, u8); 29] = [
    (3, 0),
    (4, 0),
    (5, 0),
    (6, 0),
    (7, 0),
    (8, 0),
    (9, 0),
    (10, 0),
    (11, 1),
    (13, 1),
    (15, 1),
    (17, 1),
    (19, 2),
    (23, 2),
    (27, 2),
    (31, 2),
    (35, 3),
    (43, 3),
    (51, 3),
    (59, 3),
    (67, 4),
    (83, 4),
    (99, 4),
    (115, 4),
    (131, 5),
    (163, 5),
    (195, 5),
    (227, 5),
    (258, 0),
];

/// (base distance, extra bits) per distance symbol 0..=29.
const DIST_TABLE: [(u16, u8); 30] = [
    (1, 0),
    (2, 0),
    (3, 0),
    (4, 0),
    (5, 1),
    (7, 1),
    (9, 2),
    (13, 2),
    (17, 3),
    (25, 3),
    (33, 4),
    (49, 4),
    (65, 5),
    (97, 5),
    (129, 6),
    (193, 6),
    (257, 7),
    (385, 7),
    (513, 8),
    (769, 8),
    (1025, 9),
    (1537, 9),
    (2049, 10),
    (3073, 10),
    (4097, 11),
    (6145, 11),
    (8193, 12),
    (12289, 12),
    (16385, 13),
    (24577, 13),
];

/// Fixed code for a literal/length symbol.
fn litlen_code(sym: u16) -> (u64, u32) {
    match sym {
        0..=143 => (0x30 + sym as u64, 8),
        144..=255 => (0x190 + (sym - 144) as u64, 9),
        256..=279 => ((sym - 256) as u64, 7),
        280..=287 => (0xc0 + (sym - 280) as u64, 8),
        _ => unreachable!("litlen symbol out of range"),
    }
}

fn read_litlen_symbol(reader: &mut BitReader<'_>) -> Result<u16, CodecError> {
    let mut acc = reader
        .read_bits(7)
        .ok_or(CodecError::TruncatedPayload)?;
    if acc <= 0x17 {
        return Ok(256 + acc as u16);
    }
    acc = (acc << 1) | reader.read_bit().ok_or(CodecError::TruncatedPayload)? as u64;
    if (0x30..=0xbf).contains(&acc) {
        return Ok(acc as u16 - 0x30);
    }
    if (0xc0..=0xc7).contains(&acc) {
        let sym = 280 + (acc as u16 - 0xc0);
        if sym > 285 {
            return Err(CodecError::UnknownCode);
        }
        return Ok(sym);
    }
    acc = (acc << 1) | reader.read_bit().ok_or(CodecError::TruncatedPayload)? as u64;
    if (0x190..=0x1ff).contains(&acc) {
        return Ok(144 + (acc as u16 - 0x190));
    }
    Err(CodecError::UnknownCode)
}

fn symbol_for(table: &[(u16, u8)], value: u16) -> usize {
    // Last entry whose base does not exceed the value.
    match table.binary_search_by_key(&value, |&(base, _)| base) {
        Ok(i) => i,
        Err(i) => i - 1,
    }
}

fn push_length(buf: &mut BitBuf, len: usize) {
    let idx = symbol_for(&LENGTH_TABLE, len as u16);
    let (base, extra) = LENGTH_TABLE[idx];
    let (code, width) = litlen_code(257 + idx as u16);
    buf.push_bits(code, width);
    if extra > 0 {
        buf.push_bits((len as u16 - base) as u64, extra as u32);
    }
}

fn push_distance(buf: &mut BitBuf, dist: usize) {
    let idx = symbol_for(&DIST_TABLE, dist as u16);
    let (base, extra) = DIST_TABLE[idx];
    buf.push_bits(idx as u64, 5);
    if extra > 0 {
        buf.push_bits((dist as u16 - base) as u64, extra as u32);
    }
}

fn hash3(input: &[u8], pos: usize) -> u32 {
    (input[pos] as u32) << 16 | (input[pos + 1] as u32) << 8 | input[pos + 2] as u32
}

fn find_match(
    input: &[u8],
    pos: usize,
    chains: &HashMap<u32, Vec<usize>>,
) -> Option<(usize, usize)> {
    if pos + MIN_MATCH > input.len() {
        return None;
    }
    let candidates = chains.get(&hash3(input, pos))?;
    let window_start = pos.saturating_sub(WINDOW_SIZE);
    let mut best: Option<(usize, usize)> = None;
    for &cand in candidates.iter().rev().take(MAX_CHAIN) {
        if cand < window_start {
            break;
        }
        let limit = MAX_MATCH.min(input.len() - pos);
        let mut len = 0;
        while len < limit && input[cand + len] == input[pos + len] {
            len += 1;
        }
        if len >= MIN_MATCH && best.is_none_or(|(blen, _)| len > blen) {
            best = Some((len, pos - cand));
            if len == MAX_MATCH {
                break;
            }
        }
    }
    best
}

pub fn encode(input: &[u8], cfg: &CodecConfig) -> Result<CompressedBlob, CodecError> {
    if input.is_empty() {
        return Err(CodecError::EmptyInput);
    }
    let mut payload = BitBuf::new();
    // Single fixed-code block: final flag plus block type.
    payload.push_bit(true);
    payload.push_bits(0b01, 2);

    let mut chains: HashMap<u32, Vec<usize>> = HashMap::new();
    let mut pos = 0;
    while pos < input.len() {
        match find_match(input, pos, &chains) {
            Some((len, dist)) => {
                push_length(&mut payload, len);
                push_distance(&mut payload, dist);
                let end = pos + len;
                while pos < end {
                    if pos + MIN_MATCH <= input.len() {
                        chains.entry(hash3(input, pos)).or_default().push(pos);
                    }
                    pos += 1;
                }
            }
            None => {
                let (code, width) = litlen_code(input[pos] as u16);
                payload.push_bits(code, width);
                if pos + MIN_MATCH <= input.len() {
                    chains.entry(hash3(input, pos)).or_default().push(pos);
                }
                pos += 1;
            }
        }
    }
    let (code, width) = litlen_code(END_OF_BLOCK);
    payload.push_bits(code, width);

    Ok(CompressedBlob {
        codec: CodecId::Deflate,
        payload,
        original_bytes: input.len(),
        header_bits: cfg.deflate_envelope_bytes * 8,
        codebook: None,
    })
}

pub fn decode(blob: &CompressedBlob) -> Result<Vec<u8>, CodecError> {
    let mut reader = blob.payload.reader();
    let bfinal = reader.read_bit().ok_or(CodecError::TruncatedPayload)?;
    let btype = reader.read_bits(2).ok_or(CodecError::TruncatedPayload)?;
    if !bfinal || btype != 0b01 {
        return Err(CodecError::UnknownCode);
    }
    let mut out = Vec::with_capacity(blob.original_bytes);
    loop {
        let sym = read_litlen_symbol(&mut reader)?;
        match sym {
            0..=255 => out.push(sym as u8),
            END_OF_BLOCK => break,
            _ => {
                let (base, extra) = LENGTH_TABLE[(sym - 257) as usize];
                let len = base as usize
                    + reader
                        .read_bits(extra as u32)
                        .ok_or(CodecError::TruncatedPayload)? as usize;
                let dist_sym = reader
                    .read_bits(5)
                    .ok_or(CodecError::TruncatedPayload)? as usize;
                if dist_sym >= DIST_TABLE.len() {
                    return Err(CodecError::UnknownCode);
                }
                let (dbase, dextra) = DIST_TABLE[dist_sym];
                let dist = dbase as usize
                    + reader
                        .read_bits(dextra as u32)
                        .ok_or(CodecError::TruncatedPayload)? as usize;
                if dist == 0 || dist > out.len() {
                    return Err(CodecError::InvalidDistance {
                        distance: dist,
                        produced: out.len(),
                    });
                }
                let start = out.len() - dist;
                for i in 0..len {
                    let b = out[start + i];
                    out.push(b);
                }
            }
        }
    }
    if out.len() != blob.original_bytes {
        return Err(CodecError::TruncatedPayload);
    }
    Ok(out)
}
