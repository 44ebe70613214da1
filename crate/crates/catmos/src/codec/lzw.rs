//! LZW dictionary coding with variable-width codes.
//!
//! The dictionary starts with every single byte (codes 0-255) and grows by
//! one entry per emitted code. Code width starts at 9 bits, widens by one
//! whenever the dictionary reaches the current width's capacity, and
//! freezes at 16 bits. The decoder rebuilds the identical dictionary from
//! the code stream alone, including the classic corner case of a code that
//! references the entry currently being defined.

use super::bits::BitBuf;
use super::{CodecConfig, CodecError, CodecId, CompressedBlob};

pub const MAX_WIDTH: u32 = 16;

fn initial_width(alphabet_len: usize) -> u32 {
    let mut width = 1;
    while (1usize << width) < alphabet_len {
        width += 1;
    }
    width + 1
}

/// Encodes over a restricted alphabet; `alphabet[i]` is assigned code `i`.
/// Every input byte must appear in the alphabet.
pub fn encode_codes_with_alphabet(
    input: &[u8],
    alphabet: &[u8],
) -> Result<Vec<u32>, CodecError> {
    if input.is_empty() {
        return Err(CodecError::EmptyInput);
    }
    let mut base = [u32::MAX; 256];
    for (code, &b) in alphabet.iter().enumerate() {
        base[b as usize] = code as u32;
    }
    let mut dict: std::collections::HashMap<Vec<u8>, u32> = std::collections::HashMap::new();
    let mut next_code = alphabet.len() as u32;
    let cap = 1u32 << MAX_WIDTH;

    let mut codes = Vec::new();
    let mut current: Vec<u8> = Vec::new();
    for &b in input {
        if base[b as usize] == u32::MAX {
            return Err(CodecError::SymbolOutsideAlphabet(b));
        }
        current.push(b);
        let known = if current.len() == 1 {
            true
        } else {
            dict.contains_key(&current)
        };
        if !known {
            let last = current.pop().unwrap();
            codes.push(lookup(&dict, &base, &current));
            if next_code < cap {
                current.push(last);
                dict.insert(std::mem::take(&mut current), next_code);
                next_code += 1;
            } else {
                current.clear();
            }
            current.push(last);
        }
    }
    codes.push(lookup(&dict, &base, &current));
    Ok(codes)
}

fn lookup(dict: &std::collections::HashMap<Vec<u8>, u32>, base: &[u32; 256], seq: &[u8]) -> u32 {
    if seq.len() == 1 {
        base[seq[0] as usize]
    } else {
        dict[seq]
    }
}

/// Inverts [`encode_codes_with_alphabet`].
pub fn decode_codes_with_alphabet(
    codes: &[u32],
    alphabet: &[u8],
) -> Result<Vec<u8>, CodecError> {
    if codes.is_empty() {
        return Err(CodecError::EmptyInput);
    }
    let mut dict: Vec<Vec<u8>> = alphabet.iter().map(|&b| vec![b]).collect();
    let cap = 1usize << MAX_WIDTH;

    let first = codes[0] as usize;
    if first >= alphabet.len() {
        return Err(CodecError::CodeBeyondDictionary(codes[0]));
    }
    let mut out = dict[first].clone();
    let mut prev = dict[first].clone();
    for &code in &codes[1..] {
        let entry = match dict.get(code as usize) {
            Some(entry) => entry.clone(),
            None if code as usize == dict.len() => {
                // Code for the entry being defined: prev + first byte of prev.
                let mut entry = prev.clone();
                entry.push(prev[0]);
                entry
            }
            None => return Err(CodecError::CodeBeyondDictionary(code)),
        };
        out.extend_from_slice(&entry);
        if dict.len() < cap {
            let mut grown = prev;
            grown.push(entry[0]);
            dict.push(grown);
        }
        prev = entry;
    }
    Ok(out)
}

const FULL_ALPHABET: [u8; 256] = {
    let mut a = [0u8; 256];
    let mut i = 0;
    while i < 256 {
        a[i] = i as u8;
        i += 1;
    }
    a
};

pub fn encode(input: &[u8], _cfg: &CodecConfig) -> Result<CompressedBlob, CodecError> {
    let codes = encode_codes_with_alphabet(input, &FULL_ALPHABET)?;
    let payload = pack_codes(&codes, 256);
    Ok(CompressedBlob {
        codec: CodecId::Lzw,
        payload,
        original_bytes: input.len(),
        header_bits: 0,
        codebook: None,
    })
}

pub fn decode(blob: &CompressedBlob) -> Result<Vec<u8>, CodecError> {
    let codes = unpack_codes(&blob.payload, 256)?;
    let out = decode_codes_with_alphabet(&codes, &FULL_ALPHABET)?;
    if out.len() != blob.original_bytes {
        return Err(CodecError::TruncatedPayload);
    }
    Ok(out)
}

/// Packs codes at the width the decoder will expect at each position: the
/// encoder's dictionary has grown by one entry per previously emitted code.
pub fn pack_codes(codes: &[u32], alphabet_len: usize) -> BitBuf {
    let mut buf = BitBuf::new();
    let mut width = initial_width(alphabet_len);
    let mut next_code = alphabet_len as u32;
    let cap = 1u32 << MAX_WIDTH;
    for &code in codes {
        buf.push_bits(code as u64, width);
        if next_code < cap {
            next_code += 1;
            if next_code == 1 << width && width < MAX_WIDTH {
                width += 1;
            }
        }
    }
    buf
}

/// Inverts [`pack_codes`], advancing the width on the same schedule.
pub fn unpack_codes(buf: &BitBuf, alphabet_len: usize) -> Result<Vec<u32>, CodecError> {
    let mut reader = buf.reader();
    let mut width = initial_width(alphabet_len);
    let mut next_code = alphabet_len as u32;
    let cap = 1u32 << MAX_WIDTH;
    let mut codes = Vec::new();
    while reader.remaining() != 0 {
        let code = reader
            .read_bits(width)
            .ok_or(CodecError::TruncatedPayload)?;
        codes.push(code as u32);
        if next_code < cap {
            next_code += 1;
            if next_code == 1 << width && width < MAX_WIDTH {
                width += 1;
            }
        }
    }
    Ok(codes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_trace_over_two_symbol_alphabet() {
        // Hand trace: A, B, AB, ABA get emitted as the dictionary grows.
        let codes = encode_codes_with_alphabet(b"ABABABA", b"AB").unwrap();
        assert_eq!(codes, vec![0, 1, 2, 4]);
        let back = decode_codes_with_alphabet(&codes, b"AB").unwrap();
        assert_eq!(back, b"ABABABA");
    }

    #[test]
    fn code_referencing_entry_being_built_round_trips() {
        let codes = encode_codes_with_alphabet(b"AAAA", b"A").unwrap();
        // Emits A, then the just-defined AA, then A again.
        assert_eq!(codes, vec![0, 1, 0]);
        assert_eq!(decode_codes_with_alphabet(&codes, b"A").unwrap(), b"AAAA");

        let long_run = vec![b'x'; 257];
        let blob = encode(&long_run, &super::super::CodecConfig::default()).unwrap();
        assert_eq!(decode(&blob).unwrap(), long_run);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(
            encode(b"", &super::super::CodecConfig::default()),
            Err(CodecError::EmptyInput)
        ));
    }

    #[test]
    fn code_beyond_dictionary_frontier_is_an_error() {
        // After [0], the dictionary holds A, B and is defining entry 2;
        // code 3 is past the frontier.
        assert!(matches!(
            decode_codes_with_alphabet(&[0, 3], b"AB"),
            Err(CodecError::CodeBeyondDictionary(3))
        ));
        assert!(matches!(
            decode_codes_with_alphabet(&[5], b"AB"),
            Err(CodecError::CodeBeyondDictionary(5))
        ));
    }

    #[test]
    fn encoder_and_decoder_dictionaries_stay_in_step_across_width_growth() {
        // 600 distinct two-byte pairs force the dictionary past 512 entries
        // and the code width from 9 to 10 bits.
        let mut input = Vec::new();
        for i in 0..600u32 {
            input.push((i % 251) as u8);
            input.push((i / 251 * 7 + 13) as u8);
        }
        let blob = encode(&input, &super::super::CodecConfig::default()).unwrap();
        assert_eq!(decode(&blob).unwrap(), input);
    }

    #[test]
    fn single_byte_payload_is_nine_bits() {
        let blob = encode(b"Q", &super::super::CodecConfig::default()).unwrap();
        assert_eq!(blob.payload_bits(), 9);
        assert_eq!(blob.header_bits, 0);
        assert_eq!(decode(&blob).unwrap(), b"Q");
    }

    proptest! {
        #[test]
        fn round_trip(input in prop::collection::vec(any::<u8>(), 1..2048)) {
            let blob = encode(&input, &super::super::CodecConfig::default()).unwrap();
            prop_assert_eq!(decode(&blob).unwrap(), input);
        }

        #[test]
        fn repetitive_round_trip(byte in any::<u8>(), n in 1usize..4096) {
            let input = vec![byte; n];
            let blob = encode(&input, &super::super::CodecConfig::default()).unwrap();
            prop_assert_eq!(decode(&blob).unwrap(), input);
        }
    }
}
