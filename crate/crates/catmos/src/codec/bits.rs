//! MSB-first bit buffer shared by the codecs.

/// Growable bit string. Bits are packed most-significant-first into bytes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitBuf {
    bytes: Vec<u8>,
    len_bits: usize,
}

impl BitBuf {
    pub fn new() -> Self {
        BitBuf::default()
    }

    pub fn len(&self) -> usize {
        self.len_bits
    }

    pub fn is_empty(&self) -> bool {
        self.len_bits == 0
    }

    /// Number of bytes needed to hold the buffer, partial byte included.
    pub fn byte_len(&self) -> usize {
        self.len_bits.div_ceil(8)
    }

    pub fn push_bit(&mut self, bit: bool) {
        let byte_idx = self.len_bits / 8;
        if byte_idx == self.bytes.len() {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[byte_idx] |= 0x80 >> (self.len_bits % 8);
        }
        self.len_bits += 1;
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        for shift in (0..width).rev() {
            self.push_bit((value >> shift) & 1 == 1);
        }
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        if index >= self.len_bits {
            return None;
        }
        Some(self.bytes[index / 8] & (0x80 >> (index % 8)) != 0)
    }

    /// Drops all bits after the first `len_bits`.
    pub fn truncate(&mut self, len_bits: usize) {
        if len_bits >= self.len_bits {
            return;
        }
        self.len_bits = len_bits;
        self.bytes.truncate(len_bits.div_ceil(8));
        let tail = len_bits % 8;
        if tail != 0 {
            let mask = !(0xffu8 >> tail);
            if let Some(last) = self.bytes.last_mut() {
                *last &= mask;
            }
        }
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { buf: self, pos: 0 }
    }
}

/// Cursor over a [`BitBuf`].
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    buf: &'a BitBuf,
    pos: usize,
}

impl BitReader<'_> {
    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn read_bit(&mut self) -> Option<bool> {
        let bit = self.buf.get(self.pos)?;
        self.pos += 1;
        Some(bit)
    }

    /// Reads `width` bits MSB-first. Returns `None` when fewer remain.
    pub fn read_bits(&mut self, width: u32) -> Option<u64> {
        if self.remaining() < width as usize {
            return None;
        }
        let mut value = 0u64;
        for _ in 0..width {
            value = (value << 1) | self.read_bit()? as u64;
        }
        Some(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn push_and_read_single_bits() {
        let mut buf = BitBuf::new();
        for bit in [true, false, true, true, false, false, false, true, true] {
            buf.push_bit(bit);
        }
        assert_eq!(buf.len(), 9);
        assert_eq!(buf.byte_len(), 2);
        let mut r = buf.reader();
        assert_eq!(r.read_bits(9), Some(0b101100011));
        assert_eq!(r.read_bit(), None);
    }

    #[test]
    fn truncate_clears_tail_bits() {
        let mut buf = BitBuf::new();
        buf.push_bits(0b11_1111_1111, 10);
        buf.truncate(3);
        assert_eq!(buf.len(), 3);
        let mut other = BitBuf::new();
        other.push_bits(0b111, 3);
        assert_eq!(buf, other);
    }

    proptest! {
        #[test]
        fn chunked_round_trip(chunks in prop::collection::vec((any::<u64>(), 1u32..=64), 0..32)) {
            let mut buf = BitBuf::new();
            for &(value, width) in &chunks {
                buf.push_bits(value, width);
            }
            let mut r = buf.reader();
            for &(value, width) in &chunks {
                let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
                prop_assert_eq!(r.read_bits(width), Some(value & mask));
            }
            prop_assert_eq!(r.remaining(), 0);
        }
    }
}
