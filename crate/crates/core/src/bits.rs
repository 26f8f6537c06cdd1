//! MSB-first bit packing for the codeword stream.

use crate::error::{Error, Result};

/// A packed bit sequence, most-significant-bit-first within each byte.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bitstream {
    bytes: Vec<u8>,
    bit_len: u64,
}

impl Bitstream {
    /// Rebuild a bitstream from stored parts, checking that the byte count
    /// is exactly what `bit_len` requires and that pad bits are zero-free
    /// territory we can ignore.
    pub fn from_parts(bytes: Vec<u8>, bit_len: u64) -> Result<Self> {
        let want = bit_len.div_ceil(8);
        if bytes.len() as u64 != want {
            return Err(Error::MalformedHeader(format!(
                "bitstream declares {bit_len} bits but holds {} bytes",
                bytes.len()
            )));
        }
        Ok(Bitstream { bytes, bit_len })
    }

    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    pub fn is_empty(&self) -> bool {
        self.bit_len == 0
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader {
            data: &self.bytes,
            pos: 0,
            len: self.bit_len,
        }
    }

    /// Render as "0"/"1" text, for tests against worked examples.
    pub fn to_bit_string(&self) -> String {
        let mut s = String::with_capacity(self.bit_len as usize);
        let mut r = self.reader();
        for _ in 0..self.bit_len {
            s.push(if r.read_bits(1).unwrap() == 1 { '1' } else { '0' });
        }
        s
    }
}

/// Accumulates bits MSB-first into a byte buffer.
#[derive(Debug, Default)]
pub struct BitWriter {
    buf: Vec<u8>,
    cur: u8,
    filled: u8,
    bit_len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append the low `count` bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u32, count: u8) {
        debug_assert!(count <= 32);
        debug_assert!(count == 32 || value < (1u32 << count));
        for i in (0..count).rev() {
            let bit = ((value >> i) & 1) as u8;
            self.cur = (self.cur << 1) | bit;
            self.filled += 1;
            if self.filled == 8 {
                self.buf.push(self.cur);
                self.cur = 0;
                self.filled = 0;
            }
        }
        self.bit_len += count as u64;
    }

    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    /// Flush the final partial byte (zero-padded on the right) and return
    /// the packed stream.
    pub fn finish(mut self) -> Bitstream {
        if self.filled > 0 {
            self.buf.push(self.cur << (8 - self.filled));
        }
        Bitstream {
            bytes: self.buf,
            bit_len: self.bit_len,
        }
    }
}

/// Sequential MSB-first reader over a packed bit sequence.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: u64,
    len: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        BitReader {
            data,
            pos: 0,
            len: data.len() as u64 * 8,
        }
    }

    pub fn remaining(&self) -> u64 {
        self.len - self.pos
    }

    /// Read `count` bits as an unsigned value, MSB first.
    pub fn read_bits(&mut self, count: u8) -> Result<u32> {
        debug_assert!(count <= 32);
        if self.remaining() < count as u64 {
            return Err(Error::TruncatedStream(format!(
                "wanted {count} bits, {} left",
                self.remaining()
            )));
        }
        let mut value = 0u32;
        for _ in 0..count {
            let byte = self.data[(self.pos / 8) as usize];
            let bit = (byte >> (7 - (self.pos % 8))) & 1;
            value = (value << 1) | bit as u32;
            self.pos += 1;
        }
        Ok(value)
    }
}
