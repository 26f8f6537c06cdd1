//! The non-prefix-free codebook: frequency-ordered symbols mapped to
//! minimal-binary-representation codewords, plus translation between byte
//! sequences and the raw codeword bitstream.
//!
//! Codewords are `MBR(rank + 1)` for 1-based ranks, giving the set
//! `{0, 1, 00, 01, 10, 11, 000, ...}`. The set is not prefix-free, so the
//! bitstream alone is not decodable; callers supply each codeword's length.

use crate::bits::{BitReader, BitWriter, Bitstream};
use crate::error::{Error, Result};

/// Minimal binary representation of `i >= 2`: the binary form of `i` with
/// its leading 1 bit removed. Returns `(bits, length)`.
pub fn mbr(i: u64) -> (u32, u8) {
    assert!(i >= 2, "mbr is defined for integers >= 2");
    let len = 63 - i.leading_zeros() as u8;
    let bits = (i - (1u64 << len)) as u32;
    (bits, len)
}

/// Frequency-ordered symbol to NPF-codeword mapping.
///
/// Rank 0 is the most frequent symbol; ties are broken by ascending byte
/// value so a codebook is a pure function of the frequency table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    symbols: Vec<u8>,
    rank_of: [u16; 256],
    code_bits: Vec<u32>,
    code_len: Vec<u8>,
    k: u8,
}

const NO_RANK: u16 = u16::MAX;

impl Codebook {
    /// Build from per-byte occurrence counts; symbols with zero count are
    /// not part of the alphabet.
    pub fn from_frequencies(freqs: &[u64; 256]) -> Result<Self> {
        let mut present: Vec<u8> = (0u16..256)
            .filter(|&b| freqs[b as usize] > 0)
            .map(|b| b as u8)
            .collect();
        if present.is_empty() {
            return Err(Error::EmptyInput);
        }
        present.sort_by(|&a, &b| {
            freqs[b as usize]
                .cmp(&freqs[a as usize])
                .then(a.cmp(&b))
        });
        Ok(Self::from_ranked(present))
    }

    /// Count frequencies of `data` and build the codebook over them.
    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        Self::from_frequencies(&byte_frequencies(data))
    }

    /// Build from an explicit rank order (most frequent first), as stored
    /// in a container header. Symbols must be distinct.
    pub fn from_ordered_symbols(symbols: &[u8]) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut seen = [false; 256];
        for &s in symbols {
            if seen[s as usize] {
                return Err(Error::MalformedHeader(format!(
                    "alphabet repeats symbol {s:#04x}"
                )));
            }
            seen[s as usize] = true;
        }
        Ok(Self::from_ranked(symbols.to_vec()))
    }

    fn from_ranked(symbols: Vec<u8>) -> Self {
        let sigma = symbols.len();
        let mut rank_of = [NO_RANK; 256];
        let mut code_bits = Vec::with_capacity(sigma);
        let mut code_len = Vec::with_capacity(sigma);
        for (rank, &sym) in symbols.iter().enumerate() {
            rank_of[sym as usize] = rank as u16;
            let (bits, len) = mbr(rank as u64 + 2);
            code_bits.push(bits);
            code_len.push(len);
        }
        let k = (usize::BITS - 1 - (sigma + 1).leading_zeros()) as u8;
        debug_assert_eq!(k, *code_len.last().unwrap());
        Codebook {
            symbols,
            rank_of,
            code_bits,
            code_len,
            k,
        }
    }

    /// Alphabet size sigma.
    pub fn sigma(&self) -> usize {
        self.symbols.len()
    }

    /// Maximum codeword length `k = floor(log2(sigma + 1))`.
    pub fn max_len(&self) -> u8 {
        self.k
    }

    /// Symbols in rank order (most frequent first).
    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn code_len(&self, rank: usize) -> u8 {
        self.code_len[rank]
    }

    pub fn code_bits(&self, rank: usize) -> u32 {
        self.code_bits[rank]
    }

    /// 0-based rank of a byte, if it is in the alphabet.
    pub fn rank_of(&self, byte: u8) -> Option<usize> {
        match self.rank_of[byte as usize] {
            NO_RANK => None,
            r => Some(r as usize),
        }
    }

    /// Replace every input byte with its codeword. Returns the packed
    /// bitstream and the per-symbol codeword lengths.
    ///
    /// Every byte of `data` must be in the alphabet.
    pub fn encode_symbols(&self, data: &[u8]) -> (Bitstream, Vec<u8>) {
        let mut writer = BitWriter::new();
        let mut lengths = Vec::with_capacity(data.len());
        for &byte in data {
            let rank = self
                .rank_of(byte)
                .unwrap_or_else(|| panic!("symbol {byte:#04x} not in codebook"));
            writer.write_bits(self.code_bits[rank], self.code_len[rank]);
            lengths.push(self.code_len[rank]);
        }
        (writer.finish(), lengths)
    }

    /// Read one codeword of the given length from the stream and map it
    /// back to its symbol.
    pub fn decode_next(&self, reader: &mut BitReader<'_>, length: u8) -> Result<u8> {
        debug_assert!(length >= 1 && length <= self.k);
        let value = reader.read_bits(length)?;
        // Codeword b of length l is rank (2^l + b) - 1, 1-based.
        let rank = (1usize << length) + value as usize - 2;
        if rank >= self.symbols.len() {
            return Err(Error::CorruptStream(format!(
                "codeword rank {} exceeds alphabet size {}",
                rank + 1,
                self.symbols.len()
            )));
        }
        Ok(self.symbols[rank])
    }

    /// Exact bit size of the codeword stream for the given frequencies:
    /// the sum of each rank's codeword length times its occurrence count.
    pub fn size_bits(&self, freqs: &[u64; 256]) -> u64 {
        self.symbols
            .iter()
            .enumerate()
            .map(|(rank, &sym)| self.code_len[rank] as u64 * freqs[sym as usize])
            .sum()
    }
}

/// Per-byte occurrence counts.
pub fn byte_frequencies(data: &[u8]) -> [u64; 256] {
    let mut freqs = [0u64; 256];
    for &b in data {
        freqs[b as usize] += 1;
    }
    freqs
}

#[cfg(test)]
mod tests {
    use super::*;

    // The Figure 1 assignment: E,R,F,N,I,O,P,X in that order.
    fn figure1() -> Codebook {
        Codebook::from_ordered_symbols(b"ERFNIOPX").unwrap()
    }

    #[test]
    fn mbr_worked_examples() {
        assert_eq!(mbr(13), (0b101, 3));
        assert_eq!(mbr(2), (0b0, 1));
        assert_eq!(mbr(9), (0b001, 3));
        assert_eq!(mbr(3), (0b1, 1));
        assert_eq!(mbr(4), (0b00, 2));
    }

    #[test]
    #[should_panic(expected = "mbr is defined")]
    fn mbr_rejects_one() {
        mbr(1);
    }

    #[test]
    fn codeword_set_prefix() {
        // W = {0, 1, 00, 01, 10, 11, 000, 001, ...}
        let cb = Codebook::from_ordered_symbols(&[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        let words: Vec<(u32, u8)> = (0..8).map(|r| (cb.code_bits(r), cb.code_len(r))).collect();
        assert_eq!(
            words,
            vec![
                (0b0, 1),
                (0b1, 1),
                (0b00, 2),
                (0b01, 2),
                (0b10, 2),
                (0b11, 2),
                (0b000, 3),
                (0b001, 3),
            ]
        );
        assert_eq!(cb.max_len(), 3);
    }

    #[test]
    fn frequency_order_and_tie_break() {
        let freqs = byte_frequencies(b"NONPREFIXFREE");
        let cb = Codebook::from_frequencies(&freqs).unwrap();
        assert_eq!(cb.sigma(), 8);
        assert_eq!(cb.max_len(), 3);
        // E leads with count 3; the count-2 group F,N,R ties break by byte.
        assert_eq!(cb.symbols(), b"EFNRIOPX");
    }

    #[test]
    fn k_for_sigma() {
        // k = floor(log2(sigma+1)) = ceil(log2(sigma+2)) - 1.
        for sigma in 1usize..=256 {
            let symbols: Vec<u8> = (0..sigma).map(|i| i as u8).collect();
            let cb = Codebook::from_ordered_symbols(&symbols).unwrap();
            let floor_form = (usize::BITS - 1 - (sigma + 1).leading_zeros()) as u8;
            let ceil_log2 = (sigma + 2).next_power_of_two().trailing_zeros() as u8;
            assert_eq!(cb.max_len(), floor_form, "sigma={sigma}");
            assert_eq!(cb.max_len(), ceil_log2 - 1, "sigma={sigma}");
        }
        let cb = Codebook::from_ordered_symbols(&[1, 2, 3, 4, 5]).unwrap();
        assert_eq!(cb.max_len(), 2);
    }

    #[test]
    fn single_symbol_alphabet() {
        let cb = Codebook::from_bytes(b"AAAA").unwrap();
        assert_eq!(cb.sigma(), 1);
        assert_eq!(cb.max_len(), 1);
        assert_eq!((cb.code_bits(0), cb.code_len(0)), (0b0, 1));
        let (bits, lens) = cb.encode_symbols(b"AAAA");
        assert_eq!(bits.bit_len(), 4);
        assert_eq!(lens, vec![1, 1, 1, 1]);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(Codebook::from_bytes(b""), Err(Error::EmptyInput)));
    }

    #[test]
    fn figure1_golden_bitstream() {
        let cb = figure1();
        let (bits, lengths) = cb.encode_symbols(b"NONPREFIXFREE");
        assert_eq!(bits.to_bit_string(), "01110100010001000100100");
        assert_eq!(bits.bit_len(), 23);
        assert_eq!(lengths, vec![2, 2, 2, 3, 1, 1, 2, 2, 3, 2, 1, 1, 1]);
    }

    #[test]
    fn encode_simple_cases() {
        let cb = figure1();
        let (bits, lens) = cb.encode_symbols(b"EE");
        assert_eq!(bits.to_bit_string(), "00");
        assert_eq!(lens, vec![1, 1]);
        let (bits, lens) = cb.encode_symbols(b"XX");
        assert_eq!(bits.to_bit_string(), "001001");
        assert_eq!(lens, vec![3, 3]);
    }

    #[test]
    fn decode_next_maps_codewords_back() {
        let cb = figure1();
        let (bits, lengths) = cb.encode_symbols(b"NONPREFIXFREE");
        let mut reader = bits.reader();
        let mut decoded = Vec::new();
        for &len in &lengths {
            decoded.push(cb.decode_next(&mut reader, len).unwrap());
        }
        assert_eq!(decoded, b"NONPREFIXFREE");
    }

    #[test]
    fn decode_next_detects_bad_rank() {
        let cb = figure1();
        let mut w = BitWriter::new();
        w.write_bits(0b111, 3);
        let bits = w.finish();
        let mut reader = bits.reader();
        // Rank 2^3 + 7 - 1 = 14 > sigma = 8.
        assert!(matches!(
            cb.decode_next(&mut reader, 3),
            Err(Error::CorruptStream(_))
        ));
    }

    #[test]
    fn decode_next_detects_truncation() {
        let cb = figure1();
        let mut w = BitWriter::new();
        w.write_bits(0b0, 1);
        let bits = w.finish();
        let mut reader = bits.reader();
        assert_eq!(cb.decode_next(&mut reader, 1).unwrap(), b'E');
        assert!(matches!(
            cb.decode_next(&mut reader, 2),
            Err(Error::TruncatedStream(_))
        ));
    }

    #[test]
    fn size_bits_matches_stream() {
        let freqs = byte_frequencies(b"NONPREFIXFREE");
        let cb = Codebook::from_frequencies(&freqs).unwrap();
        let (bits, _) = cb.encode_symbols(b"NONPREFIXFREE");
        assert_eq!(cb.size_bits(&freqs), 23);
        assert_eq!(bits.bit_len(), 23);

        // Uniform 8 symbols, one occurrence each: 1+1+2+2+2+2+3+3.
        let data: Vec<u8> = (0..8).collect();
        let freqs = byte_frequencies(&data);
        let cb = Codebook::from_frequencies(&freqs).unwrap();
        assert_eq!(cb.size_bits(&freqs), 16);

        let freqs = byte_frequencies(b"zzzz");
        let cb = Codebook::from_frequencies(&freqs).unwrap();
        assert_eq!(cb.size_bits(&freqs), 4);
    }

    #[test]
    fn kraft_inequality_is_violated() {
        for sigma in 3usize..=256 {
            let symbols: Vec<u8> = (0..sigma).map(|i| i as u8).collect();
            let cb = Codebook::from_ordered_symbols(&symbols).unwrap();
            let kraft: f64 = (0..sigma).map(|r| 0.5f64.powi(cb.code_len(r) as i32)).sum();
            assert!(kraft > 1.0, "sigma={sigma} kraft={kraft}");
        }
    }

    #[test]
    fn per_length_census() {
        for sigma in 1usize..=256 {
            let symbols: Vec<u8> = (0..sigma).map(|i| i as u8).collect();
            let cb = Codebook::from_ordered_symbols(&symbols).unwrap();
            let mut census = vec![0usize; cb.max_len() as usize + 1];
            for r in 0..sigma {
                census[cb.code_len(r) as usize] += 1;
            }
            for (len, &got) in census.iter().enumerate().skip(1) {
                let expect = (1usize << len).min(sigma.saturating_sub((1 << len) - 2));
                assert_eq!(got, expect, "sigma={sigma} len={len}");
            }
        }
    }

    #[test]
    fn code_lengths_non_decreasing() {
        let symbols: Vec<u8> = (0..=255).collect();
        let cb = Codebook::from_ordered_symbols(&symbols).unwrap();
        for r in 1..256 {
            assert!(cb.code_len(r) >= cb.code_len(r - 1));
        }
        assert_eq!(cb.max_len(), 8);
    }
}
