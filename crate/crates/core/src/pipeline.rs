//! The end-to-end codec: block the input into runs of `d` symbols, emit
//! the raw codeword stream plus enumeratively coded boundary tuples, and
//! invert it.
//!
//! Per block the boundary information is the tuple `(p, q)`: `p` is the
//! summed bit length of the block's codewords, `q` the 0-based
//! lexicographic rank of the length vector among all vectors with that
//! sum. `p` is coded with one adaptive model; `q` is coded under a model
//! selected by `p`, and is skipped entirely when `p = d` or `p = k*d`
//! because a single vector remains.

use crate::bits::BitWriter;
use crate::codebook::{byte_frequencies, Codebook};
use crate::container::Container;
use crate::entropy::{AdaptiveModel, RangeDecoder, RangeEncoder, MAX_TOTAL};
use crate::enumeration::PsiTable;
use crate::error::{Error, Result};

/// One block's boundary tuple. `q` is `None` for the two sums that admit
/// only one vector and therefore never reach the Qstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockTuple {
    pub p: u32,
    pub q: Option<u64>,
}

fn check_d(d: u8) -> Result<()> {
    if !(1..=16).contains(&d) {
        return Err(Error::InvalidParameter(format!(
            "block size d must be in [1..16], got {d}"
        )));
    }
    Ok(())
}

/// Walk the input in blocks of `d`, padding the tail with the most
/// frequent symbol, and hand each block's ranks/lengths/sum to `f`.
fn for_each_block(
    input: &[u8],
    cb: &Codebook,
    d: u8,
    mut f: impl FnMut(&[usize], &[u8], u32),
) {
    let du = d as usize;
    let blocks = input.len().div_ceil(du);
    let mut ranks = [0usize; 16];
    let mut lens = [0u8; 16];
    for block in 0..blocks {
        let start = block * du;
        let mut sum = 0u32;
        for j in 0..du {
            let rank = match input.get(start + j) {
                Some(&byte) => cb
                    .rank_of(byte)
                    .unwrap_or_else(|| panic!("symbol {byte:#04x} not in codebook")),
                None => 0, // pad with the most frequent symbol
            };
            ranks[j] = rank;
            lens[j] = cb.code_len(rank);
            sum += lens[j] as u32;
        }
        f(&ranks[..du], &lens[..du], sum);
    }
}

/// Compress `input` with block size `d`.
pub fn encode(input: &[u8], d: u8) -> Result<Container> {
    check_d(d)?;
    if input.is_empty() {
        return Container::new(
            0,
            d,
            Vec::new(),
            BitWriter::new().finish(),
            Vec::new(),
            Vec::new(),
        );
    }

    let freqs = byte_frequencies(input);
    let cb = Codebook::from_frequencies(&freqs)?;
    let k = cb.max_len();
    let table = PsiTable::new(k, d)?;
    let kd = k as u32 * d as u32;
    let p_alphabet = (kd - d as u32 + 1) as usize;

    let mut codewords = BitWriter::new();
    let mut p_enc = RangeEncoder::new();
    let mut p_model = AdaptiveModel::new(p_alphabet);
    let mut q_enc = RangeEncoder::new();
    let mut q_models: Vec<Option<AdaptiveModel>> = vec![None; p_alphabet];
    let mut q_coded = 0u64;

    for_each_block(input, &cb, d, |ranks, lens, p| {
        for (&rank, &len) in ranks.iter().zip(lens) {
            codewords.write_bits(cb.code_bits(rank), len);
        }
        p_enc.encode(&mut p_model, (p - d as u32) as usize);
        if p != d as u32 && p != kd {
            let q = table.rank(lens);
            encode_rank(&mut q_enc, &mut q_models, &table, d, p, q);
            q_coded += 1;
        }
    });

    Container::new(
        input.len() as u64,
        d,
        cb.symbols().to_vec(),
        codewords.finish(),
        p_enc.finish(),
        if q_coded > 0 { q_enc.finish() } else { Vec::new() },
    )
}

/// Decompress a container back to the original bytes.
pub fn decode(container: &Container) -> Result<Vec<u8>> {
    if container.n() == 0 {
        return Ok(Vec::new());
    }
    let cb = Codebook::from_ordered_symbols(container.alphabet())?;
    let k = cb.max_len();
    let d = container.d();
    let du = d as usize;
    let table = PsiTable::new(k, d)?;
    let kd = k as u32 * d as u32;
    let p_alphabet = (kd - d as u32 + 1) as usize;

    let blocks = container.n().div_ceil(d as u64);
    let mut reader = container.codeword_stream().reader();
    let mut p_dec = RangeDecoder::new(container.pstream())?;
    let mut p_model = AdaptiveModel::new(p_alphabet);
    // The Qstream decoder exists only once a block actually needs a rank.
    let mut q_dec: Option<RangeDecoder> = None;
    let mut q_models: Vec<Option<AdaptiveModel>> = vec![None; p_alphabet];

    // Capacity capped by the codeword stream: a corrupted header cannot
    // force a huge allocation up front.
    let padded = blocks.saturating_mul(d as u64);
    let cap = padded.min(container.codeword_stream().bit_len() + d as u64);
    let mut out = Vec::with_capacity(cap as usize);
    let mut lens = [0u8; 16];

    for _ in 0..blocks {
        let p = d as u32 + p_dec.decode(&mut p_model)? as u32;
        if p == d as u32 {
            lens[..du].fill(1);
        } else if p == kd {
            lens[..du].fill(k);
        } else {
            if q_dec.is_none() {
                q_dec = Some(RangeDecoder::new(container.qstream())?);
            }
            let q = decode_rank(q_dec.as_mut().unwrap(), &mut q_models, &table, d, p)?;
            table.unrank_into(p, q, &mut lens[..du])?;
        }
        for &len in &lens[..du] {
            out.push(cb.decode_next(&mut reader, len)?);
        }
    }
    out.truncate(container.n() as usize);
    Ok(out)
}

/// Rank contexts small enough for an adaptive model get one, lazily, per
/// distinct `p`. Larger contexts fall back to coding the rank as uniform
/// base-2^16 digits; those sums are effectively unreachable below d=8 and
/// carry near-uniform ranks anyway.
fn encode_rank(
    enc: &mut RangeEncoder,
    models: &mut [Option<AdaptiveModel>],
    table: &PsiTable,
    d: u8,
    p: u32,
    q: u64,
) {
    let count = table.count(d, p);
    debug_assert!(q < count);
    if count <= MAX_TOTAL as u64 {
        let slot = (p - d as u32) as usize;
        let model = models[slot].get_or_insert_with(|| AdaptiveModel::new(count as usize));
        enc.encode(model, q as usize);
    } else {
        let digits = rank_digits(count);
        let top_total = (((count - 1) >> (16 * (digits - 1))) + 1) as u32;
        enc.encode_uniform((q >> (16 * (digits - 1))) as u32, top_total);
        for i in (0..digits - 1).rev() {
            enc.encode_uniform(((q >> (16 * i)) & 0xFFFF) as u32, 1 << 16);
        }
    }
}

fn decode_rank(
    dec: &mut RangeDecoder,
    models: &mut [Option<AdaptiveModel>],
    table: &PsiTable,
    d: u8,
    p: u32,
) -> Result<u64> {
    let count = table.count(d, p);
    debug_assert!(count >= 1);
    if count <= MAX_TOTAL as u64 {
        let slot = (p - d as u32) as usize;
        let model = models[slot].get_or_insert_with(|| AdaptiveModel::new(count as usize));
        Ok(dec.decode(model)? as u64)
    } else {
        let digits = rank_digits(count);
        let top_total = (((count - 1) >> (16 * (digits - 1))) + 1) as u32;
        let mut q = dec.decode_uniform(top_total)? as u64;
        for _ in 0..digits - 1 {
            q = (q << 16) | dec.decode_uniform(1 << 16)? as u64;
        }
        Ok(q)
    }
}

/// Number of base-2^16 digits needed for values in `[0, count)`.
fn rank_digits(count: u64) -> u32 {
    let mut digits = 1;
    let mut top = (count - 1) >> 16;
    while top > 0 {
        digits += 1;
        top >>= 16;
    }
    digits
}

/// The boundary tuples `(p, q)` the encoder would emit for this input,
/// for distribution statistics.
pub fn block_tuples(input: &[u8], d: u8) -> Result<Vec<BlockTuple>> {
    check_d(d)?;
    if input.is_empty() {
        return Ok(Vec::new());
    }
    let cb = Codebook::from_bytes(input)?;
    let k = cb.max_len();
    let table = PsiTable::new(k, d)?;
    let kd = k as u32 * d as u32;
    let mut tuples = Vec::with_capacity(input.len().div_ceil(d as usize));
    for_each_block(input, &cb, d, |_, lens, p| {
        let q = if p != d as u32 && p != kd {
            Some(table.rank(lens))
        } else {
            None
        };
        tuples.push(BlockTuple { p, q });
    });
    Ok(tuples)
}

/// Bits-per-symbol contribution of each container component, measured
/// against the original input length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamBreakdown {
    pub codeword_bps: f64,
    pub pstream_bps: f64,
    pub qstream_bps: f64,
    pub header_bps: f64,
    pub total_bps: f64,
}

pub fn stream_breakdown(container: &Container) -> StreamBreakdown {
    if container.n() == 0 {
        return StreamBreakdown {
            codeword_bps: 0.0,
            pstream_bps: 0.0,
            qstream_bps: 0.0,
            header_bps: 0.0,
            total_bps: 0.0,
        };
    }
    let n = container.n() as f64;
    StreamBreakdown {
        codeword_bps: container.codeword_stream().bit_len() as f64 / n,
        pstream_bps: container.pstream().len() as f64 * 8.0 / n,
        qstream_bps: container.qstream().len() as f64 * 8.0 / n,
        header_bps: container.header_len() as f64 * 8.0 / n,
        total_bps: container.encoded_len() as f64 * 8.0 / n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::mbr;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn worked_example_tuples() {
        // With the Figure-1 style assignment the block lengths of
        // NONPREFIXFREE at d=3 are (2,2,2),(3,1,1),(2,2,3),(2,1,1),(1,1,1)
        // after padding with two of the most frequent symbol. Our
        // tie-break assigns different codewords within the count-2 group,
        // so the sums come out permuted but the q values of the paper's
        // blocks are checked against the enumeration module directly.
        let tuples = block_tuples(b"NONPREFIXFREE", 3).unwrap();
        assert_eq!(tuples.len(), 5);
        // p values for our tie-break: N=00,O=11,P=000,R=01,E=0,F=1,I=10,X=001
        // blocks: NON=2+2+2=6, PRE=3+2+1=6, FIX=1+2+3=6, FRE=1+2+1=4, EEE=1+1+1=3.
        let ps: Vec<u32> = tuples.iter().map(|t| t.p).collect();
        assert_eq!(ps, vec![6, 6, 6, 4, 3]);
        // p = d = 3 admits one vector: q skipped.
        assert_eq!(tuples[4].q, None);
        assert!(tuples[..4].iter().all(|t| t.q.is_some()));
    }

    #[test]
    fn all_same_symbol_has_empty_qstream() {
        for d in [1u8, 3, 6] {
            let c = encode(&[b'x'; 100], d).unwrap();
            assert!(c.qstream().is_empty());
            assert_eq!(decode(&c).unwrap(), vec![b'x'; 100]);
        }
    }

    #[test]
    fn two_symbol_alphabet_collapses_both_rules() {
        // sigma = 2 gives k = 1: every codeword is one bit, p = d = k*d.
        let data: Vec<u8> = (0..500).map(|i| if i % 3 == 0 { b'a' } else { b'b' }).collect();
        let c = encode(&data, 4).unwrap();
        assert!(c.qstream().is_empty());
        assert_eq!(c.codeword_stream().bit_len(), 500);
        assert_eq!(decode(&c).unwrap(), data);
    }

    #[test]
    fn empty_input_roundtrip() {
        for d in 1..=16u8 {
            let c = encode(b"", d).unwrap();
            assert_eq!(c.n(), 0);
            assert_eq!(decode(&c).unwrap(), b"");
            let bytes = c.to_bytes();
            let back = Container::from_bytes(&bytes).unwrap();
            assert_eq!(decode(&back).unwrap(), b"");
        }
    }

    #[test]
    fn d_validation() {
        assert!(matches!(
            encode(b"abc", 0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            encode(b"abc", 17),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn roundtrip_worked_example() {
        for d in 1..=8u8 {
            let c = encode(b"NONPREFIXFREE", d).unwrap();
            assert_eq!(decode(&c).unwrap(), b"NONPREFIXFREE");
        }
    }

    #[test]
    fn padding_is_not_counted_in_frequencies() {
        // 4 symbols, d = 3: one pad. The codebook must order by the
        // unpadded counts: b:2, a:1, c:1.
        let c = encode(b"abbc", 3).unwrap();
        assert_eq!(c.alphabet(), b"bac");
        assert_eq!(decode(&c).unwrap(), b"abbc");
    }

    #[test]
    fn codeword_stream_matches_size_formula_plus_padding() {
        let data = b"NONPREFIXFREE";
        let freqs = byte_frequencies(data);
        let cb = Codebook::from_frequencies(&freqs).unwrap();
        for d in 1..=8u8 {
            let c = encode(data, d).unwrap();
            let blocks = data.len().div_ceil(d as usize) as u64;
            let pad = blocks * d as u64 - data.len() as u64;
            let expect = cb.size_bits(&freqs) + pad * cb.code_len(0) as u64;
            assert_eq!(c.codeword_stream().bit_len(), expect, "d={d}");
        }
    }

    #[test]
    fn random_roundtrips_across_d() {
        let mut rng = StdRng::seed_from_u64(2024);
        for trial in 0..60 {
            let len = match trial % 4 {
                0 => rng.gen_range(0..10),
                1 => rng.gen_range(10..200),
                2 => rng.gen_range(200..5_000),
                _ => rng.gen_range(5_000..40_000),
            };
            let sigma = [1usize, 2, 3, 17, 64, 256][trial % 6];
            let data: Vec<u8> = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        // skew toward low symbols
                        (rng.gen_range(0..sigma) * rng.gen_range(0..sigma) / sigma) as u8
                    } else {
                        rng.gen_range(0..sigma) as u8
                    }
                })
                .collect();
            for d in [1u8, 2, 5, 16] {
                let c = encode(&data, d).unwrap();
                assert_eq!(decode(&c).unwrap(), data, "len={len} sigma={sigma} d={d}");
                let (b, k) = c.to_split_bytes();
                let re = Container::from_split_bytes(&b, &k).unwrap();
                assert_eq!(decode(&re).unwrap(), data);
            }
        }
    }

    #[test]
    fn large_rank_contexts_roundtrip() {
        // sigma = 256 gives k = 8; at d = 16 the mid sums have far more
        // vectors than any adaptive model holds, forcing the digit path.
        let mut rng = StdRng::seed_from_u64(77);
        let data: Vec<u8> = (0..30_000).map(|_| rng.gen()).collect();
        let c = encode(&data, 16).unwrap();
        assert_eq!(decode(&c).unwrap(), data);
    }

    #[test]
    fn rank_digit_helpers() {
        assert_eq!(rank_digits(2), 1);
        assert_eq!(rank_digits(1 << 16), 1);
        assert_eq!(rank_digits((1 << 16) + 1), 2);
        assert_eq!(rank_digits(1 << 32), 2);
        assert_eq!(rank_digits((1 << 32) + 1), 3);
        assert_eq!(rank_digits(u64::MAX), 4);
    }

    #[test]
    fn decoded_p_always_in_range() {
        // Structural: the p model's alphabet is exactly [d, k*d], so any
        // decode yields in-range sums; check via tuples on mixed data.
        let mut rng = StdRng::seed_from_u64(8);
        let data: Vec<u8> = (0..5_000).map(|_| rng.gen_range(0..100u8)).collect();
        for d in [2u8, 6] {
            let cb = Codebook::from_bytes(&data).unwrap();
            let k = cb.max_len() as u32;
            for t in block_tuples(&data, d).unwrap() {
                assert!(t.p >= d as u32 && t.p <= k * d as u32);
            }
        }
    }

    #[test]
    fn breakdown_accounts_for_whole_file() {
        let mut rng = StdRng::seed_from_u64(9);
        let data: Vec<u8> = (0..20_000).map(|_| rng.gen_range(0..50u8)).collect();
        let c = encode(&data, 6).unwrap();
        let b = stream_breakdown(&c);
        let n = data.len() as f64;
        let reassembled = b.codeword_bps * n / 8.0
            + b.pstream_bps * n / 8.0
            + b.qstream_bps * n / 8.0
            + b.header_bps * n / 8.0;
        // Single-file size differs only by the codeword stream's byte padding.
        assert!((reassembled - c.encoded_len() as f64).abs() <= 1.0);
        assert!(b.total_bps > 0.0);
    }

    #[test]
    fn worked_example_codeword_bps() {
        // 23 codeword bits over 13 symbols when no padding applies.
        let c = encode(b"NONPREFIXFREE", 13).unwrap();
        let b = stream_breakdown(&c);
        assert!((b.codeword_bps - 23.0 / 13.0).abs() < 1e-12);
    }

    #[test]
    fn breakdown_of_empty_container() {
        let c = encode(b"", 6).unwrap();
        let b = stream_breakdown(&c);
        assert_eq!(b.total_bps, 0.0);
        assert_eq!(b.codeword_bps, 0.0);
    }

    #[test]
    fn codeword_stream_independent_of_d() {
        let mut rng = StdRng::seed_from_u64(10);
        let data: Vec<u8> = (0..9_000).map(|_| rng.gen_range(0..30u8)).collect();
        // Add a tail so n is not divisible by the d values; padding makes
        // bit lengths differ slightly, so compare on a divisible prefix.
        let data = &data[..8_976]; // divisible by 2, 4, 6? 8976 = 16*561 = 2^4*3*11*17
        let c2 = encode(data, 2).unwrap();
        let c4 = encode(data, 4).unwrap();
        let c6 = encode(data, 6).unwrap();
        assert_eq!(c2.codeword_stream(), c4.codeword_stream());
        assert_eq!(c4.codeword_stream(), c6.codeword_stream());
    }

    #[test]
    fn mbr_codeword_identity_check() {
        // decode(encode) consistency at the bit level for every rank of a
        // full byte alphabet.
        let symbols: Vec<u8> = (0..=255).collect();
        let cb = Codebook::from_ordered_symbols(&symbols).unwrap();
        for rank in 0..256usize {
            let (bits, len) = mbr(rank as u64 + 2);
            assert_eq!(cb.code_bits(rank), bits);
            assert_eq!(cb.code_len(rank), len);
        }
    }
}
