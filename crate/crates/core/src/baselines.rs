//! Reference points for the benchmark: order-0 entropy, static Huffman,
//! and order-0 adaptive arithmetic coding over bytes.

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use crate::codebook::byte_frequencies;
use crate::entropy::{AdaptiveModel, RangeDecoder, RangeEncoder};
use crate::error::{Error, Result};

/// Size report for one compressor on one input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressionReport {
    pub method: &'static str,
    pub input_bytes: u64,
    /// Bits of coded data.
    pub payload_bits: u64,
    /// Bits of side information a real codec would ship (code lengths,
    /// model parameters). Zero for fully adaptive methods.
    pub model_bits: u64,
}

impl CompressionReport {
    pub fn payload_bps(&self) -> f64 {
        self.payload_bits as f64 / self.input_bytes as f64
    }

    pub fn total_bps(&self) -> f64 {
        (self.payload_bits + self.model_bits) as f64 / self.input_bytes as f64
    }

    pub fn compressed_bytes(&self) -> u64 {
        (self.payload_bits + self.model_bits).div_ceil(8)
    }
}

/// Shannon entropy of the empirical byte distribution, in bits/symbol.
pub fn order0_entropy(data: &[u8]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let freqs = byte_frequencies(data);
    let n = data.len() as f64;
    let mut h = 0.0;
    for &count in freqs.iter() {
        if count > 0 {
            let p = count as f64 / n;
            h -= p * p.log2();
        }
    }
    Ok(h)
}

/// Payload size of an optimal (Huffman) prefix code over the byte counts,
/// plus one byte of code-length side information per alphabet symbol.
pub fn huffman_static_size(data: &[u8]) -> Result<CompressionReport> {
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let freqs = byte_frequencies(data);
    let weights: Vec<u64> = freqs.iter().copied().filter(|&c| c > 0).collect();
    Ok(CompressionReport {
        method: "huffman-static",
        input_bytes: data.len() as u64,
        payload_bits: huffman_payload_bits(&weights),
        model_bits: weights.len() as u64 * 8,
    })
}

/// Total coded bits of an optimal prefix code for the given positive
/// weights: the sum over all merges of the merged weight.
fn huffman_payload_bits(weights: &[u64]) -> u64 {
    debug_assert!(weights.iter().all(|&w| w > 0));
    if weights.len() <= 1 {
        // A lone symbol needs no bits once the alphabet is known.
        return 0;
    }
    let mut heap: BinaryHeap<Reverse<u64>> = weights.iter().map(|&w| Reverse(w)).collect();
    let mut total = 0u64;
    while heap.len() > 1 {
        let Reverse(a) = heap.pop().unwrap();
        let Reverse(b) = heap.pop().unwrap();
        total += a + b;
        heap.push(Reverse(a + b));
    }
    total
}

/// Compress with a single order-0 adaptive model over the full byte
/// alphabet.
pub fn adaptive_ac_compress(data: &[u8]) -> Vec<u8> {
    let mut model = AdaptiveModel::new(256);
    let mut enc = RangeEncoder::new();
    for &b in data {
        enc.encode(&mut model, b as usize);
    }
    enc.finish()
}

/// Invert [`adaptive_ac_compress`]; `n` is the original length.
pub fn adaptive_ac_decompress(payload: &[u8], n: usize) -> Result<Vec<u8>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut model = AdaptiveModel::new(256);
    let mut dec = RangeDecoder::new(payload)?;
    let mut out = Vec::with_capacity(n.min(payload.len().saturating_mul(16)));
    for _ in 0..n {
        out.push(dec.decode(&mut model)? as u8);
    }
    Ok(out)
}

/// Size of the input under order-0 adaptive arithmetic coding.
pub fn adaptive_ac_size(data: &[u8]) -> CompressionReport {
    let payload = adaptive_ac_compress(data);
    CompressionReport {
        method: "arith-adaptive",
        input_bytes: data.len() as u64,
        payload_bits: payload.len() as u64 * 8,
        model_bits: 0,
    }
}
