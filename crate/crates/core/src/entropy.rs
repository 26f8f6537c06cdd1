//! Binary-fraction range coder with adaptive frequency models.
//!
//! A 32-bit range coder with byte-wise renormalization and explicit carry
//! propagation, keeping the active range at or above 2^24 so quantization
//! stays below a hundredth of a bit per symbol. Models keep per-symbol
//! counts in a Fenwick tree so cumulative lookups and the decode search
//! run in O(log n) even for the multi-thousand-symbol rank contexts.
//!
//! The coder is fully deterministic: a fixed symbol sequence under a fixed
//! model configuration produces bit-identical output on every platform.

use crate::error::{Error, Result};

/// Renormalization threshold: the range register never drops below this
/// between symbols.
const TOP: u32 = 1 << 24;

/// Hard cap on a model's total frequency; totals above this break the
/// range/total division. Reaching it triggers count halving.
pub const MAX_TOTAL: u32 = 1 << 16;

/// How much a symbol's count grows each time it is coded. Kept small:
/// larger steps leave measurable count noise on wide alphabets (a 32-step
/// costs ~0.07 bits/symbol on uniform 256-symbol data under the 2^16
/// total cap).
pub const INCREMENT: u32 = 8;

/// Adaptive frequency model over `0..alphabet_size`, every symbol starting
/// at count 1 so nothing ever has zero probability.
#[derive(Debug, Clone)]
pub struct AdaptiveModel {
    // Fenwick tree, 1-based: tree[i] covers freq[(i - lowbit(i))..i].
    tree: Vec<u32>,
    size: usize,
    total: u32,
    // Largest power of two <= size, the starting stride for searches.
    top_bit: usize,
}

impl AdaptiveModel {
    pub fn new(alphabet_size: usize) -> Self {
        assert!(
            alphabet_size >= 1 && alphabet_size as u64 <= MAX_TOTAL as u64,
            "alphabet size {alphabet_size} outside [1, {MAX_TOTAL}]"
        );
        // All-ones tree: node i covers lowbit(i) symbols of count 1.
        let mut tree = vec![0u32; alphabet_size + 1];
        for (i, node) in tree.iter_mut().enumerate().skip(1) {
            *node = (i & i.wrapping_neg()) as u32;
        }
        AdaptiveModel {
            tree,
            size: alphabet_size,
            total: alphabet_size as u32,
            top_bit: 1 << (usize::BITS - 1 - alphabet_size.leading_zeros()),
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.size
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    /// Sum of counts of symbols `< sym`.
    fn cum_below(&self, sym: usize) -> u32 {
        let mut i = sym;
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i];
            i &= i - 1;
        }
        sum
    }

    /// Count of one symbol.
    pub fn freq(&self, sym: usize) -> u32 {
        self.cum_below(sym + 1) - self.cum_below(sym)
    }

    /// `(cum_below, freq)` for the encoder.
    fn interval(&self, sym: usize) -> (u32, u32) {
        let low = self.cum_below(sym);
        (low, self.cum_below(sym + 1) - low)
    }

    /// Symbol whose interval contains `target`, plus that interval.
    fn locate(&self, target: u32) -> (usize, u32, u32) {
        debug_assert!(target < self.total);
        let mut pos = 0usize;
        let mut rem = target;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next <= self.size && self.tree[next] <= rem {
                rem -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        // pos symbols lie fully below target.
        let low = target - rem;
        (pos, low, self.cum_below(pos + 1) - low)
    }

    fn add(&mut self, sym: usize, delta: u32) {
        let mut i = sym + 1;
        while i <= self.size {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
        self.total += delta;
    }

    fn sub(&mut self, sym: usize, delta: u32) {
        let mut i = sym + 1;
        while i <= self.size {
            self.tree[i] -= delta;
            i += i & i.wrapping_neg();
        }
        self.total -= delta;
    }

    /// Grow `sym` by the standard increment, halving all counts when the
    /// total would pass [`MAX_TOTAL`].
    fn bump(&mut self, sym: usize) {
        self.add(sym, INCREMENT);
        if self.total > MAX_TOTAL {
            self.halve();
            if self.total > MAX_TOTAL {
                // Alphabets within INCREMENT of the cap bottom out above
                // it (ceil-halving keeps every count at >= 1); shave the
                // excess off the symbol just grown. The excess is at most
                // INCREMENT/2 while that count is at least INCREMENT/2+1.
                let excess = self.total - MAX_TOTAL;
                self.sub(sym, excess);
                debug_assert!(self.freq(sym) >= 1);
            }
        }
    }

    fn halve(&mut self) {
        // Unweave the tree into raw counts, halve (rounding up so no
        // count reaches zero), and rebuild.
        for i in (1..=self.size).rev() {
            let j = i + (i & i.wrapping_neg());
            if j <= self.size {
                self.tree[j] -= self.tree[i];
            }
        }
        let mut total = 0u32;
        for i in 1..=self.size {
            self.tree[i] = self.tree[i].div_ceil(2);
            total += self.tree[i];
        }
        for i in 1..=self.size {
            let j = i + (i & i.wrapping_neg());
            if j <= self.size {
                self.tree[j] += self.tree[i];
            }
        }
        self.total = total;
    }
}

/// Range-coding encoder writing to an internal byte buffer.
///
/// `low` is kept in 33 bits; bit 32 is the carry into bytes already
/// queued, resolved through the cache/pending-0xFF mechanism. The first
/// emitted byte is a zero placeholder the decoder skips.
#[derive(Debug)]
pub struct RangeEncoder {
    low: u64,
    range: u32,
    cache: u8,
    cache_size: u64,
    out: Vec<u8>,
}

impl Default for RangeEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl RangeEncoder {
    pub fn new() -> Self {
        RangeEncoder {
            low: 0,
            range: u32::MAX,
            cache: 0,
            cache_size: 1,
            out: Vec::new(),
        }
    }

    fn shift_low(&mut self) {
        if self.low < 0xFF00_0000 || self.low > u32::MAX as u64 {
            let carry = (self.low >> 32) as u8;
            let mut byte = self.cache;
            loop {
                self.out.push(byte.wrapping_add(carry));
                byte = 0xFF;
                self.cache_size -= 1;
                if self.cache_size == 0 {
                    break;
                }
            }
            self.cache = (self.low >> 24) as u8;
        }
        self.cache_size += 1;
        self.low = (self.low << 8) & 0xFFFF_FFFF;
    }

    fn narrow(&mut self, cum_low: u32, freq: u32, total: u32) {
        debug_assert!(freq > 0 && cum_low + freq <= total && total <= MAX_TOTAL);
        self.range /= total;
        self.low += cum_low as u64 * self.range as u64;
        self.range *= freq;
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    /// Code `sym` under `model`, then apply the model update.
    pub fn encode(&mut self, model: &mut AdaptiveModel, sym: usize) {
        assert!(sym < model.alphabet_size(), "symbol outside alphabet");
        let (low, freq) = model.interval(sym);
        self.narrow(low, freq, model.total());
        model.bump(sym);
    }

    /// Code `value` uniformly over `[0, total)`, no adaptation.
    pub fn encode_uniform(&mut self, value: u32, total: u32) {
        assert!((1..=MAX_TOTAL).contains(&total) && value < total);
        self.narrow(value, 1, total);
    }

    /// Emit the tail bytes that pin the final interval and return the
    /// payload. The tail is always exactly 5 bytes.
    pub fn finish(mut self) -> Vec<u8> {
        for _ in 0..5 {
            self.shift_low();
        }
        self.out
    }
}

/// Range-coding decoder over a byte payload; mirrors the encoder's state
/// trajectory exactly and errors out instead of reading past the end.
#[derive(Debug)]
pub struct RangeDecoder<'a> {
    range: u32,
    code: u32,
    data: &'a [u8],
    pos: usize,
}

impl<'a> RangeDecoder<'a> {
    pub fn new(data: &'a [u8]) -> Result<Self> {
        if data.len() < 5 {
            return Err(Error::TruncatedStream(format!(
                "range-coded payload of {} bytes lacks the 5-byte tail",
                data.len()
            )));
        }
        // data[0] is the encoder's placeholder byte.
        let code = u32::from_be_bytes([data[1], data[2], data[3], data[4]]);
        Ok(RangeDecoder {
            range: u32::MAX,
            code,
            data,
            pos: 5,
        })
    }

    fn next_byte(&mut self) -> Result<u8> {
        let b = self
            .data
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::TruncatedStream("range-coded payload exhausted".into()))?;
        self.pos += 1;
        Ok(b)
    }

    fn renormalize(&mut self) -> Result<()> {
        while self.range < TOP {
            self.code = (self.code << 8) | self.next_byte()? as u32;
            self.range <<= 8;
        }
        Ok(())
    }

    fn target(&mut self, total: u32) -> u32 {
        self.range /= total;
        // The clamp is only reachable on corrupted input, where the code
        // points into the dead zone past the last interval; the clamped
        // value then fails downstream validation instead of indexing out
        // of bounds.
        (self.code / self.range).min(total - 1)
    }

    /// Decode the next symbol under `model`, applying the same update the
    /// encoder did.
    pub fn decode(&mut self, model: &mut AdaptiveModel) -> Result<usize> {
        let target = self.target(model.total());
        let (sym, low, freq) = model.locate(target);
        self.code -= low * self.range;
        self.range *= freq;
        self.renormalize()?;
        model.bump(sym);
        Ok(sym)
    }

    /// Decode a value coded with [`RangeEncoder::encode_uniform`].
    pub fn decode_uniform(&mut self, total: u32) -> Result<u32> {
        assert!((1..=MAX_TOTAL).contains(&total));
        let value = self.target(total);
        self.code -= value * self.range;
        // freq = 1: range already divided.
        self.renormalize()?;
        Ok(value)
    }
}
