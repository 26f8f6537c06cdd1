//! Exact combinatorics of bounded compositions: counting, ranking, and
//! unranking d-dimensional vectors with entries in `[1..k]` and a fixed
//! inner sum.
//!
//! Ranks are 0-based throughout: the lexicographically smallest vector for
//! a given sum has rank 0, and rank/unrank are exact mutual inverses.

use crate::error::{Error, Result};

/// Number of distinct `d`-dimensional vectors with entries in `[1..k]`
/// summing to `v`. Returns 0 when no such vector exists.
///
/// Computed bottom-up (no recursion); any count past 64 bits is rejected.
pub fn psi(k: u8, d: u8, v: u32) -> Result<u64> {
    assert!(k >= 1 && d >= 1, "psi requires k >= 1 and d >= 1");
    let kd = k as u32 * d as u32;
    if v < d as u32 || v > kd {
        return Ok(0);
    }
    // One DP row per dimension count, keeping only the previous row.
    let mut prev = vec![0u64; kd as usize + 1];
    prev[1..=k as usize].fill(1);
    for dims in 2..=d as u32 {
        let mut row = vec![0u64; kd as usize + 1];
        for s in dims..=(k as u32 * dims) {
            row[s as usize] = row_sum(&prev, k, dims, s)
                .ok_or(Error::ConfigTooLarge { k, d, v: s })?;
        }
        prev = row;
    }
    Ok(prev[v as usize])
}

fn row_sum(prev: &[u64], k: u8, dims: u32, s: u32) -> Option<u64> {
    // First entry i ranges over [alpha..beta]; the rest must still be able
    // to reach the remaining sum.
    let alpha = 1.max(s as i64 - k as i64 * (dims as i64 - 1)) as u32;
    let beta = (k as u32).min(s - dims + 1);
    let mut sum = 0u64;
    for i in alpha..=beta {
        sum = sum.checked_add(prev[(s - i) as usize])?;
    }
    Some(sum)
}

/// Precomputed `psi(k, dims, sum)` for every `dims <= d`, so ranking and
/// unranking run without recomputation.
#[derive(Debug, Clone)]
pub struct PsiTable {
    k: u8,
    d: u8,
    // rows[dims - 1][sum] = psi(k, dims, sum), sums indexed 0..=k*dims.
    rows: Vec<Vec<u64>>,
}

impl PsiTable {
    pub fn new(k: u8, d: u8) -> Result<Self> {
        if !(1..=16).contains(&k) || !(1..=16).contains(&d) {
            return Err(Error::InvalidParameter(format!(
                "psi table requires 1 <= k <= 16 and 1 <= d <= 16, got k={k} d={d}"
            )));
        }
        let mut rows = Vec::with_capacity(d as usize);
        let mut first = vec![0u64; k as usize + 1];
        first[1..=k as usize].fill(1);
        rows.push(first);
        for dims in 2..=d as u32 {
            let prev = &rows[dims as usize - 2];
            let mut row = vec![0u64; (k as u32 * dims) as usize + 1];
            for s in dims..=(k as u32 * dims) {
                row[s as usize] = row_sum(prev, k, dims, s)
                    .ok_or(Error::ConfigTooLarge { k, d, v: s })?;
            }
            rows.push(row);
        }
        Ok(PsiTable { k, d, rows })
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn dims(&self) -> u8 {
        self.d
    }

    /// `psi(k, dims, sum)` in constant time; 0 for out-of-range sums.
    pub fn count(&self, dims: u8, sum: u32) -> u64 {
        assert!(dims >= 1 && dims <= self.d, "dims out of table range");
        let row = &self.rows[dims as usize - 1];
        if (sum as usize) < dims as usize || sum as usize >= row.len() {
            return 0;
        }
        row[sum as usize]
    }

    /// 0-based lexicographic rank of `entries` among all vectors with the
    /// same dimension count and inner sum.
    ///
    /// `entries` must have length `dims()` with every value in `[1..k]`.
    pub fn rank(&self, entries: &[u8]) -> u64 {
        assert_eq!(entries.len(), self.d as usize, "vector has wrong dimension");
        let mut remaining: u32 = entries.iter().map(|&e| e as u32).sum();
        let mut index = 0u64;
        for (j, &e) in entries.iter().enumerate() {
            assert!(e >= 1 && e <= self.k, "entry {e} outside [1..{}]", self.k);
            let dims_left = (self.d as usize - j - 1) as u8;
            if dims_left == 0 {
                break;
            }
            // Count vectors that put a smaller value at this position.
            for i in 1..e as u32 {
                index += self.count(dims_left, remaining - i);
            }
            remaining -= e as u32;
        }
        index
    }

    /// The unique vector with the given inner sum at the given 0-based
    /// lexicographic rank; exact inverse of [`PsiTable::rank`].
    pub fn unrank(&self, sum: u32, rank: u64) -> Result<LengthVector> {
        let mut out = vec![0u8; self.d as usize];
        self.unrank_into(sum, rank, &mut out)?;
        Ok(LengthVector(out))
    }

    /// Allocation-free unrank for the decode hot loop. `out` must have
    /// length `dims()`.
    pub fn unrank_into(&self, sum: u32, rank: u64, out: &mut [u8]) -> Result<()> {
        assert_eq!(out.len(), self.d as usize, "output has wrong dimension");
        let total = self.count(self.d, sum);
        if rank >= total {
            return Err(Error::InvalidRank {
                sum,
                rank,
                count: total,
            });
        }
        let mut remaining = sum;
        let mut rank = rank;
        let last = self.d as usize - 1;
        for (j, slot) in out.iter_mut().enumerate().take(last) {
            let dims_left = (self.d as usize - j - 1) as u8;
            let mut value = 1u8;
            loop {
                let below = self.count(dims_left, remaining - value as u32);
                if below <= rank {
                    rank -= below;
                    value += 1;
                    debug_assert!(value <= self.k);
                } else {
                    break;
                }
            }
            *slot = value;
            remaining -= value as u32;
        }
        debug_assert!(remaining >= 1 && remaining <= self.k as u32);
        debug_assert_eq!(rank, 0);
        out[self.d as usize - 1] = remaining as u8;
        Ok(())
    }
}

/// A block's codeword-length vector: `dims` entries, each in `[1..k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthVector(Vec<u8>);

impl LengthVector {
    pub fn new(entries: Vec<u8>, k: u8) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter(
                "length vector must have at least one entry".into(),
            ));
        }
        if let Some(&bad) = entries.iter().find(|&&e| e < 1 || e > k) {
            return Err(Error::InvalidParameter(format!(
                "length vector entry {bad} outside [1..{k}]"
            )));
        }
        Ok(LengthVector(entries))
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    pub fn inner_sum(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }
}

/// Every valid vector for `(k, d, v)` in lexicographically ascending order.
///
/// Brute-force enumeration intended as a test oracle; refuses blow-ups
/// beyond `k^d = 10^7`.
pub fn enumerate_all(k: u8, d: u8, v: u32) -> Result<Vec<LengthVector>> {
    assert!(k >= 1 && d >= 1);
    if (k as f64).powi(d as i32) > 1e7 {
        return Err(Error::InvalidParameter(format!(
            "enumerate_all guard exceeded: {k}^{d} > 10^7"
        )));
    }
    let mut out = Vec::new();
    let mut current = vec![0u8; d as usize];
    fill(k, d, v, 0, &mut current, &mut out);
    Ok(out)
}

fn fill(k: u8, d: u8, v: u32, pos: usize, current: &mut [u8], out: &mut Vec<LengthVector>) {
    let dims_left = d as usize - pos;
    if dims_left == 1 {
        if v >= 1 && v <= k as u32 {
            current[pos] = v as u8;
            out.push(LengthVector(current.to_vec()));
        }
        return;
    }
    for e in 1..=k {
        let e32 = e as u32;
        if e32 >= v {
            break;
        }
        let rest = v - e32;
        if rest < (dims_left as u32 - 1) || rest > k as u32 * (dims_left as u32 - 1) {
            continue;
        }
        current[pos] = e;
        fill(k, d, rest, pos + 1, current, out);
    }
}
