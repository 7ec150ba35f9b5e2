//! Multi-indices in graded-lexicographic order.
//!
//! Order: by total degree, then lexicographically ascending within a degree.
//! For `m = 1, N = 2` this is `(0,0) (0,1) (1,0) (0,2) (1,1) (2,0)`. The order
//! is part of the norm-table file format and must not change.

use crate::error::{Error, Result};

/// Largest index set the library will materialize.
pub const MAX_INDICES: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl From<&[u32]> for MultiIndex {
    fn from(s: &[u32]) -> Self {
        MultiIndex(s.to_vec())
    }
}

fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `C(N + m + 1, m + 1)`, the number of indices of degree at most `N`.
pub fn index_count(m: usize, n: usize) -> Option<u128> {
    binomial((n + m + 1) as u64, (m + 1) as u64)
}

/// Number of `parts`-tuples of non-negative integers summing to `total`.
fn compositions(total: usize, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    binomial((total + parts - 1) as u64, (parts - 1) as u64).unwrap_or(u128::MAX)
}

fn checked_count(m: usize, n: usize) -> Result<usize> {
    match index_count(m, n) {
        Some(c) if c <= MAX_INDICES as u128 => Ok(c as usize),
        _ => Err(Error::Size(format!("index set for m = {m}, N = {n} exceeds {MAX_INDICES} entries"))),
    }
}

/// All exponent vectors of degree ≤ `n`, flattened with stride `m + 1`.
pub(crate) fn enumerate_flat(m: usize, n: usize) -> Result<Vec<u32>> {
    let count = checked_count(m, n)?;
    let dim = m + 1;
    let mut out = Vec::with_capacity(count * dim);
    let mut cur = vec![0u32; dim];
    for d in 0..=n {
        fill_degree(&mut cur, 0, d as u32, &mut out);
    }
    debug_assert_eq!(out.len(), count * dim);
    Ok(out)
}

fn fill_degree(cur: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<u32>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.extend_from_slice(cur);
        return;
    }
    for v in 0..=remaining {
        cur[pos] = v;
        fill_degree(cur, pos + 1, remaining - v, out);
    }
}

pub fn enumerate_indices(m: usize, n: usize) -> Result<Vec<MultiIndex>> {
    let flat = enumerate_flat(m, n)?;
    Ok(flat.chunks_exact(m + 1).map(MultiIndex::from).collect())
}

/// Position of `j` in the graded-lex enumeration.
pub fn graded_lex_rank(j: &[u32]) -> usize {
    let m = j.len() - 1;
    let d: usize = j.iter().map(|&v| v as usize).sum();
    let mut rank: u128 = if d == 0 { 0 } else { index_count(m, d - 1).unwrap_or(u128::MAX) };
    let mut remaining = d;
    for (i, &ji) in j.iter().enumerate().take(m) {
        let parts_after = m - i;
        for v in 0..ji as usize {
            rank += compositions(remaining - v, parts_after);
        }
        remaining -= ji as usize;
    }
    rank as usize
}
