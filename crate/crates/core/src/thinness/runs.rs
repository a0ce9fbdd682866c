use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{int, ratio, Rational};
use crate::set_model::{GapSequence, Prefix};

/// A set written as ordered finite blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockDecomposition {
    /// Gap threshold used by the greedy rule, if the blocks came from it.
    pub threshold: Option<u64>,
    pub horizon: u64,
    pub blocks: Vec<Vec<u64>>,
    pub block_size_max: usize,
    /// `min(A_{k+1}) - max(A_k)`
    pub inter_block_gaps: Vec<u64>,
}

impl BlockDecomposition {
    /// Checks that blocks are non-empty, increasing, inside `[1, horizon]`
    /// and strictly ordered one after another.
    pub fn from_blocks(
        horizon: u64,
        blocks: Vec<Vec<u64>>,
        threshold: Option<u64>,
    ) -> Result<Self> {
        for (k, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Decomposition(format!("block {} is empty", k + 1)));
            }
            if block.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Decomposition(format!(
                    "block {} is not increasing",
                    k + 1
                )));
            }
            if block[0] == 0 || block[block.len() - 1] > horizon {
                return Err(Error::Decomposition(format!(
                    "block {} leaves [1, {horizon}]",
                    k + 1
                )));
            }
        }
        let mut inter_block_gaps = Vec::with_capacity(blocks.len().saturating_sub(1));
        for (k, pair) in blocks.windows(2).enumerate() {
            let (prev_max, next_min) = (pair[0][pair[0].len() - 1], pair[1][0]);
            if next_min <= prev_max {
                return Err(Error::Decomposition(format!(
                    "block {} starts at {next_min}, not after {prev_max}",
                    k + 2
                )));
            }
            inter_block_gaps.push(next_min - prev_max);
        }
        Ok(BlockDecomposition {
            threshold,
            horizon,
            block_size_max: blocks.iter().map(Vec::len).max().unwrap_or(0),
            blocks,
            inter_block_gaps,
        })
    }

    pub fn elements(&self) -> Vec<u64> {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn to_prefix(&self) -> Prefix {
        Prefix::from_sorted_unchecked(self.horizon, self.elements())
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

fn check_m(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::OutOfRange(
            "gap threshold M must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Longest run of consecutive elements whose successive differences are all `<= m`.
pub fn run_statistic(prefix: &Prefix, m: u64) -> Result<u64> {
    check_m(m)?;
    if prefix.is_empty() {
        return Err(Error::Empty("run statistic of an empty prefix".into()));
    }
    Ok(longest_run(prefix.elements(), m))
}

/// Same as [`run_statistic`] on a raw sorted slice; 0 for an empty slice.
pub(crate) fn longest_run(elements: &[u64], m: u64) -> u64 {
    if elements.is_empty() {
        return 0;
    }
    let (mut best, mut current) = (1u64, 1u64);
    for w in elements.windows(2) {
        if w[1] - w[0] <= m {
            current += 1;
            best = best.max(current);
        } else {
            current = 1;
        }
    }
    best
}

/// Maximal runs with internal gaps `<= m`.
pub fn greedy_block_decomposition(prefix: &Prefix, m: u64) -> Result<BlockDecomposition> {
    check_m(m)?;
    if prefix.is_empty() {
        return Err(Error::Empty("decomposition of an empty prefix".into()));
    }
    let blocks = greedy_blocks(prefix.elements(), m);
    BlockDecomposition::from_blocks(prefix.horizon(), blocks, Some(m))
}

pub(crate) fn greedy_blocks(elements: &[u64], m: u64) -> Vec<Vec<u64>> {
    let mut blocks: Vec<Vec<u64>> = Vec::new();
    for &x in elements {
        match blocks.last_mut() {
            Some(b) if x - b[b.len() - 1] <= m => b.push(x),
            _ => blocks.push(vec![x]),
        }
    }
    blocks
}

/// Running sums of `1/b_j`.
pub fn reciprocal_gap_partial_sums(gaps: &GapSequence) -> Vec<Rational> {
    let mut acc = int(0);
    gaps.gaps
        .iter()
        .map(|&b| {
            acc += ratio(1, b);
            acc.clone()
        })
        .collect()
}

/// Whether `sum 1/b` over `gaps` stays `<= bound`; stops as soon as it exceeds.
pub(crate) fn reciprocal_sum_at_most(gaps: &[u64], bound: &Rational) -> (bool, Rational) {
    let mut acc = int(0);
    for &b in gaps {
        acc += ratio(1, b);
        if &acc > bound {
            return (false, acc);
        }
    }
    (true, acc)
}
