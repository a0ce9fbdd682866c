//! Block constructions: merging super thin and very thin sets, splitting a
//! very thin set into super thin parts, the intersection cover and the
//! gallery of named example sets.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::set_model::{
    merge_sorted, subtract_sorted, BlockCertificate, BlockFamilyKind, Certificate, ExprKind,
    Generator, GrowthFn, Prefix, SetExpr,
};
use crate::thinness::{greedy_block_decomposition, BlockDecomposition};

fn same_horizon(horizon: u64, parts: &[u64]) -> Result<()> {
    if let Some(h) = parts.iter().find(|&&h| h != horizon) {
        return Err(Error::Horizon(format!(
            "horizon mismatch: input materialized to {h}, expected {horizon}"
        )));
    }
    Ok(())
}

/// Midpoint attachment of `t` values to the spans `[lo_i, hi_i]`:
/// span `i` takes the smallest unused `t` with `hi_i <= t` and
/// `2t <= hi_i + lo_{i+1}` and the largest unused `t` with `t <= lo_i` and
/// `2t >= hi_{i-1} + lo_i`. A `t` at an exact midpoint goes to the earlier span.
fn attach(spans: &[(u64, u64)], t: &[u64]) -> (Vec<Vec<u64>>, Vec<bool>) {
    let mut used = vec![false; t.len()];
    let mut taken = vec![Vec::new(); spans.len()];
    for (i, &(lo, hi)) in spans.iter().enumerate() {
        if i > 0 {
            let prev_hi = spans[i - 1].1;
            let j = t.partition_point(|&x| x <= lo);
            if j > 0 && !used[j - 1] && 2 * t[j - 1] >= prev_hi + lo && t[j - 1] > prev_hi {
                used[j - 1] = true;
                taken[i].push(t[j - 1]);
            }
        }
        if let Some(&(next_lo, _)) = spans.get(i + 1) {
            let j = t.partition_point(|&x| x < hi);
            if j < t.len() && !used[j] && 2 * t[j] <= hi + next_lo {
                used[j] = true;
                taken[i].push(t[j]);
            }
        }
    }
    (taken, used)
}

fn finish(horizon: u64, mut blocks: Vec<Vec<u64>>) -> Result<BlockDecomposition> {
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.sort_unstable_by_key(|b| b[0]);
    BlockDecomposition::from_blocks(horizon, blocks, None)
}

/// Blocks of `S ∪ T` for two super thin sets: each `s_i` together with its
/// midpoint attachments from `T`, and the remaining `T` elements as singletons.
pub fn merge_super_thin(s: &Prefix, t: &Prefix, horizon: u64) -> Result<BlockDecomposition> {
    same_horizon(horizon, &[s.horizon(), t.horizon()])?;
    let t_only = subtract_sorted(t.elements(), s.elements());
    let spans: Vec<(u64, u64)> = s.elements().iter().map(|&x| (x, x)).collect();
    let (taken, used) = attach(&spans, &t_only);
    let mut blocks: Vec<Vec<u64>> = s
        .elements()
        .iter()
        .zip(taken)
        .map(|(&x, mut extra)| {
            extra.push(x);
            extra
        })
        .collect();
    blocks.extend(
        t_only
            .iter()
            .zip(&used)
            .filter(|(_, &u)| !u)
            .map(|(&x, _)| vec![x]),
    );
    let d = finish(horizon, blocks)?;
    if d.block_size_max > 3 {
        return Err(Error::SizeBound {
            size: d.block_size_max,
            bound: 3,
        });
    }
    Ok(d)
}

/// Blocks of `S ∪ T` for `S` given by blocks of size at most `M` and a super
/// thin `T`; the result has blocks of size at most `2M + 1`.
///
/// Each block of `S` absorbs the `T` elements inside its span and its midpoint
/// attachments. A block is then cut between any two adjacent `T` elements.
pub fn merge_very_thin_super_thin(
    s: &BlockDecomposition,
    t: &Prefix,
    horizon: u64,
) -> Result<BlockDecomposition> {
    same_horizon(horizon, &[s.horizon, t.horizon()])?;
    let s_checked = BlockDecomposition::from_blocks(s.horizon, s.blocks.clone(), s.threshold)?;
    let m = s_checked.block_size_max;
    let s_elements = s_checked.elements();
    let t_only = subtract_sorted(t.elements(), &s_elements);
    let spans: Vec<(u64, u64)> = s_checked
        .blocks
        .iter()
        .map(|b| (b[0], b[b.len() - 1]))
        .collect();
    let mut used = vec![false; t_only.len()];
    let mut merged: Vec<Vec<u64>> = s_checked.blocks.clone();
    for (i, &(lo, hi)) in spans.iter().enumerate() {
        let from = t_only.partition_point(|&x| x <= lo);
        let to = t_only.partition_point(|&x| x < hi);
        for j in from..to {
            used[j] = true;
            merged[i].push(t_only[j]);
        }
    }
    let free: Vec<u64> = t_only
        .iter()
        .zip(&used)
        .filter(|(_, &u)| !u)
        .map(|(&x, _)| x)
        .collect();
    let (taken, attached) = attach(&spans, &free);
    for (block, extra) in merged.iter_mut().zip(taken) {
        block.extend(extra);
        block.sort_unstable();
    }
    let mut blocks = Vec::new();
    for block in merged {
        let mut piece: Vec<u64> = Vec::new();
        let mut prev_in_t = false;
        for x in block {
            let in_t = s_elements.binary_search(&x).is_err();
            if in_t && prev_in_t {
                blocks.push(std::mem::take(&mut piece));
            }
            piece.push(x);
            prev_in_t = in_t;
        }
        blocks.push(piece);
    }
    blocks.extend(
        free.iter()
            .zip(&attached)
            .filter(|(_, &u)| !u)
            .map(|(&x, _)| vec![x]),
    );
    let d = finish(horizon, blocks)?;
    let bound = 2 * m + 1;
    if d.block_size_max > bound {
        return Err(Error::SizeBound {
            size: d.block_size_max,
            bound,
        });
    }
    Ok(d)
}

/// `B_i` collects the `i`-th smallest element of every block, short blocks
/// padded with their maximum; padded repeats are dropped from all but the
/// first part holding them.
pub fn split_into_super_thin(decomp: &BlockDecomposition) -> Result<Vec<Prefix>> {
    let d =
        BlockDecomposition::from_blocks(decomp.horizon, decomp.blocks.clone(), decomp.threshold)?;
    if d.is_empty() {
        return Err(Error::Decomposition("no blocks to split".into()));
    }
    Ok((0..d.block_size_max)
        .map(|i| {
            let part: Vec<u64> = d.blocks.iter().filter_map(|b| b.get(i).copied()).collect();
            Prefix::from_sorted_unchecked(d.horizon, part)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverStage {
    pub k: u64,
    /// 1-based index `n_k` into `S`.
    pub index: usize,
    pub t: u64,
    pub next: u64,
    pub a_block: Vec<u64>,
    pub b_block: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cover {
    pub a: Prefix,
    pub b: Prefix,
    pub stages: Vec<CoverStage>,
}

/// Two sets `A' ⊇ S` and `B' ⊇ S` with `A' ∩ B' = S`, each carrying runs of
/// every length up to the number of stages.
///
/// Stage `k` picks the least index `n_k > n_{k-1}` with
/// `t_{n_k} > 2 t_{n_{k-1}}` and `t_{n_k + 1} - t_{n_k} > 2k`, then adds
/// `{t_{n_k}, ..., t_{n_k} + k}` to `A` and `{t_{n_k+1} - k, ..., t_{n_k+1}}` to `B`.
pub fn thin_intersection_cover(s: &Prefix, horizon: u64) -> Result<Cover> {
    same_horizon(horizon, &[s.horizon()])?;
    let t = s.elements();
    let mut stages: Vec<CoverStage> = Vec::new();
    let mut i = 0usize;
    while i + 1 < t.len() {
        let k = stages.len() as u64 + 1;
        let grows = stages.last().is_none_or(|p| t[i] > 2 * p.t);
        if grows && t[i + 1] - t[i] > 2 * k {
            stages.push(CoverStage {
                k,
                index: i + 1,
                t: t[i],
                next: t[i + 1],
                a_block: (t[i]..=t[i] + k).collect(),
                b_block: (t[i + 1] - k..=t[i + 1]).collect(),
            });
        }
        i += 1;
    }
    if stages.len() < 3 {
        return Err(Error::Horizon(format!(
            "horizon {horizon} too small: only {} cover stages found, need 3",
            stages.len()
        )));
    }
    let a_extra: Vec<u64> = stages
        .iter()
        .flat_map(|s| s.a_block.iter().copied())
        .collect();
    let b_extra: Vec<u64> = stages
        .iter()
        .flat_map(|s| s.b_block.iter().copied())
        .collect();
    Ok(Cover {
        a: Prefix::from_sorted_unchecked(horizon, merge_sorted(t, &a_extra)),
        b: Prefix::from_sorted_unchecked(horizon, merge_sorted(t, &b_extra)),
        stages,
    })
}

/// Catalog blocks for a block family (the last one cut at the horizon),
/// greedy blocks at `m` for anything else.
pub fn natural_decomposition(expr: &SetExpr, horizon: u64, m: u64) -> Result<BlockDecomposition> {
    let prefix = expr.enumerate_upto(horizon)?;
    match expr.kind() {
        ExprKind::BlockFamily(kind) => {
            let blocks: Vec<Vec<u64>> = kind
                .blocks_upto(horizon)
                .into_iter()
                .map(|b| b.into_iter().take_while(|&x| x <= horizon).collect())
                .collect();
            BlockDecomposition::from_blocks(horizon, blocks, None)
        }
        _ => greedy_block_decomposition(&prefix, m),
    }
}

pub const GALLERY: &[(&str, &str)] = &[
    ("A_frak", "{2^k} ∪ {2^k + 1}: very thin, not super thin"),
    ("pow2", "{2^k}: super super thin"),
    ("pow2plus1", "{2^k + 1}: super super thin"),
    ("pow2run", "∪ {2^k, ..., 2^k + k}: thin, not very thin"),
    (
        "pow2pair",
        "∪ {2^k, 2^k + k}: super thin and very very thin, not super super thin",
    ),
    ("tri", "triangular numbers: super thin, not very very thin"),
    (
        "triY",
        "triangular numbers with b_k + 1 for odd k: very thin, not very very thin",
    ),
    (
        "cubicgap",
        "blocks with cubic partial-sum gaps: uniformly thin, not very thin",
    ),
    ("primes", "prime numbers (empirical only)"),
];

pub fn gallery(name: &str) -> Result<SetExpr> {
    Ok(match name {
        "A_frak" => {
            // blocks {2^k, 2^k + 1}, block gaps 2^(k+1) - 2^k - 1
            let cert = Certificate::default()
                .with_recurring_gap(1)
                .with_blocks(BlockCertificate {
                    max_size: Some(2),
                    gap_floor: Some(GrowthFn::Exponential {
                        base: 2,
                        shift: 0,
                        linear: 0,
                        constant: 1,
                    }),
                    ..Default::default()
                })
                .with_density(crate::rational::int(0));
            SetExpr::union(vec![
                SetExpr::generator(Generator::Powers(2))?,
                SetExpr::generator(Generator::PowersPlusOne)?,
            ])
            .with_certificate(cert)
        }
        "pow2" => SetExpr::generator(Generator::Powers(2))?,
        "pow2plus1" => SetExpr::generator(Generator::PowersPlusOne)?,
        "pow2run" => SetExpr::block_family(BlockFamilyKind::Pow2Run),
        "pow2pair" => SetExpr::block_family(BlockFamilyKind::Pow2Pair),
        "tri" => SetExpr::generator(Generator::Triangular)?,
        "triY" => SetExpr::block_family(BlockFamilyKind::TriY),
        "cubicgap" => SetExpr::block_family(BlockFamilyKind::CubicGap),
        "primes" => SetExpr::generator(Generator::Primes)?,
        _ => return Err(Error::UnknownName(name.to_string())),
    })
}
