//! Binary tree families of sets, the dyadic example, and witness builders.
//!
//! A node `s` of the dyadic family is `A_s = 2^|s|·ω − i(s)` where
//! `i(s) = Σ s_j 2^(j-1)` (bits indexed from 1).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::density::doubling_checkpoints;
use crate::error::{Error, Result};
use crate::rational::{ratio, serde_pq, Rational};
use crate::set_model::{Prefix, SetExpr};
use crate::thinness::BlockDecomposition;

/// Deepest node the dyadic family can represent with `u64` moduli.
pub const MAX_DYADIC_DEPTH: usize = 62;

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString { bits }
    }

    pub fn empty() -> Self {
        BitString::default()
    }

    pub fn zeros(n: usize) -> Self {
        BitString {
            bits: vec![false; n],
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `s` followed by `bit`.
    pub fn child(&self, bit: bool) -> BitString {
        let mut bits = self.bits.clone();
        bits.push(bit);
        BitString { bits }
    }

    /// The first `j` bits.
    pub fn truncate(&self, j: usize) -> BitString {
        BitString {
            bits: self.bits[..j.min(self.len())].to_vec(),
        }
    }

    /// `i(s)`; `None` if it does not fit in a `u64`.
    pub fn index(&self) -> Option<u64> {
        if self.len() > 64 {
            return None;
        }
        Some(
            self.bits
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(j, _)| 1u64 << j)
                .sum(),
        )
    }

    /// All strings of length `n`, ordered by `i(s)`.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = BitString> {
        assert!(n < 64, "too many strings");
        (0u64..1 << n).map(move |i| BitString {
            bits: (0..n).map(|j| i >> j & 1 == 1).collect(),
        })
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// `"0110"`; the empty string and `"()"` are the root.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "()" {
            return Ok(BitString::empty());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::BitString(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::new)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return f.write_str("()");
        }
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `i(s)`.
pub fn i(s: &BitString) -> Result<u64> {
    s.index()
        .ok_or_else(|| Error::OutOfRange(format!("bit string of length {} is too long", s.len())))
}

/// `2^|s|·ω − i(s)`.
pub fn tree_node(s: &BitString) -> Result<SetExpr> {
    if s.len() > MAX_DYADIC_DEPTH {
        return Err(Error::OutOfRange(format!(
            "dyadic nodes go to depth {MAX_DYADIC_DEPTH}, got {}",
            s.len()
        )));
    }
    SetExpr::dyadic(s.len() as u32, i(s)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeFamily {
    Dyadic,
    /// The same set at every node.
    Constant(SetExpr),
    Table(BTreeMap<BitString, SetExpr>),
}

impl TreeFamily {
    pub fn node(&self, s: &BitString) -> Result<SetExpr> {
        match self {
            TreeFamily::Dyadic => tree_node(s),
            TreeFamily::Constant(e) => Ok(e.clone()),
            TreeFamily::Table(t) => t
                .get(s)
                .cloned()
                .ok_or_else(|| Error::MissingNode(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TreeCondition {
    /// `A_∅ = ω`
    S1,
    /// `A_s = A_s0 ∪ A_s1`
    S2,
    /// `A_s0 ∩ A_s1 = ∅`
    S3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeViolation {
    pub condition: TreeCondition,
    pub node: BitString,
    /// Smallest element showing the failure.
    pub witness: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeReport {
    pub depth: usize,
    pub horizon: u64,
    pub nodes_checked: usize,
    pub violations: Vec<TreeViolation>,
}

impl TreeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn first_difference(a: &[u64], b: &[u64]) -> Option<u64> {
    let (mut x, mut y) = (a.iter().peekable(), b.iter().peekable());
    loop {
        match (x.peek(), y.peek()) {
            (Some(&&p), Some(&&q)) if p == q => {
                x.next();
                y.next();
            }
            (Some(&&p), Some(&&q)) => return Some(p.min(q)),
            (Some(&&p), None) => return Some(p),
            (None, Some(&&q)) => return Some(q),
            (None, None) => return None,
        }
    }
}

/// Checks S1 at the root and S2, S3 at every node of depth `< depth`, on
/// prefixes up to `horizon`.
pub fn verify_tree_conditions(
    family: &TreeFamily,
    depth: usize,
    horizon: u64,
) -> Result<TreeReport> {
    if depth == 0 {
        return Err(Error::OutOfRange("depth must be at least 1".into()));
    }
    if depth >= 64 || horizon < 1u64 << depth {
        return Err(Error::Horizon(format!(
            "horizon {horizon} is below 2^{depth}"
        )));
    }
    let mut violations = Vec::new();
    let root = family.node(&BitString::empty())?.enumerate_upto(horizon)?;
    let omega: Vec<u64> = (1..=horizon).collect();
    if let Some(w) = first_difference(root.elements(), &omega) {
        violations.push(TreeViolation {
            condition: TreeCondition::S1,
            node: BitString::empty(),
            witness: w,
        });
    }
    let mut level = vec![(BitString::empty(), root)];
    let mut nodes_checked = 1;
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 2);
        for (s, a) in level {
            let a0 = family.node(&s.child(false))?.enumerate_upto(horizon)?;
            let a1 = family.node(&s.child(true))?.enumerate_upto(horizon)?;
            nodes_checked += 2;
            if let Some(w) = first_difference(a.elements(), a0.union(&a1).elements()) {
                violations.push(TreeViolation {
                    condition: TreeCondition::S2,
                    node: s.clone(),
                    witness: w,
                });
            }
            if let Some(&w) = a0.intersection(&a1).elements().first() {
                violations.push(TreeViolation {
                    condition: TreeCondition::S3,
                    node: s.clone(),
                    witness: w,
                });
            }
            next.push((s.child(false), a0));
            next.push((s.child(true), a1));
        }
        level = next;
    }
    Ok(TreeReport {
        depth,
        horizon,
        nodes_checked,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainLink {
    pub node: BitString,
    pub set: SetExpr,
    /// `A_{x↾j} \ A_{x↾j+1}`
    pub difference: SetExpr,
}

/// `(A_{x↾j}, A_{x↾j} \ A_{x↾j+1})` for `j < |x|` in the dyadic family.
///
/// The difference is the sibling node, a single residue class mod `2^(j+1)`.
pub fn branch_chain(x: &BitString) -> Result<Vec<ChainLink>> {
    (0..x.len())
        .map(|j| {
            let node = x.truncate(j);
            let sibling = node.child(!x.bits()[j]);
            Ok(ChainLink {
                set: tree_node(&node)?,
                difference: tree_node(&sibling)?,
                node,
            })
        })
        .collect()
}

/// Union over `k` of the first `n_k` elements of the `k`-th branch difference.
pub fn build_ar_set(x: &BitString, indices: &[u64], horizon: u64) -> Result<Prefix> {
    if horizon == 0 {
        return Err(Error::Horizon("horizon must be at least 1".into()));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::OutOfRange(
            "indices must be strictly increasing".into(),
        ));
    }
    if indices.len() > x.len() {
        return Err(Error::OutOfRange(format!(
            "{} indices need a branch of length at least {}, got {}",
            indices.len(),
            indices.len(),
            x.len()
        )));
    }
    let chain = branch_chain(&x.truncate(indices.len()))?;
    let mut elements = Vec::new();
    for (k, (link, &n)) in chain.iter().zip(indices).enumerate() {
        if n == 0 {
            continue;
        }
        let crate::set_model::ExprKind::ResidueClass { modulus, residue } = *link.difference.kind()
        else {
            unreachable!("dyadic nodes are residue classes");
        };
        // n-th element of {m·modulus − (modulus − residue)}
        let last = (n - 1)
            .checked_mul(modulus)
            .and_then(|v| v.checked_add(residue))
            .filter(|&v| v <= horizon)
            .ok_or_else(|| {
                Error::Horizon(format!(
                    "segment {k} needs {n} elements of {} within {horizon}",
                    link.difference
                ))
            })?;
        elements.extend((0..n).map(|m| residue + m * modulus));
        debug_assert_eq!(elements.last(), Some(&last));
    }
    Ok(Prefix::from_unsorted(horizon, elements)?.with_source(format!("ar({x})")))
}

/// Doubling-checkpoint evidence that a finite-horizon set looks super thin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuperThinDiagnostic {
    /// Doubling checkpoints at or above `sqrt(N)`.
    pub checkpoints: Vec<u64>,
    #[serde(serialize_with = "serde_pq::vec::serialize")]
    pub density_ratios: Vec<Rational>,
    /// Smallest gap ending in `(c_{i-1}, c_i]`, `None` if the window has no gap.
    pub window_min_gaps: Vec<Option<u64>>,
    pub min_gap_nondecreasing: bool,
    /// `A(c')/c' <= A(c)/c` between consecutive checkpoints `c < c'`.
    pub density_halving: bool,
}

impl SuperThinDiagnostic {
    pub fn passed(&self) -> bool {
        self.min_gap_nondecreasing && self.density_halving
    }
}

pub fn super_thin_diagnostic(prefix: &Prefix) -> SuperThinDiagnostic {
    let n = prefix.horizon();
    let floor = (n as f64).sqrt() as u64;
    let checkpoints: Vec<u64> = doubling_checkpoints(n)
        .into_iter()
        .filter(|&c| c >= floor.max(1))
        .collect();
    let count = |c: u64| prefix.elements().partition_point(|&x| x <= c) as u64;
    let density_ratios: Vec<Rational> = checkpoints.iter().map(|&c| ratio(count(c), c)).collect();
    let e = prefix.elements();
    let mut window_min_gaps = Vec::with_capacity(checkpoints.len());
    let mut lo = 0u64;
    for &c in &checkpoints {
        let gap = e
            .windows(2)
            .filter(|w| w[1] > lo && w[1] <= c)
            .map(|w| w[1] - w[0])
            .min();
        window_min_gaps.push(gap);
        lo = c;
    }
    let present: Vec<u64> = window_min_gaps.iter().flatten().copied().collect();
    let min_gap_nondecreasing = present.windows(2).all(|w| w[0] <= w[1]);
    // the last checkpoint is N, which may be less than double the previous one
    // the lower half of the factor-2 band, A(c') >= A(c)/2, always holds
    let density_halving = checkpoints
        .windows(2)
        .all(|w| count(w[1]) * w[0] <= count(w[0]) * w[1]);
    SuperThinDiagnostic {
        checkpoints,
        density_ratios,
        window_min_gaps,
        min_gap_nondecreasing,
        density_halving,
    }
}

/// `B = B_0 ∪ B_1 ∪ … ∪ B_d` with `B_0 = {1}` and `B_j` the earliest `j`
/// consecutive elements of `A_{x↾j}` after `max(B_{j-1})` whose gaps are `<= m`.
pub fn case1_witness(
    family: &TreeFamily,
    x: &BitString,
    m: u64,
    horizon: u64,
) -> Result<BlockDecomposition> {
    if m == 0 {
        return Err(Error::OutOfRange("gap bound M must be at least 1".into()));
    }
    if horizon == 0 {
        return Err(Error::Horizon("horizon must be at least 1".into()));
    }
    let mut blocks = vec![vec![1u64]];
    for j in 1..=x.len() {
        let a = family.node(&x.truncate(j))?.enumerate_upto(horizon)?;
        let after = blocks[j - 1][blocks[j - 1].len() - 1];
        let e = a.elements();
        let start = e.partition_point(|&v| v <= after);
        let found = earliest_run(&e[start..], j, m).ok_or(Error::NoQualifyingRun {
            depth: j,
            length: j,
            max_gap: m,
            horizon,
        })?;
        blocks.push(e[start + found..start + found + j].to_vec());
    }
    BlockDecomposition::from_blocks(horizon, blocks, None)
}

/// Start of the first `len` consecutive entries with gaps `<= m`.
fn earliest_run(e: &[u64], len: usize, m: u64) -> Option<usize> {
    if e.len() < len {
        return None;
    }
    let mut start = 0;
    for k in 0..e.len() {
        if k > start && e[k] - e[k - 1] > m {
            start = k;
        }
        if k + 1 - start == len {
            return Some(start);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set_model::{parse_set_expr, BlockFamilyKind};
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn upto(e: &SetExpr, n: u64) -> Vec<u64> {
        e.enumerate_upto(n).unwrap().into_elements()
    }

    #[test]
    fn bit_strings() {
        assert_eq!(i(&bs("01")).unwrap(), 2);
        assert_eq!(i(&bs("111")).unwrap(), 7);
        assert_eq!(bs("()"), BitString::empty());
        assert_eq!(bs(""), BitString::empty());
        assert_eq!(bs("0110").to_string(), "0110");
        assert_eq!(BitString::empty().to_string(), "()");
        assert!(matches!(
            "012".parse::<BitString>(),
            Err(Error::BitString(_))
        ));
        assert_eq!(BitString::all_of_length(2).count(), 4);
    }

    #[test]
    fn dyadic_nodes() {
        assert_eq!(upto(&tree_node(&bs("01")).unwrap(), 14), vec![2, 6, 10, 14]);
        assert_eq!(
            upto(&tree_node(&BitString::empty()).unwrap(), 5),
            vec![1, 2, 3, 4, 5]
        );
        assert_eq!(upto(&tree_node(&bs("111")).unwrap(), 20), vec![1, 9, 17]);
        assert!(tree_node(&BitString::zeros(63)).is_err());
    }

    #[test]
    fn dyadic_family_satisfies_s1_to_s3() {
        let r = verify_tree_conditions(&TreeFamily::Dyadic, 3, 100).unwrap();
        assert!(r.passed());
        assert_eq!(r.nodes_checked, 15);
        assert!(verify_tree_conditions(&TreeFamily::Dyadic, 3, 7).is_err());
        assert!(verify_tree_conditions(&TreeFamily::Dyadic, 0, 7).is_err());
    }

    #[test]
    fn broken_family_reports_witnesses() {
        let even = parse_set_expr("ap(2,2)").unwrap();
        let table = BTreeMap::from([
            (BitString::empty(), SetExpr::naturals()),
            (bs("0"), even.clone()),
            (bs("1"), even),
        ]);
        let r = verify_tree_conditions(&TreeFamily::Table(table), 1, 10).unwrap();
        assert_eq!(
            r.violations,
            vec![
                TreeViolation {
                    condition: TreeCondition::S2,
                    node: BitString::empty(),
                    witness: 1
                },
                TreeViolation {
                    condition: TreeCondition::S3,
                    node: BitString::empty(),
                    witness: 2
                },
            ]
        );
        let missing = verify_tree_conditions(&TreeFamily::Table(BTreeMap::new()), 1, 10);
        assert!(matches!(missing, Err(Error::MissingNode(_))));
    }

    #[test]
    fn branch_chain_examples() {
        let c = branch_chain(&bs("00")).unwrap();
        assert_eq!(upto(&c[0].difference, 9), vec![1, 3, 5, 7, 9]);
        assert_eq!(upto(&c[1].difference, 14), vec![2, 6, 10, 14]);
        let c = branch_chain(&bs("1")).unwrap();
        assert_eq!(upto(&c[0].difference, 8), vec![2, 4, 6, 8]);
        assert!(branch_chain(&BitString::empty()).unwrap().is_empty());
    }

    #[test]
    fn chain_differences_match_set_difference() {
        for x in ["010", "111", "0011"] {
            for link in branch_chain(&bs(x)).unwrap() {
                let j = link.node.len();
                let next = tree_node(&bs(x).truncate(j + 1)).unwrap();
                let diff = SetExpr::difference(link.set.clone(), next);
                assert_eq!(upto(&diff, 10_000), upto(&link.difference, 10_000));
            }
        }
    }

    #[test]
    fn ar_set_examples() {
        assert_eq!(
            build_ar_set(&bs("00"), &[1, 2], 50).unwrap().elements(),
            &[1, 2, 6]
        );
        assert_eq!(build_ar_set(&bs("0"), &[1], 10).unwrap().elements(), &[1]);
        let ar = build_ar_set(&bs("000"), &[2, 3, 4], 200).unwrap();
        assert_eq!(ar.elements(), &[1, 2, 3, 4, 6, 10, 12, 20, 28]);
        assert!(build_ar_set(&bs("000"), &[2, 3, 4], 27).is_err());
        assert!(build_ar_set(&bs("0"), &[1, 2], 100).is_err());
        assert!(build_ar_set(&bs("00"), &[2, 2], 100).is_err());
    }

    #[test]
    fn ar_set_diagnostic() {
        let indices: Vec<u64> = (1..=10).collect();
        let ar = build_ar_set(&BitString::zeros(10), &indices, 100_000).unwrap();
        let d = super_thin_diagnostic(&ar);
        assert!(d.passed(), "{d:?}");
    }

    #[test]
    fn case1_examples() {
        let omega = TreeFamily::Constant(SetExpr::naturals());
        let b = case1_witness(&omega, &bs("000"), 1, 100).unwrap();
        assert_eq!(b.blocks, vec![vec![1], vec![2], vec![3, 4], vec![5, 6, 7]]);
        assert!(crate::thinness::run_statistic(&b.to_prefix(), 1).unwrap() >= 3);

        let err = case1_witness(&TreeFamily::Dyadic, &bs("0101"), 1, 1 << 20).unwrap_err();
        assert!(matches!(err, Error::NoQualifyingRun { depth: 2, .. }));

        let run = TreeFamily::Constant(SetExpr::block_family(BlockFamilyKind::Pow2Run));
        let b = case1_witness(&run, &bs("0000"), 1, 1 << 7).unwrap();
        assert_eq!(
            b.blocks,
            vec![
                vec![1],
                vec![2],
                vec![3, 4],
                vec![8, 9, 10],
                vec![16, 17, 18, 19]
            ]
        );
    }

    #[test]
    fn earliest_runs() {
        assert_eq!(earliest_run(&[1, 3, 4, 5, 9], 3, 1), Some(1));
        assert_eq!(earliest_run(&[1, 3, 5], 2, 1), None);
        assert_eq!(earliest_run(&[7], 1, 1), Some(0));
        assert_eq!(earliest_run(&[], 1, 1), None);
    }

    proptest! {
        #[test]
        fn children_partition_their_parent(bits in proptest::collection::vec(any::<bool>(), 0..8), n in 1u64..3000) {
            let s = BitString::new(bits);
            let a = tree_node(&s).unwrap().enumerate_upto(n).unwrap();
            let a0 = tree_node(&s.child(false)).unwrap().enumerate_upto(n).unwrap();
            let a1 = tree_node(&s.child(true)).unwrap().enumerate_upto(n).unwrap();
            prop_assert!(a0.intersection(&a1).is_empty());
            prop_assert_eq!(a0.union(&a1), a);
        }

        #[test]
        fn branch_differences_partition_omega(bits in proptest::collection::vec(any::<bool>(), 1..10)) {
            let x = BitString::new(bits);
            let n = 2000u64;
            let mut covered = tree_node(&x).unwrap().enumerate_upto(n).unwrap();
            for link in branch_chain(&x).unwrap() {
                let d = link.difference.enumerate_upto(n).unwrap();
                prop_assert!(covered.intersection(&d).is_empty());
                covered = covered.union(&d);
            }
            prop_assert_eq!(covered.len() as u64, n);
        }

        #[test]
        fn case1_blocks_stay_in_their_branch_sets(bits in proptest::collection::vec(any::<bool>(), 1..6)) {
            // nested family: A_s = pow2run ∪ 2^|s|ω − i(s)
            let x = BitString::new(bits);
            let table: BTreeMap<BitString, SetExpr> = (0..=x.len())
                .map(|j| {
                    let s = x.truncate(j);
                    let e = SetExpr::union(vec![
                        SetExpr::block_family(BlockFamilyKind::Pow2Run),
                        tree_node(&s).unwrap(),
                    ]);
                    (s, e)
                })
                .collect();
            let family = TreeFamily::Table(table);
            let b = case1_witness(&family, &x, 1, 1 << 12).unwrap();
            let whole = b.to_prefix();
            for j in 1..=x.len() {
                let a = family.node(&x.truncate(j)).unwrap().enumerate_upto(1 << 12).unwrap();
                let earlier: Vec<u64> = b.blocks[..j].iter().flatten().copied().collect();
                for v in whole.difference(&a).elements() {
                    prop_assert!(earlier.contains(v));
                }
            }
        }
    }
}
