//! Asymptotic and uniform density.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{int, ratio, serde_pq, Rational};
use crate::set_model::{ExprKind, Prefix, SetExpr};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityProfile {
    pub checkpoints: Vec<u64>,
    /// `A(n)/n` at each checkpoint.
    #[serde(serialize_with = "serde_pq::vec::serialize")]
    pub ratios: Vec<Rational>,
    /// Index of the first checkpoint in the tail.
    pub tail_start: usize,
    #[serde(serialize_with = "serde_pq::serialize")]
    pub running_liminf_estimate: Rational,
    #[serde(serialize_with = "serde_pq::serialize")]
    pub running_limsup_estimate: Rational,
}

/// Profile whose tail is the last half of the checkpoints.
pub fn density_profile(prefix: &Prefix, checkpoints: &[u64]) -> Result<DensityProfile> {
    density_profile_with_tail(prefix, checkpoints, &ratio(1, 2))
}

/// Profile whose tail is the last `tail_fraction` of the checkpoints
/// (at least one checkpoint).
pub fn density_profile_with_tail(
    prefix: &Prefix,
    checkpoints: &[u64],
    tail_fraction: &Rational,
) -> Result<DensityProfile> {
    if checkpoints.is_empty() {
        return Err(Error::Empty("checkpoint list is empty".into()));
    }
    if tail_fraction <= &int(0) || tail_fraction > &int(1) {
        return Err(Error::OutOfRange("tail fraction must lie in (0, 1]".into()));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidPrefix(
            "checkpoints must be strictly increasing".into(),
        ));
    }
    let mut ratios = Vec::with_capacity(checkpoints.len());
    for &n in checkpoints {
        ratios.push(ratio(prefix.count_upto(n)?, n));
    }
    let len = checkpoints.len() as u64;
    // ceil(len * fraction)
    let scaled = tail_fraction * int(len);
    let tail_len = scaled.ceil().to_integer();
    let tail_len = usize::try_from(tail_len.max(BigInt::one()))
        .unwrap_or(usize::MAX)
        .min(checkpoints.len());
    let tail_start = checkpoints.len() - tail_len;
    let tail = &ratios[tail_start..];
    let lo = tail.iter().min().expect("tail is non-empty").clone();
    let hi = tail.iter().max().expect("tail is non-empty").clone();
    Ok(DensityProfile {
        checkpoints: checkpoints.to_vec(),
        ratios,
        tail_start,
        running_liminf_estimate: lo,
        running_limsup_estimate: hi,
    })
}

/// Powers of two up to `horizon`, followed by `horizon` itself.
pub fn doubling_checkpoints(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..64)
        .map(|j| 1u64 << j)
        .take_while(|&p| p <= horizon)
        .collect();
    if out.last() != Some(&horizon) && horizon > 0 {
        out.push(horizon);
    }
    out
}

/// Exact asymptotic density when it follows from the structure of `expr`.
pub fn exact_density(expr: &SetExpr) -> Option<Rational> {
    if let Some(d) = expr.certificate().and_then(|c| c.density.clone()) {
        return Some(d);
    }
    match expr.kind() {
        ExprKind::Explicit(_) => Some(int(0)),
        &ExprKind::ResidueClass { modulus, .. } => Some(ratio(1, modulus)),
        ExprKind::Generator(_) | ExprKind::BlockFamily(_) => None,
        ExprKind::Union(members) => {
            let mut classes = Vec::new();
            for m in members {
                if let Some(c) = Class::of(m) {
                    classes.push(c);
                } else if exact_density(m)? != int(0) {
                    return None;
                }
            }
            union_density(&classes)
        }
        ExprKind::Intersection(a, b) => {
            if is_null(a) || is_null(b) {
                return Some(int(0));
            }
            let (a, b) = (Class::of(a)?, Class::of(b)?);
            Some(a.meet(&b).map_or(int(0), |c| c.density()))
        }
        ExprKind::Difference(a, b) => {
            if is_null(a) {
                return Some(int(0));
            }
            if is_null(b) {
                return exact_density(a);
            }
            let (a, b) = (Class::of(a)?, Class::of(b)?);
            let overlap = a.meet(&b).map_or(int(0), |c| c.density());
            Some(a.density() - overlap)
        }
    }
}

fn is_null(expr: &SetExpr) -> bool {
    exact_density(expr).is_some_and(|d| d.is_zero())
}

/// `{n : n ≡ residue (mod modulus)}` with arbitrary precision.
#[derive(Debug, Clone)]
struct Class {
    modulus: BigInt,
    residue: BigInt,
}

impl Class {
    fn of(expr: &SetExpr) -> Option<Class> {
        match *expr.kind() {
            ExprKind::ResidueClass { modulus, residue } => Some(Class {
                modulus: BigInt::from(modulus),
                residue: BigInt::from(residue % modulus),
            }),
            _ => None,
        }
    }

    fn density(&self) -> Rational {
        Rational::new(BigInt::one(), self.modulus.clone())
    }

    /// Intersection by the Chinese remainder theorem; `None` when empty.
    fn meet(&self, other: &Class) -> Option<Class> {
        let g = self.modulus.extended_gcd(&other.modulus);
        let diff = &other.residue - &self.residue;
        if !(&diff % &g.gcd).is_zero() {
            return None;
        }
        let lcm = &self.modulus / &g.gcd * &other.modulus;
        let step = &other.modulus / &g.gcd;
        let t = (&diff / &g.gcd * &g.x).mod_floor(&step);
        let residue = (&self.residue + &self.modulus * t).mod_floor(&lcm);
        Some(Class {
            modulus: lcm,
            residue,
        })
    }
}

const MAX_INCLUSION_EXCLUSION: usize = 20;

fn union_density(classes: &[Class]) -> Option<Rational> {
    if classes.len() > MAX_INCLUSION_EXCLUSION {
        return None;
    }
    let mut total = int(0);
    // depth-first over subsets, pruning empty intersections
    fn walk(classes: &[Class], from: usize, acc: &Class, size: usize, total: &mut Rational) {
        for i in from..classes.len() {
            if let Some(next) = acc.meet(&classes[i]) {
                let d = next.density();
                if size.is_multiple_of(2) {
                    *total += d;
                } else {
                    *total -= d;
                }
                walk(classes, i + 1, &next, size + 1, total);
            }
        }
    }
    let everything = Class {
        modulus: BigInt::one(),
        residue: BigInt::zero(),
    };
    walk(classes, 0, &everything, 0, &mut total);
    debug_assert!(!total.is_negative());
    Some(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowRow {
    pub k: u64,
    pub sup_count: u64,
    pub inf_count: u64,
    #[serde(serialize_with = "serde_pq::serialize")]
    pub sup_window_avg: Rational,
    #[serde(serialize_with = "serde_pq::serialize")]
    pub inf_window_avg: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniformDensityProfile {
    pub horizon: u64,
    pub burn_in: u64,
    pub rows: Vec<WindowRow>,
    /// `sup_window_avg` never increases as `k` grows (rows in the given order).
    pub sup_nonincreasing: bool,
}

impl UniformDensityProfile {
    pub fn row(&self, k: u64) -> Option<&WindowRow> {
        self.rows.iter().find(|r| r.k == k)
    }
}

/// Extreme window counts `A(h+1, h+k)` over `h` in `[burn_in, horizon - k]`.
pub fn uniform_density_profile(
    prefix: &Prefix,
    k_values: &[u64],
    burn_in: u64,
) -> Result<UniformDensityProfile> {
    if k_values.is_empty() {
        return Err(Error::Empty("window length list is empty".into()));
    }
    let horizon = prefix.horizon();
    let mut rows = Vec::with_capacity(k_values.len());
    for &k in k_values {
        if k == 0 {
            return Err(Error::OutOfRange("window length must be at least 1".into()));
        }
        if k.checked_add(burn_in).is_none_or(|end| end > horizon) {
            return Err(Error::Horizon(format!(
                "window length {k} with burn-in {burn_in} exceeds horizon {horizon}"
            )));
        }
        let (lo, hi) = window_extremes(prefix, k, burn_in);
        rows.push(WindowRow {
            k,
            sup_count: hi,
            inf_count: lo,
            sup_window_avg: ratio(hi, k),
            inf_window_avg: ratio(lo, k),
        });
    }
    let sup_nonincreasing = rows
        .windows(2)
        .all(|w| w[1].sup_window_avg <= w[0].sup_window_avg);
    Ok(UniformDensityProfile {
        horizon,
        burn_in,
        rows,
        sup_nonincreasing,
    })
}

/// Min and max of `A(h+1, h+k)` for `h` in `[h0, N - k]`.
///
/// The count only changes where `h` or `h + k` crosses an element, so it is
/// enough to look at `h0` and at the offsets `n_i` and `n_i - k`.
pub(crate) fn window_extremes(prefix: &Prefix, k: u64, h0: u64) -> (u64, u64) {
    let last = prefix.horizon() - k;
    let count = |h: u64| prefix.count_le(h + k) - prefix.count_le(h);
    let first = count(h0);
    let (mut lo, mut hi) = (first, first);
    for &n in prefix.elements() {
        for h in [n.checked_sub(k), Some(n)].into_iter().flatten() {
            if h >= h0 && h <= last {
                let c = count(h);
                lo = lo.min(c);
                hi = hi.max(c);
            }
        }
    }
    (lo, hi)
}
