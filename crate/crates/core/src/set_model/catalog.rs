//! Named monotone enumerators and block families.

use std::fmt;

use serde::Serialize;

use super::certificate::{BlockCertificate, Certificate, GrowthFn, Series};

/// Catalog generators `k -> n_k`, indexed from `k = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Generator {
    /// `{b^k : k >= 1}`
    Powers(u64),
    /// `{2^k + 1 : k >= 1}`
    PowersPlusOne,
    /// `{1 + 2 + ... + k : k >= 1}`
    Triangular,
    Primes,
}

/// Catalog block families `k -> A_k`, indexed from `k = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlockFamilyKind {
    /// `A_k = {2^k, 2^k + 1, ..., 2^k + k}`
    Pow2Run,
    /// `A_k = {2^k, 2^k + k}`
    Pow2Pair,
    /// `{b_k, b_k + 1}` for odd `k`, `{b_k}` for even `k`, `b_k = 1 + ... + k`
    TriY,
    /// `A_p = {a_p, a_p + 1^3, ..., a_p + 1^3 + ... + p^3}` with `a_1 = 1`,
    /// `a_p = a_{p-1} + 2(1^3 + ... + (p-1)^3) + 1`
    CubicGap,
    /// `A_k = {2^k, ..., 2^k + k - 1}`, the positions where the stretch
    /// sequence takes its exceptional value.
    Pow2Stretch,
}

impl Generator {
    pub fn elements_upto(&self, n: u64) -> Vec<u64> {
        match *self {
            Generator::Powers(b) => geometric(b, 0, n),
            Generator::PowersPlusOne => geometric(2, 1, n),
            Generator::Triangular => (1u64..)
                .map(|k| k * (k + 1) / 2)
                .take_while(|&t| t <= n)
                .collect(),
            Generator::Primes => primes_upto(n),
        }
    }

    pub fn certificate(&self) -> Option<Certificate> {
        let zero = crate::rational::int(0);
        match *self {
            // gaps (b-1) b^k >= b^(k-1)
            Generator::Powers(b) => Some(
                Certificate::default()
                    .with_gap_floor(GrowthFn::Exponential {
                        base: b,
                        shift: 1,
                        linear: 0,
                        constant: 0,
                    })
                    .with_gap_series(Series::Convergent)
                    .with_density(zero),
            ),
            // gaps 2^k >= 2^(k-1)
            Generator::PowersPlusOne => Some(
                Certificate::default()
                    .with_gap_floor(GrowthFn::Exponential {
                        base: 2,
                        shift: 1,
                        linear: 0,
                        constant: 0,
                    })
                    .with_gap_series(Series::Convergent)
                    .with_density(zero),
            ),
            // gaps k + 1 >= k, harmonic reciprocal sum
            Generator::Triangular => Some(
                Certificate::default()
                    .with_gap_floor(GrowthFn::Linear {
                        slope: 1,
                        offset: 0,
                        divisor: 1,
                    })
                    .with_gap_series(Series::Divergent)
                    .with_blocks(BlockCertificate {
                        bounded_decompositions_diverge: true,
                        ..Default::default()
                    })
                    .with_density(zero),
            ),
            Generator::Primes => None,
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        match *self {
            Generator::Powers(b) => {
                let mut x = b;
                while x < n {
                    match x.checked_mul(b) {
                        Some(y) => x = y,
                        None => return false,
                    }
                }
                x == n
            }
            Generator::PowersPlusOne => n >= 3 && (n - 1).is_power_of_two(),
            Generator::Triangular => {
                // n = k(k+1)/2  <=>  8n + 1 is an odd square
                let d = 8u128 * n as u128 + 1;
                let r = isqrt_u128(d);
                r * r == d
            }
            Generator::Primes => is_prime(n),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Powers(b) => write!(f, "pow({b})"),
            Generator::PowersPlusOne => write!(f, "pow2plus1"),
            Generator::Triangular => write!(f, "tri"),
            Generator::Primes => write!(f, "primes"),
        }
    }
}

impl BlockFamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            BlockFamilyKind::Pow2Run => "pow2run",
            BlockFamilyKind::Pow2Pair => "pow2pair",
            BlockFamilyKind::TriY => "triY",
            BlockFamilyKind::CubicGap => "cubicgap",
            BlockFamilyKind::Pow2Stretch => "pow2stretch",
        }
    }

    /// Blocks whose minimum is `<= n`, in order. The last block may extend past `n`.
    pub fn blocks_upto(&self, n: u64) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let mut cubic_start: u64 = 1;
        for k in 1u64.. {
            let block = match self {
                BlockFamilyKind::Pow2Run => pow2(k).map(|p| (p..=p + k).collect()),
                BlockFamilyKind::Pow2Pair => pow2(k).map(|p| vec![p, p + k]),
                BlockFamilyKind::Pow2Stretch => pow2(k).map(|p| (p..p + k).collect()),
                BlockFamilyKind::TriY => {
                    let b = k * (k + 1) / 2;
                    Some(if k % 2 == 1 { vec![b, b + 1] } else { vec![b] })
                }
                BlockFamilyKind::CubicGap => {
                    let a = cubic_start;
                    let block: Option<Vec<u64>> = (0..=k)
                        .map(|j| cube_sum(j).and_then(|s| a.checked_add(s)))
                        .collect();
                    // a_{k+1} = a_k + 2 (1^3 + ... + k^3) + 1
                    cubic_start = cube_sum(k)
                        .and_then(|s| s.checked_mul(2))
                        .and_then(|s| s.checked_add(a))
                        .and_then(|s| s.checked_add(1))
                        .unwrap_or(u64::MAX);
                    block
                }
            };
            match block {
                Some(b) if b[0] <= n => out.push(b),
                _ => break,
            }
            if self == &BlockFamilyKind::CubicGap && cubic_start == u64::MAX {
                break;
            }
        }
        out
    }

    pub fn certificate(&self) -> Certificate {
        match self {
            // block gap 2^(k+1) - (2^k + k) = 2^k - k
            BlockFamilyKind::Pow2Run => Certificate::default().with_blocks(BlockCertificate {
                max_size: None,
                gap_floor: Some(exp_minus_k()),
                ..Default::default()
            }),
            // element gaps alternate k and 2^k - k, both >= ceil(j/2) at element index j
            BlockFamilyKind::Pow2Pair => Certificate::default()
                .with_gap_floor(GrowthFn::Linear {
                    slope: 1,
                    offset: 1,
                    divisor: 2,
                })
                .with_gap_series(Series::Divergent)
                .with_blocks(BlockCertificate {
                    max_size: Some(2),
                    gap_floor: Some(exp_minus_k()),
                    gap_series: Some(Series::Convergent),
                    bounded_decompositions_diverge: false,
                }),
            // block gaps k (after {b_k, b_k+1}) or k+1 (after {b_k}); contains the triangular numbers
            BlockFamilyKind::TriY => {
                Certificate::default()
                    .with_recurring_gap(1)
                    .with_blocks(BlockCertificate {
                        max_size: Some(2),
                        gap_floor: Some(GrowthFn::Linear {
                            slope: 1,
                            offset: 0,
                            divisor: 1,
                        }),
                        gap_series: Some(Series::Divergent),
                        bounded_decompositions_diverge: true,
                    })
            }
            // block gap a_{p+1} - (a_p + b_p) = b_p + 1, block sizes p + 1
            BlockFamilyKind::CubicGap => Certificate::default().with_blocks(BlockCertificate {
                max_size: None,
                gap_floor: Some(GrowthFn::CubeSum { offset: 1 }),
                ..Default::default()
            }),
            // block gap 2^(k+1) - (2^k + k - 1) = 2^k - k + 1
            BlockFamilyKind::Pow2Stretch => Certificate::default().with_blocks(BlockCertificate {
                max_size: None,
                gap_floor: Some(GrowthFn::Exponential {
                    base: 2,
                    shift: 0,
                    linear: 1,
                    constant: 0,
                }),
                ..Default::default()
            }),
        }
    }
}

impl fmt::Display for BlockFamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn exp_minus_k() -> GrowthFn {
    GrowthFn::Exponential {
        base: 2,
        shift: 0,
        linear: 1,
        constant: 0,
    }
}

fn pow2(k: u64) -> Option<u64> {
    u32::try_from(k).ok().and_then(|k| 2u64.checked_pow(k))
}

/// `1^3 + ... + j^3 = (j(j+1)/2)^2`
fn cube_sum(j: u64) -> Option<u64> {
    let t = j.checked_mul(j + 1)? / 2;
    t.checked_mul(t)
}

/// `{base^k + plus : k >= 1}` up to `n`.
fn geometric(base: u64, plus: u64, n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut power = base;
    loop {
        match power.checked_add(plus) {
            Some(v) if v <= n => out.push(v),
            _ => break,
        }
        match power.checked_mul(base) {
            Some(p) => power = p,
            None => break,
        }
    }
    out
}

pub fn primes_upto(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = usize::try_from(n).expect("sieve bound fits in memory");
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}
