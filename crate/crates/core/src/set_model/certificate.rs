//! Declared growth metadata attached to set expressions.
//!
//! Certificates are trusted: they are never inferred. Every materialization
//! checks the parts that can be checked on a finite prefix (gap floors and
//! block size bounds) and fails loudly on a contradiction.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A nondecreasing function of the (1-based) index `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GrowthFn {
    Constant(u64),
    /// `floor((slope * k + offset) / divisor)`
    Linear {
        slope: u64,
        offset: u64,
        divisor: u64,
    },
    /// `base^(k - shift) - (linear * k + constant)`, floored at zero.
    Exponential {
        base: u64,
        shift: u32,
        linear: u64,
        constant: u64,
    },
    /// `1^3 + 2^3 + ... + k^3 + offset`
    CubeSum {
        offset: u64,
    },
}

impl GrowthFn {
    pub fn eval(&self, k: u64) -> u128 {
        let k = k as u128;
        match *self {
            GrowthFn::Constant(c) => c as u128,
            GrowthFn::Linear {
                slope,
                offset,
                divisor,
            } => {
                (slope as u128)
                    .saturating_mul(k)
                    .saturating_add(offset as u128)
                    / divisor.max(1) as u128
            }
            GrowthFn::Exponential {
                base,
                shift,
                linear,
                constant,
            } => {
                let exp = k.saturating_sub(shift as u128);
                let power = match u32::try_from(exp) {
                    Ok(e) => (base as u128).checked_pow(e).unwrap_or(u128::MAX),
                    Err(_) => u128::MAX,
                };
                let minus = (linear as u128)
                    .saturating_mul(k)
                    .saturating_add(constant as u128);
                power.saturating_sub(minus)
            }
            GrowthFn::CubeSum { offset } => {
                let t = k.saturating_mul(k + 1) / 2;
                t.saturating_mul(t).saturating_add(offset as u128)
            }
        }
    }

    pub fn tends_to_infinity(&self) -> bool {
        match *self {
            GrowthFn::Constant(_) => false,
            GrowthFn::Linear { slope, .. } => slope > 0,
            GrowthFn::Exponential { base, .. } => base >= 2,
            GrowthFn::CubeSum { .. } => true,
        }
    }
}

impl fmt::Display for GrowthFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GrowthFn::Constant(c) => write!(f, "{c}"),
            GrowthFn::Linear {
                slope,
                offset,
                divisor,
            } => {
                let body = match (slope, offset) {
                    (1, 0) => "k".to_string(),
                    (s, 0) => format!("{s}k"),
                    (1, o) => format!("k+{o}"),
                    (s, o) => format!("{s}k+{o}"),
                };
                if divisor > 1 {
                    write!(f, "floor(({body})/{divisor})")
                } else {
                    write!(f, "{body}")
                }
            }
            GrowthFn::Exponential {
                base,
                shift,
                linear,
                constant,
            } => {
                if shift == 0 {
                    write!(f, "{base}^k")?;
                } else {
                    write!(f, "{base}^(k-{shift})")?;
                }
                match (linear, constant) {
                    (0, 0) => Ok(()),
                    (0, c) => write!(f, "-{c}"),
                    (1, 0) => write!(f, "-k"),
                    (l, 0) => write!(f, "-{l}k"),
                    (l, c) => write!(f, "-({l}k+{c})"),
                }
            }
            GrowthFn::CubeSum { offset } => write!(f, "(1^3+...+k^3)+{offset}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Series {
    Convergent,
    Divergent,
}

/// Declared structure of a set as ordered finite blocks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BlockCertificate {
    /// Upper bound on block sizes; `None` means block sizes are unbounded.
    pub max_size: Option<usize>,
    /// Lower bound on `min(A_{k+1}) - max(A_k)`.
    pub gap_floor: Option<GrowthFn>,
    /// Behavior of the sum of reciprocal block gaps for this decomposition.
    pub gap_series: Option<Series>,
    /// Every decomposition into blocks of bounded size has a divergent
    /// reciprocal block-gap series.
    pub bounded_decompositions_diverge: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// Lower bound `g(k) <= n_{k+1} - n_k` on consecutive element gaps.
    pub gap_floor: Option<GrowthFn>,
    /// Behavior of `sum 1/(n_{k+1} - n_k)`.
    pub gap_series: Option<Series>,
    /// Infinitely many consecutive gaps are at most this value.
    pub recurring_gap: Option<u64>,
    pub blocks: Option<BlockCertificate>,
    /// Declared asymptotic density.
    #[serde(skip)]
    pub density: Option<Rational>,
}

impl Certificate {
    pub fn with_gap_floor(mut self, g: GrowthFn) -> Self {
        self.gap_floor = Some(g);
        self
    }

    pub fn with_gap_series(mut self, s: Series) -> Self {
        self.gap_series = Some(s);
        self
    }

    pub fn with_recurring_gap(mut self, c: u64) -> Self {
        self.recurring_gap = Some(c);
        self
    }

    pub fn with_blocks(mut self, b: BlockCertificate) -> Self {
        self.blocks = Some(b);
        self
    }

    pub fn with_density(mut self, d: Rational) -> Self {
        self.density = Some(d);
        self
    }

    /// Checks the element-level gap floor and, when blocks are declared with a
    /// size bound and a gap floor, the window condition they imply: among any
    /// `M` consecutive gaps starting at element `i`, one is an inter-block gap
    /// after a block of index `>= ceil(i/M)`.
    pub fn validate_elements(&self, source: &str, elements: &[u64]) -> Result<()> {
        if let Some(g) = &self.gap_floor {
            for (idx, w) in elements.windows(2).enumerate() {
                let k = idx as u64 + 1;
                let gap = w[1] - w[0];
                if (gap as u128) < g.eval(k) {
                    return Err(contradiction(
                        source,
                        format!(
                            "gap {gap} after element {} below floor g({k}) = {}",
                            w[0],
                            g.eval(k)
                        ),
                    ));
                }
            }
        }
        if let Some(BlockCertificate {
            max_size: Some(m),
            gap_floor: Some(g),
            ..
        }) = &self.blocks
        {
            let m = (*m).max(1);
            let gaps: Vec<u64> = elements.windows(2).map(|w| w[1] - w[0]).collect();
            for (i0, window) in gaps.windows(m).enumerate() {
                let i = i0 as u64 + 1;
                let block_index = i.div_ceil(m as u64);
                let widest = *window.iter().max().expect("window is non-empty");
                if (widest as u128) < g.eval(block_index) {
                    return Err(contradiction(
                        source,
                        format!(
                            "no gap among the {m} gaps after element {} reaches block floor g({block_index}) = {}",
                            elements[i0],
                            g.eval(block_index)
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Checks a block certificate against explicitly known blocks.
    pub fn validate_blocks(&self, source: &str, blocks: &[Vec<u64>]) -> Result<()> {
        let Some(cert) = &self.blocks else {
            return Ok(());
        };
        if let Some(m) = cert.max_size {
            if let Some((k, b)) = blocks.iter().enumerate().find(|(_, b)| b.len() > m) {
                return Err(contradiction(
                    source,
                    format!("block {} has {} elements, bound is {m}", k + 1, b.len()),
                ));
            }
        }
        if let Some(g) = &cert.gap_floor {
            for (idx, pair) in blocks.windows(2).enumerate() {
                let k = idx as u64 + 1;
                let gap = pair[1][0] - pair[0][pair[0].len() - 1];
                if (gap as u128) < g.eval(k) {
                    return Err(contradiction(
                        source,
                        format!("block gap {gap} after block {k} below floor {}", g.eval(k)),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn contradiction(source: &str, detail: String) -> Error {
    Error::Certificate {
        source_name: source.to_string(),
        detail,
    }
}
