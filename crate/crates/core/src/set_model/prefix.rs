use serde::Serialize;

use crate::error::{Error, Result};

/// The members of a set that are `<= horizon`, sorted and distinct.
///
/// Equality compares horizon and elements and ignores the source label.
#[derive(Debug, Clone, Serialize)]
pub struct Prefix {
    horizon: u64,
    elements: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<String>,
}

/// Consecutive differences `n_{k+1} - n_k` of a prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapSequence {
    pub gaps: Vec<u64>,
}

impl PartialEq for Prefix {
    fn eq(&self, other: &Self) -> bool {
        self.horizon == other.horizon && self.elements == other.elements
    }
}

impl Eq for Prefix {}

impl Prefix {
    /// Builds a prefix from strictly increasing elements in `[1, horizon]`.
    pub fn new(horizon: u64, elements: Vec<u64>) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Horizon("horizon must be at least 1".into()));
        }
        if let Some(&first) = elements.first() {
            if first == 0 {
                return Err(Error::InvalidPrefix("0 is not a member of ω".into()));
            }
        }
        if let Some(w) = elements.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPrefix(format!(
                "elements not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        if let Some(&last) = elements.last() {
            if last > horizon {
                return Err(Error::InvalidPrefix(format!(
                    "element {last} exceeds horizon {horizon}"
                )));
            }
        }
        Ok(Prefix {
            horizon,
            elements,
            source: None,
        })
    }

    /// Sorts, deduplicates and truncates arbitrary positive integers to the horizon.
    pub fn from_unsorted(horizon: u64, mut elements: Vec<u64>) -> Result<Self> {
        elements.retain(|&e| e <= horizon);
        elements.sort_unstable();
        elements.dedup();
        Prefix::new(horizon, elements)
    }

    pub(crate) fn from_sorted_unchecked(horizon: u64, elements: Vec<u64>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(elements.last().is_none_or(|&e| e <= horizon));
        Prefix {
            horizon,
            elements,
            source: None,
        }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<u64> {
        self.elements
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.elements.binary_search(&n).is_ok()
    }

    /// `A(n)`, the number of members `<= n`.
    pub fn count_upto(&self, n: u64) -> Result<u64> {
        if n == 0 || n > self.horizon {
            return Err(Error::Horizon(format!(
                "count point {n} outside [1, {}]",
                self.horizon
            )));
        }
        Ok(self.count_le(n))
    }

    /// `A(n)` without the horizon check; `n` past the horizon counts the whole prefix.
    pub(crate) fn count_le(&self, n: u64) -> u64 {
        self.elements.partition_point(|&e| e <= n) as u64
    }

    /// `A(h+1, h+k)`, the number of members in `[h+1, h+k]`.
    pub fn window_count(&self, h: u64, k: u64) -> Result<u64> {
        if k == 0 {
            return Err(Error::Horizon("window length must be at least 1".into()));
        }
        match h.checked_add(k) {
            Some(end) if end <= self.horizon => Ok(self.count_le(end) - self.count_le(h)),
            _ => Err(Error::Horizon(format!(
                "window [{}, {}+{}] beyond horizon {}",
                h.saturating_add(1),
                h,
                k,
                self.horizon
            ))),
        }
    }

    pub fn gap_sequence(&self) -> Result<GapSequence> {
        if self.elements.len() < 2 {
            return Err(Error::Empty(
                "gap sequence needs at least two elements".into(),
            ));
        }
        Ok(GapSequence {
            gaps: self.elements.windows(2).map(|w| w[1] - w[0]).collect(),
        })
    }

    /// The same set seen up to a smaller horizon.
    pub fn restrict(&self, horizon: u64) -> Result<Prefix> {
        if horizon == 0 || horizon > self.horizon {
            return Err(Error::Horizon(format!(
                "cannot restrict horizon {} to {horizon}",
                self.horizon
            )));
        }
        let cut = self.count_le(horizon) as usize;
        Ok(Prefix {
            horizon,
            elements: self.elements[..cut].to_vec(),
            source: self.source.clone(),
        })
    }

    /// Members strictly greater than `floor`, same horizon.
    pub fn beyond(&self, floor: u64) -> Prefix {
        let cut = self.count_le(floor) as usize;
        Prefix::from_sorted_unchecked(self.horizon, self.elements[cut..].to_vec())
    }

    pub fn union(&self, other: &Prefix) -> Prefix {
        let horizon = self.horizon.min(other.horizon);
        let a = &self.elements[..self.count_le(horizon) as usize];
        let b = &other.elements[..other.count_le(horizon) as usize];
        Prefix::from_sorted_unchecked(horizon, merge_sorted(a, b))
    }

    pub fn intersection(&self, other: &Prefix) -> Prefix {
        let horizon = self.horizon.min(other.horizon);
        Prefix::from_sorted_unchecked(horizon, intersect_sorted(&self.elements, &other.elements))
    }

    pub fn difference(&self, other: &Prefix) -> Prefix {
        let horizon = self.horizon.min(other.horizon);
        let a = &self.elements[..self.count_le(horizon) as usize];
        Prefix::from_sorted_unchecked(horizon, subtract_sorted(a, &other.elements))
    }
}

impl GapSequence {
    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }
}

pub(crate) fn merge_sorted(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub(crate) fn intersect_sorted(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub(crate) fn subtract_sorted(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(a.len());
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j >= b.len() || b[j] != x {
            out.push(x);
        }
    }
    out
}
