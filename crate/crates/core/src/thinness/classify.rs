//! Class membership verdicts.
//!
//! A verdict is symbolic when the certificates carried by an expression (after
//! validation against the materialized prefix) entail the class or its
//! negation. Otherwise it comes from finite-horizon diagnostics. With
//! `W_i = (N/2^(i+1), N/2^i]` and burn-in `B = isqrt(N)`:
//!
//! * `Thin`: ratios `A(n)/n` at `n = N/2^j >= sqrt(N)`; the largest ratio over
//!   the later half is at most 3/4 of the largest over the earlier half.
//! * `SuperThin`: the smallest gap ending in `W_0` exceeds `log2(N)/2` and the
//!   smallest gaps ending in `W_2, W_1, W_0` do not decrease.
//! * `VeryThin`: for some `M` in the grid, the longest `M`-run among elements
//!   in `(B, H]` is the same for `H = N/4` and `H = N`, and the smallest greedy
//!   inter-block gaps ending in `W_2, W_1, W_0` strictly increase with the last
//!   one above `log2(N)/2`.
//! * `SuperSuperThin`: the reciprocal gaps over the later half of the gap
//!   indices sum to at most 1/4.
//! * `VeryVeryThin`: the run condition of `VeryThin` holds for some `M` whose
//!   greedy inter-block gaps have later-half reciprocal sum at most 1/4.
//! * `UniformlyThin`: with `k` the largest power of two `<= log2(N)`, the
//!   largest window average at length `k` is at most half of the one at
//!   length `k/4`, windows starting after `B`.
//!
//! An empirical failure of a class is passed down to every class contained in
//! it, so the reported statuses never contradict the inclusions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::runs::{greedy_blocks, longest_run, reciprocal_sum_at_most};
use crate::density::{exact_density, window_extremes};
use crate::error::{Error, Result};
use crate::rational::{int, ratio, serde_pq, Rational};
use crate::set_model::{ExprKind, Prefix, SetExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ThinClass {
    Thin,
    SuperThin,
    VeryThin,
    SuperSuperThin,
    VeryVeryThin,
    UniformlyThin,
}

impl ThinClass {
    pub const ALL: [ThinClass; 6] = [
        ThinClass::Thin,
        ThinClass::SuperThin,
        ThinClass::VeryThin,
        ThinClass::SuperSuperThin,
        ThinClass::VeryVeryThin,
        ThinClass::UniformlyThin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ThinClass::Thin => "Thin",
            ThinClass::SuperThin => "SuperThin",
            ThinClass::VeryThin => "VeryThin",
            ThinClass::SuperSuperThin => "SuperSuperThin",
            ThinClass::VeryVeryThin => "VeryVeryThin",
            ThinClass::UniformlyThin => "UniformlyThin",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    /// Classes directly containing this one.
    pub fn parents(self) -> &'static [ThinClass] {
        match self {
            ThinClass::SuperSuperThin => &[ThinClass::SuperThin, ThinClass::VeryVeryThin],
            ThinClass::SuperThin | ThinClass::VeryVeryThin => &[ThinClass::VeryThin],
            ThinClass::VeryThin => &[ThinClass::UniformlyThin],
            ThinClass::UniformlyThin => &[ThinClass::Thin],
            ThinClass::Thin => &[],
        }
    }

    /// Closed under finite unions.
    fn union_closed(self) -> bool {
        !matches!(self, ThinClass::SuperThin | ThinClass::SuperSuperThin)
    }
}

impl fmt::Display for ThinClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ThinClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "thin" => ThinClass::Thin,
            "superthin" | "st" => ThinClass::SuperThin,
            "verythin" | "vt" => ThinClass::VeryThin,
            "supersuperthin" | "sst" => ThinClass::SuperSuperThin,
            "veryverythin" | "vvt" => ThinClass::VeryVeryThin,
            "uniformlythin" | "ut" => ThinClass::UniformlyThin,
            _ => return Err(Error::UnknownClass(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    ProvedSymbolic,
    RefutedSymbolic,
    ConsistentUpTo(u64),
    InconsistentUpTo(u64),
}

impl Status {
    /// Proved or consistent.
    pub fn is_positive(self) -> bool {
        matches!(self, Status::ProvedSymbolic | Status::ConsistentUpTo(_))
    }

    pub fn is_symbolic(self) -> bool {
        matches!(self, Status::ProvedSymbolic | Status::RefutedSymbolic)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::ProvedSymbolic => f.write_str("ProvedSymbolic"),
            Status::RefutedSymbolic => f.write_str("RefutedSymbolic"),
            Status::ConsistentUpTo(n) => write!(f, "ConsistentUpTo({n})"),
            Status::InconsistentUpTo(n) => write!(f, "InconsistentUpTo({n})"),
        }
    }
}

impl Serialize for Status {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub name: String,
    #[serde(serialize_with = "serde_pq::vec::serialize")]
    pub values: Vec<Rational>,
}

impl Diagnostic {
    fn new(name: impl Into<String>, values: Vec<Rational>) -> Self {
        Diagnostic {
            name: name.into(),
            values,
        }
    }

    fn ints(name: impl Into<String>, values: impl IntoIterator<Item = u64>) -> Self {
        Diagnostic::new(name, values.into_iter().map(int).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Evidence {
    /// Why the certificate decides the class, when it does.
    pub certificate: Option<String>,
    pub empirical_status: Status,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub class: ThinClass,
    pub status: Status,
    pub horizon: u64,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifierConfig {
    pub m_grid: Vec<u64>,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            m_grid: (1..=8).collect(),
        }
    }
}

/// What the certificates of an expression entail, with reasons.
#[derive(Debug, Clone, Default)]
pub struct Knowledge {
    proved: [Option<String>; 6],
    refuted: [Option<String>; 6],
}

impl Knowledge {
    pub fn proved(&self, c: ThinClass) -> Option<&str> {
        self.proved[c.index()].as_deref()
    }

    pub fn refuted(&self, c: ThinClass) -> Option<&str> {
        self.refuted[c.index()].as_deref()
    }

    fn prove(&mut self, c: ThinClass, reason: impl Into<String>) {
        self.proved[c.index()].get_or_insert_with(|| reason.into());
    }

    fn refute(&mut self, c: ThinClass, reason: impl Into<String>) {
        self.refuted[c.index()].get_or_insert_with(|| reason.into());
    }

    /// Pushes proofs up and refutations down the inclusions, then looks for
    /// a class that is both proved and refuted.
    fn close(&mut self, source: &str) -> Result<()> {
        loop {
            let mut changed = false;
            for c in ThinClass::ALL {
                for &p in c.parents() {
                    if self.proved(c).is_some() && self.proved(p).is_none() {
                        self.prove(p, format!("implied by {c}"));
                        changed = true;
                    }
                    if self.refuted(p).is_some() && self.refuted(c).is_none() {
                        self.refute(c, format!("implied by not {p}"));
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for c in ThinClass::ALL {
            if let (Some(yes), Some(no)) = (self.proved(c), self.refuted(c)) {
                return Err(Error::Certificate {
                    source_name: source.to_string(),
                    detail: format!("{c} is both entailed ({yes}) and excluded ({no})"),
                });
            }
        }
        Ok(())
    }
}

/// Symbolic consequences of the certificates and structure of `expr`.
pub fn entailments(expr: &SetExpr) -> Result<Knowledge> {
    let mut k = Knowledge::default();
    if expr.is_finite() {
        for c in ThinClass::ALL {
            k.prove(c, "finite set");
        }
        return Ok(k);
    }
    match expr.kind() {
        ExprKind::Union(members) => {
            let ks = members
                .iter()
                .map(entailments)
                .collect::<Result<Vec<_>>>()?;
            for c in ThinClass::ALL {
                if c.union_closed() && ks.iter().all(|m| m.proved(c).is_some()) {
                    k.prove(c, format!("every member is {c}"));
                }
                if let Some(i) = ks.iter().position(|m| m.refuted(c).is_some()) {
                    k.refute(c, format!("member `{}` is not {c}", members[i]));
                }
            }
        }
        ExprKind::Intersection(a, b) => {
            let (ka, kb) = (entailments(a)?, entailments(b)?);
            for c in ThinClass::ALL {
                if ka.proved(c).is_some() {
                    k.prove(c, format!("subset of `{a}`"));
                } else if kb.proved(c).is_some() {
                    k.prove(c, format!("subset of `{b}`"));
                }
            }
        }
        ExprKind::Difference(a, b) => {
            let (ka, kb) = (entailments(a)?, entailments(b)?);
            for c in ThinClass::ALL {
                if ka.proved(c).is_some() {
                    k.prove(c, format!("subset of `{a}`"));
                }
                if ka.refuted(c).is_some() {
                    if b.is_finite() {
                        k.refute(
                            c,
                            format!("`{a}` is not {c} and only finitely many elements are removed"),
                        );
                    } else if c.union_closed() && kb.proved(c).is_some() {
                        k.refute(c, format!("`{a}` is not {c} but `{b}` is"));
                    }
                }
            }
        }
        _ => {}
    }
    if let Some(d) = exact_density(expr) {
        if d == int(0) {
            k.prove(ThinClass::Thin, "asymptotic density 0");
        } else {
            k.refute(
                ThinClass::Thin,
                format!(
                    "asymptotic density {}",
                    crate::rational::format_rational(&d)
                ),
            );
        }
    }
    if let Some(cert) = expr.certificate() {
        if let Some(g) = cert.gap_floor.as_ref().filter(|g| g.tends_to_infinity()) {
            k.prove(
                ThinClass::SuperThin,
                format!("gaps at least {g}, which tends to infinity"),
            );
        }
        if let Some(c) = cert.recurring_gap {
            k.refute(
                ThinClass::SuperThin,
                format!("infinitely many gaps at most {c}"),
            );
        }
        match cert.gap_series {
            Some(crate::set_model::Series::Convergent) => {
                k.prove(ThinClass::SuperSuperThin, "reciprocal gap series converges")
            }
            Some(crate::set_model::Series::Divergent) => {
                k.refute(ThinClass::SuperSuperThin, "reciprocal gap series diverges")
            }
            None => {}
        }
        if let Some(b) = &cert.blocks {
            if let (Some(m), Some(g)) = (b.max_size, &b.gap_floor) {
                if g.tends_to_infinity() {
                    k.prove(
                        ThinClass::VeryThin,
                        format!("blocks of size at most {m} with block gaps at least {g}"),
                    );
                }
            }
            if let (Some(m), Some(crate::set_model::Series::Convergent)) =
                (b.max_size, b.gap_series)
            {
                k.prove(
                    ThinClass::VeryVeryThin,
                    format!("blocks of size at most {m} with convergent reciprocal block gaps"),
                );
            }
            if b.bounded_decompositions_diverge {
                k.refute(
                    ThinClass::VeryVeryThin,
                    "every bounded-size block decomposition has divergent reciprocal block gaps",
                );
            }
        }
    }
    k.close(&expr.to_string())?;
    Ok(k)
}

/// Verdict for one class. Certificates are validated by materializing the
/// expression to `horizon` first.
pub fn classify(
    expr: &SetExpr,
    class: ThinClass,
    horizon: u64,
    config: &ClassifierConfig,
) -> Result<Verdict> {
    let prefix = expr.enumerate_upto(horizon)?;
    let knowledge = entailments(expr)?;
    let empirical = empirical_all(&prefix, config)?;
    Ok(combine(class, horizon, &knowledge, &empirical))
}

/// All six verdicts, checked against the inclusions between classes.
pub fn classify_all(
    expr: &SetExpr,
    horizon: u64,
    config: &ClassifierConfig,
) -> Result<BTreeMap<ThinClass, Verdict>> {
    let prefix = expr.enumerate_upto(horizon)?;
    let knowledge = entailments(expr)?;
    let empirical = empirical_all(&prefix, config)?;
    let verdicts: BTreeMap<_, _> = ThinClass::ALL
        .iter()
        .map(|&c| (c, combine(c, horizon, &knowledge, &empirical)))
        .collect();
    check_hierarchy(&verdicts)?;
    Ok(verdicts)
}

/// Empirical verdict on a bare prefix; never symbolic.
pub fn classify_prefix(
    prefix: &Prefix,
    class: ThinClass,
    config: &ClassifierConfig,
) -> Result<Verdict> {
    let empirical = empirical_all(prefix, config)?;
    Ok(combine(
        class,
        prefix.horizon(),
        &Knowledge::default(),
        &empirical,
    ))
}

/// Fails when a positive verdict for a class sits under a negative verdict
/// for a class containing it.
pub fn check_hierarchy(verdicts: &BTreeMap<ThinClass, Verdict>) -> Result<()> {
    for (&c, v) in verdicts {
        for p in c.parents() {
            if let Some(pv) = verdicts.get(p) {
                if v.status.is_positive() && !pv.status.is_positive() {
                    return Err(Error::Hierarchy(format!(
                        "{c} is {} but {p} is {}",
                        v.status, pv.status
                    )));
                }
            }
        }
    }
    Ok(())
}

fn combine(class: ThinClass, horizon: u64, k: &Knowledge, e: &EmpiricalAll) -> Verdict {
    let i = class.index();
    let empirical_status = if e.consistent[i] {
        Status::ConsistentUpTo(horizon)
    } else {
        Status::InconsistentUpTo(horizon)
    };
    let (status, certificate) = match (k.proved(class), k.refuted(class)) {
        (Some(r), _) => (Status::ProvedSymbolic, Some(r.to_string())),
        (_, Some(r)) => (Status::RefutedSymbolic, Some(r.to_string())),
        _ => (empirical_status, None),
    };
    Verdict {
        class,
        status,
        horizon,
        evidence: Evidence {
            certificate,
            empirical_status,
            diagnostics: e.diagnostics[i].clone(),
        },
    }
}

struct EmpiricalAll {
    consistent: [bool; 6],
    diagnostics: [Vec<Diagnostic>; 6],
}

fn empirical_all(prefix: &Prefix, config: &ClassifierConfig) -> Result<EmpiricalAll> {
    if config.m_grid.is_empty() || config.m_grid.contains(&0) {
        return Err(Error::OutOfRange(
            "M grid must be non-empty with positive entries".into(),
        ));
    }
    let ctx = Context::new(prefix);
    let mut raw = [true; 6];
    let mut diagnostics: [Vec<Diagnostic>; 6] = Default::default();
    for c in ThinClass::ALL {
        let (ok, diag) = if ctx.elements.len() < 2 {
            (
                true,
                vec![Diagnostic::ints("elements", [ctx.elements.len() as u64])],
            )
        } else {
            match c {
                ThinClass::Thin => ctx.thin(),
                ThinClass::SuperThin => ctx.super_thin(),
                ThinClass::VeryThin => ctx.very_thin(config),
                ThinClass::SuperSuperThin => ctx.super_super_thin(),
                ThinClass::VeryVeryThin => ctx.very_very_thin(config),
                ThinClass::UniformlyThin => ctx.uniformly_thin(),
            }
        };
        raw[c.index()] = ok;
        diagnostics[c.index()] = diag;
    }
    // parents come before children in no fixed order, so iterate to a fixpoint
    let mut consistent = raw;
    loop {
        let mut changed = false;
        for c in ThinClass::ALL {
            if consistent[c.index()] && c.parents().iter().any(|p| !consistent[p.index()]) {
                consistent[c.index()] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(EmpiricalAll {
        consistent,
        diagnostics,
    })
}

struct Context<'a> {
    prefix: &'a Prefix,
    elements: &'a [u64],
    horizon: u64,
    burn_in: u64,
}

/// `x > log2(n) / 2`, i.e. `4^x > n`.
fn above_half_log2(x: u64, n: u64) -> bool {
    x >= 32 || (1u64 << (2 * x)) > n
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

impl<'a> Context<'a> {
    fn new(prefix: &'a Prefix) -> Self {
        Context {
            prefix,
            elements: prefix.elements(),
            horizon: prefix.horizon(),
            burn_in: isqrt(prefix.horizon()),
        }
    }

    /// Index `i` of the dyadic window `W_i` holding `x`, for `i < 3`.
    fn window(&self, x: u64) -> Option<usize> {
        (0..3).find(|&i| (self.horizon >> (i + 1)) < x && x <= (self.horizon >> i))
    }

    /// Smallest gap ending in each of `W_0, W_1, W_2`. An empty `W_0` gets the
    /// lower bound `N + 1 - last` on the next gap.
    fn window_minima(&self, gaps: impl Iterator<Item = (u64, u64)>, last: u64) -> [Option<u64>; 3] {
        let mut mins = [None; 3];
        for (end, gap) in gaps {
            if let Some(i) = self.window(end) {
                let m: &mut Option<u64> = &mut mins[i];
                *m = Some(m.map_or(gap, |v: u64| v.min(gap)));
            }
        }
        if mins[0].is_none() {
            mins[0] = Some(self.horizon + 1 - last);
        }
        mins
    }

    fn thin(&self) -> (bool, Vec<Diagnostic>) {
        let n = self.horizon;
        let floor = self.burn_in.max(1);
        let mut checkpoints: Vec<u64> = (0..64)
            .map(|j| n >> j)
            .take_while(|&c| c >= floor)
            .collect();
        checkpoints.reverse();
        let ratios: Vec<Rational> = checkpoints
            .iter()
            .map(|&c| ratio(self.prefix.count_le(c), c))
            .collect();
        let half = ratios.len() / 2;
        let ok = if half == 0 {
            true
        } else {
            let head = ratios[..half].iter().max().expect("non-empty").clone();
            let tail = ratios[half..].iter().max().expect("non-empty").clone();
            tail == int(0) || tail <= head * ratio(3, 4)
        };
        (
            ok,
            vec![
                Diagnostic::ints("checkpoints", checkpoints),
                Diagnostic::new("ratios", ratios),
            ],
        )
    }

    fn super_thin(&self) -> (bool, Vec<Diagnostic>) {
        let e = self.elements;
        let mins = self.window_minima(e.windows(2).map(|w| (w[1], w[1] - w[0])), e[e.len() - 1]);
        let tail = mins[0].expect("W_0 always has a value");
        let ordered: Vec<u64> = [mins[2], mins[1], mins[0]].into_iter().flatten().collect();
        let ok = above_half_log2(tail, self.horizon) && ordered.windows(2).all(|w| w[0] <= w[1]);
        (
            ok,
            vec![
                Diagnostic::ints("tail_min_gap", [tail]),
                Diagnostic::ints("window_min_gaps", ordered),
            ],
        )
    }

    fn beyond_burn_in(&self) -> &[u64] {
        let cut = self.elements.partition_point(|&x| x <= self.burn_in);
        &self.elements[cut..]
    }

    /// Longest `m`-runs among elements in `(B, N/4]` and `(B, N]`, and
    /// whether they agree (runs of length 1 always agree).
    fn runs_stable(&self, m: u64) -> (bool, [u64; 2]) {
        let beyond = self.beyond_burn_in();
        let quarter = beyond.partition_point(|&x| x <= self.horizon / 4);
        let early = longest_run(&beyond[..quarter], m);
        let late = longest_run(beyond, m);
        (late <= early.max(1), [early, late])
    }

    fn very_thin(&self, config: &ClassifierConfig) -> (bool, Vec<Diagnostic>) {
        let mut ok = false;
        let mut diag = Vec::new();
        let beyond = self.beyond_burn_in();
        for &m in &config.m_grid {
            let (stable, runs) = self.runs_stable(m);
            let gaps_ok = if beyond.is_empty() {
                true
            } else {
                let blocks = greedy_blocks(beyond, m);
                let last = *blocks[blocks.len() - 1].last().expect("non-empty block");
                let mins = self.window_minima(
                    blocks
                        .windows(2)
                        .map(|p| (p[1][0], p[1][0] - p[0][p[0].len() - 1])),
                    last,
                );
                let ordered: Vec<u64> = [mins[2], mins[1], mins[0]].into_iter().flatten().collect();
                diag.push(Diagnostic::ints(
                    format!("block_gap_window_minima_m{m}"),
                    ordered.clone(),
                ));
                above_half_log2(mins[0].expect("W_0 always has a value"), self.horizon)
                    && ordered.windows(2).all(|w| w[0] < w[1])
            };
            diag.push(Diagnostic::ints(format!("runs_m{m}"), runs));
            if stable && gaps_ok {
                ok = true;
            }
        }
        (ok, diag)
    }

    fn super_super_thin(&self) -> (bool, Vec<Diagnostic>) {
        let gaps: Vec<u64> = self.elements.windows(2).map(|w| w[1] - w[0]).collect();
        let (ok, sum) = reciprocal_sum_at_most(&gaps[gaps.len() / 2..], &ratio(1, 4));
        (
            ok,
            vec![Diagnostic::new("tail_reciprocal_gap_sum", vec![sum])],
        )
    }

    fn very_very_thin(&self, config: &ClassifierConfig) -> (bool, Vec<Diagnostic>) {
        let mut ok = false;
        let mut diag = Vec::new();
        let beyond = self.beyond_burn_in();
        for &m in &config.m_grid {
            let (stable, _) = self.runs_stable(m);
            let blocks = greedy_blocks(beyond, m);
            let gaps: Vec<u64> = blocks
                .windows(2)
                .map(|p| p[1][0] - p[0][p[0].len() - 1])
                .collect();
            let (small, sum) = reciprocal_sum_at_most(&gaps[gaps.len() / 2..], &ratio(1, 4));
            diag.push(Diagnostic::new(
                format!("tail_reciprocal_block_gap_sum_m{m}"),
                vec![sum],
            ));
            if stable && small {
                ok = true;
            }
        }
        (ok, diag)
    }

    fn uniformly_thin(&self) -> (bool, Vec<Diagnostic>) {
        let log2 = 63 - self.horizon.leading_zeros() as u64;
        let k_hi = if log2 == 0 {
            0
        } else {
            1u64 << (63 - log2.leading_zeros())
        };
        let k_lo = k_hi / 4;
        if k_lo == 0 || self.burn_in + k_hi > self.horizon {
            return (true, vec![Diagnostic::ints("window_lengths", [])]);
        }
        let (_, hi_lo) = window_extremes(self.prefix, k_lo, self.burn_in);
        let (_, hi_hi) = window_extremes(self.prefix, k_hi, self.burn_in);
        let avg_lo = ratio(hi_lo, k_lo);
        let avg_hi = ratio(hi_hi, k_hi);
        let ok = avg_hi <= &avg_lo * ratio(1, 2);
        (
            ok,
            vec![
                Diagnostic::ints("window_lengths", [k_lo, k_hi]),
                Diagnostic::new("sup_window_avg", vec![avg_lo, avg_hi]),
                Diagnostic::ints("burn_in", [self.burn_in]),
            ],
        )
    }
}
