//! Statistical and ideal convergence through ε-exceedance sets.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{abs_diff, int, serde_pq, Rational};
use crate::set_model::{BlockFamilyKind, Generator, Prefix, SetExpr};
use crate::thinness::{classify, classify_prefix, ClassifierConfig, Status, ThinClass, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogSequence {
    /// `-1` on `2^k + j` for `0 <= j < k`, `1` elsewhere.
    X,
    /// `-1` on powers of two, `1` elsewhere.
    Y,
}

impl CatalogSequence {
    pub fn name(self) -> &'static str {
        match self {
            CatalogSequence::X => "paper_x",
            CatalogSequence::Y => "paper_y",
        }
    }
}

impl FromStr for CatalogSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper_x" => Ok(CatalogSequence::X),
            "paper_y" => Ok(CatalogSequence::Y),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceDef {
    /// `on` for indices in `exceptions`, `off` elsewhere.
    IndicatorTwoValue {
        exceptions: SetExpr,
        on: Rational,
        off: Rational,
    },
    Catalog(CatalogSequence),
    /// `x_1, x_2, ...` given explicitly.
    Table(Vec<Rational>),
}

impl SequenceDef {
    /// Catalog sequences rewritten as two-valued indicators.
    fn resolved(&self) -> SequenceDef {
        match self {
            SequenceDef::Catalog(c) => SequenceDef::IndicatorTwoValue {
                exceptions: match c {
                    CatalogSequence::X => SetExpr::block_family(BlockFamilyKind::Pow2Stretch),
                    CatalogSequence::Y => {
                        SetExpr::generator(Generator::Powers(2)).expect("base 2 is valid")
                    }
                },
                on: -int(1),
                off: int(1),
            },
            other => other.clone(),
        }
    }
}

impl fmt::Display for SequenceDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceDef::IndicatorTwoValue {
                exceptions,
                on,
                off,
            } => write!(
                f,
                "indicator({exceptions},{},{})",
                crate::rational::format_rational(on),
                crate::rational::format_rational(off)
            ),
            SequenceDef::Catalog(c) => f.write_str(c.name()),
            SequenceDef::Table(v) => write!(f, "table[{}]", v.len()),
        }
    }
}

/// `x_1, ..., x_N`.
pub fn eval_sequence(seq: &SequenceDef, horizon: u64) -> Result<Vec<Rational>> {
    if horizon == 0 {
        return Err(Error::Horizon("horizon must be at least 1".into()));
    }
    match seq.resolved() {
        SequenceDef::IndicatorTwoValue {
            exceptions,
            on,
            off,
        } => {
            let ex = exceptions.enumerate_upto(horizon)?;
            Ok((1..=horizon)
                .map(|n| {
                    if ex.contains(n) {
                        on.clone()
                    } else {
                        off.clone()
                    }
                })
                .collect())
        }
        SequenceDef::Table(values) => {
            let n = usize::try_from(horizon).unwrap_or(usize::MAX);
            if n > values.len() {
                return Err(Error::Sequence(format!(
                    "table has {} values, horizon {horizon} requested",
                    values.len()
                )));
            }
            Ok(values[..n].to_vec())
        }
        SequenceDef::Catalog(_) => unreachable!("catalog sequences resolve to indicators"),
    }
}

fn check_eps(eps: &Rational) -> Result<()> {
    if eps <= &int(0) {
        return Err(Error::OutOfRange("epsilon must be positive".into()));
    }
    Ok(())
}

/// The exceedance set as an expression, when the sequence is two-valued.
pub fn exceedance_expr(seq: &SequenceDef, a: &Rational, eps: &Rational) -> Result<Option<SetExpr>> {
    check_eps(eps)?;
    let SequenceDef::IndicatorTwoValue {
        exceptions,
        on,
        off,
    } = seq.resolved()
    else {
        return Ok(None);
    };
    let on_far = &abs_diff(&on, a) >= eps;
    let off_far = &abs_diff(&off, a) >= eps;
    Ok(Some(match (on_far, off_far) {
        (true, true) => SetExpr::naturals(),
        (false, false) => SetExpr::empty(),
        (true, false) => exceptions,
        (false, true) => SetExpr::difference(SetExpr::naturals(), exceptions),
    }))
}

/// `{n <= N : |x_n - a| >= eps}`.
pub fn exceedance_set(
    seq: &SequenceDef,
    a: &Rational,
    eps: &Rational,
    horizon: u64,
) -> Result<Prefix> {
    if horizon == 0 {
        return Err(Error::Horizon("horizon must be at least 1".into()));
    }
    if let Some(expr) = exceedance_expr(seq, a, eps)? {
        return expr.enumerate_upto(horizon);
    }
    let values = eval_sequence(seq, horizon)?;
    let hits: Vec<u64> = values
        .iter()
        .zip(1u64..)
        .filter(|(x, _)| &abs_diff(x, a) >= eps)
        .map(|(_, n)| n)
        .collect();
    Prefix::new(horizon, hits)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    Statistical,
    SuperThin,
    VeryThin,
    VeryVeryThin,
}

impl Mode {
    pub const ALL: [Mode; 4] = [
        Mode::Statistical,
        Mode::SuperThin,
        Mode::VeryThin,
        Mode::VeryVeryThin,
    ];

    /// The class the exceedance sets must belong to.
    pub fn class(self) -> ThinClass {
        match self {
            Mode::Statistical => ThinClass::Thin,
            Mode::SuperThin => ThinClass::SuperThin,
            Mode::VeryThin => ThinClass::VeryThin,
            Mode::VeryVeryThin => ThinClass::VeryVeryThin,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Statistical => "statistical",
            Mode::SuperThin => "super-thin",
            Mode::VeryThin => "very-thin",
            Mode::VeryVeryThin => "very-very-thin",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMode(s.to_string()))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModeConclusion {
    pub mode: Mode,
    pub class: ThinClass,
    pub status: Status,
    /// The exceedance set is (proved or consistent with being) in the class.
    pub convergent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExceedanceReport {
    #[serde(serialize_with = "serde_pq::serialize")]
    pub limit: Rational,
    #[serde(serialize_with = "serde_pq::serialize")]
    pub epsilon: Rational,
    pub horizon: u64,
    /// Symbolic form of the exceedance set when one is known.
    pub exceedance_expr: Option<String>,
    pub exceedance_count: u64,
    #[serde(skip)]
    pub exceedance_prefix: Prefix,
    pub verdicts: Vec<Verdict>,
    pub mode_conclusions: Vec<ModeConclusion>,
}

/// One report per `eps`, classifying the exceedance set for every mode.
pub fn convergence_report(
    seq: &SequenceDef,
    a: &Rational,
    eps_list: &[Rational],
    horizon: u64,
    modes: &[Mode],
    config: &ClassifierConfig,
) -> Result<Vec<ExceedanceReport>> {
    if eps_list.is_empty() {
        return Err(Error::Empty("epsilon list is empty".into()));
    }
    let mut reports = Vec::with_capacity(eps_list.len());
    for eps in eps_list {
        let expr = exceedance_expr(seq, a, eps)?;
        let prefix = exceedance_set(seq, a, eps, horizon)?;
        let mut verdicts: Vec<Verdict> = Vec::new();
        let mut mode_conclusions = Vec::new();
        for &mode in modes {
            let class = mode.class();
            let verdict = match verdicts.iter().find(|v| v.class == class) {
                Some(v) => v.clone(),
                None => {
                    let v = match &expr {
                        Some(e) => classify(e, class, horizon, config)?,
                        None => classify_prefix(&prefix, class, config)?,
                    };
                    verdicts.push(v.clone());
                    v
                }
            };
            mode_conclusions.push(ModeConclusion {
                mode,
                class,
                status: verdict.status,
                convergent: verdict.status.is_positive(),
            });
        }
        reports.push(ExceedanceReport {
            limit: a.clone(),
            epsilon: eps.clone(),
            horizon,
            exceedance_expr: expr.map(|e| e.to_string()),
            exceedance_count: prefix.len() as u64,
            exceedance_prefix: prefix,
            verdicts,
            mode_conclusions,
        });
    }
    Ok(reports)
}
