//! Symbolic subsets of `{1, 2, 3, ...}`, their grammar and finite prefixes.

mod catalog;
mod certificate;
mod expr;
mod parse;
mod prefix;

pub use catalog::{primes_upto, BlockFamilyKind, Generator};
pub use certificate::{BlockCertificate, Certificate, GrowthFn, Series};
pub use expr::{ExprKind, SetExpr};
pub use parse::parse_set_expr;
pub use prefix::{GapSequence, Prefix};

pub(crate) use prefix::{merge_sorted, subtract_sorted};

/// Members of `expr` up to `horizon`.
pub fn enumerate_upto(expr: &SetExpr, horizon: u64) -> crate::Result<Prefix> {
    expr.enumerate_upto(horizon)
}

/// Whether `n` belongs to `expr`.
pub fn member(expr: &SetExpr, n: u64) -> crate::Result<bool> {
    expr.member(n)
}
