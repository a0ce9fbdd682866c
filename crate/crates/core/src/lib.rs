//! Thin subsets of the positive integers.
//!
//! Sets are described by [`SetExpr`] values built from a small catalog and
//! materialized into [`Prefix`] values up to a horizon. On top of that the
//! crate computes densities, decides thinness classes (symbolically from
//! declared certificates or empirically on prefixes), runs the block
//! constructions, analyzes ideal convergence of sequences and explores the
//! dyadic tree family.
//!
//! ```
//! use thinset::constructions::gallery;
//! use thinset::thinness::{classify_all, ClassifierConfig, Status, ThinClass};
//!
//! let set = thinset::parse_set_expr("union(pow(2),pow2plus1)")?;
//! let verdicts = classify_all(&set, 1 << 20, &ClassifierConfig::default())?;
//! assert_eq!(verdicts[&ThinClass::VeryThin].status, Status::ProvedSymbolic);
//!
//! let prefix = gallery("triY")?.enumerate_upto(16)?;
//! assert_eq!(prefix.elements(), &[1, 2, 3, 6, 7, 10, 15, 16]);
//! # Ok::<(), thinset::Error>(())
//! ```

pub mod bw;
pub mod constructions;
pub mod convergence;
pub mod density;
pub mod error;
pub mod rational;
pub mod set_model;
pub mod thinness;

pub use error::{Error, Result};
pub use rational::Rational;
pub use set_model::{parse_set_expr, Prefix, SetExpr};
