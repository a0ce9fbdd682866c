use std::fmt;

use super::catalog::{BlockFamilyKind, Generator};
use super::certificate::Certificate;
use super::prefix::{intersect_sorted, merge_sorted, subtract_sorted, Prefix};
use crate::error::{Error, Result};

/// Symbolic description of a subset of `{1, 2, 3, ...}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetExpr {
    kind: ExprKind,
    certificate: Option<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    /// Finite set, sorted and distinct.
    Explicit(Vec<u64>),
    /// `{n >= 1 : n ≡ residue (mod modulus)}` with `1 <= residue <= modulus`.
    ResidueClass {
        modulus: u64,
        residue: u64,
    },
    Generator(Generator),
    BlockFamily(BlockFamilyKind),
    Union(Vec<SetExpr>),
    Intersection(Box<SetExpr>, Box<SetExpr>),
    Difference(Box<SetExpr>, Box<SetExpr>),
}

impl SetExpr {
    pub fn explicit(mut elements: Vec<u64>) -> Result<Self> {
        if elements.contains(&0) {
            return Err(Error::OutOfRange("explicit elements must be >= 1".into()));
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(SetExpr::bare(ExprKind::Explicit(elements)))
    }

    pub fn empty() -> Self {
        SetExpr::bare(ExprKind::Explicit(Vec::new()))
    }

    /// The set of all positive integers.
    pub fn naturals() -> Self {
        SetExpr::bare(ExprKind::ResidueClass {
            modulus: 1,
            residue: 1,
        })
    }

    pub fn residue_class(modulus: u64, residue: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::OutOfRange("modulus must be >= 1".into()));
        }
        if residue == 0 || residue > modulus {
            return Err(Error::OutOfRange(format!(
                "residue {residue} must lie in [1, {modulus}]"
            )));
        }
        Ok(SetExpr::bare(ExprKind::ResidueClass { modulus, residue }))
    }

    /// `2^n ω - i = {m 2^n - i : m >= 1}` for `0 <= i < 2^n`.
    pub fn dyadic(n: u32, i: u64) -> Result<Self> {
        if n > 62 {
            return Err(Error::OutOfRange(format!("dyadic exponent {n} exceeds 62")));
        }
        let modulus = 1u64 << n;
        if i >= modulus {
            return Err(Error::OutOfRange(format!(
                "dyadic offset {i} must be below 2^{n}"
            )));
        }
        SetExpr::residue_class(modulus, modulus - i)
    }

    /// Catalog generator carrying its catalog certificate.
    pub fn generator(g: Generator) -> Result<Self> {
        if let Generator::Powers(b) = g {
            if b < 2 {
                return Err(Error::OutOfRange(format!("pow base {b} must be >= 2")));
            }
        }
        Ok(SetExpr {
            kind: ExprKind::Generator(g),
            certificate: g.certificate(),
        })
    }

    /// Catalog block family carrying its catalog certificate.
    pub fn block_family(kind: BlockFamilyKind) -> Self {
        SetExpr {
            kind: ExprKind::BlockFamily(kind),
            certificate: Some(kind.certificate()),
        }
    }

    pub fn union(members: Vec<SetExpr>) -> Self {
        SetExpr::bare(ExprKind::Union(members))
    }

    pub fn intersection(a: SetExpr, b: SetExpr) -> Self {
        SetExpr::bare(ExprKind::Intersection(Box::new(a), Box::new(b)))
    }

    pub fn difference(a: SetExpr, b: SetExpr) -> Self {
        SetExpr::bare(ExprKind::Difference(Box::new(a), Box::new(b)))
    }

    pub fn with_certificate(mut self, certificate: Certificate) -> Self {
        self.certificate = Some(certificate);
        self
    }

    pub fn without_certificate(mut self) -> Self {
        self.certificate = None;
        self
    }

    fn bare(kind: ExprKind) -> Self {
        SetExpr {
            kind,
            certificate: None,
        }
    }

    pub fn kind(&self) -> &ExprKind {
        &self.kind
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.certificate.as_ref()
    }

    /// Exactly the members `<= horizon`, validating monotonicity, block
    /// disjointness and every certificate met along the way.
    pub fn enumerate_upto(&self, horizon: u64) -> Result<Prefix> {
        if horizon == 0 {
            return Err(Error::Horizon("horizon must be at least 1".into()));
        }
        let elements = self.elements_upto(horizon)?;
        Ok(Prefix::from_sorted_unchecked(horizon, elements).with_source(self.to_string()))
    }

    fn elements_upto(&self, n: u64) -> Result<Vec<u64>> {
        let name = || self.to_string();
        let elements = match &self.kind {
            ExprKind::Explicit(e) => e.iter().copied().take_while(|&x| x <= n).collect(),
            &ExprKind::ResidueClass { modulus, residue } => {
                let mut out = Vec::with_capacity((n / modulus) as usize + 1);
                let mut x = residue;
                while x <= n {
                    out.push(x);
                    match x.checked_add(modulus) {
                        Some(y) => x = y,
                        None => break,
                    }
                }
                out
            }
            ExprKind::Generator(g) => {
                let e = g.elements_upto(n);
                check_increasing(&name(), &e)?;
                e
            }
            ExprKind::BlockFamily(kind) => {
                let blocks = kind.blocks_upto(n);
                for (idx, block) in blocks.iter().enumerate() {
                    check_increasing(&name(), block)?;
                    if idx > 0 {
                        let prev_max = *blocks[idx - 1].last().expect("blocks are non-empty");
                        if block[0] <= prev_max {
                            return Err(Error::BlocksOverlap {
                                source_name: name(),
                                index: idx + 1,
                                min: block[0],
                                prev_max,
                            });
                        }
                    }
                }
                if let Some(cert) = &self.certificate {
                    cert.validate_blocks(&name(), &blocks)?;
                }
                blocks
                    .into_iter()
                    .flatten()
                    .take_while(|&x| x <= n)
                    .collect()
            }
            ExprKind::Union(members) => {
                let mut acc: Vec<u64> = Vec::new();
                for m in members {
                    acc = merge_sorted(&acc, &m.elements_upto(n)?);
                }
                acc
            }
            ExprKind::Intersection(a, b) => {
                intersect_sorted(&a.elements_upto(n)?, &b.elements_upto(n)?)
            }
            ExprKind::Difference(a, b) => {
                subtract_sorted(&a.elements_upto(n)?, &b.elements_upto(n)?)
            }
        };
        if let Some(cert) = &self.certificate {
            match &self.kind {
                // blocks were checked directly; keep the element-level floor
                ExprKind::BlockFamily(_) => Certificate {
                    blocks: None,
                    ..cert.clone()
                }
                .validate_elements(&name(), &elements)?,
                _ => cert.validate_elements(&name(), &elements)?,
            }
        }
        Ok(elements)
    }

    /// Membership of `n >= 1`; agrees with [`SetExpr::enumerate_upto`].
    pub fn member(&self, n: u64) -> Result<bool> {
        if n == 0 {
            return Err(Error::OutOfRange("membership is defined for n >= 1".into()));
        }
        Ok(self.contains(n))
    }

    fn contains(&self, n: u64) -> bool {
        match &self.kind {
            ExprKind::Explicit(e) => e.binary_search(&n).is_ok(),
            &ExprKind::ResidueClass { modulus, residue } => n % modulus == residue % modulus,
            ExprKind::Generator(g) => g.contains(n),
            ExprKind::BlockFamily(kind) => kind.blocks_upto(n).iter().any(|b| b.contains(&n)),
            ExprKind::Union(members) => members.iter().any(|m| m.contains(n)),
            ExprKind::Intersection(a, b) => a.contains(n) && b.contains(n),
            ExprKind::Difference(a, b) => a.contains(n) && !b.contains(n),
        }
    }

    /// True when the expression denotes a finite set by construction.
    pub fn is_finite(&self) -> bool {
        match &self.kind {
            ExprKind::Explicit(_) => true,
            ExprKind::Union(members) => members.iter().all(SetExpr::is_finite),
            ExprKind::Intersection(a, b) => a.is_finite() || b.is_finite(),
            ExprKind::Difference(a, _) => a.is_finite(),
            _ => false,
        }
    }
}

fn check_increasing(source: &str, elements: &[u64]) -> Result<()> {
    if let Some(w) = elements.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::NotIncreasing {
            source_name: source.to_string(),
            value: w[1],
        });
    }
    Ok(())
}

/// Serialized as its textual form.
impl serde::Serialize for SetExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Explicit(e) => {
                f.write_str("{")?;
                for (i, x) in e.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("}")
            }
            ExprKind::ResidueClass { modulus, residue } => write!(f, "ap({modulus},{residue})"),
            ExprKind::Generator(g) => write!(f, "{g}"),
            ExprKind::BlockFamily(kind) => write!(f, "blocks({kind})"),
            ExprKind::Union(members) => {
                f.write_str("union(")?;
                for (i, m) in members.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{m}")?;
                }
                f.write_str(")")
            }
            ExprKind::Intersection(a, b) => write!(f, "inter({a},{b})"),
            ExprKind::Difference(a, b) => write!(f, "diff({a},{b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set_model::certificate::GrowthFn;

    fn pow2() -> SetExpr {
        SetExpr::generator(Generator::Powers(2)).unwrap()
    }

    #[test]
    fn enumerates_catalog_and_combinators() {
        let a = SetExpr::union(vec![
            pow2(),
            SetExpr::generator(Generator::PowersPlusOne).unwrap(),
        ]);
        assert_eq!(
            a.enumerate_upto(10).unwrap().elements(),
            &[2, 3, 4, 5, 8, 9]
        );
        let ap = SetExpr::residue_class(4, 2).unwrap();
        assert_eq!(ap.enumerate_upto(14).unwrap().elements(), &[2, 6, 10, 14]);
        let run = SetExpr::block_family(BlockFamilyKind::Pow2Run);
        assert_eq!(
            run.enumerate_upto(20).unwrap().elements(),
            &[2, 3, 4, 5, 6, 8, 9, 10, 11, 16, 17, 18, 19, 20]
        );
    }

    #[test]
    fn membership_examples() {
        assert!(SetExpr::residue_class(4, 2).unwrap().member(6).unwrap());
        assert!(!pow2().member(12).unwrap());
        let d = SetExpr::difference(SetExpr::residue_class(1, 1).unwrap(), pow2());
        assert!(!d.member(8).unwrap());
        assert!(d.member(7).unwrap());
        assert!(d.member(0).is_err());
    }

    #[test]
    fn parameter_ranges() {
        assert!(SetExpr::residue_class(0, 1).is_err());
        assert!(SetExpr::residue_class(4, 0).is_err());
        assert!(SetExpr::residue_class(4, 5).is_err());
        assert!(SetExpr::generator(Generator::Powers(1)).is_err());
        assert!(SetExpr::explicit(vec![0, 3]).is_err());
        assert_eq!(
            SetExpr::dyadic(2, 2).unwrap(),
            SetExpr::residue_class(4, 2).unwrap()
        );
        assert_eq!(SetExpr::dyadic(0, 0).unwrap(), SetExpr::naturals());
        assert!(SetExpr::dyadic(3, 8).is_err());
    }

    #[test]
    fn contradicted_certificate_is_an_error() {
        let lying = SetExpr::residue_class(2, 2).unwrap().with_certificate(
            Certificate::default().with_gap_floor(GrowthFn::Linear {
                slope: 1,
                offset: 0,
                divisor: 1,
            }),
        );
        assert!(lying.enumerate_upto(3).is_ok());
        assert!(matches!(
            lying.enumerate_upto(100),
            Err(Error::Certificate { .. })
        ));
    }

    #[test]
    fn finiteness_by_construction() {
        let e = SetExpr::explicit(vec![3, 1]).unwrap();
        assert!(e.is_finite());
        assert!(SetExpr::intersection(pow2(), e.clone()).is_finite());
        assert!(!SetExpr::union(vec![pow2(), e]).is_finite());
    }
}
