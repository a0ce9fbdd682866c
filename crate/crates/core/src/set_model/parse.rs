//! Recursive-descent parser for set expressions.
//!
//! ```text
//! expr := name [ '(' args ')' ]
//!       | 'union(' expr (',' expr)+ ')'
//!       | 'inter(' expr ',' expr ')'
//!       | 'diff(' expr ',' expr ')'
//!       | 'blocks(' name ')'
//!       | '{' int (',' int)* '}'
//! ```

use super::catalog::{BlockFamilyKind, Generator};
use super::expr::SetExpr;
use crate::error::{Error, Result};

pub fn parse_set_expr(text: &str) -> Result<SetExpr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("end of input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, expected: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            expected: expected.to_string(),
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(&format!("'{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<(usize, String)> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos || self.src[start].is_ascii_digit() {
            self.pos = start;
            return Err(self.syntax("name, '{'"));
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok((start, name.to_string()))
    }

    fn int(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        digits
            .parse()
            .map_err(|_| Error::OutOfRange(format!("integer {digits} too large")))
    }

    fn expr(&mut self) -> Result<SetExpr> {
        if self.eat(b'{') {
            let mut elements = vec![self.int()?];
            while self.eat(b',') {
                elements.push(self.int()?);
            }
            if !self.eat(b'}') {
                return Err(self.syntax("',', '}'"));
            }
            return SetExpr::explicit(elements);
        }
        let (at, name) = self.ident()?;
        match name.as_str() {
            "union" => {
                self.expect(b'(')?;
                let mut members = vec![self.expr()?];
                self.expect(b',')?;
                members.push(self.expr()?);
                while self.eat(b',') {
                    members.push(self.expr()?);
                }
                self.close()?;
                Ok(SetExpr::union(members))
            }
            "inter" | "diff" => {
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b')')?;
                Ok(if name == "inter" {
                    SetExpr::intersection(a, b)
                } else {
                    SetExpr::difference(a, b)
                })
            }
            "blocks" => {
                self.expect(b'(')?;
                let (_, family) = self.ident()?;
                self.expect(b')')?;
                block_family(&family)
                    .map(SetExpr::block_family)
                    .ok_or(Error::UnknownName(family))
            }
            _ => self.catalog(at, name),
        }
    }

    fn close(&mut self) -> Result<()> {
        if self.eat(b')') {
            Ok(())
        } else {
            Err(self.syntax("',', ')'"))
        }
    }

    fn args(&mut self) -> Result<Vec<u64>> {
        let mut args = Vec::new();
        if self.eat(b'(') {
            if self.eat(b')') {
                return Ok(args);
            }
            args.push(self.int()?);
            while self.eat(b',') {
                args.push(self.int()?);
            }
            self.close()?;
        }
        Ok(args)
    }

    fn catalog(&mut self, at: usize, name: String) -> Result<SetExpr> {
        let arity = match name.as_str() {
            "ap" | "dyadic" => 2,
            "pow" => 1,
            "pow2plus1" | "tri" | "primes" => 0,
            other => match block_family(other) {
                Some(kind) => {
                    self.args_of_arity(0)?;
                    return Ok(SetExpr::block_family(kind));
                }
                None => {
                    self.pos = at;
                    return Err(Error::UnknownName(name));
                }
            },
        };
        let args = self.args_of_arity(arity)?;
        match name.as_str() {
            "ap" => SetExpr::residue_class(args[0], args[1]),
            "dyadic" => {
                let n = u32::try_from(args[0])
                    .map_err(|_| Error::OutOfRange(format!("dyadic exponent {}", args[0])))?;
                SetExpr::dyadic(n, args[1])
            }
            "pow" => SetExpr::generator(Generator::Powers(args[0])),
            "pow2plus1" => SetExpr::generator(Generator::PowersPlusOne),
            "tri" => SetExpr::generator(Generator::Triangular),
            _ => SetExpr::generator(Generator::Primes),
        }
    }

    fn args_of_arity(&mut self, arity: usize) -> Result<Vec<u64>> {
        let before = self.pos;
        let args = self.args()?;
        if args.len() != arity {
            self.pos = before;
            return Err(self.syntax(&match arity {
                0 => "no arguments".to_string(),
                1 => "'(' with 1 argument".to_string(),
                n => format!("'(' with {n} arguments"),
            }));
        }
        Ok(args)
    }
}

fn block_family(name: &str) -> Option<BlockFamilyKind> {
    match name {
        "pow2run" => Some(BlockFamilyKind::Pow2Run),
        "pow2pair" => Some(BlockFamilyKind::Pow2Pair),
        "triY" => Some(BlockFamilyKind::TriY),
        "cubicgap" => Some(BlockFamilyKind::CubicGap),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set_model::expr::ExprKind;

    #[test]
    fn parses_catalog_names() {
        let e = parse_set_expr("ap(4,2)").unwrap();
        assert_eq!(
            e.kind(),
            &ExprKind::ResidueClass {
                modulus: 4,
                residue: 2
            }
        );
        let a = parse_set_expr("union(pow(2), pow2plus1)").unwrap();
        assert_eq!(
            a.enumerate_upto(10).unwrap().elements(),
            &[2, 3, 4, 5, 8, 9]
        );
        let run = parse_set_expr("blocks(pow2run)").unwrap();
        assert_eq!(run.kind(), &ExprKind::BlockFamily(BlockFamilyKind::Pow2Run));
        assert_eq!(parse_set_expr("pow2run").unwrap(), run);
        assert_eq!(
            parse_set_expr("tri()").unwrap(),
            parse_set_expr(" tri ").unwrap()
        );
        assert_eq!(
            parse_set_expr("dyadic(2,2)").unwrap(),
            parse_set_expr("ap(4,2)").unwrap()
        );
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "union(pow(2),pow2plus1)",
            "diff(ap(1,1),pow(2))",
            "inter({1,5,9},ap(4,1))",
            "blocks(cubicgap)",
            "union(tri,primes,{3})",
        ] {
            let e = parse_set_expr(text).unwrap();
            assert_eq!(parse_set_expr(&e.to_string()).unwrap(), e);
        }
    }

    #[test]
    fn reports_errors() {
        assert!(matches!(
            parse_set_expr("ap(0,1)"),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            parse_set_expr("foo(3)"),
            Err(Error::UnknownName(_))
        ));
        assert!(matches!(
            parse_set_expr("blocks(tri)"),
            Err(Error::UnknownName(_))
        ));
        assert!(matches!(
            parse_set_expr("union(pow(2))"),
            Err(Error::Syntax { position: 12, .. })
        ));
        assert!(matches!(
            parse_set_expr("ap(4,2) x"),
            Err(Error::Syntax { position: 8, .. })
        ));
        assert!(matches!(
            parse_set_expr("{1,,2}"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(parse_set_expr("{}"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_set_expr("pow"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_set_expr("{0}"), Err(Error::OutOfRange(_))));
        assert!(matches!(
            parse_set_expr(""),
            Err(Error::Syntax { position: 0, .. })
        ));
    }
}
