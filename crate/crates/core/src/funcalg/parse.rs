//! Expression parser for rational functions in z.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | 'z' | '(' expr ')' | 'sqrt' '(' expr ')'
//!         | 'T' '(' integer ')' | 'Z' '(' integer ')' | 'D' '(' integer ')'
//! ```
//!
//! `sqrt` takes a constant rational argument. Whitespace is ignored.

use num_bigint::BigInt;

use super::field::{Field, Rational};
use super::ratfunc::{ProjPoint, RatFunc};
use super::scalar::Scalar;
use super::special::{chebyshev, dfunc, power};
use crate::error::{Error, Result};

/// Largest exponent or builtin index accepted by the parser.
const MAX_EXPONENT: usize = 4096;

pub fn parse(text: &str) -> Result<RatFunc<Scalar>> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

/// A point: `inf` or a constant expression.
pub fn parse_point(text: &str) -> Result<ProjPoint<Scalar>> {
    let t = text.trim();
    if matches!(t, "inf" | "oo" | "∞" | "infinity") {
        return Ok(ProjPoint::Infinity);
    }
    let f = parse(t)?;
    if !f.is_constant() {
        return Err(Error::Syntax {
            pos: 0,
            msg: "point must be a constant".into(),
        });
    }
    Ok(ProjPoint::Finite(f.num().coeff(0)))
}

pub fn print(f: &RatFunc<Scalar>) -> String {
    f.to_expr()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

type F = RatFunc<Scalar>;

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
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
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<F> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                acc = acc.add(&rhs)?;
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                acc = acc.sub(&rhs)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<F> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.unary()?;
                acc = acc.mul(&rhs)?;
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let rhs = self.unary()?;
                acc = acc.div(&rhs)?.ok_or(Error::DivisionByZero { pos: at })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<F> {
        if self.eat(b'-') {
            Ok(self.unary()?.neg())
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<F> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let n = self.small_integer()?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digit string parses"))
    }

    fn small_integer(&mut self) -> Result<usize> {
        let at = self.pos;
        let n = self.integer()?;
        usize::try_from(&n)
            .ok()
            .filter(|&v| v <= MAX_EXPONENT)
            .ok_or(Error::Syntax {
                pos: at,
                msg: format!("integer {n} out of range"),
            })
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn builtin_index(&mut self) -> Result<usize> {
        self.expect(b'(')?;
        let at = self.pos;
        let n = self.small_integer()?;
        if n == 0 {
            return Err(Error::Syntax {
                pos: at,
                msg: "index must be at least 1".into(),
            });
        }
        self.expect(b')')?;
        Ok(n)
    }

    fn atom(&mut self) -> Result<F> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(F::constant(Scalar::rational(Rational::from_integer(n))))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident();
                match name.as_str() {
                    "z" => Ok(F::identity()),
                    "sqrt" => {
                        self.expect(b'(')?;
                        let arg_at = self.pos;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        let q = constant_rational(&arg).ok_or(Error::Syntax {
                            pos: arg_at,
                            msg: "sqrt argument must be a rational constant".into(),
                        })?;
                        Ok(F::constant(Scalar::sqrt_of(&q)?))
                    }
                    "T" => Ok(chebyshev(self.builtin_index()?)),
                    "Z" => Ok(power(self.builtin_index()?)),
                    "D" => Ok(dfunc(self.builtin_index()?)),
                    _ => Err(Error::Syntax {
                        pos: start,
                        msg: format!("unknown name '{name}'"),
                    }),
                }
            }
            Some(_) => Err(self.err("unexpected character")),
        }
    }
}

fn constant_rational(f: &F) -> Option<Rational> {
    if !f.is_constant() {
        return None;
    }
    (f.num().coeff(0) / f.den().coeff(0)).as_rational()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::poly::Poly;
    use crate::funcalg::special::chebyshev_poly;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn worked_example_parses() {
        let f = parse("144*z*(z+3)/(z-9)^2").unwrap();
        assert_eq!(f.degree(), 2);
        assert_eq!(f.num(), &Poly::new(vec![s(0), s(432), s(144)]));
        assert_eq!(f.den(), &Poly::new(vec![s(81), s(-18), s(1)]));
    }

    #[test]
    fn builtins() {
        assert_eq!(parse("T(4)").unwrap().num(), &chebyshev_poly::<Scalar>(4));
        assert!(parse("z").unwrap().is_identity());
        assert_eq!(parse("Z(3)").unwrap(), parse("z^3").unwrap());
        assert_eq!(parse("D(2)").unwrap(), parse("(z^4+1)/(2*z^2)").unwrap());
    }

    #[test]
    fn radicals() {
        let f = parse("4*sqrt(3)*z/(4*z^2+3)").unwrap();
        assert_eq!(f.field_tag().unwrap(), Some(BigInt::from(3)));
        assert!(matches!(
            parse("sqrt(2) + sqrt(3)*z"),
            Err(Error::FieldMismatch(..))
        ));
        assert!(matches!(
            parse("sqrt(z)"),
            Err(Error::Syntax { pos: 5, .. })
        ));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse("z + * 2"),
            Err(Error::Syntax {
                pos: 4,
                msg: "unexpected character".into()
            })
        );
        assert_eq!(parse("1/(z-z)"), Err(Error::DivisionByZero { pos: 1 }));
        assert!(matches!(parse("(z+1"), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse("w"), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse("T(0)"), Err(Error::Syntax { pos: 2, .. })));
    }

    #[test]
    fn print_parse_roundtrip() {
        for text in [
            "144*z*(z+3)/(z-9)^2",
            "48*z/(4*z+3)^2",
            "4*sqrt(3)*z/(4*z^2+3)",
            "(1/2 - 4*sqrt(3))*z^3 - z + 7/5",
            "-z^2/(z^3 - 1/3)",
            "sqrt(-1)*z/(z - sqrt(-1))",
            "3",
            "D(3)",
        ] {
            let f = parse(text).unwrap();
            assert_eq!(parse(&print(&f)).unwrap(), f, "{text} -> {}", print(&f));
        }
    }

    #[test]
    fn points() {
        assert_eq!(parse_point("inf").unwrap(), ProjPoint::Infinity);
        assert_eq!(
            parse_point(" -3/7 ").unwrap(),
            ProjPoint::Finite(Scalar::rational(crate::funcalg::field::rat(-3, 7)))
        );
        assert!(parse_point("z").is_err());
    }
}
