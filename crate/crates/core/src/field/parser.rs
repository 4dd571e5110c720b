//! Recursive-descent parser for the field expression language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ('^' int)?
//! atom   := number | ident | func '(' expr ')' | '(' expr ')' | '-' atom
//! ```
//!
//! Identifiers are the coordinates `x`, `y` and the constant `pi`; functions
//! are `sin`, `cos`, `exp` and `bump`. Exponents are (optionally signed)
//! integers.

use super::expr::Expr;
use crate::error::{Error, Result};

const FUNCS: [&str; 4] = ["sin", "cos", "exp", "bump"];

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.error(&["expression"]));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error(&["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, expected: &[&str]) -> Error {
        Error::Parse { offset: self.pos, expected: expected.iter().map(|s| s.to_string()).collect() }
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
            Err(self.error(&[&format!("'{}'", c as char)]))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let negative = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error(&["integer exponent"]));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        let n: i32 = digits.parse().map_err(|_| Error::Parse { offset: start, expected: vec!["small integer".into()] })?;
        Ok(Expr::Pow(Box::new(base), if negative { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Expr> {
        const ATOM: [&str; 5] = ["number", "identifier", "function", "'('", "'-'"];
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.atom()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                match name {
                    "x" => Ok(Expr::Var(0)),
                    "y" => Ok(Expr::Var(1)),
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    f if FUNCS.contains(&f) => {
                        self.expect(b'(')?;
                        let arg = Box::new(self.expr()?);
                        self.expect(b')')?;
                        Ok(match f {
                            "sin" => Expr::Sin(arg),
                            "cos" => Expr::Cos(arg),
                            "exp" => Expr::Exp(arg),
                            _ => Expr::Bump(arg),
                        })
                    }
                    _ => {
                        self.pos = start;
                        Err(self.error(&["x", "y", "pi", "sin", "cos", "exp", "bump"]))
                    }
                }
            }
            _ => Err(self.error(&ATOM)),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            self.pos = start;
            return Err(self.error(&["digit"]));
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark;
                return Err(self.error(&["exponent digits"]));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        text.parse().map(Expr::Num).map_err(|_| Error::Parse { offset: start, expected: vec!["number".into()] })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Expr::*;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn examples() {
        assert_eq!(parse("sin(x)").unwrap(), Sin(b(Var(0))));
        assert_eq!(
            parse("bump((x-1)/0.5)").unwrap(),
            Bump(b(Div(b(Sub(b(Var(0)), b(Num(1.0)))), b(Num(0.5)))))
        );
        let e = parse("x^2 + 2*x*y").unwrap();
        assert_eq!(e.eval(&[1.0, 2.0]).unwrap(), 5.0);
    }

    #[test]
    fn precedence_and_whitespace() {
        assert_eq!(parse(" 1 + 2 * 3 ").unwrap().eval(&[]).unwrap(), 7.0);
        assert_eq!(parse("2^-1").unwrap().eval(&[]).unwrap(), 0.5);
        assert_eq!(parse("8 / 4 / 2").unwrap().eval(&[]).unwrap(), 1.0);
        assert_eq!(parse("1 - 2 - 3").unwrap().eval(&[]).unwrap(), -4.0);
        assert_eq!(parse("--x").unwrap().eval(&[3.0]).unwrap(), 3.0);
        assert_eq!(parse("1.5e2").unwrap(), Num(150.0));
        assert!((parse("cos(pi)").unwrap().eval(&[]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_offsets() {
        match parse("sin(x") {
            Err(Error::Parse { offset, expected }) => {
                assert_eq!(offset, 5);
                assert_eq!(expected, vec!["')'"]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("x^1.5"), Err(Error::Parse { offset: 3, .. })));
        assert!(matches!(parse("z + 1"), Err(Error::Parse { offset: 0, .. })));
        assert!(matches!(parse(""), Err(Error::Parse { offset: 0, .. })));
        assert!(matches!(parse("x )"), Err(Error::Parse { offset: 2, .. })));
        assert!(matches!(parse("tan(x)"), Err(Error::Parse { .. })));
    }
}
