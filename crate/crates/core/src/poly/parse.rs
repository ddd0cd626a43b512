//! Text grammar for polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' INT)?
//! atom   := INT ('/' INT)? | NAME | '(' expr ')'
//! ```
//!
//! `#` starts a comment that runs to the end of the line. Whitespace is
//! insignificant.

use num_bigint::BigInt;

use super::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `x1, ..., xn`.
pub fn default_var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Parses `text` as a polynomial in the ordered variables `vars`.
pub fn parse_polynomial(text: &str, vars: &[String]) -> Result<Polynomial> {
    Parser::new(text, vars).parse()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

pub struct Parser<'a> {
    text: &'a str,
    vars: &'a [String],
    line0: usize,
    col0: usize,
    toks: Vec<Spanned>,
    pos: usize,
}

impl<'a> Parser<'a> {
    pub fn new(text: &'a str, vars: &'a [String]) -> Self {
        Parser {
            text,
            vars,
            line0: 1,
            col0: 1,
            toks: Vec::new(),
            pos: 0,
        }
    }

    /// Reports positions as if `text` started at `line`, `column` of a larger
    /// file.
    pub fn with_origin(mut self, line: usize, column: usize) -> Self {
        self.line0 = line;
        self.col0 = column;
        self
    }

    pub fn parse(mut self) -> Result<Polynomial> {
        if self.vars.is_empty() {
            return Err(Error::InvalidInput("at least one variable is required".into()));
        }
        self.toks = self.lex()?;
        let p = self.expr()?;
        let t = self.peek();
        if t.tok != Tok::End {
            return Err(self.error_at(t, "unexpected trailing input"));
        }
        Ok(p)
    }

    fn lex(&self) -> Result<Vec<Spanned>> {
        let mut out = Vec::new();
        let mut line = self.line0;
        let mut col = self.col0;
        let mut chars = self.text.chars().peekable();
        while let Some(&c) = chars.peek() {
            let (tl, tc) = (line, col);
            let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: tl, column: tc });
            if c == '\n' {
                chars.next();
                line += 1;
                col = 1;
                continue;
            }
            if c.is_whitespace() {
                chars.next();
                col += 1;
                continue;
            }
            if c == '#' {
                while let Some(&d) = chars.peek() {
                    if d == '\n' {
                        break;
                    }
                    chars.next();
                }
                continue;
            }
            if c.is_ascii_digit() {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                push(&mut out, Tok::Int(s.parse().expect("digits")));
                continue;
            }
            if c.is_ascii_alphabetic() {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                push(&mut out, Tok::Name(s));
                continue;
            }
            let tok = match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => {
                    return Err(Error::Syntax {
                        line: tl,
                        column: tc,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            };
            chars.next();
            col += 1;
            push(&mut out, tok);
        }
        out.push(Spanned {
            tok: Tok::End,
            line,
            column: col,
        });
        Ok(out)
    }

    fn peek(&self) -> Spanned {
        self.toks[self.pos].clone()
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: Spanned, message: &str) -> Error {
        let what = match &t.tok {
            Tok::End => "end of input".to_string(),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Name(n) => format!("`{n}`"),
            other => format!("{other:?}"),
        };
        Error::Syntax {
            line: t.line,
            column: t.column,
            message: format!("{message} (found {what})"),
        }
    }

    fn arity(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while self.peek().tok == Tok::Star {
            self.bump();
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let t = self.bump();
        match &t.tok {
            Tok::Int(v) => {
                let e: u32 = u32::try_from(v).map_err(|_| Error::Syntax {
                    line: t.line,
                    column: t.column,
                    message: "exponent does not fit in 32 bits".into(),
                })?;
                Ok(base.pow(e))
            }
            _ => Err(self.error_at(t, "expected a non-negative integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let t = self.bump();
        match t.tok.clone() {
            Tok::Int(n) => {
                if self.peek().tok == Tok::Slash {
                    self.bump();
                    let dt = self.bump();
                    match dt.tok {
                        Tok::Int(d) => {
                            if d == BigInt::from(0) {
                                return Err(Error::Syntax {
                                    line: dt.line,
                                    column: dt.column,
                                    message: "zero denominator".into(),
                                });
                            }
                            let c = Scalar::new(n, d)?;
                            Ok(Polynomial::constant(self.arity(), c))
                        }
                        _ => Err(self.error_at(dt, "expected an integer denominator")),
                    }
                } else {
                    Ok(Polynomial::constant(self.arity(), Scalar::from_bigint(n)))
                }
            }
            Tok::Name(name) => match self.vars.iter().position(|v| *v == name) {
                Some(j) => Ok(Polynomial::var(self.arity(), j)),
                None => Err(Error::UnknownVariable {
                    name,
                    line: t.line,
                    column: t.column,
                }),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.bump();
                if close.tok != Tok::RParen {
                    return Err(self.error_at(close, "expected `)`"));
                }
                Ok(inner)
            }
            _ => Err(self.error_at(t, "expected a number, variable or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        default_var_names(n)
    }

    #[test]
    fn expansion_is_forced() {
        let p = parse_polynomial("x1 + (x2 + 3/2*x3)^2", &names(3)).unwrap();
        let expected = parse_polynomial("x1 + x2^2 + 3*x2*x3 + 9/4*x3^2", &names(3)).unwrap();
        assert_eq!(p, expected);
        assert_eq!(p.num_terms(), 4);
    }

    #[test]
    fn zero_literal() {
        assert!(parse_polynomial("0", &names(2)).unwrap().is_zero());
        assert!(parse_polynomial("x1 - x1", &names(2)).unwrap().is_zero());
    }

    #[test]
    fn unary_minus_binds_looser_than_caret() {
        let p = parse_polynomial("-x1^2", &names(1)).unwrap();
        assert_eq!(p.to_string(), "-x1^2");
        let q = parse_polynomial("(-x1)^3 + - - x1", &names(1)).unwrap();
        assert_eq!(q.to_string(), "x1 - x1^3");
    }

    #[test]
    fn comments_and_custom_names() {
        let vars = vec!["a".to_string(), "b_2".to_string()];
        let p = parse_polynomial("a*b_2 # trailing\n + 1", &vars).unwrap();
        assert_eq!(p.render(&vars), "1 + a*b_2");
    }

    #[test]
    fn error_positions() {
        match parse_polynomial("x1 +\n  x9", &names(2)) {
            Err(Error::UnknownVariable { name, line, column }) => {
                assert_eq!((name.as_str(), line, column), ("x9", 2, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_polynomial("x1 + 1/0", &names(1)) {
            Err(Error::Syntax { line: 1, column: 8, message }) => assert!(message.contains("zero")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_polynomial("(x1", &names(1)), Err(Error::Syntax { .. })));
        assert!(matches!(parse_polynomial("x1 $", &names(1)), Err(Error::Syntax { column: 4, .. })));
        assert!(matches!(parse_polynomial("x1 x1", &names(1)), Err(Error::Syntax { .. })));
        assert!(matches!(parse_polynomial("x1^x1", &names(1)), Err(Error::Syntax { .. })));
    }
}
