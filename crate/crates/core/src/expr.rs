//! Small arithmetic expression grammar for position-dependent parameters:
//! `+ - * / ^`, parentheses, the variables `x y z`, numeric literals (with
//! an optional trailing `i` for imaginary values) and the constant `i`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Complex64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser {
            chars: src.char_indices().peekable(),
            src,
        };
        let e = p.expr()?;
        p.skip_ws();
        if let Some(&(pos, c)) = p.chars.peek() {
            return Err(Error::Expression(format!(
                "unexpected character '{}' at offset {} in \"{}\"",
                c, pos, src
            )));
        }
        Ok(e)
    }

    pub fn eval(&self, p: &Point) -> Complex64 {
        match self {
            Expr::Num(c) => *c,
            Expr::Var(i) => Complex64::new(p[*i], 0.0),
            Expr::Neg(e) => -e.eval(p),
            Expr::Add(a, b) => a.eval(p) + b.eval(p),
            Expr::Sub(a, b) => a.eval(p) - b.eval(p),
            Expr::Mul(a, b) => a.eval(p) * b.eval(p),
            Expr::Div(a, b) => a.eval(p) / b.eval(p),
            Expr::Pow(a, b) => a.eval(p).powc(b.eval(p)),
        }
    }
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(&(_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn eat(&mut self, expected: char) -> bool {
        self.skip_ws();
        if matches!(self.chars.peek(), Some(&(_, c)) if c == expected) {
            self.chars.next();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if self.eat('^') {
            // right-associative power
            let exp = self.factor()?;
            Ok(Expr::Pow(Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.chars.peek().copied() {
            Some((_, '(')) => {
                self.chars.next();
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Expression(format!(
                        "missing closing parenthesis in \"{}\"",
                        self.src
                    )));
                }
                Ok(inner)
            }
            Some((_, c)) if c.is_ascii_digit() || c == '.' => self.number(),
            Some((_, 'x')) => {
                self.chars.next();
                Ok(Expr::Var(0))
            }
            Some((_, 'y')) => {
                self.chars.next();
                Ok(Expr::Var(1))
            }
            Some((_, 'z')) => {
                self.chars.next();
                Ok(Expr::Var(2))
            }
            Some((_, 'i')) => {
                self.chars.next();
                Ok(Expr::Num(Complex64::i()))
            }
            Some((pos, c)) => Err(Error::Expression(format!(
                "unexpected character '{}' at offset {} in \"{}\"",
                c, pos, self.src
            ))),
            None => Err(Error::Expression(format!(
                "unexpected end of expression in \"{}\"",
                self.src
            ))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.chars.peek().map(|&(i, _)| i).unwrap_or(0);
        let mut end = start;
        let mut seen_exp = false;
        while let Some(&(i, c)) = self.chars.peek() {
            let take = c.is_ascii_digit()
                || c == '.'
                || c == 'e'
                || c == 'E'
                || ((c == '+' || c == '-') && seen_exp && (i == end))
                    && matches!(self.src.as_bytes().get(i.wrapping_sub(1)), Some(b'e') | Some(b'E'));
            if c == 'e' || c == 'E' {
                seen_exp = true;
            }
            if !take {
                break;
            }
            end = i + c.len_utf8();
            self.chars.next();
        }
        let text = &self.src[start..end];
        let value: f64 = text
            .parse()
            .map_err(|e| Error::Expression(format!("bad numeric literal \"{}\": {}", text, e)))?;
        // trailing `i` makes the literal imaginary
        if matches!(self.chars.peek(), Some(&(_, 'i'))) {
            self.chars.next();
            Ok(Expr::Num(Complex64::new(0.0, value)))
        } else {
            Ok(Expr::Num(Complex64::new(value, 0.0)))
        }
    }
}
