//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' exponent)?
//! base   := number | 'i' | 'pi' | ident | ident '(' expr ')' | '(' expr ')'
//! exponent := ['-'] number | '(' ['-'] number ['/' number] ')'
//! ```
//!
//! Identifiers are the picture's base coordinates, its unknown, jet
//! coordinates written `u_tz`, `u_zzbar`, `t_uu` (unknown, underscore, then
//! a run of base-coordinate names), and the elementary function names.

use super::expr::{Exponent, Expr, Func};
use super::{DerivCoord, ExprError, MultiIndex, Picture, MAX_ORDER};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, i)),
            b'-' => out.push((Tok::Minus, i)),
            b'*' => out.push((Tok::Star, i)),
            b'/' => out.push((Tok::Slash, i)),
            b'^' => out.push((Tok::Caret, i)),
            b'(' => out.push((Tok::LParen, i)),
            b')' => out.push((Tok::RParen, i)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ExprError::Syntax {
                    offset: start,
                    message: format!("malformed number `{text}`"),
                })?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                return Err(ExprError::Syntax { offset: i, message: format!("unexpected character `{}`", c as char) });
            }
        }
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    picture: Picture,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, what: &str) -> Result<T, ExprError> {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            t => format!("{t:?}"),
        };
        Err(ExprError::Syntax { offset: self.offset(), message: format!("expected {what}, found {found}") })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(what)
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    terms.push(-self.term()?);
                }
                _ => break,
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    factors.push(self.factor()?);
                }
                Tok::Slash => {
                    self.bump();
                    let at = self.offset();
                    let d = self.factor()?;
                    if d.is_zero() {
                        return Err(ExprError::DivisionByZero { offset: at });
                    }
                    factors.push(d.recip());
                }
                _ => break,
            }
        }
        Ok(Expr::product(factors))
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.factor()?);
        }
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let at = self.offset();
            let e = self.exponent()?;
            if base.is_zero() && e.is_negative() {
                return Err(ExprError::DivisionByZero { offset: at });
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn signed_number(&mut self) -> Option<f64> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek() {
            Tok::Num(v) => {
                let v = *v;
                self.bump();
                Some(if neg { -v } else { v })
            }
            _ => None,
        }
    }

    fn exponent(&mut self) -> Result<Exponent, ExprError> {
        let at = self.offset();
        let bad = ExprError::NonNumericExponent { offset: at };
        let value = if *self.peek() == Tok::LParen {
            self.bump();
            let num = self.signed_number().ok_or(bad.clone())?;
            let v = if *self.peek() == Tok::Slash {
                self.bump();
                match self.peek() {
                    Tok::Num(d) if *d != 0.0 => {
                        let d = *d;
                        self.bump();
                        num / d
                    }
                    _ => return Err(bad),
                }
            } else {
                num
            };
            if *self.peek() != Tok::RParen {
                return Err(bad);
            }
            self.bump();
            v
        } else {
            self.signed_number().ok_or(bad.clone())?
        };
        Exponent::from_f64(value).ok_or(bad)
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::real(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    if *self.peek() != Tok::LParen {
                        return self.unexpected("`(` after function name");
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::apply(f, arg));
                }
                self.identifier(&name, at)
            }
            _ => {
                self.pos -= 1;
                self.unexpected("a number, identifier or `(`")
            }
        }
    }

    fn identifier(&self, name: &str, at: usize) -> Result<Expr, ExprError> {
        let unknown = ExprError::UnknownIdentifier { name: name.to_string(), offset: at };
        match name {
            "i" => return Ok(Expr::i()),
            "pi" => return Ok(Expr::real(std::f64::consts::PI)),
            _ => {}
        }
        let u = self.picture.unknown();
        for c in self.picture.base() {
            if name == c.name() {
                return Ok(Expr::coord(c));
            }
        }
        if name == u.name() {
            return Ok(Expr::deriv(DerivCoord::new(self.picture, MultiIndex::ZERO)));
        }
        let Some(rest) = name.strip_prefix(u.name()).and_then(|r| r.strip_prefix('_')) else {
            return Err(unknown);
        };
        let mut index = MultiIndex::ZERO;
        let mut s = rest;
        if s.is_empty() {
            return Err(unknown);
        }
        while !s.is_empty() {
            // longest match first so `zbar` wins over `z`
            let mut names: Vec<(usize, &str)> =
                self.picture.base().iter().enumerate().map(|(i, c)| (i, c.name())).collect();
            names.sort_by_key(|(_, n)| std::cmp::Reverse(n.len()));
            let Some((slot, n)) = names.into_iter().find(|(_, n)| s.starts_with(n)) else {
                return Err(unknown);
            };
            index = index.bump(slot);
            s = &s[n.len()..];
        }
        if index.order() > MAX_ORDER {
            return Err(ExprError::OrderCap { order: index.order(), cap: MAX_ORDER });
        }
        Ok(Expr::deriv(DerivCoord::new(self.picture, index)))
    }
}

/// Parses `text` in the given picture.
pub fn parse_expr(text: &str, picture: Picture) -> Result<Expr, ExprError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, picture };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.unexpected("an operator or end of input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffexpr::{Coord, Node};

    #[test]
    fn reads_sum_with_imaginary_unit() {
        let e = parse_expr("z^2 + i", Picture::Direct).unwrap();
        let want = Expr::sum([Expr::coord(Coord::Z).powi(2), Expr::i()]);
        assert_eq!(e, want);
    }

    #[test]
    fn reads_exp_of_half_u() {
        let e = parse_expr("exp(u/2)", Picture::Hodograph).unwrap();
        let want = Expr::apply(Func::Exp, Expr::product([Expr::coord(Coord::U), Expr::real(2.0).recip()]));
        assert_eq!(e, want);
        // in the direct picture `u` is the unknown
        let e = parse_expr("exp(u/2)", Picture::Direct).unwrap();
        let Node::Func(Func::Exp, arg) = e.node() else { panic!() };
        assert!(arg.deriv_coords().contains(&DerivCoord::new(Picture::Direct, MultiIndex::ZERO)));
    }

    #[test]
    fn syntax_error_offset() {
        match parse_expr("z + )", Picture::Direct) {
            Err(ExprError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_foreign_identifiers() {
        assert!(matches!(parse_expr("t + w", Picture::Direct), Err(ExprError::UnknownIdentifier { offset: 4, .. })));
        // `t` is the unknown in the hodograph picture, `u` a coordinate
        assert!(parse_expr("t_u + u", Picture::Hodograph).is_ok());
        assert!(matches!(parse_expr("u_u", Picture::Direct), Err(ExprError::UnknownIdentifier { .. })));
    }

    #[test]
    fn non_numeric_exponent() {
        assert!(matches!(parse_expr("z^t", Picture::Direct), Err(ExprError::NonNumericExponent { offset: 2 })));
        assert!(matches!(parse_expr("z^(1/3)", Picture::Direct), Err(ExprError::NonNumericExponent { .. })));
        assert_eq!(parse_expr("z^(-1/2)", Picture::Direct).unwrap(), Expr::coord(Coord::Z).pow(Exponent::Half(-1)));
    }

    #[test]
    fn jet_identifiers() {
        let e = parse_expr("u_zzbar", Picture::Direct).unwrap();
        assert_eq!(e, Expr::jet(Picture::Direct, 0, 1, 1));
        let e = parse_expr("t_uzbarz", Picture::Hodograph).unwrap();
        assert_eq!(e, Expr::jet(Picture::Hodograph, 1, 1, 1));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let e = parse_expr("-z^2", Picture::Direct).unwrap();
        assert_eq!(e, -Expr::coord(Coord::Z).powi(2));
    }

    #[test]
    fn literal_division_by_zero() {
        assert!(matches!(parse_expr("z/(1-1)", Picture::Direct), Err(ExprError::DivisionByZero { offset: 2 })));
    }

    #[test]
    fn numbers_with_exponents() {
        assert_eq!(parse_expr("2.5e-1", Picture::Direct).unwrap(), Expr::real(0.25));
        assert_eq!(parse_expr("1E2", Picture::Direct).unwrap(), Expr::real(100.0));
    }
}
