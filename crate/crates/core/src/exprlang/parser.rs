use rug::ops::Pow;
use std::fmt;

use rug::{Integer, Rational};

use super::ast::{Expr, Span};
use super::interval::{Bound, Interval};
use crate::families::FamilyInstance;

/// Parse failure with a byte offset into the input.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl ParseError {
    fn new(pos: usize, message: impl Into<String>) -> ParseError {
        ParseError { pos, message: message.into() }
    }

    /// 1-based column.
    pub fn column(&self) -> usize {
        self.pos + 1
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at column {}: {}", self.column(), self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eq,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: Span,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(q) => format!("number {}", super::interval::format_rational(q)),
        Tok::Ident(s) => format!("identifier '{s}'"),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::LBrack => "'['".into(),
        Tok::RBrack => "']'".into(),
        Tok::Comma => "','".into(),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Slash => "'/'".into(),
        Tok::Caret => "'^'".into(),
        Tok::Eq => "'='".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn pow10(k: u32) -> Integer {
    Integer::from(10).pow(k)
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out: Vec<Token> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'[' => Some(Tok::LBrack),
            b']' => Some(Tok::RBrack),
            b',' => Some(Tok::Comma),
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(t) = single {
            out.push(Token { tok: t, span: Span::new(start, start + 1) });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let (value, end, integral) = lex_number(src, i)?;
            i = end;
            // `p/q` written without spaces is one rational literal, unless the
            // numerator itself follows '/' or '^'
            let prev_blocks = matches!(out.last().map(|t| &t.tok), Some(Tok::Slash | Tok::Caret));
            if integral && !prev_blocks && bytes.get(i) == Some(&b'/') && bytes.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                let (den, end2, den_integral) = lex_number(src, i + 1)?;
                if den_integral {
                    if den.cmp0() == std::cmp::Ordering::Equal {
                        return Err(ParseError::new(i + 1, "zero denominator in rational literal"));
                    }
                    i = end2;
                    out.push(Token { tok: Tok::Num(value / den), span: Span::new(start, i) });
                    continue;
                }
            }
            out.push(Token { tok: Tok::Num(value), span: Span::new(start, i) });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_ascii_lowercase()), span: Span::new(start, i) });
            continue;
        }
        let ch = src[i..].chars().next().unwrap_or('?');
        return Err(ParseError::new(i, format!("unexpected character '{ch}'")));
    }
    if out.len() > MAX_TOKENS {
        return Err(ParseError::new(out[MAX_TOKENS].span.start, format!("input longer than {MAX_TOKENS} tokens")));
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(src.len(), src.len()) });
    Ok(out)
}

/// Returns `(value, end, is_plain_integer)`.
fn lex_number(src: &str, start: usize) -> Result<(Rational, usize, bool), ParseError> {
    let bytes = src.as_bytes();
    let mut i = start;
    let mut digits = String::new();
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        digits.push(bytes[i] as char);
        i += 1;
    }
    let mut frac_len = 0u32;
    let mut integral = true;
    if i < bytes.len() && bytes[i] == b'.' {
        integral = false;
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            digits.push(bytes[i] as char);
            frac_len += 1;
            i += 1;
        }
    }
    let mut exp: i64 = 0;
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        let mut neg = false;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            neg = bytes[j] == b'-';
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            let es = j;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let v: i64 = src[es..j].parse().map_err(|_| ParseError::new(es, "exponent too large"))?;
            if v > 100_000 {
                return Err(ParseError::new(es, "exponent too large"));
            }
            exp = if neg { -v } else { v };
            integral = false;
            i = j;
        }
    }
    if digits.is_empty() {
        return Err(ParseError::new(start, "malformed number"));
    }
    let mant: Integer = digits.parse().map_err(|_| ParseError::new(start, "malformed number"))?;
    let mut value = Rational::from((mant, pow10(frac_len)));
    if exp >= 0 {
        value *= pow10(exp as u32);
    } else {
        value /= pow10((-exp) as u32);
    }
    Ok((value, i, integral))
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
}

const MAX_DEPTH: usize = 200;
const MAX_TOKENS: usize = 2000;

/// Parsed `<expr> [on <interval>]`.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub expr: Expr,
    pub interval: Option<Interval>,
}

/// Parses an expression, optionally followed by `on <interval>`.
pub fn parse(src: &str) -> Result<Parsed, ParseError> {
    let mut p = Parser { src, toks: lex(src)?, pos: 0, depth: 0 };
    let expr = p.expr()?;
    let interval = if p.peek_ident("on") {
        p.bump();
        Some(p.interval()?)
    } else {
        None
    };
    p.expect_eof()?;
    Ok(Parsed { expr, interval })
}

/// Parses an expression without an interval suffix.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let parsed = parse(src)?;
    if parsed.interval.is_some() {
        return Err(ParseError::new(src.find(" on").map_or(0, |i| i + 1), "unexpected interval suffix"));
    }
    Ok(parsed.expr)
}

/// Parses an interval such as `(0, inf)` or `[1/2, 3)`.
pub fn parse_interval(src: &str) -> Result<Interval, ParseError> {
    let mut p = Parser { src, toks: lex(src)?, pos: 0, depth: 0 };
    let i = p.interval()?;
    p.expect_eof()?;
    Ok(i)
}

/// Parses a family written as `name key=value key=value ...` (commas optional),
/// optionally followed by `on <interval>`.
pub fn parse_family_spec(src: &str) -> Result<(FamilyInstance, Option<Interval>), ParseError> {
    let mut p = Parser { src, toks: lex(src)?, pos: 0, depth: 0 };
    let (mut name, mut name_span) = match p.bump() {
        Token { tok: Tok::Ident(s), span } => (s, span),
        t => return Err(ParseError::new(t.span.start, format!("expected family name, found {}", describe(&t.tok)))),
    };
    // hyphenated names such as `psi-gap`
    while p.peek() == &Tok::Minus && p.adjacent() && matches!(p.peek_at(1), Tok::Ident(_)) {
        p.bump();
        if !p.adjacent() {
            return Err(ParseError::new(p.span().start, "unexpected space inside family name"));
        }
        if let Token { tok: Tok::Ident(part), span } = p.bump() {
            name.push_str(&part);
            name_span = name_span.join(span);
        }
    }
    let bracketed = p.peek() == &Tok::LBrack;
    if bracketed {
        p.bump();
    }
    let mut params = Vec::new();
    loop {
        match p.peek().clone() {
            Tok::Ident(s) if s != "on" => {
                let key_span = p.bump().span;
                p.expect(Tok::Eq)?;
                let v = p.param_value()?;
                params.push((s, v, key_span));
            }
            Tok::Comma => {
                p.bump();
            }
            _ => break,
        }
    }
    if bracketed {
        p.expect(Tok::RBrack)?;
    }
    let instance = build_family(&name, name_span, params)?;
    let interval = if p.peek_ident("on") {
        p.bump();
        Some(p.interval()?)
    } else {
        None
    };
    p.expect_eof()?;
    Ok((instance, interval))
}

fn build_family(name: &str, span: Span, params: Vec<(String, Expr, Span)>) -> Result<FamilyInstance, ParseError> {
    let plain: Vec<(String, Expr)> = params.iter().map(|(k, v, _)| (k.clone(), v.clone())).collect();
    FamilyInstance::from_params(name, &plain).map_err(|e| {
        let pos = e
            .param()
            .and_then(|k| params.iter().find(|(pk, _, _)| pk == k).map(|(_, _, s)| s.start))
            .unwrap_or(span.start);
        ParseError::new(pos, e.to_string())
    })
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn peek_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == name)
    }

    /// Whether the current token starts exactly where the previous one ended.
    fn adjacent(&self) -> bool {
        self.pos > 0 && self.toks[self.pos - 1].span.end == self.toks[self.pos].span.start
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Span, ParseError> {
        if *self.peek() == want {
            Ok(self.bump().span)
        } else {
            Err(ParseError::new(self.span().start, format!("expected {}, found {}", describe(&want), describe(self.peek()))))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(ParseError::new(self.span().start, format!("unexpected {}", describe(self.peek()))))
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::new(self.span().start, "expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::add(lhs, rhs);
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::sub(lhs, rhs);
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let (mut lhs, mut literal) = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let (rhs, _) = self.unary()?;
                    lhs = Expr::mul(lhs, rhs);
                }
                Tok::Slash => {
                    self.bump();
                    let (rhs, _) = self.unary()?;
                    lhs = Expr::div(lhs, rhs);
                }
                // implicit product after a numeric literal written flush
                // against it: `2x`, `3(x+1)`; `a=2 b=1` stays two items
                Tok::Ident(s) if literal && s != "on" && self.adjacent() => {
                    let (rhs, _) = self.unary()?;
                    lhs = Expr::mul(lhs, rhs);
                }
                Tok::LParen if literal && self.adjacent() => {
                    let (rhs, _) = self.unary()?;
                    lhs = Expr::mul(lhs, rhs);
                }
                _ => break,
            }
            literal = false;
        }
        Ok(lhs)
    }

    /// Returns the node and whether it is a bare numeric literal.
    fn unary(&mut self) -> Result<(Expr, bool), ParseError> {
        match self.peek() {
            Tok::Minus => {
                let start = self.bump().span;
                // `-<literal>` is a negative constant unless an exponent follows
                if let Tok::Num(v) = self.peek().clone() {
                    if *self.peek_at(1) != Tok::Caret {
                        let end = self.bump().span;
                        return Ok((Expr::constant(-v).with_span(start.join(end)), true));
                    }
                }
                self.enter()?;
                let (inner, _) = self.unary()?;
                self.depth -= 1;
                let span = start.join(inner.span);
                Ok((Expr::neg(inner).with_span(span), false))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<(Expr, bool), ParseError> {
        let (base, literal) = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok((base, literal));
        }
        self.bump();
        self.enter()?;
        let (exponent, _) = self.unary()?;
        self.depth -= 1;
        let span = base.span.join(exponent.span);
        if let Some(q) = exponent.fold_rational() {
            return Ok((Expr::pow(base, q).with_span(span), false));
        }
        // non-rational exponent: f^g = exp(g * log f)
        Ok((Expr::exp(Expr::mul(exponent, Expr::log(base))).with_span(span), false))
    }

    fn primary(&mut self) -> Result<(Expr, bool), ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v) => Ok((Expr::constant(v).with_span(t.span), true)),
            Tok::LParen => {
                let inner = self.expr()?;
                let end = self.expect(Tok::RParen)?;
                let span = t.span.join(end);
                Ok((inner.with_span(span), false))
            }
            Tok::Ident(name) => self.ident(name, t.span).map(|e| (e, false)),
            other => Err(ParseError::new(t.span.start, format!("unexpected {}", describe(&other)))),
        }
    }

    fn ident(&mut self, name: String, span: Span) -> Result<Expr, ParseError> {
        match name.as_str() {
            "x" => return Ok(Expr::var().with_span(span)),
            "pi" => return Ok(Expr::pi().with_span(span)),
            _ => {}
        }
        if *self.peek() == Tok::LBrack {
            self.bump();
            let mut params = Vec::new();
            loop {
                if *self.peek() == Tok::RBrack {
                    break;
                }
                let key = match self.bump() {
                    Token { tok: Tok::Ident(k), span } => (k, span),
                    t => return Err(ParseError::new(t.span.start, format!("expected parameter name, found {}", describe(&t.tok)))),
                };
                self.expect(Tok::Eq)?;
                let v = self.param_value()?;
                params.push((key.0, v, key.1));
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            let end = self.expect(Tok::RBrack)?;
            let inst = build_family(&name, span, params)?;
            return Ok(Expr::family(inst).with_span(span.join(end)));
        }
        if *self.peek() != Tok::LParen {
            return Err(ParseError::new(span.start, format!("unknown identifier '{}'", &self.src[span.start..span.end])));
        }
        self.bump();
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        let end = self.expect(Tok::RParen)?;
        let full = span.join(end);
        let arity = |n: usize| -> Result<(), ParseError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(ParseError::new(span.start, format!("'{name}' takes {n} argument(s), got {}", args.len())))
            }
        };
        let e = match name.as_str() {
            "exp" => {
                arity(1)?;
                Expr::exp(args.remove(0))
            }
            "log" | "ln" => {
                arity(1)?;
                Expr::log(args.remove(0))
            }
            "sqrt" => {
                arity(1)?;
                Expr::pow(args.remove(0), Rational::from((1, 2)))
            }
            "sin" => {
                arity(1)?;
                Expr::sin(args.remove(0))
            }
            "cos" => {
                arity(1)?;
                Expr::cos(args.remove(0))
            }
            "loggamma" | "lgamma" | "lngamma" => {
                arity(1)?;
                Expr::log_gamma(args.remove(0))
            }
            "gamma" => {
                arity(1)?;
                Expr::exp(Expr::log_gamma(args.remove(0)))
            }
            "psi" | "digamma" if args.len() == 1 => Expr::digamma(args.remove(0)),
            "psi" | "polygamma" => {
                arity(2)?;
                let m = args[0]
                    .fold_rational()
                    .filter(|q| *q.denom() == 1 && q.cmp0() != std::cmp::Ordering::Less)
                    .and_then(|q| q.numer().to_u32())
                    .filter(|m| *m <= 1000)
                    .ok_or_else(|| ParseError::new(args[0].span.start, "polygamma order must be a non-negative integer"))?;
                Expr::polygamma(m, args.remove(1))
            }
            "trigamma" => {
                arity(1)?;
                Expr::polygamma(1, args.remove(0))
            }
            "overx" => {
                arity(1)?;
                Expr::over_x(args.remove(0))
            }
            other => {
                if let Some(m) = other.strip_prefix("psi").and_then(|d| d.parse::<u32>().ok()) {
                    arity(1)?;
                    if m > 1000 {
                        return Err(ParseError::new(span.start, "polygamma order too large"));
                    }
                    Expr::polygamma(m, args.remove(0))
                } else {
                    return Err(ParseError::new(span.start, format!("unknown function '{}'", &self.src[span.start..span.end])));
                }
            }
        };
        Ok(e.with_span(full))
    }

    fn param_value(&mut self) -> Result<Expr, ParseError> {
        let e = self.expr()?;
        if !e.is_closed() {
            return Err(ParseError::new(e.span.start, "family parameters must not depend on x"));
        }
        Ok(e)
    }

    fn interval(&mut self) -> Result<Interval, ParseError> {
        let open_span = self.span();
        let lo_closed = match self.bump().tok {
            Tok::LParen => false,
            Tok::LBrack => true,
            other => return Err(ParseError::new(open_span.start, format!("expected '(' or '[' to start an interval, found {}", describe(&other)))),
        };
        let lo_pos = self.span().start;
        let lo = self.bound()?;
        self.expect(Tok::Comma)?;
        let hi_pos = self.span().start;
        let hi = self.bound()?;
        let close_span = self.span();
        let hi_closed = match self.bump().tok {
            Tok::RParen => false,
            Tok::RBrack => true,
            other => return Err(ParseError::new(close_span.start, format!("expected ')' or ']' to end an interval, found {}", describe(&other)))),
        };
        let lo_b = match lo {
            BoundValue::NegInf => {
                if lo_closed {
                    return Err(ParseError::new(lo_pos, "infinite endpoint cannot be closed"));
                }
                Bound::Infinite
            }
            BoundValue::PosInf => return Err(ParseError::new(lo_pos, "lower endpoint cannot be +inf")),
            BoundValue::Finite(q) => {
                if lo_closed {
                    Bound::Closed(q)
                } else {
                    Bound::Open(q)
                }
            }
        };
        let hi_b = match hi {
            BoundValue::PosInf => {
                if hi_closed {
                    return Err(ParseError::new(hi_pos, "infinite endpoint cannot be closed"));
                }
                Bound::Infinite
            }
            BoundValue::NegInf => return Err(ParseError::new(hi_pos, "upper endpoint cannot be -inf")),
            BoundValue::Finite(q) => {
                if hi_closed {
                    Bound::Closed(q)
                } else {
                    Bound::Open(q)
                }
            }
        };
        let iv = Interval::new(lo_b, hi_b);
        if iv.is_empty() {
            return Err(ParseError::new(lo_pos, format!("empty interval {iv}")));
        }
        Ok(iv)
    }

    fn bound(&mut self) -> Result<BoundValue, ParseError> {
        let mut neg = false;
        match self.peek() {
            Tok::Minus => {
                neg = true;
                self.bump();
            }
            Tok::Plus => {
                self.bump();
            }
            _ => {}
        }
        let t = self.bump();
        match t.tok {
            Tok::Ident(s) if s == "inf" || s == "infinity" || s == "oo" => Ok(if neg { BoundValue::NegInf } else { BoundValue::PosInf }),
            Tok::Num(v) => Ok(BoundValue::Finite(if neg { -v } else { v })),
            other => Err(ParseError::new(t.span.start, format!("expected a number or inf, found {}", describe(&other)))),
        }
    }
}

enum BoundValue {
    NegInf,
    PosInf,
    Finite(Rational),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::ExprKind;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn literals_and_precedence() {
        let e = parse_expr("1 + 2*x^2").unwrap();
        assert_eq!(e, Expr::add(Expr::int(1), Expr::mul(Expr::int(2), Expr::pow(Expr::var(), q(2, 1)))));
        let e = parse_expr("-x^2").unwrap();
        assert_eq!(e, Expr::neg(Expr::pow(Expr::var(), q(2, 1))));
        let e = parse_expr("-2").unwrap();
        assert_eq!(e, Expr::constant(q(-2, 1)));
        let e = parse_expr("x^(1/2)").unwrap();
        assert_eq!(e, Expr::pow(Expr::var(), q(1, 2)));
        let e = parse_expr("x/2/3").unwrap();
        assert_eq!(e, Expr::div(Expr::div(Expr::var(), Expr::int(2)), Expr::int(3)));
        let e = parse_expr("2x").unwrap();
        assert_eq!(e, Expr::mul(Expr::int(2), Expr::var()));
        let e = parse_expr("1.5e-3").unwrap();
        assert_eq!(e, Expr::constant(q(3, 2000)));
    }

    #[test]
    fn functions_and_sugar() {
        assert_eq!(parse_expr("sqrt(x)").unwrap(), Expr::pow(Expr::var(), q(1, 2)));
        assert_eq!(parse_expr("psi1(x)").unwrap(), Expr::polygamma(1, Expr::var()));
        assert_eq!(parse_expr("polygamma(2, x)").unwrap(), Expr::polygamma(2, Expr::var()));
        assert_eq!(parse_expr("ln(x)").unwrap(), Expr::log(Expr::var()));
        let e = parse_expr("x^x").unwrap();
        assert!(matches!(e.kind, ExprKind::Exp(_)));
    }

    #[test]
    fn interval_suffix() {
        let p = parse("exp(-x) on (0, inf)").unwrap();
        assert_eq!(p.interval, Some(Interval::positive()));
        let p = parse("x on [1/2, 3)").unwrap();
        assert_eq!(p.interval.unwrap().to_string(), "[0.5, 3)");
        assert!(parse("x on (2, 1)").is_err());
        assert!(parse("x on [0, inf]").is_err());
    }

    #[test]
    fn error_positions() {
        let err = parse_expr("exp(x").unwrap_err();
        assert_eq!(err.column(), 6);
        let err = parse_expr("foo(x)").unwrap_err();
        assert!(err.message.contains("unknown function"));
        assert_eq!(err.column(), 1);
        let err = parse_expr("1 + y").unwrap_err();
        assert_eq!(err.column(), 5);
        assert!(parse_expr("1/0").is_err());
    }

    #[test]
    fn deep_nesting_is_rejected() {
        let s = "(".repeat(500) + "x" + &")".repeat(500);
        assert!(parse_expr(&s).is_err());
    }
}
