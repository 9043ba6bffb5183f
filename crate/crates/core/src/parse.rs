//! Text grammar for scalars and forms.
//!
//! ```text
//! expr   := wedge (('+' | '-') wedge)*
//! wedge  := prod ('^' prod)*
//! prod   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('**' INT)?
//! atom   := NUMBER ('/' NUMBER)? | IDENT | '(' expr ')'
//! ```
//!
//! Identifiers: `x<l>` base variables, `u<i>[_<dirs>]` jet variables,
//! `dx<l>`, `du<i>[_<dirs>]`, `th<i>[_<dirs>]` generators. Direction strings
//! are one digit per direction and must be non-decreasing; the bracketed
//! spelling `u1_[10,12]` covers bundles with more than nine base directions.
//! `**` takes a nonnegative integer exponent on scalar subexpressions; `^`
//! is the wedge product and binds looser than `*`. Coordinate differentials
//! `du` are converted to the contact basis on the spot, so parsing always
//! yields a normalized contact form.

use num::{BigInt, BigRational, One};

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::form::{ClassicForm, Form};
use crate::multi_index::MultiIndex;
use crate::scalar::ScalarExpr;

#[derive(Clone, Debug, PartialEq)]
enum TokenKind {
    Number(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    StarStar,
    Caret,
    Slash,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokenKind,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokenize(mut self) -> Result<Vec<Token>> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() {
                self.bump();
                continue;
            }
            let (line, col) = (self.line, self.col);
            let kind = match c {
                b'+' => {
                    self.bump();
                    TokenKind::Plus
                }
                b'-' => {
                    self.bump();
                    TokenKind::Minus
                }
                b'*' => {
                    self.bump();
                    if self.peek() == Some(b'*') {
                        self.bump();
                        TokenKind::StarStar
                    } else {
                        TokenKind::Star
                    }
                }
                b'^' => {
                    self.bump();
                    TokenKind::Caret
                }
                b'/' => {
                    self.bump();
                    TokenKind::Slash
                }
                b'(' => {
                    self.bump();
                    TokenKind::LParen
                }
                b')' => {
                    self.bump();
                    TokenKind::RParen
                }
                b'0'..=b'9' => {
                    let mut digits = String::new();
                    while matches!(self.peek(), Some(b'0'..=b'9')) {
                        digits.push(self.bump() as char);
                    }
                    TokenKind::Number(digits.parse().expect("digits"))
                }
                b'a'..=b'z' => {
                    let mut ident = String::new();
                    while matches!(self.peek(), Some(b'a'..=b'z' | b'0'..=b'9' | b'_')) {
                        ident.push(self.bump() as char);
                    }
                    // bracketed multi-index directly after a trailing underscore
                    if ident.ends_with('_') && self.peek() == Some(b'[') {
                        ident.push(self.bump() as char);
                        loop {
                            match self.peek() {
                                Some(b']') => {
                                    ident.push(self.bump() as char);
                                    break;
                                }
                                Some(b'0'..=b'9' | b',') => ident.push(self.bump() as char),
                                _ => {
                                    return Err(Error::parse(
                                        self.line,
                                        self.col,
                                        "unterminated bracketed multi-index",
                                    ))
                                }
                            }
                        }
                    }
                    TokenKind::Ident(ident)
                }
                other => {
                    return Err(Error::parse(
                        line,
                        col,
                        format!("unexpected character '{}'", other as char),
                    ))
                }
            };
            out.push(Token { kind, line, col });
        }
        Ok(out)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    bundle: Bundle,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::parse(line, col, message)
    }

    fn expr(&mut self) -> Result<Form> {
        let mut acc = self.wedge()?;
        loop {
            match self.peek() {
                Some(TokenKind::Plus) => {
                    self.bump();
                    acc = &acc + &self.wedge()?;
                }
                Some(TokenKind::Minus) => {
                    self.bump();
                    acc = &acc - &self.wedge()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn wedge(&mut self) -> Result<Form> {
        let mut acc = self.prod()?;
        while self.peek() == Some(&TokenKind::Caret) {
            self.bump();
            acc = acc.wedge(&self.prod()?);
        }
        Ok(acc)
    }

    fn prod(&mut self) -> Result<Form> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&TokenKind::Star) {
            self.bump();
            acc = acc.wedge(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Form> {
        if self.peek() == Some(&TokenKind::Minus) {
            self.bump();
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Form> {
        let base = self.atom()?;
        if self.peek() != Some(&TokenKind::StarStar) {
            return Ok(base);
        }
        self.bump();
        let exponent = match self.bump().map(|t| t.kind) {
            Some(TokenKind::Number(n)) => n,
            _ => return Err(self.err("'**' needs a nonnegative integer exponent")),
        };
        let scalar = scalar_of(&base)
            .ok_or_else(|| self.err("'**' applies to scalar subexpressions only"))?;
        let exponent: u32 = exponent
            .try_into()
            .map_err(|_| self.err("exponent too large"))?;
        Ok(Form::from_scalar(scalar.pow(exponent)))
    }

    fn atom(&mut self) -> Result<Form> {
        match self.bump().map(|t| t.kind) {
            Some(TokenKind::Number(num)) => {
                if self.peek() == Some(&TokenKind::Slash) {
                    self.bump();
                    match self.bump().map(|t| t.kind) {
                        Some(TokenKind::Number(den)) => {
                            if den == BigInt::from(0) {
                                return Err(self.err("zero denominator"));
                            }
                            Ok(Form::from_scalar(ScalarExpr::constant(
                                self.bundle,
                                BigRational::new(num, den),
                            )))
                        }
                        _ => Err(self.err("'/' needs an integer denominator")),
                    }
                } else {
                    Ok(Form::from_scalar(ScalarExpr::constant(
                        self.bundle,
                        BigRational::from_integer(num),
                    )))
                }
            }
            Some(TokenKind::Ident(name)) => self.ident(&name),
            Some(TokenKind::LParen) => {
                let inner = self.expr()?;
                match self.bump().map(|t| t.kind) {
                    Some(TokenKind::RParen) => Ok(inner),
                    _ => Err(self.err("expected ')'")),
                }
            }
            Some(TokenKind::Minus) | Some(TokenKind::Plus) => {
                Err(self.err("unexpected sign; a value was expected"))
            }
            _ => Err(self.err("expected a number, variable, generator, or '('")),
        }
    }

    fn ident(&mut self, name: &str) -> Result<Form> {
        if let Some(rest) = name.strip_prefix("dx") {
            let lambda = self.base_index(rest)?;
            return Ok(Form::dx(self.bundle, lambda));
        }
        if let Some(rest) = name.strip_prefix("du") {
            let (field, index) = self.jet_spec(rest)?;
            return Ok(ClassicForm::dy(self.bundle, field, index).to_contact_basis());
        }
        if let Some(rest) = name.strip_prefix("th") {
            let (field, index) = self.jet_spec(rest)?;
            return Ok(Form::theta(self.bundle, field, index));
        }
        if let Some(rest) = name.strip_prefix('x') {
            let lambda = self.base_index(rest)?;
            return Ok(Form::from_scalar(ScalarExpr::base_var(self.bundle, lambda)));
        }
        if let Some(rest) = name.strip_prefix('u') {
            let (field, index) = self.jet_spec(rest)?;
            return Ok(Form::from_scalar(ScalarExpr::jet_var(
                self.bundle,
                field,
                index,
            )));
        }
        Err(self.err(format!("unknown identifier '{name}'")))
    }

    fn base_index(&self, digits: &str) -> Result<usize> {
        let lambda: usize = digits
            .parse()
            .map_err(|_| self.err("expected a base index"))?;
        if !(1..=self.bundle.base_dim()).contains(&lambda) {
            return Err(self.err(format!(
                "base index {lambda} out of range 1..={}",
                self.bundle.base_dim()
            )));
        }
        Ok(lambda)
    }

    fn jet_spec(&self, spec: &str) -> Result<(usize, MultiIndex)> {
        let (field_str, index_str) = match spec.find('_') {
            Some(pos) => (&spec[..pos], Some(&spec[pos + 1..])),
            None => (spec, None),
        };
        let field: usize = field_str
            .parse()
            .map_err(|_| self.err("expected a fibre index"))?;
        if !(1..=self.bundle.fibre_dim()).contains(&field) {
            return Err(self.err(format!(
                "fibre index {field} out of range 1..={}",
                self.bundle.fibre_dim()
            )));
        }
        let dirs: Vec<usize> = match index_str {
            None | Some("") => Vec::new(),
            Some(s) if s.starts_with('[') => {
                let inner = s
                    .strip_prefix('[')
                    .and_then(|s| s.strip_suffix(']'))
                    .ok_or_else(|| self.err("malformed bracketed multi-index"))?;
                let mut dirs = Vec::new();
                for part in inner.split(',') {
                    let d: usize = part
                        .parse()
                        .map_err(|_| self.err("malformed bracketed multi-index"))?;
                    dirs.push(d);
                }
                dirs
            }
            Some(s) => s
                .bytes()
                .map(|b| {
                    if b.is_ascii_digit() {
                        Ok((b - b'0') as usize)
                    } else {
                        Err(self.err("multi-index digits must be 1-9"))
                    }
                })
                .collect::<Result<Vec<usize>>>()?,
        };
        for pair in dirs.windows(2) {
            if pair[0] > pair[1] {
                return Err(self.err("multi-index digits must be non-decreasing"));
            }
        }
        for &d in &dirs {
            if !(1..=self.bundle.base_dim()).contains(&d) {
                return Err(self.err(format!(
                    "direction {d} out of range 1..={}",
                    self.bundle.base_dim()
                )));
            }
        }
        Ok((field, MultiIndex::new(dirs)))
    }
}

/// Parses a form per the module grammar, converting coordinate differentials
/// to the contact basis and normalizing. `parse(print(phi))` reproduces
/// `phi` exactly.
pub fn parse_form(src: &str, bundle: Bundle) -> Result<Form> {
    let tokens = Lexer::new(src).tokenize()?;
    let end = tokens
        .last()
        .map(|t| (t.line, t.col + 1))
        .unwrap_or((1, 1));
    let mut parser = Parser {
        tokens,
        pos: 0,
        bundle,
        end_line: end.0,
        end_col: end.1,
    };
    if parser.peek().is_none() {
        return Err(Error::parse(1, 1, "empty expression"));
    }
    let form = parser.expr()?;
    if parser.peek().is_some() {
        return Err(parser.err("trailing input after expression"));
    }
    Ok(form)
}

/// Parses a scalar expression: a form of bidegree (0, 0).
pub fn parse_scalar(src: &str, bundle: Bundle) -> Result<ScalarExpr> {
    let form = parse_form(src, bundle)?;
    scalar_of(&form).ok_or_else(|| {
        Error::parse(1, 1, "expected a scalar expression, found a form of positive degree")
    })
}

fn scalar_of(form: &Form) -> Option<ScalarExpr> {
    let mut out = ScalarExpr::zero(form.bundle());
    for (word, coef) in form.terms() {
        if !word.is_empty() {
            return None;
        }
        out = &out + coef;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn b() -> Bundle {
        Bundle::new(1, 1)
    }

    fn u(idx: &[usize]) -> ScalarExpr {
        ScalarExpr::jet_var(b(), 1, MultiIndex::new(idx.to_vec()))
    }

    #[test]
    fn direct_term() {
        let f = parse_form("u1_1 * dx1", b()).unwrap();
        assert_eq!(f, Form::dx(b(), 1).scalar_mul(&u(&[1])));
    }

    #[test]
    fn coordinate_differential_converts() {
        let f = parse_form("du1", b()).unwrap();
        let expected = &Form::theta(b(), 1, MultiIndex::empty())
            + &Form::dx(b(), 1).scalar_mul(&u(&[1]));
        assert_eq!(f, expected);
    }

    #[test]
    fn repeated_generator_vanishes() {
        assert!(parse_form("th1 ^ th1", b()).unwrap().is_zero());
    }

    #[test]
    fn rationals_and_powers() {
        let f = parse_scalar("1/2*u1_1**2", b()).unwrap();
        let expected = u(&[1])
            .pow(2)
            .scaled(&BigRational::new(BigInt::from(1), BigInt::from(2)));
        assert_eq!(f, expected);
    }

    #[test]
    fn precedence_wedge_looser_than_star() {
        let f = parse_form("2*u1*th1^dx1", b()).unwrap();
        let expected = Form::theta(b(), 1, MultiIndex::empty())
            .wedge(&Form::dx(b(), 1))
            .scalar_mul(&u(&[]).scaled(&BigRational::from_integer(2.into())));
        assert_eq!(f, expected);
    }

    #[test]
    fn unary_minus_and_parens() {
        let f = parse_scalar("-(u1 - x1)", b()).unwrap();
        assert_eq!(f, &ScalarExpr::base_var(b(), 1) - &u(&[]));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_form("u1_21", b()) {
            Err(Error::Parse { message, .. }) => {
                assert!(message.contains("non-decreasing"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_form("u2", b()) {
            Err(Error::Parse { message, .. }) => {
                assert!(message.contains("fibre index"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_form("u1 +", b()) {
            Err(Error::Parse { line, col, .. }) => {
                assert_eq!(line, 1);
                assert!(col >= 4);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_form("", b()).is_err());
        assert!(parse_form("dx1 ** 2", b()).is_err());
        assert!(parse_form("1/0", b()).is_err());
    }

    #[test]
    fn bracketed_indices() {
        let wide = Bundle::new(12, 1);
        let f = parse_scalar("u1_[10,12]", wide).unwrap();
        assert_eq!(
            f,
            ScalarExpr::jet_var(wide, 1, MultiIndex::new(vec![10, 12]))
        );
        assert!(parse_form("u1_[12,10]", wide).is_err());
    }

    #[test]
    fn print_parse_round_trip_samples() {
        let samples = [
            "u1_1*dx1",
            "th1 + u1_1*dx1",
            "(u1 + x1)*th1^dx1",
            "-u1_11*th1^dx1",
            "u1**2 - x1",
            "0",
        ];
        for src in samples {
            let f = parse_form(src, b()).unwrap();
            assert_eq!(parse_form(&f.to_string(), b()).unwrap(), f, "{src}");
        }
    }
}
