//! Canonical text rendering.
//!
//! Terms print in generator-word order and coefficients in descending
//! monomial order, so equal values always render to identical bytes. The
//! output grammar is the one accepted by [`crate::parse::parse_form`].

use num::{BigRational, One, Signed};

use crate::bundle::Bundle;
use crate::form::Generator;
use crate::multi_index::MultiIndex;
use crate::scalar::{Monomial, ScalarExpr, Variable};

/// `_112` for small bundles, `_[10,12]` once directions need two digits.
pub(crate) fn multi_index_suffix(index: &MultiIndex, base_dim: usize) -> String {
    if index.is_empty() {
        return String::new();
    }
    if base_dim <= 9 {
        let digits: String = index.iter().map(|d| d.to_string()).collect();
        format!("_{digits}")
    } else {
        let entries: Vec<String> = index.iter().map(|d| d.to_string()).collect();
        format!("_[{}]", entries.join(","))
    }
}

pub fn variable_name(v: &Variable, base_dim: usize) -> String {
    match v {
        Variable::Base(l) => format!("x{l}"),
        Variable::Jet { field, index } => {
            format!("u{field}{}", multi_index_suffix(index, base_dim))
        }
    }
}

pub fn generator_name(g: &Generator, base_dim: usize) -> String {
    match g {
        Generator::Dx(l) => format!("dx{l}"),
        Generator::Theta { field, index } => {
            format!("th{field}{}", multi_index_suffix(index, base_dim))
        }
        Generator::Dy { field, index } => {
            format!("du{field}{}", multi_index_suffix(index, base_dim))
        }
    }
}

fn monomial_body(m: &Monomial, base_dim: usize) -> String {
    let factors: Vec<String> = m
        .powers()
        .iter()
        .map(|(v, e)| {
            let name = variable_name(v, base_dim);
            if *e == 1 {
                name
            } else {
                format!("{name}**{e}")
            }
        })
        .collect();
    factors.join("*")
}

fn rational_abs(q: &BigRational) -> String {
    q.abs().to_string()
}

/// The unsigned rendering of one monomial with its coefficient magnitude.
fn unsigned_term(coef: &BigRational, m: &Monomial, base_dim: usize) -> String {
    if m.is_one() {
        rational_abs(coef)
    } else if coef.abs().is_one() {
        monomial_body(m, base_dim)
    } else {
        format!("{}*{}", rational_abs(coef), monomial_body(m, base_dim))
    }
}

/// Renders a polynomial, monomials in descending canonical order, with the
/// leading sign inline and later signs folded into the separators.
pub fn scalar_to_string(s: &ScalarExpr) -> String {
    if s.is_zero() {
        return "0".to_string();
    }
    let n = s.bundle().base_dim();
    let mut out = String::new();
    for (i, (m, c)) in s.terms().rev().enumerate() {
        let body = unsigned_term(c, m, n);
        if i == 0 {
            if c.is_negative() {
                out.push('-');
            }
            out.push_str(&body);
        } else if c.is_negative() {
            out.push_str(" - ");
            out.push_str(&body);
        } else {
            out.push_str(" + ");
            out.push_str(&body);
        }
    }
    out
}

fn word_body(word: &[Generator], base_dim: usize) -> String {
    let names: Vec<String> = word.iter().map(|g| generator_name(g, base_dim)).collect();
    names.join("^")
}

/// One form term as (is_negative, unsigned rendering). Multi-monomial
/// coefficients are parenthesized; the all-scalar term (empty word) prints
/// its polynomial bare, which is safe because it always sorts first.
fn term_rendering(word: &[Generator], coef: &ScalarExpr, base_dim: usize) -> (bool, String) {
    if word.is_empty() {
        return (false, scalar_to_string(coef));
    }
    let word_str = word_body(word, base_dim);
    if coef.term_count() == 1 {
        let (m, c) = coef.terms().next().expect("single term");
        let neg = c.is_negative();
        if m.is_one() && c.abs().is_one() {
            (neg, word_str)
        } else {
            (neg, format!("{}*{}", unsigned_term(c, m, base_dim), word_str))
        }
    } else {
        (false, format!("({})*{}", scalar_to_string(coef), word_str))
    }
}

/// Renders any term map (contact or classic basis) in canonical order.
pub fn form_to_string<'a, I>(bundle: Bundle, terms: I) -> String
where
    I: Iterator<Item = (&'a Vec<Generator>, &'a ScalarExpr)>,
{
    let n = bundle.base_dim();
    let mut out = String::new();
    let mut empty = true;
    for (i, (word, coef)) in terms.enumerate() {
        empty = false;
        let (neg, body) = term_rendering(word, coef, n);
        if i == 0 {
            if neg {
                out.push('-');
            }
            out.push_str(&body);
        } else if neg {
            out.push_str(" - ");
            out.push_str(&body);
        } else {
            out.push_str(" + ");
            out.push_str(&body);
        }
    }
    if empty {
        "0".to_string()
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use crate::bundle::Bundle;
    use crate::form::Form;
    use crate::multi_index::MultiIndex;
    use crate::scalar::ScalarExpr;

    fn b() -> Bundle {
        Bundle::new(1, 1)
    }

    #[test]
    fn canonical_rendering() {
        let u1 = ScalarExpr::jet_var(b(), 1, MultiIndex::single(1));
        let f = Form::dx(b(), 1).scalar_mul(&u1);
        assert_eq!(f.to_string(), "u1_1*dx1");
        assert_eq!(Form::zero(b()).to_string(), "0");
    }

    #[test]
    fn sign_folding() {
        let u = ScalarExpr::jet_var(b(), 1, MultiIndex::empty());
        let x = ScalarExpr::base_var(b(), 1);
        let s = &(-&u) - &x;
        assert_eq!(s.to_string(), "-u1 - x1");
        let t = &u.pow(2) - &x;
        assert_eq!(t.to_string(), "u1**2 - x1");
    }

    #[test]
    fn parenthesized_coefficient() {
        let u = ScalarExpr::jet_var(b(), 1, MultiIndex::empty());
        let x = ScalarExpr::base_var(b(), 1);
        let f = Form::dx(b(), 1).scalar_mul(&(&u + &x));
        assert_eq!(f.to_string(), "(u1 + x1)*dx1");
    }

    #[test]
    fn scalar_term_sorts_first() {
        let u = ScalarExpr::jet_var(b(), 1, MultiIndex::empty());
        let u1 = ScalarExpr::jet_var(b(), 1, MultiIndex::single(1));
        let theta = Form::theta(b(), 1, MultiIndex::empty());
        let f = &(&Form::from_scalar(u) + &theta) + &Form::dx(b(), 1).scalar_mul(&u1);
        assert_eq!(f.to_string(), "u1 + th1 + u1_1*dx1");
    }

    #[test]
    fn bracketed_indices_on_wide_bundles() {
        let wide = Bundle::new(10, 1);
        let v = ScalarExpr::jet_var(wide, 1, MultiIndex::new(vec![10, 2]));
        assert_eq!(v.to_string(), "u1_[2,10]");
    }
}
