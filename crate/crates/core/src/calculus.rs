//! The differentials of the bidegree-graded complex.
//!
//! `d_h` raises horizontal degree, `d_v` raises contact degree, and their sum
//! agrees with the classical exterior differential after conversion to the
//! contact basis. Both are nilpotent and anticommute; those identities are
//! exercised by the property suites rather than assumed anywhere.

use crate::form::{ClassicForm, Form, Generator};
use crate::multi_index::MultiIndex;

/// The total derivative `d_lambda` extended to forms as an even derivation:
/// coefficients are totally differentiated, `th^i_L` maps to `th^i_{L+l}`,
/// and `dx` is constant.
pub fn form_total_derivative(phi: &Form, lambda: usize) -> Form {
    phi.bundle().check_base(lambda);
    let mut out = Form::zero(phi.bundle());
    for (word, coef) in phi.terms() {
        out.add_term(word.clone(), coef.total_derivative(lambda));
        for (j, g) in word.iter().enumerate() {
            let Generator::Theta { field, index } = g else {
                continue;
            };
            let mut raised = word.clone();
            raised[j] = Generator::theta(*field, index.plus(lambda));
            out.add_term(raised, coef.clone());
        }
    }
    out
}

/// Iterated total derivative on forms; order of iteration is immaterial.
pub fn form_total_derivative_multi(phi: &Form, index: &MultiIndex) -> Form {
    let mut out = phi.clone();
    for lambda in index.iter() {
        out = form_total_derivative(&out, lambda);
    }
    out
}

/// Horizontal differential `d_H(phi) = dx^l ^ d_l(phi)`. Raises horizontal
/// degree by one, preserves contact degree, and vanishes on horizontal
/// degree `n`.
pub fn d_h(phi: &Form) -> Form {
    let bundle = phi.bundle();
    let mut out = Form::zero(bundle);
    for lambda in bundle.base_range() {
        let derived = form_total_derivative(phi, lambda);
        for (word, coef) in derived.terms() {
            let mut w = Vec::with_capacity(word.len() + 1);
            w.push(Generator::Dx(lambda));
            w.extend(word.iter().cloned());
            out.add_term(w, coef.clone());
        }
    }
    out
}

/// Vertical differential `d_V(phi) = th^i_L ^ d(phi)/du^i_L`, summed over the
/// jet variables actually occurring in the coefficients. The generators are
/// vertical constants.
pub fn d_v(phi: &Form) -> Form {
    let bundle = phi.bundle();
    let mut out = Form::zero(bundle);
    for (word, coef) in phi.terms() {
        for (field, index) in coef.jet_vars() {
            let pd = coef.partial_jet(field, &index);
            let mut w = Vec::with_capacity(word.len() + 1);
            w.push(Generator::theta(field, index));
            w.extend(word.iter().cloned());
            out.add_term(w, pd);
        }
    }
    out
}

/// The full differential `d = d_H + d_V` on contact-basis forms.
pub fn d_full(phi: &Form) -> Form {
    &d_h(phi) + &d_v(phi)
}

/// Classical exterior differential in the coordinate basis: every jet
/// coordinate is treated as independent, `d(dx) = d(du) = 0`.
pub fn d_classic(phi: &ClassicForm) -> ClassicForm {
    let bundle = phi.bundle();
    let mut out = ClassicForm::zero(bundle);
    for (word, coef) in phi.terms() {
        for lambda in bundle.base_range() {
            let pd = coef.partial_base(lambda);
            if pd.is_zero() {
                continue;
            }
            let mut w = Vec::with_capacity(word.len() + 1);
            w.push(Generator::Dx(lambda));
            w.extend(word.iter().cloned());
            out.add_term(w, pd);
        }
        for (field, index) in coef.jet_vars() {
            let pd = coef.partial_jet(field, &index);
            let mut w = Vec::with_capacity(word.len() + 1);
            w.push(Generator::dy(field, index));
            w.extend(word.iter().cloned());
            out.add_term(w, pd);
        }
    }
    out
}

/// Which differential a closedness test refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Differential {
    Horizontal,
    Vertical,
    Full,
}

pub fn apply(phi: &Form, which: Differential) -> Form {
    match which {
        Differential::Horizontal => d_h(phi),
        Differential::Vertical => d_v(phi),
        Differential::Full => d_full(phi),
    }
}

/// Exact kernel test for the chosen differential.
pub fn is_closed(phi: &Form, which: Differential) -> bool {
    apply(phi, which).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Bundle;
    use crate::scalar::ScalarExpr;

    fn b() -> Bundle {
        Bundle::new(1, 1)
    }

    fn u(idx: &[usize]) -> ScalarExpr {
        ScalarExpr::jet_var(b(), 1, MultiIndex::new(idx.to_vec()))
    }

    fn th(idx: &[usize]) -> Form {
        Form::theta(b(), 1, MultiIndex::new(idx.to_vec()))
    }

    #[test]
    fn d_h_examples() {
        // d_H u = u1 dx
        let f = Form::from_scalar(u(&[]));
        assert_eq!(d_h(&f), Form::dx(b(), 1).scalar_mul(&u(&[1])));
        // d_H th = dx ^ th1 = -th1 ^ dx
        assert_eq!(d_h(&th(&[])), -&th(&[1]).wedge(&Form::dx(b(), 1)));
        // top horizontal degree
        assert!(d_h(&Form::dx(b(), 1).scalar_mul(&u(&[]))).is_zero());
    }

    #[test]
    fn d_v_examples() {
        // d_V u^2 = 2u th
        let f = Form::from_scalar(u(&[]).pow(2));
        assert_eq!(d_v(&f), th(&[]).scalar_mul(&u(&[]).scaled(&num::BigRational::from_integer(2.into()))));
        // d_V (u1 dx) = th1 ^ dx
        let f = Form::dx(b(), 1).scalar_mul(&u(&[1]));
        assert_eq!(d_v(&f), th(&[1]).wedge(&Form::dx(b(), 1)));
        // generators are vertical constants
        assert!(d_v(&th(&[])).is_zero());
    }

    #[test]
    fn d_full_examples() {
        // d u = th + u1 dx, the converted coordinate differential
        let f = Form::from_scalar(u(&[]));
        let expected = ClassicForm::dy(b(), 1, MultiIndex::empty()).to_contact_basis();
        assert_eq!(d_full(&f), expected);
        // d (x dx) = 0
        let x = ScalarExpr::base_var(b(), 1);
        assert!(d_full(&Form::dx(b(), 1).scalar_mul(&x)).is_zero());
        // d th = -th1 ^ dx
        assert_eq!(d_full(&th(&[])), -&th(&[1]).wedge(&Form::dx(b(), 1)));
    }

    #[test]
    fn d_classic_examples() {
        // d u = du
        let f = ClassicForm::from_scalar(u(&[]));
        assert_eq!(d_classic(&f), ClassicForm::dy(b(), 1, MultiIndex::empty()));
        // d (u1 dx) = du1 ^ dx
        let f = ClassicForm::dx(b(), 1).scalar_mul(&u(&[1]));
        let expected = ClassicForm::dy(b(), 1, MultiIndex::single(1)).wedge(&ClassicForm::dx(b(), 1));
        assert_eq!(d_classic(&f), expected);
        // d du = 0
        assert!(d_classic(&ClassicForm::dy(b(), 1, MultiIndex::empty())).is_zero());
    }

    #[test]
    fn closedness_predicates() {
        assert!(is_closed(&Form::dx(b(), 1).scalar_mul(&u(&[1])), Differential::Horizontal));
        assert!(!is_closed(&Form::from_scalar(u(&[])), Differential::Vertical));
        // n = 2: d_H (x1 dx1) = dx1 ^ dx1 = 0
        let b2 = Bundle::new(2, 1);
        let x1 = ScalarExpr::base_var(b2, 1);
        assert!(is_closed(&Form::dx(b2, 1).scalar_mul(&x1), Differential::Horizontal));
    }

    #[test]
    fn constant_lemma_on_scalars() {
        let c = Form::from_scalar(ScalarExpr::from_int(b(), 5));
        assert!(is_closed(&c, Differential::Horizontal));
        let f = Form::from_scalar(u(&[]));
        assert!(!is_closed(&f, Differential::Horizontal));
        let g = Form::from_scalar(ScalarExpr::base_var(b(), 1));
        assert!(!is_closed(&g, Differential::Horizontal));
    }

    #[test]
    fn bidegree_bookkeeping() {
        let phi = th(&[]).scalar_mul(&u(&[1]));
        let dh = d_h(&phi);
        assert_eq!(dh.homogeneous_bidegree(), Some((1, 1)));
        let dv = d_v(&phi);
        assert_eq!(dv.homogeneous_bidegree(), Some((2, 0)));
    }
}
