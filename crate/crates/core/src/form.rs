//! Exterior forms over the jet coordinates.
//!
//! Normalized forms live in the contact basis `{dx^l, th^i_L}`: the contact
//! generators `th^i_L = du^i_L - u^i_{L+l} dx^l` come first in every wedge
//! word, ordered by (field, order, directions), followed by the `dx^l` in
//! base order. With that convention the bidegree (contact degree, horizontal
//! degree) of a term is read off directly from its word.
//!
//! Coordinate differentials `du^i_L` are an input convenience only; they are
//! carried by [`ClassicForm`] and eliminated by [`ClassicForm::to_contact_basis`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num::{BigRational, One};

use crate::bundle::Bundle;
use crate::multi_index::MultiIndex;
use crate::scalar::{Monomial, ScalarExpr, Variable};

/// A basis 1-form. The derived ordering (contact generators, then coordinate
/// differentials, then base differentials) is the canonical generator order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Theta { field: usize, index: MultiIndex },
    Dy { field: usize, index: MultiIndex },
    Dx(usize),
}

impl Generator {
    pub fn theta(field: usize, index: MultiIndex) -> Generator {
        Generator::Theta { field, index }
    }

    pub fn dy(field: usize, index: MultiIndex) -> Generator {
        Generator::Dy { field, index }
    }

    pub fn is_theta(&self) -> bool {
        matches!(self, Generator::Theta { .. })
    }

    pub fn is_dx(&self) -> bool {
        matches!(self, Generator::Dx(_))
    }

    pub fn is_dy(&self) -> bool {
        matches!(self, Generator::Dy { .. })
    }

    /// Derivative order carried by the generator; 0 for `dx`.
    pub fn order(&self) -> usize {
        match self {
            Generator::Theta { index, .. } | Generator::Dy { index, .. } => index.order(),
            Generator::Dx(_) => 0,
        }
    }

    pub(crate) fn validate(&self, bundle: &Bundle) {
        match self {
            Generator::Theta { field, index } | Generator::Dy { field, index } => {
                bundle.check_fibre(*field);
                index.validate(bundle);
            }
            Generator::Dx(l) => bundle.check_base(*l),
        }
    }
}

/// Sorts a wedge word into canonical order. Returns `None` when a generator
/// repeats (the term vanishes), otherwise whether the permutation was odd.
fn sort_word(word: &mut Vec<Generator>) -> Option<bool> {
    let mut swaps = 0usize;
    for i in 1..word.len() {
        let mut j = i;
        while j > 0 && word[j] < word[j - 1] {
            word.swap(j, j - 1);
            swaps += 1;
            j -= 1;
        }
    }
    for pair in word.windows(2) {
        if pair[0] == pair[1] {
            return None;
        }
    }
    Some(swaps % 2 == 1)
}

type TermMap = BTreeMap<Vec<Generator>, ScalarExpr>;

fn map_add_term(terms: &mut TermMap, mut word: Vec<Generator>, coef: ScalarExpr) {
    if coef.is_zero() {
        return;
    }
    let Some(odd) = sort_word(&mut word) else {
        return;
    };
    let signed = if odd { -&coef } else { coef };
    match terms.get_mut(&word) {
        Some(existing) => {
            *existing = &*existing + &signed;
            if existing.is_zero() {
                terms.remove(&word);
            }
        }
        None => {
            terms.insert(word, signed);
        }
    }
}

fn map_wedge(bundle: Bundle, a: &TermMap, b: &TermMap) -> TermMap {
    let mut out = TermMap::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            let mut word = wa.clone();
            word.extend(wb.iter().cloned());
            map_add_term(&mut out, word, ca * cb);
        }
    }
    let _ = bundle;
    out
}

/// A finite sum of wedge terms in the contact basis, each a polynomial
/// coefficient times a strictly increasing generator word. Terms with equal
/// words are merged and zero coefficients dropped, so equality of values is
/// structural equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    bundle: Bundle,
    terms: TermMap,
}

impl Form {
    pub fn zero(bundle: Bundle) -> Form {
        Form {
            bundle,
            terms: TermMap::new(),
        }
    }

    pub fn from_scalar(coef: ScalarExpr) -> Form {
        let bundle = coef.bundle();
        let mut f = Form::zero(bundle);
        f.add_term(Vec::new(), coef);
        f
    }

    pub fn theta(bundle: Bundle, field: usize, index: MultiIndex) -> Form {
        let g = Generator::theta(field, index);
        g.validate(&bundle);
        let mut f = Form::zero(bundle);
        f.add_term(vec![g], ScalarExpr::one(bundle));
        f
    }

    pub fn dx(bundle: Bundle, lambda: usize) -> Form {
        bundle.check_base(lambda);
        let mut f = Form::zero(bundle);
        f.add_term(vec![Generator::Dx(lambda)], ScalarExpr::one(bundle));
        f
    }

    /// The base volume word `dx^1 ^ ... ^ dx^n`.
    pub fn volume(bundle: Bundle) -> Form {
        let word: Vec<Generator> = bundle.base_range().map(Generator::Dx).collect();
        let mut f = Form::zero(bundle);
        f.add_term(word, ScalarExpr::one(bundle));
        f
    }

    /// Builds a single-term form; the word may be unsorted.
    pub fn term(coef: ScalarExpr, word: Vec<Generator>) -> Form {
        let bundle = coef.bundle();
        for g in &word {
            g.validate(&bundle);
        }
        let mut f = Form::zero(bundle);
        f.add_term(word, coef);
        f
    }

    pub(crate) fn add_term(&mut self, word: Vec<Generator>, coef: ScalarExpr) {
        debug_assert!(word.iter().all(|g| !g.is_dy()), "Dy generator in contact form");
        self.bundle.check_same(&coef.bundle());
        map_add_term(&mut self.terms, word, coef);
    }

    pub fn bundle(&self) -> Bundle {
        self.bundle
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Generator>, &ScalarExpr)> {
        self.terms.iter()
    }

    pub fn wedge(&self, other: &Form) -> Form {
        self.bundle.check_same(&other.bundle);
        Form {
            bundle: self.bundle,
            terms: map_wedge(self.bundle, &self.terms, &other.terms),
        }
    }

    pub fn scalar_mul(&self, s: &ScalarExpr) -> Form {
        self.bundle.check_same(&s.bundle());
        let mut out = Form::zero(self.bundle);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * s);
        }
        out
    }

    pub fn scaled(&self, q: &BigRational) -> Form {
        let mut out = Form::zero(self.bundle);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.scaled(q));
        }
        out
    }

    /// Bidegree (contact, horizontal) of one canonical word.
    pub fn word_bidegree(word: &[Generator]) -> (usize, usize) {
        let k = word.iter().filter(|g| g.is_theta()).count();
        (k, word.len() - k)
    }

    /// The unique decomposition into nonzero components of pure bidegree,
    /// sorted by (contact, horizontal) degree. Summing the components
    /// reproduces the form.
    pub fn split_bidegree(&self) -> Vec<(usize, usize, Form)> {
        let mut parts: BTreeMap<(usize, usize), Form> = BTreeMap::new();
        for (w, c) in &self.terms {
            let bd = Form::word_bidegree(w);
            parts
                .entry(bd)
                .or_insert_with(|| Form::zero(self.bundle))
                .add_term(w.clone(), c.clone());
        }
        parts.into_iter().map(|((k, s), f)| (k, s, f)).collect()
    }

    /// The k-contact projection `h_k`: the terms with exactly `k` contact
    /// generators. `h_0` is the horizontal projection.
    pub fn contact_projection(&self, k: usize) -> Form {
        let mut out = Form::zero(self.bundle);
        for (w, c) in &self.terms {
            if Form::word_bidegree(w).0 == k {
                out.add_term(w.clone(), c.clone());
            }
        }
        out
    }

    pub fn horizontal_projection(&self) -> Form {
        self.contact_projection(0)
    }

    /// `Some((k, s))` when every term has the same bidegree; `None` for the
    /// zero form or a mixed one.
    pub fn homogeneous_bidegree(&self) -> Option<(usize, usize)> {
        let mut it = self.terms.keys();
        let first = Form::word_bidegree(it.next()?);
        for w in it {
            if Form::word_bidegree(w) != first {
                return None;
            }
        }
        Some(first)
    }

    /// Pull-back through the zero section: substitutes `u^i_L -> 0` in the
    /// coefficients and drops every contact term, leaving a form in `x`, `dx`
    /// alone.
    pub fn zero_section_pullback(&self) -> Form {
        let mut out = Form::zero(self.bundle);
        for (w, c) in &self.terms {
            if w.iter().any(Generator::is_theta) {
                continue;
            }
            out.add_term(w.clone(), c.zero_section());
        }
        out
    }

    /// Interior product with the fibre Euler field `u^i_L d/du^i_L`: each
    /// contact generator contracts to its jet variable, base differentials
    /// contract to zero, with the graded Leibniz sign over the canonical
    /// word order. Lowers contact degree by one.
    pub fn euler_contraction(&self) -> Form {
        let mut out = Form::zero(self.bundle);
        for (w, c) in &self.terms {
            self.contract_term_into(&mut out, w, c, None);
        }
        out
    }

    /// Interior product with the vector dual to one contact generator
    /// `th^i_Lambda`: selects that slot with its sign and removes it.
    pub fn theta_contraction(&self, field: usize, index: &MultiIndex) -> Form {
        let target = Generator::theta(field, index.clone());
        let mut out = Form::zero(self.bundle);
        for (w, c) in &self.terms {
            for (j, g) in w.iter().enumerate() {
                if !g.is_theta() {
                    break;
                }
                if *g == target {
                    let mut word = w.clone();
                    word.remove(j);
                    let coef = if j % 2 == 1 { -c } else { c.clone() };
                    out.add_term(word, coef);
                    break;
                }
            }
        }
        out
    }

    fn contract_term_into(
        &self,
        out: &mut Form,
        word: &[Generator],
        coef: &ScalarExpr,
        single_mono: Option<(&Monomial, &BigRational)>,
    ) {
        for (j, g) in word.iter().enumerate() {
            let Generator::Theta { field, index } = g else {
                break;
            };
            let jet = ScalarExpr::jet_var(self.bundle, *field, index.clone());
            let mut reduced = word.to_vec();
            reduced.remove(j);
            let base = match single_mono {
                Some((m, q)) => ScalarExpr::monomial(self.bundle, m.clone(), q.clone()),
                None => coef.clone(),
            };
            let contracted = &base * &jet;
            let signed = if j % 2 == 1 { -&contracted } else { contracted };
            out.add_term(reduced, signed);
        }
    }

    /// Highest derivative order carried by coefficients or contact
    /// generators; 0 for the zero form.
    pub fn jet_order(&self) -> usize {
        self.terms
            .iter()
            .map(|(w, c)| {
                w.iter()
                    .map(Generator::order)
                    .max()
                    .unwrap_or(0)
                    .max(c.jet_order())
            })
            .max()
            .unwrap_or(0)
    }

    /// Maximum coefficient degree; 0 for the zero form.
    pub fn degree(&self) -> u32 {
        self.terms.values().map(ScalarExpr::degree).max().unwrap_or(0)
    }
}

impl Add for &Form {
    type Output = Form;
    fn add(self, other: &Form) -> Form {
        self.bundle.check_same(&other.bundle);
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, other: &Form) -> Form {
        self.bundle.check_same(&other.bundle);
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        let mut out = Form::zero(self.bundle);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::print::form_to_string(self.bundle, self.terms()))
    }
}

/// A form written with the coordinate differentials `dx^l`, `du^i_L` of the
/// jet coordinates, with no contact structure. This is the basis in which
/// the classical exterior differential acts coordinate by coordinate; it is
/// an input representation only and converts into the contact basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicForm {
    bundle: Bundle,
    terms: TermMap,
}

impl ClassicForm {
    pub fn zero(bundle: Bundle) -> ClassicForm {
        ClassicForm {
            bundle,
            terms: TermMap::new(),
        }
    }

    pub fn from_scalar(coef: ScalarExpr) -> ClassicForm {
        let bundle = coef.bundle();
        let mut f = ClassicForm::zero(bundle);
        f.add_term(Vec::new(), coef);
        f
    }

    pub fn dx(bundle: Bundle, lambda: usize) -> ClassicForm {
        bundle.check_base(lambda);
        let mut f = ClassicForm::zero(bundle);
        f.add_term(vec![Generator::Dx(lambda)], ScalarExpr::one(bundle));
        f
    }

    pub fn dy(bundle: Bundle, field: usize, index: MultiIndex) -> ClassicForm {
        let g = Generator::dy(field, index);
        g.validate(&bundle);
        let mut f = ClassicForm::zero(bundle);
        f.add_term(vec![g], ScalarExpr::one(bundle));
        f
    }

    pub fn term(coef: ScalarExpr, word: Vec<Generator>) -> ClassicForm {
        let bundle = coef.bundle();
        for g in &word {
            g.validate(&bundle);
        }
        let mut f = ClassicForm::zero(bundle);
        f.add_term(word, coef);
        f
    }

    pub(crate) fn add_term(&mut self, word: Vec<Generator>, coef: ScalarExpr) {
        debug_assert!(word.iter().all(|g| !g.is_theta()), "contact generator in classic form");
        self.bundle.check_same(&coef.bundle());
        map_add_term(&mut self.terms, word, coef);
    }

    pub fn bundle(&self) -> Bundle {
        self.bundle
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Generator>, &ScalarExpr)> {
        self.terms.iter()
    }

    pub fn wedge(&self, other: &ClassicForm) -> ClassicForm {
        self.bundle.check_same(&other.bundle);
        ClassicForm {
            bundle: self.bundle,
            terms: map_wedge(self.bundle, &self.terms, &other.terms),
        }
    }

    pub fn scalar_mul(&self, s: &ScalarExpr) -> ClassicForm {
        self.bundle.check_same(&s.bundle());
        let mut out = ClassicForm::zero(self.bundle);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * s);
        }
        out
    }

    /// Substitutes `du^i_L -> th^i_L + u^i_{L+l} dx^l` multilinearly and
    /// normalizes. This is an algebra map: it commutes with wedge products.
    pub fn to_contact_basis(&self) -> Form {
        let bundle = self.bundle;
        let mut out = Form::zero(bundle);
        for (word, coef) in &self.terms {
            let mut acc = Form::from_scalar(coef.clone());
            for g in word {
                let factor = match g {
                    Generator::Dx(l) => Form::dx(bundle, *l),
                    Generator::Dy { field, index } => {
                        let mut f = Form::theta(bundle, *field, index.clone());
                        for l in bundle.base_range() {
                            let jet = ScalarExpr::jet_var(bundle, *field, index.plus(l));
                            f = &f + &Form::dx(bundle, l).scalar_mul(&jet);
                        }
                        f
                    }
                    Generator::Theta { .. } => unreachable!("classic form has no contact generators"),
                };
                acc = acc.wedge(&factor);
            }
            out = &out + &acc;
        }
        out
    }
}

impl Add for &ClassicForm {
    type Output = ClassicForm;
    fn add(self, other: &ClassicForm) -> ClassicForm {
        self.bundle.check_same(&other.bundle);
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl fmt::Display for ClassicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::print::form_to_string(self.bundle, self.terms()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Bundle {
        Bundle::new(1, 1)
    }

    fn th(idx: &[usize]) -> Form {
        Form::theta(b(), 1, MultiIndex::new(idx.to_vec()))
    }

    fn u(idx: &[usize]) -> ScalarExpr {
        ScalarExpr::jet_var(b(), 1, MultiIndex::new(idx.to_vec()))
    }

    #[test]
    fn wedge_annihilates_repeats() {
        let dx = Form::dx(b(), 1);
        assert!(dx.wedge(&dx).is_zero());
        let t = th(&[]);
        assert!(t.wedge(&t).is_zero());
    }

    #[test]
    fn wedge_reorders_with_sign() {
        // dx ^ th = -(th ^ dx)
        let dx = Form::dx(b(), 1);
        let t = th(&[]);
        assert_eq!(dx.wedge(&t), -&t.wedge(&dx));
        // scalar passes through
        let ut = t.scalar_mul(&u(&[]));
        assert_eq!(ut.wedge(&dx), t.wedge(&dx).scalar_mul(&u(&[])));
    }

    #[test]
    fn convert_dy_examples() {
        // du = th + u1 dx
        let du = ClassicForm::dy(b(), 1, MultiIndex::empty()).to_contact_basis();
        let expected = &th(&[]) + &Form::dx(b(), 1).scalar_mul(&u(&[1]));
        assert_eq!(du, expected);
        // du1 ^ dx = th1 ^ dx: the dx ^ dx part cancels
        let du1_dx = ClassicForm::dy(b(), 1, MultiIndex::single(1))
            .wedge(&ClassicForm::dx(b(), 1))
            .to_contact_basis();
        assert_eq!(du1_dx, th(&[1]).wedge(&Form::dx(b(), 1)));
        // dx converts to itself
        let dx = ClassicForm::dx(b(), 1).to_contact_basis();
        assert_eq!(dx, Form::dx(b(), 1));
    }

    #[test]
    fn split_and_projections() {
        let dx = Form::dx(b(), 1);
        let phi = &th(&[]).wedge(&dx) + &dx.scalar_mul(&u(&[]));
        let parts = phi.split_bidegree();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].0, 0);
        assert_eq!(parts[0].1, 1);
        assert_eq!(parts[0].2, dx.scalar_mul(&u(&[])));
        assert_eq!(parts[1].0, 1);
        assert_eq!(parts[1].2, th(&[]).wedge(&dx));
        // components recombine
        let mut sum = Form::zero(b());
        for (_, _, p) in &parts {
            sum = &sum + p;
        }
        assert_eq!(sum, phi);
        assert!(Form::zero(b()).split_bidegree().is_empty());
        // selection
        assert_eq!(phi.contact_projection(1), th(&[]).wedge(&dx));
        assert!(dx.scalar_mul(&u(&[])).contact_projection(2).is_zero());
    }

    #[test]
    fn h0_of_du() {
        let du = ClassicForm::dy(b(), 1, MultiIndex::empty()).to_contact_basis();
        assert_eq!(du.horizontal_projection(), Form::dx(b(), 1).scalar_mul(&u(&[1])));
    }

    #[test]
    fn zero_section_pullback_examples() {
        let x = ScalarExpr::base_var(b(), 1);
        let dx = Form::dx(b(), 1);
        let phi = &dx.scalar_mul(&x.pow(2)) + &dx.scalar_mul(&u(&[]));
        assert_eq!(phi.zero_section_pullback(), dx.scalar_mul(&x.pow(2)));
        assert!(th(&[]).wedge(&dx).zero_section_pullback().is_zero());
        let scalar = Form::from_scalar(&u(&[]) + &x);
        assert_eq!(scalar.zero_section_pullback(), Form::from_scalar(x));
    }

    #[test]
    fn euler_contraction_examples() {
        // y _| (u th) = u^2
        let f = th(&[]).scalar_mul(&u(&[]));
        assert_eq!(f.euler_contraction(), Form::from_scalar(u(&[]).pow(2)));
        // y _| (th ^ th1) = u th1 - u1 th, the graded Leibniz signs
        let f = th(&[]).wedge(&th(&[1]));
        let expected = &th(&[1]).scalar_mul(&u(&[])) - &th(&[]).scalar_mul(&u(&[1]));
        assert_eq!(f.euler_contraction(), expected);
        // purely horizontal terms contract to zero
        let f = Form::dx(b(), 1).scalar_mul(&u(&[]).pow(2));
        assert!(f.euler_contraction().is_zero());
    }

    #[test]
    fn theta_contraction_signs() {
        let f = th(&[]).wedge(&th(&[1]));
        assert_eq!(f.theta_contraction(1, &MultiIndex::empty()), th(&[1]));
        assert_eq!(f.theta_contraction(1, &MultiIndex::single(1)), -&th(&[]));
        assert!(f.theta_contraction(1, &MultiIndex::new(vec![1, 1])).is_zero());
    }

    #[test]
    fn volume_word() {
        let b2 = Bundle::new(2, 1);
        let vol = Form::volume(b2);
        assert_eq!(vol, Form::dx(b2, 1).wedge(&Form::dx(b2, 2)));
    }

    #[test]
    fn jet_order_counts_generators() {
        let f = th(&[1, 1]).scalar_mul(&u(&[]));
        assert_eq!(f.jet_order(), 2);
        assert_eq!(Form::dx(b(), 1).jet_order(), 0);
    }
}
