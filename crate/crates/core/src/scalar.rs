//! Exact multivariate polynomials over base coordinates `x^l` and jet
//! variables `u^i_L`, with rational coefficients.
//!
//! Jet variables are independent coordinates created on demand; no maximum
//! derivative order is fixed. The representation is a sparse map from
//! canonical monomials to reduced rationals, so structural equality is
//! polynomial equality and the zero test is exact.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::bundle::Bundle;
use crate::multi_index::MultiIndex;

/// A coordinate on the infinite jet space: a base coordinate `x^lambda` or a
/// jet coordinate `u^i_Lambda` (the empty index denotes the field itself).
///
/// The derived ordering — base variables by index first, then jet variables
/// by (field, order, directions) — is the canonical variable order used for
/// monomial storage and printing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variable {
    Base(usize),
    Jet { field: usize, index: MultiIndex },
}

impl Variable {
    pub fn jet(field: usize, index: MultiIndex) -> Variable {
        Variable::Jet { field, index }
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Variable::Jet { .. })
    }

    /// Derivative order: 0 for base variables, `|Lambda|` for jets.
    pub fn order(&self) -> usize {
        match self {
            Variable::Base(_) => 0,
            Variable::Jet { index, .. } => index.order(),
        }
    }

    pub(crate) fn validate(&self, bundle: &Bundle) {
        match self {
            Variable::Base(l) => bundle.check_base(*l),
            Variable::Jet { field, index } => {
                bundle.check_fibre(*field);
                index.validate(bundle);
            }
        }
    }
}

/// A power product of variables with positive exponents, kept sorted in the
/// canonical variable order. Monomials order by total degree first, then by
/// the exponent vector, which makes printing and map iteration deterministic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Variable, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(v: Variable) -> Monomial {
        Monomial(vec![(v, 1)])
    }

    pub fn from_powers(mut powers: Vec<(Variable, u32)>) -> Monomial {
        powers.retain(|(_, e)| *e > 0);
        powers.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Variable, u32)> = Vec::with_capacity(powers.len());
        for (v, e) in powers {
            match merged.last_mut() {
                Some((lv, le)) if *lv == v => *le += e,
                _ => merged.push((v, e)),
            }
        }
        Monomial(merged)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn powers(&self) -> &[(Variable, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    /// Total degree in jet variables only; base factors do not count.
    pub fn fibre_degree(&self) -> u32 {
        self.0
            .iter()
            .filter(|(v, _)| v.is_jet())
            .map(|(_, e)| e)
            .sum()
    }

    /// Highest derivative order among the jet factors; 0 if there are none.
    pub fn jet_order(&self) -> usize {
        self.0.iter().map(|(v, _)| v.order()).max().unwrap_or(0)
    }

    pub fn exponent_of(&self, v: &Variable) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| w == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut powers = self.0.clone();
        powers.extend(other.0.iter().cloned());
        Monomial::from_powers(powers)
    }

    pub fn times_var(&self, v: Variable) -> Monomial {
        self.mul(&Monomial::var(v))
    }

    /// Lowers the exponent of `v` by one; `None` if `v` does not occur.
    pub fn divided_by_var(&self, v: &Variable) -> Option<Monomial> {
        let pos = self.0.iter().position(|(w, _)| w == v)?;
        let mut powers = self.0.clone();
        if powers[pos].1 == 1 {
            powers.remove(pos);
        } else {
            powers[pos].1 -= 1;
        }
        Some(Monomial(powers))
    }

    /// Swaps one factor `from` for one factor `to`.
    pub fn replaced_one(&self, from: &Variable, to: Variable) -> Option<Monomial> {
        Some(self.divided_by_var(from)?.times_var(to))
    }

    pub(crate) fn validate(&self, bundle: &Bundle) {
        for (v, e) in &self.0 {
            assert!(*e > 0, "zero exponent stored in monomial");
            v.validate(bundle);
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An exact polynomial in the bundle's coordinates. No zero coefficients are
/// stored and rationals are kept reduced, so two expressions are equal as
/// polynomials exactly when they are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarExpr {
    bundle: Bundle,
    terms: BTreeMap<Monomial, BigRational>,
}

impl ScalarExpr {
    pub fn zero(bundle: Bundle) -> ScalarExpr {
        ScalarExpr {
            bundle,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(bundle: Bundle, c: BigRational) -> ScalarExpr {
        let mut e = ScalarExpr::zero(bundle);
        e.add_term(Monomial::one(), c);
        e
    }

    pub fn one(bundle: Bundle) -> ScalarExpr {
        ScalarExpr::constant(bundle, BigRational::one())
    }

    pub fn from_int(bundle: Bundle, v: i64) -> ScalarExpr {
        ScalarExpr::constant(bundle, BigRational::from_integer(BigInt::from(v)))
    }

    pub fn base_var(bundle: Bundle, lambda: usize) -> ScalarExpr {
        bundle.check_base(lambda);
        ScalarExpr::monomial(bundle, Monomial::var(Variable::Base(lambda)), BigRational::one())
    }

    pub fn jet_var(bundle: Bundle, field: usize, index: MultiIndex) -> ScalarExpr {
        let v = Variable::jet(field, index);
        v.validate(&bundle);
        ScalarExpr::monomial(bundle, Monomial::var(v), BigRational::one())
    }

    pub fn monomial(bundle: Bundle, m: Monomial, c: BigRational) -> ScalarExpr {
        m.validate(&bundle);
        let mut e = ScalarExpr::zero(bundle);
        e.add_term(m, c);
        e
    }

    pub fn bundle(&self) -> Bundle {
        self.bundle
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the zero polynomial and for nonzero rational constants.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing = &*existing + &c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scaled(&self, q: &BigRational) -> ScalarExpr {
        if q.is_zero() {
            return ScalarExpr::zero(self.bundle);
        }
        ScalarExpr {
            bundle: self.bundle,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> ScalarExpr {
        let mut acc = ScalarExpr::one(self.bundle);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to a single variable.
    pub fn partial_var(&self, v: &Variable) -> ScalarExpr {
        let mut out = ScalarExpr::zero(self.bundle);
        for (m, c) in &self.terms {
            let e = m.exponent_of(v);
            if e == 0 {
                continue;
            }
            let lowered = m.divided_by_var(v).expect("exponent checked above");
            out.add_term(lowered, c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Partial derivative treating every jet variable as a constant.
    pub fn partial_base(&self, lambda: usize) -> ScalarExpr {
        self.bundle.check_base(lambda);
        self.partial_var(&Variable::Base(lambda))
    }

    /// Partial derivative with respect to the jet coordinate `u^i_Lambda`.
    pub fn partial_jet(&self, field: usize, index: &MultiIndex) -> ScalarExpr {
        self.bundle.check_fibre(field);
        index.validate(&self.bundle);
        self.partial_var(&Variable::jet(field, index.clone()))
    }

    /// The jet variables occurring in this expression.
    pub fn jet_vars(&self) -> BTreeSet<(usize, MultiIndex)> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (v, _) in m.powers() {
                if let Variable::Jet { field, index } = v {
                    out.insert((*field, index.clone()));
                }
            }
        }
        out
    }

    /// Total derivative along the base direction `lambda`: the base partial
    /// plus, for every jet variable occurring, the chain-rule term through
    /// the next derivative order.
    pub fn total_derivative(&self, lambda: usize) -> ScalarExpr {
        self.bundle.check_base(lambda);
        let mut out = self.partial_base(lambda);
        for (field, index) in self.jet_vars() {
            let raised = ScalarExpr::jet_var(self.bundle, field, index.plus(lambda));
            let pd = self.partial_jet(field, &index);
            out = &out + &(&raised * &pd);
        }
        out
    }

    /// Iterated total derivative; the result does not depend on the order of
    /// iteration because total derivatives commute.
    pub fn total_derivative_multi(&self, index: &MultiIndex) -> ScalarExpr {
        let mut out = self.clone();
        for lambda in index.iter() {
            out = out.total_derivative(lambda);
        }
        out
    }

    /// Maximum `|Lambda|` over the jet variables occurring; 0 for base-only
    /// polynomials and for zero.
    pub fn jet_order(&self) -> usize {
        self.terms.keys().map(Monomial::jet_order).max().unwrap_or(0)
    }

    /// Maximum total degree over the monomials; 0 for zero.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Splits by fibre degree: component `p` collects the monomials of total
    /// jet degree `p`. Substituting `u^i_L -> t u^i_L` sends component `p`
    /// to `t^p` times itself, so this is the polynomial in the scaling
    /// parameter, keyed by power.
    pub fn fibre_scale(&self) -> BTreeMap<u32, ScalarExpr> {
        let mut out: BTreeMap<u32, ScalarExpr> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.fibre_degree())
                .or_insert_with(|| ScalarExpr::zero(self.bundle))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Substitutes `u^i_Lambda -> 0`: keeps the base-only monomials.
    pub fn zero_section(&self) -> ScalarExpr {
        let mut out = ScalarExpr::zero(self.bundle);
        for (m, c) in &self.terms {
            if m.fibre_degree() == 0 {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }
}

impl Add for &ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, other: &ScalarExpr) -> ScalarExpr {
        self.bundle.check_same(&other.bundle);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, other: &ScalarExpr) -> ScalarExpr {
        self.bundle.check_same(&other.bundle);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, other: &ScalarExpr) -> ScalarExpr {
        self.bundle.check_same(&other.bundle);
        let mut out = ScalarExpr::zero(self.bundle);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr {
            bundle: self.bundle,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::print::scalar_to_string(self))
    }
}

/// Sign of a reduced rational, used when folding terms into printed sums.
pub(crate) fn is_negative(q: &BigRational) -> bool {
    q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Bundle {
        Bundle::new(1, 1)
    }

    fn u(idx: &[usize]) -> ScalarExpr {
        ScalarExpr::jet_var(b(), 1, MultiIndex::new(idx.to_vec()))
    }

    fn x() -> ScalarExpr {
        ScalarExpr::base_var(b(), 1)
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn ring_ops() {
        // u + u = 2u
        let two_u = &u(&[]) + &u(&[]);
        assert_eq!(two_u, u(&[]).scaled(&rat(2, 1)));
        // (u + x)(u - x) = u^2 - x^2
        let prod = &(&u(&[]) + &x()) * &(&u(&[]) - &x());
        let expected = &u(&[]).pow(2) - &x().pow(2);
        assert_eq!(prod, expected);
        // 3/2 u1 - 1/2 u1 = u1
        let diff = &u(&[1]).scaled(&rat(3, 2)) - &u(&[1]).scaled(&rat(1, 2));
        assert_eq!(diff, u(&[1]));
    }

    #[test]
    fn cancellation_is_exact() {
        let f = &(&u(&[]) * &x()) - &(&x() * &u(&[]));
        assert!(f.is_zero());
        assert_eq!(f, ScalarExpr::zero(b()));
    }

    #[test]
    fn partials() {
        // d/dx x^2 = 2x
        assert_eq!(x().pow(2).partial_base(1), x().scaled(&rat(2, 1)));
        // d/dx u^2 = 0: jets are independent coordinates
        assert!(u(&[]).pow(2).partial_base(1).is_zero());
        // d/dx (x u1) = u1
        assert_eq!((&x() * &u(&[1])).partial_base(1), u(&[1]));
        // d/du u^2 = 2u
        assert_eq!(
            u(&[]).pow(2).partial_jet(1, &MultiIndex::empty()),
            u(&[]).scaled(&rat(2, 1))
        );
        // d/du1 (u u1) = u
        assert_eq!(
            (&u(&[]) * &u(&[1])).partial_jet(1, &MultiIndex::single(1)),
            u(&[])
        );
        // d/du11 x^3 = 0
        assert!(x().pow(3).partial_jet(1, &MultiIndex::new(vec![1, 1])).is_zero());
    }

    #[test]
    fn total_derivative_examples() {
        // d1 u^2 = 2 u u1
        assert_eq!(
            u(&[]).pow(2).total_derivative(1),
            (&u(&[]) * &u(&[1])).scaled(&rat(2, 1))
        );
        // d1 x = 1
        assert_eq!(x().total_derivative(1), ScalarExpr::one(b()));
        // d1 (x u1) = u1 + x u11, cross-checked against the termwise
        // expansion d1 = paritial_x + u1 d/du + u11 d/du1 + ...
        let f = &x() * &u(&[1]);
        let expected = &u(&[1]) + &(&x() * &u(&[1, 1]));
        assert_eq!(f.total_derivative(1), expected);
        let termwise = &(&f.partial_base(1)
            + &(&u(&[1]) * &f.partial_jet(1, &MultiIndex::empty())))
            + &(&u(&[1, 1]) * &f.partial_jet(1, &MultiIndex::single(1)));
        assert_eq!(f.total_derivative(1), termwise);
    }

    #[test]
    fn iterated_total_derivative() {
        let empty = MultiIndex::empty();
        assert_eq!(u(&[]).total_derivative_multi(&MultiIndex::new(vec![1, 1])), u(&[1, 1]));
        let f = &(&x() * &u(&[1])) + &u(&[]).pow(3);
        assert_eq!(f.total_derivative_multi(&empty), f);
        // commutes on a 2d bundle
        let b2 = Bundle::new(2, 1);
        let g = ScalarExpr::jet_var(b2, 1, MultiIndex::empty());
        let d12 = g.total_derivative(1).total_derivative(2);
        let d21 = g.total_derivative(2).total_derivative(1);
        assert_eq!(d12, d21);
        assert_eq!(d12, ScalarExpr::jet_var(b2, 1, MultiIndex::new(vec![1, 2])));
    }

    #[test]
    fn fibre_scaling_splits_by_jet_degree() {
        // u^2 sits at p = 2
        let comps = u(&[]).pow(2).fibre_scale();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[&2], u(&[]).pow(2));
        // x^3 has no fibre dependence
        let comps = x().pow(3).fibre_scale();
        assert_eq!(comps[&0], x().pow(3));
        // x u u11 counts jets only
        let f = &(&x() * &u(&[])) * &u(&[1, 1]);
        let comps = f.fibre_scale();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[&2], f);
    }

    #[test]
    fn jet_order_examples() {
        assert_eq!((&u(&[1, 1]) * &u(&[])).jet_order(), 2);
        assert_eq!((&x().pow(2) + &ScalarExpr::one(b())).jet_order(), 0);
        assert_eq!(ScalarExpr::zero(b()).jet_order(), 0);
    }

    #[test]
    fn order_growth_bound() {
        let f = &(&u(&[1]) * &u(&[1])) + &(&x() * &u(&[]));
        let d = f.total_derivative(1);
        assert!(d.jet_order() <= f.jet_order() + 1);
    }

    #[test]
    fn zero_section_kills_fibre_monomials() {
        let f = &(&u(&[]) + &x()) + &(&x() * &u(&[1]));
        assert_eq!(f.zero_section(), x());
    }

    #[test]
    fn constant_detection() {
        assert!(ScalarExpr::zero(b()).is_constant());
        assert!(ScalarExpr::from_int(b(), 7).is_constant());
        assert!(!x().is_constant());
        assert!(!u(&[]).is_constant());
    }
}
