//! The interior Euler projection and the variational maps built from it.
//!
//! `interior_euler` projects a k-contact top form onto the canonical
//! complement of the `d_H`-exact part by repeated integration by parts:
//!
//! ```text
//! tau_k(phi) = (1/k) sum_i th^i ^ sum_L (-1)^|L| d_L( rho_{i,L}(phi) )
//! ```
//!
//! where `rho_{i,L}` contracts with the vector dual to `th^i_L`. Its defining
//! properties — idempotence, annihilation of horizontal differentials, and
//! exactness of the complement — are verified by the test suites; nothing
//! here relies on them being axioms.

use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, BigRational};

use crate::bundle::Bundle;
use crate::calculus::{d_full, form_total_derivative_multi};
use crate::error::{Error, Result};
use crate::form::{Form, Generator};
use crate::multi_index::MultiIndex;
use crate::scalar::ScalarExpr;

/// A source form `sum_i D_i th^i ^ w` with `w` the base volume word: the
/// shape of Euler-Lagrange expressions. Only order-zero contact generators
/// appear, one per fibre component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceForm {
    bundle: Bundle,
    components: Vec<ScalarExpr>,
}

impl SourceForm {
    pub fn new(bundle: Bundle, components: Vec<ScalarExpr>) -> SourceForm {
        assert_eq!(
            components.len(),
            bundle.fibre_dim(),
            "one component per fibre field"
        );
        for c in &components {
            bundle.check_same(&c.bundle());
        }
        SourceForm { bundle, components }
    }

    pub fn zero(bundle: Bundle) -> SourceForm {
        let components = bundle.fibre_range().map(|_| ScalarExpr::zero(bundle)).collect();
        SourceForm { bundle, components }
    }

    pub fn bundle(&self) -> Bundle {
        self.bundle
    }

    /// Component for the 1-based fibre index `i`.
    pub fn component(&self, i: usize) -> &ScalarExpr {
        self.bundle.check_fibre(i);
        &self.components[i - 1]
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ScalarExpr::is_zero)
    }

    pub fn to_form(&self) -> Form {
        let mut out = Form::zero(self.bundle);
        let vol = Form::volume(self.bundle);
        for (i, delta) in self.components.iter().enumerate() {
            if delta.is_zero() {
                continue;
            }
            let theta = Form::theta(self.bundle, i + 1, MultiIndex::empty());
            out = &out + &theta.wedge(&vol).scalar_mul(delta);
        }
        out
    }

    /// Validates that a form has the source shape and extracts components.
    pub fn try_from_form(phi: &Form) -> Result<SourceForm> {
        let bundle = phi.bundle();
        let mut components: Vec<ScalarExpr> =
            bundle.fibre_range().map(|_| ScalarExpr::zero(bundle)).collect();
        let full_dx: Vec<Generator> = bundle.base_range().map(Generator::Dx).collect();
        for (word, coef) in phi.terms() {
            let (thetas, dxs): (Vec<&Generator>, Vec<&Generator>) =
                word.iter().partition(|g| g.is_theta());
            let dxs: Vec<Generator> = dxs.into_iter().cloned().collect();
            if thetas.len() != 1 || dxs != full_dx {
                return Err(Error::Precondition(format!(
                    "not a source form: term {} is not th^i ^ volume",
                    crate::print::form_to_string(
                        bundle,
                        std::iter::once((word, coef))
                    )
                )));
            }
            let Generator::Theta { field, index } = thetas[0] else {
                unreachable!()
            };
            if !index.is_empty() {
                return Err(Error::Precondition(
                    "not a source form: contact generator of positive order".to_string(),
                ));
            }
            components[*field - 1] = &components[*field - 1] + coef;
        }
        Ok(SourceForm { bundle, components })
    }
}

impl fmt::Display for SourceForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_form())
    }
}

/// A form of pure bidegree `(k, n)`: contact degree `k` over the full base
/// volume. The wrapper checks purity once so the projection maps can assume
/// it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KContactTopForm {
    form: Form,
    contact_degree: usize,
}

impl KContactTopForm {
    pub fn new(form: Form, contact_degree: usize) -> Result<KContactTopForm> {
        let n = form.bundle().base_dim();
        for (word, _) in form.terms() {
            if Form::word_bidegree(word) != (contact_degree, n) {
                return Err(Error::WrongBidegree {
                    expected_contact: contact_degree,
                    expected_horizontal: n,
                });
            }
        }
        Ok(KContactTopForm {
            form,
            contact_degree,
        })
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn into_form(self) -> Form {
        self.form
    }

    pub fn contact_degree(&self) -> usize {
        self.contact_degree
    }

    pub fn is_zero(&self) -> bool {
        self.form.is_zero()
    }
}

impl fmt::Display for KContactTopForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.form)
    }
}

/// Contact indices `(i, Lambda)` whose generators occur in the form's words.
fn occurring_thetas(phi: &Form) -> BTreeSet<(usize, MultiIndex)> {
    let mut out = BTreeSet::new();
    for (word, _) in phi.terms() {
        for g in word {
            if let Generator::Theta { field, index } = g {
                out.insert((*field, index.clone()));
            }
        }
    }
    out
}

pub(crate) fn interior_euler_form(phi: &Form, k: usize) -> Form {
    let bundle = phi.bundle();
    let mut acc = Form::zero(bundle);
    let mut by_field: Vec<Vec<MultiIndex>> = vec![Vec::new(); bundle.fibre_dim()];
    for (field, index) in occurring_thetas(phi) {
        by_field[field - 1].push(index);
    }
    for (slot, indices) in by_field.iter().enumerate() {
        if indices.is_empty() {
            continue;
        }
        let field = slot + 1;
        let mut inner = Form::zero(bundle);
        for index in indices {
            let stripped = phi.theta_contraction(field, index);
            if stripped.is_zero() {
                continue;
            }
            let derived = form_total_derivative_multi(&stripped, index);
            inner = if index.order() % 2 == 1 {
                &inner - &derived
            } else {
                &inner + &derived
            };
        }
        acc = &acc + &Form::theta(bundle, field, MultiIndex::empty()).wedge(&inner);
    }
    acc.scaled(&BigRational::new(BigInt::from(1), BigInt::from(k)))
}

/// The projection `tau_k` on `(k, n)`-forms, `k >= 1`. Output terms all
/// carry an order-zero contact generator; the map is idempotent and kills
/// `d_H`-exact forms.
pub fn interior_euler(phi: &KContactTopForm) -> Result<KContactTopForm> {
    let k = phi.contact_degree();
    if k == 0 {
        return Err(Error::Precondition(
            "interior Euler projection needs contact degree k >= 1".to_string(),
        ));
    }
    let projected = interior_euler_form(phi.form(), k);
    KContactTopForm::new(projected, k)
}

/// Euler-Lagrange components of a Lagrangian density:
/// `D_i = sum_L (-1)^|L| d_L( dL/du^i_L )` over the jet variables occurring.
pub fn euler_lagrange(density: &ScalarExpr) -> SourceForm {
    let bundle = density.bundle();
    let mut components: Vec<ScalarExpr> =
        bundle.fibre_range().map(|_| ScalarExpr::zero(bundle)).collect();
    for (field, index) in density.jet_vars() {
        let pd = density.partial_jet(field, &index);
        let term = pd.total_derivative_multi(&index);
        let slot = &mut components[field - 1];
        *slot = if index.order() % 2 == 1 {
            &*slot - &term
        } else {
            &*slot + &term
        };
    }
    SourceForm::new(bundle, components)
}

/// Extracts the density of a Lagrangian `L w`; errors unless the form is a
/// multiple of the volume word.
pub fn lagrangian_density(phi: &Form) -> Result<ScalarExpr> {
    let bundle = phi.bundle();
    let mut density = ScalarExpr::zero(bundle);
    let full_dx: Vec<Generator> = bundle.base_range().map(Generator::Dx).collect();
    for (word, coef) in phi.terms() {
        if *word != full_dx {
            return Err(Error::WrongBidegree {
                expected_contact: 0,
                expected_horizontal: bundle.base_dim(),
            });
        }
        density = &density + coef;
    }
    Ok(density)
}

/// The Helmholtz-Sonin obstruction `tau_2(h_2(d(Delta)))`; a source form is
/// locally variational exactly when this vanishes.
pub fn helmholtz(delta: &SourceForm) -> KContactTopForm {
    let d = d_full(&delta.to_form());
    let h2 = d.contact_projection(2);
    let projected = interior_euler_form(&h2, 2);
    KContactTopForm::new(projected, 2).expect("tau_2 output has pure bidegree (2, n)")
}

/// True when the Euler-Lagrange expression of `density` vanishes.
pub fn is_variationally_trivial(density: &ScalarExpr) -> bool {
    euler_lagrange(density).is_zero()
}

/// True when the Helmholtz-Sonin obstruction of `delta` vanishes.
pub fn is_locally_variational(delta: &SourceForm) -> bool {
    helmholtz(delta).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Bundle;
    use num::One;

    fn b() -> Bundle {
        Bundle::new(1, 1)
    }

    fn u(idx: &[usize]) -> ScalarExpr {
        ScalarExpr::jet_var(b(), 1, MultiIndex::new(idx.to_vec()))
    }

    fn th(idx: &[usize]) -> Form {
        Form::theta(b(), 1, MultiIndex::new(idx.to_vec()))
    }

    fn half() -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(2))
    }

    fn top(phi: Form, k: usize) -> KContactTopForm {
        KContactTopForm::new(phi, k).unwrap()
    }

    #[test]
    fn tau_fixes_source_forms() {
        let phi = th(&[]).wedge(&Form::dx(b(), 1)).scalar_mul(&u(&[1, 1]));
        let out = interior_euler(&top(phi.clone(), 1)).unwrap();
        assert_eq!(*out.form(), phi);
    }

    #[test]
    fn tau_kills_exact_rows() {
        // th1 ^ dx = -d_H(th), so tau_1 sends it to zero
        let phi = th(&[1]).wedge(&Form::dx(b(), 1));
        let out = interior_euler(&top(phi, 1)).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn tau_integrates_by_parts() {
        // u th11 ^ dx projects to u11 th ^ dx
        let phi = th(&[1, 1]).wedge(&Form::dx(b(), 1)).scalar_mul(&u(&[]));
        let out = interior_euler(&top(phi, 1)).unwrap();
        let expected = th(&[]).wedge(&Form::dx(b(), 1)).scalar_mul(&u(&[1, 1]));
        assert_eq!(*out.form(), expected);
    }

    #[test]
    fn wrong_bidegree_rejected() {
        let phi = th(&[]).scalar_mul(&u(&[]));
        assert!(KContactTopForm::new(phi, 1).is_err());
        let horizontal = Form::dx(b(), 1).scalar_mul(&u(&[]));
        let wrapped = KContactTopForm::new(horizontal, 0).unwrap();
        assert!(interior_euler(&wrapped).is_err());
    }

    #[test]
    fn euler_lagrange_examples() {
        // e1(1/2 u1^2) = -u11 th ^ dx
        let lagrangian = u(&[1]).pow(2).scaled(&half());
        let delta = euler_lagrange(&lagrangian);
        assert_eq!(*delta.component(1), -&u(&[1, 1]));
        // a total derivative has trivial Euler-Lagrange expression
        let div = u(&[1]).scaled(&BigRational::new(BigInt::from(3), BigInt::from(1)));
        assert!(euler_lagrange(&div).is_zero());
        // no derivatives: Delta = dL/du
        let quad = u(&[]).pow(2).scaled(&half());
        assert_eq!(*euler_lagrange(&quad).component(1), u(&[]));
    }

    #[test]
    fn euler_lagrange_factors_through_tau() {
        // e1 = tau_1 . h_1 . d on L w, on a few fixed densities
        let densities = vec![
            u(&[1]).pow(2).scaled(&half()),
            &(&u(&[]) * &u(&[1, 1])) + &ScalarExpr::base_var(b(), 1),
            &u(&[]).pow(3) * &ScalarExpr::base_var(b(), 1),
        ];
        for l in densities {
            let direct = euler_lagrange(&l).to_form();
            let dl = d_full(&Form::volume(b()).scalar_mul(&l));
            let h1 = dl.contact_projection(1);
            let via_tau = interior_euler(&top(h1, 1)).unwrap();
            assert_eq!(*via_tau.form(), direct);
        }
    }

    #[test]
    fn helmholtz_examples() {
        let vol = Form::dx(b(), 1);
        let _ = vol;
        // image of e1 is annihilated
        let delta = SourceForm::new(b(), vec![u(&[1, 1])]);
        assert!(helmholtz(&delta).is_zero());
        let delta = SourceForm::new(b(), vec![u(&[])]);
        assert!(helmholtz(&delta).is_zero());
        // u1 th ^ dx is obstructed
        let delta = SourceForm::new(b(), vec![u(&[1])]);
        let h = helmholtz(&delta);
        assert!(!h.is_zero());
        // and the obstruction is the expected 2-contact form
        let expected = -&th(&[]).wedge(&th(&[1])).wedge(&Form::dx(b(), 1));
        assert_eq!(*h.form(), expected);
    }

    #[test]
    fn predicates() {
        assert!(is_variationally_trivial(&u(&[1])));
        assert!(!is_variationally_trivial(&u(&[1]).pow(2).scaled(&half())));
        assert!(is_variationally_trivial(&ScalarExpr::zero(b())));
        assert!(is_locally_variational(&SourceForm::new(b(), vec![u(&[1, 1])])));
        assert!(!is_locally_variational(&SourceForm::new(b(), vec![u(&[1])])));
        assert!(is_locally_variational(&SourceForm::zero(b())));
    }

    #[test]
    fn source_form_round_trip() {
        let delta = SourceForm::new(b(), vec![&u(&[1, 1]) + &ScalarExpr::one(b())]);
        let back = SourceForm::try_from_form(&delta.to_form()).unwrap();
        assert_eq!(back, delta);
        // a positive-order contact generator is rejected
        let bad = th(&[1]).wedge(&Form::dx(b(), 1));
        assert!(SourceForm::try_from_form(&bad).is_err());
        // missing volume factor is rejected
        let bad = th(&[]).scalar_mul(&u(&[]));
        assert!(SourceForm::try_from_form(&bad).is_err());
    }

    #[test]
    fn tau_output_carries_order_zero_theta() {
        let phi = th(&[1]).wedge(&th(&[1, 1])).wedge(&Form::dx(b(), 1)).scalar_mul(&u(&[]));
        let out = interior_euler(&top(phi, 2)).unwrap();
        for (word, _) in out.form().terms() {
            assert!(word
                .iter()
                .any(|g| g.is_theta() && g.order() == 0));
        }
    }

    #[test]
    fn density_extraction() {
        let one = BigRational::one();
        let _ = one;
        let l = &u(&[]).pow(2) + &ScalarExpr::base_var(b(), 1);
        let phi = Form::volume(b()).scalar_mul(&l);
        assert_eq!(lagrangian_density(&phi).unwrap(), l);
        assert!(lagrangian_density(&th(&[])).is_err());
    }
}
