//! JSON rendering of forms, schema `jetvar-1`.
//!
//! ```json
//! {"schema":"jetvar-1","n":1,"m":1,
//!  "terms":[{"coef":[{"num":"1","den":"2","powers":[["u1_1",2]]}],
//!            "thetas":[[1,[]]],"dxs":[1]}]}
//! ```
//!
//! Terms appear in canonical word order and coefficients in the canonical
//! monomial order, so equal forms serialize to identical bytes. Numerators
//! and denominators are decimal strings to keep arbitrary-precision values
//! lossless.

use serde_json::{json, Value};

use crate::form::{Form, Generator};
use crate::print::variable_name;
use crate::scalar::ScalarExpr;

fn coef_json(coef: &ScalarExpr) -> Value {
    let n = coef.bundle().base_dim();
    let monomials: Vec<Value> = coef
        .terms()
        .rev()
        .map(|(mono, c)| {
            let powers: Vec<Value> = mono
                .powers()
                .iter()
                .map(|(v, e)| json!([variable_name(v, n), e]))
                .collect();
            json!({
                "num": c.numer().to_string(),
                "den": c.denom().to_string(),
                "powers": powers,
            })
        })
        .collect();
    Value::Array(monomials)
}

pub fn form_to_json(phi: &Form) -> Value {
    let bundle = phi.bundle();
    let terms: Vec<Value> = phi
        .terms()
        .map(|(word, coef)| {
            let mut thetas: Vec<Value> = Vec::new();
            let mut dxs: Vec<Value> = Vec::new();
            for g in word {
                match g {
                    Generator::Theta { field, index } => {
                        let dirs: Vec<usize> = index.iter().collect();
                        thetas.push(json!([field, dirs]));
                    }
                    Generator::Dx(l) => dxs.push(json!(l)),
                    Generator::Dy { .. } => unreachable!("contact forms carry no du generators"),
                }
            }
            json!({
                "coef": coef_json(coef),
                "thetas": thetas,
                "dxs": dxs,
            })
        })
        .collect();
    json!({
        "schema": "jetvar-1",
        "n": bundle.base_dim(),
        "m": bundle.fibre_dim(),
        "terms": terms,
    })
}

/// Compact single-line rendering of [`form_to_json`].
pub fn form_to_json_string(phi: &Form) -> String {
    form_to_json(phi).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Bundle;
    use crate::multi_index::MultiIndex;

    #[test]
    fn schema_instance() {
        let b = Bundle::new(1, 1);
        let theta_dx = Form::theta(b, 1, MultiIndex::empty()).wedge(&Form::dx(b, 1));
        let v = form_to_json(&theta_dx);
        assert_eq!(v["schema"], "jetvar-1");
        assert_eq!(v["n"], 1);
        assert_eq!(v["m"], 1);
        let terms = v["terms"].as_array().unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0]["thetas"], json!([[1, []]]));
        assert_eq!(terms[0]["dxs"], json!([1]));
        let coef = terms[0]["coef"].as_array().unwrap();
        assert_eq!(coef[0]["num"], "1");
        assert_eq!(coef[0]["den"], "1");
    }

    #[test]
    fn zero_form() {
        let b = Bundle::new(2, 1);
        let v = form_to_json(&Form::zero(b));
        assert_eq!(v["terms"], json!([]));
    }

    #[test]
    fn byte_identical_for_equal_forms() {
        let b = Bundle::new(1, 1);
        let u1 = crate::scalar::ScalarExpr::jet_var(b, 1, MultiIndex::single(1));
        let f = Form::dx(b, 1).scalar_mul(&u1);
        let g = &(&f + &f) - &f;
        assert_eq!(form_to_json_string(&f), form_to_json_string(&g));
    }
}
