//! Seeded random generation of scalars and forms for the property suites.
//!
//! Every value is a deterministic function of (seed, stream, case): each
//! case derives its own ChaCha stream, so suites can be reordered or
//! parallelized without changing what any single case sees.

use num::{BigInt, BigRational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::form::{ClassicForm, Form, Generator};
use crate::multi_index::MultiIndex;
use crate::scalar::{Monomial, ScalarExpr, Variable};

/// Generator caps plus the bundle and seeding for one run of a suite.
#[derive(Clone, Copy, Debug)]
pub struct RunConfig {
    pub bundle: Bundle,
    pub seed: u64,
    pub cases: usize,
    pub max_order: usize,
    pub max_degree: usize,
    pub max_terms: usize,
}

impl RunConfig {
    pub fn new(bundle: Bundle, seed: u64) -> RunConfig {
        RunConfig {
            bundle,
            seed,
            cases: 20,
            max_order: 2,
            max_degree: 2,
            max_terms: 2,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Independent deterministic stream for one (seed, stream, case) triple.
pub fn case_rng(seed: u64, stream: u64, case: u64) -> ChaCha8Rng {
    let mixed = splitmix64(splitmix64(seed ^ splitmix64(stream)) ^ case);
    ChaCha8Rng::seed_from_u64(mixed)
}

const COEFFICIENTS: &[(i64, i64)] = &[
    (1, 1),
    (-1, 1),
    (2, 1),
    (-2, 1),
    (1, 2),
    (-1, 2),
    (3, 1),
    (-3, 1),
    (1, 3),
    (-1, 3),
];

fn random_coefficient(rng: &mut ChaCha8Rng) -> BigRational {
    let (p, q) = COEFFICIENTS[rng.gen_range(0..COEFFICIENTS.len())];
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// All multi-indices of order up to the cap, in a fixed order.
pub fn multi_indices(base_dim: usize, max_order: usize) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex::empty()];
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_order {
        let mut next = Vec::new();
        for dirs in &level {
            let start = dirs.last().copied().unwrap_or(1);
            for l in start..=base_dim {
                let mut d = dirs.clone();
                d.push(l);
                out.push(MultiIndex::new(d.clone()));
                next.push(d);
            }
        }
        level = next;
    }
    out
}

fn variable_pool(cfg: &RunConfig) -> Vec<Variable> {
    let mut pool: Vec<Variable> = cfg.bundle.base_range().map(Variable::Base).collect();
    for i in cfg.bundle.fibre_range() {
        for idx in multi_indices(cfg.bundle.base_dim(), cfg.max_order) {
            pool.push(Variable::jet(i, idx));
        }
    }
    pool
}

fn random_monomial(cfg: &RunConfig, rng: &mut ChaCha8Rng, pool: &[Variable]) -> Monomial {
    let degree = rng.gen_range(0..=cfg.max_degree);
    let factors: Vec<(Variable, u32)> = (0..degree)
        .map(|_| (pool[rng.gen_range(0..pool.len())].clone(), 1))
        .collect();
    Monomial::from_powers(factors)
}

fn sample_distinct<T: Clone>(rng: &mut ChaCha8Rng, pool: &[T], count: usize) -> Vec<T> {
    let mut indices: Vec<usize> = (0..pool.len()).collect();
    indices.shuffle(rng);
    indices.truncate(count);
    indices.sort_unstable();
    indices.into_iter().map(|i| pool[i].clone()).collect()
}

/// A random polynomial within the config caps.
pub fn gen_random_scalar(cfg: &RunConfig, case: u64) -> ScalarExpr {
    let mut rng = case_rng(cfg.seed, 0x5ca1a8, case);
    let pool = variable_pool(cfg);
    let mut out = ScalarExpr::zero(cfg.bundle);
    for _ in 0..rng.gen_range(1..=cfg.max_terms.max(1)) {
        let mono = random_monomial(cfg, &mut rng, &pool);
        out = &out + &ScalarExpr::monomial(cfg.bundle, mono, random_coefficient(&mut rng));
    }
    out
}

/// A random form of the requested bidegree. Deterministic in (config, case);
/// returns the zero form when the contact pool cannot supply enough distinct
/// generators, and an error when the horizontal degree exceeds the base
/// dimension.
pub fn gen_random_form(cfg: &RunConfig, case: u64, bidegree: (usize, usize)) -> Result<Form> {
    let (contact, horizontal) = bidegree;
    let n = cfg.bundle.base_dim();
    if horizontal > n {
        return Err(Error::ImpossibleBidegree {
            contact,
            horizontal,
        });
    }
    let mut rng = case_rng(cfg.seed, 0xf0a2, case);
    let theta_pool: Vec<Generator> = {
        let mut pool = Vec::new();
        for i in cfg.bundle.fibre_range() {
            for idx in multi_indices(n, cfg.max_order) {
                pool.push(Generator::theta(i, idx));
            }
        }
        pool
    };
    if theta_pool.len() < contact {
        return Ok(Form::zero(cfg.bundle));
    }
    let dx_pool: Vec<Generator> = cfg.bundle.base_range().map(Generator::Dx).collect();
    let var_pool = variable_pool(cfg);

    let mut out = Form::zero(cfg.bundle);
    for _ in 0..rng.gen_range(1..=cfg.max_terms.max(1)) {
        let mut word = sample_distinct(&mut rng, &theta_pool, contact);
        word.extend(sample_distinct(&mut rng, &dx_pool, horizontal));
        let mono = random_monomial(cfg, &mut rng, &var_pool);
        let coef = ScalarExpr::monomial(cfg.bundle, mono, random_coefficient(&mut rng));
        out = &out + &Form::term(coef, word);
    }
    Ok(out)
}

/// A random form in the coordinate-differential basis, of the given total
/// degree, for exercising the classical exterior differential.
pub fn gen_random_classic_form(cfg: &RunConfig, case: u64, degree: usize) -> ClassicForm {
    let mut rng = case_rng(cfg.seed, 0xc1a551c, case);
    let mut pool: Vec<Generator> = cfg.bundle.base_range().map(Generator::Dx).collect();
    for i in cfg.bundle.fibre_range() {
        for idx in multi_indices(cfg.bundle.base_dim(), cfg.max_order) {
            pool.push(Generator::dy(i, idx));
        }
    }
    if pool.len() < degree {
        return ClassicForm::zero(cfg.bundle);
    }
    let var_pool = variable_pool(cfg);
    let mut out = ClassicForm::zero(cfg.bundle);
    for _ in 0..rng.gen_range(1..=cfg.max_terms.max(1)) {
        let word = sample_distinct(&mut rng, &pool, degree);
        let mono = random_monomial(cfg, &mut rng, &var_pool);
        let coef = ScalarExpr::monomial(cfg.bundle, mono, random_coefficient(&mut rng));
        out = &out + &ClassicForm::term(coef, word);
    }
    out
}
