//! Potential construction: the fibre-scaling homotopy, horizontal-potential
//! and inverse-problem solvers, and the Tonti reconstruction.
//!
//! The fibre-scaling homotopy has a per-monomial closed form: a term of
//! contact degree `k` whose coefficient monomial has fibre degree `p` maps to
//! its Euler contraction divided by `k + p` (and to zero when `k = p = 0`).
//! An exact parameter-integral evaluator of the same operator is kept
//! alongside and cross-checked on random inputs, since the denominator is
//! the part worth distrusting.
//!
//! The `d_H`-potential solver is an iterative-deepening linear ansatz: it
//! grows a basis of candidate forms of the complementary bidegree, bounded
//! in jet order and coefficient degree, equates the horizontal differential
//! of the ansatz against the target coordinate by coordinate, and solves the
//! sparse rational system exactly. The basis is built by breadth-first
//! closure over the coordinates the target can interact with, which keeps
//! systems small without giving up completeness: at saturation, candidates
//! outside the closure cannot touch any reachable equation, so an
//! inconsistent system is a genuine infeasibility certificate within the
//! bounds.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num::{BigInt, BigRational, One, Zero};

use crate::bundle::Bundle;
use crate::calculus::{d_h, d_v, is_closed, Differential};
use crate::error::{Error, Result};
use crate::euler::{
    euler_lagrange, interior_euler_form, is_locally_variational, is_variationally_trivial,
    lagrangian_density, SourceForm,
};
use crate::form::{Form, Generator};
use crate::linsolve::{LinearSystem, SolveOutcome};
use crate::multi_index::MultiIndex;
use crate::print::{generator_name, variable_name};
use crate::scalar::{Monomial, ScalarExpr, Variable};

/// Caps steering the linear-ansatz solvers. Deepening iterates jet order,
/// then coefficient degree, upward from the smallest admissible start; with
/// deepening off a single attempt runs at the caps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveBounds {
    pub max_jet_order: usize,
    pub max_poly_degree: usize,
    pub deepening: bool,
}

impl SolveBounds {
    pub fn new(max_jet_order: usize, max_poly_degree: usize) -> SolveBounds {
        SolveBounds {
            max_jet_order,
            max_poly_degree,
            deepening: true,
        }
    }

    pub fn exact(max_jet_order: usize, max_poly_degree: usize) -> SolveBounds {
        SolveBounds {
            max_jet_order,
            max_poly_degree,
            deepening: false,
        }
    }
}

/// Why an ansatz solve failed, at the final bounds tried.
#[derive(Clone, Debug)]
pub struct InfeasibleReport {
    pub context: String,
    pub max_jet_order: usize,
    pub max_poly_degree: usize,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    pub witness: String,
    /// True when the candidate closure saturated, making the certificate
    /// complete for the bounded polynomial class; false when the internal
    /// size guard truncated the search.
    pub complete: bool,
}

impl fmt::Display for InfeasibleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: no solution with jet order <= {} and degree <= {}; \
             system {}x{} of rank {}; {}{}",
            self.context,
            self.max_jet_order,
            self.max_poly_degree,
            self.equations,
            self.unknowns,
            self.rank,
            self.witness,
            if self.complete {
                " (search complete within bounds)"
            } else {
                " (search truncated by size guard)"
            }
        )
    }
}

// ---------------------------------------------------------------------------
// Fibre-scaling homotopy
// ---------------------------------------------------------------------------

/// Closed form of the fibre-scaling homotopy: per term, the Euler
/// contraction divided by contact degree plus coefficient fibre degree.
pub fn koszul_homotopy(phi: &Form) -> Form {
    let bundle = phi.bundle();
    let mut out = Form::zero(bundle);
    for (word, coef) in phi.terms() {
        let thetas: Vec<(usize, &Generator)> = word
            .iter()
            .enumerate()
            .take_while(|(_, g)| g.is_theta())
            .collect();
        let k = thetas.len();
        if k == 0 {
            continue;
        }
        for (mono, c) in coef.terms() {
            let p = mono.fibre_degree() as usize;
            let denom = BigRational::new(BigInt::from(1), BigInt::from((k + p) as i64));
            for &(j, g) in &thetas {
                let Generator::Theta { field, index } = g else {
                    unreachable!()
                };
                let mut reduced = word.clone();
                reduced.remove(j);
                let new_mono = mono.times_var(Variable::jet(*field, index.clone()));
                let mut q = c * &denom;
                if j % 2 == 1 {
                    q = -q;
                }
                out.add_term(reduced, ScalarExpr::monomial(bundle, new_mono, q));
            }
        }
    }
    out
}

/// The same operator evaluated as the exact parameter integral
/// `int_0^1 t^(k-1) (ybar _| phi)(x, t u) dt`: coefficients are scaled by
/// fibre degree, the contraction runs against unscaled fibre coordinates,
/// and each power of the parameter integrates to an exact rational.
pub fn koszul_homotopy_integral(phi: &Form) -> Form {
    let bundle = phi.bundle();
    let mut out = Form::zero(bundle);
    for (word, coef) in phi.terms() {
        let k = Form::word_bidegree(word).0;
        if k == 0 {
            continue;
        }
        for (p, part) in coef.fibre_scale() {
            // integrand is t^(k-1+p) times the contracted term
            let power = (k as u32 - 1) + p;
            let weight = BigRational::new(BigInt::from(1), BigInt::from(power as i64 + 1));
            let contracted = Form::term(part, word.clone()).euler_contraction();
            out = &out + &contracted.scaled(&weight);
        }
    }
    out
}

/// Splits a `d_V`-closed form as `phi = d_V(sigma) + phi_X` with `phi_X` the
/// zero-section pull-back.
pub fn dv_potential(phi: &Form) -> Result<(Form, Form)> {
    if !is_closed(phi, Differential::Vertical) {
        return Err(Error::Precondition("form is not d_V-closed".to_string()));
    }
    Ok((koszul_homotopy(phi), phi.zero_section_pullback()))
}

/// Splits a closed form as `phi = phi_X + d(xi)` with `phi_X` a closed form
/// in the base variables alone.
pub fn poincare_decompose(phi: &Form) -> Result<(Form, Form)> {
    if !is_closed(phi, Differential::Full) {
        return Err(Error::Precondition("form is not d-closed".to_string()));
    }
    Ok((phi.zero_section_pullback(), koszul_homotopy(phi)))
}

// ---------------------------------------------------------------------------
// Linear ansatz machinery
// ---------------------------------------------------------------------------

type Coord = (Vec<Generator>, Monomial);

const MAX_UNKNOWNS: usize = 200_000;
const MAX_FULL_BASIS: usize = 200_000;

fn form_coords(phi: &Form) -> BTreeMap<Coord, BigRational> {
    let mut out = BTreeMap::new();
    for (word, coef) in phi.terms() {
        for (mono, c) in coef.terms() {
            out.insert((word.clone(), mono.clone()), c.clone());
        }
    }
    out
}

fn coord_label(bundle: Bundle, coord: &Coord) -> String {
    let n = bundle.base_dim();
    let mono = if coord.1.is_one() {
        "1".to_string()
    } else {
        coord
            .1
            .powers()
            .iter()
            .map(|(v, e)| {
                if *e == 1 {
                    variable_name(v, n)
                } else {
                    format!("{}**{e}", variable_name(v, n))
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    };
    let word = if coord.0.is_empty() {
        "1".to_string()
    } else {
        coord
            .0
            .iter()
            .map(|g| generator_name(g, n))
            .collect::<Vec<_>>()
            .join("^")
    };
    format!("{mono} * {word}")
}

/// What a candidate unknown stands for, by the operator that carries it into
/// the target: a horizontal potential term, a vertical potential term, or a
/// base-variables-only remainder term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum CandKind {
    Horizontal,
    Vertical,
    BasePart,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Candidate {
    kind: CandKind,
    word: Vec<Generator>,
    mono: Monomial,
}

impl Candidate {
    fn jet_order(&self) -> usize {
        self.word
            .iter()
            .map(Generator::order)
            .max()
            .unwrap_or(0)
            .max(self.mono.jet_order())
    }
}

fn candidate_image(bundle: Bundle, cand: &Candidate) -> Form {
    let scalar = ScalarExpr::monomial(bundle, cand.mono.clone(), BigRational::one());
    let f = Form::term(scalar, cand.word.clone());
    match cand.kind {
        CandKind::Horizontal => d_h(&f),
        CandKind::Vertical => d_v(&f),
        CandKind::BasePart => f,
    }
}

/// Re-sorts a modified word into canonical order; duplicates invalidate it.
fn normalized_word(mut word: Vec<Generator>) -> Option<Vec<Generator>> {
    word.sort();
    for pair in word.windows(2) {
        if pair[0] == pair[1] {
            return None;
        }
    }
    Some(word)
}

/// All bounded basis elements whose image under the kind's operator can hit
/// the given coordinate. Complete by construction: the forward operators
/// only move coordinates along the inverses enumerated here.
fn inverse_candidates(
    kind: CandKind,
    coord: &Coord,
    max_order: usize,
    max_degree: u32,
) -> Vec<Candidate> {
    let (word, mono) = coord;
    let mut out = Vec::new();
    match kind {
        CandKind::Horizontal => {
            for (pos, g) in word.iter().enumerate() {
                let Generator::Dx(lambda) = g else { continue };
                let lambda = *lambda;
                let mut base_word = word.clone();
                base_word.remove(pos);

                // base-partial path: the candidate carried one more x^lambda
                if mono.degree() + 1 <= max_degree && mono.jet_order() <= max_order {
                    out.push(Candidate {
                        kind,
                        word: base_word.clone(),
                        mono: mono.times_var(Variable::Base(lambda)),
                    });
                }

                // coefficient-raising path: one jet factor was one order lower
                for (v, _) in mono.powers() {
                    let Variable::Jet { field, index } = v else { continue };
                    if !index.contains(lambda) {
                        continue;
                    }
                    let lowered = index.without(lambda).expect("contains checked");
                    let cand_mono = mono
                        .replaced_one(v, Variable::jet(*field, lowered))
                        .expect("factor present");
                    if cand_mono.jet_order() <= max_order && cand_mono.degree() <= max_degree {
                        out.push(Candidate {
                            kind,
                            word: base_word.clone(),
                            mono: cand_mono,
                        });
                    }
                }

                // generator-raising path: one contact generator was lower
                for (tpos, tg) in base_word.iter().enumerate() {
                    let Generator::Theta { field, index } = tg else {
                        continue;
                    };
                    if !index.contains(lambda) {
                        continue;
                    }
                    let lowered = index.without(lambda).expect("contains checked");
                    let mut cand_word = base_word.clone();
                    cand_word[tpos] = Generator::theta(*field, lowered);
                    let Some(cand_word) = normalized_word(cand_word) else {
                        continue;
                    };
                    out.push(Candidate {
                        kind,
                        word: cand_word,
                        mono: mono.clone(),
                    });
                }
            }
        }
        CandKind::Vertical => {
            for (pos, g) in word.iter().enumerate() {
                let Generator::Theta { field, index } = g else {
                    continue;
                };
                let cand_mono = mono.times_var(Variable::jet(*field, index.clone()));
                if cand_mono.jet_order() > max_order || cand_mono.degree() > max_degree {
                    continue;
                }
                let mut cand_word = word.clone();
                cand_word.remove(pos);
                out.push(Candidate {
                    kind,
                    word: cand_word,
                    mono: cand_mono,
                });
            }
        }
        CandKind::BasePart => {
            let pure_base =
                mono.fibre_degree() == 0 && word.iter().all(|g| g.is_dx());
            if pure_base && mono.degree() <= max_degree {
                out.push(Candidate {
                    kind,
                    word: word.clone(),
                    mono: mono.clone(),
                });
            }
        }
    }
    out.retain(|c| c.jet_order() <= max_order && c.mono.degree() <= max_degree);
    out
}

struct ClosureSystem {
    candidates: Vec<Candidate>,
    images: Vec<BTreeMap<Coord, BigRational>>,
    coords: Vec<Coord>,
    saturated: bool,
}

fn build_closure(
    bundle: Bundle,
    kinds: &[CandKind],
    targets: &BTreeMap<Coord, BigRational>,
    max_order: usize,
    max_degree: u32,
) -> ClosureSystem {
    let mut coord_index: BTreeMap<Coord, usize> = BTreeMap::new();
    let mut coords: Vec<Coord> = Vec::new();
    let mut queue: VecDeque<Coord> = VecDeque::new();
    let mut seen: BTreeSet<Candidate> = BTreeSet::new();
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut images: Vec<BTreeMap<Coord, BigRational>> = Vec::new();
    let mut saturated = true;

    for coord in targets.keys() {
        coord_index.insert(coord.clone(), coords.len());
        coords.push(coord.clone());
        queue.push_back(coord.clone());
    }

    'bfs: while let Some(coord) = queue.pop_front() {
        for kind in kinds {
            for cand in inverse_candidates(*kind, &coord, max_order, max_degree) {
                if seen.contains(&cand) {
                    continue;
                }
                if candidates.len() >= MAX_UNKNOWNS {
                    saturated = false;
                    break 'bfs;
                }
                seen.insert(cand.clone());
                let image = form_coords(&candidate_image(bundle, &cand));
                for c in image.keys() {
                    if !coord_index.contains_key(c) {
                        coord_index.insert(c.clone(), coords.len());
                        coords.push(c.clone());
                        queue.push_back(c.clone());
                    }
                }
                candidates.push(cand);
                images.push(image);
            }
        }
    }

    ClosureSystem {
        candidates,
        images,
        coords,
        saturated,
    }
}

#[derive(Default)]
struct AnsatzSolution {
    horizontal: Option<Form>,
    vertical: Option<Form>,
    base: Option<Form>,
}

fn solve_ansatz(
    bundle: Bundle,
    kinds: &[CandKind],
    target: &Form,
    max_order: usize,
    max_degree: u32,
    context: &str,
) -> std::result::Result<AnsatzSolution, Box<InfeasibleReport>> {
    let target_coords = form_coords(target);
    let closure = build_closure(bundle, kinds, &target_coords, max_order, max_degree);

    let coord_index: BTreeMap<&Coord, usize> = closure
        .coords
        .iter()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    let mut rows: Vec<BTreeMap<usize, BigRational>> =
        vec![BTreeMap::new(); closure.coords.len()];
    for (j, image) in closure.images.iter().enumerate() {
        for (coord, v) in image {
            rows[coord_index[coord]].insert(j, v.clone());
        }
    }

    let mut system = LinearSystem::new(closure.candidates.len());
    for (i, row) in rows.into_iter().enumerate() {
        let rhs = target_coords
            .get(&closure.coords[i])
            .cloned()
            .unwrap_or_else(BigRational::zero);
        system.add_row(row, rhs);
    }

    match system.solve() {
        SolveOutcome::Solution(x) => {
            let mut sums: BTreeMap<CandKind, Form> = BTreeMap::new();
            for (j, cand) in closure.candidates.iter().enumerate() {
                if x[j].is_zero() {
                    continue;
                }
                let term = Form::term(
                    ScalarExpr::monomial(bundle, cand.mono.clone(), x[j].clone()),
                    cand.word.clone(),
                );
                let slot = sums
                    .entry(cand.kind)
                    .or_insert_with(|| Form::zero(bundle));
                *slot = &*slot + &term;
            }
            Ok(AnsatzSolution {
                horizontal: sums.remove(&CandKind::Horizontal),
                vertical: sums.remove(&CandKind::Vertical),
                base: sums.remove(&CandKind::BasePart),
            })
        }
        SolveOutcome::Infeasible(info) => Err(Box::new(InfeasibleReport {
            context: context.to_string(),
            max_jet_order: max_order,
            max_poly_degree: max_degree as usize,
            unknowns: info.cols,
            equations: info.rows,
            rank: info.rank,
            witness: format!(
                "inconsistent at coordinate {} with residual {}",
                coord_label(bundle, &closure.coords[info.row_index]),
                info.residual
            ),
            complete: closure.saturated,
        })),
    }
}

fn bound_schedule(r0: usize, d0: usize, bounds: &SolveBounds) -> Vec<(usize, usize)> {
    if !bounds.deepening {
        return vec![(bounds.max_jet_order, bounds.max_poly_degree)];
    }
    let mut out = Vec::new();
    for d in d0..=bounds.max_poly_degree {
        for r in r0..=bounds.max_jet_order {
            out.push((r, d));
        }
    }
    if out.is_empty() {
        out.push((bounds.max_jet_order, bounds.max_poly_degree));
    }
    out
}

// ---------------------------------------------------------------------------
// Horizontal potentials
// ---------------------------------------------------------------------------

/// Finds `sigma` of bidegree `(k, s-1)` with `d_H(sigma) = phi`, for `phi` of
/// pure bidegree `(k, s)` satisfying the matching solvability precondition:
/// `d_H`-closed below top horizontal degree, variationally trivial for
/// Lagrangians, annihilated by the interior Euler projection for `k >= 1`.
///
/// The search starts at jet order `max(jet_order(phi) - 1, 0)` and degree
/// `deg(phi)` and deepens within `bounds`; a failure carries the final
/// system's rank and residual witness.
pub fn dh_potential(phi: &Form, bounds: &SolveBounds) -> Result<Form> {
    let bundle = phi.bundle();
    if phi.is_zero() {
        return Ok(Form::zero(bundle));
    }
    let (k, s) = phi.homogeneous_bidegree().ok_or_else(|| {
        Error::Precondition("horizontal potential needs a form of pure bidegree".to_string())
    })?;
    let n = bundle.base_dim();
    if s < n {
        if !is_closed(phi, Differential::Horizontal) {
            return Err(Error::Precondition(
                "form below top horizontal degree is not d_H-closed".to_string(),
            ));
        }
    } else if k == 0 {
        let density = lagrangian_density(phi)?;
        if !is_variationally_trivial(&density) {
            return Err(Error::Precondition(
                "Lagrangian is not variationally trivial".to_string(),
            ));
        }
    } else if !interior_euler_form(phi, k).is_zero() {
        return Err(Error::Precondition(
            "interior Euler projection of the form does not vanish".to_string(),
        ));
    }

    if s == 0 {
        // nothing sits below horizontal degree zero; nonzero closed scalars
        // are exactly the constant obstruction
        return Err(Error::NotFoundWithinBounds(Box::new(InfeasibleReport {
            context: "d_H potential".to_string(),
            max_jet_order: bounds.max_jet_order,
            max_poly_degree: bounds.max_poly_degree,
            unknowns: 0,
            equations: form_coords(phi).len(),
            rank: 0,
            witness: "no forms of horizontal degree -1 exist; closed scalars are constants"
                .to_string(),
            complete: true,
        })));
    }

    let r0 = phi.jet_order().saturating_sub(1);
    let d0 = phi.degree() as usize;
    let mut last: Option<Box<InfeasibleReport>> = None;
    for (r, d) in bound_schedule(r0, d0, bounds) {
        match solve_ansatz(
            bundle,
            &[CandKind::Horizontal],
            phi,
            r,
            d as u32,
            "d_H potential",
        ) {
            Ok(sol) => {
                let sigma = sol.horizontal.unwrap_or_else(|| Form::zero(bundle));
                assert_eq!(d_h(&sigma), *phi, "solver returned a non-potential");
                return Ok(sigma);
            }
            Err(report) => last = Some(report),
        }
    }
    Err(Error::NotFoundWithinBounds(last.expect("at least one attempt")))
}

// ---------------------------------------------------------------------------
// Inverse problem and Tonti reconstruction
// ---------------------------------------------------------------------------

fn multi_indices_up_to(n: usize, max_order: usize) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex::empty()];
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_order {
        let mut next = Vec::new();
        for dirs in &level {
            let start = dirs.last().copied().unwrap_or(1);
            for l in start..=n {
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

/// All monomials over the bounded variable pool with total degree `<= max
/// degree`, optionally requiring fibre dependence.
fn enumerate_monomials(
    bundle: Bundle,
    max_order: usize,
    max_degree: u32,
    require_jet: bool,
) -> Option<Vec<Monomial>> {
    let mut vars: Vec<Variable> = bundle.base_range().map(Variable::Base).collect();
    for i in bundle.fibre_range() {
        for idx in multi_indices_up_to(bundle.base_dim(), max_order) {
            vars.push(Variable::jet(i, idx));
        }
    }
    let mut out = Vec::new();
    let mut stack: Vec<(usize, u32, Vec<Variable>)> = vec![(0, max_degree, Vec::new())];
    while let Some((start, remaining, current)) = stack.pop() {
        let mono = Monomial::from_powers(current.iter().cloned().map(|v| (v, 1)).collect());
        if !require_jet || mono.fibre_degree() > 0 {
            out.push(mono);
        }
        if out.len() > MAX_FULL_BASIS {
            return None;
        }
        if remaining == 0 {
            continue;
        }
        for i in start..vars.len() {
            let mut next = current.clone();
            next.push(vars[i].clone());
            stack.push((i, remaining - 1, next));
        }
    }
    out.sort();
    out.dedup();
    Some(out)
}

/// Searches for a Lagrangian density with the given Euler-Lagrange source
/// form by a complete linear ansatz over all bounded monomials. Because the
/// basis is exhaustive within the bounds, an infeasible outcome certifies
/// that no such density exists there — which is how non-variationality is
/// established independently of the Helmholtz obstruction.
pub fn find_lagrangian(delta: &SourceForm, bounds: &SolveBounds) -> Result<ScalarExpr> {
    let bundle = delta.bundle();
    let target = delta.to_form();
    let mut last: Option<Box<InfeasibleReport>> = None;
    for (r, d) in bound_schedule(0, 1, bounds) {
        let Some(basis) = enumerate_monomials(bundle, r, d as u32, true) else {
            return Err(Error::NotFoundWithinBounds(Box::new(InfeasibleReport {
                context: "Euler-Lagrange inverse".to_string(),
                max_jet_order: r,
                max_poly_degree: d,
                unknowns: MAX_FULL_BASIS,
                equations: 0,
                rank: 0,
                witness: "ansatz basis exceeds the size guard".to_string(),
                complete: false,
            })));
        };
        let mut images = Vec::with_capacity(basis.len());
        let mut coord_index: BTreeMap<Coord, usize> = BTreeMap::new();
        let mut coords: Vec<Coord> = Vec::new();
        let target_coords = form_coords(&target);
        for coord in target_coords.keys() {
            coord_index.insert(coord.clone(), coords.len());
            coords.push(coord.clone());
        }
        for mono in &basis {
            let density = ScalarExpr::monomial(bundle, mono.clone(), BigRational::one());
            let image = form_coords(&euler_lagrange(&density).to_form());
            for c in image.keys() {
                if !coord_index.contains_key(c) {
                    coord_index.insert(c.clone(), coords.len());
                    coords.push(c.clone());
                }
            }
            images.push(image);
        }
        let mut rows: Vec<BTreeMap<usize, BigRational>> = vec![BTreeMap::new(); coords.len()];
        for (j, image) in images.iter().enumerate() {
            for (coord, v) in image {
                rows[coord_index[coord]].insert(j, v.clone());
            }
        }
        let mut system = LinearSystem::new(basis.len());
        for (i, row) in rows.into_iter().enumerate() {
            let rhs = target_coords
                .get(&coords[i])
                .cloned()
                .unwrap_or_else(BigRational::zero);
            system.add_row(row, rhs);
        }
        match system.solve() {
            SolveOutcome::Solution(x) => {
                let mut density = ScalarExpr::zero(bundle);
                for (j, mono) in basis.iter().enumerate() {
                    if !x[j].is_zero() {
                        density =
                            &density + &ScalarExpr::monomial(bundle, mono.clone(), x[j].clone());
                    }
                }
                assert_eq!(
                    euler_lagrange(&density),
                    *delta,
                    "solver returned a non-solution"
                );
                return Ok(density);
            }
            SolveOutcome::Infeasible(info) => {
                last = Some(Box::new(InfeasibleReport {
                    context: "Euler-Lagrange inverse".to_string(),
                    max_jet_order: r,
                    max_poly_degree: d,
                    unknowns: info.cols,
                    equations: info.rows,
                    rank: info.rank,
                    witness: format!(
                        "inconsistent at coordinate {} with residual {}",
                        coord_label(bundle, &coords[info.row_index]),
                        info.residual
                    ),
                    complete: true,
                }));
            }
        }
    }
    Err(Error::NotFoundWithinBounds(last.expect("at least one attempt")))
}

/// The fibre-scaling reconstruction of a Lagrangian from a locally
/// variational source form: `L = sum_i sum_monomials u^i m / (p + 1)` with
/// `p` the fibre degree of the monomial `m` of `Delta_i`. The reconstruction
/// is verified against its own Euler-Lagrange expression before returning.
pub fn tonti_lagrangian(delta: &SourceForm) -> Result<ScalarExpr> {
    if !is_locally_variational(delta) {
        return Err(Error::Precondition(
            "source form is not locally variational (nonzero Helmholtz-Sonin obstruction)"
                .to_string(),
        ));
    }
    let bundle = delta.bundle();
    let mut density = ScalarExpr::zero(bundle);
    for i in bundle.fibre_range() {
        let u_i = Variable::jet(i, MultiIndex::empty());
        for (mono, c) in delta.component(i).terms() {
            let p = mono.fibre_degree() as i64;
            let weight = BigRational::new(BigInt::from(1), BigInt::from(p + 1));
            density = &density
                + &ScalarExpr::monomial(bundle, mono.times_var(u_i.clone()), c * &weight);
        }
    }
    if euler_lagrange(&density) != *delta {
        return Err(Error::SelfCheck(
            "reconstructed Lagrangian does not reproduce the source form".to_string(),
        ));
    }
    Ok(density)
}

// ---------------------------------------------------------------------------
// Kernel of d_H d_V
// ---------------------------------------------------------------------------

/// Decomposes `phi` in the kernel of `d_H d_V` as `sigma + xi + phi_X` with
/// `sigma` `d_H`-closed, `xi` `d_V`-closed, and `phi_X` in base variables
/// only. The solver searches the stronger shape `sigma = d_H(alpha)`,
/// `xi = d_V(beta)`, which the closedness conditions then follow from; the
/// returned triple is one valid representative, not a canonical one.
pub fn ker_dhdv_decompose(phi: &Form, bounds: &SolveBounds) -> Result<(Form, Form, Form)> {
    let bundle = phi.bundle();
    if !d_h(&d_v(phi)).is_zero() {
        return Err(Error::Precondition(
            "form is not in the kernel of d_H d_V".to_string(),
        ));
    }
    let zero = Form::zero(bundle);
    if phi.is_zero() {
        return Ok((zero.clone(), zero.clone(), zero));
    }

    let mut sigma = Form::zero(bundle);
    let mut xi = Form::zero(bundle);
    let mut base = Form::zero(bundle);
    for (k, s, comp) in phi.split_bidegree() {
        let mut kinds = Vec::new();
        if s >= 1 {
            kinds.push(CandKind::Horizontal);
        }
        if k >= 1 {
            kinds.push(CandKind::Vertical);
        }
        if k == 0 {
            kinds.push(CandKind::BasePart);
        }
        let r0 = comp.jet_order().min(bounds.max_jet_order);
        let d0 = (comp.degree() as usize + 1).min(bounds.max_poly_degree);
        let mut solved = false;
        let mut last: Option<Box<InfeasibleReport>> = None;
        for (r, d) in bound_schedule(r0, d0, bounds) {
            match solve_ansatz(
                bundle,
                &kinds,
                &comp,
                r,
                d as u32,
                &format!("Ker d_H d_V split at bidegree ({k}, {s})"),
            ) {
                Ok(sol) => {
                    if let Some(alpha) = sol.horizontal {
                        sigma = &sigma + &d_h(&alpha);
                    }
                    if let Some(beta) = sol.vertical {
                        xi = &xi + &d_v(&beta);
                    }
                    if let Some(gamma) = sol.base {
                        base = &base + &gamma;
                    }
                    solved = true;
                    break;
                }
                Err(report) => last = Some(report),
            }
        }
        if !solved {
            return Err(Error::NotFoundWithinBounds(
                last.expect("at least one attempt"),
            ));
        }
    }

    debug_assert!(d_h(&sigma).is_zero());
    debug_assert!(d_v(&xi).is_zero());
    assert_eq!(&(&sigma + &xi) + &base, *phi, "decomposition must recombine");
    Ok((sigma, xi, base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::d_full;

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

    #[test]
    fn koszul_closed_form_examples() {
        // H(u th) = u^2 / 2, and d_V recovers the input
        let phi = th(&[]).scalar_mul(&u(&[]));
        let sigma = koszul_homotopy(&phi);
        assert_eq!(sigma, Form::from_scalar(u(&[]).pow(2).scaled(&half())));
        assert_eq!(d_v(&sigma), phi);
        // H(th ^ th1) = (u th1 - u1 th)/2
        let phi = th(&[]).wedge(&th(&[1]));
        let sigma = koszul_homotopy(&phi);
        let expected =
            (&th(&[1]).scalar_mul(&u(&[])) - &th(&[]).scalar_mul(&u(&[1]))).scaled(&half());
        assert_eq!(sigma, expected);
        assert_eq!(d_v(&sigma), phi);
        // purely horizontal input maps to zero
        let x = ScalarExpr::base_var(b(), 1);
        assert!(koszul_homotopy(&Form::dx(b(), 1).scalar_mul(&x.pow(2))).is_zero());
    }

    #[test]
    fn integral_route_agrees() {
        let phi = &th(&[]).scalar_mul(&(&u(&[]).pow(2) + &ScalarExpr::base_var(b(), 1)))
            + &th(&[1]).wedge(&Form::dx(b(), 1)).scalar_mul(&u(&[1]));
        assert_eq!(koszul_homotopy(&phi), koszul_homotopy_integral(&phi));
    }

    #[test]
    fn dv_potential_examples() {
        let phi = th(&[]).scalar_mul(&u(&[]));
        let (sigma, base) = dv_potential(&phi).unwrap();
        assert_eq!(&d_v(&sigma) + &base, phi);
        assert!(base.is_zero());

        let x_dx = Form::dx(b(), 1).scalar_mul(&ScalarExpr::base_var(b(), 1));
        let (sigma, base) = dv_potential(&x_dx).unwrap();
        assert!(sigma.is_zero());
        assert_eq!(base, x_dx);

        // (2u + 1) th: components at fibre degree one and zero
        let two_u_plus_1 = &u(&[]).scaled(&BigRational::from_integer(2.into()))
            + &ScalarExpr::one(b());
        let phi = th(&[]).scalar_mul(&two_u_plus_1);
        let (sigma, base) = dv_potential(&phi).unwrap();
        let expected = &u(&[]).pow(2) + &u(&[]);
        assert_eq!(sigma, Form::from_scalar(expected));
        assert!(base.is_zero());

        // precondition enforced
        assert!(dv_potential(&Form::from_scalar(u(&[]))).is_err());
    }

    #[test]
    fn poincare_examples() {
        // d(u) = th + u1 dx decomposes back to u
        let phi = d_full(&Form::from_scalar(u(&[])));
        let (base, xi) = poincare_decompose(&phi).unwrap();
        assert!(base.is_zero());
        assert_eq!(xi, Form::from_scalar(u(&[])));
        assert_eq!(&base + &d_full(&xi), phi);

        // a closed base form survives as phi_X
        let b2 = Bundle::new(2, 1);
        let dx1 = Form::dx(b2, 1);
        let (base, xi) = poincare_decompose(&dx1).unwrap();
        assert_eq!(base, dx1);
        assert!(xi.is_zero());

        let z = Form::zero(b());
        let (base, xi) = poincare_decompose(&z).unwrap();
        assert!(base.is_zero() && xi.is_zero());
    }

    #[test]
    fn dh_potential_examples() {
        // u1 dx = d_H u
        let phi = Form::dx(b(), 1).scalar_mul(&u(&[1]));
        let sigma = dh_potential(&phi, &SolveBounds::new(2, 2)).unwrap();
        assert_eq!(d_h(&sigma), phi);
        assert_eq!(sigma.homogeneous_bidegree(), Some((0, 0)));

        // (u u11 + u1^2) dx = d_H(u u1)
        let coef = &(&u(&[]) * &u(&[1, 1])) + &u(&[1]).pow(2);
        let phi = Form::dx(b(), 1).scalar_mul(&coef);
        let sigma = dh_potential(&phi, &SolveBounds::new(2, 3)).unwrap();
        assert_eq!(d_h(&sigma), phi);
        assert!(sigma.jet_order() <= 1);

        // n = 2, below top degree: u1 dx1 + u2 dx2 = d_H u
        let b2 = Bundle::new(2, 1);
        let u2 = |idx: &[usize]| ScalarExpr::jet_var(b2, 1, MultiIndex::new(idx.to_vec()));
        let phi = &Form::dx(b2, 1).scalar_mul(&u2(&[1])) + &Form::dx(b2, 2).scalar_mul(&u2(&[2]));
        let sigma = dh_potential(&phi, &SolveBounds::new(1, 2)).unwrap();
        assert_eq!(d_h(&sigma), phi);
    }

    #[test]
    fn dh_potential_preconditions() {
        // u dx is a nontrivial Lagrangian: rejected up front
        let phi = Form::dx(b(), 1).scalar_mul(&u(&[]));
        assert!(matches!(
            dh_potential(&phi, &SolveBounds::new(2, 2)),
            Err(Error::Precondition(_))
        ));
        // nonzero constants are obstructed, not solvable
        let c = Form::from_scalar(ScalarExpr::one(b()));
        assert!(matches!(
            dh_potential(&c, &SolveBounds::new(1, 1)),
            Err(Error::NotFoundWithinBounds(_))
        ));
        // not d_H-closed below top degree
        let b2 = Bundle::new(2, 1);
        let w = ScalarExpr::jet_var(b2, 1, MultiIndex::empty());
        let phi = Form::dx(b2, 1).scalar_mul(&w);
        assert!(matches!(
            dh_potential(&phi, &SolveBounds::new(2, 2)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn find_lagrangian_certificate() {
        // u1 th ^ dx has no Lagrangian with order <= 2, degree <= 4
        let delta = SourceForm::new(b(), vec![u(&[1])]);
        let err = find_lagrangian(&delta, &SolveBounds::exact(2, 4)).unwrap_err();
        match err {
            Error::NotFoundWithinBounds(report) => {
                assert!(report.complete, "certificate must be complete");
                assert_eq!(report.max_jet_order, 2);
                assert_eq!(report.max_poly_degree, 4);
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
        // while u11 th ^ dx is solvable
        let delta = SourceForm::new(b(), vec![u(&[1, 1])]);
        let density = find_lagrangian(&delta, &SolveBounds::exact(2, 4)).unwrap();
        assert_eq!(euler_lagrange(&density), delta);
    }

    #[test]
    fn tonti_examples() {
        // u11 th ^ dx -> u u11 / 2
        let delta = SourceForm::new(b(), vec![u(&[1, 1])]);
        let density = tonti_lagrangian(&delta).unwrap();
        assert_eq!(density, (&u(&[]) * &u(&[1, 1])).scaled(&half()));
        // u th ^ dx -> u^2 / 2
        let delta = SourceForm::new(b(), vec![u(&[])]);
        assert_eq!(
            tonti_lagrangian(&delta).unwrap(),
            u(&[]).pow(2).scaled(&half())
        );
        // zero -> zero
        assert!(tonti_lagrangian(&SourceForm::zero(b())).unwrap().is_zero());
        // non-variational input rejected
        let delta = SourceForm::new(b(), vec![u(&[1])]);
        assert!(matches!(
            tonti_lagrangian(&delta),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn ker_dhdv_examples() {
        // u th on n = 2 is d_V-closed; the solver finds beta = u^2/2
        let b2 = Bundle::new(2, 1);
        let w = ScalarExpr::jet_var(b2, 1, MultiIndex::empty());
        let phi = Form::theta(b2, 1, MultiIndex::empty()).scalar_mul(&w);
        let (sigma, xi, base) = ker_dhdv_decompose(&phi, &SolveBounds::new(1, 3)).unwrap();
        assert!(d_h(&sigma).is_zero());
        assert!(d_v(&xi).is_zero());
        assert!(base.is_zero());
        assert_eq!(&(&sigma + &xi) + &base, phi);

        // a basic scalar passes through untouched
        let x2 = ScalarExpr::base_var(b(), 1).pow(2);
        let phi = Form::from_scalar(x2.clone());
        let (sigma, xi, base) = ker_dhdv_decompose(&phi, &SolveBounds::new(1, 2)).unwrap();
        assert!(sigma.is_zero() && xi.is_zero());
        assert_eq!(base, Form::from_scalar(x2));

        // u1 dx + x dx at top degree on n = 1
        let phi = &Form::dx(b(), 1).scalar_mul(&u(&[1]))
            + &Form::dx(b(), 1).scalar_mul(&ScalarExpr::base_var(b(), 1));
        let (sigma, xi, base) = ker_dhdv_decompose(&phi, &SolveBounds::new(1, 3)).unwrap();
        assert!(d_h(&sigma).is_zero());
        assert!(d_v(&xi).is_zero());
        for (word, coef) in base.terms() {
            assert!(word.iter().all(Generator::is_dx));
            assert_eq!(coef.jet_order(), 0);
            assert!(coef.jet_vars().is_empty());
        }
        assert_eq!(&(&sigma + &xi) + &base, phi);

        // zero short-circuits
        let (s0, x0, b0) = ker_dhdv_decompose(&Form::zero(b()), &SolveBounds::new(1, 1)).unwrap();
        assert!(s0.is_zero() && x0.is_zero() && b0.is_zero());

        // precondition enforced: d_H d_V u != 0 on n = 2
        let bad = Form::from_scalar(w);
        assert!(matches!(
            ker_dhdv_decompose(&bad, &SolveBounds::new(1, 1)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn theorem_order_bound_roundtrip() {
        // sigma of order 1 gives L of order <= 2, recovered at max order 1
        let sigma0 = Form::from_scalar(&(&u(&[]) * &u(&[1])) + &ScalarExpr::base_var(b(), 1));
        let phi = d_h(&sigma0);
        assert!(!phi.is_zero());
        let r = phi.jet_order();
        let sigma = dh_potential(&phi, &SolveBounds::new(r.saturating_sub(1), 4)).unwrap();
        assert_eq!(d_h(&sigma), phi);
        assert!(sigma.jet_order() <= r.saturating_sub(1));
    }
}
