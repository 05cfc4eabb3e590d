//! Fourier modes of composite states, and the distinguished operators built
//! from them: the differential `Q`, its homotopy `G_0`, and the `sl(2)` zero
//! modes.
//!
//! A state `u = x_{-j} y` has modes `u_n = Σ_i C(-i-Δ_x, j-Δ_x) :x_i y_{n-i}:`,
//! the normally ordered product rule generalized to derivative fields. The
//! recursion bottoms out at Laurent monomials `b^m`, whose field is expanded
//! binomially around the invertible zero mode `b_0`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::gamma::{eta, koszul, GenMode, Kind};
use crate::linalg::{int, solve_affine, Scalar, SparseVector};
use crate::module::{
    act, enumerate_basis, l_zero, realized_fermions, BaseMonomial, LaurentForm, TermIndex, TriDegree, VElement,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("state is not homogeneous in conformal weight: {0}")]
    Unsupported(String),
    #[error("operator coefficients known only up to weight {known}, vector has weight {needed}")]
    OutOfRange { known: i64, needed: i64 },
    #[error("no solution for {0}")]
    NoSolution(&'static str),
}

/// A state whose field is applied through its modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeState {
    element: VElement,
    weight: i64,
}

impl CompositeState {
    pub fn new(element: VElement) -> Result<Self, FieldError> {
        let weight = element.max_weight().unwrap_or(0);
        if !element.homogeneous(|t| t.weight()) {
            return Err(FieldError::Unsupported(element.to_string()));
        }
        Ok(Self { element, weight })
    }

    /// The state of a generating field: `b`, `a_{-1}·1`, `db`, `psi_{-1}·1`.
    pub fn generator(kind: Kind) -> Self {
        let element = match kind {
            Kind::B => VElement::base(BaseMonomial::function(1)),
            Kind::A => VElement::monomial(&[GenMode::a(-1)], BaseMonomial::function(0)),
            Kind::Phi => VElement::base(BaseMonomial::form(0)),
            Kind::Psi => VElement::monomial(&[GenMode::psi(-1)], BaseMonomial::function(0)),
        };
        Self::new(element).expect("generator states are homogeneous")
    }

    pub fn element(&self) -> &VElement {
        &self.element
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        Self { element: self.element.scaled(c), weight: self.weight }
    }

    pub fn plus(&self, other: &Self) -> Result<Self, FieldError> {
        Self::new(self.element.plus(&other.element))
    }
}

/// Generalized binomial coefficient `C(top, k)` for integer `top`, `k ≥ 0`.
pub fn binomial(top: i64, k: i64) -> Scalar {
    let mut num = Scalar::one();
    for t in 0..k {
        num *= int(top - t);
    }
    num / factorial(k)
}

fn factorial(k: i64) -> Scalar {
    (1..=k).fold(Scalar::one(), |acc, t| acc * int(t))
}

/// Integer partitions of `s` as weakly decreasing part lists.
fn partitions(s: i64) -> Vec<Vec<i64>> {
    fn rec(left: i64, max: i64, acc: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if left == 0 {
            out.push(acc.clone());
            return;
        }
        for part in (1..=left.min(max)).rev() {
            acc.push(part);
            rec(left - part, part, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if s >= 0 {
        rec(s, s, &mut Vec::new(), &mut out);
    }
    out
}

/// `∏ mult!` over the repeated parts of a partition.
fn multiplicity_factor(parts: &[i64]) -> Scalar {
    let mut counts: BTreeMap<i64, i64> = BTreeMap::new();
    for &p in parts {
        *counts.entry(p).or_default() += 1;
    }
    counts.values().fold(Scalar::one(), |acc, &c| acc * factorial(c))
}

/// Mode `n` of `b^m` on a vector of homogeneous weight `w`:
/// `Σ_k C(m, k) b_0^{m-k} [ΔB^k]_n` with `ΔB` the nonzero modes of `b`.
fn laurent_monomial_mode(m: i64, n: i64, v: &VElement, w: i64) -> VElement {
    let mut out = VElement::zero();
    for s in 0..=w {
        let created = s - n;
        if created < 0 {
            continue;
        }
        for lowering in partitions(s) {
            let mut t = v.clone();
            for &p in &lowering {
                t = act(GenMode::b(p), &t);
                if t.is_zero() {
                    break;
                }
            }
            if t.is_zero() {
                continue;
            }
            for raising in partitions(created) {
                let k = (lowering.len() + raising.len()) as i64;
                let coef = binomial(m, k) * factorial(k)
                    / (multiplicity_factor(&lowering) * multiplicity_factor(&raising));
                if coef.is_zero() {
                    continue;
                }
                let mut u = t.clone();
                for &q in &raising {
                    u = act(GenMode::b(-q), &u);
                }
                out.add_scaled(&coef, &u.base_power(m - k));
            }
        }
    }
    out
}

/// One step of the normally ordered product rule for `x_{-Δ-k} y`.
fn peel<F>(kind: Kind, k: i64, y_odd: bool, n: i64, v: &VElement, w: i64, y_mode: F) -> VElement
where
    F: Fn(i64, &VElement, i64) -> VElement,
{
    let delta = kind.field_weight();
    let sign = koszul(kind.is_odd(), y_odd);
    let mut out = VElement::zero();
    for i in (1 - delta)..=w {
        let coef = binomial(-i - delta, k);
        if coef.is_zero() {
            continue;
        }
        let t = act(GenMode::new(kind, i), v);
        if t.is_zero() {
            continue;
        }
        out.add_scaled(&(coef * &sign), &y_mode(n - i, &t, w - i));
    }
    for i in (n - w)..=(-delta) {
        let coef = binomial(-i - delta, k);
        if coef.is_zero() {
            continue;
        }
        let t = y_mode(n - i, v, w);
        if t.is_zero() {
            continue;
        }
        out.add_scaled(&coef, &act(GenMode::new(kind, i), &t));
    }
    out
}

fn monomial_mode(factors: &[GenMode], base: BaseMonomial, n: i64, v: &VElement, w: i64) -> VElement {
    if w - n < 0 {
        return VElement::zero();
    }
    match factors.split_first() {
        Some((x, rest)) => {
            let y_odd = (rest.iter().filter(|g| g.is_odd()).count() + base.form as usize) % 2 == 1;
            let k = -x.mode - x.kind.field_weight();
            peel(x.kind, k, y_odd, n, v, w, |m, t, wt| monomial_mode(rest, base, m, t, wt))
        }
        None if base.form => {
            // b^m db = phi_0 b^m
            let fun = BaseMonomial::function(base.exp);
            peel(Kind::Phi, 0, false, n, v, w, |m, t, wt| monomial_mode(&[], fun, m, t, wt))
        }
        None => laurent_monomial_mode(base.exp, n, v, w),
    }
}

/// The mode `u_n` (shifting conformal weight by `-n`) applied to `v`.
pub fn mode_apply(u: &CompositeState, n: i64, v: &VElement) -> VElement {
    let mut out = VElement::zero();
    let pieces = v.by_weight();
    for (term, c) in u.element().iter() {
        for (&w, comp) in &pieces {
            out.add_scaled(c, &monomial_mode(term.mono.factors(), term.base, n, comp, w));
        }
    }
    out
}

/// Mode `n` of the field of `f(b)` (times `db` when `form`) applied to `v`.
pub fn expand_laurent_field(f: &BTreeMap<i64, Scalar>, form: bool, n: i64, v: &VElement) -> VElement {
    let mut state = VElement::zero();
    for (&m, c) in f {
        state.add_term(crate::module::Term::base(BaseMonomial { exp: m, form }), c.clone());
    }
    mode_apply(&CompositeState::new(state).expect("weight-zero states are homogeneous"), n, v)
}

/// A Fourier mode of a composite state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeOperator {
    pub state: CompositeState,
    pub mode: i64,
}

impl ModeOperator {
    pub fn new(state: CompositeState, mode: i64) -> Self {
        Self { state, mode }
    }

    pub fn apply(&self, v: &VElement) -> VElement {
        mode_apply(&self.state, self.mode, v)
    }

    pub fn is_odd(&self) -> bool {
        self.state.element().iter().next().map(|(t, _)| t.is_odd()).unwrap_or(false)
    }

    /// Expansion into words of generator modes, complete on vectors of weight
    /// at most `bound`.
    pub fn words(&self, bound: i64) -> OperatorWords {
        let mut out = OperatorWords::default();
        for (term, c) in self.state.element().iter() {
            out.add_scaled(c, &monomial_words(term.mono.factors(), term.base, self.mode, bound));
        }
        out
    }
}

/// A letter of an operator word: a loop mode or a power of the invertible `b_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Gen(GenMode),
    BasePow(i64),
}

impl Letter {
    fn is_odd(&self) -> bool {
        matches!(self, Letter::Gen(g) if g.is_odd())
    }

    fn apply(&self, v: &VElement) -> VElement {
        match self {
            Letter::Gen(g) => act(*g, v),
            Letter::BasePow(k) => v.base_power(*k),
        }
    }
}

/// A linear combination of words; each word acts right to left.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OperatorWords {
    words: BTreeMap<Vec<Letter>, Scalar>,
}

impl OperatorWords {
    fn single(letters: Vec<Letter>, c: Scalar) -> Self {
        let mut out = Self::default();
        out.add(letters, c);
        out
    }

    fn add(&mut self, letters: Vec<Letter>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.words.entry(letters.clone()).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.words.remove(&letters);
        }
    }

    fn add_scaled(&mut self, factor: &Scalar, other: &OperatorWords) {
        for (w, c) in &other.words {
            self.add(w.clone(), factor * c);
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn apply(&self, v: &VElement) -> VElement {
        let mut out = VElement::zero();
        for (letters, c) in &self.words {
            let mut t = v.clone();
            for l in letters.iter().rev() {
                t = l.apply(&t);
                if t.is_zero() {
                    break;
                }
            }
            out.add_scaled(c, &t);
        }
        out
    }

    /// Image under the antiinvolution: each word reversed, letters mapped by
    /// `eta`, with the Koszul sign of reversing its odd letters.
    pub fn eta(&self) -> OperatorWords {
        let mut out = OperatorWords::default();
        for (letters, c) in &self.words {
            let mut coef = c.clone();
            let odd = letters.iter().filter(|l| l.is_odd()).count();
            if (odd * odd.saturating_sub(1) / 2) % 2 == 1 {
                coef = -coef;
            }
            let reversed: Vec<Letter> = letters
                .iter()
                .rev()
                .map(|l| match l {
                    Letter::Gen(g) => {
                        let e = eta(*g);
                        if e.sign < 0 {
                            coef = -coef.clone();
                        }
                        Letter::Gen(e.gen)
                    }
                    other => *other,
                })
                .collect();
            out.add(reversed, coef);
        }
        out
    }
}

fn peel_words<F>(kind: Kind, k: i64, y_odd: bool, n: i64, bound: i64, y_words: F) -> OperatorWords
where
    F: Fn(i64, i64) -> OperatorWords,
{
    let delta = kind.field_weight();
    let sign = koszul(kind.is_odd(), y_odd);
    let mut out = OperatorWords::default();
    for i in (1 - delta)..=bound {
        let coef = binomial(-i - delta, k);
        if coef.is_zero() {
            continue;
        }
        for (w, c) in y_words(n - i, bound - i).words {
            let mut letters = w;
            letters.push(Letter::Gen(GenMode::new(kind, i)));
            out.add(letters, &coef * &sign * c);
        }
    }
    for i in (n - bound)..=(-delta) {
        let coef = binomial(-i - delta, k);
        if coef.is_zero() {
            continue;
        }
        for (w, c) in y_words(n - i, bound).words {
            let mut letters = vec![Letter::Gen(GenMode::new(kind, i))];
            letters.extend(w);
            out.add(letters, &coef * c);
        }
    }
    out
}

fn monomial_words(factors: &[GenMode], base: BaseMonomial, n: i64, bound: i64) -> OperatorWords {
    if bound < 0 || n > bound {
        return OperatorWords::default();
    }
    match factors.split_first() {
        Some((x, rest)) => {
            let y_odd = (rest.iter().filter(|g| g.is_odd()).count() + base.form as usize) % 2 == 1;
            let k = -x.mode - x.kind.field_weight();
            peel_words(x.kind, k, y_odd, n, bound, |m, b| monomial_words(rest, base, m, b))
        }
        None if base.form => {
            let fun = BaseMonomial::function(base.exp);
            peel_words(Kind::Phi, 0, false, n, bound, |m, b| monomial_words(&[], fun, m, b))
        }
        None => {
            let m = base.exp;
            let mut out = OperatorWords::default();
            for s in 0..=bound {
                let created = s - n;
                if created < 0 {
                    continue;
                }
                for lowering in partitions(s) {
                    for raising in partitions(created) {
                        let k = (lowering.len() + raising.len()) as i64;
                        let coef = binomial(m, k) * factorial(k)
                            / (multiplicity_factor(&lowering) * multiplicity_factor(&raising));
                        if coef.is_zero() {
                            continue;
                        }
                        let mut letters = Vec::new();
                        if m - k != 0 {
                            letters.push(Letter::BasePow(m - k));
                        }
                        letters.extend(raising.iter().map(|&q| Letter::Gen(GenMode::b(-q))));
                        letters.extend(lowering.iter().map(|&p| Letter::Gen(GenMode::b(p))));
                        out.add_scaled(&coef, &OperatorWords::single(letters, Scalar::one()));
                    }
                }
            }
            out
        }
    }
}

/// Supercommutator `[X, Y] v = X Y v - (-1)^{XY} Y X v` of two operators.
pub fn supercommutator<X, Y>(x: X, x_odd: bool, y: Y, y_odd: bool, v: &VElement) -> VElement
where
    X: Fn(&VElement) -> VElement,
    Y: Fn(&VElement) -> VElement,
{
    let xy = x(&y(v));
    let yx = y(&x(v));
    xy.minus(&yx.scaled(&koszul(x_odd, y_odd)))
}

fn weight_bound(v: &VElement) -> i64 {
    v.max_weight().unwrap_or(0)
}

/// The chiral de Rham differential `Q = Σ_j phi_{-j} a_j`.
pub fn q_diff(v: &VElement) -> VElement {
    let w = weight_bound(v);
    let mut out = VElement::zero();
    for j in -w..=w {
        let t = act(GenMode::a(j), v);
        if !t.is_zero() {
            out.add_assign(&act(GenMode::phi(-j), &t));
        }
    }
    out
}

/// `psi_{-j} b_j`, one summand of the homotopy.
fn g_summand(j: i64, v: &VElement) -> VElement {
    let t = act(GenMode::b(j), v);
    if t.is_zero() {
        t
    } else {
        act(GenMode::psi(-j), &t)
    }
}

/// Accumulates an affine system `Σ_k x_k col_k(v) = rhs(v)` over test vectors,
/// one block of equations per vector.
#[derive(Debug, Default)]
pub(crate) struct LinearSystem {
    columns: Vec<SparseVector>,
    rhs: SparseVector,
    next_row: usize,
}

impl LinearSystem {
    pub(crate) fn new(unknowns: usize) -> Self {
        Self { columns: vec![SparseVector::new(); unknowns], rhs: SparseVector::new(), next_row: 0 }
    }

    pub(crate) fn add_block(&mut self, cols: &[VElement], rhs: &VElement) {
        let mut index = TermIndex::new();
        let coords: Vec<SparseVector> = cols.iter().map(|c| index.coords(c)).collect();
        let r = index.coords(rhs);
        for (col, c) in self.columns.iter_mut().zip(&coords) {
            col.add_scaled(&Scalar::one(), &c.shifted(self.next_row));
        }
        self.rhs.add_scaled(&Scalar::one(), &r.shifted(self.next_row));
        self.next_row += index.len();
    }

    pub(crate) fn solve(&self) -> Option<(Vec<Scalar>, usize)> {
        solve_affine(&self.columns, &self.rhs).map(|s| (s.particular, s.nullity))
    }
}

/// Every basis vector of weight ≤ `max_weight` with degree in `degrees`.
pub fn test_vectors(max_weight: i64, degrees: std::ops::RangeInclusive<i64>) -> Vec<VElement> {
    let mut out = Vec::new();
    for w in 0..=max_weight {
        for p in realized_fermions(w) {
            for d in degrees.clone() {
                out.extend(enumerate_basis(TriDegree::new(w, p, d)).into_iter().map(VElement::term));
            }
        }
    }
    out
}

/// The homotopy `G_0 = Σ_j c_j psi_{-j} b_j`, with `c_j` solved from
/// `Q G_0 + G_0 Q = L_0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homotopy {
    coefficients: BTreeMap<i64, Scalar>,
    range: i64,
    /// Dimension of the space of coefficient vectors satisfying the identity.
    pub nullity: usize,
}

impl Homotopy {
    /// Solves for `c_j`, `|j| ≤ max_weight`, on every basis vector of weight
    /// ≤ `max_weight` with degree in `degrees`. Unknowns the identity does not
    /// constrain are set to zero and counted in `nullity`.
    pub fn solve(max_weight: i64, degrees: std::ops::RangeInclusive<i64>) -> Result<Self, FieldError> {
        let js: Vec<i64> = (-max_weight..=max_weight).collect();
        let mut system = LinearSystem::new(js.len());
        for v in test_vectors(max_weight, degrees) {
            let qv = q_diff(&v);
            let cols: Vec<VElement> =
                js.iter().map(|&j| q_diff(&g_summand(j, &v)).plus(&g_summand(j, &qv))).collect();
            system.add_block(&cols, &l_zero(&v));
        }
        let (sol, nullity) = system.solve().ok_or(FieldError::NoSolution("Q G0 + G0 Q = L0"))?;
        let coefficients = js.iter().copied().zip(sol).filter(|(_, c)| !c.is_zero()).collect();
        Ok(Self { coefficients, range: max_weight, nullity })
    }

    pub fn coefficient(&self, j: i64) -> Scalar {
        self.coefficients.get(&j).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coefficients(&self) -> &BTreeMap<i64, Scalar> {
        &self.coefficients
    }

    pub fn max_weight(&self) -> i64 {
        self.range
    }

    pub fn apply(&self, v: &VElement) -> Result<VElement, FieldError> {
        let w = weight_bound(v);
        if w > self.range {
            return Err(FieldError::OutOfRange { known: self.range, needed: w });
        }
        let mut out = VElement::zero();
        for (&j, c) in &self.coefficients {
            out.add_scaled(c, &g_summand(j, v));
        }
        Ok(out)
    }
}

/// Lie derivative of a Laurent form along the vector field `g(b) d/db`.
pub fn lie_derivative(g: &BTreeMap<i64, Scalar>, form: &LaurentForm) -> LaurentForm {
    let mut out = LaurentForm::default();
    for (&k, gc) in g {
        for (&m, c) in &form.fun_part {
            out.add(BaseMonomial::function(k + m - 1), gc * c * int(m));
        }
        for (&m, c) in &form.form_part {
            out.add(BaseMonomial::form(k + m - 1), gc * c * int(m + k));
        }
    }
    out
}

/// Zero modes of the chiral lifts of `d/db`, `-2b d/db`, `-b^2 d/db`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sl2Modes {
    pub e: ModeOperator,
    pub h: ModeOperator,
    pub f: ModeOperator,
    /// `h = α (a_{-1} b) + β (psi_{-1} db)`, `f = γ (a_{-1} b^2) + δ (psi_{-1} b db)`.
    pub coefficients: [Scalar; 4],
    pub nullity: usize,
}

fn state(factors: &[GenMode], base: BaseMonomial) -> CompositeState {
    CompositeState::new(VElement::monomial(factors, base)).expect("monomial states are homogeneous")
}

fn classical(g: &[(i64, i64)], v: &VElement) -> VElement {
    let field: BTreeMap<i64, Scalar> = g.iter().map(|&(k, c)| (k, int(c))).collect();
    lie_derivative(&field, &v.laurent_part()).to_element()
}

impl Sl2Modes {
    /// Solves the fermionic-correction coefficients from `[h, e] = 2e`,
    /// `[e, f] = h` and the classical weight-zero actions, on test vectors of
    /// weight ≤ `max_weight`.
    pub fn derive(max_weight: i64, degrees: std::ops::RangeInclusive<i64>) -> Result<Self, FieldError> {
        let e = ModeOperator::new(CompositeState::generator(Kind::A), 0);
        let h_parts = [
            ModeOperator::new(state(&[GenMode::a(-1)], BaseMonomial::function(1)), 0),
            ModeOperator::new(state(&[GenMode::psi(-1)], BaseMonomial::form(0)), 0),
        ];
        let f_parts = [
            ModeOperator::new(state(&[GenMode::a(-1)], BaseMonomial::function(2)), 0),
            ModeOperator::new(state(&[GenMode::psi(-1)], BaseMonomial::form(1)), 0),
        ];
        let mut system = LinearSystem::new(4);
        let zero = VElement::zero();
        for v in test_vectors(max_weight, degrees) {
            let ev = e.apply(&v);
            // [h, e] = 2 e
            let he: Vec<VElement> = h_parts
                .iter()
                .map(|h| supercommutator(|x| h.apply(x), false, |x| e.apply(x), false, &v))
                .collect();
            system.add_block(&[he[0].clone(), he[1].clone(), zero.clone(), zero.clone()], &ev.scaled(&int(2)));
            // [e, f] - h = 0
            let ef: Vec<VElement> = f_parts
                .iter()
                .map(|f| supercommutator(|x| e.apply(x), false, |x| f.apply(x), false, &v))
                .collect();
            let cols = [
                h_parts[0].apply(&v).scaled(&int(-1)),
                h_parts[1].apply(&v).scaled(&int(-1)),
                ef[0].clone(),
                ef[1].clone(),
            ];
            system.add_block(&cols, &zero);
            if v.max_weight() == Some(0) {
                let cols = [h_parts[0].apply(&v), h_parts[1].apply(&v), zero.clone(), zero.clone()];
                system.add_block(&cols, &classical(&[(1, -2)], &v));
                let cols = [zero.clone(), zero.clone(), f_parts[0].apply(&v), f_parts[1].apply(&v)];
                system.add_block(&cols, &classical(&[(2, -1)], &v));
            }
        }
        let (sol, nullity) = system.solve().ok_or(FieldError::NoSolution("sl(2) zero modes"))?;
        let combine = |parts: &[ModeOperator; 2], c0: &Scalar, c1: &Scalar| {
            let st = parts[0].state.scaled(c0).plus(&parts[1].state.scaled(c1)).expect("same weight");
            ModeOperator::new(st, 0)
        };
        let h = combine(&h_parts, &sol[0], &sol[1]);
        let f = combine(&f_parts, &sol[2], &sol[3]);
        let coefficients = [sol[0].clone(), sol[1].clone(), sol[2].clone(), sol[3].clone()];
        Ok(Self { e, h, f, coefficients, nullity })
    }

    pub fn operators(&self) -> [(&'static str, &ModeOperator); 3] {
        [("e0", &self.e), ("h0", &self.h), ("f0", &self.f)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::Term;

    fn base(exp: i64) -> VElement {
        VElement::base(BaseMonomial::function(exp))
    }

    fn sample(max_weight: i64) -> Vec<VElement> {
        test_vectors(max_weight, -2..=2)
    }

    #[test]
    fn generator_states_reproduce_generator_modes() {
        for kind in Kind::ALL {
            let u = CompositeState::generator(kind);
            for v in sample(2) {
                for n in -2..=2 {
                    assert_eq!(mode_apply(&u, n, &v), act(GenMode::new(kind, n), &v), "{kind:?} {n} {v}");
                }
            }
        }
    }

    #[test]
    fn vacuum_is_the_identity_field() {
        let one = CompositeState::new(base(0)).unwrap();
        for v in sample(2) {
            assert_eq!(mode_apply(&one, 0, &v), v);
            assert!(mode_apply(&one, 1, &v).is_zero());
            assert!(mode_apply(&one, -1, &v).is_zero());
        }
    }

    #[test]
    fn weight_zero_fields_multiply_functions() {
        let sq = CompositeState::new(base(2)).unwrap();
        assert_eq!(mode_apply(&sq, 0, &base(3)), base(5));
        let inv: BTreeMap<i64, Scalar> = [(-1, int(1))].into();
        assert_eq!(expand_laurent_field(&inv, false, 0, &base(3)), base(2));
        let one: BTreeMap<i64, Scalar> = [(0, int(1))].into();
        assert_eq!(expand_laurent_field(&one, true, 0, &base(2)), VElement::base(BaseMonomial::form(2)));
    }

    #[test]
    fn inverse_field_inverts_b() {
        // :b(z) b(z)^{-1}: = 1, i.e. Σ_i b_i (b^{-1})_{-i} = identity on every vector.
        let inv = CompositeState::new(base(-1)).unwrap();
        for v in sample(3) {
            let w = v.max_weight().unwrap();
            let mut total = VElement::zero();
            for i in -w..=w {
                total.add_assign(&act(GenMode::b(i), &mode_apply(&inv, -i, &v)));
            }
            assert_eq!(total, v);
        }
    }

    /// Independent check of locality: the commutator formula
    /// `[x_m, u_n] = Σ_{j≥0} C(m+Δ_x-1, j) (x_(j) u)_{m+n}`.
    #[test]
    fn commutator_formula_for_composite_states() {
        let states = [
            base(-1),
            base(-2),
            base(3),
            VElement::base(BaseMonomial::form(-2)),
            VElement::monomial(&[GenMode::a(-1)], BaseMonomial::function(2)),
            VElement::monomial(&[GenMode::psi(-1)], BaseMonomial::form(1)),
            VElement::monomial(&[GenMode::b(-1)], BaseMonomial::function(-1)),
            VElement::monomial(&[GenMode::a(-2)], BaseMonomial::function(0)),
            VElement::monomial(&[GenMode::phi(-1), GenMode::psi(-1)], BaseMonomial::function(1)),
        ];
        let vectors = sample(2);
        for s in states {
            let u = CompositeState::new(s.clone()).unwrap();
            let u_odd = s.iter().next().unwrap().0.is_odd();
            for kind in Kind::ALL {
                let delta = kind.field_weight();
                // x_(j) u = x_{j - Δ + 1} u for j ≥ 0, nonzero only while the weight stays ≥ 0.
                let products: Vec<(i64, CompositeState)> = (0..=(u.weight() + delta))
                    .filter_map(|j| {
                        let p = act(GenMode::new(kind, j - delta + 1), &s);
                        (!p.is_zero()).then(|| (j, CompositeState::new(p).unwrap()))
                    })
                    .collect();
                for m in -2..=2 {
                    for n in -2..=2 {
                        for v in &vectors {
                            let lhs = supercommutator(
                                |t| act(GenMode::new(kind, m), t),
                                kind.is_odd(),
                                |t| mode_apply(&u, n, t),
                                u_odd,
                                v,
                            );
                            let mut rhs = VElement::zero();
                            for (j, p) in &products {
                                rhs.add_scaled(&binomial(m + delta - 1, *j), &mode_apply(p, m + n, v));
                            }
                            assert_eq!(lhs, rhs, "x={kind:?} m={m} u={s} n={n} v={v}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn normally_ordered_product_of_generators() {
        for x in Kind::ALL {
            for y in Kind::ALL {
                let dx = x.field_weight();
                let ys = CompositeState::generator(y);
                let composite = act(GenMode::new(x, -dx), ys.element());
                if composite.is_zero() {
                    continue;
                }
                let u = CompositeState::new(composite).unwrap();
                for v in sample(2) {
                    let w = v.max_weight().unwrap();
                    for n in -2..=2 {
                        let mut rhs = VElement::zero();
                        for i in (n - w - 2)..=(w + 2) {
                            let xi = GenMode::new(x, i);
                            let yj = GenMode::new(y, n - i);
                            let term = if xi.is_field_annihilator() {
                                act(yj, &act(xi, &v)).scaled(&koszul(x.is_odd(), y.is_odd()))
                            } else {
                                act(xi, &act(yj, &v))
                            };
                            rhs.add_assign(&term);
                        }
                        assert_eq!(mode_apply(&u, n, &v), rhs, "{x:?} {y:?} {n} {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn word_expansion_agrees_with_recursion() {
        let states = [
            base(-1),
            VElement::monomial(&[GenMode::a(-1)], BaseMonomial::function(2)),
            VElement::monomial(&[GenMode::psi(-1)], BaseMonomial::form(1)),
            VElement::monomial(&[GenMode::b(-2)], BaseMonomial::form(-1)),
        ];
        for s in states {
            let u = CompositeState::new(s).unwrap();
            for n in -1..=1 {
                let op = ModeOperator::new(u.clone(), n);
                let words = op.words(2);
                for v in sample(2) {
                    assert_eq!(words.apply(&v), op.apply(&v));
                }
            }
        }
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_diff(&base(3)), VElement::base(BaseMonomial::form(2)).scaled(&int(3)));
        assert!(q_diff(&VElement::base(BaseMonomial::form(0))).is_zero());
        for v in sample(3) {
            assert!(q_diff(&q_diff(&v)).is_zero(), "{v}");
        }
    }

    #[test]
    fn homotopy_is_solved_uniquely() {
        let g = Homotopy::solve(2, -2..=2).unwrap();
        assert_eq!(g.nullity, 0);
        for j in -2..=2 {
            assert_eq!(g.coefficient(j), int(-j));
        }
        for v in sample(2) {
            let gv = g.apply(&v).unwrap();
            let lhs = q_diff(&gv).plus(&g.apply(&q_diff(&v)).unwrap());
            assert_eq!(lhs, l_zero(&v));
            assert!(g.apply(&gv).unwrap().is_zero());
            if v.max_weight() == Some(0) {
                assert!(gv.is_zero());
            }
        }
        assert!(matches!(
            g.apply(&VElement::monomial(&[GenMode::a(-3)], BaseMonomial::function(0))),
            Err(FieldError::OutOfRange { .. })
        ));
    }

    #[test]
    fn lie_derivative_matches_cartan_formula() {
        // L_v = d ι_v + ι_v d on Laurent forms, with ι_v(g db) = v g.
        let field: BTreeMap<i64, Scalar> = [(2, int(-1)), (0, int(3))].into();
        for m in -3..=3 {
            for form in [false, true] {
                let omega = LaurentForm::monomial(BaseMonomial { exp: m, form }, int(1));
                let d = |f: &LaurentForm| {
                    let mut out = LaurentForm::default();
                    for (&k, c) in &f.fun_part {
                        out.add(BaseMonomial::form(k - 1), c * int(k));
                    }
                    out
                };
                let iota = |f: &LaurentForm| {
                    let mut out = LaurentForm::default();
                    for (&k, c) in &f.form_part {
                        for (&j, g) in &field {
                            out.add(BaseMonomial::function(k + j), c * g);
                        }
                    }
                    out
                };
                let mut cartan = d(&iota(&omega));
                let idw = iota(&d(&omega));
                for (&k, c) in &idw.fun_part {
                    cartan.add(BaseMonomial::function(k), c.clone());
                }
                assert_eq!(lie_derivative(&field, &omega), cartan, "m={m} form={form}");
            }
        }
    }

    #[test]
    fn sl2_relations() {
        let sl2 = Sl2Modes::derive(2, -2..=2).unwrap();
        assert_eq!(sl2.nullity, 0);
        let e3 = |v: &VElement| sl2.e.apply(v);
        assert_eq!(e3(&base(3)), base(2).scaled(&int(3)));
        for v in sample(2) {
            let ef = supercommutator(|x| sl2.e.apply(x), false, |x| sl2.f.apply(x), false, &v);
            assert_eq!(ef, sl2.h.apply(&v));
            let he = supercommutator(|x| sl2.h.apply(x), false, |x| sl2.e.apply(x), false, &v);
            assert_eq!(he, sl2.e.apply(&v).scaled(&int(2)));
            let hf = supercommutator(|x| sl2.h.apply(x), false, |x| sl2.f.apply(x), false, &v);
            assert_eq!(hf, sl2.f.apply(&v).scaled(&int(-2)));
        }
        // on functions f0 is -b^2 d/db
        for m in -3..=3 {
            let expected = base(m + 1).scaled(&int(-m));
            assert_eq!(sl2.f.apply(&base(m)), expected);
        }
        let _ = Term::base(BaseMonomial::function(0));
    }
}
