//! The induced module of sections of the chiral de Rham complex over the
//! punctured line.
//!
//! As a vector space it is the free supercommutative algebra on the creation
//! modes `x_{-j}`, `j > 0`, tensored with Laurent forms `b^m` and `b^m db`.
//! Vectors are stored in PBW normal form: a sorted [`CreationMonomial`] and a
//! [`BaseMonomial`] per term.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::gamma::{koszul, super_bracket, GenMode, Kind};
use crate::linalg::{int, kernel, row_reduce, Scalar, SparseVector, SubspaceBasis};

/// Sorted product of creation modes. Odd kinds appear at most once per mode.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CreationMonomial(Vec<GenMode>);

impl CreationMonomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    /// Builds the normal form of the product of `factors` taken left to right,
    /// returning the reordering sign, or `None` if an odd factor repeats.
    pub fn from_factors(factors: &[GenMode]) -> Option<(Scalar, Self)> {
        let mut mono = Self::one();
        let mut sign = Scalar::one();
        for &g in factors.iter().rev() {
            let (s, m) = mono.insert(g)?;
            sign *= s;
            mono = m;
        }
        Some((sign, mono))
    }

    pub fn factors(&self) -> &[GenMode] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> i64 {
        self.0.iter().map(|g| -g.mode).sum()
    }

    pub fn degree(&self) -> i64 {
        -self.weight()
    }

    pub fn fermion(&self) -> i64 {
        self.0.iter().map(|g| g.kind.fermion()).sum()
    }

    pub fn charge(&self) -> i64 {
        self.0.iter().map(|g| g.kind.charge()).sum()
    }

    pub fn odd_count(&self) -> usize {
        self.0.iter().filter(|g| g.is_odd()).count()
    }

    pub fn is_odd(&self) -> bool {
        self.odd_count() % 2 == 1
    }

    /// Left multiplication by a creation mode `g`.
    pub fn insert(&self, g: GenMode) -> Option<(Scalar, Self)> {
        debug_assert!(g.is_creation());
        let pos = self.0.partition_point(|f| *f < g);
        if g.is_odd() && self.0.get(pos) == Some(&g) {
            return None;
        }
        let passed = self.0[..pos].iter().filter(|f| f.is_odd()).count();
        let sign = if g.is_odd() && passed % 2 == 1 { -Scalar::one() } else { Scalar::one() };
        let mut factors = self.0.clone();
        factors.insert(pos, g);
        Some((sign, Self(factors)))
    }

    /// Splits off the leftmost factor.
    pub fn split_first(&self) -> Option<(GenMode, Self)> {
        self.0.split_first().map(|(g, rest)| (*g, Self(rest.to_vec())))
    }

    fn remove_at(&self, idx: usize) -> Self {
        let mut factors = self.0.clone();
        factors.remove(idx);
        Self(factors)
    }
}

/// `b^exp` or `b^exp db`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BaseMonomial {
    pub exp: i64,
    pub form: bool,
}

impl BaseMonomial {
    pub const fn function(exp: i64) -> Self {
        Self { exp, form: false }
    }
    pub const fn form(exp: i64) -> Self {
        Self { exp, form: true }
    }
    pub fn fermion(&self) -> i64 {
        self.form as i64
    }
    pub fn charge(&self) -> i64 {
        self.exp + self.form as i64
    }
}

/// A PBW basis vector: creation monomial applied to a base monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub mono: CreationMonomial,
    pub base: BaseMonomial,
}

impl Term {
    pub fn new(mono: CreationMonomial, base: BaseMonomial) -> Self {
        Self { mono, base }
    }

    pub fn base(base: BaseMonomial) -> Self {
        Self { mono: CreationMonomial::one(), base }
    }

    pub fn weight(&self) -> i64 {
        self.mono.weight()
    }
    pub fn fermion(&self) -> i64 {
        self.mono.fermion() + self.base.fermion()
    }
    pub fn degree(&self) -> i64 {
        self.mono.degree() + self.base.exp
    }
    pub fn charge(&self) -> i64 {
        self.mono.charge() + self.base.charge()
    }
    pub fn is_odd(&self) -> bool {
        self.fermion().rem_euclid(2) == 1
    }
    pub fn tri_degree(&self) -> TriDegree {
        TriDegree::new(self.weight(), self.fermion(), self.degree())
    }
    pub fn charge_degree(&self) -> ChargeDegree {
        ChargeDegree::new(self.weight(), self.fermion(), self.charge())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in self.mono.factors() {
            write!(f, "{g} ")?;
        }
        if !self.mono.is_empty() {
            write!(f, ". ")?;
        }
        let BaseMonomial { exp, form } = self.base;
        match (exp, form) {
            (0, false) => write!(f, "1"),
            (0, true) => write!(f, "db"),
            (1, false) => write!(f, "b"),
            (1, true) => write!(f, "b db"),
            (m, false) => write!(f, "b^{m}"),
            (m, true) => write!(f, "b^{m} db"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTermError(pub String);

impl fmt::Display for ParseTermError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse term: {}", self.0)
    }
}

impl std::error::Error for ParseTermError {}

impl FromStr for Term {
    type Err = ParseTermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseTermError(s.to_string());
        let (mono_part, base_part) = match s.split_once(" . ") {
            Some((m, b)) => (Some(m), b),
            None => (None, s),
        };
        let mut factors = Vec::new();
        if let Some(m) = mono_part {
            for tok in m.split_whitespace() {
                let (sym, rest) = tok.split_once('(').ok_or_else(err)?;
                let kind = Kind::from_symbol(sym).ok_or_else(err)?;
                let mode: i64 = rest.strip_suffix(')').ok_or_else(err)?.parse().map_err(|_| err())?;
                if mode >= 0 {
                    return Err(err());
                }
                factors.push(GenMode::new(kind, mode));
            }
            if factors.is_empty() {
                return Err(err());
            }
        }
        let mut sorted = factors.clone();
        sorted.sort();
        let (sign, mono) = CreationMonomial::from_factors(&factors).ok_or_else(err)?;
        if sorted != factors || sign != Scalar::one() {
            return Err(err());
        }
        let (fun, form) = match base_part.strip_suffix("db") {
            Some(rest) => (rest.trim_end(), true),
            None => (base_part, false),
        };
        let exp = match fun {
            "" if form => 0,
            "1" if !form => 0,
            "b" => 1,
            other => other.strip_prefix("b^").ok_or_else(err)?.parse().map_err(|_| err())?,
        };
        if (exp == 0 && fun.starts_with("b^")) || (exp == 1 && fun != "b") {
            return Err(err());
        }
        Ok(Term::new(mono, BaseMonomial { exp, form }))
    }
}

/// `(conformal weight, fermionic number, degree)`; `deg b_0 = 1`, `deg a_0 = -1`,
/// `deg x_n = n` otherwise, so a term's degree is `exp - weight`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TriDegree {
    pub weight: i64,
    pub fermion: i64,
    pub degree: i64,
}

impl TriDegree {
    pub const fn new(weight: i64, fermion: i64, degree: i64) -> Self {
        Self { weight, fermion, degree }
    }
}

/// `(conformal weight, fermionic number, charge)` where charge is the
/// eigenvalue of the Euler field `b d/db`. The chart involution reverses
/// charge, so chart subspaces are graded by it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChargeDegree {
    pub weight: i64,
    pub fermion: i64,
    pub charge: i64,
}

impl ChargeDegree {
    pub const fn new(weight: i64, fermion: i64, charge: i64) -> Self {
        Self { weight, fermion, charge }
    }
}

/// A finite-dimensional homogeneous piece of the module.
pub trait Piece: Copy + fmt::Debug {
    fn weight(&self) -> i64;
    fn fermion(&self) -> i64;
    /// The base exponent forced on terms with the given monomial and form bit.
    fn base_exponent(&self, mono: &CreationMonomial, form: bool) -> i64;
    fn contains(&self, term: &Term) -> bool;
}

impl Piece for TriDegree {
    fn weight(&self) -> i64 {
        self.weight
    }
    fn fermion(&self) -> i64 {
        self.fermion
    }
    fn base_exponent(&self, _mono: &CreationMonomial, _form: bool) -> i64 {
        self.degree + self.weight
    }
    fn contains(&self, term: &Term) -> bool {
        term.tri_degree() == *self
    }
}

impl Piece for ChargeDegree {
    fn weight(&self) -> i64 {
        self.weight
    }
    fn fermion(&self) -> i64 {
        self.fermion
    }
    fn base_exponent(&self, mono: &CreationMonomial, form: bool) -> i64 {
        self.charge - mono.charge() - form as i64
    }
    fn contains(&self, term: &Term) -> bool {
        term.charge_degree() == *self
    }
}

/// A Laurent differential form `Σ f_m b^m + Σ g_m b^m db`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LaurentForm {
    pub fun_part: BTreeMap<i64, Scalar>,
    pub form_part: BTreeMap<i64, Scalar>,
}

impl LaurentForm {
    pub fn monomial(base: BaseMonomial, c: Scalar) -> Self {
        let mut out = Self::default();
        out.add(base, c);
        out
    }

    pub fn add(&mut self, base: BaseMonomial, c: Scalar) {
        let part = if base.form { &mut self.form_part } else { &mut self.fun_part };
        let slot = part.entry(base.exp).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            part.remove(&base.exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.fun_part.is_empty() && self.form_part.is_empty()
    }

    pub fn to_element(&self) -> VElement {
        let mut v = VElement::zero();
        for (&m, c) in &self.fun_part {
            v.add_term(Term::base(BaseMonomial::function(m)), c.clone());
        }
        for (&m, c) in &self.form_part {
            v.add_term(Term::base(BaseMonomial::form(m)), c.clone());
        }
        v
    }
}

/// A finite linear combination of PBW terms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VElement {
    terms: BTreeMap<Term, Scalar>,
}

impl VElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(term: Term) -> Self {
        let mut v = Self::zero();
        v.add_term(term, Scalar::one());
        v
    }

    pub fn scaled_term(term: Term, c: Scalar) -> Self {
        let mut v = Self::zero();
        v.add_term(term, c);
        v
    }

    /// The weight-zero vector `b^m` or `b^m db`.
    pub fn base(base: BaseMonomial) -> Self {
        Self::term(Term::base(base))
    }

    /// Normal form of `factors · base`, the factors applied right to left.
    pub fn monomial(factors: &[GenMode], base: BaseMonomial) -> Self {
        let mut v = Self::base(base);
        for &g in factors.iter().rev() {
            v = act(g, &v);
        }
        v
    }

    pub fn add_term(&mut self, term: Term, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(term) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add_scaled(&mut self, factor: &Scalar, other: &VElement) {
        if factor.is_zero() {
            return;
        }
        for (t, c) in &other.terms {
            self.add_term(t.clone(), factor * c);
        }
    }

    pub fn add_assign(&mut self, other: &VElement) {
        self.add_scaled(&Scalar::one(), other);
    }

    pub fn scaled(&self, factor: &Scalar) -> VElement {
        let mut out = VElement::zero();
        out.add_scaled(factor, self);
        out
    }

    pub fn plus(&self, other: &VElement) -> VElement {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn minus(&self, other: &VElement) -> VElement {
        let mut out = self.clone();
        out.add_scaled(&-Scalar::one(), other);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, term: &Term) -> Scalar {
        self.terms.get(term).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &Scalar)> {
        self.terms.iter()
    }

    pub fn max_weight(&self) -> Option<i64> {
        self.terms.keys().map(Term::weight).max()
    }

    /// Splits into conformal-weight components.
    pub fn by_weight(&self) -> BTreeMap<i64, VElement> {
        let mut out: BTreeMap<i64, VElement> = BTreeMap::new();
        for (t, c) in &self.terms {
            out.entry(t.weight()).or_default().terms.insert(t.clone(), c.clone());
        }
        out
    }

    pub fn filter<F: Fn(&Term) -> bool>(&self, keep: F) -> VElement {
        VElement {
            terms: self.terms.iter().filter(|(t, _)| keep(t)).map(|(t, c)| (t.clone(), c.clone())).collect(),
        }
    }

    pub fn component<P: Piece>(&self, piece: P) -> VElement {
        self.filter(|t| piece.contains(t))
    }

    pub fn weight_component(&self, weight: i64) -> VElement {
        self.filter(|t| t.weight() == weight)
    }

    /// Weight-zero part as a Laurent form.
    pub fn laurent_part(&self) -> LaurentForm {
        let mut out = LaurentForm::default();
        for (t, c) in &self.terms {
            if t.mono.is_empty() {
                out.add(t.base, c.clone());
            }
        }
        out
    }

    /// Multiplies every base by `b^shift`: the action of `b_0^shift`, valid for
    /// negative shifts since `b_0` is invertible on the punctured line.
    pub fn base_power(&self, shift: i64) -> VElement {
        VElement {
            terms: self
                .terms
                .iter()
                .map(|(t, c)| {
                    let base = BaseMonomial { exp: t.base.exp + shift, form: t.base.form };
                    (Term::new(t.mono.clone(), base), c.clone())
                })
                .collect(),
        }
    }

    /// Whether every term is homogeneous for the same piece of kind `P`.
    pub fn homogeneous<K: PartialEq, F: Fn(&Term) -> K>(&self, key: F) -> bool {
        let mut keys = self.terms.keys().map(key);
        match keys.next() {
            None => true,
            Some(first) => keys.all(|k| k == first),
        }
    }
}

impl fmt::Display for VElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) {t}")?;
        }
        Ok(())
    }
}

/// Zero modes act on the base forms: `a_0 = d/db`, `b_0 = b`, `phi_0 = db ∧`,
/// `psi_0` contracts with `∂/∂(db)`.
fn zero_mode_on_base(kind: Kind, base: BaseMonomial) -> Option<(Scalar, BaseMonomial)> {
    let BaseMonomial { exp, form } = base;
    match kind {
        Kind::A => (exp != 0).then(|| (int(exp), BaseMonomial { exp: exp - 1, form })),
        Kind::B => Some((Scalar::one(), BaseMonomial { exp: exp + 1, form })),
        Kind::Phi => (!form).then(|| (Scalar::one(), BaseMonomial::form(exp))),
        Kind::Psi => form.then(|| (Scalar::one(), BaseMonomial::function(exp))),
    }
}

fn act_term(x: GenMode, term: &Term, coeff: &Scalar, out: &mut VElement) {
    if x.mode < 0 {
        if let Some((sign, mono)) = term.mono.insert(x) {
            out.add_term(Term::new(mono, term.base), sign * coeff);
        }
    } else if x.mode == 0 {
        if let Some((c, base)) = zero_mode_on_base(x.kind, term.base) {
            let sign = if x.is_odd() && term.mono.is_odd() { -Scalar::one() } else { Scalar::one() };
            out.add_term(Term::new(term.mono.clone(), base), sign * c * coeff);
        }
    } else {
        // Positive modes contract against the partner creation mode and
        // annihilate the base.
        let target = GenMode::new(x.kind.partner(), -x.mode);
        let bracket = super_bracket(x, target);
        let factors = term.mono.factors();
        let mut odd_passed = 0usize;
        let mut multiplicity = 0i64;
        let mut first = None;
        for (idx, f) in factors.iter().enumerate() {
            if *f == target {
                if first.is_none() {
                    first = Some((idx, odd_passed));
                }
                multiplicity += 1;
            }
            if f.is_odd() {
                odd_passed += 1;
            }
        }
        if let Some((idx, passed)) = first {
            let sign = if x.is_odd() && passed % 2 == 1 { -Scalar::one() } else { Scalar::one() };
            let c = sign * bracket * int(multiplicity) * coeff;
            out.add_term(Term::new(term.mono.remove_at(idx), term.base), c);
        }
    }
}

/// The action of a single loop mode on the module.
pub fn act(x: GenMode, v: &VElement) -> VElement {
    let mut out = VElement::zero();
    for (t, c) in v.iter() {
        act_term(x, t, c, &mut out);
    }
    out
}

/// Applies `x` then `y` in the normal order that puts weight-lowering modes on
/// the right: `:x y: v`.
fn weight_ordered(x: GenMode, y: GenMode, v: &VElement) -> VElement {
    if x.mode > 0 && y.mode <= 0 {
        act(y, &act(x, v)).scaled(&koszul(x.is_odd(), y.is_odd()))
    } else {
        act(x, &act(y, v))
    }
}

/// `L_0 = Σ_i i :a_i b_{-i}: + i :phi_{-i} psi_i:`, summed over the finitely many
/// `i` that can act on `v`.
pub fn l_zero(v: &VElement) -> VElement {
    let bound = v.max_weight().unwrap_or(0);
    let mut out = VElement::zero();
    for i in -bound..=bound {
        if i == 0 {
            continue;
        }
        let mut part = weight_ordered(GenMode::a(i), GenMode::b(-i), v);
        part.add_assign(&weight_ordered(GenMode::phi(-i), GenMode::psi(i), v));
        out.add_scaled(&int(i), &part);
    }
    out
}

fn monomials_from(gens: &[GenMode], start: usize, left: i64, acc: &mut Vec<GenMode>, out: &mut Vec<CreationMonomial>) {
    if left == 0 {
        out.push(CreationMonomial(acc.clone()));
        return;
    }
    for i in start..gens.len() {
        let g = gens[i];
        if -g.mode > left {
            continue;
        }
        acc.push(g);
        // even modes may repeat, odd ones may not
        let next = if g.is_odd() { i + 1 } else { i };
        monomials_from(gens, next, left + g.mode, acc, out);
        acc.pop();
    }
}

fn creation_monomials_uncached(weight: i64) -> Vec<CreationMonomial> {
    let mut out = Vec::new();
    if weight >= 0 {
        let mut gens: Vec<GenMode> =
            Kind::ALL.into_iter().flat_map(|k| (1..=weight).map(move |j| GenMode::new(k, -j))).collect();
        gens.sort();
        monomials_from(&gens, 0, weight, &mut Vec::new(), &mut out);
    }
    out.sort();
    out
}

/// All creation monomials of the given conformal weight, sorted.
pub fn creation_monomials(weight: i64) -> Vec<CreationMonomial> {
    static CACHE: OnceLock<Mutex<HashMap<i64, Vec<CreationMonomial>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cache lock").get(&weight) {
        return hit.clone();
    }
    let fresh = creation_monomials_uncached(weight);
    cache.lock().expect("cache lock").insert(weight, fresh.clone());
    fresh
}

/// Ordered PBW basis of a homogeneous piece. Empty when nothing has this grading.
pub fn enumerate_piece<P: Piece>(piece: P) -> Vec<Term> {
    let mut out = Vec::new();
    for mono in creation_monomials(piece.weight()) {
        let eps = piece.fermion() - mono.fermion();
        if eps != 0 && eps != 1 {
            continue;
        }
        let form = eps == 1;
        let exp = piece.base_exponent(&mono, form);
        out.push(Term::new(mono, BaseMonomial { exp, form }));
    }
    out.sort();
    out
}

pub fn enumerate_basis(t: TriDegree) -> Vec<Term> {
    enumerate_piece(t)
}

/// Fermionic numbers realized at a given conformal weight.
pub fn realized_fermions(weight: i64) -> Vec<i64> {
    let mut ps: Vec<i64> = creation_monomials(weight)
        .iter()
        .flat_map(|m| [m.fermion(), m.fermion() + 1])
        .collect();
    ps.sort();
    ps.dedup();
    ps
}

/// Sections regular on the chart at zero: every base exponent non-negative.
pub fn in_chart_zero(v: &VElement) -> bool {
    v.iter().all(|(t, _)| t.base.exp >= 0)
}

/// An ordered basis together with its coordinate map.
#[derive(Debug, Clone)]
pub struct PieceBasis {
    terms: Vec<Term>,
    index: HashMap<Term, usize>,
}

impl PieceBasis {
    pub fn new(terms: Vec<Term>) -> Self {
        let index = terms.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        Self { terms, index }
    }

    pub fn of<P: Piece>(piece: P) -> Self {
        Self::new(enumerate_piece(piece))
    }

    pub fn dim(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn index_of(&self, term: &Term) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// Coordinates of `v`; `None` if `v` has a term outside this basis.
    pub fn coords(&self, v: &VElement) -> Option<SparseVector> {
        let mut out = SparseVector::new();
        for (t, c) in v.iter() {
            out.add_to(self.index_of(t)?, c.clone());
        }
        Some(out)
    }

    pub fn element(&self, coords: &SparseVector) -> VElement {
        let mut v = VElement::zero();
        for (i, c) in coords.iter() {
            v.add_term(self.terms[i].clone(), c.clone());
        }
        v
    }

    pub fn basis_element(&self, i: usize) -> VElement {
        VElement::term(self.terms[i].clone())
    }

    /// Coordinates of the terms satisfying `keep`, as a subspace.
    pub fn coordinate_subspace<F: Fn(&Term) -> bool>(&self, keep: F) -> SubspaceBasis {
        let rows: Vec<SparseVector> =
            (0..self.dim()).filter(|&i| keep(&self.terms[i])).map(SparseVector::unit).collect();
        row_reduce(&rows, self.dim()).expect("unit vectors fit the piece")
    }
}

/// Growable coordinate system for vectors whose support is not known in advance.
#[derive(Debug, Default)]
pub struct TermIndex {
    index: HashMap<Term, usize>,
}

impl TermIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn coords(&mut self, v: &VElement) -> SparseVector {
        let mut out = SparseVector::new();
        for (t, c) in v.iter() {
            let next = self.index.len();
            let i = *self.index.entry(t.clone()).or_insert(next);
            out.add_to(i, c.clone());
        }
        out
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }
}

/// Common kernel, inside one piece, of all positive modes `x_j`, `0 < j ≤ weight`.
/// Only generator modes are tested, not modes of arbitrary composite states.
pub fn singular_piece(piece: TriDegree) -> SubspaceBasis {
    let basis = PieceBasis::of(piece);
    let modes: Vec<GenMode> = Kind::ALL
        .into_iter()
        .flat_map(|k| (1..=piece.weight).map(move |j| GenMode::new(k, j)))
        .collect();
    let mut index = TermIndex::new();
    let images: Vec<SparseVector> = basis
        .terms()
        .iter()
        .map(|t| {
            let v = VElement::term(t.clone());
            // images of different modes occupy disjoint coordinates
            let mut stacked = SparseVector::new();
            for (k, &x) in modes.iter().enumerate() {
                let img = index.coords(&act(x, &v));
                for (i, c) in img.iter() {
                    stacked.add_to(i * modes.len() + k, c.clone());
                }
            }
            stacked
        })
        .collect();
    kernel(&images)
}

/// Singular subspaces of every nonempty piece of the given weight whose degree
/// lies in `degrees`.
pub fn singular_subspace(weight: i64, degrees: std::ops::RangeInclusive<i64>) -> Vec<(TriDegree, SubspaceBasis)> {
    let mut out = Vec::new();
    for p in realized_fermions(weight) {
        for d in degrees.clone() {
            let piece = TriDegree::new(weight, p, d);
            if enumerate_piece(piece).is_empty() {
                continue;
            }
            out.push((piece, singular_piece(piece)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(exp: i64) -> VElement {
        VElement::base(BaseMonomial::function(exp))
    }
    fn form(exp: i64) -> VElement {
        VElement::base(BaseMonomial::form(exp))
    }

    #[test]
    fn act_examples() {
        let v = VElement::monomial(&[GenMode::b(-1)], BaseMonomial::function(5));
        assert_eq!(act(GenMode::a(1), &v), base(5));
        assert_eq!(act(GenMode::a(0), &base(2)), base(1).scaled(&int(2)));
        let w = VElement::monomial(&[GenMode::phi(-1)], BaseMonomial::form(0));
        assert_eq!(act(GenMode::psi(1), &w), form(0));
        assert!(act(GenMode::phi(0), &form(0)).is_zero());
    }

    #[test]
    fn odd_signs_in_normal_form() {
        let (sign, mono) = CreationMonomial::from_factors(&[GenMode::psi(-1), GenMode::phi(-2)]).unwrap();
        assert_eq!(sign, int(-1));
        assert_eq!(mono.factors(), &[GenMode::phi(-2), GenMode::psi(-1)]);
        assert!(CreationMonomial::from_factors(&[GenMode::phi(-1), GenMode::phi(-1)]).is_none());
    }

    #[test]
    fn l_zero_examples() {
        let v = VElement::monomial(&[GenMode::b(-2), GenMode::phi(-1)], BaseMonomial::form(5));
        assert_eq!(l_zero(&v), v.scaled(&int(3)));
        assert!(l_zero(&form(-3).plus(&base(4))).is_zero());
        let w = VElement::monomial(&[GenMode::b(-1)], BaseMonomial::function(0));
        assert_eq!(l_zero(&w), w);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_basis(TriDegree::new(0, 0, 3)), vec![Term::base(BaseMonomial::function(3))]);
        let rendered: Vec<String> =
            enumerate_basis(TriDegree::new(1, 0, -1)).iter().map(|t| t.to_string()).collect();
        assert_eq!(rendered, vec!["a(-1) . 1", "b(-1) . 1", "psi(-1) . db"]);
        // the base form counts toward the fermionic number
        let rendered: Vec<String> =
            enumerate_basis(TriDegree::new(1, 2, -1)).iter().map(|t| t.to_string()).collect();
        assert_eq!(rendered, vec!["phi(-1) . db"]);
        assert!(enumerate_basis(TriDegree::new(1, 3, -1)).is_empty());
    }

    /// Brute force: every product of creation modes of total weight `w` with
    /// parts drawn from all kinds, deduplicated through the normal form.
    fn brute_monomials(w: i64) -> Vec<CreationMonomial> {
        let gens: Vec<GenMode> =
            Kind::ALL.into_iter().flat_map(|k| (1..=w).map(move |j| GenMode::new(k, -j))).collect();
        let mut out = Vec::new();
        fn rec(gens: &[GenMode], left: i64, acc: &mut Vec<GenMode>, out: &mut Vec<CreationMonomial>) {
            if left == 0 {
                if let Some((_, m)) = CreationMonomial::from_factors(acc) {
                    out.push(m);
                }
                return;
            }
            for g in gens {
                if -g.mode <= left {
                    acc.push(*g);
                    rec(gens, left + g.mode, acc, out);
                    acc.pop();
                }
            }
        }
        rec(&gens, w, &mut Vec::new(), &mut out);
        out.sort();
        out.dedup();
        out
    }

    #[test]
    fn monomial_enumeration_matches_brute_force() {
        for w in 0..=4 {
            assert_eq!(creation_monomials(w), brute_monomials(w), "weight {w}");
        }
    }

    #[test]
    fn chart_zero_examples() {
        assert!(in_chart_zero(&base(3)));
        assert!(!in_chart_zero(&base(-1)));
        assert!(in_chart_zero(&VElement::monomial(&[GenMode::a(-2)], BaseMonomial::form(0))));
        assert!(!in_chart_zero(&VElement::monomial(&[GenMode::b(-1)], BaseMonomial::function(-1))));
    }

    #[test]
    fn render_round_trip() {
        for w in 0..=3 {
            for p in realized_fermions(w) {
                for d in -3..=3 {
                    for t in enumerate_basis(TriDegree::new(w, p, d)) {
                        let s = t.to_string();
                        assert_eq!(s.parse::<Term>().unwrap(), t, "{s}");
                    }
                }
            }
        }
        assert_eq!(
            Term::new(
                CreationMonomial::from_factors(&[GenMode::a(-2), GenMode::phi(-1)]).unwrap().1,
                BaseMonomial::form(3)
            )
            .to_string(),
            "a(-2) phi(-1) . b^3 db"
        );
        assert!("phi(-1) phi(-1) . 1".parse::<Term>().is_err());
        assert!("b(-1) a(-1) . 1".parse::<Term>().is_err());
    }

    #[test]
    fn singular_vectors() {
        let zero = singular_piece(TriDegree::new(0, 1, 2));
        assert_eq!(zero.rank(), 1);
        for (piece, sing) in singular_subspace(1, -3..=3).into_iter().chain(singular_subspace(2, -3..=3)) {
            assert_eq!(sing.rank(), 0, "{piece:?}");
        }
    }
}
