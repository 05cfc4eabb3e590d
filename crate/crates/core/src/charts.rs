//! The chart interchange `b ↦ 1/b`, the two chart subspaces, and the Čech
//! cohomology of the two-chart cover of the projective line.
//!
//! The involution reverses the Euler charge but mixes degrees, so the chart
//! subspaces are intersected piece by piece in the `(weight, fermion, charge)`
//! grading, where every piece is finite-dimensional and `sigma` is homogeneous.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{
    mode_apply, q_diff, supercommutator, test_vectors, CompositeState, FieldError, LinearSystem, Sl2Modes,
};
use crate::gamma::{koszul, super_bracket, GenMode, Kind};
use crate::linalg::{int, intersect, row_reduce, sum, Scalar, SparseVector, SubspaceBasis};
use crate::module::{
    enumerate_piece, realized_fermions, BaseMonomial, ChargeDegree, PieceBasis, Term, TriDegree, VElement,
};
use crate::pairing::{gram, PairingReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartError {
    #[error("transformed generators: {0}")]
    Derivation(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("sigma left the piece {0:?}")]
    Inhomogeneous(ChargeDegree),
}

/// States whose modes realize the generators in the chart at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformedGenerators {
    pub b: CompositeState,
    pub a: CompositeState,
    pub phi: CompositeState,
    pub psi: CompositeState,
    /// Coefficient of `psi_{-1} b db` in the transformed `a`.
    pub lambda: Scalar,
    /// Whether the linear constraints pin `lambda` down.
    pub unique: bool,
}

fn vstate(factors: &[GenMode], base: BaseMonomial, c: i64) -> VElement {
    VElement::monomial(factors, base).scaled(&int(c))
}

fn cs(v: VElement) -> CompositeState {
    CompositeState::new(v).expect("transformed states are homogeneous")
}

/// Pairs of transformed generators with their expected supercommutator kind.
const RELATIONS: [(Kind, Kind); 10] = [
    (Kind::A, Kind::A),
    (Kind::A, Kind::B),
    (Kind::A, Kind::Phi),
    (Kind::A, Kind::Psi),
    (Kind::B, Kind::B),
    (Kind::B, Kind::Phi),
    (Kind::B, Kind::Psi),
    (Kind::Phi, Kind::Phi),
    (Kind::Phi, Kind::Psi),
    (Kind::Psi, Kind::Psi),
];

impl TransformedGenerators {
    /// Solves `lambda` from `[ã_i, b̃_j] = δ_{i+j}`, `[ã_i, φ̃_j] = [ã_i, ψ̃_j] = 0`
    /// for `|i|, |j| ≤ 1` on test vectors of weight ≤ `max_weight`, degrees
    /// `[-1, 1]`. `relation_failures` re-checks everything on larger ranges.
    pub fn derive(max_weight: i64) -> Result<Self, ChartError> {
        let b = cs(vstate(&[], BaseMonomial::function(-1), 1));
        let phi = cs(vstate(&[], BaseMonomial::form(-2), -1));
        let psi = cs(vstate(&[GenMode::psi(-1)], BaseMonomial::function(2), -1));
        let a0 = cs(vstate(&[GenMode::a(-1)], BaseMonomial::function(2), -1));
        let a1 = cs(vstate(&[GenMode::psi(-1)], BaseMonomial::form(1), 1));
        let partners = [(Kind::B, &b), (Kind::Phi, &phi), (Kind::Psi, &psi)];
        let mut system = LinearSystem::new(1);
        let modes = -1..=1;
        for v in test_vectors(max_weight, -1..=1) {
            let a0v: Vec<VElement> = modes.clone().map(|i| mode_apply(&a0, i, &v)).collect();
            let a1v: Vec<VElement> = modes.clone().map(|i| mode_apply(&a1, i, &v)).collect();
            for (kind, y) in partners {
                let sign = koszul(false, kind.is_odd());
                for j in modes.clone() {
                    let yv = mode_apply(y, j, &v);
                    for (k, i) in modes.clone().enumerate() {
                        // [x_i, y_j] v = x_i y_j v - y_j x_i v
                        let bracket = |x: &CompositeState, xv: &VElement| {
                            mode_apply(x, i, &yv).minus(&mode_apply(y, j, xv).scaled(&sign))
                        };
                        let expected = v.scaled(&super_bracket(GenMode::a(i), GenMode::new(kind, j)));
                        system.add_block(&[bracket(&a1, &a1v[k])], &expected.minus(&bracket(&a0, &a0v[k])));
                    }
                }
            }
        }
        let (sol, nullity) = system
            .solve()
            .ok_or_else(|| ChartError::Derivation("no lambda satisfies the relations".into()))?;
        let lambda = sol[0].clone();
        let a = a0.plus(&a1.scaled(&lambda))?;
        Ok(Self { b, a, phi, psi, lambda, unique: nullity == 0 })
    }

    pub fn state(&self, kind: Kind) -> &CompositeState {
        match kind {
            Kind::A => &self.a,
            Kind::B => &self.b,
            Kind::Phi => &self.phi,
            Kind::Psi => &self.psi,
        }
    }

    /// Transformed mode `x̃_n` applied to `v`.
    pub fn apply(&self, x: GenMode, v: &VElement) -> VElement {
        mode_apply(self.state(x.kind), x.mode, v)
    }

    /// Checks every supercommutator among transformed modes `|i|, |j| ≤ modes`
    /// on the given vectors; returns the failures.
    pub fn relation_failures(&self, vectors: &[VElement], modes: i64) -> Vec<String> {
        let mut out = Vec::new();
        for (x, y) in RELATIONS {
            for i in -modes..=modes {
                for j in -modes..=modes {
                    let (gx, gy) = (GenMode::new(x, i), GenMode::new(y, j));
                    let expected = super_bracket(gx, gy);
                    for v in vectors {
                        let lhs = supercommutator(
                            |t| self.apply(gx, t),
                            x.is_odd(),
                            |t| self.apply(gy, t),
                            y.is_odd(),
                            v,
                        );
                        if lhs != v.scaled(&expected) {
                            out.push(format!("[{gx}~, {gy}~] on {v}"));
                        }
                    }
                }
            }
        }
        out
    }
}

/// The classical pullback under `b ↦ 1/b` on a base monomial.
pub fn sigma_base(base: BaseMonomial) -> VElement {
    if base.form {
        vstate(&[], BaseMonomial::form(-base.exp - 2), -1)
    } else {
        vstate(&[], BaseMonomial::function(-base.exp), 1)
    }
}

/// The chart involution with a synchronized cache of term images.
pub struct ChartInvolution {
    pub generators: TransformedGenerators,
    cache: Mutex<HashMap<Term, VElement>>,
}

impl ChartInvolution {
    pub fn new(generators: TransformedGenerators) -> Self {
        Self { generators, cache: Mutex::new(HashMap::new()) }
    }

    /// A shared instance, derived once.
    pub fn shared() -> &'static ChartInvolution {
        static SHARED: OnceLock<ChartInvolution> = OnceLock::new();
        SHARED.get_or_init(|| {
            ChartInvolution::new(TransformedGenerators::derive(2).expect("transformed generators derive"))
        })
    }

    pub fn sigma_term(&self, t: &Term) -> VElement {
        if let Some(hit) = self.cache.lock().expect("sigma cache").get(t) {
            return hit.clone();
        }
        let mut v = sigma_base(t.base);
        for &x in t.mono.factors().iter().rev() {
            v = self.generators.apply(x, &v);
        }
        self.cache.lock().expect("sigma cache").insert(t.clone(), v.clone());
        v
    }

    pub fn sigma(&self, v: &VElement) -> VElement {
        let mut out = VElement::zero();
        for (t, c) in v.iter() {
            out.add_scaled(c, &self.sigma_term(t));
        }
        out
    }
}

fn chart_zero_terms(basis: &PieceBasis) -> Vec<Term> {
    basis.terms().iter().filter(|t| t.base.exp >= 0).cloned().collect()
}

/// `V_0` inside a charge piece: the terms with non-negative base exponent.
pub fn chart_zero_charge(piece: ChargeDegree) -> SubspaceBasis {
    PieceBasis::of(piece).coordinate_subspace(|t| t.base.exp >= 0)
}

/// `V_∞` inside a charge piece, as `sigma` of `V_0` in the opposite charge.
pub fn chart_infinity_charge(sigma: &ChartInvolution, piece: ChargeDegree) -> Result<SubspaceBasis, ChartError> {
    let basis = PieceBasis::of(piece);
    let source = PieceBasis::of(ChargeDegree::new(piece.weight, piece.fermion, -piece.charge));
    let mut rows = Vec::new();
    for t in chart_zero_terms(&source) {
        let image = sigma.sigma_term(&t);
        rows.push(basis.coords(&image).ok_or(ChartError::Inhomogeneous(piece))?);
    }
    Ok(row_reduce(&rows, basis.dim()).expect("coordinates fit the piece"))
}

/// `V_∞` inside a degree piece: homogeneous components, of degree `t.degree`,
/// of `sigma` applied to chart-zero vectors across `window`. `homogeneous` is
/// false when some image had components outside its source degree, in which
/// case the span is only an outer approximation.
#[derive(Debug, Clone)]
pub struct DegreeChart {
    pub subspace: SubspaceBasis,
    pub homogeneous: bool,
}

pub fn chart_infinity_piece(
    sigma: &ChartInvolution,
    t: TriDegree,
    window: std::ops::RangeInclusive<i64>,
) -> DegreeChart {
    let basis = PieceBasis::of(t);
    let mut rows = Vec::new();
    let mut homogeneous = true;
    for d in window {
        let source = PieceBasis::of(TriDegree::new(t.weight, t.fermion, d));
        for term in chart_zero_terms(&source) {
            let image = sigma.sigma_term(&term);
            let degrees: Vec<i64> = image.iter().map(|(s, _)| s.degree()).collect();
            if degrees.windows(2).any(|w| w[0] != w[1]) {
                homogeneous = false;
            }
            let part = image.filter(|s| t.degree == s.degree());
            if !part.is_zero() {
                rows.push(basis.coords(&part).expect("component lies in the piece"));
            }
        }
    }
    DegreeChart { subspace: row_reduce(&rows, basis.dim()).expect("coordinates fit the piece"), homogeneous }
}

/// Čech data of one charge piece.
#[derive(Debug, Clone)]
pub struct ChargePiece {
    pub piece: ChargeDegree,
    pub basis: PieceBasis,
    pub h0: SubspaceBasis,
    /// `V_0 + V_∞`.
    pub span: SubspaceBasis,
    /// Indices of basis terms completing `span` to the whole piece.
    pub h1_terms: Vec<usize>,
}

impl ChargePiece {
    pub fn compute(sigma: &ChartInvolution, piece: ChargeDegree) -> Result<Self, ChartError> {
        let basis = PieceBasis::of(piece);
        let zero = chart_zero_charge(piece);
        let infinity = chart_infinity_charge(sigma, piece)?;
        let h0 = intersect(&zero, &infinity).expect("same ambient");
        let span = sum(&zero, &infinity).expect("same ambient");
        // greedy completion in basis order
        let mut grown = span.clone();
        let mut h1_terms = Vec::new();
        for i in 0..basis.dim() {
            let e = SparseVector::unit(i);
            if !grown.contains(&e) {
                grown = sum(&grown, &row_reduce(&[e], basis.dim()).expect("unit")).expect("same ambient");
                h1_terms.push(i);
            }
        }
        Ok(Self { piece, basis, h0, span, h1_terms })
    }

    pub fn h0_vectors(&self) -> Vec<VElement> {
        self.h0.rows().iter().map(|r| self.basis.element(r)).collect()
    }

    pub fn h1_vectors(&self) -> Vec<VElement> {
        self.h1_terms.iter().map(|&i| self.basis.basis_element(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyEntry {
    pub weight: i64,
    pub fermion: i64,
    pub h0: usize,
    pub h1: usize,
    /// Charge window `[-n, n]` of the main run.
    pub window: i64,
    /// Dimensions from the enlarged re-run.
    pub h0_enlarged: usize,
    pub h1_enlarged: usize,
    pub stable: bool,
    pub h0_basis: Vec<String>,
    pub h1_representatives: Vec<String>,
}

/// All charge pieces of one `(weight, fermion)` within `[-window, window]`.
#[derive(Debug, Clone)]
pub struct Sector {
    pub weight: i64,
    pub fermion: i64,
    pub pieces: Vec<ChargePiece>,
}

impl Sector {
    pub fn compute(sigma: &ChartInvolution, weight: i64, fermion: i64, window: i64) -> Result<Self, ChartError> {
        let pieces = (-window..=window)
            .into_par_iter()
            .map(|c| ChargePiece::compute(sigma, ChargeDegree::new(weight, fermion, c)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { weight, fermion, pieces })
    }

    pub fn h0(&self) -> usize {
        self.pieces.iter().map(|p| p.h0.rank()).sum()
    }

    pub fn h1(&self) -> usize {
        self.pieces.iter().map(|p| p.h1_terms.len()).sum()
    }

    pub fn piece(&self, charge: i64) -> Option<&ChargePiece> {
        self.pieces.iter().find(|p| p.piece.charge == charge)
    }

    pub fn h0_vectors(&self) -> Vec<VElement> {
        self.pieces.iter().flat_map(|p| p.h0_vectors()).collect()
    }

    pub fn h1_vectors(&self) -> Vec<VElement> {
        self.pieces.iter().flat_map(|p| p.h1_vectors()).collect()
    }
}

/// Čech cohomology of every realized `(weight, fermion)` up to `max_weight`,
/// with charge window `max_weight + pad` and a re-run at `max_weight + 2 pad`.
#[derive(Debug, Clone)]
pub struct Cohomology {
    pub max_weight: i64,
    pub pad: i64,
    pub sectors: BTreeMap<(i64, i64), Sector>,
    pub entries: Vec<CohomologyEntry>,
}

impl Cohomology {
    pub fn compute(sigma: &ChartInvolution, max_weight: i64, pad: i64) -> Result<Self, ChartError> {
        let window = max_weight + pad;
        let keys: Vec<(i64, i64)> =
            (0..=max_weight).flat_map(|w| realized_fermions(w).into_iter().map(move |p| (w, p))).collect();
        let results = keys
            .par_iter()
            .map(|&(w, p)| {
                let main = Sector::compute(sigma, w, p, window)?;
                let enlarged = Sector::compute(sigma, w, p, max_weight + 2 * pad)?;
                Ok((main, enlarged))
            })
            .collect::<Result<Vec<_>, ChartError>>()?;
        let mut sectors = BTreeMap::new();
        let mut entries = Vec::new();
        for (main, enlarged) in results {
            let (h0, h1) = (main.h0(), main.h1());
            entries.push(CohomologyEntry {
                weight: main.weight,
                fermion: main.fermion,
                h0,
                h1,
                window,
                h0_enlarged: enlarged.h0(),
                h1_enlarged: enlarged.h1(),
                stable: h0 == enlarged.h0() && h1 == enlarged.h1(),
                h0_basis: main.h0_vectors().iter().map(|v| v.to_string()).collect(),
                h1_representatives: main.h1_vectors().iter().map(|v| v.to_string()).collect(),
            });
            sectors.insert((main.weight, main.fermion), main);
        }
        Ok(Self { max_weight, pad, sectors, entries })
    }

    pub fn entry(&self, weight: i64, fermion: i64) -> Option<&CohomologyEntry> {
        self.entries.iter().find(|e| e.weight == weight && e.fermion == fermion)
    }

    /// `h0(i, p) = h1(i, 1 - p)` for every computed sector; returns violations.
    pub fn duality_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for e in &self.entries {
            let dual = self.entry(e.weight, 1 - e.fermion).map(|d| d.h1).unwrap_or(0);
            if e.h0 != dual {
                out.push(format!("h0({},{}) = {} but h1({},{}) = {}", e.weight, e.fermion, e.h0, e.weight, 1 - e.fermion, dual));
            }
        }
        out
    }

    /// Gram matrix of `H^0(i, p)` against the `H^1(i, 1 - p)` representatives.
    pub fn pairing(&self, weight: i64, fermion: i64) -> PairingReport {
        let left = self.sectors.get(&(weight, fermion)).map(|s| s.h0_vectors()).unwrap_or_default();
        let right = self.sectors.get(&(weight, 1 - fermion)).map(|s| s.h1_vectors()).unwrap_or_default();
        let g = gram(&left, &right);
        // charge and degree are not tracked in the report pieces; mark weight and fermion
        PairingReport::from_matrix(
            TriDegree::new(weight, fermion, 0),
            TriDegree::new(weight, 1 - fermion, 0),
            &g,
            right.len(),
        )
    }
}

/// Dimensions of the `Q`-cohomology of `H^0 ⊕ H^1` by weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QCohomology {
    /// `(weight, Čech degree, fermion, dimension)` for every nonzero class space.
    pub classes: Vec<(i64, u8, i64, usize)>,
    pub total: usize,
    pub weight_zero: usize,
    pub q_squared_zero: bool,
}

fn piece_rank(basis: &PieceBasis, base: &SubspaceBasis, vectors: &[VElement]) -> usize {
    let mut rows: Vec<SparseVector> = base.rows().to_vec();
    for v in vectors {
        rows.push(basis.coords(v).expect("Q preserves the charge piece"));
    }
    row_reduce(&rows, basis.dim()).expect("fits").rank() - base.rank()
}

pub fn q_cohomology(cohomology: &Cohomology) -> QCohomology {
    let mut classes = Vec::new();
    let mut q_squared_zero = true;
    let window = cohomology.max_weight + cohomology.pad;
    for w in 0..=cohomology.max_weight {
        let ps = realized_fermions(w);
        for c in -window..=window {
            let get = |p: i64| cohomology.sectors.get(&(w, p)).and_then(|s| s.piece(c));
            // rank of Q out of fermion p, on H^0 and on H^1
            let mut rank0 = BTreeMap::new();
            let mut rank1 = BTreeMap::new();
            for &p in &ps {
                let Some(src) = get(p) else { continue };
                let target = get(p + 1);
                let h0_images: Vec<VElement> = src.h0_vectors().iter().map(q_diff).collect();
                let h1_images: Vec<VElement> = src.h1_vectors().iter().map(q_diff).collect();
                for v in h0_images.iter().chain(&h1_images) {
                    if !q_diff(v).is_zero() {
                        q_squared_zero = false;
                    }
                }
                let (r0, r1) = match target {
                    Some(t) => {
                        let zero = SubspaceBasis::zero(t.basis.dim());
                        (piece_rank(&t.basis, &zero, &h0_images), piece_rank(&t.basis, &t.span, &h1_images))
                    }
                    None => {
                        assert!(h0_images.iter().chain(&h1_images).all(VElement::is_zero));
                        (0, 0)
                    }
                };
                rank0.insert(p, r0);
                rank1.insert(p, r1);
            }
            for &p in &ps {
                let Some(src) = get(p) else { continue };
                let r = |m: &BTreeMap<i64, usize>, q: i64| m.get(&q).copied().unwrap_or(0);
                let d0 = src.h0.rank() - r(&rank0, p) - r(&rank0, p - 1);
                let d1 = src.h1_terms.len() - r(&rank1, p) - r(&rank1, p - 1);
                if d0 > 0 {
                    classes.push((w, 0, p, d0));
                }
                if d1 > 0 {
                    classes.push((w, 1, p, d1));
                }
            }
        }
    }
    let mut merged: BTreeMap<(i64, u8, i64), usize> = BTreeMap::new();
    for (w, q, p, d) in classes {
        *merged.entry((w, q, p)).or_default() += d;
    }
    let classes: Vec<_> = merged.into_iter().map(|((w, q, p), d)| (w, q, p, d)).collect();
    let total = classes.iter().map(|c| c.3).sum();
    let weight_zero = classes.iter().filter(|c| c.0 == 0).map(|c| c.3).sum();
    QCohomology { classes, total, weight_zero, q_squared_zero }
}

/// Local nilpotence of `e_0`, `f_0` on `H^0`, integrality of `h_0`, and
/// non-nilpotent witnesses for `f_0`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    pub vectors_checked: usize,
    /// Largest `N` needed for `e_0^N v = 0` and `f_0^N v = 0`.
    pub max_exponent: usize,
    pub failures: Vec<String>,
    /// `h_0` eigenvalues on each `H^0` charge piece, keyed by `(weight, fermion, charge)`.
    pub h_eigenvalues: Vec<((i64, i64, i64), Vec<i64>)>,
    /// Per weight, a vector on which `f_0` is not nilpotent up to the bound.
    pub witnesses: Vec<(i64, String)>,
}

impl IntegrabilityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn nilpotence_exponent(op: impl Fn(&VElement) -> VElement, v: &VElement, bound: usize) -> Option<usize> {
    let mut t = v.clone();
    for n in 0..=bound {
        if t.is_zero() {
            return Some(n);
        }
        t = op(&t);
    }
    None
}

/// Coordinates of `v ∈ span(h0)` in the RREF basis rows.
fn rref_coords(space: &SubspaceBasis, v: &SparseVector) -> Option<Vec<Scalar>> {
    if !space.reduce(v).is_zero() {
        return None;
    }
    Some(space.pivots().map(|p| v.get(p)).collect())
}

/// Integer eigenvalues of a square matrix, if it is diagonalizable over them.
fn integer_spectrum(m: &[Vec<Scalar>]) -> Option<Vec<i64>> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    // Gershgorin bound on the spectrum
    let bound = m.iter().map(|r| r.iter().map(crate::linalg::abs).fold(Scalar::zero(), |a, b| a + b)).max()?;
    let bound = bound.ceil().to_integer();
    let bound: i64 = i64::try_from(bound).ok()?;
    let mut spectrum = Vec::new();
    for lambda in -bound..=bound {
        let shifted: Vec<SparseVector> = (0..n)
            .map(|j| {
                SparseVector::from_pairs(
                    (0..n).map(|i| (i, m[i][j].clone() - if i == j { int(lambda) } else { Scalar::zero() })),
                )
            })
            .collect();
        let nullity = n - row_reduce(&shifted, n).expect("square").rank();
        spectrum.extend(std::iter::repeat(lambda).take(nullity));
    }
    (spectrum.len() == n).then_some(spectrum)
}

pub fn integrability_check(cohomology: &Cohomology, sl2: &Sl2Modes, bound_for: impl Fn(i64) -> usize) -> IntegrabilityReport {
    let mut report = IntegrabilityReport::default();
    for (&(w, p), sector) in &cohomology.sectors {
        let bound = bound_for(w);
        for piece in &sector.pieces {
            let vectors = piece.h0_vectors();
            for v in &vectors {
                report.vectors_checked += 1;
                for (name, op) in [("e0", &sl2.e), ("f0", &sl2.f)] {
                    match nilpotence_exponent(|t| op.apply(t), v, bound) {
                        Some(n) => report.max_exponent = report.max_exponent.max(n),
                        None => report.failures.push(format!("{name}^{bound} does not kill {v}")),
                    }
                }
            }
            if vectors.is_empty() {
                continue;
            }
            let mut matrix = vec![vec![Scalar::zero(); vectors.len()]; vectors.len()];
            let mut stable = true;
            for (j, v) in vectors.iter().enumerate() {
                let image = piece.basis.coords(&sl2.h.apply(v)).and_then(|c| rref_coords(&piece.h0, &c));
                match image {
                    Some(col) => {
                        for (i, c) in col.into_iter().enumerate() {
                            matrix[i][j] = c;
                        }
                    }
                    None => stable = false,
                }
            }
            let key = (w, p, piece.piece.charge);
            match (stable, integer_spectrum(&matrix)) {
                (true, Some(spec)) => report.h_eigenvalues.push((key, spec)),
                (false, _) => report.failures.push(format!("h0 does not preserve H0 piece {key:?}")),
                (true, None) => report.failures.push(format!("h0 not integrally diagonalizable on {key:?}")),
            }
        }
    }
    for w in 0..=cohomology.max_weight {
        let bound = bound_for(w);
        let witness = realized_fermions(w).into_iter().find_map(|p| {
            (0..=2).find_map(|c| {
                enumerate_piece(ChargeDegree::new(w, p, c)).into_iter().map(VElement::term).find(|v| {
                    nilpotence_exponent(|t| sl2.f.apply(t), v, bound).is_none()
                })
            })
        });
        match witness {
            Some(v) => report.witnesses.push((w, v.to_string())),
            None => report.failures.push(format!("no non-nilpotent witness at weight {w}")),
        }
    }
    report
}

/// `sigma ∘ Q = Q ∘ sigma` on the given vectors; returns violations.
pub fn q_commutes_with_sigma(sigma: &ChartInvolution, vectors: &[VElement]) -> Vec<String> {
    vectors
        .iter()
        .filter(|v| sigma.sigma(&q_diff(v)) != q_diff(&sigma.sigma(v)))
        .map(|v| v.to_string())
        .collect()
}

/// The identity check `<sigma v, sigma w> = <v, w>` is not assumed anywhere;
/// this returns the rational scalar by which sigma rescales a weight-zero pair.
pub fn weight_zero_pairing_sign(sigma: &ChartInvolution) -> Scalar {
    let v = VElement::base(BaseMonomial::function(0));
    let w = VElement::base(BaseMonomial::form(-1));
    let before = crate::pairing::pair(&v, &w);
    let after = crate::pairing::pair(&sigma.sigma(&v), &sigma.sigma(&w));
    if before.is_zero() {
        Scalar::zero()
    } else {
        after / before
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::Kind;
    use crate::module::{act, enumerate_basis};

    fn sigma() -> &'static ChartInvolution {
        ChartInvolution::shared()
    }

    fn base(exp: i64) -> VElement {
        VElement::base(BaseMonomial::function(exp))
    }

    #[test]
    fn lambda_is_derived_and_relations_hold() {
        let g = &sigma().generators;
        assert!(g.unique);
        assert_eq!(g.lambda, int(2));
        let failures = g.relation_failures(&test_vectors(2, -2..=2), 2);
        assert!(failures.is_empty(), "{:?}", &failures[..failures.len().min(5)]);
    }

    #[test]
    fn classical_pullback() {
        assert_eq!(sigma().sigma(&base(3)), base(-3));
        for m in -3..=3 {
            let form = VElement::base(BaseMonomial::form(m));
            assert_eq!(sigma().sigma(&form), VElement::base(BaseMonomial::form(-m - 2)).scaled(&int(-1)));
        }
    }

    #[test]
    fn sigma_is_an_involution() {
        for v in test_vectors(2, -3..=3) {
            assert_eq!(sigma().sigma(&sigma().sigma(&v)), v, "{v}");
        }
    }

    #[test]
    fn sigma_intertwines_generator_modes() {
        for v in test_vectors(2, -2..=2) {
            let sv = sigma().sigma(&v);
            for kind in Kind::ALL {
                for j in -2..=2 {
                    let x = GenMode::new(kind, j);
                    assert_eq!(sigma().sigma(&act(x, &v)), sigma().generators.apply(x, &sv), "{x} {v}");
                }
            }
        }
    }

    #[test]
    fn sigma_reverses_charge_but_not_degree() {
        let v = VElement::monomial(&[GenMode::a(-1)], BaseMonomial::function(0));
        let image = sigma().sigma(&v);
        assert!(image.homogeneous(|t| t.charge_degree()));
        assert!(!image.homogeneous(|t| t.degree()));
        for t in enumerate_piece(ChargeDegree::new(2, 0, 1)) {
            let s = sigma().sigma_term(&t);
            assert!(s.iter().all(|(u, _)| u.charge_degree() == ChargeDegree::new(2, 0, -1)), "{t}");
        }
        let fallback = chart_infinity_piece(sigma(), TriDegree::new(1, 0, -1), -6..=6);
        assert!(!fallback.homogeneous);
    }

    #[test]
    fn weight_zero_charts() {
        // functions: V_inf = span{b^-m}, forms: span{b^(-m-2) db}
        for c in -4..=4 {
            let f = chart_infinity_charge(sigma(), ChargeDegree::new(0, 0, c)).unwrap();
            assert_eq!(f.rank(), usize::from(c <= 0));
            let w = chart_infinity_charge(sigma(), ChargeDegree::new(0, 1, c)).unwrap();
            assert_eq!(w.rank(), usize::from(c <= -1));
        }
        let deg = chart_infinity_piece(sigma(), TriDegree::new(0, 0, 0), -4..=4);
        assert_eq!(deg.subspace.rank(), 1);
        assert!(deg.homogeneous);
        assert_eq!(chart_infinity_piece(sigma(), TriDegree::new(0, 1, -1), -4..=4).subspace.rank(), 0);
    }

    #[test]
    fn weight_zero_hodge_numbers_and_pairing() {
        let h = Cohomology::compute(sigma(), 0, 4).unwrap();
        let e0 = h.entry(0, 0).unwrap();
        let e1 = h.entry(0, 1).unwrap();
        assert_eq!((e0.h0, e0.h1, e1.h0, e1.h1), (1, 0, 0, 1));
        assert!(e0.stable && e1.stable);
        assert_eq!(e1.h1_representatives, vec!["(1) b^-1 db".to_string()]);
        let g = h.pairing(0, 0);
        assert_eq!(g.gram, vec![vec!["1".to_string()]]);
        let q = q_cohomology(&h);
        assert_eq!((q.total, q.weight_zero), (2, 2));
    }

    #[test]
    fn weight_one_duality() {
        let h = Cohomology::compute(sigma(), 1, 2).unwrap();
        assert!(h.duality_failures().is_empty(), "{:?}", h.duality_failures());
        for e in &h.entries {
            assert!(e.stable);
            assert!(h.pairing(e.weight, e.fermion).nondegenerate, "{e:?}");
        }
        let q = q_cohomology(&h);
        assert_eq!((q.total, q.weight_zero), (2, 2));
        assert!(q.q_squared_zero);
    }

    #[test]
    fn q_commutes_with_the_involution() {
        let vectors: Vec<VElement> = (-2..=2)
            .flat_map(|d| {
                realized_fermions(1).into_iter().flat_map(move |p| enumerate_basis(TriDegree::new(1, p, d)))
            })
            .map(VElement::term)
            .collect();
        assert!(q_commutes_with_sigma(sigma(), &vectors).is_empty());
    }

    #[test]
    fn sl2_integrability_at_low_weight() {
        let h = Cohomology::compute(sigma(), 1, 2).unwrap();
        let sl2 = Sl2Modes::derive(1, -2..=2).unwrap();
        let r = integrability_check(&h, &sl2, |w| (2 * w + 3) as usize);
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.witnesses.len(), 2);
    }

    #[test]
    fn orientation_reversal_at_weight_zero() {
        assert_eq!(weight_zero_pairing_sign(sigma()), int(-1));
    }
}
