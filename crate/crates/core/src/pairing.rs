//! The residue pairing on Laurent forms and its contravariant extension to
//! the whole module: `<x v, w> = (-1)^{x v} <v, eta(x) w>`.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fields::ModeOperator;
use crate::gamma::{eta, koszul, GenMode, Kind};
use crate::linalg::{dense_rank, int, kernel, Scalar, SparseVector};
use crate::module::{
    act, enumerate_basis, realized_fermions, LaurentForm, PieceBasis, Term, TriDegree, VElement,
};

/// `Res_{b=0} nu ∧ mu`: functions pair with forms, the product's `b^{-1} db` coefficient.
pub fn residue_pair(nu: &LaurentForm, mu: &LaurentForm) -> Scalar {
    let mut out = Scalar::zero();
    for (m, f) in &nu.fun_part {
        if let Some(g) = mu.form_part.get(&(-1 - m)) {
            out += f * g;
        }
    }
    for (m, g) in &nu.form_part {
        if let Some(f) = mu.fun_part.get(&(-1 - m)) {
            out += f * g;
        }
    }
    out
}

fn pair_term(t: &Term, w: &VElement) -> Scalar {
    let w = w.weight_component(t.weight());
    if w.is_zero() {
        return Scalar::zero();
    }
    match t.mono.split_first() {
        None => {
            let nu = LaurentForm::monomial(t.base, int(1));
            residue_pair(&nu, &w.laurent_part())
        }
        Some((x, rest)) => {
            let nu = Term::new(rest, t.base);
            let ex = eta(x);
            let sign = koszul(x.is_odd(), nu.is_odd()) * ex.coefficient();
            sign * pair_term(&nu, &act(ex.gen, &w))
        }
    }
}

/// The contravariant bilinear form, computed by stripping factors off `v`.
pub fn pair(v: &VElement, w: &VElement) -> Scalar {
    let mut out = Scalar::zero();
    for (t, c) in v.iter() {
        let p = pair_term(t, w);
        if !p.is_zero() {
            out += c * p;
        }
    }
    out
}

/// The piece that `t` can pair with nontrivially.
pub fn partner(t: TriDegree) -> TriDegree {
    TriDegree::new(t.weight, 1 - t.fermion, -t.degree - 1 - 2 * t.weight)
}

/// Exact rationals rendered as `n` or `n/d`, for reports.
fn render(c: &Scalar) -> String {
    c.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingReport {
    pub left: TriDegree,
    pub right: TriDegree,
    pub rows: usize,
    pub cols: usize,
    pub gram: Vec<Vec<String>>,
    pub rank: usize,
    pub nondegenerate: bool,
}

impl PairingReport {
    pub fn from_matrix(left: TriDegree, right: TriDegree, matrix: &[Vec<Scalar>], cols: usize) -> Self {
        let rank = dense_rank(matrix);
        let rows = matrix.len();
        Self {
            left,
            right,
            rows,
            cols,
            gram: matrix.iter().map(|r| r.iter().map(render).collect()).collect(),
            rank,
            nondegenerate: rows == cols && rank == rows,
        }
    }
}

pub fn gram(left: &[VElement], right: &[VElement]) -> Vec<Vec<Scalar>> {
    left.par_iter().map(|v| right.iter().map(|w| pair(v, w)).collect()).collect()
}

/// Pairing matrix between the PBW bases of two pieces.
pub fn gram_matrix(a: TriDegree, b: TriDegree) -> PairingReport {
    let left: Vec<VElement> = enumerate_basis(a).into_iter().map(VElement::term).collect();
    let right: Vec<VElement> = enumerate_basis(b).into_iter().map(VElement::term).collect();
    PairingReport::from_matrix(a, b, &gram(&left, &right), right.len())
}

/// Degrees `d` in `window` for which the piece `(weight, 1 - p, d)` pairs
/// nontrivially with `t`; observed, not assumed.
pub fn observed_complement(t: TriDegree, window: std::ops::RangeInclusive<i64>) -> Vec<i64> {
    window
        .filter(|&d| {
            let r = gram_matrix(t, TriDegree::new(t.weight, 1 - t.fermion, d));
            r.rank > 0
        })
        .collect()
}

/// Result of a sampled property check.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleReport {
    pub samples: usize,
    /// Samples on which both sides were nonzero.
    pub nontrivial: usize,
    pub counterexamples: Vec<String>,
}

impl SampleReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn record(&mut self, ok: bool, nonzero: bool, describe: impl FnOnce() -> String) {
        self.samples += 1;
        if nonzero {
            self.nontrivial += 1;
        }
        if !ok && self.counterexamples.len() < 10 {
            self.counterexamples.push(describe());
        }
    }
}

fn nonempty_pieces(max_weight: i64, degrees: std::ops::RangeInclusive<i64>) -> Vec<TriDegree> {
    let mut out = Vec::new();
    for w in 0..=max_weight {
        for p in realized_fermions(w) {
            for d in degrees.clone() {
                let t = TriDegree::new(w, p, d);
                if !enumerate_basis(t).is_empty() {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// A random combination, small integer coefficients, of the basis of `t`.
pub fn random_element<R: Rng>(rng: &mut R, t: TriDegree) -> VElement {
    let mut v = VElement::zero();
    for term in enumerate_basis(t) {
        if rng.gen_bool(0.6) {
            v.add_term(term, int(rng.gen_range(-3..=3)));
        }
    }
    v
}

fn nonzero_random<R: Rng>(rng: &mut R, t: TriDegree) -> VElement {
    loop {
        let v = random_element(rng, t);
        if !v.is_zero() {
            return v;
        }
    }
}

fn is_odd(v: &VElement) -> bool {
    v.iter().next().map(|(t, _)| t.is_odd()).unwrap_or(false)
}

/// Samples homogeneous `v`, a generator mode `x`, and `w` from the partner piece
/// of `x v`; asserts contravariance for `x` and symmetry of the form.
pub fn contravariance_check(samples: usize, seed: u64, max_weight: i64) -> SampleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pieces = nonempty_pieces(max_weight, -(max_weight + 2)..=(max_weight + 2));
    let mut report = SampleReport::default();
    while report.samples < samples {
        let t = pieces[rng.gen_range(0..pieces.len())];
        let kind = Kind::ALL[rng.gen_range(0..4)];
        let m = rng.gen_range(-(max_weight - t.weight)..=t.weight);
        let x = GenMode::new(kind, m);
        let image = TriDegree::new(t.weight - m, t.fermion + kind.fermion(), t.degree + x.degree());
        let w_piece = partner(image);
        if enumerate_basis(w_piece).is_empty() {
            continue;
        }
        let v = nonzero_random(&mut rng, t);
        let w = nonzero_random(&mut rng, w_piece);
        let ex = eta(x);
        let lhs = pair(&act(x, &v), &w);
        let rhs = koszul(x.is_odd(), is_odd(&v)) * ex.coefficient() * pair(&v, &act(ex.gen, &w));
        // symmetry on the pair (x v, w)
        let xv = act(x, &v);
        let flipped = koszul(is_odd(&xv), is_odd(&w)) * pair(&w, &xv);
        report.record(lhs == rhs && lhs == flipped, !lhs.is_zero(), || {
            format!("x={x} v={v} w={w}: <xv,w>={lhs}, <v,eta(x)w>={rhs}, flipped={flipped}")
        });
    }
    report
}

/// Contravariance for modes of composite states: `<X v, w> = (-1)^{X v} <v, eta(X) w>`,
/// with `eta(X)` obtained from the word expansion of `X`.
pub fn composite_contravariance(op: &ModeOperator, samples: usize, seed: u64, max_weight: i64) -> SampleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pieces = nonempty_pieces(max_weight, -(max_weight + 2)..=(max_weight + 2));
    let eta_op = op.words(max_weight).eta();
    let odd = op.is_odd();
    let mut report = SampleReport::default();
    let mut attempts = 0;
    while report.samples < samples && attempts < 50 * samples {
        attempts += 1;
        let t = pieces[rng.gen_range(0..pieces.len())];
        let v = nonzero_random(&mut rng, t);
        let xv = op.apply(&v);
        let Some(target) = xv.iter().next().map(|(term, _)| term.tri_degree()) else {
            continue;
        };
        if target.weight > max_weight {
            continue;
        }
        let w_piece = partner(target);
        if enumerate_basis(w_piece).is_empty() {
            continue;
        }
        let w = nonzero_random(&mut rng, w_piece);
        let lhs = pair(&xv, &w);
        let rhs = koszul(odd, is_odd(&v)) * pair(&v, &eta_op.apply(&w));
        report.record(lhs == rhs, !lhs.is_zero(), || format!("mode contravariance v={v} w={w}: {lhs} vs {rhs}"));
    }
    report
}

fn chart_zero(basis: &PieceBasis) -> Vec<VElement> {
    basis.terms().iter().filter(|term| term.base.exp >= 0).cloned().map(VElement::term).collect()
}

/// In every piece, the annihilator of the chart-zero part of the partner piece
/// is exactly the chart-zero part; in particular `<V_0, V_0> = 0`. A sample is
/// one piece.
pub fn chart_zero_self_annihilation(max_weight: i64, degrees: std::ops::RangeInclusive<i64>) -> SampleReport {
    let mut report = SampleReport::default();
    for t in nonempty_pieces(max_weight, degrees) {
        let basis = PieceBasis::of(t);
        let other = PieceBasis::of(partner(t));
        let own = chart_zero(&basis);
        let dual = chart_zero(&other);
        let isotropic = gram(&own, &dual).iter().flatten().all(Scalar::is_zero);
        // annihilator: kernel of w ↦ (<w, u>)_u over the partner's chart-zero vectors
        let images: Vec<SparseVector> = (0..basis.dim())
            .map(|i| {
                let w = basis.basis_element(i);
                SparseVector::from_pairs(dual.iter().enumerate().map(|(j, u)| (j, pair(&w, u))))
            })
            .collect();
        let annihilator = kernel(&images);
        let expected = basis.coordinate_subspace(|term| term.base.exp >= 0);
        let equal = annihilator.rank() == expected.rank()
            && annihilator.rows().iter().all(|r| expected.contains(r));
        report.record(isotropic && equal, !dual.is_empty(), || {
            format!("{t:?}: isotropic {isotropic}, annihilator rank {} vs {}", annihilator.rank(), expected.rank())
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::CompositeState;
    use crate::module::BaseMonomial;

    fn form(exp: i64, is_form: bool) -> LaurentForm {
        LaurentForm::monomial(BaseMonomial { exp, form: is_form }, int(1))
    }

    #[test]
    fn residue_examples() {
        assert_eq!(residue_pair(&form(3, false), &form(-4, true)), int(1));
        assert_eq!(residue_pair(&form(2, false), &form(3, true)), int(0));
        assert_eq!(residue_pair(&form(0, true), &form(-1, false)), int(1));
        assert_eq!(residue_pair(&form(-1, false), &form(0, true)), int(1));
        assert_eq!(residue_pair(&form(-1, false), &form(0, false)), int(0));
    }

    #[test]
    fn pair_examples() {
        let v = VElement::monomial(&[GenMode::b(-1)], BaseMonomial::function(0));
        let w = VElement::monomial(&[GenMode::a(-1)], BaseMonomial::form(-1));
        assert_eq!(pair(&v, &w), int(-1));
        assert_eq!(pair(&VElement::base(BaseMonomial::function(3)), &VElement::base(BaseMonomial::form(-4))), int(1));
        assert!(pair(&v, &VElement::base(BaseMonomial::form(-1))).is_zero());
    }

    #[test]
    fn gram_examples() {
        for m in -3..=3 {
            let r = gram_matrix(TriDegree::new(0, 0, m), TriDegree::new(0, 1, -m - 1));
            assert_eq!(r.gram, vec![vec!["1".to_string()]]);
            assert!(r.nondegenerate);
        }
        let r = gram_matrix(TriDegree::new(0, 0, 1), TriDegree::new(1, 1, -3));
        assert_eq!(r.rank, 0);
    }

    #[test]
    fn every_weight_one_piece_has_a_full_rank_partner() {
        for p in realized_fermions(1) {
            for d in -4..=4 {
                let t = TriDegree::new(1, p, d);
                if enumerate_basis(t).is_empty() {
                    continue;
                }
                assert_eq!(observed_complement(t, -8..=8), vec![partner(t).degree], "{t:?}");
                assert!(gram_matrix(t, partner(t)).nondegenerate, "{t:?}");
            }
        }
    }

    #[test]
    fn sampled_contravariance_and_symmetry() {
        let r = contravariance_check(100, 7, 2);
        assert!(r.passed(), "{:?}", r.counterexamples);
        assert!(r.nontrivial > 10);
    }

    #[test]
    fn chart_zero_annihilates_itself() {
        let r = chart_zero_self_annihilation(2, -4..=4);
        assert!(r.passed(), "{:?}", r.counterexamples);
    }

    #[test]
    fn composite_modes_are_contravariant() {
        let states = [
            VElement::base(BaseMonomial::function(2)),
            VElement::monomial(&[GenMode::a(-1)], BaseMonomial::function(1)),
            VElement::monomial(&[GenMode::psi(-1)], BaseMonomial::form(0)),
        ];
        for s in states {
            let u = CompositeState::new(s).unwrap();
            for n in -1..=1 {
                let r = composite_contravariance(&ModeOperator::new(u.clone(), n), 20, 3, 2);
                assert!(r.passed(), "{:?}", r.counterexamples);
            }
        }
    }
}
