use chiral_duality::charts::ChartInvolution;
use chiral_duality::gamma::{koszul, super_bracket, GenMode, Kind};
use chiral_duality::linalg::int;
use chiral_duality::module::{act, enumerate_basis, l_zero, realized_fermions, Term, TriDegree, VElement};
use chiral_duality::pairing::{pair, partner};
use proptest::prelude::*;

fn piece() -> impl Strategy<Value = TriDegree> {
    (0i64..=3, -4i64..=4).prop_flat_map(|(w, d)| {
        let ps = realized_fermions(w);
        prop::sample::select(ps).prop_map(move |p| TriDegree::new(w, p, d))
    })
}

fn term() -> impl Strategy<Value = Term> {
    piece()
        .prop_filter("nonempty piece", |t| !enumerate_basis(*t).is_empty())
        .prop_flat_map(|t| prop::sample::select(enumerate_basis(t)))
}

fn mode() -> impl Strategy<Value = GenMode> {
    (prop::sample::select(Kind::ALL.to_vec()), -4i64..=4).prop_map(|(k, n)| GenMode::new(k, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn modes_shift_gradings(t in term(), x in mode()) {
        let d = t.tri_degree();
        let want = TriDegree::new(d.weight - x.mode, d.fermion + x.fermion_shift(), d.degree + x.degree());
        for (s, _) in act(x, &VElement::term(t.clone())).iter() {
            prop_assert_eq!(s.tri_degree(), want);
            prop_assert_eq!(s.charge(), t.charge() + x.charge_shift());
        }
    }

    #[test]
    fn modes_realize_the_brackets(t in term(), x in mode(), y in mode()) {
        let v = VElement::term(t);
        let lhs = act(x, &act(y, &v)).minus(&act(y, &act(x, &v)).scaled(&koszul(x.is_odd(), y.is_odd())));
        prop_assert_eq!(lhs, v.scaled(&super_bracket(x, y)));
    }

    #[test]
    fn l0_is_the_weight(t in term()) {
        let v = VElement::term(t.clone());
        prop_assert_eq!(l_zero(&v), v.scaled(&int(t.weight())));
    }

    #[test]
    fn terms_render_and_parse(t in term()) {
        let parsed: Term = t.to_string().parse().unwrap();
        prop_assert_eq!(parsed, t);
    }

    #[test]
    fn enumeration_is_graded_sorted_and_distinct(t in piece()) {
        let basis = enumerate_basis(t);
        prop_assert!(basis.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(basis.iter().all(|s| s.tri_degree() == t));
    }

    #[test]
    fn pairing_is_supersymmetric(t in term(), seed in 0usize..64) {
        let others = enumerate_basis(partner(t.tri_degree()));
        prop_assume!(!others.is_empty());
        let u = others[seed % others.len()].clone();
        let sign = koszul(t.is_odd(), u.is_odd());
        let (v, w) = (VElement::term(t), VElement::term(u));
        prop_assert_eq!(pair(&v, &w), sign * pair(&w, &v));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn sigma_is_an_involution_reversing_charge(t in term()) {
        let sigma = ChartInvolution::shared();
        let v = VElement::term(t.clone());
        let s = sigma.sigma(&v);
        prop_assert!(s.iter().all(|(u, _)| u.charge() == -t.charge() && u.weight() == t.weight() && u.fermion() == t.fermion()));
        prop_assert_eq!(sigma.sigma(&s), v);
    }
}
