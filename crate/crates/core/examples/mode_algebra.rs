//! Loop modes acting on the Fock module: brackets, L0, and composite fields.

use chiral_duality::fields::{mode_apply, CompositeState};
use chiral_duality::gamma::{super_bracket, GenMode};
use chiral_duality::module::{act, l_zero, BaseMonomial, VElement};

fn main() {
    let v: VElement = VElement::monomial(&[GenMode::b(-2), GenMode::phi(-1)], BaseMonomial::form(5));
    println!("v        = {v}");
    println!("L0 v     = {}", l_zero(&v));
    println!("a(0) b^3 = {}", act(GenMode::a(0), &VElement::base(BaseMonomial::function(3))));
    println!("[a(1), b(-1)] = {}", super_bracket(GenMode::a(1), GenMode::b(-1)));
    println!("[b(-1), a(1)] = {}", super_bracket(GenMode::b(-1), GenMode::a(1)));

    // Laurent fields: b^{-1} is invertible against b.
    let inverse = CompositeState::new(VElement::base(BaseMonomial::function(-1))).unwrap();
    let w = VElement::monomial(&[GenMode::a(-1)], BaseMonomial::function(2));
    for n in -1..=1 {
        println!("(b^-1)_{n} {w} = {}", mode_apply(&inverse, n, &w));
    }

    let composite = CompositeState::new(VElement::monomial(&[GenMode::a(-1)], BaseMonomial::function(2))).unwrap();
    println!("(a(-1) b^2)_0 b^3 = {}", mode_apply(&composite, 0, &VElement::base(BaseMonomial::function(3))));
}
