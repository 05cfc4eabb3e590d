//! The differential Q and its homotopy G0 with QG0 + G0Q = L0.

use chiral_duality::fields::{q_diff, test_vectors, Homotopy};
use chiral_duality::module::{l_zero, BaseMonomial, VElement};

fn main() {
    let b3 = VElement::base(BaseMonomial::function(3));
    println!("Q(b^3) = {}", q_diff(&b3));

    let g = Homotopy::solve(2, -3..=3).expect("homotopy solves");
    println!("solved coefficients (nullity {}):", g.nullity);
    for (j, c) in g.coefficients() {
        println!("  c[{j}] = {c}");
    }

    let vectors = test_vectors(2, -3..=3);
    let good = vectors
        .iter()
        .filter(|v| {
            let gv = g.apply(v).unwrap();
            q_diff(&gv).plus(&g.apply(&q_diff(v)).unwrap()) == l_zero(v)
        })
        .count();
    println!("QG0 + G0Q = L0 on {good} of {} basis vectors", vectors.len());
}
