//! The residue pairing and its contravariant extension.

use chiral_duality::gamma::GenMode;
use chiral_duality::module::{BaseMonomial, TriDegree, VElement};
use chiral_duality::pairing::{contravariance_check, gram_matrix, pair, partner};

fn main() {
    let v = VElement::monomial(&[GenMode::b(-1)], BaseMonomial::function(0));
    let w = VElement::monomial(&[GenMode::a(-1)], BaseMonomial::form(-1));
    println!("<{v}, {w}> = {}", pair(&v, &w));

    for t in [TriDegree::new(0, 0, 2), TriDegree::new(1, 0, -1), TriDegree::new(2, 1, 0)] {
        let r = gram_matrix(t, partner(t));
        println!("{:?} x {:?}: {}x{} rank {}", r.left, r.right, r.rows, r.cols, r.rank);
        for row in &r.gram {
            println!("  [{}]", row.join(" "));
        }
    }

    let r = contravariance_check(200, 1, 3);
    println!("contravariance + symmetry: {} pairs, {} nonzero, {} failures", r.samples, r.nontrivial, r.counterexamples.len());
}
