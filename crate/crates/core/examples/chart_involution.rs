//! The chart interchange b -> 1/b lifted to the module.

use chiral_duality::charts::ChartInvolution;
use chiral_duality::gamma::{GenMode, Kind};
use chiral_duality::module::{BaseMonomial, VElement};

fn main() {
    let sigma = ChartInvolution::shared();
    let g = &sigma.generators;
    println!("lambda = {} (unique: {})", g.lambda, g.unique);
    for kind in Kind::ALL {
        println!("  {}~ = {}", kind.symbol(), g.state(kind).element());
    }

    for v in [
        VElement::base(BaseMonomial::function(3)),
        VElement::base(BaseMonomial::form(1)),
        VElement::monomial(&[GenMode::a(-1)], BaseMonomial::function(0)),
        VElement::monomial(&[GenMode::b(-1)], BaseMonomial::function(0)),
    ] {
        let s = sigma.sigma(&v);
        println!("sigma({v}) = {s}");
        assert_eq!(sigma.sigma(&s), v);
    }
}
