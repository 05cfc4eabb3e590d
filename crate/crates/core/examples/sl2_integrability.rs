//! The sl(2) zero modes and their local nilpotence on global sections.

use chiral_duality::charts::{integrability_check, ChartInvolution, Cohomology};
use chiral_duality::fields::Sl2Modes;

fn main() {
    let sl2 = Sl2Modes::derive(2, -2..=2).expect("sl(2) solves");
    for (name, op) in sl2.operators() {
        println!("{name} = mode 0 of {}", op.state.element());
    }
    let h = Cohomology::compute(ChartInvolution::shared(), 2, 4).expect("cohomology");
    let r = integrability_check(&h, &sl2, |w| (2 * w + 3) as usize);
    println!("checked {} H0 vectors, largest nilpotence exponent {}", r.vectors_checked, r.max_exponent);
    for (key, spectrum) in r.h_eigenvalues.iter().take(8) {
        println!("  h0 on H0{key:?}: {spectrum:?}");
    }
    for (w, v) in &r.witnesses {
        println!("  f0 not nilpotent at weight {w} on {v}");
    }
}
