//! Duality h0(i, p) = h1(i, 1-p) with the Gram matrices of the pairing.
//!
//! cargo run --release --example duality_table -- 3

use chiral_duality::charts::{q_cohomology, ChartInvolution, Cohomology};

fn main() {
    let max_weight: i64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let h = Cohomology::compute(ChartInvolution::shared(), max_weight, 4).expect("cohomology");
    for e in &h.entries {
        let dual = h.entry(e.weight, 1 - e.fermion).map(|d| d.h1).unwrap_or(0);
        let g = h.pairing(e.weight, e.fermion);
        println!(
            "i={} p={:>2}: h0 = {:>3}, h1(i,1-p) = {:>3}, gram {}x{} rank {}",
            e.weight, e.fermion, e.h0, dual, g.rows, g.cols, g.rank
        );
    }
    let q = q_cohomology(&h);
    println!("Q-cohomology: total {}, in weight 0: {}", q.total, q.weight_zero);
}
