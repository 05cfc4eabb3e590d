//! Čech cohomology dimensions `h0(i, p)`, `h1(i, p)` by conformal weight.
//!
//! cargo run --release --example hodge_diamond -- 2

use chiral_duality::charts::{ChartInvolution, Cohomology};

fn main() {
    let max_weight: i64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let sigma = ChartInvolution::shared();
    let start = std::time::Instant::now();
    let h = Cohomology::compute(sigma, max_weight, 4).expect("cohomology");
    println!("{:>6} {:>7} {:>4} {:>4}  stable", "weight", "fermion", "h0", "h1");
    for e in &h.entries {
        println!("{:>6} {:>7} {:>4} {:>4}  {}", e.weight, e.fermion, e.h0, e.h1, e.stable);
    }
    eprintln!("computed in {:.1?}", start.elapsed());
}
