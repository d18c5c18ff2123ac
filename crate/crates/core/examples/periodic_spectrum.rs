//! Bands and indexed gaps of one periodic Kohmoto operator.
//!
//! `cargo run --example periodic_spectrum -- 3/8 1.0`

use kohmoto::indexing::solve_diophantine;
use kohmoto::ratcf::{Int, Rational};
use kohmoto::spectrum::{compute_spectrum, potential_sequence};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let alpha: Rational = args.next().as_deref().unwrap_or("3/8").parse()?;
    let lambda: f64 = args.next().as_deref().unwrap_or("1").parse()?;
    let pot = potential_sequence(alpha, lambda)?;
    println!("V = {:?}", pot.values);
    let s = compute_spectrum(&pot)?;
    for b in &s.bands {
        println!("band {:>2}  [{:+.6}, {:+.6}]", b.ordinal, b.lo, b.hi);
    }
    for g in s.bounded_gaps() {
        let c = solve_diophantine(g.gap_number as Int, alpha.num(), alpha.den())?;
        println!(
            "gap  {:>2}  ({:+.6}, {:+.6})  index {c:+}{}",
            g.gap_number,
            g.lo,
            g.hi,
            if g.degenerate { "  (closed)" } else { "" }
        );
    }
    println!("largest edge residual {:.1e}", s.max_residual);
    Ok(())
}
