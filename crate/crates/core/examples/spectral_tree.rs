//! Builds the spectral tree of a digit sequence and prints each level.
//!
//! `cargo run --example spectral_tree -- 0,1,2,3 3`

use kohmoto::ratcf::ContinuedFraction;
use kohmoto::tree::build_tree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let digits: ContinuedFraction = args.next().as_deref().unwrap_or("0,1,2,3").parse()?;
    let depth = match args.next() {
        Some(d) => d.parse()?,
        None => digits.len() - 1,
    };
    let tree = build_tree(&digits, depth)?;
    for k in 0..=depth {
        let c = tree.convergent(k)?;
        let counts = tree.level_counts(k)?;
        println!(
            "level {k}  {}/{}  Z_A={} Z_B={}  {}",
            c.p,
            c.q,
            counts.z_a,
            counts.z_b,
            tree.labels(k)?
        );
    }
    Ok(())
}
