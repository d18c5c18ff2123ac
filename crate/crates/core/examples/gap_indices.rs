//! Gap indices from the tree, checked against the modular-inverse formula.
//!
//! `cargo run --example gap_indices -- 0,3,2,1,2 4`

use kohmoto::indexing::{gap_index, q_matrix, solve_diophantine};
use kohmoto::ratcf::{ContinuedFraction, Int};
use kohmoto::tree::build_tree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let digits: ContinuedFraction = args.next().as_deref().unwrap_or("0,3,2,1,2").parse()?;
    let depth = match args.next() {
        Some(d) => d.parse()?,
        None => digits.len() - 1,
    };
    let tree = build_tree(&digits, depth)?;
    for k in 0..=depth {
        let c = tree.convergent(k)?;
        let mut row = Vec::new();
        for v in tree.gaps_at(k)? {
            let g = gap_index(&tree, v)?;
            let (za, zb) = tree.prefix_counts(v)?;
            assert_eq!(g.value, solve_diophantine((za + zb) as Int, c.p, c.q)?);
            row.push(g.value.to_string());
        }
        println!("level {k} ({}/{}): {}", c.p, c.q, row.join(" "));
    }
    if let Some(v) = tree.gaps_at(depth)?.get(1) {
        println!("Q matrix of {v:?}: {:?}", q_matrix(&tree, *v)?.0);
    }
    Ok(())
}
