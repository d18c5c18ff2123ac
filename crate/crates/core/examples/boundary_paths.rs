//! Follows the boundary path of every indexed gap near the root and shows
//! that the index is carried down the tree.
//!
//! `cargo run --example boundary_paths -- 0,2,1,1,1,1,1,1`

use kohmoto::indexing::{boundary_path, gap_index, verify_conservation};
use kohmoto::ratcf::ContinuedFraction;
use kohmoto::tree::build_tree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let digits: ContinuedFraction = std::env::args()
        .nth(1)
        .as_deref()
        .unwrap_or("0,2,1,1,1,1,1,1")
        .parse()?;
    let depth = digits.len() - 1;
    let tree = build_tree(&digits, depth)?;
    for k in 0..depth.min(3) {
        for v in tree.gaps_at(k)? {
            let index = gap_index(&tree, v)?.value;
            if index == 0 {
                continue;
            }
            let path = boundary_path(&tree, v, depth - k)?;
            let report = verify_conservation(&tree, &path)?;
            let along: Vec<String> = path
                .vertices
                .iter()
                .step_by(2)
                .map(|w| gap_index(&tree, *w).map(|g| g.value.to_string()))
                .collect::<Result<_, _>>()?;
            println!(
                "({k},{}) index {index:>2} {:?}: {}  [{} checks, {} failures]",
                v.position,
                path.side,
                along.join(" "),
                report.records.len(),
                report.failures()
            );
        }
    }
    Ok(())
}
