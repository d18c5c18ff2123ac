//! Gaps along a boundary path shrink onto a gap of the quasiperiodic operator.
//!
//! `cargo run --example gap_convergence`

use kohmoto::indexing::gap_index;
use kohmoto::ratcf::ContinuedFraction;
use kohmoto::spectrum::{gap_convergence, LevelSpectra};
use kohmoto::tree::build_tree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tree = build_tree(&ContinuedFraction::golden_mean(13), 12)?;
    let spectra = LevelSpectra::compute(&tree, 1.0)?;
    let origin = tree
        .gaps_at(2)?
        .into_iter()
        .find(|v| gap_index(&tree, *v).map(|g| g.value != 0).unwrap_or(false))
        .ok_or("no indexed gap at level 2")?;
    let report = gap_convergence(&tree, &spectra, origin, 10)?;
    println!("origin {origin:?}, {:?}", report.side);
    for s in &report.steps {
        println!(
            "level {:>2}  index {:+}  gap ({:+.8}, {:+.8})  companion {:?} width {:.3e}",
            s.vertex.level,
            s.index,
            s.gap.lo,
            s.gap.hi,
            s.companion_label,
            s.companion_band.width()
        );
    }
    println!(
        "width ratio {:.2e}, all checks passed: {}",
        report.width_ratio,
        report.passed()
    );
    Ok(())
}
