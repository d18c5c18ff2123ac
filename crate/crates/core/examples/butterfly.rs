//! Builds the colored butterfly and writes both panels plus the data.
//!
//! `cargo run --release --example butterfly -- 30 1.0 out/`

use std::path::PathBuf;

use kohmoto::butterfly::{build_dataset, gap_width_report, render_svg, PanelMode, SvgOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let q_max = args.next().as_deref().unwrap_or("30").parse()?;
    let lambda: f64 = args.next().as_deref().unwrap_or("1").parse()?;
    let out = PathBuf::from(args.next().unwrap_or_else(|| "butterfly-out".into()));
    std::fs::create_dir_all(&out)?;

    let dataset = build_dataset(q_max, lambda)?;
    for mode in [PanelMode::Gaps, PanelMode::Bands] {
        let svg = render_svg(
            &dataset,
            &SvgOptions {
                mode,
                ..SvgOptions::default()
            },
        )?;
        let name = match mode {
            PanelMode::Gaps => "gaps.svg",
            PanelMode::Bands => "bands.svg",
        };
        std::fs::write(out.join(name), svg)?;
    }
    std::fs::write(out.join("butterfly.csv"), dataset.to_csv(None)?)?;
    println!(
        "{} rows, indices {:?}, written to {}",
        dataset.rows.len(),
        dataset.produced_indices(),
        out.display()
    );
    print!("{}", gap_width_report(&dataset));
    Ok(())
}
