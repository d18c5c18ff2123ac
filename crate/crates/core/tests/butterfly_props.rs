use std::collections::BTreeMap;

use kohmoto::butterfly::{
    build_dataset, enumerate_rationals, gap_width_report, render_svg, Paint, Palette, PanelMode,
    SvgOptions,
};
use kohmoto::indexing::gap_index;
use kohmoto::ratcf::{gcd, Int, Rational};
use kohmoto::spectrum::ids_identity_holds;
use kohmoto::tree::build_tree;
use proptest::prelude::*;

fn totient(n: Int) -> Int {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as Int
}

#[test]
fn enumeration_counts_match_totients() {
    for q_max in 1..=30 {
        let expect: Int = (2..=q_max).map(totient).sum();
        let got = enumerate_rationals(q_max);
        assert_eq!(got.len() as Int, expect);
        for w in got.windows(2) {
            assert!((w[0].den(), w[0].num()) < (w[1].den(), w[1].num()));
        }
    }
}

#[test]
fn rows_are_complete_and_consistent() {
    let d = build_dataset(20, 1.0).unwrap();
    assert_eq!(d.failed_rows().count(), 0);
    for row in &d.rows {
        let s = row.spectrum.as_ref().unwrap();
        let q = row.alpha.den();
        assert_eq!(s.bands.len() as Int, q);
        let gaps = row.indexed_gaps();
        assert_eq!(gaps.len() as Int, q - 1);
        for (n, _, _, c) in gaps {
            assert!(-q <= 2 * c && 2 * c < q);
            assert!(ids_identity_holds(n as Int, c, row.alpha).unwrap());
        }
    }
}

#[test]
fn rows_agree_with_tree_indices() {
    let d = build_dataset(40, 1.0).unwrap();
    let rows: BTreeMap<(Int, Int), BTreeMap<usize, Int>> = d
        .rows
        .iter()
        .map(|r| {
            let by_n = r
                .indexed_gaps()
                .into_iter()
                .map(|(n, _, _, c)| (n, c))
                .collect();
            ((r.alpha.num(), r.alpha.den()), by_n)
        })
        .collect();
    let mut compared = 0;
    for digits in [
        "0,1,1,1,1,1,1,1,1",
        "0,3,2,1,2,1,1",
        "0,2,1,3,1,2",
        "0,4,1,2,3",
    ] {
        let cf = digits.parse().unwrap();
        let depth = digits.split(',').count() - 1;
        let tree = build_tree(&cf, depth).unwrap();
        for k in 0..=depth {
            let c = tree.convergent(k).unwrap();
            let Some(row) = rows.get(&(c.p, c.q)) else {
                continue;
            };
            for v in tree.gaps_at(k).unwrap() {
                let (za, zb) = tree.prefix_counts(v).unwrap();
                if let Some(&index) = row.get(&(za + zb)) {
                    assert_eq!(index, gap_index(&tree, v).unwrap().value, "{digits} {v:?}");
                    compared += 1;
                }
            }
        }
    }
    assert!(compared > 50, "{compared}");
}

#[test]
fn serialization_is_deterministic() {
    let a = build_dataset(15, 1.0).unwrap();
    let b = build_dataset(15, 1.0).unwrap();
    assert_eq!(
        a.to_json::<()>(None).unwrap(),
        b.to_json::<()>(None).unwrap()
    );
    assert_eq!(a.to_csv(None).unwrap(), b.to_csv(None).unwrap());
    for mode in [PanelMode::Gaps, PanelMode::Bands] {
        let opts = SvgOptions {
            mode,
            ..SvgOptions::default()
        };
        assert_eq!(
            render_svg(&a, &opts).unwrap(),
            render_svg(&b, &opts).unwrap()
        );
    }
}

#[test]
fn json_shape() {
    let d = build_dataset(3, 1.0).unwrap();
    let v: serde_json::Value = serde_json::from_str(&d.to_json::<()>(None).unwrap()).unwrap();
    assert_eq!(v["q_max"], 3);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["rows"][0]["gaps"][1]["index"], -1);
    assert!(v["rows"][0]["gaps"][0]["lo"].is_null());
}

#[test]
fn left_panel_paints_only_bounded_gaps_and_lists_every_index() {
    let d = build_dataset(12, 1.0).unwrap();
    let svg = render_svg(&d, &SvgOptions::default()).unwrap();
    let section = |id: &str| -> Vec<String> {
        svg.lines()
            .skip_while(|l| !l.starts_with(&format!(r#"<g id="{id}""#)))
            .skip(1)
            .take_while(|l| *l != "</g>")
            .map(str::to_string)
            .collect()
    };
    let painted: usize = d
        .rows
        .iter()
        .flat_map(|r| r.indexed_gaps())
        .filter(|g| g.3 != 0)
        .count();
    assert_eq!(section("gaps").len(), painted);
    let legend = section("legend");
    for index in d.produced_indices() {
        assert!(legend
            .iter()
            .any(|l| l.contains(&format!(r#"data-index="{index}""#))));
    }
    let bands = render_svg(
        &d,
        &SvgOptions {
            mode: PanelMode::Bands,
            ..SvgOptions::default()
        },
    )
    .unwrap();
    let band_lines = bands.lines().filter(|l| l.starts_with("<line")).count();
    assert_eq!(
        band_lines,
        d.rows.iter().map(|r| r.alpha.den() as usize).sum::<usize>()
    );
}

#[test]
fn width_report_has_one_class_per_magnitude() {
    let d = build_dataset(20, 1.0).unwrap();
    let r = gap_width_report(&d);
    let mags: Vec<Int> = r.classes.iter().map(|c| c.abs_index).collect();
    assert_eq!(mags, (1..=10).collect::<Vec<_>>());
    assert!(!r.pairs.is_empty());
    let text = r.to_string();
    assert!(text.contains("signed pairs"));
}

#[test]
fn frequency_rows_are_ordered_by_denominator() {
    let d = build_dataset(6, 0.5).unwrap();
    let got: Vec<Rational> = d.rows.iter().map(|r| r.alpha).collect();
    assert_eq!(got, enumerate_rationals(6));
}

proptest! {
    #[test]
    fn palette_is_total(index in any::<i128>(), range in 1i128..50) {
        let p = Palette { range, ..Palette::default() };
        match p.paint(index) {
            Paint::Unpainted => prop_assert_eq!(index, 0),
            Paint::Color(_) => prop_assert_ne!(index, 0),
        }
    }
}
