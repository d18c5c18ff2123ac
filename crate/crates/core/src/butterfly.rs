//! The colored Kohmoto butterfly: spectra of every `H_{p/q}` with
//! `q <= q_max`, each bounded gap labelled by its index, plus CSV/JSON/SVG
//! emitters and a gap-width diagnostic.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indexing::solve_diophantine;
use crate::ratcf::{gcd, Int, Rational};
use crate::spectrum::{
    compute_spectrum, potential_sequence, Spectrum, SpectrumDocument, SpectrumError,
};

#[derive(Debug, Error)]
pub enum ButterflyError {
    #[error("q_max must be at least {min}, got {got}")]
    QMaxTooSmall { min: Int, got: Int },
    #[error("dataset has no rows to render")]
    EmptyDataset,
    #[error("{0}")]
    Row(String),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// All reduced `p/q` with `1 <= p < q <= q_max`, ordered by `q` then `p`.
pub fn enumerate_rationals(q_max: Int) -> Vec<Rational> {
    (2..=q_max)
        .flat_map(|q| {
            (1..q)
                .filter(move |&p| gcd(p, q) == 1)
                .map(move |p| Rational::reduced(p, q).expect("coprime by construction"))
        })
        .collect()
}

/// One rational frequency: its spectrum with indices for gaps `0..=q`, or
/// the error that stopped it.
#[derive(Debug, Clone)]
pub struct ButterflyRow {
    pub alpha: Rational,
    pub spectrum: Option<Spectrum>,
    /// `indices[n]` is the index of gap `n`.
    pub indices: Vec<Int>,
    pub error: Option<String>,
}

impl ButterflyRow {
    fn compute(alpha: Rational, lambda: f64) -> Self {
        let result = potential_sequence(alpha, lambda)
            .and_then(|pot| compute_spectrum(&pot))
            .and_then(|s| {
                let indices = (0..=s.period())
                    .map(|n| solve_diophantine(n as Int, alpha.num(), alpha.den()))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((s, indices))
            });
        match result {
            Ok((s, indices)) => Self {
                alpha,
                spectrum: Some(s),
                indices,
                error: None,
            },
            Err(e) => Self {
                alpha,
                spectrum: None,
                indices: Vec::new(),
                error: Some(e.to_string()),
            },
        }
    }

    /// Bounded gaps with their indices: `(gap_number, lo, hi, index)`.
    pub fn indexed_gaps(&self) -> Vec<(usize, f64, f64, Int)> {
        let Some(s) = &self.spectrum else {
            return Vec::new();
        };
        s.bounded_gaps()
            .map(|g| (g.gap_number, g.lo, g.hi, self.indices[g.gap_number]))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ButterflyDataset {
    pub lambda: f64,
    pub q_max: Int,
    pub rows: Vec<ButterflyRow>,
}

/// Computes every row in parallel; rows keep the enumeration order.
pub fn build_dataset(q_max: Int, lambda: f64) -> Result<ButterflyDataset, ButterflyError> {
    if q_max < 2 {
        return Err(ButterflyError::QMaxTooSmall { min: 2, got: q_max });
    }
    let rows = enumerate_rationals(q_max)
        .into_par_iter()
        .map(|alpha| ButterflyRow::compute(alpha, lambda))
        .collect();
    Ok(ButterflyDataset {
        lambda,
        q_max,
        rows,
    })
}

#[derive(Debug, Serialize)]
struct DatasetDocument<'a, C: Serialize> {
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<&'a C>,
    lambda: f64,
    q_max: Int,
    rows: Vec<RowDocument>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum RowDocument {
    Ok(SpectrumDocument),
    Failed { p: Int, q: Int, error: String },
}

impl ButterflyDataset {
    pub fn failed_rows(&self) -> impl Iterator<Item = &ButterflyRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }

    /// Every index assigned to a bounded gap, sorted, without repeats.
    pub fn produced_indices(&self) -> Vec<Int> {
        let mut out: Vec<Int> = self
            .rows
            .iter()
            .flat_map(|r| r.indexed_gaps().into_iter().map(|g| g.3))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// JSON document `{config?, lambda, q_max, rows: [...]}`.
    pub fn to_json<C: Serialize>(&self, config: Option<&C>) -> Result<String, ButterflyError> {
        let rows = self
            .rows
            .iter()
            .map(|r| match &r.spectrum {
                Some(s) => Ok(RowDocument::Ok(s.to_document()?)),
                None => Ok(RowDocument::Failed {
                    p: r.alpha.num(),
                    q: r.alpha.den(),
                    error: r.error.clone().unwrap_or_default(),
                }),
            })
            .collect::<Result<Vec<_>, ButterflyError>>()?;
        Ok(serde_json::to_string_pretty(&DatasetDocument {
            config,
            lambda: self.lambda,
            q_max: self.q_max,
            rows,
        })?)
    }

    /// CSV with columns `p,q,kind,ordinal,lo,hi,index`. Bands carry an empty
    /// index; unbounded gap endpoints are written as `-inf` / `inf`. An
    /// optional leading `#` comment line carries the run configuration.
    pub fn to_csv(&self, comment: Option<&str>) -> Result<String, ButterflyError> {
        let mut out = Vec::new();
        if let Some(c) = comment {
            for line in c.lines() {
                out.extend_from_slice(format!("# {line}\n").as_bytes());
            }
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["p", "q", "kind", "ordinal", "lo", "hi", "index"])?;
            for row in &self.rows {
                let Some(s) = &row.spectrum else { continue };
                let (p, q) = (row.alpha.num().to_string(), row.alpha.den().to_string());
                for b in &s.bands {
                    w.write_record([
                        p.as_str(),
                        q.as_str(),
                        "band",
                        &b.ordinal.to_string(),
                        &fmt_energy(b.lo),
                        &fmt_energy(b.hi),
                        "",
                    ])?;
                }
                for g in &s.gaps {
                    w.write_record([
                        p.as_str(),
                        q.as_str(),
                        "gap",
                        &g.gap_number.to_string(),
                        &fmt_energy(g.lo),
                        &fmt_energy(g.hi),
                        &row.indices[g.gap_number].to_string(),
                    ])?;
                }
            }
            w.flush().map_err(csv::Error::from)?;
        }
        Ok(String::from_utf8(out).expect("csv output is ascii"))
    }
}

fn fmt_energy(e: f64) -> String {
    if e == f64::INFINITY {
        "inf".into()
    } else if e == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Paint {
    /// Index 0: the unbounded gaps, left as background.
    Unpainted,
    Color(Rgb),
}

/// Signed palette: negative indices in warm hues, positive in cool hues,
/// saturation and lightness fading with `|index|`. Indices beyond `range`
/// share one overflow color per sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Palette {
    pub range: Int,
    pub negative_hue: f64,
    pub positive_hue: f64,
    pub overflow: Rgb,
}

impl Default for Palette {
    fn default() -> Self {
        Self {
            range: 12,
            negative_hue: 0.0,
            positive_hue: 220.0,
            overflow: Rgb(0x8c, 0x8c, 0x8c),
        }
    }
}

fn hsl_to_rgb(h: f64, s: f64, l: f64) -> Rgb {
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let hp = (h.rem_euclid(360.0)) / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    let to = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    Rgb(to(r), to(g), to(b))
}

impl Palette {
    pub fn paint(&self, index: Int) -> Paint {
        if index == 0 {
            return Paint::Unpainted;
        }
        let mag = index.unsigned_abs();
        if mag > self.range.unsigned_abs() {
            return Paint::Color(self.overflow);
        }
        let t = (mag - 1) as f64 / (self.range.max(2) - 1) as f64;
        // hue drifts a little with magnitude so neighbouring classes differ
        let (base, drift) = if index < 0 {
            (self.negative_hue, 45.0)
        } else {
            (self.positive_hue, -60.0)
        };
        Paint::Color(hsl_to_rgb(base + drift * t, 0.9 - 0.5 * t, 0.45 + 0.3 * t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PanelMode {
    /// Bounded gaps painted by index (left panel).
    Gaps,
    /// Bands in a neutral color (right panel).
    Bands,
}

#[derive(Debug, Clone)]
pub struct SvgOptions {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub legend_width: f64,
    pub mode: PanelMode,
    pub palette: Palette,
    /// Row stroke is `max(min_thickness, thickness_scale * q^-thickness_exponent)` pixels.
    pub thickness_scale: f64,
    pub thickness_exponent: f64,
    pub min_thickness: f64,
    pub band_color: Rgb,
    /// Free-form text embedded as an XML comment.
    pub comment: Option<String>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            width: 900.0,
            height: 900.0,
            margin: 50.0,
            legend_width: 110.0,
            mode: PanelMode::Gaps,
            palette: Palette::default(),
            thickness_scale: 8.0,
            thickness_exponent: 1.0,
            min_thickness: 0.6,
            band_color: Rgb(0x20, 0x20, 0x20),
            comment: None,
        }
    }
}

/// Renders one panel: x is energy, y is the frequency `p/q`.
pub fn render_svg(dataset: &ButterflyDataset, opts: &SvgOptions) -> Result<String, ButterflyError> {
    let rows: Vec<(&ButterflyRow, &Spectrum)> = dataset
        .rows
        .iter()
        .filter_map(|r| r.spectrum.as_ref().map(|s| (r, s)))
        .collect();
    if rows.is_empty() {
        return Err(ButterflyError::EmptyDataset);
    }
    let (mut e_min, mut e_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (_, s) in &rows {
        e_min = e_min.min(s.bands[0].lo);
        e_max = e_max.max(s.bands[s.bands.len() - 1].hi);
    }
    let pad = 0.02 * (e_max - e_min).max(1e-9);
    let (e_min, e_max) = (e_min - pad, e_max + pad);

    let legend = opts.mode == PanelMode::Gaps;
    let plot_left = opts.margin;
    let plot_right = opts.width - opts.margin - if legend { opts.legend_width } else { 0.0 };
    let plot_top = opts.margin;
    let plot_bottom = opts.height - opts.margin;
    let x_of = |e: f64| plot_left + (e - e_min) / (e_max - e_min) * (plot_right - plot_left);
    let y_of = |a: f64| plot_bottom - a * (plot_bottom - plot_top);

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
        opts.width, opts.height, opts.width, opts.height
    )
    .unwrap();
    if let Some(c) = &opts.comment {
        writeln!(w, "<!-- {} -->", c.replace("--", "- -")).unwrap();
    }
    writeln!(
        w,
        r#"<rect x="0" y="0" width="{:.0}" height="{:.0}" fill="white"/>"#,
        opts.width, opts.height
    )
    .unwrap();

    // axes
    writeln!(
        w,
        r#"<g stroke="black" stroke-width="1" fill="none"><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/></g>"#,
        plot_left,
        plot_top,
        plot_right - plot_left,
        plot_bottom - plot_top
    )
    .unwrap();
    writeln!(
        w,
        r#"<g font-family="sans-serif" font-size="11" fill="black">"#
    )
    .unwrap();
    for i in 0..=4 {
        let a = i as f64 / 4.0;
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.2}</text>"#,
            plot_left - 6.0,
            y_of(a) + 4.0,
            a
        )
        .unwrap();
    }
    for i in 0..=4 {
        let e = e_min + (e_max - e_min) * i as f64 / 4.0;
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{:.2}</text>"#,
            x_of(e),
            plot_bottom + 16.0,
            e
        )
        .unwrap();
    }
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">energy</text>"#,
        0.5 * (plot_left + plot_right),
        plot_bottom + 34.0
    )
    .unwrap();
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">frequency p/q</text>"#,
        plot_left - 34.0,
        0.5 * (plot_top + plot_bottom),
        plot_left - 34.0,
        0.5 * (plot_top + plot_bottom)
    )
    .unwrap();
    writeln!(w, "</g>").unwrap();

    let thickness = |q: Int| {
        (opts.thickness_scale * (q as f64).powf(-opts.thickness_exponent)).max(opts.min_thickness)
    };

    match opts.mode {
        PanelMode::Bands => {
            writeln!(w, r#"<g id="bands" stroke="{}">"#, opts.band_color).unwrap();
            for (row, s) in &rows {
                let y = y_of(row.alpha.to_f64());
                let t = thickness(row.alpha.den());
                for b in &s.bands {
                    segment(w, x_of(b.lo), x_of(b.hi), y, t, None);
                }
            }
            writeln!(w, "</g>").unwrap();
        }
        PanelMode::Gaps => {
            writeln!(w, r#"<g id="gaps">"#).unwrap();
            for (row, _) in &rows {
                let y = y_of(row.alpha.to_f64());
                let t = thickness(row.alpha.den());
                for (_, lo, hi, index) in row.indexed_gaps() {
                    if let Paint::Color(c) = opts.palette.paint(index) {
                        segment(w, x_of(lo), x_of(hi), y, t, Some(c));
                    }
                }
            }
            writeln!(w, "</g>").unwrap();

            let indices = dataset.produced_indices();
            let x0 = opts.width - opts.margin - opts.legend_width + 14.0;
            let avail = plot_bottom - plot_top;
            let step = (avail / indices.len().max(1) as f64).min(16.0);
            let font = (step * 0.8).clamp(4.0, 11.0);
            writeln!(
                w,
                r#"<g id="legend" font-family="sans-serif" font-size="{font:.2}">"#
            )
            .unwrap();
            for (i, &index) in indices.iter().enumerate() {
                let y = plot_top + step * i as f64;
                let fill = match opts.palette.paint(index) {
                    Paint::Color(c) => c.to_string(),
                    Paint::Unpainted => "none".into(),
                };
                writeln!(
                    w,
                    r#"<rect x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{fill}" data-index="{index}"/><text x="{:.2}" y="{:.2}">{index}</text>"#,
                    step * 0.9,
                    step * 0.8,
                    x0 + step + 4.0,
                    y + step * 0.75
                )
                .unwrap();
            }
            writeln!(w, "</g>").unwrap();
        }
    }
    writeln!(w, "</svg>").unwrap();
    Ok(svg)
}

fn segment(w: &mut String, x1: f64, x2: f64, y: f64, t: f64, color: Option<Rgb>) {
    match color {
        Some(c) => writeln!(
            w,
            r#"<line x1="{x1:.2}" y1="{y:.2}" x2="{x2:.2}" y2="{y:.2}" stroke-width="{t:.2}" stroke="{c}"/>"#
        ),
        None => writeln!(
            w,
            r#"<line x1="{x1:.2}" y1="{y:.2}" x2="{x2:.2}" y2="{y:.2}" stroke-width="{t:.2}"/>"#
        ),
    }
    .unwrap();
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WidthClass {
    pub abs_index: Int,
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignedPair {
    pub p: Int,
    pub q: Int,
    pub abs_index: Int,
    pub negative_width: f64,
    pub positive_width: f64,
}

impl SignedPair {
    pub fn negative_wider(&self) -> bool {
        self.negative_width > self.positive_width
    }
}

/// Empirical comparison of gap widths against the index magnitude.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapWidthReport {
    pub classes: Vec<WidthClass>,
    pub pairs: Vec<SignedPair>,
}

impl GapWidthReport {
    /// Pairs where the negative index is not the wider gap.
    pub fn deviations(&self) -> impl Iterator<Item = &SignedPair> {
        self.pairs.iter().filter(|p| !p.negative_wider())
    }

    /// Whether the mean width decreases as `|index|` grows.
    pub fn mean_width_monotone(&self) -> bool {
        self.classes.windows(2).all(|w| w[1].mean <= w[0].mean)
    }
}

impl fmt::Display for GapWidthReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "|index|  count  mean_width    min_width     max_width")?;
        for c in &self.classes {
            writeln!(
                f,
                "{:>7}  {:>5}  {:<12.6e}  {:<12.6e}  {:<12.6e}",
                c.abs_index, c.count, c.mean, c.min, c.max
            )?;
        }
        let total = self.pairs.len();
        let dev: Vec<_> = self.deviations().collect();
        writeln!(
            f,
            "signed pairs: {total}, negative wider in {}, deviations {}",
            total - dev.len(),
            dev.len()
        )?;
        for d in dev {
            writeln!(
                f,
                "  deviation {}/{} |index|={} -: {:.6e} +: {:.6e}",
                d.p, d.q, d.abs_index, d.negative_width, d.positive_width
            )?;
        }
        writeln!(
            f,
            "mean width monotone in |index|: {}",
            self.mean_width_monotone()
        )
    }
}

pub fn gap_width_report(dataset: &ButterflyDataset) -> GapWidthReport {
    let mut by_class: BTreeMap<Int, Vec<f64>> = BTreeMap::new();
    let mut pairs = Vec::new();
    for row in &dataset.rows {
        let gaps = row.indexed_gaps();
        let mut by_index: BTreeMap<Int, f64> = BTreeMap::new();
        for &(_, lo, hi, index) in &gaps {
            by_class.entry(index.abs()).or_default().push(hi - lo);
            by_index.insert(index, hi - lo);
        }
        for (&index, &pos) in by_index.range(1..) {
            if let Some(&neg) = by_index.get(&-index) {
                pairs.push(SignedPair {
                    p: row.alpha.num(),
                    q: row.alpha.den(),
                    abs_index: index,
                    negative_width: neg,
                    positive_width: pos,
                });
            }
        }
    }
    let classes = by_class
        .into_iter()
        .map(|(abs_index, widths)| WidthClass {
            abs_index,
            count: widths.len(),
            mean: widths.iter().sum::<f64>() / widths.len() as f64,
            min: widths.iter().copied().fold(f64::INFINITY, f64::min),
            max: widths.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
        .collect();
    GapWidthReport { classes, pairs }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        let r: Vec<String> = enumerate_rationals(3)
            .iter()
            .map(|r| r.to_string())
            .collect();
        assert_eq!(r, ["1/2", "1/3", "2/3"]);
        assert_eq!(enumerate_rationals(5).len(), 9);
        assert!(enumerate_rationals(1).is_empty());
    }

    #[test]
    fn minimal_dataset() {
        let d = build_dataset(2, 1.0).unwrap();
        assert_eq!(d.rows.len(), 1);
        let gaps = d.rows[0].indexed_gaps();
        assert_eq!(gaps.len(), 1);
        let (n, lo, hi, index) = gaps[0];
        assert_eq!((n, index), (1, -1));
        assert!(lo.abs() < 1e-10 && (hi - 1.0).abs() < 1e-10);
        assert!(build_dataset(1, 1.0).is_err());
    }

    #[test]
    fn palette_is_total() {
        let p = Palette::default();
        assert_eq!(p.paint(0), Paint::Unpainted);
        for i in [-1000, -13, -12, -1, 1, 2, 12, 13, Int::MAX, Int::MIN] {
            assert!(matches!(p.paint(i), Paint::Color(_)));
        }
        assert_ne!(p.paint(-1), p.paint(1));
        assert_ne!(p.paint(1), p.paint(2));
        assert_eq!(p.paint(13), Paint::Color(p.overflow));
    }

    #[test]
    fn minimal_svg() {
        let d = build_dataset(2, 1.0).unwrap();
        let svg = render_svg(&d, &SvgOptions::default()).unwrap();
        let gap_lines = svg
            .lines()
            .skip_while(|l| !l.starts_with(r#"<g id="gaps">"#))
            .skip(1)
            .take_while(|l| *l != "</g>")
            .count();
        assert_eq!(gap_lines, 1);
        let bands = SvgOptions {
            mode: PanelMode::Bands,
            palette: Palette {
                negative_hue: 100.0,
                ..Palette::default()
            },
            ..SvgOptions::default()
        };
        let a = render_svg(&d, &bands).unwrap();
        let b = render_svg(
            &d,
            &SvgOptions {
                palette: Palette::default(),
                ..bands.clone()
            },
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(!a.contains("legend"));
    }

    #[test]
    fn empty_render_rejected() {
        let d = ButterflyDataset {
            lambda: 1.0,
            q_max: 2,
            rows: Vec::new(),
        };
        assert!(matches!(
            render_svg(&d, &SvgOptions::default()),
            Err(ButterflyError::EmptyDataset)
        ));
    }

    #[test]
    fn csv_layout() {
        let d = build_dataset(2, 1.0).unwrap();
        let csv = d.to_csv(Some("lambda = 1")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# lambda = 1");
        assert_eq!(lines[1], "p,q,kind,ordinal,lo,hi,index");
        assert!(lines[2].starts_with("1,2,band,1,"));
        assert!(lines[2].ends_with(','));
        assert!(lines[4].starts_with("1,2,gap,0,-inf,"));
        assert!(lines[5].ends_with(",-1"));
        assert!(lines[6].contains(",inf,0"));
    }

    #[test]
    fn single_row_width_report() {
        let d = build_dataset(2, 1.0).unwrap();
        let r = gap_width_report(&d);
        assert_eq!(r.classes.len(), 1);
        assert!(r.pairs.is_empty());
    }
}
