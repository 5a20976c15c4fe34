//! Deterministic rendering of 2-D layouts: SVG scatter plots (a small
//! svg/rect/circle/text/g subset) and CSV export. Identical inputs produce
//! byte-identical output.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::numerics::Matrix;

#[derive(Debug, Error)]
pub enum VizError {
    #[error("empty point set")]
    EmptyPointSet,
    #[error("points ({points}) and labels ({labels}) counts differ")]
    CountMismatch { points: usize, labels: usize },
    #[error("palette is missing colour for label {0:?}")]
    MissingColour(String),
    #[error("width/height must exceed twice the margin")]
    ViewportTooSmall,
}

/// Fixed colours for the Sembuster partitions.
pub const SEMBUSTER_PALETTE: [(&str, &str); 3] =
    [("A", "#00FFFF"), ("B", "#FF0000"), ("C", "#0000FF")];

/// Ten fixed colours covering the graph-level domains; assigned to sorted
/// distinct labels in order.
pub const DOMAIN_COLOURS: [&str; 10] = [
    "#1F77B4", "#FF7F0E", "#2CA02C", "#D62728", "#9467BD", "#8C564B", "#E377C2",
    "#7F7F7F", "#BCBD22", "#17BECF",
];

#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub points: Matrix,
    pub labels: Vec<String>,
    pub palette: BTreeMap<String, String>,
    pub width: u32,
    pub height: u32,
    pub margin: f64,
    pub point_radius: f64,
    pub title: Option<String>,
    pub legend: bool,
}

impl PlotSpec {
    /// Builds a spec with default geometry and an automatic palette:
    /// Sembuster colours when the labels are exactly {A,B,C}, the fixed
    /// domain cycle otherwise.
    pub fn new(points: Matrix, labels: Vec<String>) -> Result<Self, VizError> {
        if points.rows() != labels.len() {
            return Err(VizError::CountMismatch {
                points: points.rows(),
                labels: labels.len(),
            });
        }
        let palette = default_palette(&labels);
        Ok(PlotSpec {
            points,
            labels,
            palette,
            width: 800,
            height: 800,
            margin: 40.0,
            point_radius: 2.5,
            title: None,
            legend: false,
        })
    }
}

pub fn default_palette(labels: &[String]) -> BTreeMap<String, String> {
    let mut distinct: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    distinct.sort();
    distinct.dedup();
    let sembuster: Vec<&str> = SEMBUSTER_PALETTE.iter().map(|&(l, _)| l).collect();
    let mut palette = BTreeMap::new();
    if distinct == sembuster {
        for (label, colour) in SEMBUSTER_PALETTE {
            palette.insert(label.to_string(), colour.to_string());
        }
    } else {
        for (i, label) in distinct.iter().enumerate() {
            palette.insert(
                label.to_string(),
                DOMAIN_COLOURS[i % DOMAIN_COLOURS.len()].to_string(),
            );
        }
    }
    palette
}

/// Maps the data bounding box into the margin-inset viewport, preserving
/// aspect ratio; degenerate extents collapse to the viewport centre.
fn viewport_map(spec: &PlotSpec) -> impl Fn(f64, f64) -> (f64, f64) {
    let n = spec.points.rows();
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        min_x = min_x.min(spec.points[(i, 0)]);
        max_x = max_x.max(spec.points[(i, 0)]);
        min_y = min_y.min(spec.points[(i, 1)]);
        max_y = max_y.max(spec.points[(i, 1)]);
    }
    let span_x = max_x - min_x;
    let span_y = max_y - min_y;
    let avail_w = spec.width as f64 - 2.0 * spec.margin;
    let avail_h = spec.height as f64 - 2.0 * spec.margin;
    let mut scale = f64::INFINITY;
    if span_x > 0.0 {
        scale = scale.min(avail_w / span_x);
    }
    if span_y > 0.0 {
        scale = scale.min(avail_h / span_y);
    }
    if !scale.is_finite() {
        scale = 0.0;
    }
    let offset_x = spec.margin + (avail_w - span_x * scale) / 2.0;
    let offset_y = spec.margin + (avail_h - span_y * scale) / 2.0;
    let height = spec.height as f64;
    move |x: f64, y: f64| {
        let px = offset_x + (x - min_x) * scale;
        // SVG y grows downward; keep data y growing upward.
        let py = height - (offset_y + (y - min_y) * scale);
        (px, py)
    }
}

/// Renders a scatter plot. One circle per point in input order.
pub fn render_svg(spec: &PlotSpec) -> Result<String, VizError> {
    let n = spec.points.rows();
    if n == 0 {
        return Err(VizError::EmptyPointSet);
    }
    if spec.labels.len() != n {
        return Err(VizError::CountMismatch { points: n, labels: spec.labels.len() });
    }
    if (spec.width as f64) <= 2.0 * spec.margin || (spec.height as f64) <= 2.0 * spec.margin {
        return Err(VizError::ViewportTooSmall);
    }
    for label in &spec.labels {
        if !spec.palette.contains_key(label) {
            return Err(VizError::MissingColour(label.clone()));
        }
    }

    let map = viewport_map(spec);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        spec.width, spec.height, spec.width, spec.height
    );
    let _ = writeln!(
        svg,
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#FFFFFF\"/>",
        spec.width, spec.height
    );
    if let Some(title) = &spec.title {
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>",
            spec.width / 2,
            24,
            escape_xml(title)
        );
    }
    svg.push_str("<g>\n");
    for i in 0..n {
        let (px, py) = map(spec.points[(i, 0)], spec.points[(i, 1)]);
        let colour = &spec.palette[&spec.labels[i]];
        let _ = writeln!(
            svg,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
            fmt_px(px),
            fmt_px(py),
            fmt_px(spec.point_radius),
            colour
        );
    }
    svg.push_str("</g>\n");
    if spec.legend {
        let mut entries: Vec<(&String, &String)> = spec.palette.iter().collect();
        entries.retain(|(label, _)| spec.labels.contains(label));
        svg.push_str("<g>\n");
        for (row, (label, colour)) in entries.iter().enumerate() {
            let y = spec.margin + 14.0 * row as f64;
            let _ = writeln!(
                svg,
                "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>",
                fmt_px(spec.width as f64 - spec.margin - 80.0),
                fmt_px(y),
                colour
            );
            let _ = writeln!(
                svg,
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
                fmt_px(spec.width as f64 - spec.margin - 66.0),
                fmt_px(y + 9.0),
                escape_xml(label)
            );
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn fmt_px(v: f64) -> String {
    format!("{v:.3}")
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Formats with 9 significant digits; round-trips through parsing to the
/// same 9 digits.
pub fn fmt_sig9(v: f64) -> String {
    format!("{v:.8e}")
}

/// CSV export: header `id,x,y,label`, row ids are point indices.
pub fn export_csv(points: &Matrix, labels: &[String]) -> Result<String, VizError> {
    let ids: Vec<String> = (0..points.rows()).map(|i| i.to_string()).collect();
    export_csv_with_ids(&ids, points, labels)
}

/// CSV export with caller-provided row ids (e.g. argument names).
pub fn export_csv_with_ids(
    ids: &[String],
    points: &Matrix,
    labels: &[String],
) -> Result<String, VizError> {
    if points.rows() != labels.len() || points.rows() != ids.len() {
        return Err(VizError::CountMismatch {
            points: points.rows(),
            labels: labels.len(),
        });
    }
    let mut out = String::from("id,x,y,label\n");
    for i in 0..points.rows() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            ids[i],
            fmt_sig9(points[(i, 0)]),
            fmt_sig9(points[(i, 1)]),
            labels[i]
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_for(points: Vec<(f64, f64)>, labels: &[&str]) -> PlotSpec {
        let n = points.len();
        let data = points.into_iter().flat_map(|(x, y)| [x, y]).collect();
        PlotSpec::new(
            Matrix::from_vec(n, 2, data).unwrap(),
            labels.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    /// Minimal well-formedness check for the SVG subset we emit.
    fn assert_well_formed_xml(doc: &str) {
        let mut stack: Vec<String> = Vec::new();
        let mut rest = doc;
        while let Some(start) = rest.find('<') {
            let end = rest[start..].find('>').expect("unclosed tag") + start;
            let tag = &rest[start + 1..end];
            rest = &rest[end + 1..];
            if let Some(name) = tag.strip_prefix('/') {
                assert_eq!(stack.pop().as_deref(), Some(name), "mismatched close");
            } else if !tag.ends_with('/') {
                let name = tag.split_whitespace().next().unwrap();
                stack.push(name.to_string());
            }
        }
        assert!(stack.is_empty(), "unclosed elements: {stack:?}");
    }

    fn circle_coords(svg: &str) -> Vec<(f64, f64)> {
        svg.lines()
            .filter(|l| l.starts_with("<circle"))
            .map(|l| {
                let grab = |attr: &str| {
                    let pat = format!("{attr}=\"");
                    let s = l.find(&pat).unwrap() + pat.len();
                    let e = l[s..].find('"').unwrap() + s;
                    l[s..e].parse::<f64>().unwrap()
                };
                (grab("cx"), grab("cy"))
            })
            .collect()
    }

    #[test]
    fn single_point_at_centre() {
        let spec = spec_for(vec![(3.7, -1.2)], &["A"]);
        let svg = render_svg(&spec).unwrap();
        assert_eq!(circle_coords(&svg), vec![(400.0, 400.0)]);
    }

    #[test]
    fn square_corners_map_to_viewport_corners() {
        let spec = spec_for(
            vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)],
            &["A", "A", "B", "B"],
        );
        let svg = render_svg(&spec).unwrap();
        let coords = circle_coords(&svg);
        assert_eq!(coords[0], (40.0, 760.0)); // data (0,0) = bottom-left
        assert_eq!(coords[1], (760.0, 760.0));
        assert_eq!(coords[2], (40.0, 40.0));
        assert_eq!(coords[3], (760.0, 40.0));
    }

    #[test]
    fn sembuster_palette_applied() {
        let spec = spec_for(vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], &["A", "B", "C"]);
        assert_eq!(spec.palette["A"], "#00FFFF");
        assert_eq!(spec.palette["B"], "#FF0000");
        assert_eq!(spec.palette["C"], "#0000FF");
        let svg = render_svg(&spec).unwrap();
        assert!(svg.contains("fill=\"#00FFFF\""));
    }

    #[test]
    fn well_formed_with_circle_count() {
        let mut spec = spec_for(
            vec![(0.0, 0.0), (1.0, 2.0), (-1.0, 0.5), (0.3, 0.3)],
            &["x", "y", "x", "y"],
        );
        spec.title = Some("layout".into());
        spec.legend = true;
        let svg = render_svg(&spec).unwrap();
        assert_well_formed_xml(&svg);
        assert_eq!(svg.matches("<circle").count(), 4);
    }

    #[test]
    fn deterministic_bytes() {
        let spec = spec_for(vec![(0.1, 0.9), (0.4, -0.2)], &["u", "v"]);
        assert_eq!(render_svg(&spec).unwrap(), render_svg(&spec).unwrap());
    }

    #[test]
    fn ordering_preserved_along_axes() {
        let spec = spec_for(vec![(0.0, 0.0), (0.5, 0.1), (2.0, 0.2)], &["a", "a", "a"]);
        let svg = render_svg(&spec).unwrap();
        let coords = circle_coords(&svg);
        assert!(coords[0].0 < coords[1].0 && coords[1].0 < coords[2].0);
        assert!(coords[0].1 > coords[1].1 && coords[1].1 > coords[2].1);
    }

    #[test]
    fn empty_point_set_rejected() {
        let spec = PlotSpec::new(Matrix::zeros(0, 2), vec![]).unwrap();
        assert!(matches!(render_svg(&spec), Err(VizError::EmptyPointSet)));
    }

    #[test]
    fn csv_empty_and_single() {
        let empty = export_csv(&Matrix::zeros(0, 2), &[]).unwrap();
        assert_eq!(empty, "id,x,y,label\n");
        let one = export_csv(
            &Matrix::zeros(1, 2),
            &["A".to_string()],
        )
        .unwrap();
        assert_eq!(one.lines().count(), 2);
        assert!(one.ends_with(",A\n"));
    }

    #[test]
    fn csv_round_trips_to_nine_digits() {
        let points =
            Matrix::from_vec(2, 2, vec![1.23456789e-3, -9.87654321e4, 0.5, 3.0]).unwrap();
        let labels = vec!["a".to_string(), "b".to_string()];
        let csv = export_csv(&points, &labels).unwrap();
        for (i, line) in csv.lines().skip(1).enumerate() {
            let cols: Vec<&str> = line.split(',').collect();
            let x: f64 = cols[1].parse().unwrap();
            let y: f64 = cols[2].parse().unwrap();
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
            if points[(i, 0)] != 0.0 {
                assert!(rel(x, points[(i, 0)]) < 1e-8);
            }
            if points[(i, 1)] != 0.0 {
                assert!(rel(y, points[(i, 1)]) < 1e-8);
            }
        }
    }
}
