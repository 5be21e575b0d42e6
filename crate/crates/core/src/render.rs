//! SVG pictures of weighted diagrams.
//!
//! Ownership is rasterized and each row is merged into runs of equal label,
//! one rectangle per run. Drawing happens in diagram coordinates inside a
//! group that flips the y axis, so the view box is the bounding box itself.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{round_significant, JSON_DIGITS};
use crate::point::{Point, Rect};
use crate::voronoi::{Diagram, SiteClass, OWNER_TOL};

pub const MIN_RESOLUTION: usize = 16;
pub const MAX_RESOLUTION: usize = 8192;

pub const DEFAULT_PALETTE: [&str; 8] = [
    "#e41a1c", "#ffd92f", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShowFlags {
    pub sites: bool,
    pub triple_points: bool,
    pub rays: bool,
    pub grid: bool,
}

impl Default for ShowFlags {
    fn default() -> Self {
        ShowFlags {
            sites: true,
            triple_points: true,
            rays: true,
            grid: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub bbox: Rect,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_palette")]
    pub palette: Vec<String>,
    #[serde(default)]
    pub show: ShowFlags,
}

fn default_resolution() -> usize {
    800
}

fn default_palette() -> Vec<String> {
    DEFAULT_PALETTE.iter().map(|s| s.to_string()).collect()
}

impl RenderSpec {
    pub fn new(bbox: Rect) -> RenderSpec {
        RenderSpec {
            bbox,
            resolution: default_resolution(),
            palette: default_palette(),
            show: ShowFlags::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_RESOLUTION..=MAX_RESOLUTION).contains(&self.resolution) {
            return Err(Error::InvalidInput(format!(
                "resolution {} outside [{MIN_RESOLUTION}, {MAX_RESOLUTION}]",
                self.resolution
            )));
        }
        if !self.bbox.is_valid() {
            return Err(Error::InvalidInput("empty bounding box".into()));
        }
        if self.palette.is_empty() {
            return Err(Error::InvalidInput("palette is empty".into()));
        }
        Ok(())
    }
}

fn num(x: f64) -> String {
    format!("{}", round_significant(x, JSON_DIGITS))
}

/// Render `diagram` with optional triple points.
pub fn render_svg(diagram: &Diagram, spec: &RenderSpec, triple_points: &[Point]) -> Result<String> {
    spec.validate()?;
    let b = spec.bbox;
    let raster = diagram.cell_raster(b, spec.resolution)?;
    let n = spec.resolution as f64;
    let (pw, ph) = (b.width() / n, b.height() / n);
    let unit = b.width().min(b.height());

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="{}" height="{}">"#,
        num(b.min.x),
        num(b.min.y),
        num(b.width()),
        num(b.height()),
        spec.resolution,
        num(spec.resolution as f64 * b.height() / b.width()),
    );
    let _ = writeln!(
        s,
        r#"<g transform="matrix(1 0 0 -1 0 {})">"#,
        num(b.min.y + b.max.y)
    );
    let _ = writeln!(s, r#"<g id="cells" shape-rendering="crispEdges" stroke="none">"#);
    for (row, col, len, label) in raster.runs() {
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
            num(b.min.x + col as f64 * pw),
            num(b.max.y - (row + 1) as f64 * ph),
            num(len as f64 * pw),
            num(ph),
            spec.palette[label % spec.palette.len()],
        );
    }
    s.push_str("</g>\n");

    if spec.show.grid {
        let stroke = num(unit * 0.001);
        let _ = writeln!(s, r##"<g id="grid" stroke="#000000" stroke-opacity="0.25" stroke-width="{stroke}">"##);
        let (x0, x1) = (b.min.x.ceil() as i64, b.max.x.floor() as i64);
        let (y0, y1) = (b.min.y.ceil() as i64, b.max.y.floor() as i64);
        if x1 - x0 <= 200 && y1 - y0 <= 200 {
            for x in x0..=x1 {
                let _ = writeln!(
                    s,
                    r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}"/>"#,
                    num(b.min.y),
                    num(b.max.y)
                );
            }
            for y in y0..=y1 {
                let _ = writeln!(
                    s,
                    r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}"/>"#,
                    num(b.min.x),
                    num(b.max.x)
                );
            }
        }
        s.push_str("</g>\n");
    }

    if spec.show.rays {
        if let Ok(classes) = diagram.classify_sites(OWNER_TOL) {
            let reach = 2.0 * (b.width() + b.height());
            let _ = writeln!(s, r##"<g id="rays" stroke="#000000" stroke-width="{}">"##, num(unit * 0.003));
            for (site, class) in diagram.sites().iter().zip(&classes) {
                if let SiteClass::DegenerateRay { direction } = class {
                    let end = site.point + *direction * reach;
                    let _ = writeln!(
                        s,
                        r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                        num(site.point.x),
                        num(site.point.y),
                        num(end.x),
                        num(end.y)
                    );
                }
            }
            s.push_str("</g>\n");
        }
    }

    if spec.show.sites {
        let _ = writeln!(
            s,
            r##"<g id="sites" fill="#000000" stroke="#ffffff" stroke-width="{}">"##,
            num(unit * 0.002)
        );
        for site in diagram.sites() {
            let _ = writeln!(
                s,
                r#"<circle cx="{}" cy="{}" r="{}"/>"#,
                num(site.point.x),
                num(site.point.y),
                num(unit * 0.008)
            );
        }
        s.push_str("</g>\n");
    }

    if spec.show.triple_points && !triple_points.is_empty() {
        let _ = writeln!(
            s,
            r##"<g id="triple-points" fill="#ffffff" stroke="#000000" stroke-width="{}">"##,
            num(unit * 0.002)
        );
        for p in triple_points {
            let _ = writeln!(
                s,
                r#"<circle cx="{}" cy="{}" r="{}"/>"#,
                num(p.x),
                num(p.y),
                num(unit * 0.006)
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DistanceField;
    use crate::voronoi::WeightedSite;

    fn figure_diagram() -> Diagram {
        let sites = [((-2.0, 0.0), 1.0), ((-1.0, 0.0), 0.0), ((1.0, 0.0), 0.0), ((2.0, 0.0), 2.0)]
            .map(|((x, y), w)| WeightedSite::new(Point::new(x, y), w))
            .to_vec();
        Diagram::new(DistanceField::euclidean(), sites).unwrap()
    }

    fn spec(res: usize) -> RenderSpec {
        RenderSpec {
            resolution: res,
            ..RenderSpec::new(Rect::new(Point::new(-3.0, -3.0), Point::new(3.0, 3.0)))
        }
    }

    #[test]
    fn resolution_limits() {
        let d = figure_diagram();
        assert!(render_svg(&d, &spec(15), &[]).is_err());
        assert!(render_svg(&d, &spec(16), &[]).is_ok());
        let mut s = spec(16);
        s.palette.clear();
        assert!(render_svg(&d, &s, &[]).is_err());
    }

    #[test]
    fn well_formed_with_bbox_view() {
        let d = figure_diagram();
        let svg = render_svg(&d, &spec(61), &[Point::new(0.0, 1.0)]).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let root = doc.root_element();
        assert_eq!(root.attribute("viewBox"), Some("-3 -3 6 6"));
        assert!(doc.descendants().any(|n| n.attribute("id") == Some("rays")));
        assert!(doc.descendants().any(|n| n.attribute("id") == Some("triple-points")));
    }

    #[test]
    fn degenerate_cell_is_one_row() {
        let d = figure_diagram();
        let svg = render_svg(&d, &spec(61), &[]).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let red: Vec<_> = doc
            .descendants()
            .filter(|n| n.has_tag_name("rect") && n.attribute("fill") == Some(DEFAULT_PALETTE[0]))
            .collect();
        assert_eq!(red.len(), 1);
        let h: f64 = red[0].attribute("height").unwrap().parse().unwrap();
        assert!((h - 6.0 / 61.0).abs() < 1e-9);
    }

    #[test]
    fn deterministic() {
        let d = figure_diagram();
        assert_eq!(
            render_svg(&d, &spec(64), &[]).unwrap(),
            render_svg(&d, &spec(64), &[]).unwrap()
        );
    }
}
