//! SVG pictures of a tiling.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::{Algorithm, LatticeVector};
use crate::subdivision::{initial, Planar};
use crate::tiling::{check_leaves, TilingStream};

/// Most triangles a single picture will hold.
pub const MAX_POLYGONS: u64 = 1 << 16;

#[derive(Clone, Copy, Debug)]
pub struct RenderOptions {
    /// Side of the square in pixels.
    pub size: u32,
    /// Vertices labelled `(a1,a2)/q`, smallest denominators first.
    pub label_cap: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            size: 512,
            label_cap: 200,
        }
    }
}

const MARGIN: f64 = 24.0;

fn project(v: &LatticeVector, size: f64) -> (f64, f64) {
    let (x, y) = v.coords_f64();
    (MARGIN + x * size, MARGIN + (1.0 - y) * size)
}

fn points(g: &[LatticeVector; 3], size: f64) -> String {
    let mut s = String::new();
    for (i, v) in g.iter().enumerate() {
        let (x, y) = project(v, size);
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:.3},{y:.3}");
    }
    s
}

/// One `<polygon>` per triangle of the depth-`depth` tiling, in enumeration order.
pub fn render_svg(algorithm: Algorithm, depth: u32, options: RenderOptions) -> Result<String> {
    let rule = Planar::new(algorithm)?;
    check_leaves(&rule, depth, MAX_POLYGONS)?;
    if options.size == 0 {
        return Err(Error::InvalidInput("picture size must be positive".into()));
    }
    let size = options.size as f64;
    let full = size + 2.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{full}" height="{full}" viewBox="0 0 {full} {full}">"#
    );
    let _ = writeln!(svg, "<title>algorithm {algorithm}, depth {depth}</title>");
    let _ = writeln!(
        svg,
        r##"<g id="tiles" fill="none" stroke="#333" stroke-width="0.6" stroke-linejoin="round">"##
    );
    let mut vertices = BTreeSet::new();
    for cell in TilingStream::new(rule, depth) {
        let g = cell.vectors();
        let _ = writeln!(
            svg,
            r#"<polygon points="{}" data-code="{}"/>"#,
            points(g, size),
            cell.code
        );
        vertices.extend(g.iter().copied());
    }
    let _ = writeln!(svg, "</g>");

    let mut outline = String::new();
    for b in initial(algorithm)? {
        let [a, c, d] = b.vectors.map(|v| project(&v, size));
        let _ = write!(
            outline,
            "M{:.3},{:.3} L{:.3},{:.3} L{:.3},{:.3} Z ",
            a.0, a.1, c.0, c.1, d.0, d.1
        );
    }
    let _ = writeln!(
        svg,
        r##"<path id="initial" d="{}" fill="none" stroke="#000" stroke-width="2.5"/>"##,
        outline.trim_end()
    );

    if options.label_cap > 0 {
        let _ = writeln!(
            svg,
            r##"<g id="labels" font-family="sans-serif" font-size="9" fill="#a00" text-anchor="middle">"##
        );
        for v in vertices.iter().take(options.label_cap) {
            let (x, y) = project(v, size);
            let _ = writeln!(
                svg,
                r#"<text x="{x:.3}" y="{:.3}">{}</text>"#,
                y - 3.0,
                v.label()
            );
        }
        let _ = writeln!(svg, "</g>");
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}
