//! Static SVG plots built directly from the serialized geometry, plus a CSV
//! dump of the grid-negativity scan. No timestamps or other varying metadata
//! are emitted, so outputs are byte-deterministic.

use std::fmt::Write as _;

use roacert_core::geometry::Tessellation;
use roacert_core::lyapunov::{PwaLyapunov, RoaEstimate};
use roacert_core::verify::GridEvaluation;

const SIZE: f64 = 600.0;
const PAD: f64 = 20.0;

struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl Frame {
    fn from_tess(tess: &Tessellation) -> Frame {
        let vs = tess.region.vertices.as_ref().expect("region has vertices");
        let x0 = vs.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
        let x1 = vs.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
        let y0 = vs.iter().map(|v| v[1]).fold(f64::INFINITY, f64::min);
        let y1 = vs.iter().map(|v| v[1]).fold(f64::NEG_INFINITY, f64::max);
        let span = (x1 - x0).max(y1 - y0).max(1e-12);
        Frame { x0, y0, scale: (SIZE - 2.0 * PAD) / span }
    }

    fn map(&self, p: &[f64]) -> (f64, f64) {
        // SVG y axis points down
        (PAD + (p[0] - self.x0) * self.scale, SIZE - PAD - (p[1] - self.y0) * self.scale)
    }
}

fn svg_open(out: &mut String) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
}

fn polygon(out: &mut String, frame: &Frame, pts: &[Vec<f64>], style: &str) {
    let mut coords = String::new();
    for p in pts {
        let (x, y) = frame.map(p);
        let _ = write!(coords, "{x:.2},{y:.2} ");
    }
    let _ = writeln!(out, "<polygon points=\"{}\" style=\"{style}\"/>", coords.trim_end());
}

fn cell_edges(out: &mut String, frame: &Frame, tess: &Tessellation, stroke: &str) {
    for cell in &tess.cells {
        let pts: Vec<Vec<f64>> =
            cell.vertex_ids.iter().map(|&v| tess.vertices[v].clone()).collect();
        polygon(out, frame, &pts, &format!("fill:none;stroke:{stroke};stroke-width:1"));
    }
}

fn region_outline(out: &mut String, frame: &Frame, tess: &Tessellation) {
    if let Some(vs) = &tess.region.vertices {
        polygon(out, frame, vs, "fill:none;stroke:black;stroke-width:2");
    }
    if let Some(h) = &tess.hole {
        if let Some(vs) = &h.vertices {
            if vs.len() >= 3 {
                polygon(out, frame, vs, "fill:none;stroke:#3355cc;stroke-width:2");
            }
        }
    }
}

/// The raw tessellation: cell edges, region outline, and the prior hole.
pub fn svg_tessellation(tess: &Tessellation) -> String {
    let frame = Frame::from_tess(tess);
    let mut out = String::new();
    svg_open(&mut out);
    cell_edges(&mut out, &frame, tess, "#999999");
    region_outline(&mut out, &frame, tess);
    out.push_str("</svg>\n");
    out
}

/// Exact piecewise-linear level sets of the learnt function: on each cell the
/// function is affine, so a level crosses it as a straight segment between
/// edge intersections.
pub fn svg_level_sets(lyap: &PwaLyapunov, n_levels: usize) -> String {
    let tess = &lyap.tess;
    let frame = Frame::from_tess(tess);
    let mut out = String::new();
    svg_open(&mut out);
    cell_edges(&mut out, &frame, tess, "#dddddd");

    // value range over all cell vertices
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for cell in &tess.cells {
        for &vid in &cell.vertex_ids {
            let v = lyap.cell_value(cell.id, &tess.vertices[vid]);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    for li in 1..=n_levels {
        let level = lo + (hi - lo) * li as f64 / (n_levels + 1) as f64;
        for cell in &tess.cells {
            let ids = &cell.vertex_ids;
            let mut hits: Vec<Vec<f64>> = Vec::new();
            let n = ids.len();
            for e in 0..n {
                let a = &tess.vertices[ids[e]];
                let b = &tess.vertices[ids[(e + 1) % n]];
                let va = lyap.cell_value(cell.id, a) - level;
                let vb = lyap.cell_value(cell.id, b) - level;
                if (va <= 0.0) != (vb <= 0.0) {
                    let t = va / (va - vb);
                    hits.push(vec![a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
                }
            }
            if hits.len() == 2 {
                let (x1, y1) = frame.map(&hits[0]);
                let (x2, y2) = frame.map(&hits[1]);
                let _ = writeln!(
                    out,
                    "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" style=\"stroke:#cc4433;stroke-width:1\"/>"
                );
            }
        }
    }
    region_outline(&mut out, &frame, tess);
    out.push_str("</svg>\n");
    out
}

/// The certified sublevel set drawn as filled clipped-cell polygons over a
/// faint tessellation.
pub fn svg_roa(lyap: &PwaLyapunov, roa: &RoaEstimate) -> String {
    let tess = &lyap.tess;
    let frame = Frame::from_tess(tess);
    let mut out = String::new();
    svg_open(&mut out);
    cell_edges(&mut out, &frame, tess, "#dddddd");
    for (_, piece) in &roa.pieces {
        if piece.len() >= 3 {
            polygon(&mut out, &frame, piece, "fill:#66aa66;fill-opacity:0.6;stroke:none");
        }
    }
    region_outline(&mut out, &frame, tess);
    out.push_str("</svg>\n");
    out
}

/// CSV dump of the negativity scan: `x1,x2,max_fg`.
pub fn negativity_csv(points: &[GridEvaluation]) -> String {
    let mut out = String::from("x1,x2,max_fg\n");
    for p in points {
        let _ = writeln!(out, "{:.17e},{:.17e},{:.17e}", p.x[0], p.x[1], p.max_fg);
    }
    out
}
