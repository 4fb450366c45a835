//! SVG scatter plots of planar composed configurations.
//!
//! A composed point carries a tree of configurations: a macroscopic one at the
//! root and infinitesimal ones at the internal vertices.  The plot places the
//! level below the root at true scale and each further level at geometric
//! display scales ε, ε², …, with a circle around every infinitesimal cluster.
//! The choice of ε is purely visual and never affects any verification.

use fmlog::points::{ConfigTree, FMPoint};
use fmlog::ratio::q_to_f64;
use fmlog::{Error, Result};

const VIEW: f64 = 640.0;
const MARGIN: f64 = 40.0;

struct Placed {
    /// Marked points: label and plane position.
    leaves: Vec<(u32, f64, f64)>,
    /// Cluster circles: center and radius.
    clusters: Vec<(f64, f64, f64)>,
}

/// Places `tree`'s leaves around `(cx, cy)`; `scale` multiplies the offsets of
/// this vertex's children.
fn place(tree: &ConfigTree, cx: f64, cy: f64, scale: f64, depth: u32, eps: f64, out: &mut Placed) {
    match tree {
        ConfigTree::Leaf(l) => out.leaves.push((*l, cx, cy)),
        ConfigTree::Node(children) => {
            if depth > 0 {
                // Offsets have L1 norm at most one per level, so the whole
                // subtree fits inside radius scale * (1 + eps + eps^2 + ...).
                out.clusters.push((cx, cy, scale / (1.0 - eps)));
            }
            for (child, offset) in children {
                let dx = q_to_f64(&offset[0]);
                let dy = q_to_f64(&offset[1]);
                place(
                    child,
                    cx + scale * dx,
                    cy + scale * dy,
                    scale * eps,
                    depth + 1,
                    eps,
                    out,
                );
            }
        }
    }
}

/// Renders a two-dimensional point as a standalone SVG document.
pub fn render_svg(point: &FMPoint, eps: f64) -> Result<String> {
    if point.dim() != 2 {
        return Err(Error::invalid_input(format!(
            "plotting is available for dimension 2 only, got {}",
            point.dim()
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid_input(format!(
            "display scale must lie strictly between 0 and 1, got {eps}"
        )));
    }
    let mut placed = Placed {
        leaves: Vec::new(),
        clusters: Vec::new(),
    };
    place(point.root(), 0.0, 0.0, 1.0, 0, eps, &mut placed);

    // Bounding square of everything drawn, with a minimum extent so a single
    // point still renders.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, x, y) in &placed.leaves {
        lo = lo.min(x.min(*y));
        hi = hi.max(x.max(*y));
    }
    for (x, y, r) in &placed.clusters {
        lo = lo.min((x - r).min(y - r));
        hi = hi.max((x + r).max(y + r));
    }
    if !lo.is_finite() || hi - lo < 1e-9 {
        lo -= 1.0;
        hi += 1.0;
    }
    let span = hi - lo;
    let px = |v: f64| MARGIN + (v - lo) / span * (VIEW - 2.0 * MARGIN);
    // SVG y grows downward; flip so the plot reads like plane coordinates.
    let py = |v: f64| VIEW - MARGIN - (v - lo) / span * (VIEW - 2.0 * MARGIN);
    let pr = |r: f64| r / span * (VIEW - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {VIEW} {VIEW}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect width=\"{VIEW}\" height=\"{VIEW}\" fill=\"white\"/>\n"
    ));
    for (x, y, r) in &placed.clusters {
        svg.push_str(&format!(
            "  <circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\" fill=\"none\" stroke=\"#9a9a9a\" stroke-dasharray=\"4 3\"/>\n",
            px(*x),
            py(*y),
            pr(*r)
        ));
    }
    for (label, x, y) in &placed.leaves {
        svg.push_str(&format!(
            "  <circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"black\"/>\n",
            px(*x),
            py(*y)
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.3}\" y=\"{:.3}\" font-size=\"14\" font-family=\"sans-serif\">{label}</text>\n",
            px(*x) + 6.0,
            py(*y) - 6.0
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub struct PlotStats {
    pub leaves: usize,
    pub clusters: usize,
}

/// Counts what `render_svg` would draw, for the confirmation line.
pub fn plot_stats(point: &FMPoint) -> PlotStats {
    fn walk(tree: &ConfigTree, depth: u32, stats: &mut PlotStats) {
        match tree {
            ConfigTree::Leaf(_) => stats.leaves += 1,
            ConfigTree::Node(children) => {
                if depth > 0 {
                    stats.clusters += 1;
                }
                for (child, _) in children {
                    walk(child, depth + 1, stats);
                }
            }
        }
    }
    let mut stats = PlotStats {
        leaves: 0,
        clusters: 0,
    };
    walk(point.root(), 0, &mut stats);
    stats
}
