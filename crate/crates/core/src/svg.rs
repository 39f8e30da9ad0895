//! Deterministic SVG 1.1 figures of models, unfolded surfaces and
//! trajectories.

use crate::exactgeom::{self as eg, Pt};
use crate::flow::Trajectory;
use crate::surface::TranslationSurface;
use crate::unfold::{bounding_box, UnfoldedSurface};
use crate::windtree::WindTreeModel;
use std::fmt::Write as _;

const WIDTH: f64 = 800.0;

fn f(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// Maps world coordinates into a `WIDTH`-wide picture with y pointing up.
struct Frame {
    lo: Pt,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(lo: Pt, hi: Pt) -> Self {
        let pad = 0.05 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        let lo = [lo[0] - pad, lo[1] - pad];
        let hi = [hi[0] + pad, hi[1] + pad];
        let scale = WIDTH / (hi[0] - lo[0]);
        Frame { lo, scale, height: (hi[1] - lo[1]) * scale }
    }

    fn map(&self, p: Pt) -> (String, String) {
        (f((p[0] - self.lo[0]) * self.scale), f(self.height - (p[1] - self.lo[1]) * self.scale))
    }

    fn points(&self, pts: &[Pt]) -> String {
        pts.iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x},{y}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn header(&self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
            f(WIDTH),
            f(self.height),
            f(WIDTH),
            f(self.height)
        )
    }
}

/// Obstacles in the cells `[-r, r]^2` around the origin, with an optional
/// trajectory drawn as a polyline.
pub fn render_model(model: &WindTreeModel, r: i64, trajectory: Option<&Trajectory>) -> String {
    let dom: Vec<Pt> = model.domain.iter().map(|v| v.to_f64()).collect();
    let mut pts: Vec<Pt> = Vec::new();
    for a in [-r, r + 1] {
        for b in [-r, r + 1] {
            pts.extend(dom.iter().map(|&p| model.planar(p, [a, b])));
        }
    }
    let mut path: Vec<Pt> = Vec::new();
    if let Some(t) = trajectory {
        path.push(t.start);
        path.extend(t.events.iter().map(|e| e.point));
        path.push(t.end);
    }
    let (mut lo, mut hi) = bounding_box(&pts);
    if !path.is_empty() {
        let (a, b) = bounding_box(&path);
        lo = [lo[0].min(a[0]), lo[1].min(a[1])];
        hi = [hi[0].max(b[0]), hi[1].max(b[1])];
    }
    let fr = Frame::new(lo, hi);
    let mut out = fr.header();
    let _ = writeln!(out, "<g fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"0.5\">");
    for a in -r..=r {
        for b in -r..=r {
            let cell: Vec<Pt> = dom.iter().map(|&p| model.planar(p, [a, b])).collect();
            let _ = writeln!(out, "<polygon points=\"{}\"/>", fr.points(&cell));
        }
    }
    let _ = writeln!(out, "</g>\n<g fill=\"#4a6fa5\" stroke=\"#1f3b63\" stroke-width=\"0.5\">");
    for a in -r..=r {
        for b in -r..=r {
            for o in &model.obstacles {
                let poly: Vec<Pt> = o.vertices.iter().map(|v| model.planar(v.to_f64(), [a, b])).collect();
                let _ = writeln!(out, "<polygon points=\"{}\"/>", fr.points(&poly));
            }
        }
    }
    let _ = writeln!(out, "</g>");
    if path.len() >= 2 {
        let _ = writeln!(out, "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1\" points=\"{}\"/>", fr.points(&path));
        let (x, y) = fr.map(path[0]);
        let _ = writeln!(out, "<circle cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"#c0392b\"/>");
    }
    out.push_str("</svg>\n");
    out
}

fn draw_surface(out: &mut String, fr: &Frame, s: &TranslationSurface, offsets: &[Pt], labels: &[String]) {
    let _ = writeln!(out, "<g fill=\"#eef2f7\" stroke=\"#1f3b63\" stroke-width=\"0.8\">");
    for (i, p) in s.polygons().iter().enumerate() {
        let pts: Vec<Pt> = p.vertices.iter().map(|&v| eg::add(v, offsets[i])).collect();
        let _ = writeln!(out, "<polygon points=\"{}\"/>", fr.points(&pts));
    }
    let _ = writeln!(out, "</g>\n<g font-family=\"monospace\" font-size=\"9\" fill=\"#555555\" text-anchor=\"middle\">");
    // pair labels with an arrow along each edge, pointing the way it is traversed
    for (k, pair) in s.pairs().iter().enumerate() {
        for e in [pair.pos, pair.neg] {
            let p = s.polygon(e.poly);
            let a = eg::add(p.edge_start(e.edge), offsets[e.poly]);
            let b = eg::add(p.edge_end(e.edge), offsets[e.poly]);
            let m = eg::scale(eg::add(a, b), 0.5);
            let (x, y) = fr.map(m);
            let tip = eg::add(m, eg::scale(eg::sub(b, a), 0.1));
            let (tx, ty) = fr.map(tip);
            let _ = writeln!(out, "<line x1=\"{x}\" y1=\"{y}\" x2=\"{tx}\" y2=\"{ty}\" stroke=\"#999999\"/>");
            let _ = writeln!(out, "<text x=\"{x}\" y=\"{y}\">{k}</text>");
        }
    }
    let _ = writeln!(out, "</g>\n<g font-family=\"serif\" font-size=\"14\" fill=\"#1f3b63\" text-anchor=\"middle\">");
    for (i, p) in s.polygons().iter().enumerate() {
        let (lo, hi) = bounding_box(&p.vertices);
        let c = eg::add(eg::scale(eg::add(lo, hi), 0.5), offsets[i]);
        let (x, y) = fr.map([c[0], hi[1] + offsets[i][1]]);
        let _ = writeln!(out, "<text x=\"{x}\" y=\"{y}\" dy=\"-4\">{}</text>", labels[i]);
    }
    let _ = writeln!(out, "</g>");
}

fn surface_figure(s: &TranslationSurface, offsets: &[Pt], labels: &[String]) -> String {
    let mut pts = Vec::new();
    for (i, p) in s.polygons().iter().enumerate() {
        pts.extend(p.vertices.iter().map(|&v| eg::add(v, offsets[i])));
    }
    let (lo, hi) = bounding_box(&pts);
    let fr = Frame::new(lo, [hi[0], hi[1] + 0.1 * (hi[1] - lo[1])]);
    let mut out = fr.header();
    draw_surface(&mut out, &fr, s, offsets, labels);
    out.push_str("</svg>\n");
    out
}

/// Polygons side by side, labeled by index.
pub fn render_surface(s: &TranslationSurface) -> String {
    let (lo, hi) = bounding_box(&s.polygons().iter().flat_map(|p| p.vertices.clone()).collect::<Vec<_>>());
    let w = (hi[0] - lo[0]).max(hi[1] - lo[1]) * 0.3;
    let mut offsets = Vec::new();
    let mut x = 0.0;
    for p in s.polygons() {
        let (a, b) = bounding_box(&p.vertices);
        offsets.push([x - a[0], 0.0]);
        x += b[0] - a[0] + w;
    }
    let labels: Vec<String> = (0..s.polygons().len()).map(|i| i.to_string()).collect();
    surface_figure(s, &offsets, &labels)
}

/// Dihedral copies laid out in rows, each labeled by its group element.
pub fn render_unfolded(x: &UnfoldedSurface) -> String {
    let offsets: Vec<Pt> = (0..x.copies()).map(|c| x.layout_offset(c)).collect();
    let labels: Vec<String> = (0..x.copies()).map(|c| x.label(c).to_string()).collect();
    surface_figure(&x.surface, &offsets, &labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::q;
    use crate::windtree::{classical_model, unfold_model};

    #[test]
    fn figures_are_deterministic() {
        let m = classical_model(q(1, 2), q(1, 2)).unwrap();
        let a = render_model(&m, 2, None);
        assert_eq!(a, render_model(&m, 2, None));
        assert_eq!(a.matches("fill=\"#4a6fa5\"").count(), 1);
        assert_eq!(a.matches("<polygon").count(), 50);
        let um = unfold_model(&m).unwrap();
        let u = render_unfolded(&um.x);
        assert_eq!(u, render_unfolded(&um.x));
        assert_eq!(u.matches("<polygon").count(), 4);
        assert!(u.contains(">rho.theta1<"));
    }
}
