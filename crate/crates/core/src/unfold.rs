//! Billiard tables (Euclidean polygons and simple parking garages) and their
//! unfolding into translation surfaces labeled by the dihedral group.

use crate::exactgeom::{self as eg, dihedral_group, Cyclo, DihedralElement, DihedralGroup, Pt, RatAngle, RatVec2};
use crate::homology::{self, HomologyBasis, InducedMap, Relabeling};
use crate::planar::{self, Location};
use crate::surface::{build_surface, validate_garage, EdgeRef, Issue, Polygon, SurfaceError, TranslationSurface};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeSet;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnfoldError {
    #[error("edge {edge}: declared angle {declared} disagrees with direction {actual:.12} rad")]
    AngleCoordinateMismatch { edge: usize, declared: RatAngle, actual: f64 },
    #[error("reflecting edge {0} has no declared angle")]
    MissingAngle(usize),
    #[error("table has no reflecting edges")]
    NoReflectingEdges,
    #[error("obstacle {0} cannot be joined to the rest of the boundary")]
    NoBridge(usize),
    #[error("not a simple parking garage: {0}")]
    NotSimpleGarage(String),
    #[error("edge pairing of the domain: {0}")]
    BadDomainPairing(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Homology(#[from] homology::HomologyError),
}

/// Origin of an edge of the table boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeTag {
    /// Side of a Euclidean polygon table.
    Wall(usize),
    /// Side of the fundamental domain of a garage.
    Domain(usize),
    /// Cut joining an obstacle to the rest of the boundary; `true` on the
    /// side traversed towards the obstacle.
    Bridge(usize, bool),
    /// Side `j` of obstacle `i`, traversed clockwise.
    Obstacle(usize, usize),
}

impl EdgeTag {
    pub fn reflects(&self) -> bool {
        matches!(self, EdgeTag::Wall(_) | EdgeTag::Obstacle(..))
    }
}

/// A billiard table described by one weakly simple counterclockwise polygon.
/// For garages, obstacles appear as clockwise holes attached by bridges.
#[derive(Clone, Debug)]
pub struct BilliardTable {
    pub vertices: Vec<RatVec2>,
    pub tags: Vec<EdgeTag>,
    /// Declared direction of each edge as traversed.
    pub angles: Vec<Option<RatAngle>>,
    /// Domain and bridge pairs `(positive, negative)`.
    pub pairs: Vec<(usize, usize)>,
    /// Domain polygon and its pairing (garages only).
    pub domain: Option<(Vec<RatVec2>, Vec<(usize, usize)>)>,
    pub obstacles: Vec<Vec<RatVec2>>,
    /// Position of each obstacle vertex in `vertices` when it appears once.
    pub obstacle_corner: Vec<Vec<Option<usize>>>,
}

impl BilliardTable {
    /// A Euclidean polygon with counterclockwise vertices and declared edge
    /// directions.
    pub fn polygon(vertices: Vec<RatVec2>, angles: Vec<RatAngle>) -> Self {
        assert_eq!(vertices.len(), angles.len());
        let n = vertices.len();
        BilliardTable {
            vertices,
            tags: (0..n).map(EdgeTag::Wall).collect(),
            angles: angles.into_iter().map(Some).collect(),
            pairs: Vec::new(),
            domain: None,
            obstacles: Vec::new(),
            obstacle_corner: Vec::new(),
        }
    }

    /// A simple parking garage: the translation surface given by `domain`
    /// with `pairs` (positive, negative) and the counterclockwise
    /// `obstacles` removed. Bridges never end at a vertex in `keep_free`
    /// (given as `(obstacle, vertex)`).
    pub fn garage(
        domain: Vec<RatVec2>,
        pairs: Vec<(usize, usize)>,
        obstacles: Vec<Vec<RatVec2>>,
        obstacle_angles: Vec<Vec<RatAngle>>,
        keep_free: &[(usize, usize)],
    ) -> Result<Self, UnfoldError> {
        check_domain(&domain, &pairs)?;
        let issues = validate_garage(&domain, &obstacles);
        if let Some(Issue::NotSimpleGarage(m)) = issues.into_iter().next() {
            return Err(UnfoldError::NotSimpleGarage(m));
        }
        for (i, o) in obstacles.iter().enumerate() {
            if o.len() < 3 || !planar::is_simple(o) || planar::signed_area2(o) <= eg::qi(0) {
                return Err(UnfoldError::NotSimpleGarage(format!("obstacle {i} is not a simple counterclockwise polygon")));
            }
            assert_eq!(o.len(), obstacle_angles[i].len());
        }
        let mut verts = domain.clone();
        let mut tags: Vec<EdgeTag> = (0..domain.len()).map(EdgeTag::Domain).collect();
        let forbidden: BTreeSet<(usize, usize)> = keep_free.iter().copied().collect();
        for i in 0..obstacles.len() {
            let (iu, k) = find_bridge(&verts, &domain, &obstacles, i, &forbidden).ok_or(UnfoldError::NoBridge(i))?;
            let o = &obstacles[i];
            let m = o.len();
            let u = verts[iu].clone();
            let mut new_v = Vec::with_capacity(m + 2);
            let mut new_t = Vec::with_capacity(m + 2);
            new_t.push(EdgeTag::Bridge(i, true));
            for step in 0..=m {
                let j = (k + m - step % m) % m;
                new_v.push(o[j].clone());
                if step < m {
                    // from o[j] to o[j-1]: obstacle edge j-1 reversed
                    new_t.push(EdgeTag::Obstacle(i, (j + m - 1) % m));
                }
            }
            new_t.push(EdgeTag::Bridge(i, false));
            new_v.push(u);
            // the edge leaving the duplicated u keeps the old tag of edge iu
            let mut t_after = vec![tags[iu]];
            t_after.extend(tags[iu + 1..].iter().copied());
            verts.splice(iu + 1..iu + 1, new_v);
            tags.truncate(iu);
            tags.extend(new_t);
            tags.extend(t_after);
        }
        debug_assert_eq!(verts.len(), tags.len());
        let n = verts.len();
        let angles: Vec<Option<RatAngle>> = tags
            .iter()
            .map(|t| match *t {
                EdgeTag::Obstacle(i, j) => Some(obstacle_angles[i][j] + RatAngle::half_turn()),
                _ => None,
            })
            .collect();
        let find = |want: EdgeTag| (0..n).find(|&k| tags[k] == want).unwrap();
        let mut all_pairs: Vec<(usize, usize)> =
            pairs.iter().map(|&(a, b)| (find(EdgeTag::Domain(a)), find(EdgeTag::Domain(b)))).collect();
        for i in 0..obstacles.len() {
            all_pairs.push((find(EdgeTag::Bridge(i, true)), find(EdgeTag::Bridge(i, false))));
        }
        // corner k sits between edges k-1 and k; only corners without a
        // bridge are recorded
        let mut obstacle_corner: Vec<Vec<Option<usize>>> = obstacles.iter().map(|o| vec![None; o.len()]).collect();
        for k in 0..n {
            if let (EdgeTag::Obstacle(i, j), EdgeTag::Obstacle(..)) = (tags[k], tags[(k + n - 1) % n]) {
                // edge k runs from o[j+1] to o[j]
                obstacle_corner[i][(j + 1) % obstacles[i].len()] = Some(k);
            }
        }
        Ok(BilliardTable {
            vertices: verts,
            tags,
            angles,
            pairs: all_pairs,
            domain: Some((domain, pairs)),
            obstacles,
            obstacle_corner,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_garage(&self) -> bool {
        self.domain.is_some()
    }

    pub fn reflecting_edges(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.tags[k].reflects()).collect()
    }

    /// Declared angles of the reflecting edges.
    pub fn xi(&self) -> Result<Vec<RatAngle>, UnfoldError> {
        self.reflecting_edges().into_iter().map(|k| self.angles[k].ok_or(UnfoldError::MissingAngle(k))).collect()
    }

    pub fn edge_of_tag(&self, tag: EdgeTag) -> Option<usize> {
        self.tags.iter().position(|&t| t == tag)
    }

    fn base_polygon(&self) -> Polygon {
        let mut p = Polygon::from_exact(self.vertices.clone()).with_edge_angles(self.angles.clone());
        p.weakly_simple = self.is_garage();
        p
    }

    /// The table itself as a translation surface with boundary.
    pub fn garage_surface(&self) -> Result<TranslationSurface, SurfaceError> {
        let mut p = self.base_polygon();
        p.boundary = self.tags.iter().map(EdgeTag::reflects).collect();
        let pairs: Vec<_> = self.pairs.iter().map(|&(a, b)| (EdgeRef::new(0, a), EdgeRef::new(0, b))).collect();
        build_surface(vec![p], &pairs)
    }
}

fn check_domain(domain: &[RatVec2], pairs: &[(usize, usize)]) -> Result<(), UnfoldError> {
    let bad = |m: String| Err(UnfoldError::BadDomainPairing(m));
    if domain.len() < 3 || !planar::is_simple(domain) || planar::signed_area2(domain) <= eg::qi(0) {
        return bad("domain is not a simple counterclockwise polygon".into());
    }
    let mut used = vec![false; domain.len()];
    for &(a, b) in pairs {
        if a >= domain.len() || b >= domain.len() || a == b || used[a] || used[b] {
            return bad(format!("pair ({a}, {b})"));
        }
        used[a] = true;
        used[b] = true;
        let n = domain.len();
        let ea = &domain[(a + 1) % n] - &domain[a];
        let eb = &domain[(b + 1) % n] - &domain[b];
        if ea != -&eb {
            return bad(format!("edges {a} and {b} are not opposite translates"));
        }
    }
    if used.iter().any(|u| !u) {
        return bad("domain edge left unpaired".into());
    }
    Ok(())
}

/// Interior of the corner at index `i` of a weakly simple polygon contains
/// the direction `d` strictly.
fn direction_in_corner(verts: &[RatVec2], i: usize, d: &RatVec2) -> bool {
    let n = verts.len();
    let p = &verts[i];
    let a = &verts[(i + n - 1) % n] - p;
    let b = &verts[(i + 1) % n] - p;
    let s = |v: &eg::Q| eg::sign_of(v);
    let turn = s(&b.cross(&a));
    if turn > 0 {
        s(&b.cross(d)) > 0 && s(&d.cross(&a)) > 0
    } else if turn < 0 {
        !(s(&a.cross(d)) >= 0 && s(&d.cross(&b)) >= 0)
    } else if s(&a.dot(&b)) > 0 {
        // U-turn: everything but the common ray
        !(s(&b.cross(d)) == 0 && s(&b.dot(d)) > 0)
    } else {
        s(&b.cross(d)) > 0
    }
}

/// Segment `u w` meets the closed segment `a b` somewhere other than at the
/// allowed endpoint `at`, or overlaps it.
pub(crate) fn bad_contact(u: &RatVec2, w: &RatVec2, a: &RatVec2, b: &RatVec2, at: &[&RatVec2]) -> bool {
    if !planar::segments_touch(u, w, a, b) {
        return false;
    }
    for &x in at {
        if a == x || b == x {
            let other = if a == x { b } else { a };
            let far = if x == u { w } else { u };
            // touching only at x unless collinear in the same direction or far end on ab
            let collinear_same = planar::orient(x, far, other) == 0 && (&(far - x)).dot(&(other - x)) > eg::qi(0);
            return collinear_same || planar::on_segment(a, b, far);
        }
    }
    true
}

fn find_bridge(
    verts: &[RatVec2],
    domain: &[RatVec2],
    obstacles: &[Vec<RatVec2>],
    i: usize,
    forbidden: &BTreeSet<(usize, usize)>,
) -> Option<(usize, usize)> {
    let forbidden_pts: Vec<&RatVec2> = forbidden.iter().filter_map(|&(a, b)| obstacles.get(a)?.get(b)).collect();
    let target = &obstacles[i];
    let mut best: Option<(eg::Q, usize, usize)> = None;
    let nv = verts.len();
    for iu in 0..nv {
        let u = &verts[iu];
        if forbidden_pts.contains(&u) {
            continue;
        }
        'w: for (k, w) in target.iter().enumerate() {
            if forbidden.contains(&(i, k)) || u == w {
                continue;
            }
            let d = w - u;
            let len2 = d.dot(&d);
            if best.as_ref().is_some_and(|(b, _, _)| *b <= len2) {
                continue;
            }
            if !direction_in_corner(verts, iu, &d) {
                continue;
            }
            for j in 0..nv {
                if bad_contact(u, w, &verts[j], &verts[(j + 1) % nv], &[u]) {
                    continue 'w;
                }
            }
            for (oi, o) in obstacles.iter().enumerate().skip(i) {
                for j in 0..o.len() {
                    let allow: Vec<&RatVec2> = if oi == i { vec![w] } else { vec![] };
                    if bad_contact(u, w, &o[j], &o[(j + 1) % o.len()], &allow) {
                        continue 'w;
                    }
                }
            }
            let mid = (u + w).scale(&eg::q(1, 2));
            if planar::locate(target, &mid) != Location::Outside || planar::locate(domain, &mid) != Location::Inside {
                continue;
            }
            best = Some((len2, iu, k));
        }
    }
    best.map(|(_, iu, k)| (iu, k))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rationality {
    pub is_rational: bool,
    pub diffs: BTreeSet<RatAngle>,
    pub n: u32,
}

/// Angle differences of the reflecting edges and the unfolding constant.
pub fn rationality(t: &BilliardTable) -> Result<Rationality, UnfoldError> {
    let refl = t.reflecting_edges();
    if refl.is_empty() {
        return Err(UnfoldError::NoReflectingEdges);
    }
    for &k in &refl {
        let declared = t.angles[k].ok_or(UnfoldError::MissingAngle(k))?;
        let d = (&t.vertices[(k + 1) % t.len()] - &t.vertices[k]).to_f64();
        let actual = d[1].atan2(d[0]);
        let mut diff = (actual - declared.radians()).rem_euclid(2.0 * PI);
        if diff > PI {
            diff -= 2.0 * PI;
        }
        if diff.abs() > 1e-9 {
            return Err(UnfoldError::AngleCoordinateMismatch { edge: k, declared, actual });
        }
    }
    let xi = t.xi()?;
    let diffs = eg::angle_diff_set(&xi);
    let n = eg::unfolding_constant(&diffs) as u32;
    Ok(Rationality { is_rational: true, diffs, n })
}

/// Translation surface of the unfolded table. Polygon `g` is the copy
/// `rho_g P` for the group element with ordinal `g`; reflection copies list
/// their vertices in reverse so that every copy is counterclockwise.
#[derive(Clone, Debug)]
pub struct UnfoldedSurface {
    pub table: BilliardTable,
    pub n: u32,
    pub axis: RatAngle,
    pub group: DihedralGroup,
    pub surface: TranslationSurface,
    /// Cyclotomic order used for symbolic edge vectors.
    pub cyclo_order: u32,
    /// Group element reflecting across the support of each table edge.
    pub edge_reflection: Vec<Option<DihedralElement>>,
}

pub fn reference_axis(xi: &[RatAngle], n: u32) -> RatAngle {
    let on_grid = xi.iter().all(|a| (a.turns_of_pi() * eg::qi(n as i64)).is_integer());
    if on_grid {
        RatAngle::zero()
    } else {
        xi[0].mod_pi()
    }
}

pub fn unfold(t: &BilliardTable) -> Result<UnfoldedSurface, UnfoldError> {
    let r = rationality(t)?;
    let n = r.n;
    let xi = t.xi()?;
    let axis = reference_axis(&xi, n);
    let group = dihedral_group(n);
    let m = (4u32.lcm(&n)).lcm(&(axis.den() as u32));
    let nv = t.len();

    let edge_reflection: Vec<Option<DihedralElement>> = (0..nv)
        .map(|k| {
            let a = t.angles[k]?;
            if !t.tags[k].reflects() {
                return None;
            }
            let idx = (axis - a).turns_of_pi() * eg::qi(n as i64);
            debug_assert!(idx.is_integer());
            Some(DihedralElement::reflection(n, idx.to_integer().to_i64().unwrap()))
        })
        .collect();

    let base_edges: Vec<RatVec2> = (0..nv).map(|k| &t.vertices[(k + 1) % nv] - &t.vertices[k]).collect();
    let mut polys = Vec::with_capacity(group.order());
    for g in &group.elements {
        let refl = g.is_reflection();
        let order: Vec<usize> = if refl { (0..nv).map(|i| (nv - i) % nv).collect() } else { (0..nv).collect() };
        let exact: Option<Vec<RatVec2>> =
            order.iter().map(|&i| g.apply_exact_axis(axis, &t.vertices[i])).collect();
        let mut poly = match exact {
            Some(v) => Polygon::from_exact(v),
            None => Polygon::from_f64(order.iter().map(|&i| g.apply_f64_axis(axis, t.vertices[i].to_f64())).collect()),
        };
        let mut sym = Vec::with_capacity(nv);
        let mut angles = Vec::with_capacity(nv);
        for k in 0..nv {
            let j = if refl { nv - 1 - k } else { k };
            let s = g.apply_cyclo(axis, &base_edges[j], m);
            sym.push(if refl { s.scale_int(-1) } else { s });
            angles.push(t.angles[j].map(|a| image_angle(g, axis, a)));
        }
        poly.edge_sym = Some(sym);
        poly.edge_angles = angles;
        poly.weakly_simple = t.is_garage();
        polys.push(poly);
    }

    let copy_edge = |g: &DihedralElement, j: usize| {
        EdgeRef::new(g.ordinal(), if g.is_reflection() { nv - 1 - j } else { j })
    };
    let mut pairs = Vec::new();
    for g in &group.elements {
        for &(a, b) in &t.pairs {
            let (ea, eb) = (copy_edge(g, a), copy_edge(g, b));
            pairs.push(if g.is_reflection() { (eb, ea) } else { (ea, eb) });
        }
    }
    for g in group.elements.iter().filter(|g| !g.is_reflection()) {
        for b in t.reflecting_edges() {
            let h = g.compose(edge_reflection[b].as_ref().unwrap());
            pairs.push((copy_edge(g, b), copy_edge(&h, b)));
        }
    }
    let surface = build_surface(polys, &pairs)?;
    Ok(UnfoldedSurface { table: t.clone(), n, axis, group, surface, cyclo_order: m, edge_reflection })
}

/// Direction of the image under `g` of an edge with direction `a`, as
/// traversed in the image copy.
fn image_angle(g: &DihedralElement, axis: RatAngle, a: RatAngle) -> RatAngle {
    let idx = g.index as i64;
    let n = g.n as i64;
    if g.is_reflection() {
        // mirror line at axis - pi k / n; reversed traversal adds pi
        let mirror = axis - RatAngle::new(idx, n);
        mirror + mirror - a + RatAngle::half_turn()
    } else {
        a + RatAngle::new(2 * idx, n)
    }
}

impl UnfoldedSurface {
    pub fn copies(&self) -> usize {
        self.group.order()
    }

    pub fn label(&self, copy: usize) -> DihedralElement {
        self.group.elements[copy]
    }

    /// Orientation flag of a copy.
    pub fn upsilon_copy(&self, copy: usize) -> i64 {
        self.label(copy).det_sign()
    }

    /// Edge of copy `g` that is the image of table edge `j`.
    pub fn copy_edge(&self, g: &DihedralElement, j: usize) -> EdgeRef {
        let nv = self.table.len();
        EdgeRef::new(g.ordinal(), if g.is_reflection() { nv - 1 - j } else { j })
    }

    /// Table edge and copy label of a surface edge.
    pub fn base_edge(&self, e: EdgeRef) -> (DihedralElement, usize) {
        let g = self.label(e.poly);
        let nv = self.table.len();
        (g, if g.is_reflection() { nv - 1 - e.edge } else { e.edge })
    }

    /// Corner of copy `g` at the image of table vertex `v`.
    pub fn copy_corner(&self, g: &DihedralElement, v: usize) -> (usize, usize) {
        let nv = self.table.len();
        (g.ordinal(), if g.is_reflection() { (nv - v) % nv } else { v })
    }

    pub fn apply(&self, g: &DihedralElement, p: Pt) -> Pt {
        g.apply_f64_axis(self.axis, p)
    }

    /// Point of the table under the point `p` of copy `copy`.
    pub fn fold(&self, p: Pt, copy: usize) -> Pt {
        let g = self.label(copy);
        self.apply(&g.inverse(), p)
    }

    /// Point of copy `copy` over the table point `p`.
    pub fn lift(&self, p: Pt, copy: usize) -> Pt {
        self.apply(&self.label(copy), p)
    }

    /// Copy the linear flow continues in after bouncing off table edge `b`
    /// from copy `g`.
    pub fn bounce(&self, g: &DihedralElement, b: usize) -> Option<DihedralElement> {
        Some(g.compose(self.edge_reflection[b].as_ref()?))
    }

    /// Relabeling of copies by left multiplication with `h`.
    pub fn relabeling(&self, h: &DihedralElement) -> Relabeling {
        let nv = self.table.len();
        let mut poly_map = vec![0; self.copies()];
        let mut edge_map = vec![Vec::new(); self.copies()];
        for g in &self.group.elements {
            let hg = h.compose(g);
            poly_map[g.ordinal()] = hg.ordinal();
            let mut row = vec![EdgeRef::new(0, 0); nv];
            for j in 0..nv {
                row[self.copy_edge(g, j).edge] = self.copy_edge(&hg, j);
            }
            edge_map[g.ordinal()] = row;
        }
        Relabeling { poly_map, edge_map, sign: h.det_sign() }
    }

    pub fn induced(&self, basis: &HomologyBasis, h: &DihedralElement) -> Result<InducedMap, UnfoldError> {
        Ok(homology::induced_map(&self.surface, basis, &self.relabeling(h))?)
    }

    /// Symbolic displacement of a surface edge.
    pub fn edge_sym(&self, e: EdgeRef) -> Cyclo {
        self.surface.polygon(e.poly).edge_sym.as_ref().unwrap()[e.edge].clone()
    }

    /// Offset for drawing copies side by side.
    pub fn layout_offset(&self, copy: usize) -> Pt {
        let (lo, hi) = bounding_box(&self.surface.polygon(0).vertices);
        let w = (hi[0] - lo[0]).max(hi[1] - lo[1]) * 1.6;
        let cols = self.n as usize;
        [(copy % cols) as f64 * w, -((copy / cols) as f64) * w]
    }
}

pub fn bounding_box(pts: &[Pt]) -> (Pt, Pt) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in pts {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    (lo, hi)
}

/// Surface of a classical table reflected once: true when the angle sum of
/// the declared edges is consistent. Helper for tests.
pub fn angle_sum_is_consistent(t: &BilliardTable) -> bool {
    let p = t.base_polygon();
    let total: eg::Q = (0..p.len()).filter_map(|k| p.corner_angle_exact(k)).fold(eg::Q::zero(), |a, b| a + b);
    total == eg::qi(p.len() as i64 - 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::q;

    fn p(x: i64, y: i64) -> RatVec2 {
        RatVec2::from_ints(x, y)
    }

    fn ang(a: i64, b: i64) -> RatAngle {
        RatAngle::new(a, b)
    }

    fn square_table() -> BilliardTable {
        BilliardTable::polygon(
            vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)],
            vec![ang(0, 1), ang(1, 2), ang(1, 1), ang(3, 2)],
        )
    }

    fn unit_square_domain() -> (Vec<RatVec2>, Vec<(usize, usize)>) {
        (vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)], vec![(0, 2), (3, 1)])
    }

    pub fn classical_garage() -> BilliardTable {
        let (d, pairs) = unit_square_domain();
        let (a, b) = (q(1, 4), q(3, 4));
        let obstacle = vec![
            RatVec2::new(a.clone(), a.clone()),
            RatVec2::new(b.clone(), a.clone()),
            RatVec2::new(b.clone(), b.clone()),
            RatVec2::new(a.clone(), b.clone()),
        ];
        let angles = vec![ang(0, 1), ang(1, 2), ang(1, 1), ang(3, 2)];
        BilliardTable::garage(d, pairs, vec![obstacle], vec![angles], &[]).unwrap()
    }

    #[test]
    fn rationality_examples() {
        assert_eq!(rationality(&square_table()).unwrap().n, 2);
        let tri = BilliardTable::polygon(
            vec![p(0, 0), p(1, 0), RatVec2::new(q(1, 2), eg::rational_approx(3f64.sqrt() / 2.0, 1 << 40))],
            vec![ang(0, 1), ang(2, 3), ang(4, 3)],
        );
        assert_eq!(rationality(&tri).unwrap().n, 3);
        let skew = BilliardTable::polygon(vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)], vec![ang(0, 1), ang(1, 3), ang(1, 1), ang(3, 2)]);
        assert!(matches!(rationality(&skew), Err(UnfoldError::AngleCoordinateMismatch { edge: 1, .. })));
    }

    #[test]
    fn square_unfolds_to_torus() {
        let u = unfold(&square_table()).unwrap();
        assert_eq!(u.copies(), 4);
        assert_eq!(u.surface.genus(), 1);
        assert_eq!(u.surface.edge_count(), 16);
        assert!(u.surface.orbits().iter().all(|o| o.cone_multiple == 1));
    }

    #[test]
    fn bridged_garage_shape() {
        let t = classical_garage();
        assert_eq!(t.len(), 4 + 4 + 2);
        assert_eq!(t.pairs.len(), 3);
        let s = t.garage_surface().unwrap();
        assert_eq!(s.boundary_components(), 1);
        assert_eq!(s.genus(), 1);
        for v in 0..4 {
            if let Some(c) = t.obstacle_corner[0][v] {
                // exterior of a square obstacle: 3 pi / 2
                assert_eq!(s.polygon(0).corner_angle_exact(c), Some(q(3, 2)));
            }
        }
    }

    #[test]
    fn classical_garage_unfolds_to_genus_five() {
        let u = unfold(&classical_garage()).unwrap();
        assert_eq!(u.n, 2);
        assert_eq!(u.copies(), 4);
        assert_eq!(u.surface.genus(), 5);
        let orders: Vec<i64> = u.surface.singular_orbits().iter().map(|o| o.order()).collect();
        assert_eq!(orders, vec![2, 2, 2, 2]);
    }

    #[test]
    fn identification_law() {
        let u = unfold(&classical_garage()).unwrap();
        for g in &u.group.elements {
            for b in u.table.reflecting_edges() {
                let e = u.copy_edge(g, b);
                let f = u.surface.partner(e).unwrap();
                let (h, j) = u.base_edge(f);
                assert_eq!(j, b);
                assert_eq!(h, g.compose(u.edge_reflection[b].as_ref().unwrap()));
            }
        }
    }

    #[test]
    fn fold_inverts_lift() {
        let u = unfold(&square_table()).unwrap();
        for c in 0..u.copies() {
            let x = u.fold(u.lift([0.3, 0.7], c), c);
            assert!((x[0] - 0.3).abs() < 1e-12 && (x[1] - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn group_acts_by_automorphisms() {
        let u = unfold(&classical_garage()).unwrap();
        let b = crate::homology::edge_basis(&u.surface).unwrap();
        for h in &u.group.elements {
            let m = u.induced(&b, h).unwrap();
            assert_eq!(m.sign, h.det_sign());
        }
    }
}
