//! Compact translation surfaces built from polygons with edges identified
//! by translations, plus simple parking garages (some edges left as boundary).
//!
//! Polygons are stored counterclockwise. Edge `k` runs from vertex `k` to
//! vertex `k + 1`; corner `k` sits at vertex `k`. Every pair of identified
//! edges has a positive representative; the class `h(e)` of the pair is the
//! positive edge traversed counterclockwise with respect to its polygon.

use crate::exactgeom::{self as eg, Cyclo, Pt, Q, RatAngle, RatVec2};
use crate::planar;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Clone, Debug)]
pub struct Polygon {
    pub vertices: Vec<Pt>,
    pub exact: Option<Vec<RatVec2>>,
    /// Edge displacement vectors in a cyclotomic field, when known.
    pub edge_sym: Option<Vec<Cyclo>>,
    /// Declared direction of each edge.
    pub edge_angles: Vec<Option<RatAngle>>,
    pub boundary: Vec<bool>,
    /// Boundary may run along itself (bridge edges); skips the simplicity check.
    pub weakly_simple: bool,
}

impl Polygon {
    pub fn from_exact(vertices: Vec<RatVec2>) -> Self {
        let n = vertices.len();
        let sym = (0..n)
            .map(|k| {
                let d = &vertices[(k + 1) % n] - &vertices[k];
                Cyclo::from_complex(4, &d.x, &d.y)
            })
            .collect();
        Polygon {
            vertices: vertices.iter().map(RatVec2::to_f64).collect(),
            exact: Some(vertices),
            edge_sym: Some(sym),
            edge_angles: vec![None; n],
            boundary: vec![false; n],
            weakly_simple: false,
        }
    }

    pub fn from_f64(vertices: Vec<Pt>) -> Self {
        let n = vertices.len();
        Polygon {
            vertices,
            exact: None,
            edge_sym: None,
            edge_angles: vec![None; n],
            boundary: vec![false; n],
            weakly_simple: false,
        }
    }

    pub fn with_edge_angles(mut self, angles: Vec<Option<RatAngle>>) -> Self {
        assert_eq!(angles.len(), self.len());
        self.edge_angles = angles;
        self
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, k: usize) -> Pt {
        self.vertices[k % self.len()]
    }

    pub fn edge_start(&self, k: usize) -> Pt {
        self.vertex(k)
    }

    pub fn edge_end(&self, k: usize) -> Pt {
        self.vertex(k + 1)
    }

    pub fn edge_vector(&self, k: usize) -> Pt {
        eg::sub(self.edge_end(k), self.edge_start(k))
    }

    pub fn edge_exact(&self, k: usize) -> Option<RatVec2> {
        let e = self.exact.as_ref()?;
        let n = e.len();
        Some(&e[(k + 1) % n] - &e[k % n])
    }

    pub fn edge_midpoint(&self, k: usize) -> Pt {
        eg::scale(eg::add(self.edge_start(k), self.edge_end(k)), 0.5)
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.len();
        (0..n).map(|i| eg::cross(self.vertices[i], self.vertices[(i + 1) % n])).sum::<f64>() / 2.0
    }

    /// Interior angle at corner `k` in `(0, 2 pi]`; a reversal counts as `2 pi`.
    pub fn corner_angle(&self, k: usize) -> f64 {
        let n = self.len();
        let incoming = self.edge_vector((k + n - 1) % n);
        let outgoing = self.edge_vector(k);
        let back = [-incoming[0], -incoming[1]];
        let mut a = eg::cross(outgoing, back).atan2(eg::dot(outgoing, back));
        if a <= 1e-15 {
            a += 2.0 * PI;
        }
        a
    }

    /// Exact interior angle at corner `k` in units of pi, when both adjacent
    /// edges carry declared angles.
    pub fn corner_angle_exact(&self, k: usize) -> Option<Q> {
        let n = self.len();
        let a_in = self.edge_angles[(k + n - 1) % n]?;
        let a_out = self.edge_angles[k]?;
        let d = (a_out - a_in).turns_of_pi();
        // turn in (-1, 1]; a reversal turns by -1 so the interior is 2
        let one = eg::qi(1);
        let turn = if d >= one { d - eg::qi(2) } else { d };
        Some(one - turn)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    pub poly: usize,
    pub edge: usize,
}

impl EdgeRef {
    pub fn new(poly: usize, edge: usize) -> Self {
        EdgeRef { poly, edge }
    }
}

impl std::fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "P{}e{}", self.poly, self.edge)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgePair {
    pub pos: EdgeRef,
    pub neg: EdgeRef,
}

#[derive(Clone, Debug)]
pub struct SingularityClass {
    /// Corners `(polygon, vertex)` in traversal order.
    pub corners: Vec<(usize, usize)>,
    /// Cone angle divided by `2 pi`; zero for boundary points.
    pub cone_multiple: u32,
    /// Exact total angle in units of pi, when every corner angle is declared.
    pub exact_angle: Option<Q>,
    pub numeric_angle: f64,
    pub on_boundary: bool,
}

impl SingularityClass {
    pub fn order(&self) -> i64 {
        self.cone_multiple as i64 - 1
    }

    pub fn is_regular(&self) -> bool {
        !self.on_boundary && self.cone_multiple == 1
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("edges {0} and {1} are not translates with opposite orientation")]
    PairingMismatch(EdgeRef, EdgeRef),
    #[error("configuration is disconnected")]
    Disconnected,
    #[error("edge {0} is paired with itself")]
    SelfPaired(EdgeRef),
    #[error("edge {0} appears in more than one pair")]
    DoublyPaired(EdgeRef),
    #[error("edge {0} is unpaired and not flagged as boundary")]
    UnpairedEdge(EdgeRef),
    #[error("edge reference {0} does not exist")]
    BadEdgeRef(EdgeRef),
    #[error("polygon {0} has fewer than two edges")]
    TooFewEdges(usize),
    #[error("cone angle {angle} at corner {corner:?} is not a positive multiple of 2 pi")]
    NonMultipleOf2Pi { corner: (usize, usize), angle: f64 },
    #[error("genus from cone orders ({from_orders}) disagrees with Euler characteristic ({from_euler})")]
    InconsistentGenus { from_orders: i64, from_euler: i64 },
    #[error("corner traversal from {0:?} did not close")]
    OrbitNotClosed((usize, usize)),
}

#[derive(Clone, Debug)]
pub struct TranslationSurface {
    polygons: Vec<Polygon>,
    pairs: Vec<EdgePair>,
    pair_of: Vec<Vec<Option<usize>>>,
    corner_orbit: Vec<Vec<usize>>,
    orbits: Vec<SingularityClass>,
    genus: u32,
    boundary_components: usize,
}

/// Diagnostics for `validate`.
#[derive(Clone, Debug, PartialEq)]
pub enum Issue {
    TooFewEdges(usize),
    DegenerateEdge(EdgeRef),
    NotCounterClockwise(usize),
    SelfIntersecting(usize),
    BadEdgeRef(EdgeRef),
    SelfPaired(EdgeRef),
    DoublyPaired(EdgeRef),
    PairingMismatch(EdgeRef, EdgeRef),
    UnpairedEdge(EdgeRef),
    Disconnected,
    NonMultipleOf2Pi((usize, usize)),
    NotSimpleGarage(String),
}

fn tolerance(polys: &[Polygon]) -> f64 {
    let m = polys
        .iter()
        .flat_map(|p| p.vertices.iter())
        .fold(1.0f64, |m, v| m.max(v[0].abs()).max(v[1].abs()));
    1e-9 * m
}

/// `neg` equals `pos` reversed and translated.
fn translates(polys: &[Polygon], pos: EdgeRef, neg: EdgeRef, tol: f64) -> bool {
    let (p, n) = (&polys[pos.poly], &polys[neg.poly]);
    if let (Some(a), Some(b)) = (p.edge_exact(pos.edge), n.edge_exact(neg.edge)) {
        return a == -&b;
    }
    let a = p.edge_vector(pos.edge);
    let b = n.edge_vector(neg.edge);
    (a[0] + b[0]).abs() <= tol && (a[1] + b[1]).abs() <= tol
}

fn pairing_table(
    polys: &[Polygon],
    pairs: &[(EdgeRef, EdgeRef)],
) -> Result<Vec<Vec<Option<usize>>>, SurfaceError> {
    let mut table: Vec<Vec<Option<usize>>> = polys.iter().map(|p| vec![None; p.len()]).collect();
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for e in [a, b] {
            if e.poly >= polys.len() || e.edge >= polys[e.poly].len() {
                return Err(SurfaceError::BadEdgeRef(e));
            }
        }
        if a == b {
            return Err(SurfaceError::SelfPaired(a));
        }
        for e in [a, b] {
            if table[e.poly][e.edge].is_some() {
                return Err(SurfaceError::DoublyPaired(e));
            }
            table[e.poly][e.edge] = Some(i);
        }
    }
    Ok(table)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut j = i;
        while self.0[j] != r {
            let next = self.0[j];
            self.0[j] = r;
            j = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn connected(n_polys: usize, pairs: &[(EdgeRef, EdgeRef)]) -> bool {
    let mut uf = UnionFind::new(n_polys);
    for (a, b) in pairs {
        uf.union(a.poly, b.poly);
    }
    (0..n_polys).all(|i| uf.find(i) == uf.find(0))
}

/// Build a surface from polygons and ordered pairs `(positive, negative)`.
/// Edges flagged as boundary may stay unpaired (parking garages).
pub fn build_surface(
    polygons: Vec<Polygon>,
    pairs: &[(EdgeRef, EdgeRef)],
) -> Result<TranslationSurface, SurfaceError> {
    for (i, p) in polygons.iter().enumerate() {
        if p.len() < 2 {
            return Err(SurfaceError::TooFewEdges(i));
        }
    }
    let pair_of = pairing_table(&polygons, pairs)?;
    let tol = tolerance(&polygons);
    for &(a, b) in pairs {
        if !translates(&polygons, a, b, tol) {
            return Err(SurfaceError::PairingMismatch(a, b));
        }
    }
    for (i, p) in polygons.iter().enumerate() {
        for k in 0..p.len() {
            if pair_of[i][k].is_none() && !p.boundary[k] {
                return Err(SurfaceError::UnpairedEdge(EdgeRef::new(i, k)));
            }
        }
    }
    if polygons.is_empty() || !connected(polygons.len(), pairs) {
        return Err(SurfaceError::Disconnected);
    }
    let pairs: Vec<EdgePair> = pairs.iter().map(|&(pos, neg)| EdgePair { pos, neg }).collect();
    let mut s = TranslationSurface {
        polygons,
        pairs,
        pair_of,
        corner_orbit: Vec::new(),
        orbits: Vec::new(),
        genus: 0,
        boundary_components: 0,
    };
    s.compute_orbits()?;
    s.boundary_components = s.count_boundary_components();
    s.genus = s.compute_genus()?;
    Ok(s)
}

impl TranslationSurface {
    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn polygon(&self, i: usize) -> &Polygon {
        &self.polygons[i]
    }

    pub fn pairs(&self) -> &[EdgePair] {
        &self.pairs
    }

    pub fn pair(&self, i: usize) -> EdgePair {
        self.pairs[i]
    }

    pub fn pair_of(&self, e: EdgeRef) -> Option<usize> {
        self.pair_of[e.poly][e.edge]
    }

    pub fn partner(&self, e: EdgeRef) -> Option<EdgeRef> {
        let p = self.pairs[self.pair_of(e)?];
        Some(if p.pos == e { p.neg } else { p.pos })
    }

    /// +1 on the positive edge of its pair, -1 on the negative one.
    pub fn upsilon(&self, e: EdgeRef) -> i64 {
        match self.pair_of(e) {
            Some(i) if self.pairs[i].pos == e => 1,
            Some(_) => -1,
            None => 1,
        }
    }

    pub fn is_boundary(&self, e: EdgeRef) -> bool {
        self.pair_of(e).is_none()
    }

    pub fn edge_count(&self) -> usize {
        self.polygons.iter().map(Polygon::len).sum()
    }

    /// Translation carrying a point of `e` to the same point of its partner.
    pub fn gluing_translation(&self, e: EdgeRef) -> Option<Pt> {
        let f = self.partner(e)?;
        let pe = &self.polygons[e.poly];
        let pf = &self.polygons[f.poly];
        Some(eg::sub(pf.edge_end(f.edge), pe.edge_start(e.edge)))
    }

    pub fn gluing_translation_exact(&self, e: EdgeRef) -> Option<RatVec2> {
        let f = self.partner(e)?;
        let a = self.polygons[e.poly].exact.as_ref()?;
        let b = self.polygons[f.poly].exact.as_ref()?;
        Some(&b[(f.edge + 1) % b.len()] - &a[e.edge])
    }

    /// Holonomy of `h(pair)`: displacement of the positive edge.
    pub fn pair_vector(&self, i: usize) -> Pt {
        let e = self.pairs[i].pos;
        self.polygons[e.poly].edge_vector(e.edge)
    }

    pub fn pair_vector_exact(&self, i: usize) -> Option<RatVec2> {
        let e = self.pairs[i].pos;
        self.polygons[e.poly].edge_exact(e.edge)
    }

    pub fn pair_vector_sym(&self, i: usize) -> Option<Cyclo> {
        let e = self.pairs[i].pos;
        Some(self.polygons[e.poly].edge_sym.as_ref()?[e.edge].clone())
    }

    pub fn orbits(&self) -> &[SingularityClass] {
        &self.orbits
    }

    /// Orbit containing corner `k` of polygon `p`.
    pub fn orbit_of_corner(&self, p: usize, k: usize) -> usize {
        self.corner_orbit[p][k]
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_components == 0
    }

    pub fn boundary_components(&self) -> usize {
        self.boundary_components
    }

    /// Non-regular singularities.
    pub fn singular_orbits(&self) -> Vec<&SingularityClass> {
        self.orbits.iter().filter(|o| o.on_boundary || o.cone_multiple > 1).collect()
    }

    fn next_corner(&self, (p, k): (usize, usize)) -> Option<(usize, usize)> {
        let f = self.partner(EdgeRef::new(p, k))?;
        Some((f.poly, (f.edge + 1) % self.polygons[f.poly].len()))
    }

    fn prev_corner(&self, (p, k): (usize, usize)) -> Option<(usize, usize)> {
        let n = self.polygons[p].len();
        let f = self.partner(EdgeRef::new(p, (k + n - 1) % n))?;
        Some((f.poly, f.edge))
    }

    fn compute_orbits(&mut self) -> Result<(), SurfaceError> {
        let total: usize = self.edge_count();
        let mut seen: Vec<Vec<Option<usize>>> = self.polygons.iter().map(|p| vec![None; p.len()]).collect();
        let mut orbits = Vec::new();
        for p in 0..self.polygons.len() {
            for k in 0..self.polygons[p].len() {
                if seen[p][k].is_some() {
                    continue;
                }
                // rewind to the start of an open chain, if any
                let mut start = (p, k);
                let mut open = false;
                let mut steps = 0;
                loop {
                    match self.prev_corner(start) {
                        None => {
                            open = true;
                            break;
                        }
                        Some(c) if c == (p, k) => break,
                        Some(c) => start = c,
                    }
                    steps += 1;
                    if steps > total {
                        return Err(SurfaceError::OrbitNotClosed((p, k)));
                    }
                }
                let mut corners = vec![start];
                let mut cur = start;
                loop {
                    match self.next_corner(cur) {
                        None => break,
                        Some(c) if c == start => break,
                        Some(c) => {
                            corners.push(c);
                            cur = c;
                        }
                    }
                    if corners.len() > total {
                        return Err(SurfaceError::OrbitNotClosed(start));
                    }
                }
                let id = orbits.len();
                for &(a, b) in &corners {
                    seen[a][b] = Some(id);
                }
                orbits.push(self.classify(corners, open)?);
            }
        }
        self.corner_orbit = seen.into_iter().map(|v| v.into_iter().map(Option::unwrap).collect()).collect();
        self.orbits = orbits;
        Ok(())
    }

    fn classify(&self, corners: Vec<(usize, usize)>, open: bool) -> Result<SingularityClass, SurfaceError> {
        let numeric: f64 = corners.iter().map(|&(p, k)| self.polygons[p].corner_angle(k)).sum();
        let exact = corners
            .iter()
            .map(|&(p, k)| self.polygons[p].corner_angle_exact(k))
            .try_fold(Q::zero(), |acc, a| a.map(|a| acc + a));
        if open {
            return Ok(SingularityClass {
                corners,
                cone_multiple: 0,
                exact_angle: exact,
                numeric_angle: numeric,
                on_boundary: true,
            });
        }
        let m = (numeric / (2.0 * PI)).round();
        let bad = SurfaceError::NonMultipleOf2Pi { corner: corners[0], angle: numeric };
        if m < 1.0 || (numeric - 2.0 * PI * m).abs() > 1e-6 {
            return Err(bad);
        }
        if let Some(e) = &exact {
            if *e != eg::qi(2 * m as i64) {
                return Err(bad);
            }
        }
        Ok(SingularityClass {
            corners,
            cone_multiple: m as u32,
            exact_angle: exact,
            numeric_angle: numeric,
            on_boundary: false,
        })
    }

    fn count_boundary_components(&self) -> usize {
        let mut ids = BTreeMap::new();
        for (p, poly) in self.polygons.iter().enumerate() {
            for k in 0..poly.len() {
                if self.pair_of[p][k].is_none() {
                    let n = ids.len();
                    ids.insert((p, k), n);
                }
            }
        }
        let mut uf = UnionFind::new(ids.len());
        for (&(p, k), &i) in &ids {
            // walk around the end vertex to the next boundary edge
            let mut c = (p, (k + 1) % self.polygons[p].len());
            for _ in 0..=self.edge_count() {
                if self.pair_of[c.0][c.1].is_none() {
                    uf.union(i, ids[&c]);
                    break;
                }
                c = self.next_corner(c).expect("paired edge");
            }
        }
        (0..ids.len()).filter(|&i| uf.find(i) == i).count()
    }

    fn compute_genus(&self) -> Result<u32, SurfaceError> {
        let v = self.orbits.len() as i64;
        let boundary_edges = self.edge_count() - 2 * self.pairs.len();
        let e = (self.pairs.len() + boundary_edges) as i64;
        let f = self.polygons.len() as i64;
        let b = self.boundary_components as i64;
        let two_g_euler = 2 - b - (v - e + f);
        if two_g_euler < 0 || two_g_euler % 2 != 0 {
            return Err(SurfaceError::InconsistentGenus { from_orders: -1, from_euler: two_g_euler });
        }
        let g_euler = two_g_euler / 2;
        if b == 0 {
            let sum_k: i64 = self.orbits.iter().map(SingularityClass::order).sum();
            if sum_k % 2 != 0 || (sum_k + 2) / 2 != g_euler {
                return Err(SurfaceError::InconsistentGenus { from_orders: (sum_k + 2) / 2, from_euler: g_euler });
            }
        }
        Ok(g_euler as u32)
    }

    /// Genus from the cone orders (closed surfaces only).
    pub fn genus_from_orders(&self) -> Option<i64> {
        if !self.is_closed() {
            return None;
        }
        let sum_k: i64 = self.orbits.iter().map(SingularityClass::order).sum();
        Some((sum_k + 2) / 2)
    }

    /// Genus from `V - E + F`.
    pub fn genus_from_euler(&self) -> i64 {
        let v = self.orbits.len() as i64;
        let e = (self.edge_count() - self.pairs.len()) as i64;
        let f = self.polygons.len() as i64;
        (2 - self.boundary_components as i64 - (v - e + f)) / 2
    }

    /// Exit point of the ray `x + t d` from polygon `p`: `(t, edge)` for the
    /// nearest edge crossed from inside to outside.
    pub fn exit_edge(&self, p: usize, x: Pt, d: Pt) -> Option<(f64, usize)> {
        let poly = &self.polygons[p];
        let mut best: Option<(f64, usize)> = None;
        for k in 0..poly.len() {
            let a = poly.edge_start(k);
            let e = poly.edge_vector(k);
            let den = eg::cross(e, d);
            // leaving means moving to the right of a counterclockwise edge
            if den >= 0.0 {
                continue;
            }
            let w = eg::sub(a, x);
            let t = eg::cross(e, w) / den;
            let s = eg::cross(d, w) / den;
            if t > 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&s) && best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, k));
            }
        }
        best
    }

    /// Follow the straight line from `x` in polygon `p` with direction `d`
    /// until `stop` accepts a position or `max_crossings` edges are crossed.
    /// Each step reports the polygon, the entry edge (if any), the exit edge and
    /// the exit parameter along the segment.
    pub fn straight_line_flow(
        &self,
        p: usize,
        x: Pt,
        d: Pt,
        max_crossings: usize,
        mut stop: impl FnMut(usize, Pt, Pt) -> Option<f64>,
    ) -> Result<FlowPath, FlowOnSurfaceError> {
        let mut steps = Vec::new();
        let (mut poly, mut pos, mut entry) = (p, x, None);
        for _ in 0..=max_crossings {
            let (t, k) = self.exit_edge(poly, pos, d).ok_or(FlowOnSurfaceError::Stuck(poly))?;
            let end = eg::add(pos, eg::scale(d, t));
            if let Some(ts) = stop(poly, pos, end) {
                steps.push(FlowStep { poly, entry, exit: None, length: ts });
                return Ok(FlowPath { steps, closed: true });
            }
            let e = EdgeRef::new(poly, k);
            let pv = &self.polygons[poly];
            let (a, b) = (pv.edge_start(k), pv.edge_end(k));
            let len = eg::norm(eg::sub(b, a));
            let s = eg::norm(eg::sub(end, a)) / len;
            if s < 1e-9 || s > 1.0 - 1e-9 {
                return Err(FlowOnSurfaceError::HitVertex(e));
            }
            steps.push(FlowStep { poly, entry, exit: Some(k), length: t });
            let f = self.partner(e).ok_or(FlowOnSurfaceError::HitBoundary(e))?;
            let shift = self.gluing_translation(e).unwrap();
            pos = eg::add(end, shift);
            poly = f.poly;
            entry = Some(f.edge);
        }
        Ok(FlowPath { steps, closed: false })
    }
}

#[derive(Clone, Debug)]
pub struct FlowStep {
    pub poly: usize,
    pub entry: Option<usize>,
    pub exit: Option<usize>,
    pub length: f64,
}

#[derive(Clone, Debug)]
pub struct FlowPath {
    pub steps: Vec<FlowStep>,
    pub closed: bool,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowOnSurfaceError {
    #[error("ray leaves polygon {0} through no edge")]
    Stuck(usize),
    #[error("straight line hits a vertex near edge {0}")]
    HitVertex(EdgeRef),
    #[error("straight line reaches boundary edge {0}")]
    HitBoundary(EdgeRef),
}

pub fn vertex_orbits(s: &TranslationSurface) -> Vec<SingularityClass> {
    s.orbits().to_vec()
}

pub fn genus(s: &TranslationSurface) -> Result<u32, SurfaceError> {
    let e = s.genus_from_euler();
    match s.genus_from_orders() {
        Some(o) if o != e => Err(SurfaceError::InconsistentGenus { from_orders: o, from_euler: e }),
        _ => Ok(s.genus()),
    }
}

/// Every invariant violation of a polygon configuration. Unpaired edges are
/// legal only when flagged as boundary.
pub fn validate(polygons: &[Polygon], pairs: &[(EdgeRef, EdgeRef)]) -> Vec<Issue> {
    let mut issues = Vec::new();
    for (i, p) in polygons.iter().enumerate() {
        if p.len() < 2 {
            issues.push(Issue::TooFewEdges(i));
            continue;
        }
        for k in 0..p.len() {
            let v = p.edge_vector(k);
            if v[0] == 0.0 && v[1] == 0.0 {
                issues.push(Issue::DegenerateEdge(EdgeRef::new(i, k)));
            }
        }
        if p.len() >= 3 && p.signed_area() <= 0.0 {
            issues.push(Issue::NotCounterClockwise(i));
        }
        if !p.weakly_simple && p.len() >= 3 {
            if let Some(ex) = &p.exact {
                if !planar::is_simple(ex) {
                    issues.push(Issue::SelfIntersecting(i));
                }
            }
        }
    }
    let mut count: Vec<Vec<usize>> = polygons.iter().map(|p| vec![0; p.len()]).collect();
    let tol = tolerance(polygons);
    for &(a, b) in pairs {
        let ok = [a, b].iter().all(|e| e.poly < polygons.len() && e.edge < polygons[e.poly].len());
        if !ok {
            for e in [a, b] {
                if e.poly >= polygons.len() || e.edge >= polygons[e.poly].len() {
                    issues.push(Issue::BadEdgeRef(e));
                }
            }
            continue;
        }
        if a == b {
            issues.push(Issue::SelfPaired(a));
            continue;
        }
        count[a.poly][a.edge] += 1;
        count[b.poly][b.edge] += 1;
        if !translates(polygons, a, b, tol) {
            issues.push(Issue::PairingMismatch(a, b));
        }
    }
    for (i, p) in polygons.iter().enumerate() {
        for k in 0..p.len() {
            match count[i][k] {
                0 if !p.boundary[k] => issues.push(Issue::UnpairedEdge(EdgeRef::new(i, k))),
                0 | 1 => {}
                _ => issues.push(Issue::DoublyPaired(EdgeRef::new(i, k))),
            }
        }
    }
    if !polygons.is_empty() && !connected(polygons.len(), pairs) {
        issues.push(Issue::Disconnected);
    }
    if issues.is_empty() {
        if let Err(SurfaceError::NonMultipleOf2Pi { corner, .. }) = build_surface(polygons.to_vec(), pairs) {
            issues.push(Issue::NonMultipleOf2Pi(corner));
        }
    }
    issues
}

/// Obstacles must lie in the open interior of the domain and be pairwise
/// disjoint for the garage to be simple.
pub fn validate_garage(domain: &[RatVec2], obstacles: &[Vec<RatVec2>]) -> Vec<Issue> {
    let mut issues = Vec::new();
    for (i, o) in obstacles.iter().enumerate() {
        if !planar::strictly_inside(domain, o) {
            issues.push(Issue::NotSimpleGarage(format!("obstacle {i} is not in the open interior of the domain")));
        }
        for (j, o2) in obstacles.iter().enumerate().skip(i + 1) {
            if planar::polygons_touch(o, o2) {
                issues.push(Issue::NotSimpleGarage(format!("obstacles {i} and {j} meet")));
            }
        }
    }
    issues
}

/// The polygon `vertices` with edge `i` glued to edge `j` for each listed pair.
pub fn exact_polygon_surface(
    vertices: Vec<RatVec2>,
    pairs: &[(usize, usize)],
) -> Result<TranslationSurface, SurfaceError> {
    let pairs: Vec<_> = pairs.iter().map(|&(a, b)| (EdgeRef::new(0, a), EdgeRef::new(0, b))).collect();
    build_surface(vec![Polygon::from_exact(vertices)], &pairs)
}

pub fn to_i64(v: &Q) -> Option<i64> {
    if v.denom() == &num_bigint::BigInt::from(1) {
        v.numer().to_i64()
    } else {
        None
    }
}
