//! Periodic planar wind-tree models: construction, unfolding to a compact
//! surface with its `Z^2` cover classes, the L-shaped obstacle pair, the good
//! cylinder and the recurrence certificate.

use crate::cover::{self, CoverDescriptor, CoverError, TorusDecomposition};
use crate::exactgeom::{self as eg, Cyclo, DihedralElement, Pt, RatAngle, RatVec2, Q};
use crate::homology::{self, DualClass, HomologyBasis, HomologyError, InducedMap, RelHomologyClass};
use crate::planar::{self, Location};
use crate::surface::EdgeRef;
use crate::unfold::{self, bad_contact, BilliardTable, EdgeTag, Rationality, UnfoldError, UnfoldedSurface};
use num_traits::{Signed, Zero};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WindTreeError {
    #[error("obstacles {0} and {1} overlap or touch")]
    ObstacleOverlap(usize, usize),
    #[error("obstacle {0} touches or leaves the fundamental domain")]
    ObstacleTouchesBoundary(usize),
    #[error("obstacle {0} is not a simple counterclockwise polygon")]
    BadObstacle(usize),
    #[error("configuration is not rational: {0}")]
    Irrational(String),
    #[error("complement of the obstacles is disconnected (obstacle {0})")]
    DisconnectedComplement(usize),
    #[error("domain is not a fundamental domain of the lattice: {0}")]
    NotFundamentalDomain(String),
    #[error(transparent)]
    Lattice(#[from] CoverError),
    #[error("no valid placement for the L pair: {0}")]
    NoValidPlacement(String),
    #[error("L pair changes the unfolding constant from {expected} to {got}")]
    BreaksRationality { expected: u32, got: u32 },
    #[error("{0} is not a regular singularity")]
    NotRegularSingularity(String),
    #[error("segment between the distinguished corners is blocked: {0}")]
    SegmentBlocked(String),
    #[error(transparent)]
    Unfold(UnfoldError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

impl From<UnfoldError> for WindTreeError {
    fn from(e: UnfoldError) -> Self {
        match e {
            UnfoldError::NoBridge(i) => WindTreeError::DisconnectedComplement(i),
            UnfoldError::AngleCoordinateMismatch { edge, declared, actual } => {
                WindTreeError::Irrational(format!("edge {edge} declared {declared} but points at {actual:.12} rad"))
            }
            other => WindTreeError::Unfold(other),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Obstacle {
    /// Counterclockwise vertices.
    pub vertices: Vec<RatVec2>,
    /// Direction of each edge in units of pi.
    pub angles: Vec<RatAngle>,
}

impl Obstacle {
    pub fn new(vertices: Vec<RatVec2>, angles: Vec<RatAngle>) -> Self {
        assert_eq!(vertices.len(), angles.len());
        Obstacle { vertices, angles }
    }

    /// Axis-parallel rectangle `[x0, x1] x [y0, y1]`.
    pub fn rectangle(x0: Q, y0: Q, x1: Q, y1: Q) -> Self {
        let v = vec![
            RatVec2::new(x0.clone(), y0.clone()),
            RatVec2::new(x1.clone(), y0),
            RatVec2::new(x1, y1.clone()),
            RatVec2::new(x0, y1),
        ];
        Obstacle::new(v, vec![RatAngle::new(0, 1), RatAngle::new(1, 2), RatAngle::new(1, 1), RatAngle::new(3, 2)])
    }
}

#[derive(Clone, Debug)]
pub struct WindTreeModel {
    pub lattice: [RatVec2; 2],
    pub domain: Vec<RatVec2>,
    /// Domain edge pairs `(positive, negative)`.
    pub pairing: Vec<(usize, usize)>,
    pub obstacles: Vec<Obstacle>,
    /// Obstacle corners bridges must avoid.
    pub keep_free: Vec<(usize, usize)>,
    pub table: BilliardTable,
    pub decomposition: TorusDecomposition,
    pub rationality: Rationality,
    pub embedding: Option<LEmbedding>,
}

pub fn build_model(
    lattice: [RatVec2; 2],
    domain: Vec<RatVec2>,
    pairing: Vec<(usize, usize)>,
    obstacles: Vec<Obstacle>,
) -> Result<WindTreeModel, WindTreeError> {
    build_model_with(lattice, domain, pairing, obstacles, Vec::new())
}

fn build_model_with(
    lattice: [RatVec2; 2],
    domain: Vec<RatVec2>,
    pairing: Vec<(usize, usize)>,
    obstacles: Vec<Obstacle>,
    keep_free: Vec<(usize, usize)>,
) -> Result<WindTreeModel, WindTreeError> {
    if domain.len() < 3 || !planar::is_simple(&domain) || !planar::signed_area2(&domain).is_positive() {
        return Err(WindTreeError::NotFundamentalDomain("domain is not a simple counterclockwise polygon".into()));
    }
    let det = lattice[0].cross(&lattice[1]).abs();
    let area = planar::signed_area2(&domain) / eg::qi(2);
    if det.is_zero() {
        return Err(WindTreeError::Lattice(CoverError::DegenerateLattice));
    }
    if area != det {
        return Err(WindTreeError::NotFundamentalDomain(format!("area {} differs from covolume {}", eg::format_q(&area), eg::format_q(&det))));
    }
    for (i, o) in obstacles.iter().enumerate() {
        if o.vertices.len() < 3 || !planar::is_simple(&o.vertices) || !planar::signed_area2(&o.vertices).is_positive() {
            return Err(WindTreeError::BadObstacle(i));
        }
        if !planar::strictly_inside(&domain, &o.vertices) {
            return Err(WindTreeError::ObstacleTouchesBoundary(i));
        }
    }
    for i in 0..obstacles.len() {
        for j in i + 1..obstacles.len() {
            if planar::polygons_touch(&obstacles[i].vertices, &obstacles[j].vertices) {
                return Err(WindTreeError::ObstacleOverlap(i, j));
            }
        }
    }
    let decomposition = cover::decompose_in_lattice(&domain, &pairing, lattice.clone())?;
    let table = BilliardTable::garage(
        domain.clone(),
        pairing.clone(),
        obstacles.iter().map(|o| o.vertices.clone()).collect(),
        obstacles.iter().map(|o| o.angles.clone()).collect(),
        &keep_free,
    )
    .map_err(|e| match e {
        UnfoldError::BadDomainPairing(m) => WindTreeError::NotFundamentalDomain(m),
        other => other.into(),
    })?;
    let rationality = unfold::rationality(&table)?;
    Ok(WindTreeModel { lattice, domain, pairing, obstacles, keep_free, table, decomposition, rationality, embedding: None })
}

/// Unit square domain for `Z^2` with one centered `a x b` rectangle.
pub fn classical_model(a: Q, b: Q) -> Result<WindTreeModel, WindTreeError> {
    let half = eg::q(1, 2);
    let (x0, x1) = (&half - &a / eg::qi(2), &half + &a / eg::qi(2));
    let (y0, y1) = (&half - &b / eg::qi(2), &half + &b / eg::qi(2));
    build_model(
        [RatVec2::from_ints(1, 0), RatVec2::from_ints(0, 1)],
        vec![RatVec2::from_ints(0, 0), RatVec2::from_ints(1, 0), RatVec2::from_ints(1, 1), RatVec2::from_ints(0, 1)],
        vec![(0, 2), (3, 1)],
        vec![Obstacle::rectangle(x0, y0, x1, y1)],
    )
}

impl WindTreeModel {
    pub fn n(&self) -> u32 {
        self.rationality.n
    }

    /// Table edge carrying the positive edge of domain pair `j`.
    pub fn domain_pair_edges(&self, j: usize) -> (usize, usize) {
        let (a, b) = self.pairing[j];
        (
            self.table.edge_of_tag(EdgeTag::Domain(a)).unwrap(),
            self.table.edge_of_tag(EdgeTag::Domain(b)).unwrap(),
        )
    }

    /// Lattice displacement `a(e)` picked up when the trajectory leaves the
    /// domain through table edge `k`.
    pub fn edge_lattice_shift(&self, k: usize) -> Option<[i64; 2]> {
        let EdgeTag::Domain(d) = self.table.tags[k] else { return None };
        for (j, &(a, b)) in self.pairing.iter().enumerate() {
            let c = self.decomposition.coeffs[j];
            if a == d {
                return Some(c);
            }
            if b == d {
                return Some([-c[0], -c[1]]);
            }
        }
        None
    }

    pub fn lattice_f64(&self) -> [Pt; 2] {
        [self.lattice[0].to_f64(), self.lattice[1].to_f64()]
    }

    /// Planar position of chart point `x` in cell `l`.
    pub fn planar(&self, x: Pt, l: [i64; 2]) -> Pt {
        let [t1, t2] = self.lattice_f64();
        [x[0] + l[0] as f64 * t1[0] + l[1] as f64 * t2[0], x[1] + l[0] as f64 * t1[1] + l[1] as f64 * t2[1]]
    }
}

/// Compact surface `X`, its edge basis and the two classes defining the
/// wind-tree cover.
#[derive(Clone, Debug)]
pub struct UnfoldedModel {
    pub x: UnfoldedSurface,
    pub basis: HomologyBasis,
    pub gamma: [RelHomologyClass; 2],
    /// Representatives in full pair coordinates.
    pub gamma_full: [Vec<i64>; 2],
    /// Cover whose deck coordinate is the lattice cell.
    pub descriptor: CoverDescriptor,
}

pub fn unfold_model(model: &WindTreeModel) -> Result<UnfoldedModel, WindTreeError> {
    let x = unfold::unfold(&model.table)?;
    let basis = homology::edge_basis(&x.surface)?;
    let s = &x.surface;
    let mut full = [vec![0i64; s.pairs().len()], vec![0i64; s.pairs().len()]];
    for g in &x.group.elements {
        for j in 0..model.pairing.len() {
            let (pos, _) = model.domain_pair_edges(j);
            let e = x.copy_edge(g, pos);
            let p = s.pair_of(e).unwrap();
            // g_* h(e_j) carries det(g) upsilon(e); weighted by det(g)
            for l in 0..2 {
                full[l][p] += model.decomposition.coeffs[j][l] * s.upsilon(e);
            }
        }
    }
    let gamma = [basis.reduce(&full[0]), basis.reduce(&full[1])];
    let descriptor = cover::cover_descriptor_full(&basis, &full)?;
    Ok(UnfoldedModel { x, basis, gamma, gamma_full: full, descriptor })
}

/// Planar L-shaped obstacle pair with distinguished corners of angle pi/2.
#[derive(Clone, Debug, PartialEq)]
pub struct LEmbedding {
    pub xi: RatAngle,
    pub scale: Q,
    pub s1: RatVec2,
    pub s2: RatVec2,
    /// Obstacle indices of `L_1` and `L_2`.
    pub l1: usize,
    pub l2: usize,
    /// Rotation of `L_1` (that of `L_2` is this plus pi).
    pub rotation: RatAngle,
}

/// Index of the distinguished corner in the L polygon.
pub const L_CORNER: usize = 3;

/// L with its reflex corner at the origin; the free quadrant at the corner
/// is `x > 0, y > 0`.
fn base_l(scale: &Q) -> Vec<RatVec2> {
    let t = scale / eg::qi(4);
    let b = scale * eg::q(3, 4);
    let a = scale / eg::qi(4);
    let z = Q::zero();
    vec![
        RatVec2::new(-&t, -&t),
        RatVec2::new(b.clone(), -&t),
        RatVec2::new(b, z.clone()),
        RatVec2::new(z.clone(), z.clone()),
        RatVec2::new(z, a.clone()),
        RatVec2::new(-&t, a),
    ]
}

fn base_l_angles() -> Vec<RatAngle> {
    [(0, 1), (1, 2), (1, 1), (1, 2), (1, 1), (3, 2)].iter().map(|&(a, b)| RatAngle::new(a, b)).collect()
}

/// Rotation by `beta`: exact for multiples of pi/4 (scaled by `1/sqrt 2` off
/// the quarter turns), otherwise to about 1e-12.
fn rotate(beta: RatAngle, v: &RatVec2) -> RatVec2 {
    let eighths = beta.turns_of_pi() * eg::qi(4);
    if eighths.is_integer() {
        let k = (eighths.to_integer() % num_bigint::BigInt::from(8)).try_into().unwrap_or(0i64).rem_euclid(8);
        let half = eg::q(1, 2);
        let (c, s) = match k {
            0 => (eg::qi(1), eg::qi(0)),
            2 => (eg::qi(0), eg::qi(1)),
            4 => (eg::qi(-1), eg::qi(0)),
            6 => (eg::qi(0), eg::qi(-1)),
            1 => (half.clone(), half),
            3 => (-&half, half),
            5 => (-&half, -&half),
            _ => (half.clone(), -half),
        };
        return RatVec2::new(&v.x * &c - &v.y * &s, &v.x * &s + &v.y * &c);
    }
    let (s, c) = beta.radians().sin_cos();
    let den = 1i64 << 40;
    let (c, s) = (eg::rational_approx(c, den), eg::rational_approx(s, den));
    RatVec2::new(&v.x * &c - &v.y * &s, &v.x * &s + &v.y * &c)
}

fn placed_l(scale: &Q, rotation: RatAngle, corner: &RatVec2) -> Obstacle {
    let verts = base_l(scale).iter().map(|v| &rotate(rotation, v) + corner).collect();
    let angles = base_l_angles().into_iter().map(|a| a + rotation).collect();
    Obstacle::new(verts, angles)
}

/// The L pair for corner `s1`, scale and rotation.
pub fn l_pair(scale: &Q, rotation: RatAngle, s1: &RatVec2) -> (Obstacle, Obstacle, RatVec2) {
    let h = scale / eg::qi(2);
    let s2 = s1 + &rotate(rotation, &RatVec2::new(h.clone(), h));
    let l1 = placed_l(scale, rotation, s1);
    let l2 = placed_l(scale, rotation + RatAngle::half_turn(), &s2);
    (l1, l2, s2)
}

fn min_distance_to_segments(p: Pt, poly: &[RatVec2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let a = poly[i].to_f64();
            let b = poly[(i + 1) % n].to_f64();
            let ab = eg::sub(b, a);
            let t = (eg::dot(eg::sub(p, a), ab) / eg::dot(ab, ab)).clamp(0.0, 1.0);
            eg::norm(eg::sub(p, eg::add(a, eg::scale(ab, t))))
        })
        .fold(f64::INFINITY, f64::min)
}

fn clearance(a: &[RatVec2], b: &[RatVec2]) -> f64 {
    let d1 = a.iter().map(|v| min_distance_to_segments(v.to_f64(), b)).fold(f64::INFINITY, f64::min);
    let d2 = b.iter().map(|v| min_distance_to_segments(v.to_f64(), a)).fold(f64::INFINITY, f64::min);
    d1.min(d2)
}

/// Reason a placement of the L pair fails, if any.
fn placement_violation(model: &WindTreeModel, l1: &Obstacle, l2: &Obstacle, s1: &RatVec2, s2: &RatVec2, margin: f64) -> Option<String> {
    for (name, l) in [("L1", l1), ("L2", l2)] {
        if !planar::strictly_inside(&model.domain, &l.vertices) || clearance(&model.domain, &l.vertices) < margin {
            return Some(format!("{name} touches the domain boundary"));
        }
        for (i, o) in model.obstacles.iter().enumerate() {
            if planar::polygons_touch(&o.vertices, &l.vertices) || clearance(&o.vertices, &l.vertices) < margin {
                return Some(format!("{name} meets obstacle {i}"));
            }
        }
    }
    if planar::polygons_touch(&l1.vertices, &l2.vertices) {
        return Some("L1 meets L2".into());
    }
    segment_violation(model, l1, l2, s1, s2)
}

fn segment_violation(model: &WindTreeModel, l1: &Obstacle, l2: &Obstacle, s1: &RatVec2, s2: &RatVec2) -> Option<String> {
    let skip = model.embedding.as_ref().map(|e| [e.l1, e.l2]);
    let dn = model.domain.len();
    for k in 0..dn {
        if planar::segments_touch(s1, s2, &model.domain[k], &model.domain[(k + 1) % dn]) {
            return Some(format!("domain edge {k}"));
        }
    }
    for (i, o) in model.obstacles.iter().enumerate() {
        if skip.is_some_and(|k| k.contains(&i)) {
            continue;
        }
        let m = o.vertices.len();
        for k in 0..m {
            if planar::segments_touch(s1, s2, &o.vertices[k], &o.vertices[(k + 1) % m]) {
                return Some(format!("obstacle {i}"));
            }
        }
    }
    for (name, l, end) in [("L1", l1, s1), ("L2", l2, s2)] {
        let m = l.vertices.len();
        for k in 0..m {
            if bad_contact(s1, s2, &l.vertices[k], &l.vertices[(k + 1) % m], &[end]) {
                return Some(name.into());
            }
        }
        let mid = (s1 + s2).scale(&eg::q(1, 2));
        if planar::locate(&l.vertices, &mid) != Location::Outside {
            return Some(format!("{name} interior"));
        }
    }
    None
}

/// Smallest nonzero angle difference of the configuration, or zero.
pub fn default_xi(model: &WindTreeModel) -> RatAngle {
    model.rationality.diffs.iter().map(|d| d.mod_pi()).filter(|d| !d.is_zero()).min().unwrap_or_else(RatAngle::zero)
}

/// Add the L pair rotated by `xi` (plus the reference axis). Without an
/// anchor a grid search over the domain picks the corner `s1`; without a
/// scale the default is halved up to eight times until a placement fits.
/// Parameters that are given are used as is.
pub fn embed_l(
    model: &WindTreeModel,
    xi: Option<RatAngle>,
    scale: Option<Q>,
    anchor: Option<RatVec2>,
) -> Result<WindTreeModel, WindTreeError> {
    let xi = xi.unwrap_or_else(|| default_xi(model));
    let axis = unfold::reference_axis(&model.table.xi()?, model.n());
    let rotation = axis + xi;
    let lo_hi = unfold::bounding_box(&model.domain.iter().map(RatVec2::to_f64).collect::<Vec<_>>());
    let extent = (lo_hi.1[0] - lo_hi.0[0]).min(lo_hi.1[1] - lo_hi.0[1]);
    let scale_given = scale.is_some();
    let mut scale = scale.unwrap_or_else(|| eg::rational_approx(extent / 8.0, 1 << 20));
    let mut last = String::from("no candidate inside the domain");
    let try_at = |s1: &RatVec2, scale: &Q, last: &mut String| -> Option<WindTreeModel> {
        let (l1, l2, s2) = l_pair(scale, rotation, s1);
        let margin = 1e-9 * eg::q_to_f64(scale).max(1.0);
        if let Some(v) = placement_violation(model, &l1, &l2, s1, &s2, margin) {
            *last = v;
            return None;
        }
        let mut obstacles = model.obstacles.clone();
        let (i1, i2) = (obstacles.len(), obstacles.len() + 1);
        obstacles.push(l1);
        obstacles.push(l2);
        let keep = vec![(i1, L_CORNER), (i2, L_CORNER)];
        match build_model_with(model.lattice.clone(), model.domain.clone(), model.pairing.clone(), obstacles, keep) {
            Ok(mut m) => {
                m.embedding = Some(LEmbedding {
                    xi,
                    scale: scale.clone(),
                    s1: s1.clone(),
                    s2,
                    l1: i1,
                    l2: i2,
                    rotation,
                });
                Some(m)
            }
            Err(e) => {
                *last = e.to_string();
                None
            }
        }
    };
    let mut found = None;
    let mut halvings = 0;
    while found.is_none() && halvings <= 8 {
        if let Some(a) = &anchor {
            found = try_at(a, &scale, &mut last);
        } else {
            let stride = scale.clone();
            let lo = RatVec2::new(eg::rational_approx(lo_hi.0[0], 1 << 20), eg::rational_approx(lo_hi.0[1], 1 << 20));
            let steps_x = ((lo_hi.1[0] - lo_hi.0[0]) / eg::q_to_f64(&stride)).ceil() as i64;
            let steps_y = ((lo_hi.1[1] - lo_hi.0[1]) / eg::q_to_f64(&stride)).ceil() as i64;
            'grid: for j in 1..steps_y {
                for i in 1..steps_x {
                    let s1 = &lo + &RatVec2::new(&stride * eg::qi(i), &stride * eg::qi(j));
                    if planar::locate(&model.domain, &s1) != Location::Inside {
                        continue;
                    }
                    if let Some(m) = try_at(&s1, &scale, &mut last) {
                        found = Some(m);
                        break 'grid;
                    }
                }
            }
        }
        if found.is_none() {
            if scale_given {
                break;
            }
            scale = &scale / eg::qi(2);
            halvings += 1;
        }
    }
    let m = found.ok_or(WindTreeError::NoValidPlacement(last))?;
    let expected = num_integer::lcm(model.n(), 2);
    if m.n() != expected {
        return Err(WindTreeError::BreaksRationality { expected, got: m.n() });
    }
    Ok(m)
}

/// Core curve of the good cylinder.
#[derive(Clone, Debug)]
pub struct GoodCylinder {
    pub class: RelHomologyClass,
    pub dual: DualClass,
    /// Segment `s1 -> s2` in the identity copy and its image under iota.
    pub segments: [(Pt, Pt); 2],
    pub length: f64,
}

fn iota_of(x: &UnfoldedSurface) -> Option<DihedralElement> {
    x.group.iota()
}

/// Orbit of the distinguished corner of obstacle `li` in `X` is a regular
/// point made of four right-angled corners.
fn check_regular(model: &WindTreeModel, x: &UnfoldedSurface, li: usize, name: &str) -> Result<(usize, usize), WindTreeError> {
    let c = model.table.obstacle_corner[li][L_CORNER]
        .ok_or_else(|| WindTreeError::NotRegularSingularity(format!("{name} carries a bridge")))?;
    let id = x.group.identity();
    let (p, k) = x.copy_corner(&id, c);
    let orbit = &x.surface.orbits()[x.surface.orbit_of_corner(p, k)];
    let quarter = eg::q(1, 2);
    let corners_ok = orbit
        .corners
        .iter()
        .all(|&(p, k)| x.surface.polygon(p).corner_angle_exact(k).as_ref() == Some(&quarter));
    if orbit.corners.len() != 4 || !corners_ok || orbit.exact_angle != Some(eg::qi(2)) || orbit.cone_multiple != 1 {
        return Err(WindTreeError::NotRegularSingularity(format!(
            "{name}: {} corners, total angle {:.6} pi",
            orbit.corners.len(),
            orbit.numeric_angle / std::f64::consts::PI
        )));
    }
    Ok((c, x.surface.orbit_of_corner(p, k)))
}

pub fn good_cylinder(model: &WindTreeModel, um: &UnfoldedModel) -> Result<GoodCylinder, WindTreeError> {
    let emb = model.embedding.as_ref().ok_or_else(|| WindTreeError::NotRegularSingularity("model has no L pair".into()))?;
    let x = &um.x;
    let s = &x.surface;
    let iota = iota_of(x).ok_or_else(|| WindTreeError::NotRegularSingularity("unfolding constant is odd".into()))?;
    let (c1, o1) = check_regular(model, x, emb.l1, "s1")?;
    let (c2, o2) = check_regular(model, x, emb.l2, "s2")?;
    let (ip1, ik1) = x.copy_corner(&iota, c1);
    let (ip2, ik2) = x.copy_corner(&iota, c2);
    if s.orbit_of_corner(ip1, ik1) != o1 || s.orbit_of_corner(ip2, ik2) != o2 {
        return Err(WindTreeError::NotRegularSingularity("s is not identified with iota(s)".into()));
    }
    let l1 = &model.obstacles[emb.l1];
    let l2 = &model.obstacles[emb.l2];
    if let Some(v) = segment_violation(model, l1, l2, &emb.s1, &emb.s2) {
        return Err(WindTreeError::SegmentBlocked(v));
    }

    // s1 -> s2 pushed onto the boundary of the table, minus its iota image
    let nv = model.table.len();
    let mut full = vec![0i64; s.pairs().len()];
    for (g, sign) in [(x.group.identity(), 1i64), (iota, -1)] {
        let mut k = c1;
        while k != c2 {
            let e = x.copy_edge(&g, k);
            full[s.pair_of(e).unwrap()] += sign * s.upsilon(e);
            k = (k + 1) % nv;
        }
    }
    let class = um.basis.reduce(&full);

    // parallel closed geodesic at a small offset, traced on X
    let a = emb.s1.to_f64();
    let b = emb.s2.to_f64();
    let d = eg::sub(b, a);
    let len = eg::norm(d);
    let dir = eg::scale(d, 1.0 / len);
    let normal = [-dir[1], dir[0]];
    let delta = eg::q_to_f64(&emb.scale) * 1e-4;
    let x0 = eg::add(eg::scale(eg::add(a, b), 0.5), eg::scale(normal, delta));
    let mut calls = 0usize;
    let tol = 1e-9 * len.max(1.0);
    let path = s
        .straight_line_flow(0, x0, dir, 100_000, |poly, p, q| {
            calls += 1;
            if calls == 1 || poly != 0 {
                return None;
            }
            let w = eg::sub(x0, p);
            let seg = eg::sub(q, p);
            let along = eg::dot(w, dir);
            (eg::cross(dir, w).abs() < tol && along >= -tol && along <= eg::norm(seg) + tol).then_some(along)
        })
        .map_err(|e| WindTreeError::SegmentBlocked(format!("offset geodesic: {e}")))?;
    if !path.closed {
        return Err(WindTreeError::SegmentBlocked("offset geodesic did not close".into()));
    }
    let exits: Vec<EdgeRef> = path.steps.iter().filter_map(|st| st.exit.map(|k| EdgeRef::new(st.poly, k))).collect();
    let dual = um.basis.dual_from_exits(s, &exits);
    let total: f64 = path.steps.iter().map(|st| st.length).sum();
    let mut visits: Vec<(usize, usize, usize)> = Vec::new();
    let steps = &path.steps;
    for st in steps.iter().skip(1).take(steps.len().saturating_sub(2)) {
        visits.push((st.poly, st.entry.unwrap(), st.exit.unwrap()));
    }
    if steps.len() >= 2 {
        let last = steps.last().unwrap();
        visits.push((0, last.entry.unwrap(), steps[0].exit.unwrap()));
    }
    let traced = um.basis.class_of_visits(s, &visits);
    if traced != class {
        return Err(WindTreeError::SegmentBlocked("traced core curve disagrees with the combinatorial class".into()));
    }
    if (total - 2.0 * len).abs() > 1e-6 * len.max(1.0) {
        return Err(WindTreeError::SegmentBlocked(format!("core curve length {total} differs from {}", 2.0 * len)));
    }
    let ia = x.apply(&iota, a);
    let ib = x.apply(&iota, b);
    Ok(GoodCylinder { class, dual, segments: [(a, b), (ib, ia)], length: total })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceCertificate {
    pub n: u32,
    pub genus: u32,
    pub copies: usize,
    pub rank: usize,
    pub conditions: [Condition; 4],
}

impl RecurrenceCertificate {
    pub fn valid(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "wind-tree recurrence certificate");
        let _ = writeln!(out, "unfolding constant n = {}", self.n);
        let _ = writeln!(out, "copies = {}", self.copies);
        let _ = writeln!(out, "genus = {}", self.genus);
        let _ = writeln!(out, "relative homology rank = {}", self.rank);
        for (i, c) in self.conditions.iter().enumerate() {
            let _ = writeln!(out, "condition ({}) {}: {}", i + 1, c.name, if c.passed { "PASS" } else { "FAIL" });
            for w in &c.witness {
                let _ = writeln!(out, "  {w}");
            }
        }
        let _ = writeln!(out, "result: {}", if self.valid() { "PASS" } else { "FAIL" });
        out
    }
}

fn fmt_vec(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("[{}]", parts.join(" "))
}

/// Orbit sums `sum_rot g v` and `sum_refl g v` vanish exactly for `v`.
pub fn orbit_sums_vanish(x: &UnfoldedSurface, v: &RatVec2) -> bool {
    let m = x.cyclo_order;
    let mut rot = Cyclo::zero(m);
    let mut refl = Cyclo::zero(m);
    for g in &x.group.elements {
        let w = g.apply_cyclo(x.axis, v, m);
        if g.is_reflection() {
            refl = refl.add(&w);
        } else {
            rot = rot.add(&w);
        }
    }
    rot.is_zero() && refl.is_zero()
}

pub fn certify(model: &WindTreeModel) -> Result<RecurrenceCertificate, WindTreeError> {
    let um = unfold_model(model)?;
    Ok(certify_classes(model, &um, &um.gamma))
}

/// Certificate for arbitrary cover classes on the unfolded model.
pub fn certify_classes(model: &WindTreeModel, um: &UnfoldedModel, gamma: &[RelHomologyClass; 2]) -> RecurrenceCertificate {
    let x = &um.x;
    let s = &x.surface;
    let b = &um.basis;
    let iota = iota_of(x);
    let iota_map: Option<InducedMap> = iota.as_ref().and_then(|i| x.induced(b, i).ok());

    let c1 = match (&iota, &iota_map) {
        (Some(i), Some(_)) => Condition {
            name: "involution",
            passed: true,
            witness: vec![format!("n = {} is even; iota = {} acts on X", x.n, i)],
        },
        _ => Condition {
            name: "involution",
            passed: false,
            witness: vec![format!("n = {} is odd; the dihedral group has no rotation by pi", x.n)],
        },
    };

    let mut c2 = Condition { name: "no drift", passed: true, witness: Vec::new() };
    for (l, g) in gamma.iter().enumerate() {
        let num = homology::holonomy_f64(s, b, g);
        let exact = homology::holonomy_sym(s, b, g).map(|c| c.is_zero());
        let ok = exact == Some(true) && eg::norm(num) < 1e-9;
        c2.passed &= ok;
        c2.witness.push(format!(
            "hol(gamma_{}) exact zero = {}, numeric = ({:.3e}, {:.3e})",
            l + 1,
            exact.map_or("unknown".to_string(), |e| e.to_string()),
            num[0],
            num[1]
        ));
    }
    let mut orbit_ok = true;
    for j in 0..model.pairing.len() {
        let (pos, _) = model.domain_pair_edges(j);
        let nv = model.table.len();
        let v = &model.table.vertices[(pos + 1) % nv] - &model.table.vertices[pos];
        orbit_ok &= orbit_sums_vanish(x, &v);
    }
    c2.passed &= orbit_ok;
    c2.witness.push(format!("orbit sums over rotations and over reflections vanish = {orbit_ok}"));

    let c3 = match &iota_map {
        Some(m) => {
            let mut c = Condition { name: "cover classes are iota-invariant", passed: true, witness: Vec::new() };
            for (l, g) in gamma.iter().enumerate() {
                let img = m.apply(g);
                let ok = img == *g;
                c.passed &= ok;
                c.witness.push(format!("iota_* gamma_{} = gamma_{}: {}", l + 1, l + 1, ok));
            }
            c
        }
        None => Condition {
            name: "cover classes are iota-invariant",
            passed: false,
            witness: vec!["no involution".into()],
        },
    };

    let c4 = match (&iota_map, good_cylinder(model, um)) {
        (Some(m), Ok(gc)) => {
            let anti = m.apply(&gc.class) == -&gc.class;
            let nonzero = !gc.class.is_zero();
            let pairings: Vec<i64> = gamma.iter().map(|g| homology::intersection(g, &gc.dual).unwrap_or(i64::MAX)).collect();
            let zero_pairing = pairings.iter().all(|&p| p == 0);
            let mut w = vec![
                "s1 and s2 are regular points of X (four corners of angle pi/2 each)".to_string(),
                format!("core curve length = {:.12}", gc.length),
                format!("[gamma_C] = {}", fmt_vec(&gc.class.0)),
                format!("[gamma_C] nonzero = {nonzero}"),
                format!("iota_* [gamma_C] = -[gamma_C]: {anti}"),
            ];
            for (l, p) in pairings.iter().enumerate() {
                w.push(format!("i(gamma_{}, gamma_C) = {p}", l + 1));
            }
            Condition { name: "good cylinder", passed: anti && nonzero && zero_pairing, witness: w }
        }
        (None, _) => Condition { name: "good cylinder", passed: false, witness: vec!["no involution".into()] },
        (_, Err(e)) => Condition { name: "good cylinder", passed: false, witness: vec![e.to_string()] },
    };

    RecurrenceCertificate {
        n: x.n,
        genus: s.genus(),
        copies: x.copies(),
        rank: b.rank(),
        conditions: [c1, c2, c3, c4],
    }
}
