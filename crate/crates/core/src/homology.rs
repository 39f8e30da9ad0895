//! Relative homology `H_1(X, Sigma; Z)` in the edge basis, dual cycles,
//! the intersection pairing and induced actions of automorphisms.
//!
//! Full coordinates are indexed by edge pairs. A spanning tree of the
//! polygon adjacency graph removes one pair per non-root polygon; the
//! remaining pairs form the basis. Boundary edges of parking garages carry
//! no class (the obstacles are collapsed to punctures).

use crate::exactgeom::{self as eg, Cyclo, Pt, Q, RatVec2, Vector};
use crate::surface::{EdgeRef, TranslationSurface};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomologyError {
    #[error("configuration is disconnected")]
    DisconnectedConfiguration,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("relabeling is not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("map does not square to the identity")]
    NotInvolution,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelHomologyClass(pub Vec<i64>);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualClass(pub Vec<i64>);

macro_rules! int_vector_ops {
    ($t:ident) => {
        impl $t {
            pub fn zero(rank: usize) -> Self {
                $t(vec![0; rank])
            }
            pub fn unit(rank: usize, i: usize) -> Self {
                let mut v = vec![0; rank];
                v[i] = 1;
                $t(v)
            }
            pub fn rank(&self) -> usize {
                self.0.len()
            }
            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|&c| c == 0)
            }
            pub fn scaled(&self, k: i64) -> Self {
                $t(self.0.iter().map(|c| c * k).collect())
            }
        }
        impl std::ops::Add for &$t {
            type Output = $t;
            fn add(self, o: &$t) -> $t {
                assert_eq!(self.0.len(), o.0.len());
                $t(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
            }
        }
        impl std::ops::Sub for &$t {
            type Output = $t;
            fn sub(self, o: &$t) -> $t {
                assert_eq!(self.0.len(), o.0.len());
                $t(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
            }
        }
        impl std::ops::Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                self.scaled(-1)
            }
        }
    };
}

int_vector_ops!(RelHomologyClass);
int_vector_ops!(DualClass);

/// Edge basis of a built surface.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    /// Pair indices forming the basis, increasing.
    pub basis: Vec<usize>,
    /// Pair indices used by the spanning tree.
    pub tree: Vec<usize>,
    index: Vec<Option<usize>>,
    /// For each pair in the tree, its class in basis coordinates.
    tree_rows: Vec<Option<Vec<i64>>>,
    /// Tree parent of each polygon as `(parent polygon, pair)`.
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    /// Full crossing vectors of the dual cycles, one per basis element.
    dual_crossings: Vec<Vec<i64>>,
    n_pairs: usize,
}

pub fn edge_basis(s: &TranslationSurface) -> Result<HomologyBasis, HomologyError> {
    let nf = s.polygons().len();
    let np = s.pairs().len();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nf];
    let mut depth = vec![0usize; nf];
    let mut seen = vec![false; nf];
    let mut order = Vec::with_capacity(nf);
    let mut is_tree = vec![false; np];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(f) = queue.pop_front() {
        order.push(f);
        for k in 0..s.polygon(f).len() {
            let e = EdgeRef::new(f, k);
            let (Some(p), Some(g)) = (s.pair_of(e), s.partner(e)) else { continue };
            if !seen[g.poly] {
                seen[g.poly] = true;
                parent[g.poly] = Some((f, p));
                depth[g.poly] = depth[f] + 1;
                is_tree[p] = true;
                queue.push_back(g.poly);
            }
        }
    }
    if order.len() != nf {
        return Err(HomologyError::DisconnectedConfiguration);
    }
    let basis: Vec<usize> = (0..np).filter(|&p| !is_tree[p]).collect();
    let tree: Vec<usize> = (0..np).filter(|&p| is_tree[p]).collect();
    let mut index = vec![None; np];
    for (i, &p) in basis.iter().enumerate() {
        index[p] = Some(i);
    }

    // subtree membership: walk BFS order backwards accumulating children
    let mut subtree: Vec<Vec<usize>> = (0..nf).map(|f| vec![f]).collect();
    for &f in order.iter().rev() {
        if let Some((par, _)) = parent[f] {
            let mine = std::mem::take(&mut subtree[f]);
            subtree[par].extend(mine.iter().copied());
            subtree[f] = mine;
        }
    }
    let mut tree_rows = vec![None; np];
    for f in 0..nf {
        let Some((_, t)) = parent[f] else { continue };
        // boundary of the subtree below the tree pair is null-homologous
        let mut bd = vec![0i64; np];
        for &g in &subtree[f] {
            for k in 0..s.polygon(g).len() {
                let e = EdgeRef::new(g, k);
                if let Some(p) = s.pair_of(e) {
                    bd[p] += s.upsilon(e);
                }
            }
        }
        let sigma = bd[t];
        debug_assert!(sigma.abs() == 1);
        let row = basis.iter().map(|&q| -sigma * bd[q]).collect();
        tree_rows[t] = Some(row);
    }

    let mut b = HomologyBasis {
        basis,
        tree,
        index,
        tree_rows,
        parent,
        depth,
        dual_crossings: Vec::new(),
        n_pairs: np,
    };
    b.dual_crossings = (0..b.basis.len()).map(|i| b.dual_cycle_crossings(s, b.basis[i])).collect();
    Ok(b)
}

impl HomologyBasis {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn pair_count(&self) -> usize {
        self.n_pairs
    }

    pub fn basis_index(&self, pair: usize) -> Option<usize> {
        self.index[pair]
    }

    /// Basis coordinates of an integer combination of pair classes.
    pub fn reduce(&self, full: &[i64]) -> RelHomologyClass {
        assert_eq!(full.len(), self.n_pairs);
        let mut out = vec![0i64; self.rank()];
        for (p, &c) in full.iter().enumerate() {
            if c == 0 {
                continue;
            }
            match (self.index[p], &self.tree_rows[p]) {
                (Some(i), _) => out[i] += c,
                (None, Some(row)) => {
                    for (o, r) in out.iter_mut().zip(row) {
                        *o += c * r;
                    }
                }
                (None, None) => unreachable!("pair neither basis nor tree"),
            }
        }
        RelHomologyClass(out)
    }

    /// Full coordinates of a basis-coordinate class (tree pairs get zero).
    pub fn expand(&self, a: &RelHomologyClass) -> Vec<i64> {
        let mut full = vec![0i64; self.n_pairs];
        for (i, &p) in self.basis.iter().enumerate() {
            full[p] = a.0[i];
        }
        full
    }

    /// `h(e)` for edge `e` traversed counterclockwise in its polygon.
    pub fn edge_class(&self, s: &TranslationSurface, e: EdgeRef) -> RelHomologyClass {
        let mut full = vec![0i64; self.n_pairs];
        if let Some(p) = s.pair_of(e) {
            full[p] = s.upsilon(e);
        }
        self.reduce(&full)
    }

    pub fn pair_class(&self, pair: usize) -> RelHomologyClass {
        let mut full = vec![0i64; self.n_pairs];
        full[pair] = 1;
        self.reduce(&full)
    }

    /// Basis element `i` as a class.
    pub fn basis_class(&self, i: usize) -> RelHomologyClass {
        RelHomologyClass::unit(self.rank(), i)
    }

    /// Dual cycle of basis element `i`.
    pub fn dual_class(&self, i: usize) -> DualClass {
        self.dual_from_crossings(&self.dual_crossings[i])
    }

    /// Signed crossing counts of the dual cycle of basis element `i` with
    /// every pair: leaving a polygon through edge `f` counts `upsilon(f)`.
    pub fn dual_crossings(&self, i: usize) -> &[i64] {
        &self.dual_crossings[i]
    }

    /// Polygon sequence of the dual cycle of basis element `i`, with the
    /// edge crossed at each step.
    pub fn dual_cycle_path(&self, s: &TranslationSurface, i: usize) -> Vec<EdgeRef> {
        let pair = s.pair(self.basis[i]);
        let mut exits = vec![pair.pos];
        exits.extend(self.tree_path(s, pair.neg.poly, pair.pos.poly));
        exits
    }

    fn dual_cycle_crossings(&self, s: &TranslationSurface, pair: usize) -> Vec<i64> {
        let mut x = vec![0i64; self.n_pairs];
        let pr = s.pair(pair);
        for e in std::iter::once(pr.pos).chain(self.tree_path(s, pr.neg.poly, pr.pos.poly)) {
            x[s.pair_of(e).unwrap()] += s.upsilon(e);
        }
        x
    }

    /// Exit edges of the tree path from polygon `a` to polygon `b`.
    fn tree_path(&self, s: &TranslationSurface, a: usize, b: usize) -> Vec<EdgeRef> {
        let (mut u, mut w) = (a, b);
        let mut up = Vec::new();
        let mut down = Vec::new();
        let exit_towards = |from: usize, pair: usize| {
            let p = s.pair(pair);
            if p.pos.poly == from {
                p.pos
            } else {
                p.neg
            }
        };
        while u != w {
            if self.depth[u] >= self.depth[w] {
                let (par, t) = self.parent[u].unwrap();
                up.push(exit_towards(u, t));
                u = par;
            } else {
                let (par, t) = self.parent[w].unwrap();
                down.push(exit_towards(par, t));
                w = par;
            }
        }
        down.reverse();
        up.extend(down);
        up
    }

    /// Dual class of a closed curve in the complement of the singularities
    /// given its full crossing vector.
    pub fn dual_from_crossings(&self, crossings: &[i64]) -> DualClass {
        DualClass(self.basis.iter().map(|&p| crossings[p]).collect())
    }

    /// Dual class of a closed curve given by the edges it leaves through.
    pub fn dual_from_exits(&self, s: &TranslationSurface, exits: &[EdgeRef]) -> DualClass {
        let mut x = vec![0i64; self.n_pairs];
        for &e in exits {
            if let Some(p) = s.pair_of(e) {
                x[p] += s.upsilon(e);
            }
        }
        self.dual_from_crossings(&x)
    }

    /// Class of a closed curve that visits polygons with the given entry and
    /// exit edges: in each polygon the curve is pushed onto the edges strictly
    /// between entry and exit, counterclockwise.
    pub fn class_of_visits(&self, s: &TranslationSurface, visits: &[(usize, usize, usize)]) -> RelHomologyClass {
        let mut full = vec![0i64; self.n_pairs];
        for &(f, entry, exit) in visits {
            let n = s.polygon(f).len();
            let mut k = (entry + 1) % n;
            while k != exit {
                let e = EdgeRef::new(f, k);
                if let Some(p) = s.pair_of(e) {
                    full[p] += s.upsilon(e);
                }
                k = (k + 1) % n;
            }
        }
        self.reduce(&full)
    }

    /// Dual classes of loops around each boundary component of a garage.
    /// Each loop runs parallel to the boundary with the surface on its left.
    pub fn boundary_loops(&self, s: &TranslationSurface) -> Vec<DualClass> {
        let mut done = std::collections::BTreeSet::new();
        let mut loops = Vec::new();
        for (f, poly) in s.polygons().iter().enumerate() {
            for k in 0..poly.len() {
                let start = EdgeRef::new(f, k);
                if !s.is_boundary(start) || done.contains(&start) {
                    continue;
                }
                let mut x = vec![0i64; self.n_pairs];
                let mut cur = start;
                loop {
                    done.insert(cur);
                    let n = s.polygon(cur.poly).len();
                    let mut c = EdgeRef::new(cur.poly, (cur.edge + 1) % n);
                    while !s.is_boundary(c) {
                        x[s.pair_of(c).unwrap()] += s.upsilon(c);
                        let g = s.partner(c).unwrap();
                        c = EdgeRef::new(g.poly, (g.edge + 1) % s.polygon(g.poly).len());
                    }
                    cur = c;
                    if cur == start {
                        break;
                    }
                }
                loops.push(self.dual_from_crossings(&x));
            }
        }
        loops
    }
}

pub fn intersection(a: &RelHomologyClass, b: &DualClass) -> Result<i64, HomologyError> {
    if a.rank() != b.rank() {
        return Err(HomologyError::DimensionMismatch(a.rank(), b.rank()));
    }
    Ok(a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum())
}

pub fn holonomy_f64(s: &TranslationSurface, b: &HomologyBasis, a: &RelHomologyClass) -> Pt {
    let mut v = [0.0, 0.0];
    for (i, &p) in b.basis.iter().enumerate() {
        if a.0[i] != 0 {
            v = eg::add(v, eg::scale(s.pair_vector(p), a.0[i] as f64));
        }
    }
    v
}

pub fn holonomy_exact(s: &TranslationSurface, b: &HomologyBasis, a: &RelHomologyClass) -> Option<RatVec2> {
    let mut v = RatVec2::zero();
    for (i, &p) in b.basis.iter().enumerate() {
        if a.0[i] != 0 {
            v = &v + &s.pair_vector_exact(p)?.scale_int(a.0[i]);
        }
    }
    Some(v)
}

/// Holonomy in the cyclotomic field carried by the polygons.
pub fn holonomy_sym(s: &TranslationSurface, b: &HomologyBasis, a: &RelHomologyClass) -> Option<Cyclo> {
    let mut acc: Option<Cyclo> = None;
    for (i, &p) in b.basis.iter().enumerate() {
        let term = s.pair_vector_sym(p)?.scale_int(a.0[i]);
        acc = Some(match acc {
            None => term,
            Some(x) => x.add(&term),
        });
    }
    Some(acc.unwrap_or_else(|| Cyclo::zero(4)))
}

pub fn holonomy(s: &TranslationSurface, b: &HomologyBasis, a: &RelHomologyClass) -> Vector {
    match holonomy_exact(s, b, a) {
        Some(v) => Vector::Exact(v),
        None => Vector::Numeric(holonomy_f64(s, b, a)),
    }
}

/// Polygon and edge relabeling induced by an affine automorphism whose
/// derivative has determinant sign `sign`. Orientation-reversing maps send
/// counterclockwise edges to clockwise ones.
#[derive(Clone, Debug)]
pub struct Relabeling {
    pub poly_map: Vec<usize>,
    pub edge_map: Vec<Vec<EdgeRef>>,
    pub sign: i64,
}

impl Relabeling {
    pub fn identity(s: &TranslationSurface) -> Self {
        Relabeling {
            poly_map: (0..s.polygons().len()).collect(),
            edge_map: s
                .polygons()
                .iter()
                .enumerate()
                .map(|(f, p)| (0..p.len()).map(|k| EdgeRef::new(f, k)).collect())
                .collect(),
            sign: 1,
        }
    }

    pub fn image(&self, e: EdgeRef) -> EdgeRef {
        self.edge_map[e.poly][e.edge]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InducedMap {
    /// Column `j` is the image of basis element `j`.
    pub matrix: Vec<Vec<i64>>,
    /// Action on dual classes.
    pub dual_matrix: Vec<Vec<i64>>,
    pub sign: i64,
}

fn mat_vec(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

impl InducedMap {
    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn apply(&self, a: &RelHomologyClass) -> RelHomologyClass {
        RelHomologyClass(mat_vec(&self.matrix, &a.0))
    }

    pub fn apply_dual(&self, d: &DualClass) -> DualClass {
        DualClass(mat_vec(&self.dual_matrix, &d.0))
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &x)| x == (i == j) as i64))
    }

    pub fn compose(&self, o: &InducedMap) -> InducedMap {
        let mul = |a: &[Vec<i64>], b: &[Vec<i64>]| -> Vec<Vec<i64>> {
            let n = a.len();
            (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
        };
        InducedMap {
            matrix: mul(&self.matrix, &o.matrix),
            dual_matrix: mul(&self.dual_matrix, &o.dual_matrix),
            sign: self.sign * o.sign,
        }
    }
}

fn check_relabeling(s: &TranslationSurface, r: &Relabeling) -> Result<(), HomologyError> {
    let nf = s.polygons().len();
    let bad = |m: String| Err(HomologyError::NotAutomorphism(m));
    if r.poly_map.len() != nf || r.edge_map.len() != nf {
        return bad("wrong number of polygons".into());
    }
    let mut hit: Vec<Vec<bool>> = s.polygons().iter().map(|p| vec![false; p.len()]).collect();
    for (f, edges) in r.edge_map.iter().enumerate() {
        if edges.len() != s.polygon(f).len() {
            return bad(format!("polygon {f} edge count"));
        }
        for (k, &img) in edges.iter().enumerate() {
            if img.poly >= nf || img.edge >= s.polygon(img.poly).len() {
                return bad(format!("image of P{f}e{k} out of range"));
            }
            if img.poly != r.poly_map[f] {
                return bad(format!("image of P{f}e{k} not in image polygon"));
            }
            if hit[img.poly][img.edge] {
                return bad(format!("edge {img} hit twice"));
            }
            hit[img.poly][img.edge] = true;
            let e = EdgeRef::new(f, k);
            match (s.partner(e), s.partner(img)) {
                (None, None) => {}
                (Some(pe), Some(pi)) if r.image(pe) == pi => {}
                _ => return bad(format!("does not commute with the pairing at {e}")),
            }
        }
    }
    Ok(())
}

pub fn induced_map(s: &TranslationSurface, b: &HomologyBasis, r: &Relabeling) -> Result<InducedMap, HomologyError> {
    check_relabeling(s, r)?;
    let n = b.rank();
    // sigma_p: +1 if the positive edge goes to a positive edge
    let image_full = |full: &[i64], with_sign: bool| -> Vec<i64> {
        let mut out = vec![0i64; b.n_pairs];
        for (p, &c) in full.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let img = r.image(s.pair(p).pos);
            let q = s.pair_of(img).unwrap();
            let sig = s.upsilon(img) * if with_sign { r.sign } else { 1 };
            out[q] += sig * c;
        }
        out
    };
    let mut matrix = vec![vec![0i64; n]; n];
    let mut dual_matrix = vec![vec![0i64; n]; n];
    for j in 0..n {
        let col = b.reduce(&image_full(&b.expand(&b.basis_class(j)), true));
        let dcol = b.dual_from_crossings(&image_full(b.dual_crossings(j), false));
        for i in 0..n {
            matrix[i][j] = col.0[i];
            dual_matrix[i][j] = dcol.0[i];
        }
    }
    Ok(InducedMap { matrix, dual_matrix, sign: r.sign })
}

/// Split `a` into `iota`-invariant and anti-invariant parts over `Q`.
pub fn iota_split(iota: &InducedMap, a: &RelHomologyClass) -> Result<(Vec<Q>, Vec<Q>), HomologyError> {
    if a.rank() != iota.rank() {
        return Err(HomologyError::DimensionMismatch(a.rank(), iota.rank()));
    }
    if !iota.compose(iota).is_identity() {
        return Err(HomologyError::NotInvolution);
    }
    let ia = iota.apply(a);
    let half = eg::q(1, 2);
    let plus = a.0.iter().zip(&ia.0).map(|(x, y)| eg::qi(x + y) * &half).collect();
    let minus = a.0.iter().zip(&ia.0).map(|(x, y)| eg::qi(x - y) * &half).collect();
    Ok((plus, minus))
}

/// Integer vector from rational coordinates, when all are integers.
pub fn integral(v: &[Q]) -> Option<Vec<i64>> {
    v.iter().map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None }).collect()
}

/// Exact rational inverse of an integer matrix, if invertible.
pub fn rational_inverse(m: &[Vec<i64>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Q> = row.iter().map(|&x| eg::qi(x)).collect();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, piv);
        let p = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot_row = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solve `M x = v` over `Q` for square invertible `M`.
pub fn solve_rational(m: &[Vec<i64>], v: &[i64]) -> Option<Vec<Q>> {
    let inv = rational_inverse(m)?;
    Some(inv.iter().map(|row| row.iter().zip(v).map(|(a, &b)| a * eg::qi(b)).sum()).collect())
}

/// Largest absolute coefficient; handy for diagnostics.
pub fn max_abs(v: &[Q]) -> Q {
    v.iter().map(|c| c.abs()).fold(Q::zero(), |a, b| if b > a { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_surface, exact_polygon_surface, Polygon};

    fn p(x: i64, y: i64) -> RatVec2 {
        RatVec2::from_ints(x, y)
    }

    fn torus() -> TranslationSurface {
        exact_polygon_surface(vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)], &[(0, 2), (3, 1)]).unwrap()
    }

    fn two_squares() -> TranslationSurface {
        let a = Polygon::from_exact(vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)]);
        let b = Polygon::from_exact(vec![p(1, 0), p(2, 0), p(2, 1), p(1, 1)]);
        let e = EdgeRef::new;
        let pairs = [(e(0, 0), e(0, 2)), (e(1, 0), e(1, 2)), (e(0, 1), e(1, 3)), (e(1, 1), e(0, 3))];
        build_surface(vec![a, b], &pairs).unwrap()
    }

    #[test]
    fn torus_basis() {
        let s = torus();
        let b = edge_basis(&s).unwrap();
        assert_eq!(b.rank(), 2);
        assert!(b.tree.is_empty());
        let h0 = b.basis_class(0);
        assert_eq!(holonomy(&s, &b, &h0), Vector::Exact(p(1, 0)));
        // top edge is the negative partner of the bottom edge
        let top = b.edge_class(&s, EdgeRef::new(0, 2));
        assert_eq!(holonomy_f64(&s, &b, &top), [-1.0, 0.0]);
    }

    #[test]
    fn two_square_rank() {
        let s = two_squares();
        let b = edge_basis(&s).unwrap();
        assert_eq!(b.rank(), 3);
        assert_eq!(b.tree, vec![2]);
        let rank = 2 * s.genus() as usize + s.orbits().len() - 1;
        assert_eq!(b.rank(), rank);
    }

    #[test]
    fn dual_basis_identity() {
        for s in [torus(), two_squares()] {
            let b = edge_basis(&s).unwrap();
            for i in 0..b.rank() {
                for j in 0..b.rank() {
                    let v = intersection(&b.basis_class(i), &b.dual_class(j)).unwrap();
                    assert_eq!(v, (i == j) as i64);
                }
            }
        }
    }

    #[test]
    fn bilinear() {
        let s = torus();
        let b = edge_basis(&s).unwrap();
        let a = &b.basis_class(0).scaled(2) - &b.basis_class(1);
        assert_eq!(intersection(&a, &b.dual_class(0).scaled(3)).unwrap(), 6);
        assert!(matches!(
            intersection(&a, &DualClass::zero(3)),
            Err(HomologyError::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn vertical_geodesic_meets_bottom_edge() {
        let s = torus();
        let b = edge_basis(&s).unwrap();
        let start = [0.5, 0.3];
        let path = s
            .straight_line_flow(0, start, [0.0, 1.0], 4, |_, a, e| {
                (a[1] < start[1] && e[1] >= start[1]).then_some(0.0)
            })
            .unwrap();
        let exits: Vec<EdgeRef> = path.steps.iter().filter_map(|st| st.exit.map(|k| EdgeRef::new(st.poly, k))).collect();
        let d = b.dual_from_exits(&s, &exits);
        // leaves through the top (negative) edge: crosses h(bottom) right to left
        assert_eq!(intersection(&b.basis_class(0), &d).unwrap(), -1);
        assert_eq!(intersection(&b.basis_class(1), &d).unwrap(), 0);
        let c = b.class_of_visits(&s, &[(0, 0, 2)]);
        assert_eq!(holonomy_f64(&s, &b, &c), [0.0, 1.0]);
    }

    #[test]
    fn half_turn_of_torus() {
        let s = torus();
        let b = edge_basis(&s).unwrap();
        let e = EdgeRef::new;
        let r = Relabeling { poly_map: vec![0], edge_map: vec![vec![e(0, 2), e(0, 3), e(0, 0), e(0, 1)]], sign: 1 };
        let m = induced_map(&s, &b, &r).unwrap();
        assert_eq!(m.matrix, vec![vec![-1, 0], vec![0, -1]]);
        let (plus, minus) = iota_split(&m, &b.basis_class(0)).unwrap();
        assert!(plus.iter().all(Zero::is_zero));
        assert_eq!(integral(&minus), Some(vec![1, 0]));
        let id = induced_map(&s, &b, &Relabeling::identity(&s)).unwrap();
        assert!(id.is_identity());
        let (plus, _) = iota_split(&id, &b.basis_class(1)).unwrap();
        assert_eq!(integral(&plus), Some(vec![0, 1]));
    }

    #[test]
    fn reflection_flips_intersections() {
        // reflect the square across the diagonal: edges reverse orientation
        let s = torus();
        let b = edge_basis(&s).unwrap();
        let e = EdgeRef::new;
        let r = Relabeling { poly_map: vec![0], edge_map: vec![vec![e(0, 3), e(0, 2), e(0, 1), e(0, 0)]], sign: -1 };
        let m = induced_map(&s, &b, &r).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let before = intersection(&b.basis_class(i), &b.dual_class(j)).unwrap();
                let after = intersection(&m.apply(&b.basis_class(i)), &m.apply_dual(&b.dual_class(j))).unwrap();
                assert_eq!(after, -before);
            }
        }
    }

    #[test]
    fn rejects_bad_relabeling() {
        let s = torus();
        let b = edge_basis(&s).unwrap();
        let e = EdgeRef::new;
        let r = Relabeling { poly_map: vec![0], edge_map: vec![vec![e(0, 1), e(0, 0), e(0, 2), e(0, 3)]], sign: 1 };
        assert!(matches!(induced_map(&s, &b, &r), Err(HomologyError::NotAutomorphism(_))));
    }

    #[test]
    fn inverse_of_unimodular() {
        let inv = rational_inverse(&[vec![2, 1], vec![1, 1]]).unwrap();
        assert_eq!(integral(&inv[0]), Some(vec![1, -1]));
        assert_eq!(integral(&inv[1]), Some(vec![-1, 2]));
        assert!(rational_inverse(&[vec![1, 2], vec![2, 4]]).is_none());
    }
}
