//! `Z^k`-covers of a compact surface described lazily by a shift table, and
//! the `Z^2` torus-cover cycles of a fundamental domain of a lattice.

use crate::exactgeom::{self as eg, RatVec2, Q};
use crate::homology::{DualClass, HomologyBasis, RelHomologyClass};
use crate::surface::{EdgeRef, TranslationSurface};
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error("cover classes are linearly dependent")]
    DependentClasses,
    #[error("edge pair {pair}: translation is not an integer combination of the lattice basis")]
    NonIntegralDecomposition { pair: usize },
    #[error("lattice vectors are linearly dependent")]
    DegenerateLattice,
    #[error("class rank {0} does not match basis rank {1}")]
    DimensionMismatch(usize, usize),
}

pub type DeckCoordinate = Vec<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Crossing {
    Leaving,
    Entering,
}

#[derive(Clone, Debug)]
pub struct CoverDescriptor {
    pub classes: Vec<RelHomologyClass>,
    /// Shift picked up when leaving through the positive edge of each pair.
    pub pair_shift: Vec<Vec<i64>>,
}

fn independent(rows: &[Vec<i64>]) -> bool {
    let k = rows.len();
    let mut a: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| eg::qi(x)).collect()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..k).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, piv);
        for r in 0..k {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                let pr = a[rank].clone();
                for (x, y) in a[r].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank == k
}

/// Shift table `shift(e) = upsilon_e (i(gamma_1, gamma*_e), ..., i(gamma_k, gamma*_e))`;
/// pairs outside the basis get zero.
pub fn cover_descriptor(
    basis: &HomologyBasis,
    classes: &[RelHomologyClass],
) -> Result<CoverDescriptor, CoverError> {
    for c in classes {
        if c.rank() != basis.rank() {
            return Err(CoverError::DimensionMismatch(c.rank(), basis.rank()));
        }
    }
    if !independent(&classes.iter().map(|c| c.0.clone()).collect::<Vec<_>>()) {
        return Err(CoverError::DependentClasses);
    }
    let pair_shift = (0..basis.pair_count())
        .map(|p| match basis.basis_index(p) {
            Some(i) => classes.iter().map(|c| c.0[i]).collect(),
            None => vec![0; classes.len()],
        })
        .collect();
    Ok(CoverDescriptor { classes: classes.to_vec(), pair_shift })
}

/// Descriptor from representatives in full pair coordinates. Gives the same
/// cover as `cover_descriptor` on the reduced classes; deck coordinates
/// differ by a per-polygon offset.
pub fn cover_descriptor_full(
    basis: &HomologyBasis,
    full: &[Vec<i64>],
) -> Result<CoverDescriptor, CoverError> {
    let classes: Vec<RelHomologyClass> = full.iter().map(|f| basis.reduce(f)).collect();
    if !independent(&classes.iter().map(|c| c.0.clone()).collect::<Vec<_>>()) {
        return Err(CoverError::DependentClasses);
    }
    let pair_shift = (0..basis.pair_count()).map(|p| full.iter().map(|f| f[p]).collect()).collect();
    Ok(CoverDescriptor { classes, pair_shift })
}

impl CoverDescriptor {
    pub fn k(&self) -> usize {
        self.classes.len()
    }

    /// Shift when leaving through `e`.
    pub fn shift(&self, s: &TranslationSurface, e: EdgeRef) -> Vec<i64> {
        match s.pair_of(e) {
            Some(p) => self.pair_shift[p].iter().map(|x| x * s.upsilon(e)).collect(),
            None => vec![0; self.k()],
        }
    }

    pub fn cross_edge(&self, s: &TranslationSurface, deck: &[i64], e: EdgeRef, dir: Crossing) -> DeckCoordinate {
        let sh = self.shift(s, e);
        let sign = if dir == Crossing::Leaving { 1 } else { -1 };
        deck.iter().zip(&sh).map(|(l, d)| l + sign * d).collect()
    }

    /// Edge of the cover reached by leaving through `e` in sheet `deck`.
    pub fn lift_edge(&self, s: &TranslationSurface, e: EdgeRef, deck: &[i64]) -> Option<(EdgeRef, DeckCoordinate)> {
        Some((s.partner(e)?, self.cross_edge(s, deck, e, Crossing::Leaving)))
    }

    /// Deck change along a closed path given by its exit edges.
    pub fn monodromy(&self, s: &TranslationSurface, exits: &[EdgeRef]) -> DeckCoordinate {
        exits.iter().fold(vec![0; self.k()], |l, &e| self.cross_edge(s, &l, e, Crossing::Leaving))
    }
}

/// Cylinders with core curve `m` lift to isometric cylinders iff `m` has zero
/// intersection with every cover class.
pub fn lifts_cylinder(d: &CoverDescriptor, m: &DualClass) -> bool {
    d.classes.iter().all(|c| c.0.iter().zip(&m.0).map(|(a, b)| a * b).sum::<i64>() == 0)
}

/// Integer coordinates of each edge-pair translation of a fundamental domain
/// in a lattice basis.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusDecomposition {
    pub lattice: [RatVec2; 2],
    /// `a^j` per domain pair.
    pub coeffs: Vec<[i64; 2]>,
}

/// Translation carrying the negative edge of a domain pair onto the
/// positive one.
pub fn pair_translation(domain: &[RatVec2], pos: usize, neg: usize) -> RatVec2 {
    let n = domain.len();
    &domain[pos] - &domain[(neg + 1) % n]
}

fn solve2(t: &[RatVec2; 2], v: &RatVec2) -> Option<[Q; 2]> {
    let det = t[0].cross(&t[1]);
    if det.is_zero() {
        return None;
    }
    Some([v.cross(&t[1]) / &det, t[0].cross(v) / &det])
}

pub fn decompose_in_lattice(
    domain: &[RatVec2],
    pairs: &[(usize, usize)],
    lattice: [RatVec2; 2],
) -> Result<TorusDecomposition, CoverError> {
    let mut coeffs = Vec::with_capacity(pairs.len());
    for (j, &(a, b)) in pairs.iter().enumerate() {
        let tau = pair_translation(domain, a, b);
        let c = solve2(&lattice, &tau).ok_or(CoverError::DegenerateLattice)?;
        let int = |x: &Q| if x.is_integer() { x.to_integer().to_i64() } else { None };
        match (int(&c[0]), int(&c[1])) {
            (Some(x), Some(y)) => coeffs.push([x, y]),
            _ => return Err(CoverError::NonIntegralDecomposition { pair: j }),
        }
    }
    Ok(TorusDecomposition { lattice, coeffs })
}

/// Decomposition using the translations of pairs `e1` and `e2` as the lattice basis.
pub fn torus_decomposition(
    domain: &[RatVec2],
    pairs: &[(usize, usize)],
    e1: usize,
    e2: usize,
) -> Result<TorusDecomposition, CoverError> {
    let t1 = pair_translation(domain, pairs[e1].0, pairs[e1].1);
    let t2 = pair_translation(domain, pairs[e2].0, pairs[e2].1);
    decompose_in_lattice(domain, pairs, [t1, t2])
}

/// Full pair coordinates of `gamma_l = sum_j a_l^j h(e_j)`, where
/// `surface_pair[j]` is the surface pair carrying domain pair `j`.
pub fn torus_cover_full(d: &TorusDecomposition, surface_pair: &[usize], n_pairs: usize) -> [Vec<i64>; 2] {
    let mut g = [vec![0i64; n_pairs], vec![0i64; n_pairs]];
    for (j, &p) in surface_pair.iter().enumerate() {
        for l in 0..2 {
            g[l][p] += d.coeffs[j][l];
        }
    }
    g
}

pub fn torus_cover_cycles(
    basis: &HomologyBasis,
    d: &TorusDecomposition,
    surface_pair: &[usize],
) -> [RelHomologyClass; 2] {
    let [a, b] = torus_cover_full(d, surface_pair, basis.pair_count());
    [basis.reduce(&a), basis.reduce(&b)]
}
