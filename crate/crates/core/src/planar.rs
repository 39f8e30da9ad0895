//! Exact predicates on rational points and polygons.

use crate::exactgeom::{sign_of, RatVec2, Q};
use num_traits::{Signed, Zero};

pub fn orient(a: &RatVec2, b: &RatVec2, c: &RatVec2) -> i32 {
    sign_of(&(b - a).cross(&(c - a)))
}

pub fn signed_area2(poly: &[RatVec2]) -> Q {
    let n = poly.len();
    let mut s = Q::zero();
    for i in 0..n {
        s += poly[i].cross(&poly[(i + 1) % n]);
    }
    s
}

/// `c` lies on the closed segment `ab`.
pub fn on_segment(a: &RatVec2, b: &RatVec2, c: &RatVec2) -> bool {
    orient(a, b, c) == 0
        && c.x >= a.x.clone().min(b.x.clone())
        && c.x <= a.x.clone().max(b.x.clone())
        && c.y >= a.y.clone().min(b.y.clone())
        && c.y <= a.y.clone().max(b.y.clone())
}

/// Closed segments `ab` and `cd` share at least one point.
pub fn segments_touch(a: &RatVec2, b: &RatVec2, c: &RatVec2, d: &RatVec2) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// Point location for a simple polygon (either orientation).
pub fn locate(poly: &[RatVec2], p: &RatVec2) -> Location {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        if on_segment(a, b, p) {
            return Location::Boundary;
        }
        if (a.y > p.y) != (b.y > p.y) {
            // x coordinate of the crossing compared with p.x, without division
            let lhs = (&p.x - &a.x) * (&b.y - &a.y);
            let rhs = (&b.x - &a.x) * (&p.y - &a.y);
            let crosses = if (&b.y - &a.y).is_positive() { lhs < rhs } else { lhs > rhs };
            if crosses {
                inside = !inside;
            }
        }
    }
    if inside {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// Closed polygonal regions intersect.
pub fn polygons_touch(p: &[RatVec2], q: &[RatVec2]) -> bool {
    for i in 0..p.len() {
        for j in 0..q.len() {
            if segments_touch(&p[i], &p[(i + 1) % p.len()], &q[j], &q[(j + 1) % q.len()]) {
                return true;
            }
        }
    }
    locate(q, &p[0]) != Location::Outside || locate(p, &q[0]) != Location::Outside
}

/// `inner` lies in the open interior of `outer`.
pub fn strictly_inside(outer: &[RatVec2], inner: &[RatVec2]) -> bool {
    if inner.iter().any(|v| locate(outer, v) != Location::Inside) {
        return false;
    }
    for i in 0..outer.len() {
        for j in 0..inner.len() {
            if segments_touch(&outer[i], &outer[(i + 1) % outer.len()], &inner[j], &inner[(j + 1) % inner.len()]) {
                return false;
            }
        }
    }
    true
}

/// No two non-adjacent edges meet and adjacent edges meet only at their
/// shared vertex.
pub fn is_simple(poly: &[RatVec2]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (&poly[i], &poly[(i + 1) % n]);
        if a == b {
            return false;
        }
        for j in i + 1..n {
            let (c, d) = (&poly[j], &poly[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // overlap beyond the shared vertex
                let shared = if j == i + 1 { b } else { a };
                let other_ij = if j == i + 1 { a } else { b };
                let other_j = if j == i + 1 { d } else { c };
                if orient(other_ij, shared, other_j) == 0
                    && (&(other_ij - shared)).dot(&(other_j - shared)).is_positive()
                {
                    return false;
                }
            } else if segments_touch(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::q;

    fn p(x: i64, y: i64) -> RatVec2 {
        RatVec2::from_ints(x, y)
    }

    #[test]
    fn location() {
        let sq = vec![p(0, 0), p(2, 0), p(2, 2), p(0, 2)];
        assert_eq!(locate(&sq, &p(1, 1)), Location::Inside);
        assert_eq!(locate(&sq, &p(2, 1)), Location::Boundary);
        assert_eq!(locate(&sq, &p(3, 1)), Location::Outside);
        assert_eq!(locate(&sq, &RatVec2::new(q(1, 3), q(5, 3))), Location::Inside);
    }

    #[test]
    fn containment_and_touching() {
        let sq = vec![p(0, 0), p(4, 0), p(4, 4), p(0, 4)];
        let inner = vec![p(1, 1), p(2, 1), p(2, 2), p(1, 2)];
        let touching = vec![p(0, 1), p(2, 1), p(2, 2), p(0, 2)];
        assert!(strictly_inside(&sq, &inner));
        assert!(!strictly_inside(&sq, &touching));
        assert!(polygons_touch(&inner, &touching));
        assert!(is_simple(&sq));
        assert!(!is_simple(&[p(0, 0), p(2, 2), p(2, 0), p(0, 2)]));
    }
}
