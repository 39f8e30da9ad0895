//! Exact planar primitives: rational vectors, rational multiples of pi and
//! the dihedral group `D_n` acting on the plane.
//!
//! Group elements carry only integer data. Their action on vectors is exact
//! whenever the matrix entries are rational (angles that are multiples of
//! `pi/2`), otherwise it falls back to binary64.

mod cyclo;

pub use cyclo::Cyclo;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

pub type Q = BigRational;
pub type Pt = [f64; 2];

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_to_f64(v: &Q) -> f64 {
    // numer/denom may exceed f64 range individually even when the quotient does not
    match (v.numer().to_f64(), v.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = v.numer().bits().max(v.denom().bits()) as i64 - 60;
            let s = shift.max(0) as u64;
            let n = (v.numer() >> s).to_f64().unwrap_or(0.0);
            let d = (v.denom() >> s).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Parse `"p/q"` or `"p"` into an exact rational.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if s.contains('.') || s.contains('e') || s.contains('E') {
        return None;
    }
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).ok()?;
    let d = BigInt::from_str(d).ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Q::new(n, d))
}

pub fn format_q(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Closest rational with denominator at most `max_den` (continued fractions).
pub fn rational_approx(x: f64, max_den: i64) -> Q {
    let sign = if x < 0.0 { -1 } else { 1 };
    let mut r = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = r - a;
        if frac < 1e-18 {
            break;
        }
        r = 1.0 / frac;
    }
    Q::new(BigInt::from(sign * p1), BigInt::from(q1))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatVec2 {
    pub x: Q,
    pub y: Q,
}

impl RatVec2 {
    pub fn new(x: Q, y: Q) -> Self {
        RatVec2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        RatVec2::new(qi(x), qi(y))
    }

    pub fn zero() -> Self {
        RatVec2::new(Q::zero(), Q::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn scale(&self, k: &Q) -> Self {
        RatVec2::new(&self.x * k, &self.y * k)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&qi(k))
    }

    pub fn dot(&self, o: &RatVec2) -> Q {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn cross(&self, o: &RatVec2) -> Q {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn to_f64(&self) -> Pt {
        [q_to_f64(&self.x), q_to_f64(&self.y)]
    }
}

impl Add for &RatVec2 {
    type Output = RatVec2;
    fn add(self, o: &RatVec2) -> RatVec2 {
        RatVec2::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl Sub for &RatVec2 {
    type Output = RatVec2;
    fn sub(self, o: &RatVec2) -> RatVec2 {
        RatVec2::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Neg for &RatVec2 {
    type Output = RatVec2;
    fn neg(self) -> RatVec2 {
        RatVec2::new(-&self.x, -&self.y)
    }
}

impl fmt::Display for RatVec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_q(&self.x), format_q(&self.y))
    }
}

/// The angle `num * pi / den`, kept reduced with `0 <= num/den < 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RatAngle {
    num: i64,
    den: i64,
}

impl RatAngle {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "angle denominator must be nonzero");
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        num = num.rem_euclid(2 * den);
        let g = num.gcd(&den).max(1);
        num /= g;
        den /= g;
        if num == 0 {
            den = 1;
        }
        RatAngle { num, den }
    }

    pub fn zero() -> Self {
        RatAngle { num: 0, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn radians(&self) -> f64 {
        std::f64::consts::PI * self.num as f64 / self.den as f64
    }

    /// Value in units of pi, in `[0, 2)`.
    pub fn turns_of_pi(&self) -> Q {
        q(self.num, self.den)
    }

    pub fn mod_pi(&self) -> Self {
        let num = self.num.rem_euclid(self.den);
        RatAngle::new(num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// True when the angle is an integer multiple of `pi/2`.
    pub fn is_right_multiple(&self) -> bool {
        (2 * self.num) % self.den == 0
    }

    pub fn half_turn() -> Self {
        RatAngle::new(1, 1)
    }

    pub fn right() -> Self {
        RatAngle::new(1, 2)
    }
}

impl Add for RatAngle {
    type Output = RatAngle;
    fn add(self, o: RatAngle) -> RatAngle {
        let l = self.den.lcm(&o.den);
        RatAngle::new(self.num * (l / self.den) + o.num * (l / o.den), l)
    }
}

impl Sub for RatAngle {
    type Output = RatAngle;
    fn sub(self, o: RatAngle) -> RatAngle {
        let l = self.den.lcm(&o.den);
        RatAngle::new(self.num * (l / self.den) - o.num * (l / o.den), l)
    }
}

impl Neg for RatAngle {
    type Output = RatAngle;
    fn neg(self) -> RatAngle {
        RatAngle::new(-self.num, self.den)
    }
}

impl Ord for RatAngle {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.num as i128 * o.den as i128).cmp(&(o.num as i128 * self.den as i128))
    }
}

impl PartialOrd for RatAngle {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for RatAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for RatAngle {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v = parse_q(s).ok_or_else(|| format!("not an exact angle: {s:?}"))?;
        let n = v.numer().to_i64().ok_or("angle numerator too large")?;
        let d = v.denom().to_i64().ok_or("angle denominator too large")?;
        Ok(RatAngle::new(n, d))
    }
}

/// Pairwise differences of the given angles, reduced into `[0, pi)`.
pub fn angle_diff_set(angles: &[RatAngle]) -> BTreeSet<RatAngle> {
    let mut out = BTreeSet::new();
    for a in angles {
        for b in angles {
            out.insert((*a - *b).mod_pi());
        }
    }
    out
}

/// Least common multiple of the reduced denominators.
pub fn unfolding_constant(diffs: &BTreeSet<RatAngle>) -> u64 {
    diffs.iter().fold(1u64, |acc, d| acc.lcm(&(d.mod_pi().den() as u64)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Rotation,
    Reflection,
}

/// `theta_k` (rotation by `2 pi k / n`) or `rho theta_k` with `rho` the
/// reflection across the reference axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DihedralElement {
    pub kind: Kind,
    pub index: u32,
    pub n: u32,
}

impl DihedralElement {
    pub fn identity(n: u32) -> Self {
        Self::rotation(n, 0)
    }

    pub fn rotation(n: u32, k: i64) -> Self {
        assert!(n >= 1);
        DihedralElement { kind: Kind::Rotation, index: k.rem_euclid(n as i64) as u32, n }
    }

    pub fn reflection(n: u32, k: i64) -> Self {
        assert!(n >= 1);
        DihedralElement { kind: Kind::Reflection, index: k.rem_euclid(n as i64) as u32, n }
    }

    pub fn is_reflection(&self) -> bool {
        self.kind == Kind::Reflection
    }

    pub fn det_sign(&self) -> i64 {
        if self.is_reflection() {
            -1
        } else {
            1
        }
    }

    /// Position in the canonical listing: rotations first, then reflections.
    pub fn ordinal(&self) -> usize {
        match self.kind {
            Kind::Rotation => self.index as usize,
            Kind::Reflection => (self.n + self.index) as usize,
        }
    }

    pub fn from_ordinal(n: u32, i: usize) -> Self {
        if i < n as usize {
            Self::rotation(n, i as i64)
        } else {
            Self::reflection(n, i as i64 - n as i64)
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, o: &DihedralElement) -> DihedralElement {
        assert_eq!(self.n, o.n, "elements of different groups");
        let n = self.n;
        let (a, b) = (self.index as i64, o.index as i64);
        match (self.kind, o.kind) {
            (Kind::Rotation, Kind::Rotation) => Self::rotation(n, a + b),
            (Kind::Rotation, Kind::Reflection) => Self::reflection(n, b - a),
            (Kind::Reflection, Kind::Rotation) => Self::reflection(n, a + b),
            (Kind::Reflection, Kind::Reflection) => Self::rotation(n, b - a),
        }
    }

    pub fn inverse(&self) -> DihedralElement {
        match self.kind {
            Kind::Rotation => Self::rotation(self.n, -(self.index as i64)),
            Kind::Reflection => *self,
        }
    }

    /// `g self g^-1`.
    pub fn conjugate_by(&self, g: &DihedralElement) -> DihedralElement {
        g.compose(self).compose(&g.inverse())
    }

    /// Rotation angle (rotations) or twice the mirror-line angle (reflections)
    /// in units of pi, for the given reference axis.
    fn doubled_angle(&self, axis: RatAngle) -> Q {
        let k = q(2 * self.index as i64, self.n as i64);
        match self.kind {
            Kind::Rotation => k,
            Kind::Reflection => axis.turns_of_pi() * qi(2) - k,
        }
    }

    /// Mirror line of a reflection, as an angle mod pi.
    pub fn mirror_angle(&self, axis: RatAngle) -> Option<RatAngle> {
        if !self.is_reflection() {
            return None;
        }
        let half = self.doubled_angle(axis) / qi(2);
        Some(RatAngle::new(half.numer().to_i64()?, half.denom().to_i64()?).mod_pi())
    }

    /// Matrix with exact entries when the angle is a multiple of pi/2.
    pub fn exact_matrix(&self, axis: RatAngle) -> Option<[[i64; 2]; 2]> {
        let a = self.doubled_angle(axis);
        let twice = &a * qi(2);
        if !twice.denom().is_one() {
            return None;
        }
        let quarter = twice.numer().mod_floor(&BigInt::from(4)).to_i64()?;
        let (c, s) = match quarter {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        };
        Some(match self.kind {
            Kind::Rotation => [[c, -s], [s, c]],
            Kind::Reflection => [[c, s], [s, -c]],
        })
    }

    pub fn matrix_f64(&self, axis: RatAngle) -> [[f64; 2]; 2] {
        if let Some(m) = self.exact_matrix(axis) {
            return [[m[0][0] as f64, m[0][1] as f64], [m[1][0] as f64, m[1][1] as f64]];
        }
        let a = q_to_f64(&self.doubled_angle(axis)) * std::f64::consts::PI;
        let (s, c) = a.sin_cos();
        match self.kind {
            Kind::Rotation => [[c, -s], [s, c]],
            Kind::Reflection => [[c, s], [s, -c]],
        }
    }

    pub fn apply_f64_axis(&self, axis: RatAngle, v: Pt) -> Pt {
        let m = self.matrix_f64(axis);
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn apply_exact_axis(&self, axis: RatAngle, v: &RatVec2) -> Option<RatVec2> {
        let m = self.exact_matrix(axis)?;
        let e = |a: i64, b: i64| &v.x * qi(a) + &v.y * qi(b);
        Some(RatVec2::new(e(m[0][0], m[0][1]), e(m[1][0], m[1][1])))
    }

    /// Image of the rational vector `v` as an element of `Q(zeta_m)`,
    /// identifying the plane with the complex numbers.
    pub fn apply_cyclo(&self, axis: RatAngle, v: &RatVec2, m: u32) -> Cyclo {
        let base = Cyclo::from_complex(m, &v.x, &v.y);
        let a = self.doubled_angle(axis) * q(m as i64, 2);
        assert!(a.denom().is_one(), "cyclotomic order {m} too small for {self:?}");
        let k = a.numer().to_i64().unwrap();
        match self.kind {
            Kind::Rotation => base.mul_zeta(k),
            Kind::Reflection => base.conj().mul_zeta(k),
        }
    }
}

impl fmt::Display for DihedralElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Rotation => write!(f, "theta{}", self.index),
            Kind::Reflection => write!(f, "rho.theta{}", self.index),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DihedralGroup {
    pub n: u32,
    pub elements: Vec<DihedralElement>,
    table: Vec<Vec<usize>>,
}

impl DihedralGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> DihedralElement {
        DihedralElement::identity(self.n)
    }

    /// Ordinal of `elements[i] ∘ elements[j]`.
    pub fn compose_index(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        self.table[i].iter().position(|&k| k == 0).expect("group table has identity")
    }

    /// Rotation by pi, present only for even `n`.
    pub fn iota(&self) -> Option<DihedralElement> {
        (self.n % 2 == 0).then(|| DihedralElement::rotation(self.n, self.n as i64 / 2))
    }
}

pub fn dihedral_group(n: u32) -> DihedralGroup {
    assert!(n >= 1, "dihedral group needs n >= 1");
    let elements: Vec<_> = (0..2 * n as usize).map(|i| DihedralElement::from_ordinal(n, i)).collect();
    let table = elements
        .iter()
        .map(|a| elements.iter().map(|b| a.compose(b).ordinal()).collect())
        .collect();
    DihedralGroup { n, elements, table }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Vector {
    Exact(RatVec2),
    Numeric(Pt),
}

impl Vector {
    pub fn to_f64(&self) -> Pt {
        match self {
            Vector::Exact(v) => v.to_f64(),
            Vector::Numeric(p) => *p,
        }
    }
}

/// Action with the reference axis along the x-axis.
pub fn apply(g: &DihedralElement, v: &RatVec2) -> Vector {
    apply_axis(g, RatAngle::zero(), v)
}

pub fn apply_axis(g: &DihedralElement, axis: RatAngle, v: &RatVec2) -> Vector {
    match g.apply_exact_axis(axis, v) {
        Some(e) => Vector::Exact(e),
        None => Vector::Numeric(g.apply_f64_axis(axis, v.to_f64())),
    }
}

pub fn apply_f64(g: &DihedralElement, v: Pt) -> Pt {
    g.apply_f64_axis(RatAngle::zero(), v)
}

pub fn norm(v: Pt) -> f64 {
    v[0].hypot(v[1])
}

pub fn cross(a: Pt, b: Pt) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn dot(a: Pt, b: Pt) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn sub(a: Pt, b: Pt) -> Pt {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn add(a: Pt, b: Pt) -> Pt {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn scale(a: Pt, k: f64) -> Pt {
    [a[0] * k, a[1] * k]
}

pub fn sign_of(v: &Q) -> i32 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64) -> RatVec2 {
        RatVec2::from_ints(x, y)
    }

    #[test]
    fn diff_set_of_axis_parallel_edges() {
        let s = angle_diff_set(&[RatAngle::zero(), RatAngle::right()]);
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![RatAngle::zero(), RatAngle::right()]);
    }

    #[test]
    fn single_edge_has_zero_difference() {
        let s = angle_diff_set(&[RatAngle::new(3, 7)]);
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![RatAngle::zero()]);
    }

    #[test]
    fn eighth_turn_triangle() {
        // right triangle with acute angles pi/8 and 3pi/8
        let angles = [RatAngle::zero(), RatAngle::new(1, 2), RatAngle::new(9, 8)];
        let d = angle_diff_set(&angles);
        assert!(d.iter().all(|a| 8 % a.den() == 0));
        assert_eq!(unfolding_constant(&d), 8);
    }

    #[test]
    fn unfolding_constants() {
        let d: BTreeSet<_> = [RatAngle::zero(), RatAngle::right()].into();
        assert_eq!(unfolding_constant(&d), 2);
        let d: BTreeSet<_> = [RatAngle::zero()].into();
        assert_eq!(unfolding_constant(&d), 1);
    }

    #[test]
    fn angle_normalisation() {
        assert_eq!(RatAngle::new(5, 2), RatAngle::new(1, 2));
        assert_eq!(RatAngle::new(-1, 2), RatAngle::new(3, 2));
        assert_eq!(RatAngle::new(4, 8), RatAngle::new(1, 2));
        assert_eq!(RatAngle::new(2, 1), RatAngle::zero());
        assert_eq!("3/4".parse::<RatAngle>().unwrap(), RatAngle::new(3, 4));
    }

    #[test]
    fn small_groups() {
        let g = dihedral_group(2);
        assert_eq!(g.order(), 4);
        let rt = DihedralElement::reflection(2, 1);
        assert_eq!(rt.compose(&rt), DihedralElement::identity(2));
        assert_eq!(dihedral_group(8).order(), 16);
        let g1 = dihedral_group(1);
        assert_eq!(g1.elements, vec![DihedralElement::identity(1), DihedralElement::reflection(1, 0)]);
        assert!(g1.iota().is_none());
    }

    #[test]
    fn table_is_a_group() {
        for n in 1..=8 {
            let g = dihedral_group(n);
            for i in 0..g.order() {
                assert_eq!(g.compose_index(i, g.inverse_index(i)), 0);
                for j in 0..g.order() {
                    for k in 0..g.order() {
                        let l = g.compose_index(g.compose_index(i, j), k);
                        let r = g.compose_index(i, g.compose_index(j, k));
                        assert_eq!(l, r);
                    }
                }
            }
            let refl = g.elements[n as usize];
            let rot = g.elements[1 % n as usize];
            assert!(!refl.compose(&refl).is_reflection());
            assert!(refl.conjugate_by(&rot).is_reflection());
        }
    }

    #[test]
    fn rotation_by_pi_is_exact() {
        let g = DihedralElement::rotation(2, 1);
        assert_eq!(apply(&g, &v(1, 0)), Vector::Exact(v(-1, 0)));
    }

    #[test]
    fn reflection_across_x_axis() {
        let g = DihedralElement::reflection(4, 0);
        let p = RatVec2::new(q(2, 3), q(-5, 7));
        assert_eq!(apply(&g, &p), Vector::Exact(RatVec2::new(q(2, 3), q(5, 7))));
    }

    #[test]
    fn eighth_rotation_is_numeric() {
        let g = DihedralElement::rotation(8, 1);
        let r = apply(&g, &v(1, 0));
        let Vector::Numeric(p) = r else { panic!("expected numeric result") };
        let h = 0.5f64.sqrt();
        assert!((p[0] - h).abs() < 1e-12 && (p[1] - h).abs() < 1e-12);
    }

    #[test]
    fn mirror_lines() {
        // rho.theta_k mirrors across the line at angle -k pi / n
        let g = DihedralElement::reflection(4, 1);
        assert_eq!(g.mirror_angle(RatAngle::zero()), Some(RatAngle::new(3, 4)));
        let w = apply(&g, &v(1, 1));
        assert_eq!(w, Vector::Exact(v(-1, -1)));
    }

    #[test]
    fn approx_sqrt2() {
        let r = rational_approx(std::f64::consts::SQRT_2, 1_000_000_000);
        assert!((q_to_f64(&r) - std::f64::consts::SQRT_2).abs() < 1e-15);
    }
}
