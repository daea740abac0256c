//! Exact integer and rational primitives: primitive lattice vectors in
//! `Z^3`, their projections to the unit square, lattice bases and the
//! triangles they cut out of the plane `x = 1`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Which refinement rule generated a basis or tiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Six-way refinement, independent of vertex order.
    A,
    /// Ordered two-way refinement through the mediant of the last two vertices.
    B,
    /// One-dimensional mediant insertion (Stern-Brocot on `[0, 1]`).
    Classical,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::A => "a",
            Algorithm::B => "b",
            Algorithm::Classical => "classical",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Algorithm::A),
            "b" => Ok(Algorithm::B),
            "classical" | "1d" => Ok(Algorithm::Classical),
            other => Err(Error::InvalidInput(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// A primitive vector `(x, y1, y2)` with `x >= 1` and `0 <= y1, y2 <= x`.
///
/// `x` is the common denominator `q(a)` of the projected point
/// `a = (y1/x, y2/x)`. Ordering is lexicographic on `(x, y1, y2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector {
    x: u64,
    y: [u64; 2],
}

impl LatticeVector {
    /// Builds a vector that must already be primitive and inside the unit cone.
    pub fn new(x: u64, y1: u64, y2: u64) -> Result<Self> {
        let v = normalize([x, y1, y2])?;
        if v.x != x {
            return Err(Error::InvalidInput(format!(
                "({x},{y1},{y2}) is not primitive"
            )));
        }
        Ok(v)
    }

    /// No validation; callers guarantee the invariants.
    pub(crate) const fn from_raw(x: u64, y1: u64, y2: u64) -> Self {
        LatticeVector { x, y: [y1, y2] }
    }

    #[inline]
    pub fn x(&self) -> u64 {
        self.x
    }

    #[inline]
    pub fn y1(&self) -> u64 {
        self.y[0]
    }

    #[inline]
    pub fn y2(&self) -> u64 {
        self.y[1]
    }

    /// Common denominator of the projected point.
    #[inline]
    pub fn q(&self) -> u64 {
        self.x
    }

    pub fn components(&self) -> [u64; 3] {
        [self.x, self.y[0], self.y[1]]
    }

    pub fn is_primitive(&self) -> bool {
        self.x.gcd(&self.y[0]).gcd(&self.y[1]) == 1
    }

    /// Componentwise sum, without renormalisation.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        Some(LatticeVector {
            x: self.x.checked_add(other.x)?,
            y: [
                self.y[0].checked_add(other.y[0])?,
                self.y[1].checked_add(other.y[1])?,
            ],
        })
    }

    /// Exact coordinates of the projection.
    pub fn coords(&self) -> (Ratio<u64>, Ratio<u64>) {
        (Ratio::new(self.y[0], self.x), Ratio::new(self.y[1], self.x))
    }

    pub fn coords_f64(&self) -> (f64, f64) {
        let x = self.x as f64;
        (self.y[0] as f64 / x, self.y[1] as f64 / x)
    }

    /// `(a1,a2)/q` label used in reports and figures.
    pub fn label(&self) -> String {
        format!("({},{})/{}", self.y[0], self.y[1], self.x)
    }

    /// Lies on one of the four sides of the unit square.
    pub fn on_boundary(&self) -> bool {
        self.y[0] == 0 || self.y[1] == 0 || self.y[0] == self.x || self.y[1] == self.x
    }
}

impl std::ops::Add for LatticeVector {
    type Output = LatticeVector;

    #[inline]
    fn add(self, rhs: Self) -> Self {
        LatticeVector {
            x: self.x + rhs.x,
            y: [self.y[0] + rhs.y[0], self.y[1] + rhs.y[1]],
        }
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y[0], self.y[1])
    }
}

impl Serialize for LatticeVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.components().serialize(s)
    }
}

/// Divides an integer triple by the gcd of its components.
///
/// Fails on the zero vector and on triples that do not project into the
/// unit square.
pub fn normalize(v: [u64; 3]) -> Result<LatticeVector> {
    let g = v[0].gcd(&v[1]).gcd(&v[2]);
    if g == 0 {
        return Err(Error::InvalidInput("zero vector".into()));
    }
    let [x, y1, y2] = [v[0] / g, v[1] / g, v[2] / g];
    if x == 0 || y1 > x || y2 > x {
        return Err(Error::InvalidInput(format!(
            "({},{},{}) does not project into the unit square",
            v[0], v[1], v[2]
        )));
    }
    Ok(LatticeVector::from_raw(x, y1, y2))
}

/// A rational point of `[0, 1]^2`, stored as its primitive lattice vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct RationalPoint(LatticeVector);

impl RationalPoint {
    pub fn from_vector(v: LatticeVector) -> Self {
        RationalPoint(v)
    }

    pub fn from_fractions(p: Ratio<u64>, r: Ratio<u64>) -> Result<Self> {
        let den = p.denom().lcm(r.denom());
        let y1 = p.numer() * (den / p.denom());
        let y2 = r.numer() * (den / r.denom());
        Ok(RationalPoint(normalize([den, y1, y2])?))
    }

    #[inline]
    pub fn vector(&self) -> LatticeVector {
        self.0
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.0.x
    }

    pub fn coords(&self) -> (Ratio<u64>, Ratio<u64>) {
        self.0.coords()
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.label())
    }
}

impl FromStr for RationalPoint {
    type Err = Error;

    /// Parses `"p1/q1,p2/q2"`; a bare integer is read as `n/1`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::InvalidInput(format!("expected `p1/q1,p2/q2`, got `{s}`")))?;
        let p = parse_fraction(a)?;
        let r = parse_fraction(b)?;
        RationalPoint::from_fractions(p, r)
    }
}

pub(crate) fn parse_fraction(s: &str) -> Result<Ratio<u64>> {
    let bad = || Error::InvalidInput(format!("bad fraction `{s}`"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: u64 = n.parse().map_err(|_| bad())?;
    let d: u64 = d.parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(n, d))
}

/// `a ⊕ b`: projection of the componentwise sum of the primitive vectors.
///
/// The sum is renormalised, which is a no-op whenever `a` and `b` extend to
/// a lattice basis.
pub fn mediant(a: &RationalPoint, b: &RationalPoint) -> RationalPoint {
    let s = a.0 + b.0;
    RationalPoint(normalize(s.components()).expect("sum of points in the unit square"))
}

/// Largest component magnitude for which the `i128` determinant cannot overflow.
const FAST_LIMIT: u64 = 1 << 40;

fn det_i128(r: &[LatticeVector; 3]) -> Option<i128> {
    if r.iter()
        .any(|v| v.components().iter().any(|&c| c >= FAST_LIMIT))
    {
        return None;
    }
    let m = r.map(|v| v.components().map(|c| c as i128));
    Some(
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]),
    )
}

fn det_big(r: &[LatticeVector; 3]) -> BigInt {
    let m = r.map(|v| v.components().map(BigInt::from));
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

/// Exact 3x3 determinant of the rows `(g1; g2; g3)`.
pub fn det3(rows: &[LatticeVector; 3]) -> BigInt {
    match det_i128(rows) {
        Some(d) => BigInt::from(d),
        None => det_big(rows),
    }
}

/// Sign of `det(p; q; r)`, which equals the orientation of the projected
/// points because every first coordinate is positive.
pub fn orientation(p: &LatticeVector, q: &LatticeVector, r: &LatticeVector) -> Ordering {
    let rows = [*p, *q, *r];
    match det_i128(&rows) {
        Some(d) => d.cmp(&0),
        None => det_big(&rows).cmp(&BigInt::zero()),
    }
}

/// An ordered triple of lattice vectors produced by one of the refinement rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Basis {
    pub vectors: [LatticeVector; 3],
    pub depth: u32,
    pub algorithm: Algorithm,
}

impl Basis {
    pub fn new(vectors: [LatticeVector; 3], depth: u32, algorithm: Algorithm) -> Self {
        Basis {
            vectors,
            depth,
            algorithm,
        }
    }

    pub fn det(&self) -> BigInt {
        det3(&self.vectors)
    }

    pub fn is_unimodular(&self) -> bool {
        match det_i128(&self.vectors) {
            Some(d) => d == 1 || d == -1,
            None => det_big(&self.vectors).abs().is_one(),
        }
    }

    pub fn triangle(&self) -> Triangle {
        Triangle {
            vertices: self.vectors.map(RationalPoint),
            depth: self.depth,
        }
    }

    /// Denominators `q` of the three vertices, in basis order.
    pub fn denominators(&self) -> [u64; 3] {
        self.vectors.map(|v| v.x)
    }

    pub fn contains_vertex(&self, v: &LatticeVector) -> bool {
        self.vectors.contains(v)
    }

    /// Closed-cone membership: `theta` has nonnegative coordinates in this basis.
    pub fn contains(&self, theta: &LatticeVector) -> bool {
        let [g1, g2, g3] = &self.vectors;
        let whole = orientation(g1, g2, g3);
        if whole == Ordering::Equal {
            return false;
        }
        [
            orientation(theta, g2, g3),
            orientation(g1, theta, g3),
            orientation(g1, g2, theta),
        ]
        .iter()
        .all(|&o| o == whole || o == Ordering::Equal)
    }

    /// Integer coordinates of `theta` in this basis (Cramer's rule, `det = ±1`).
    pub fn coefficients(&self, theta: &LatticeVector) -> Result<[BigInt; 3]> {
        let d = self.det();
        if !d.abs().is_one() {
            return Err(Error::InvariantViolation(format!(
                "basis determinant {d} is not ±1"
            )));
        }
        let [g1, g2, g3] = self.vectors;
        Ok([
            det3(&[*theta, g2, g3]) * &d,
            det3(&[g1, *theta, g3]) * &d,
            det3(&[g1, g2, *theta]) * &d,
        ])
    }
}

/// Projection of a basis: three rational vertices in the unit square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Triangle {
    pub vertices: [RationalPoint; 3],
    pub depth: u32,
}

impl Triangle {
    pub fn new(vertices: [RationalPoint; 3], depth: u32) -> Self {
        Triangle { vertices, depth }
    }

    /// `2 q(a) q(b) q(c)`.
    pub fn area_denominator(&self) -> u128 {
        self.vertices
            .iter()
            .fold(2u128, |acc, v| acc * v.q() as u128)
    }

    /// Area from the vertex denominators: `1 / (2 q(a) q(b) q(c))`.
    ///
    /// Valid only for triangles that come from a unimodular basis.
    pub fn area(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.area_denominator()))
    }

    /// Shoelace area computed from the rational coordinates alone.
    pub fn shoelace_area(&self) -> BigRational {
        let v = self.vertices.map(|p| p.vector());
        if v.iter().all(|w| w.x() < 1 << 30) {
            // cross terms over the common denominator q1 q2 q3
            let mut twice: i128 = 0;
            for i in 0..3 {
                let (p, r, s) = (v[i], v[(i + 1) % 3], v[(i + 2) % 3]);
                let cross = p.y1() as i128 * r.y2() as i128 - r.y1() as i128 * p.y2() as i128;
                twice += cross * s.x() as i128;
            }
            let den = 2 * v.iter().map(|w| w.x() as i128).product::<i128>();
            return BigRational::new(BigInt::from(twice.abs()), BigInt::from(den));
        }
        shoelace_big(&v)
    }

    /// Largest squared pairwise distance, exactly.
    pub fn diameter_squared(&self) -> Result<BigRational> {
        let [a, b, c] = self.vertices.map(|v| v.vector());
        if a == b || a == c || b == c {
            return Err(Error::InvalidInput(format!(
                "degenerate triangle {} {} {}",
                a.label(),
                b.label(),
                c.label()
            )));
        }
        let d = [
            squared_distance(&a, &b),
            squared_distance(&a, &c),
            squared_distance(&b, &c),
        ];
        Ok(d.into_iter().max().expect("three distances"))
    }

    /// Largest pairwise Euclidean distance, rounded from the exact square.
    pub fn diameter(&self) -> Result<f64> {
        let d2 = self.diameter_squared()?;
        Ok(d2.to_f64().unwrap_or(f64::INFINITY).sqrt())
    }

    pub fn denominators(&self) -> [u64; 3] {
        self.vertices.map(|v| v.q())
    }
}

fn shoelace_big(v: &[LatticeVector; 3]) -> BigRational {
    let pts: Vec<(BigRational, BigRational)> = v.iter().map(big_coords).collect();
    let (ax, ay) = &pts[0];
    let (bx, by) = &pts[1];
    let (cx, cy) = &pts[2];
    let twice = (bx - ax) * (cy - ay) - (cx - ax) * (by - ay);
    twice.abs() / BigRational::from_integer(BigInt::from(2))
}

/// Diameter of an arbitrary point triple; duplicated points are rejected.
pub fn diameter(points: &[RationalPoint; 3]) -> Result<f64> {
    Triangle::new(*points, 0).diameter()
}

pub(crate) fn big_coords(v: &LatticeVector) -> (BigRational, BigRational) {
    let x = BigInt::from(v.x);
    (
        BigRational::new(BigInt::from(v.y[0]), x.clone()),
        BigRational::new(BigInt::from(v.y[1]), x),
    )
}

/// Exact squared Euclidean distance between two projected points.
pub fn squared_distance(u: &LatticeVector, v: &LatticeVector) -> BigRational {
    let (ux, vx) = (BigInt::from(u.x), BigInt::from(v.x));
    let d1 = BigInt::from(u.y[0]) * &vx - BigInt::from(v.y[0]) * &ux;
    let d2 = BigInt::from(u.y[1]) * &vx - BigInt::from(v.y[1]) * &ux;
    let den = &ux * &vx;
    BigRational::new(&d1 * &d1 + &d2 * &d2, &den * &den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(x: u64, a: u64, b: u64) -> LatticeVector {
        LatticeVector::new(x, a, b).unwrap()
    }

    fn pt(x: u64, a: u64, b: u64) -> RationalPoint {
        RationalPoint::from_vector(lv(x, a, b))
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn normalize_divides_by_gcd() {
        assert_eq!(normalize([2, 0, 2]).unwrap(), lv(1, 0, 1));
        assert_eq!(normalize([1, 1, 1]).unwrap(), lv(1, 1, 1));
        assert_eq!(normalize([6, 2, 4]).unwrap(), lv(3, 1, 2));
        let once = normalize([12, 4, 8]).unwrap();
        assert_eq!(normalize(once.components()).unwrap(), once);
    }

    #[test]
    fn normalize_rejects_zero_and_out_of_square() {
        assert!(matches!(normalize([0, 0, 0]), Err(Error::InvalidInput(_))));
        assert!(matches!(normalize([1, 2, 0]), Err(Error::InvalidInput(_))));
        assert!(LatticeVector::new(2, 0, 2).is_err());
    }

    #[test]
    fn mediant_examples() {
        let m = mediant(&pt(1, 0, 0), &pt(1, 1, 0));
        assert_eq!(m.vector(), lv(2, 1, 0));
        let m = mediant(&pt(1, 1, 0), &pt(1, 0, 1));
        assert_eq!(m.vector(), lv(2, 1, 1));
        let m = mediant(&pt(2, 1, 1), &pt(1, 1, 0));
        assert_eq!(m.vector(), lv(3, 2, 1));
        assert_eq!(m.q(), 3);
        // not extendable to a basis: (1,0,0)+(1,0,0) renormalises
        let m = mediant(&pt(1, 0, 0), &pt(1, 0, 0));
        assert_eq!(m.vector(), lv(1, 0, 0));
    }

    #[test]
    fn determinant_examples() {
        let b = |v: [LatticeVector; 3]| Basis::new(v, 0, Algorithm::A);
        assert_eq!(
            b([lv(1, 0, 0), lv(1, 1, 0), lv(1, 0, 1)]).det(),
            BigInt::from(1)
        );
        assert_eq!(
            b([lv(1, 0, 0), lv(2, 1, 0), lv(2, 0, 1)]).det(),
            BigInt::from(1)
        );
        assert_eq!(
            b([lv(1, 0, 0), lv(1, 1, 0), lv(2, 1, 0)]).det(),
            BigInt::from(0)
        );
        assert!(!b([lv(1, 0, 0), lv(1, 1, 0), lv(2, 1, 0)]).is_unimodular());
    }

    #[test]
    fn determinant_big_path_agrees() {
        let big = LatticeVector::from_raw(1 << 50, 1 << 49, 3);
        let rows = [big, lv(1, 1, 0), lv(1, 0, 1)];
        assert_eq!(det_i128(&rows), None);
        let small = [lv(7, 3, 2), lv(5, 2, 2), lv(3, 1, 1)];
        assert_eq!(BigInt::from(det_i128(&small).unwrap()), det_big(&small));
    }

    #[test]
    fn shoelace_paths_agree() {
        let v = |x, a, b| LatticeVector::new(x, a, b).unwrap();
        let tris = [
            [v(3, 1, 2), v(7, 5, 1), v(4, 1, 1)],
            [v(1, 0, 0), v(5, 2, 2), v(9, 4, 4)],
            [v(97, 13, 60), v(64, 1, 63), v(29, 28, 0)],
        ];
        for t in tris {
            let tri = Triangle::new(t.map(RationalPoint::from_vector), 0);
            assert_eq!(tri.shoelace_area(), shoelace_big(&t));
        }
    }

    #[test]
    fn area_examples_match_shoelace() {
        let t = Triangle::new([pt(1, 0, 0), pt(1, 1, 0), pt(1, 0, 1)], 0);
        assert_eq!(t.area(), rat(1, 2));
        assert_eq!(t.shoelace_area(), rat(1, 2));
        let t = Triangle::new([pt(1, 0, 0), pt(2, 1, 0), pt(2, 0, 1)], 1);
        assert_eq!(t.area(), rat(1, 8));
        assert_eq!(t.shoelace_area(), rat(1, 8));
        let t = Triangle::new([pt(2, 1, 0), pt(2, 0, 1), pt(3, 1, 1)], 1);
        assert_eq!(t.area(), rat(1, 24));
        assert_eq!(t.shoelace_area(), rat(1, 24));
    }

    #[test]
    fn diameter_examples() {
        let t = Triangle::new([pt(1, 0, 0), pt(1, 1, 0), pt(1, 0, 1)], 0);
        assert!((t.diameter().unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let t = Triangle::new([pt(1, 0, 0), pt(2, 1, 0), pt(2, 0, 1)], 0);
        assert!((t.diameter().unwrap() - 2f64.sqrt() / 2.0).abs() < 1e-15);
        let dup = [pt(1, 0, 0), pt(1, 0, 0), pt(1, 1, 0)];
        assert!(matches!(diameter(&dup), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn containment_and_coefficients() {
        let b = Basis::new([lv(1, 0, 0), lv(1, 1, 0), lv(1, 0, 1)], 0, Algorithm::A);
        assert!(b.contains(&lv(2, 1, 1)));
        assert!(b.contains(&lv(1, 0, 0)));
        assert!(!b.contains(&lv(1, 1, 1)));
        let c = b.coefficients(&lv(7, 3, 2)).unwrap();
        assert_eq!(c, [BigInt::from(2), BigInt::from(3), BigInt::from(2)]);
        let c = b.coefficients(&lv(1, 0, 0)).unwrap();
        assert_eq!(c.iter().filter(|v| v.is_zero()).count(), 2);
    }

    #[test]
    fn point_parsing() {
        let p: RationalPoint = "3/7,2/7".parse().unwrap();
        assert_eq!(p.vector(), lv(7, 3, 2));
        let p: RationalPoint = "1/2, 1/3".parse().unwrap();
        assert_eq!(p.vector(), lv(6, 3, 2));
        assert!("1/2".parse::<RationalPoint>().is_err());
        assert!("3/2,0".parse::<RationalPoint>().is_err());
        assert!("1/0,0".parse::<RationalPoint>().is_err());
    }
}
