//! Refinement rules for the two planar algorithms, with code bookkeeping.
//!
//! Algorithm A splits a triangle `(g1, g2, g3)` into three corner triangles
//! and three inner triangles around `g1 + g2 + g3`; the result does not
//! depend on the order of the parent vectors. Algorithm B splits through the
//! mediant of the last two vectors and keeps the order of its vertices.

use std::fmt;

use serde::Serialize;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::lattice::{Algorithm, Basis, LatticeVector};
use crate::tiling::Refinement;

/// Run-length code `[t_1, ..., t_r]` of an algorithm-A triangle.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CodeA(SmallVec<[u32; 16]>);

impl CodeA {
    pub fn from_runs(runs: &[u32]) -> Self {
        CodeA(runs.iter().copied().collect())
    }

    pub fn runs(&self) -> &[u32] {
        &self.0
    }

    /// `r`, the number of runs.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `t_1 + ... + t_r`, equal to the depth of the triangle.
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&t| t as u64).sum()
    }

    fn push_step(&mut self, extends_run: bool) {
        match (extends_run, self.0.last_mut()) {
            (true, Some(last)) => *last += 1,
            _ => self.0.push(1),
        }
    }
}

impl fmt::Display for CodeA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("]")
    }
}

/// Deepest algorithm-B cell that can carry its operation string.
pub const MAX_B_DEPTH: u32 = 128;

/// Binary operation string `c_1 ... c_n` of an algorithm-B triangle.
///
/// `c_k` is stored in bit `k - 1`; depth is limited to [`MAX_B_DEPTH`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CodeB {
    bits: u128,
    len: u32,
}

impl CodeB {
    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `c_k` for `1 <= k <= len`.
    pub fn bit(&self, k: u32) -> u8 {
        ((self.bits >> (k - 1)) & 1) as u8
    }

    /// `|c|`, the number of "1" operations.
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Number of trailing "0" operations.
    pub fn trailing_zeros(&self) -> u32 {
        (0..self.len)
            .rev()
            .take_while(|&i| (self.bits >> i) & 1 == 0)
            .count() as u32
    }

    fn pushed(&self, bit: u8) -> CodeB {
        assert!(
            self.len < MAX_B_DEPTH,
            "algorithm-B code longer than {MAX_B_DEPTH}"
        );
        CodeB {
            bits: self.bits | ((bit as u128) << self.len),
            len: self.len + 1,
        }
    }
}

impl fmt::Display for CodeB {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 1..=self.len {
            write!(f, "{}", self.bit(k))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Code {
    A(CodeA),
    B(CodeB),
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Code::A(c) => c.fmt(f),
            Code::B(c) => c.fmt(f),
        }
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

const fn v(x: u64, y1: u64, y2: u64) -> LatticeVector {
    LatticeVector::from_raw(x, y1, y2)
}

const ORIGIN: LatticeVector = v(1, 0, 0);
const E1: LatticeVector = v(1, 1, 0);
const E2: LatticeVector = v(1, 0, 1);
const ONES: LatticeVector = v(1, 1, 1);

/// Initial partition of algorithm A: `(0,0),(1,0),(0,1)` and `(1,0),(0,1),(1,1)`.
pub fn initial_a() -> [Basis; 2] {
    [
        Basis::new([ORIGIN, E1, E2], 0, Algorithm::A),
        Basis::new([E1, E2, ONES], 0, Algorithm::A),
    ]
}

/// Initial partition of algorithm B; the second basis is ordered `(1,1),(0,1),(1,0)`.
pub fn initial_b() -> [Basis; 2] {
    [
        Basis::new([ORIGIN, E1, E2], 0, Algorithm::B),
        Basis::new([ONES, E2, E1], 0, Algorithm::B),
    ]
}

pub fn initial(algorithm: Algorithm) -> Result<[Basis; 2]> {
    match algorithm {
        Algorithm::A => Ok(initial_a()),
        Algorithm::B => Ok(initial_b()),
        Algorithm::Classical => Err(Error::InvalidInput(
            "the classical algorithm has no planar bases".into(),
        )),
    }
}

#[inline]
pub(crate) fn children_a(g: &[LatticeVector; 3]) -> [[LatticeVector; 3]; 6] {
    let [g1, g2, g3] = *g;
    let (s12, s13, s23) = (g1 + g2, g1 + g3, g2 + g3);
    let s = s12 + g3;
    [
        [g1, s12, s13],
        [g2, s12, s23],
        [g3, s13, s23],
        [s12, s13, s],
        [s12, s23, s],
        [s13, s23, s],
    ]
}

/// Operation "1" first, then operation "0".
#[inline]
pub(crate) fn children_b(g: &[LatticeVector; 3]) -> [[LatticeVector; 3]; 2] {
    let [g1, g2, g3] = *g;
    let m = g2 + g3;
    [[m, g1, g2], [m, g1, g3]]
}

fn check_parent(parent: &Basis, expected: Algorithm) -> Result<()> {
    if parent.algorithm != expected {
        return Err(Error::InvalidInput(format!(
            "basis belongs to algorithm {}, expected {expected}",
            parent.algorithm
        )));
    }
    if !parent.is_unimodular() {
        return Err(Error::InvariantViolation(format!(
            "parent basis {} {} {} has determinant {}",
            parent.vectors[0],
            parent.vectors[1],
            parent.vectors[2],
            parent.det()
        )));
    }
    let sum = parent.vectors[0]
        .checked_add(&parent.vectors[1])
        .and_then(|s| s.checked_add(&parent.vectors[2]));
    if sum.is_none() {
        return Err(Error::Capacity("vector components overflow u64".into()));
    }
    Ok(())
}

/// The six children of an algorithm-A basis, in rule order 1..6.
pub fn subdivide_a(parent: &Basis) -> Result<[Basis; 6]> {
    check_parent(parent, Algorithm::A)?;
    Ok(children_a(&parent.vectors).map(|g| Basis::new(g, parent.depth + 1, Algorithm::A)))
}

/// `(child_1, child_0)`: the results of operations "1" and "0".
pub fn subdivide_b(parent: &Basis) -> Result<(Basis, Basis)> {
    check_parent(parent, Algorithm::B)?;
    let [one, zero] = children_b(&parent.vectors);
    Ok((
        Basis::new(one, parent.depth + 1, Algorithm::B),
        Basis::new(zero, parent.depth + 1, Algorithm::B),
    ))
}

/// A node of the refinement tree: a basis and the code of its triangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub basis: Basis,
    pub code: Code,
    /// The last step kept a parent vertex in first position (A only).
    corner_run: bool,
}

impl Cell {
    pub fn root(basis: Basis) -> Self {
        let code = match basis.algorithm {
            Algorithm::B => Code::B(CodeB::default()),
            _ => Code::A(CodeA::default()),
        };
        Cell {
            basis,
            code,
            corner_run: false,
        }
    }

    pub fn depth(&self) -> u32 {
        self.basis.depth
    }

    pub fn vectors(&self) -> &[LatticeVector; 3] {
        &self.basis.vectors
    }

    pub fn code_a(&self) -> Option<&CodeA> {
        match &self.code {
            Code::A(c) => Some(c),
            Code::B(_) => None,
        }
    }

    pub fn code_b(&self) -> Option<CodeB> {
        match &self.code {
            Code::B(c) => Some(*c),
            Code::A(_) => None,
        }
    }

    /// Appends the children of this cell, in rule order, to `out`.
    ///
    /// The basis is trusted to be unimodular; use [`subdivide_a`] or
    /// [`subdivide_b`] for checked refinement.
    pub fn refine_into(&self, out: &mut Vec<Cell>) {
        let depth = self.basis.depth + 1;
        match (&self.code, self.basis.algorithm) {
            (Code::A(code), _) => {
                for (i, g) in children_a(&self.basis.vectors).into_iter().enumerate() {
                    let corner = i < 3;
                    let mut c = code.clone();
                    c.push_step(corner && i == 0 && self.corner_run);
                    out.push(Cell {
                        basis: Basis::new(g, depth, Algorithm::A),
                        code: Code::A(c),
                        corner_run: corner,
                    });
                }
            }
            (Code::B(code), _) => {
                let [one, zero] = children_b(&self.basis.vectors);
                out.push(Cell {
                    basis: Basis::new(one, depth, Algorithm::B),
                    code: Code::B(code.pushed(1)),
                    corner_run: false,
                });
                out.push(Cell {
                    basis: Basis::new(zero, depth, Algorithm::B),
                    code: Code::B(code.pushed(0)),
                    corner_run: false,
                });
            }
        }
    }

    pub fn children(&self) -> Vec<Cell> {
        let mut out = Vec::with_capacity(6);
        self.refine_into(&mut out);
        out
    }
}

/// Refinement rule of one planar algorithm, for the tiling engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Planar {
    algorithm: Algorithm,
}

impl Planar {
    pub fn new(algorithm: Algorithm) -> Result<Self> {
        initial(algorithm)?;
        Ok(Planar { algorithm })
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }
}

impl Refinement for Planar {
    type Cell = Cell;

    fn roots(&self) -> Vec<Cell> {
        initial(self.algorithm)
            .expect("planar algorithm")
            .into_iter()
            .map(Cell::root)
            .collect()
    }

    fn refine(&self, cell: &Cell, out: &mut Vec<Cell>) {
        cell.refine_into(out);
    }

    fn branching(&self) -> usize {
        match self.algorithm {
            Algorithm::A => 6,
            _ => 2,
        }
    }
}

fn same_set(a: &[LatticeVector; 3], b: &[LatticeVector; 3]) -> bool {
    let mut x = *a;
    let mut y = *b;
    x.sort_unstable();
    y.sort_unstable();
    x == y
}

/// Code of the last triangle of a nested algorithm-A chain `Δ_0 ⊃ ... ⊃ Δ_n`,
/// computed from shared vertices along the chain.
///
/// Every consecutive pair must be parent and child under rule A.
pub fn code_a(chain: &[Basis]) -> Result<CodeA> {
    if chain.is_empty() {
        return Err(Error::InvalidInput("empty chain".into()));
    }
    for (k, pair) in chain.windows(2).enumerate() {
        let [parent, child] = [&pair[0], &pair[1]];
        let ok = children_a(&parent.vectors)
            .iter()
            .any(|g| same_set(g, &child.vectors));
        if !ok {
            return Err(Error::InvalidInput(format!(
                "chain broken between positions {k} and {}",
                k + 1
            )));
        }
    }
    let mut runs = Vec::new();
    let mut i = chain.len() - 1;
    while i > 0 {
        let common = chain[i]
            .vectors
            .iter()
            .find(|v| chain[i - 1].contains_vertex(v))
            .copied();
        let t = match common {
            None => 1,
            Some(a) => {
                let mut lo = i - 1;
                while lo > 0 && chain[lo - 1].contains_vertex(&a) {
                    lo -= 1;
                }
                i - lo
            }
        };
        runs.push(t as u32);
        i -= t;
    }
    runs.reverse();
    Ok(CodeA::from_runs(&runs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn lv(x: u64, a: u64, b: u64) -> LatticeVector {
        LatticeVector::new(x, a, b).unwrap()
    }

    fn proj(b: &Basis) -> Vec<(u64, u64, u64)> {
        b.vectors.iter().map(|v| (v.x(), v.y1(), v.y2())).collect()
    }

    #[test]
    fn initial_partitions() {
        let [a1, a2] = initial_a();
        assert_eq!(a1.vectors, [lv(1, 0, 0), lv(1, 1, 0), lv(1, 0, 1)]);
        assert_eq!(a2.vectors, [lv(1, 1, 0), lv(1, 0, 1), lv(1, 1, 1)]);
        let [_, b2] = initial_b();
        assert_eq!(b2.vectors, [lv(1, 1, 1), lv(1, 0, 1), lv(1, 1, 0)]);
        for b in initial_a().iter().chain(initial_b().iter()) {
            assert!(b.is_unimodular());
        }
    }

    #[test]
    fn a_first_child_and_areas() {
        let kids = subdivide_a(&initial_a()[0]).unwrap();
        assert_eq!(kids[0].vectors, [lv(1, 0, 0), lv(2, 1, 0), lv(2, 0, 1)]);
        let areas: Vec<BigRational> = kids.iter().map(|k| k.triangle().area()).collect();
        let eighth = BigRational::new(1.into(), 8.into());
        let twentyfourth = BigRational::new(1.into(), 24.into());
        assert_eq!(areas.iter().filter(|a| **a == eighth).count(), 3);
        assert_eq!(areas.iter().filter(|a| **a == twentyfourth).count(), 3);
        let total: BigRational = areas.iter().sum();
        assert_eq!(total, BigRational::new(1.into(), 2.into()));
        for k in &kids {
            assert!(k.is_unimodular());
            assert_eq!(k.triangle().area(), k.triangle().shoelace_area());
        }
    }

    #[test]
    fn b_children_of_first_root() {
        let (one, zero) = subdivide_b(&initial_b()[0]).unwrap();
        assert_eq!(proj(&one), vec![(2, 1, 1), (1, 0, 0), (1, 1, 0)]);
        assert_eq!(proj(&zero), vec![(2, 1, 1), (1, 0, 0), (1, 0, 1)]);
        let quarter = BigRational::new(1.into(), 4.into());
        assert_eq!(one.triangle().area(), quarter);
        assert_eq!(zero.triangle().area(), quarter);
    }

    #[test]
    fn b_swapping_last_two_swaps_operations() {
        let p = initial_b()[0];
        let mut q = p;
        q.vectors.swap(1, 2);
        let (p1, p0) = subdivide_b(&p).unwrap();
        let (q1, q0) = subdivide_b(&q).unwrap();
        assert_eq!(p1.vectors, q0.vectors);
        assert_eq!(p0.vectors, q1.vectors);
    }

    #[test]
    fn non_unimodular_parent_is_rejected() {
        let bad = Basis::new([lv(1, 0, 0), lv(1, 1, 0), lv(2, 1, 0)], 0, Algorithm::A);
        assert!(matches!(
            subdivide_a(&bad),
            Err(Error::InvariantViolation(_))
        ));
        let bad = Basis::new([lv(1, 0, 0), lv(1, 1, 0), lv(2, 1, 0)], 0, Algorithm::B);
        assert!(matches!(
            subdivide_b(&bad),
            Err(Error::InvariantViolation(_))
        ));
        assert!(matches!(
            subdivide_b(&initial_a()[0]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn codes_from_chains() {
        let root = initial_a()[0];
        assert!(code_a(&[root]).unwrap().is_empty());
        let c1 = subdivide_a(&root).unwrap()[0];
        let c2 = subdivide_a(&c1).unwrap()[3];
        assert_eq!(code_a(&[root, c1, c2]).unwrap().runs(), &[1, 1]);
        let mut chain = vec![root];
        for k in 1..=5u32 {
            let next = subdivide_a(chain.last().unwrap()).unwrap()[0];
            chain.push(next);
            assert_eq!(code_a(&chain).unwrap().runs(), &[k]);
        }
        let stranger = initial_a()[1];
        assert!(matches!(
            code_a(&[root, stranger]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn incremental_code_matches_chain_definition() {
        // walk every depth-4 descendant of one root and compare
        fn walk(chain: &mut Vec<Basis>, cell: &Cell, depth: u32) {
            let code = cell.code_a().unwrap();
            assert_eq!(code, &code_a(chain).unwrap(), "at {chain:?}");
            assert_eq!(code.total(), cell.depth() as u64);
            if depth == 0 {
                return;
            }
            for child in cell.children() {
                chain.push(child.basis);
                walk(chain, &child, depth - 1);
                chain.pop();
            }
        }
        for root in initial_a() {
            let mut chain = vec![root];
            walk(&mut chain, &Cell::root(root), 4);
        }
    }

    #[test]
    fn b_codes_record_operations() {
        let root = Cell::root(initial_b()[0]);
        let kids = root.children();
        assert_eq!(kids[0].code.to_string(), "1");
        assert_eq!(kids[1].code.to_string(), "0");
        let grand = kids[1].children();
        let c = grand[0].code_b().unwrap();
        assert_eq!(c.to_string(), "01");
        assert_eq!(c.weight(), 1);
        assert_eq!(grand[1].code_b().unwrap().trailing_zeros(), 2);
    }

    #[test]
    fn refine_agrees_with_checked_subdivision() {
        for algo in [Algorithm::A, Algorithm::B] {
            for root in initial(algo).unwrap() {
                let kids: Vec<Basis> = Cell::root(root)
                    .children()
                    .iter()
                    .map(|c| c.basis)
                    .collect();
                let checked: Vec<Basis> = match algo {
                    Algorithm::A => subdivide_a(&root).unwrap().to_vec(),
                    _ => {
                        let (o, z) = subdivide_b(&root).unwrap();
                        vec![o, z]
                    }
                };
                assert_eq!(kids, checked);
            }
        }
    }

    #[test]
    fn mediant_sums_stay_primitive() {
        let kids = subdivide_a(&initial_a()[1]).unwrap();
        for k in kids {
            for v in k.vectors {
                assert!(v.is_primitive());
            }
            assert!(!k.det().is_zero());
            assert_eq!(k.det().magnitude(), BigInt::from(1).magnitude());
        }
    }
}
