//! Streaming enumeration of tilings, point location, and vertex harvesting.
//!
//! Every traversal is an explicit-stack depth-first walk. Parallel folds
//! split the tree at a depth that depends only on the rule and the target
//! depth, run one fold per subtree, and merge the partial results left to
//! right, so the outcome never depends on the number of worker threads.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Algorithm, Basis, LatticeVector, RationalPoint, Triangle};
use crate::subdivision::{initial, Cell, Code, Planar, MAX_B_DEPTH};

/// A refinement tree: roots at depth 0 and a rule producing the children of a node.
pub trait Refinement: Sync {
    type Cell: Clone + Send + Sync;

    fn roots(&self) -> Vec<Self::Cell>;

    /// Appends the children of `cell`, in their canonical order.
    fn refine(&self, cell: &Self::Cell, out: &mut Vec<Self::Cell>);

    fn branching(&self) -> usize;

    /// Number of leaves at `depth`.
    fn leaf_count(&self, depth: u32) -> Option<u64> {
        let roots = self.roots().len() as u64;
        (self.branching() as u64)
            .checked_pow(depth)
            .and_then(|b| b.checked_mul(roots))
    }
}

/// How a fold distributes its subtrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses the ambient rayon pool; identical to `Sequential` without the
    /// `parallel` feature.
    #[default]
    Parallel,
}

/// Which nodes a fold visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    Leaves,
    /// Every node at depths `0..=depth`.
    AllNodes,
}

/// Subtrees handed to workers; fixed so results are worker-count independent.
const SPLIT_TARGET: usize = 512;

/// Upper bound on the number of leaves any enumeration-backed operation will walk.
pub const MAX_LEAVES: u64 = 30_000_000;

pub(crate) fn check_leaves<R: Refinement>(rule: &R, depth: u32, limit: u64) -> Result<u64> {
    match rule.leaf_count(depth) {
        Some(n) if n <= limit => Ok(n),
        _ => Err(Error::Capacity(format!(
            "depth {depth} exceeds the enumeration limit of {limit} cells"
        ))),
    }
}

/// Sequential pre-order walk of the subtree under `start` down to `depth`.
fn walk<R, F>(rule: &R, start: R::Cell, start_depth: u32, depth: u32, scope: Scope, mut f: F)
where
    R: Refinement,
    F: FnMut(&R::Cell, u32),
{
    let mut stack = vec![(start, start_depth)];
    let mut scratch = Vec::with_capacity(rule.branching());
    while let Some((cell, d)) = stack.pop() {
        if d == depth {
            f(&cell, d);
            continue;
        }
        if scope == Scope::AllNodes {
            f(&cell, d);
        }
        rule.refine(&cell, &mut scratch);
        stack.extend(scratch.drain(..).rev().map(|c| (c, d + 1)));
    }
}

/// Folds `visit` over the tiling at `depth`.
///
/// `init` creates an empty accumulator for each subtree; `merge` combines
/// accumulators in canonical tree order.
pub fn fold<R, T, I, V, M>(
    rule: &R,
    depth: u32,
    scope: Scope,
    exec: Execution,
    init: I,
    visit: V,
    merge: M,
) -> T
where
    R: Refinement,
    T: Send,
    I: Fn() -> T + Sync,
    V: Fn(&mut T, &R::Cell, u32) + Sync,
    M: Fn(&mut T, T),
{
    // breadth-first down to the split depth
    let mut head = init();
    let mut frontier = rule.roots();
    let mut level = 0;
    let mut next = Vec::new();
    while level < depth && frontier.len() < SPLIT_TARGET {
        for cell in &frontier {
            if scope == Scope::AllNodes {
                visit(&mut head, cell, level);
            }
            rule.refine(cell, &mut next);
        }
        std::mem::swap(&mut frontier, &mut next);
        next.clear();
        level += 1;
    }

    let run = |cell: &R::Cell| {
        let mut acc = init();
        walk(rule, cell.clone(), level, depth, scope, |c, d| {
            visit(&mut acc, c, d)
        });
        acc
    };
    let parts: Vec<T> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            frontier.par_iter().map(run).collect()
        }
        _ => frontier.iter().map(run).collect(),
    };
    for p in parts {
        merge(&mut head, p);
    }
    head
}

/// Iterator over the leaves of the tiling at a fixed depth, in canonical order.
///
/// Memory use is `O(depth * branching)`.
pub struct TilingStream<R: Refinement> {
    rule: R,
    depth: u32,
    stack: Vec<(R::Cell, u32)>,
    scratch: Vec<R::Cell>,
}

impl<R: Refinement> TilingStream<R> {
    pub fn new(rule: R, depth: u32) -> Self {
        let mut stack: Vec<_> = rule.roots().into_iter().map(|c| (c, 0)).collect();
        stack.reverse();
        TilingStream {
            rule,
            depth,
            stack,
            scratch: Vec::new(),
        }
    }
}

impl<R: Refinement> Iterator for TilingStream<R> {
    type Item = R::Cell;

    fn next(&mut self) -> Option<R::Cell> {
        while let Some((cell, d)) = self.stack.pop() {
            if d == self.depth {
                return Some(cell);
            }
            self.rule.refine(&cell, &mut self.scratch);
            self.stack
                .extend(self.scratch.drain(..).rev().map(|c| (c, d + 1)));
        }
        None
    }
}

pub fn stream(algorithm: Algorithm, depth: u32) -> Result<TilingStream<Planar>> {
    Ok(TilingStream::new(Planar::new(algorithm)?, depth))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TilingSummary {
    pub triangles: u64,
    #[serde(serialize_with = "crate::ser_rational")]
    pub total_area: BigRational,
}

/// Calls `visitor` once per triangle of the depth-`depth` tiling.
pub fn enumerate<F>(algorithm: Algorithm, depth: u32, mut visitor: F) -> Result<TilingSummary>
where
    F: FnMut(&Triangle, &Code),
{
    let rule = Planar::new(algorithm)?;
    check_leaves(&rule, depth, MAX_LEAVES)?;
    let mut triangles = 0;
    let mut total = BigRational::zero();
    for cell in TilingStream::new(rule, depth) {
        let t = cell.basis.triangle();
        total += t.area();
        triangles += 1;
        visitor(&t, &cell.code);
    }
    Ok(TilingSummary {
        triangles,
        total_area: total,
    })
}

/// One step of a descent: the basis at that depth and its index among its
/// siblings (root index at depth 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentStep {
    pub basis: Basis,
    pub index: usize,
    pub code: Code,
    /// Coordinates of the target in this basis; all nonnegative.
    pub coefficients: [BigInt; 3],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentChain {
    pub target: RationalPoint,
    pub steps: Vec<DescentStep>,
}

impl DescentChain {
    /// First depth at which the target is a vertex of the chain.
    pub fn vertex_depth(&self) -> Option<u32> {
        let t = self.target.vector();
        self.steps
            .iter()
            .find(|s| s.basis.contains_vertex(&t))
            .map(|s| s.basis.depth)
    }
}

/// Multidimensional continued fraction expansion of `target` to depth `depth`.
///
/// At every level the lowest-index child whose closed triangle contains the
/// target is chosen.
pub fn locate(algorithm: Algorithm, target: RationalPoint, depth: u32) -> Result<DescentChain> {
    if algorithm == Algorithm::B && depth > MAX_B_DEPTH {
        return Err(Error::Capacity(format!(
            "algorithm-B descents stop at depth {MAX_B_DEPTH}"
        )));
    }
    let roots: Vec<Cell> = initial(algorithm)?.into_iter().map(Cell::root).collect();
    let theta = target.vector();
    let pick = |cells: Vec<Cell>| -> Result<(usize, Cell)> {
        cells
            .into_iter()
            .enumerate()
            .find(|(_, c)| c.basis.contains(&theta))
            .ok_or_else(|| Error::InvariantViolation(format!("no child contains {}", target)))
    };
    let mut steps = Vec::with_capacity(depth as usize + 1);
    let (mut index, mut cell) = pick(roots)?;
    loop {
        let coefficients = cell.basis.coefficients(&theta)?;
        steps.push(DescentStep {
            basis: cell.basis,
            index,
            code: cell.code.clone(),
            coefficients,
        });
        if cell.depth() == depth {
            break;
        }
        (index, cell) = pick(cell.children())?;
    }
    Ok(DescentChain { target, steps })
}

/// What the pruned search learned about one vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VertexRecord {
    pub first_depth: u32,
    /// Stable degree in the triangulation graph.
    pub degree: u32,
}

struct Harvest {
    first: BTreeMap<LatticeVector, u32>,
    neighbours: BTreeMap<LatticeVector, Vec<LatticeVector>>,
}

/// Smallest denominator any vertex created inside this triangle can have.
fn min_new_denominator(algorithm: Algorithm, g: &[LatticeVector; 3]) -> u64 {
    match algorithm {
        // q(b) + q(c) of the ordered triangle; b, c carry the two smallest
        Algorithm::B => g[1].q() + g[2].q(),
        _ => {
            let mut q = g.map(|v| v.q());
            q.sort_unstable();
            q[0] + q[1]
        }
    }
}

fn harvest(algorithm: Algorithm, max_q: u64) -> Result<Harvest> {
    if max_q == 0 {
        return Err(Error::InvalidInput(
            "denominator bound must be at least 1".into(),
        ));
    }
    // (cell, vertices of the parent, vertices of the grandparent)
    type Frame = (Cell, Option<[LatticeVector; 3]>, Option<[LatticeVector; 3]>);
    let mut out = Harvest {
        first: BTreeMap::new(),
        neighbours: BTreeMap::new(),
    };
    let mut stack: Vec<Frame> = initial(algorithm)?
        .into_iter()
        .rev()
        .map(|b| (Cell::root(b), None, None))
        .collect();
    while let Some((cell, parent, grand)) = stack.pop() {
        let g = *cell.vectors();
        let depth = cell.depth();
        let is_new =
            |v: &LatticeVector, p: &Option<[LatticeVector; 3]>| p.is_none_or(|p| !p.contains(v));
        let mut fresh_small = false;
        for (i, v) in g.iter().enumerate() {
            if v.q() > max_q {
                continue;
            }
            let new_here = is_new(v, &parent);
            if new_here {
                fresh_small = true;
                let d = out.first.entry(*v).or_insert(depth);
                *d = (*d).min(depth);
            }
            // degree is read one level after appearance for B
            let counts = match algorithm {
                Algorithm::B => {
                    (!new_here && parent.is_some() && is_new(v, &grand))
                        || (depth == 1 && grand.is_none() && !new_here)
                }
                _ => new_here,
            };
            if counts {
                let nb = out.neighbours.entry(*v).or_default();
                for (j, w) in g.iter().enumerate() {
                    if j != i && !nb.contains(w) {
                        nb.push(*w);
                    }
                }
            }
        }
        let descend = min_new_denominator(algorithm, &g) <= max_q
            || (algorithm == Algorithm::B && fresh_small);
        if descend {
            if algorithm == Algorithm::B && depth >= MAX_B_DEPTH {
                return Err(Error::Capacity(format!(
                    "denominators up to {max_q} need depths beyond {MAX_B_DEPTH}"
                )));
            }
            let mut kids = cell.children();
            kids.reverse();
            stack.extend(kids.into_iter().map(|k| (k, Some(g), parent)));
        }
    }
    Ok(out)
}

/// Every primitive `(q, a1, a2)` with `q <= max_q`, with the first depth at
/// which it is a basis vector.
///
/// A subtree is abandoned once the smallest denominator it could still
/// create exceeds `max_q`.
pub fn vertices_up_to(algorithm: Algorithm, max_q: u64) -> Result<BTreeMap<LatticeVector, u32>> {
    Ok(harvest(algorithm, max_q)?.first)
}

/// Like [`vertices_up_to`], also reporting the stable degree of each vertex,
/// read from the triangles around it at its first depth (A) or one level
/// later (B).
pub fn vertex_degrees_up_to(
    algorithm: Algorithm,
    max_q: u64,
) -> Result<BTreeMap<LatticeVector, VertexRecord>> {
    let h = harvest(algorithm, max_q)?;
    h.first
        .iter()
        .map(|(v, &first_depth)| {
            let degree = h.neighbours.get(v).map_or(0, |n| n.len() as u32);
            if degree == 0 {
                return Err(Error::InvariantViolation(format!(
                    "no neighbourhood recorded for {}",
                    v.label()
                )));
            }
            Ok((
                *v,
                VertexRecord {
                    first_depth,
                    degree,
                },
            ))
        })
        .collect()
}
