//! Triangulation graphs `T_ν`, their face/edge/vertex counts and degree laws.
//!
//! `T_ν` joins two vectors when they share a basis of the depth-ν tiling;
//! edges of earlier tilings that were split are not kept.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Algorithm, LatticeVector};
use crate::subdivision::{Cell, Planar};
use crate::tiling::{check_leaves, fold, Execution, Scope};

/// Largest face count for which a graph is materialized.
pub const MAX_FACES: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub algorithm: Algorithm,
    pub depth: u32,
    pub f: u64,
    pub r: u64,
    pub v: u64,
    pub degree_histogram: BTreeMap<u32, u64>,
}

impl Census {
    /// `v - r + f`, which is 1 for a triangulated square.
    pub fn euler(&self) -> i64 {
        self.v as i64 - self.r as i64 + self.f as i64
    }
}

/// The graph `T_ν` with vertices in lexicographic order.
#[derive(Clone, Debug)]
pub struct TriangulationGraph {
    pub algorithm: Algorithm,
    pub depth: u32,
    pub faces: u64,
    /// Sorted, each pair stored with the smaller vector first.
    pub edges: Vec<(LatticeVector, LatticeVector)>,
    pub vertices: Vec<LatticeVector>,
    pub degrees: Vec<u32>,
}

impl TriangulationGraph {
    pub fn build(algorithm: Algorithm, depth: u32, exec: Execution) -> Result<Self> {
        let rule = Planar::new(algorithm)?;
        let faces = check_leaves(&rule, depth, MAX_FACES)?;
        let mut edges = fold(
            &rule,
            depth,
            Scope::Leaves,
            exec,
            Vec::new,
            |acc: &mut Vec<(LatticeVector, LatticeVector)>, c: &Cell, _| {
                let g = c.vectors();
                for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                    let (a, b) = (g[i], g[j]);
                    acc.push(if a < b { (a, b) } else { (b, a) });
                }
            },
            |a, b| a.extend(b),
        );
        sort(&mut edges, exec);
        edges.dedup();

        let mut ends: Vec<LatticeVector> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        sort(&mut ends, exec);
        let mut vertices = Vec::new();
        let mut degrees = Vec::new();
        for v in ends {
            if vertices.last() == Some(&v) {
                *degrees.last_mut().unwrap() += 1;
            } else {
                vertices.push(v);
                degrees.push(1);
            }
        }
        Ok(TriangulationGraph {
            algorithm,
            depth,
            faces,
            edges,
            vertices,
            degrees,
        })
    }

    pub fn degree(&self, v: &LatticeVector) -> Option<u32> {
        self.vertices.binary_search(v).ok().map(|i| self.degrees[i])
    }

    pub fn contains(&self, v: &LatticeVector) -> bool {
        self.vertices.binary_search(v).is_ok()
    }

    pub fn census(&self) -> Census {
        let mut degree_histogram = BTreeMap::new();
        for &d in &self.degrees {
            *degree_histogram.entry(d).or_insert(0) += 1;
        }
        Census {
            algorithm: self.algorithm,
            depth: self.depth,
            f: self.faces,
            r: self.edges.len() as u64,
            v: self.vertices.len() as u64,
            degree_histogram,
        }
    }
}

fn sort<T: Ord + Send>(v: &mut [T], exec: Execution) {
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::slice::ParallelSliceMut;
            v.par_sort_unstable()
        }
        _ => v.sort_unstable(),
    }
}

/// Counts read off the actual triangulation graph at depth `depth`.
pub fn census(algorithm: Algorithm, depth: u32) -> Result<Census> {
    Ok(TriangulationGraph::build(algorithm, depth, Execution::Parallel)?.census())
}

/// Degrees that no later refinement changes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeTable {
    pub algorithm: Algorithm,
    pub depth: u32,
    pub stable: BTreeMap<LatticeVector, u32>,
    /// Vertices whose degree will still grow; empty for A.
    pub frontier: BTreeMap<LatticeVector, u32>,
}

impl DegreeTable {
    pub fn allowed(algorithm: Algorithm) -> &'static [u32] {
        match algorithm {
            Algorithm::B => &[3, 5, 8],
            _ => &[2, 3, 5, 8],
        }
    }
}

/// Stable degrees at depth `depth`: every vertex of `T_ν` for A, only the
/// vertices already present in `T_{ν-1}` for B.
pub fn stable_degrees(algorithm: Algorithm, depth: u32) -> Result<DegreeTable> {
    if depth == 0 {
        return Err(Error::InvalidInput(
            "stable degrees need depth at least 1".into(),
        ));
    }
    let g = TriangulationGraph::build(algorithm, depth, Execution::Parallel)?;
    let mut stable = BTreeMap::new();
    let mut frontier = BTreeMap::new();
    match algorithm {
        Algorithm::B => {
            let prev = TriangulationGraph::build(algorithm, depth - 1, Execution::Parallel)?;
            for (v, &d) in g.vertices.iter().zip(&g.degrees) {
                if prev.contains(v) {
                    stable.insert(*v, d);
                } else {
                    frontier.insert(*v, d);
                }
            }
        }
        _ => stable.extend(g.vertices.iter().copied().zip(g.degrees.iter().copied())),
    }
    Ok(DegreeTable {
        algorithm,
        depth,
        stable,
        frontier,
    })
}

/// Counts predicted by the closed forms, where they are known.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedForm {
    pub f: u64,
    pub r: u64,
    pub v: u64,
    pub degree_histogram: Option<BTreeMap<u32, u64>>,
}

pub fn closed_form(algorithm: Algorithm, depth: u32) -> Result<ClosedForm> {
    let overflow = || Error::Capacity(format!("closed form overflows at depth {depth}"));
    match algorithm {
        Algorithm::A => {
            if depth > 23 {
                return Err(overflow());
            }
            let six = 6u64.pow(depth);
            let two = 1u64 << depth;
            let mut hist = BTreeMap::from([
                (2, 2),
                (3, (2 * six + 8) / 5),
                (5, 4 * two - 4),
                (8, (6 * six + 14) / 10 - 2 * two),
            ]);
            hist.retain(|_, c| *c > 0);
            Ok(ClosedForm {
                f: 2 * six,
                r: two * (3 * 3u64.pow(depth) + 2),
                v: six + 2 * two + 1,
                degree_histogram: Some(hist),
            })
        }
        Algorithm::B => {
            if depth > 60 {
                return Err(overflow());
            }
            let k = depth / 2;
            let four = 1u64 << (2 * k);
            let two = 1u64 << k;
            let (r, v) = if depth.is_multiple_of(2) {
                (3 * four + 2 * two, (two + 1) * (two + 1))
            } else {
                (6 * four + 2 * two, (two + 1) * (two + 1) + four)
            };
            Ok(ClosedForm {
                f: 2 << depth,
                r,
                v,
                degree_histogram: None,
            })
        }
        Algorithm::Classical => Err(Error::InvalidInput(
            "graph counts are defined for the planar algorithms".into(),
        )),
    }
}

/// A vertex whose supposedly stable degree changed at a later depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeDrift {
    pub vertex: LatticeVector,
    pub depth: u32,
    pub degree: u32,
    pub later_degree: u32,
}

/// First stable degree at depths `..=depth` that differs in one of the
/// next `lookahead` graphs.
pub fn degree_drift(
    algorithm: Algorithm,
    depth: u32,
    lookahead: u32,
) -> Result<Option<DegreeDrift>> {
    let graphs: Vec<TriangulationGraph> = (0..=depth + lookahead)
        .map(|d| TriangulationGraph::build(algorithm, d, Execution::Parallel))
        .collect::<Result<_>>()?;
    let delay = if algorithm == Algorithm::B { 1 } else { 0 };
    for nu in delay..=depth {
        let base = &graphs[nu as usize];
        let older = nu.checked_sub(delay).map(|d| &graphs[d as usize]);
        for (v, &d) in base.vertices.iter().zip(&base.degrees) {
            if older.is_some_and(|o| !o.contains(v)) {
                continue;
            }
            for later in &graphs[nu as usize + 1..] {
                let e = later.degree(v).unwrap_or(0);
                if e != d {
                    return Ok(Some(DegreeDrift {
                        vertex: *v,
                        depth: nu,
                        degree: d,
                        later_degree: e,
                    }));
                }
            }
        }
    }
    Ok(None)
}
