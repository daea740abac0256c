//! A registry of structural checks, each run exhaustively up to a depth and
//! reported with a reproducible witness on failure.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::analysis::{cumulative_moment_check, moment, Beta};
use crate::census::{closed_form, degree_drift, DegreeTable, TriangulationGraph};
use crate::error::{Error, Result};
use crate::lattice::{orientation, Algorithm, LatticeVector, RationalPoint};
use crate::subdivision::{children_b, Cell, Planar};
use crate::tiling::{fold, locate, vertices_up_to, Execution, Refinement, Scope};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub property: &'static str,
    pub algorithm: Algorithm,
    pub depth_limit: u32,
    /// Depth actually covered; lower than the limit when capped by capacity.
    pub depth_checked: Option<u32>,
    pub parameters: String,
    pub checked: u64,
    pub status: Status,
    pub witness: Option<String>,
}

struct Outcome {
    depth: u32,
    parameters: String,
    checked: u64,
    witness: Option<String>,
}

struct Check {
    name: &'static str,
    property: &'static str,
    applies: fn(Algorithm) -> bool,
    run: fn(Algorithm, u32) -> Result<Outcome>,
}

fn planar(a: Algorithm) -> bool {
    a != Algorithm::Classical
}
fn only_a(a: Algorithm) -> bool {
    a == Algorithm::A
}
fn only_b(a: Algorithm) -> bool {
    a == Algorithm::B
}
fn any(_: Algorithm) -> bool {
    true
}

const CHECKS: &[Check] = &[
    Check {
        name: "unimodularity",
        property: "every basis has determinant ±1",
        applies: planar,
        run: unimodularity,
    },
    Check {
        name: "regular-partition",
        property: "children tile their parent: areas sum exactly, and at depth ≤ 4 they lie inside it with disjoint interiors",
        applies: planar,
        run: regular_partition,
    },
    Check {
        name: "area-lemma2",
        property: "area 1/(2 q(a) q(b) q(c)) equals the shoelace area",
        applies: planar,
        run: area_lemma,
    },
    Check {
        name: "sigma1",
        property: "cell measures sum to exactly 1",
        applies: any,
        run: sigma1,
    },
    Check {
        name: "lemma4",
        property: "a child missing parent vertex a has every q(ω) ≥ min(q(b), q(c))",
        applies: only_a,
        run: lemma4,
    },
    Check {
        name: "lemma7",
        property: "min q ≥ 2^⌊r/2⌋ for a code of length r",
        applies: only_a,
        run: lemma7,
    },
    Check {
        name: "lemma8",
        property: "max q ≤ (ν+1) min q at depth ν",
        applies: planar,
        run: lemma8,
    },
    Check {
        name: "lemma13",
        property: "q(b)+q(c) ≥ q(a) ≥ q(b) ≥ q(c); op 1 at least halves the area; k op-0 steps follow the mediant formulas with q(a'), q(b') ≥ (k+1)/2 q(c)",
        applies: only_b,
        run: lemma13,
    },
    Check {
        name: "lemma16",
        property: "after δ0 then δ1,1,0 the third vertex is b⊕c, a vertex of the first child and not of the start",
        applies: only_b,
        run: lemma16,
    },
    Check {
        name: "theorem1-contraction",
        property: "along a descent, diam Δ_ν ≤ ν/(ν+1) · diam Δ_{ν-1} for ν ≥ 2",
        applies: only_a,
        run: contraction,
    },
    Check {
        name: "completeness",
        property: "every primitive (q, a1, a2) with q ≤ 15 is a vertex; for A first at depth ≤ q",
        applies: planar,
        run: completeness,
    },
    Check {
        name: "census-formulas",
        property: "face, edge, vertex counts and the degree histogram match the closed forms",
        applies: planar,
        run: census_formulas,
    },
    Check {
        name: "degree-set",
        property: "stable degrees lie in {2,3,5,8} (A) or {3,5,8} (B); other degrees occur only on new vertices",
        applies: planar,
        run: degree_set,
    },
    Check {
        name: "degree-stability",
        property: "a stable degree is unchanged three refinements later",
        applies: planar,
        run: degree_stability,
    },
    Check {
        name: "max-area",
        property: "the largest triangle at depth ν has area exactly 1/(2(ν+1)²)",
        applies: only_a,
        run: max_area,
    },
    Check {
        name: "lemma9-bound",
        property: "Σ_n σ_{n,2} ≤ (16/3) ζ(4)²",
        applies: only_a,
        run: cumulative_a,
    },
    Check {
        name: "lemma14-bound",
        property: "Σ_n σ_{n,2} ≤ (32/3) 2² ζ(4)²",
        applies: only_b,
        run: cumulative_b,
    },
];

/// Names accepted by [`run_checks`], in report order.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// Runs the selected checks (all of them for an empty selection or `all`).
pub fn run_checks(
    algorithm: Algorithm,
    depth_limit: u32,
    selection: &[&str],
) -> Result<Vec<CheckReport>> {
    for s in selection {
        if *s != "all" && !CHECKS.iter().any(|c| c.name == *s) {
            return Err(Error::InvalidInput(format!(
                "unknown check `{s}`; known checks: {}",
                check_names().join(", ")
            )));
        }
    }
    let everything = selection.is_empty() || selection.contains(&"all");
    let mut out = Vec::new();
    for c in CHECKS
        .iter()
        .filter(|c| everything || selection.contains(&c.name))
    {
        let mut report = CheckReport {
            name: c.name,
            property: c.property,
            algorithm,
            depth_limit,
            depth_checked: None,
            parameters: String::new(),
            checked: 0,
            status: Status::Skipped,
            witness: None,
        };
        if (c.applies)(algorithm) {
            let o = (c.run)(algorithm, depth_limit)?;
            report.depth_checked = Some(o.depth);
            report.parameters = o.parameters;
            report.checked = o.checked;
            report.status = if o.witness.is_some() {
                Status::Fail
            } else {
                Status::Pass
            };
            report.witness = o.witness;
        }
        out.push(report);
    }
    Ok(out)
}

/// Per-subtree tally that keeps the first failure in traversal order.
#[derive(Default)]
struct Tally {
    checked: u64,
    witness: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
    }
}

fn describe(cell: &Cell) -> String {
    let mut s = format!("depth {} triangle ", cell.depth());
    for (i, v) in cell.vectors().iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(&v.label());
    }
    let _ = write!(s, " code {}", cell.code);
    s
}

/// Maximum depth for exhaustive walks over every node.
fn walk_cap(algorithm: Algorithm) -> u32 {
    match algorithm {
        Algorithm::A => 8,
        _ => 22,
    }
}

/// Maximum depth at which triangulation graphs are built.
fn graph_cap(algorithm: Algorithm) -> u32 {
    match algorithm {
        Algorithm::A => 6,
        _ => 18,
    }
}

fn over_nodes<F>(algorithm: Algorithm, depth: u32, visit: F) -> Result<Outcome>
where
    F: Fn(&mut Tally, &Cell, u32) + Sync,
{
    let rule = Planar::new(algorithm)?;
    let depth = depth.min(walk_cap(algorithm));
    let t = fold(
        &rule,
        depth,
        Scope::AllNodes,
        Execution::Parallel,
        Tally::default,
        visit,
        Tally::merge,
    );
    Ok(Outcome {
        depth,
        parameters: String::new(),
        checked: t.checked,
        witness: t.witness,
    })
}

fn q_product(g: &[LatticeVector; 3]) -> u128 {
    g.iter().map(|v| v.q() as u128).product()
}

fn unimodularity(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    over_nodes(algorithm, depth, |t, c, _| {
        t.check(c.basis.is_unimodular(), || describe(c))
    })
}

/// Closed half-plane separation of two triangles by an edge of `p`.
fn separated(p: &[LatticeVector; 3], q: &[LatticeVector; 3]) -> bool {
    [(0, 1, 2), (1, 2, 0), (2, 0, 1)].iter().any(|&(i, j, k)| {
        let inside = orientation(&p[i], &p[j], &p[k]);
        q.iter().all(|v| orientation(&p[i], &p[j], v) != inside)
    })
}

fn interiors_disjoint(p: &[LatticeVector; 3], q: &[LatticeVector; 3]) -> bool {
    separated(p, q) || separated(q, p)
}

fn regular_partition(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    let rule = Planar::new(algorithm)?;
    over_nodes(algorithm, depth, |t, c, d| {
        if d == depth {
            return;
        }
        let mut kids = Vec::new();
        rule.refine(c, &mut kids);
        let parent = c.basis.triangle().area();
        let total: BigRational = kids.iter().map(|k| k.basis.triangle().area()).sum();
        t.check(total == parent, || {
            format!("areas of children differ from {}", describe(c))
        });
        if d < 4 {
            let inside = kids
                .iter()
                .all(|k| k.vectors().iter().all(|v| c.basis.contains(v)));
            t.check(inside, || format!("a child leaves {}", describe(c)));
            for (i, a) in kids.iter().enumerate() {
                for b in &kids[i + 1..] {
                    t.check(interiors_disjoint(a.vectors(), b.vectors()), || {
                        format!("{} overlaps {}", describe(a), describe(b))
                    });
                }
            }
        }
    })
}

fn area_lemma(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    over_nodes(algorithm, depth, |t, c, _| {
        let tri = c.basis.triangle();
        t.check(tri.area() == tri.shoelace_area(), || describe(c))
    })
}

fn sigma1(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    let cap = match algorithm {
        Algorithm::A => 8,
        Algorithm::B => 22,
        Algorithm::Classical => 24,
    };
    let depth = depth.min(cap);
    let one = BigRational::one();
    let mut witness = None;
    let mut checked = 0;
    for n in 0..=depth {
        let m = moment(algorithm, n, Beta::integer(1))?;
        checked += m.cells;
        if m.exact.as_ref() != Some(&one) && witness.is_none() {
            witness = Some(format!(
                "depth {n}: sum {}",
                m.exact.map_or(m.value.to_string(), |e| e.to_string())
            ));
        }
    }
    Ok(Outcome {
        depth,
        parameters: "exact rational".into(),
        checked,
        witness,
    })
}

fn lemma4(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    let rule = Planar::new(algorithm)?;
    over_nodes(algorithm, depth, |t, c, d| {
        if d == depth {
            return;
        }
        let g = c.vectors();
        let mut kids = Vec::new();
        rule.refine(c, &mut kids);
        for k in &kids {
            for i in 0..3 {
                if k.basis.contains_vertex(&g[i]) {
                    continue;
                }
                let floor = g[(i + 1) % 3].q().min(g[(i + 2) % 3].q());
                let ok = k.vectors().iter().all(|w| w.q() >= floor);
                t.check(ok, || {
                    format!("{} from parent {}", describe(k), describe(c))
                });
            }
        }
    })
}

fn lemma7(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    over_nodes(algorithm, depth, |t, c, _| {
        let r = c.code_a().map_or(0, |code| code.len()) as u32;
        let min = c.vectors().iter().map(|v| v.q()).min().unwrap();
        t.check(min >= 1u64 << (r / 2), || describe(c))
    })
}

fn lemma8(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    over_nodes(algorithm, depth, |t, c, d| {
        let q = c.vectors().map(|v| v.q());
        let (min, max) = (*q.iter().min().unwrap(), *q.iter().max().unwrap());
        t.check(max as u128 <= (d as u128 + 1) * min as u128, || describe(c))
    })
}

/// `a + k c`, the `k`-fold mediant with `c`.
fn plus_multiple(a: &LatticeVector, c: &LatticeVector, k: u64) -> Option<[u64; 3]> {
    let (a, c) = (a.components(), c.components());
    let mut out = [0; 3];
    for i in 0..3 {
        out[i] = a[i].checked_add(c[i].checked_mul(k)?)?;
    }
    Some(out)
}

const LEMMA13_STEPS: u64 = 12;

fn lemma13(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    let rule = Planar::new(algorithm)?;
    let mut o = over_nodes(algorithm, depth, |t, c, d| {
        let g = c.vectors();
        let [a, b, cc] = g.map(|v| v.q());
        t.check(b + cc >= a && a >= b && b >= cc, || {
            format!("(i) {}", describe(c))
        });
        if d < depth {
            let mut kids = Vec::new();
            rule.refine(c, &mut kids);
            let ok = 2 * q_product(g) <= q_product(kids[0].vectors());
            t.check(ok, || format!("(ii) {}", describe(c)));
        }
        let mut cur = *g;
        for k in 1..=LEMMA13_STEPS {
            cur = children_b(&cur)[1];
            let (x, y) = if k % 2 == 0 {
                (
                    plus_multiple(&g[0], &g[2], k / 2),
                    plus_multiple(&g[1], &g[2], k / 2),
                )
            } else {
                (
                    plus_multiple(&g[1], &g[2], k.div_ceil(2)),
                    plus_multiple(&g[0], &g[2], (k - 1) / 2),
                )
            };
            let formula =
                x == Some(cur[0].components()) && y == Some(cur[1].components()) && cur[2] == g[2];
            let bound = [cur[0], cur[1]]
                .iter()
                .all(|v| 2 * v.q() as u128 >= (k as u128 + 1) * g[2].q() as u128);
            t.check(formula && bound, || {
                format!("(iii) k = {k} from {}", describe(c))
            });
        }
    })?;
    o.parameters = format!("k ≤ {LEMMA13_STEPS} op-0 steps");
    Ok(o)
}

fn lemma16(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    over_nodes(algorithm, depth, |t, c, _| {
        let g = c.vectors();
        let expect = g[1] + g[2];
        // children_b lists op 1 before op 0
        for d0 in [1usize, 0] {
            let first = children_b(g)[1 - d0];
            for d1 in [1usize, 0] {
                let mut cur = children_b(&first)[1 - d1];
                cur = children_b(&cur)[0];
                cur = children_b(&cur)[1];
                let c2 = cur[2];
                let ok = c2 == expect && first.contains(&c2) && !g.contains(&c2);
                t.check(ok, || {
                    format!("operations {d0},{d1},1,0 from {}", describe(c))
                });
            }
        }
    })
}

/// Points `(i/m, j/m)` for `m` in a fixed list, all inside the square.
fn contraction_grid() -> Vec<RationalPoint> {
    let mut pts = Vec::new();
    for m in [1u64, 2, 3, 5, 7, 12, 17, 29, 64, 97] {
        for i in 0..=m {
            for j in 0..=m {
                if m <= 17 || (i * 7 + j * 3) % 5 == 0 {
                    let v = crate::lattice::normalize([m, i, j]).expect("nonzero");
                    pts.push(RationalPoint::from_vector(v));
                }
            }
        }
    }
    pts.sort();
    pts.dedup();
    pts
}

/// First step of `chain` whose diameter exceeds `factor(ν)` times the previous one.
///
/// `factor` returns `(num, den)`; the comparison is on exact squared diameters.
pub fn contraction_violation(
    algorithm: Algorithm,
    theta: RationalPoint,
    depth: u32,
    factor: impl Fn(u32) -> (u64, u64),
) -> Result<(u64, Option<(u32, f64)>)> {
    let chain = locate(algorithm, theta, depth)?;
    let diam: Vec<BigRational> = chain
        .steps
        .iter()
        .map(|s| s.basis.triangle().diameter_squared())
        .collect::<Result<_>>()?;
    let mut checked = 0;
    for nu in 2..diam.len() {
        let (num, den) = factor(nu as u32);
        let lhs = &diam[nu] * BigInt::from(den * den);
        let rhs = &diam[nu - 1] * BigInt::from(num * num);
        checked += 1;
        if lhs.cmp(&rhs) == Ordering::Greater {
            let ratio = (&diam[nu] / &diam[nu - 1])
                .to_f64()
                .map_or(f64::NAN, f64::sqrt);
            return Ok((checked, Some((nu as u32, ratio))));
        }
    }
    Ok((checked, None))
}

fn contraction(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    let depth = depth.min(24);
    let mut checked = 0;
    let mut witness = None;
    for theta in contraction_grid() {
        let (n, bad) =
            contraction_violation(algorithm, theta, depth, |nu| (nu as u64, nu as u64 + 1))?;
        checked += n;
        if let (Some((nu, ratio)), None) = (bad, &witness) {
            witness = Some(format!("Θ = {theta}, ν = {nu}, diameter ratio {ratio}"));
        }
    }
    Ok(Outcome {
        depth,
        parameters: format!("{} grid points", contraction_grid().len()),
        checked,
        witness,
    })
}

const COMPLETENESS_Q: u64 = 15;

fn completeness(algorithm: Algorithm, _depth: u32) -> Result<Outcome> {
    let found = vertices_up_to(algorithm, COMPLETENESS_Q)?;
    let mut checked = 0;
    let mut witness = None;
    let mut deepest = 0;
    for q in 1..=COMPLETENESS_Q {
        for a in 0..=q {
            for b in 0..=q {
                let Ok(v) = LatticeVector::new(q, a, b) else {
                    continue;
                };
                checked += 1;
                let first = found.get(&v).copied();
                deepest = deepest.max(first.unwrap_or(0));
                let ok = match (algorithm, first) {
                    (_, None) => false,
                    (Algorithm::A, Some(d)) => d as u64 <= q,
                    _ => true,
                };
                if !ok && witness.is_none() {
                    witness = Some(format!("{} first depth {first:?}", v.label()));
                }
            }
        }
    }
    Ok(Outcome {
        depth: deepest,
        parameters: format!("q ≤ {COMPLETENESS_Q}"),
        checked,
        witness,
    })
}

fn census_formulas(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    let depth = depth.min(graph_cap(algorithm));
    let mut witness = None;
    for d in 0..=depth {
        let c = TriangulationGraph::build(algorithm, d, Execution::Parallel)?.census();
        let k = closed_form(algorithm, d)?;
        let hist_ok = k
            .degree_histogram
            .as_ref()
            .is_none_or(|h| *h == c.degree_histogram);
        if ((c.f, c.r, c.v) != (k.f, k.r, k.v) || !hist_ok || c.euler() != 1) && witness.is_none() {
            witness = Some(format!(
                "depth {d}: graph (f, r, v) = ({}, {}, {}) histogram {:?}, closed form ({}, {}, {}) {:?}",
                c.f, c.r, c.v, c.degree_histogram, k.f, k.r, k.v, k.degree_histogram
            ));
        }
    }
    Ok(Outcome {
        depth,
        parameters: String::new(),
        checked: depth as u64 + 1,
        witness,
    })
}

fn degree_set(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    let depth = depth.min(graph_cap(algorithm));
    let allowed = DegreeTable::allowed(algorithm);
    let mut checked = 0;
    let mut witness = None;
    let mut prev: Option<TriangulationGraph> = None;
    for d in 0..=depth {
        let g = TriangulationGraph::build(algorithm, d, Execution::Parallel)?;
        for (v, &deg) in g.vertices.iter().zip(&g.degrees) {
            checked += 1;
            let new = prev.as_ref().is_none_or(|p| !p.contains(v));
            let ok = match algorithm {
                Algorithm::B if new => allowed.contains(&deg) || deg == if d == 0 { 2 } else { 4 },
                _ => allowed.contains(&deg),
            };
            if !ok && witness.is_none() {
                witness = Some(format!("depth {d}: {} has degree {deg}", v.label()));
            }
        }
        prev = Some(g);
    }
    Ok(Outcome {
        depth,
        parameters: String::new(),
        checked,
        witness,
    })
}

const STABILITY_LOOKAHEAD: u32 = 3;

fn degree_stability(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    let depth = depth.min(graph_cap(algorithm) - STABILITY_LOOKAHEAD);
    let drift = degree_drift(algorithm, depth, STABILITY_LOOKAHEAD)?;
    Ok(Outcome {
        depth,
        parameters: format!("{STABILITY_LOOKAHEAD} further refinements"),
        checked: depth as u64 + 1,
        witness: drift.map(|d| {
            format!(
                "{} has degree {} at depth {} but {} later",
                d.vertex.label(),
                d.degree,
                d.depth,
                d.later_degree
            )
        }),
    })
}

fn max_area(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    let rule = Planar::new(algorithm)?;
    let depth = depth.min(walk_cap(algorithm));
    // smallest q(a)q(b)q(c) per depth
    let mins = fold(
        &rule,
        depth,
        Scope::AllNodes,
        Execution::Parallel,
        || vec![u128::MAX; depth as usize + 1],
        |acc, c: &Cell, d| {
            let p = q_product(c.vectors());
            acc[d as usize] = acc[d as usize].min(p);
        },
        |a, b| a.iter_mut().zip(b).for_each(|(x, y)| *x = (*x).min(y)),
    );
    let witness = (1..=depth).find_map(|nu| {
        let want = (nu as u128 + 1).pow(2);
        (mins[nu as usize] != want).then(|| {
            format!(
                "depth {nu}: max area 1/{} instead of 1/{}",
                2 * mins[nu as usize],
                2 * want
            )
        })
    });
    Ok(Outcome {
        depth,
        parameters: String::new(),
        checked: depth as u64,
        witness,
    })
}

fn cumulative(algorithm: Algorithm, depth: u32, cap: u32) -> Result<Outcome> {
    let depth = depth.min(cap);
    let c = cumulative_moment_check(algorithm, Beta::integer(2), depth)?;
    Ok(Outcome {
        depth,
        parameters: format!(
            "β = 2, partial sum {:.6} vs bound {:.6}",
            c.partial_sum, c.bound
        ),
        checked: depth as u64 + 1,
        witness: (!c.holds).then(|| format!("partial sum {} exceeds {}", c.partial_sum, c.bound)),
    })
}

fn cumulative_a(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    cumulative(algorithm, depth, 9)
}

fn cumulative_b(algorithm: Algorithm, depth: u32) -> Result<Outcome> {
    cumulative(algorithm, depth, 23)
}
