//! Moments `σ_{n,β}`: sums of `β`-th powers of cell measures over a tiling.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::sum::Neumaier;
use super::Beta;
use crate::classical::{Classical, Interval};
use crate::error::{Error, Result};
use crate::lattice::Algorithm;
use crate::subdivision::{Cell, Planar};
use crate::tiling::{check_leaves, fold, Execution, Refinement, Scope, MAX_LEAVES};

/// Largest tiling summed exactly for orders above 1.
pub const EXACT_FACE_LIMIT: u64 = 100_000;
pub const MAX_CLASSICAL_DEPTH: u32 = 30;

/// Cells whose measure is the reciprocal of an integer.
pub(crate) trait Measured {
    fn measure_denominator(&self) -> u128;
}

impl Measured for Cell {
    fn measure_denominator(&self) -> u128 {
        self.basis
            .denominators()
            .iter()
            .fold(2, |acc, &q| acc * q as u128)
    }
}

impl Measured for Interval {
    fn measure_denominator(&self) -> u128 {
        self.length_denominator()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Arithmetic {
    /// Exact when the order is an integer and the tiling is small enough.
    #[default]
    Auto,
    Exact,
    CompensatedFloat,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct MomentRequest {
    pub arithmetic: Arithmetic,
    pub execution: Execution,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentValue {
    pub algorithm: Algorithm,
    pub depth: u32,
    pub beta: Beta,
    /// `Exact` or `CompensatedFloat`, never `Auto`.
    pub mode: Arithmetic,
    pub cells: u64,
    #[serde(serialize_with = "ser_opt_rational")]
    pub exact: Option<BigRational>,
    pub value: f64,
}

fn ser_opt_rational<S: serde::Serializer>(
    r: &Option<BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.collect_str(r),
        None => s.serialize_none(),
    }
}

/// Running sum of unit fractions, kept in `u128` until it overflows.
#[derive(Clone, Debug)]
struct ExactSum {
    num: u128,
    den: u128,
    spill: BigRational,
}

impl Default for ExactSum {
    fn default() -> Self {
        ExactSum {
            num: 0,
            den: 1,
            spill: BigRational::zero(),
        }
    }
}

impl ExactSum {
    fn small_add(&mut self, num: u128, den: u128) -> bool {
        let g = self.den.gcd(&den);
        let Some(l) = (self.den / g).checked_mul(den) else {
            return false;
        };
        let a = self.num.checked_mul(l / self.den);
        let b = num.checked_mul(l / den);
        match (a, b) {
            (Some(a), Some(b)) => match a.checked_add(b) {
                Some(n) => {
                    let g = n.gcd(&l);
                    self.num = n / g;
                    self.den = l / g;
                    true
                }
                None => false,
            },
            _ => false,
        }
    }

    fn flush(&mut self) {
        if self.num != 0 {
            self.spill += BigRational::new(BigInt::from(self.num), BigInt::from(self.den));
        }
        self.num = 0;
        self.den = 1;
    }

    /// Adds `1 / d^k`.
    fn add_unit(&mut self, d: u128, k: u32) {
        match d.checked_pow(k) {
            Some(p) => {
                if !self.small_add(1, p) {
                    self.flush();
                    self.num = 1;
                    self.den = p;
                }
            }
            None => {
                self.flush();
                self.spill += BigRational::new(BigInt::from(1), BigInt::from(d).pow(k));
            }
        }
    }

    fn merge(&mut self, other: ExactSum) {
        self.spill += other.spill;
        if other.num != 0 && !self.small_add(other.num, other.den) {
            self.spill += BigRational::new(BigInt::from(other.num), BigInt::from(other.den));
        }
    }

    fn total(mut self) -> BigRational {
        self.flush();
        self.spill
    }
}

fn resolve(arithmetic: Arithmetic, beta: Beta, cells: u64) -> Result<Arithmetic> {
    let exact_ok = |k: u32| k == 1 || cells <= EXACT_FACE_LIMIT;
    match (arithmetic, beta.as_integer()) {
        (Arithmetic::CompensatedFloat, _) => Ok(Arithmetic::CompensatedFloat),
        (Arithmetic::Auto, Some(k)) if exact_ok(k) => Ok(Arithmetic::Exact),
        (Arithmetic::Auto, _) => Ok(Arithmetic::CompensatedFloat),
        (Arithmetic::Exact, Some(k)) if exact_ok(k) => Ok(Arithmetic::Exact),
        (Arithmetic::Exact, Some(_)) => Err(Error::Capacity(format!(
            "exact moments above order 1 are limited to {EXACT_FACE_LIMIT} cells, this tiling has {cells}"
        ))),
        (Arithmetic::Exact, None) => Err(Error::Domain(format!(
            "exact moments need an integer order, got {beta}"
        ))),
    }
}

fn sum_measures<R>(
    rule: &R,
    depth: u32,
    beta: Beta,
    mode: Arithmetic,
    exec: Execution,
) -> (Option<BigRational>, f64)
where
    R: Refinement,
    R::Cell: Measured,
{
    match (mode, beta.as_integer()) {
        (Arithmetic::Exact, Some(k)) => {
            let total = fold(
                rule,
                depth,
                Scope::Leaves,
                exec,
                ExactSum::default,
                |acc, c: &R::Cell, _| acc.add_unit(c.measure_denominator(), k),
                ExactSum::merge,
            )
            .total();
            let value = total.to_f64().unwrap_or(f64::NAN);
            (Some(total), value)
        }
        _ => {
            let b = beta.value();
            let total = fold(
                rule,
                depth,
                Scope::Leaves,
                exec,
                Neumaier::new,
                |acc, c: &R::Cell, _| acc.add((c.measure_denominator() as f64).powf(-b)),
                Neumaier::merge,
            );
            (None, total.value())
        }
    }
}

/// `σ_{n,β}` with automatic arithmetic and the default execution.
pub fn moment(algorithm: Algorithm, depth: u32, beta: Beta) -> Result<MomentValue> {
    moment_with(algorithm, depth, beta, MomentRequest::default())
}

pub fn moment_with(
    algorithm: Algorithm,
    depth: u32,
    beta: Beta,
    request: MomentRequest,
) -> Result<MomentValue> {
    let (cells, (exact, value), mode) = match algorithm {
        Algorithm::Classical => {
            if depth > MAX_CLASSICAL_DEPTH {
                return Err(Error::Capacity(format!(
                    "classical depth {depth} exceeds {MAX_CLASSICAL_DEPTH}"
                )));
            }
            let cells = 1u64 << depth;
            let mode = resolve(request.arithmetic, beta, cells)?;
            (
                cells,
                sum_measures(&Classical, depth, beta, mode, request.execution),
                mode,
            )
        }
        _ => {
            let rule = Planar::new(algorithm)?;
            let cells = check_leaves(&rule, depth, MAX_LEAVES)?;
            let mode = resolve(request.arithmetic, beta, cells)?;
            (
                cells,
                sum_measures(&rule, depth, beta, mode, request.execution),
                mode,
            )
        }
    };
    Ok(MomentValue {
        algorithm,
        depth,
        beta,
        mode,
        cells,
        exact,
        value,
    })
}

/// Power sum of the interval lengths of `F_n`.
pub fn classical_moment(depth: u32, beta: Beta) -> Result<MomentValue> {
    moment(Algorithm::Classical, depth, beta)
}
