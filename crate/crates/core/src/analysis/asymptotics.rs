//! Ratios of moments to their predicted main terms, and cumulative bounds.

use serde::Serialize;

use super::dirichlet::{classical_l, dirichlet_l_adaptive};
use super::moments::{moment_with, Arithmetic, MomentRequest};
use super::zeta::{zeta, SeriesValue};
use super::Beta;
use crate::error::{Error, Result};
use crate::lattice::Algorithm;
use crate::tiling::Execution;

/// Relative tail allowed for the series inside a main term.
pub const MAIN_TERM_TAIL: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticPoint {
    pub n: u32,
    pub beta: Beta,
    pub sigma: f64,
    pub sigma_mode: Arithmetic,
    pub main_term: f64,
    pub ratio: f64,
    pub l_value: f64,
    pub l_tail_bound: f64,
}

/// The series a main term is built from: `L(F, 3β)` for the planar rules,
/// `L(2β) = 2 ζ(2β-1)/ζ(2β)` for the interval.
pub fn main_series(algorithm: Algorithm, beta: Beta) -> Result<SeriesValue> {
    check_order(beta)?;
    match algorithm {
        Algorithm::Classical => classical_l(2.0 * beta.value()),
        _ => Ok(dirichlet_l_adaptive(algorithm, 3.0 * beta.value(), MAIN_TERM_TAIL)?.series),
    }
}

fn check_order(beta: Beta) -> Result<()> {
    if beta.value() <= 1.0 {
        return Err(Error::Domain(format!(
            "asymptotic ratios need order above 1, got {beta}"
        )));
    }
    Ok(())
}

/// Predicted leading behaviour of `σ_{n,β}` given the series value `l`.
pub fn main_term(algorithm: Algorithm, n: u32, beta: Beta, l: f64) -> f64 {
    let (n, b) = (n as f64, beta.value());
    match algorithm {
        Algorithm::A => l / (2.0 * n * n).powf(b),
        Algorithm::B => 2f64.powf(b) * l / n.powf(2.0 * b),
        Algorithm::Classical => l / n.powf(b),
    }
}

fn point(
    algorithm: Algorithm,
    n: u32,
    beta: Beta,
    l: &SeriesValue,
    execution: Execution,
) -> Result<AsymptoticPoint> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "asymptotic ratios need n >= 2, got {n}"
        )));
    }
    let m = moment_with(
        algorithm,
        n,
        beta,
        MomentRequest {
            arithmetic: Arithmetic::Auto,
            execution,
        },
    )?;
    let main = main_term(algorithm, n, beta, l.value);
    Ok(AsymptoticPoint {
        n,
        beta,
        sigma: m.value,
        sigma_mode: m.mode,
        main_term: main,
        ratio: m.value / main,
        l_value: l.value,
        l_tail_bound: l.tail_bound,
    })
}

/// `R(n) = σ_{n,β} / main term`.
pub fn asymptotic_ratio(algorithm: Algorithm, n: u32, beta: Beta) -> Result<AsymptoticPoint> {
    let l = main_series(algorithm, beta)?;
    point(algorithm, n, beta, &l, Execution::Parallel)
}

/// `R(n)` for each `n` in `range`, sharing one evaluation of the series.
pub fn asymptotic_sweep(
    algorithm: Algorithm,
    range: std::ops::RangeInclusive<u32>,
    beta: Beta,
    execution: Execution,
) -> Result<Vec<AsymptoticPoint>> {
    let l = main_series(algorithm, beta)?;
    range
        .map(|n| point(algorithm, n, beta, &l, execution))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CumulativeCheck {
    pub beta: Beta,
    pub depth: u32,
    pub partial_sum: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Upper bound on `Σ_n σ_{n,β}` over all depths.
pub fn cumulative_bound(algorithm: Algorithm, beta: Beta) -> Result<f64> {
    check_order(beta)?;
    let b = beta.value();
    // lower ends of the brackets keep the comparison conservative
    let zz = zeta(2.0 * b)?.value * zeta(3.0 * b - 2.0)?.value;
    match algorithm {
        Algorithm::A => Ok(16.0 / 3.0 * zz),
        Algorithm::B => Ok(32.0 / 3.0 * 2f64.powf(b) * zz),
        Algorithm::Classical => Err(Error::InvalidInput(
            "cumulative bounds are stated for the planar rules".into(),
        )),
    }
}

/// `Σ_{n <= depth} σ_{n,β}` against [`cumulative_bound`].
pub fn cumulative_moment_check(
    algorithm: Algorithm,
    beta: Beta,
    depth: u32,
) -> Result<CumulativeCheck> {
    let bound = cumulative_bound(algorithm, beta)?;
    let mut total = super::sum::Neumaier::new();
    for n in 0..=depth {
        total.add(
            moment_with(
                algorithm,
                n,
                beta,
                MomentRequest {
                    arithmetic: Arithmetic::CompensatedFloat,
                    execution: Execution::Parallel,
                },
            )?
            .value,
        );
    }
    let partial_sum = total.value();
    Ok(CumulativeCheck {
        beta,
        depth,
        partial_sum,
        bound,
        holds: partial_sum <= bound,
    })
}
