//! Truncated Dirichlet series `L(F, β) = Σ deg(a) / q(a)^β` with tail bounds.

use std::collections::BTreeMap;

use serde::Serialize;

use super::sum::Neumaier;
use super::zeta::{zeta, SeriesValue};
use crate::error::{Error, Result};
use crate::lattice::Algorithm;
use crate::tiling::vertex_degrees_up_to;

/// A truncated planar series together with its integer coefficients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirichletSeries {
    pub algorithm: Algorithm,
    pub beta: f64,
    pub max_q: u64,
    /// `Σ deg(a)` over the vertices with `q(a) = q`.
    pub weights: BTreeMap<u64, u64>,
    pub series: SeriesValue,
}

/// Coefficients `W(q) = Σ_{q(a)=q} deg(a)` for `q <= max_q`.
pub fn dirichlet_weights(algorithm: Algorithm, max_q: u64) -> Result<BTreeMap<u64, u64>> {
    let mut w = BTreeMap::new();
    for (v, rec) in vertex_degrees_up_to(algorithm, max_q)? {
        *w.entry(v.q()).or_insert(0) += rec.degree as u64;
    }
    Ok(w)
}

/// `Σ_{q > Q} W(q) q^{-β} <= (32/3) Q^{3-β} / (β-3)`, from `deg <= 8` and at
/// most `(4/3) q^2` primitive points with denominator `q >= 2`.
pub fn planar_tail_bound(max_q: u64, beta: f64) -> f64 {
    32.0 / 3.0 * (max_q as f64).powf(3.0 - beta) / (beta - 3.0)
}

fn check_planar(algorithm: Algorithm, beta: f64) -> Result<()> {
    if algorithm == Algorithm::Classical {
        return Err(Error::InvalidInput(
            "use the classical series for the one-dimensional partition".into(),
        ));
    }
    if !(beta > 3.0) {
        return Err(Error::Domain(format!(
            "the planar series converges only for order above 3, got {beta}"
        )));
    }
    Ok(())
}

pub fn dirichlet_series(algorithm: Algorithm, beta: f64, max_q: u64) -> Result<DirichletSeries> {
    check_planar(algorithm, beta)?;
    let weights = dirichlet_weights(algorithm, max_q)?;
    let head: Neumaier = weights
        .iter()
        .map(|(&q, &w)| w as f64 * (q as f64).powf(-beta))
        .collect();
    Ok(DirichletSeries {
        algorithm,
        beta,
        max_q,
        series: SeriesValue {
            value: head.value(),
            tail_bound: planar_tail_bound(max_q, beta),
            terms_used: weights.len() as u64,
        },
        weights,
    })
}

/// `L(F, β)` truncated at denominators `<= max_q`.
pub fn dirichlet_l(algorithm: Algorithm, beta: f64, max_q: u64) -> Result<SeriesValue> {
    Ok(dirichlet_series(algorithm, beta, max_q)?.series)
}

const MAX_ADAPTIVE_Q: u64 = 1 << 9;

/// Doubles the cut-off until the tail bound is below `relative` times the head.
pub fn dirichlet_l_adaptive(
    algorithm: Algorithm,
    beta: f64,
    relative: f64,
) -> Result<DirichletSeries> {
    check_planar(algorithm, beta)?;
    if !(relative > 0.0) {
        return Err(Error::InvalidInput(
            "relative tolerance must be positive".into(),
        ));
    }
    let mut q = 2;
    loop {
        let s = dirichlet_series(algorithm, beta, q)?;
        if s.series.tail_bound < relative * s.series.value {
            return Ok(s);
        }
        if q >= MAX_ADAPTIVE_Q {
            return Err(Error::Capacity(format!(
                "order {beta} needs a cut-off above {q} for relative tail {relative}"
            )));
        }
        q *= 2;
    }
}

/// `L(β) = 2 ζ(β-1) / ζ(β)` for the one-dimensional partition.
pub fn classical_l(beta: f64) -> Result<SeriesValue> {
    if !(beta > 2.0) {
        return Err(Error::Domain(format!(
            "the classical series converges only for order above 2, got {beta}"
        )));
    }
    let num = zeta(beta - 1.0)?;
    let den = zeta(beta)?;
    let lo = 2.0 * num.value / den.upper();
    let hi = 2.0 * num.upper() / den.value;
    Ok(SeriesValue {
        value: lo,
        tail_bound: hi - lo,
        terms_used: num.terms_used.max(den.terms_used),
    })
}

/// Euler's totient for `1..=n`.
pub fn totients(n: usize) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for p in 2..=n {
        if phi[p] == p as u64 {
            for m in (p..=n).step_by(p) {
                phi[m] -= phi[m] / p as u64;
            }
        }
    }
    phi
}

/// `2 Σ_{q <= Q} φ(q) / q^β`, the classical series summed directly.
pub fn classical_l_direct(beta: f64, max_q: u64) -> Result<SeriesValue> {
    if !(beta > 2.0) {
        return Err(Error::Domain(format!(
            "the classical series converges only for order above 2, got {beta}"
        )));
    }
    if max_q == 0 || max_q > 1 << 26 {
        return Err(Error::InvalidInput(format!("cut-off {max_q} out of range")));
    }
    let phi = totients(max_q as usize);
    let head: Neumaier = (1..=max_q as usize)
        .map(|q| 2.0 * phi[q] as f64 * (q as f64).powf(-beta))
        .collect();
    Ok(SeriesValue {
        value: head.value(),
        // φ(q) < q
        tail_bound: 2.0 * (max_q as f64).powf(2.0 - beta) / (beta - 2.0),
        terms_used: max_q,
    })
}
