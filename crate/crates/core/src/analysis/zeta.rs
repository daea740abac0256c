//! The Riemann zeta function on the real axis `s > 1`, with rigorous brackets.

use serde::Serialize;

use super::sum::Neumaier;
use crate::error::{Error, Result};

/// A lower estimate together with the width of an interval known to
/// contain the true value: `value <= true <= value + tail_bound`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms_used: u64,
}

impl SeriesValue {
    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }

    pub fn midpoint(&self) -> f64 {
        self.value + 0.5 * self.tail_bound
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.value - slack && x <= self.upper() + slack
    }
}

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Longest direct partial sum before switching to Euler–Maclaurin.
const DIRECT_LIMIT: f64 = 4e6;

/// `B_{2j} / (2j)!` for `j = 1..=12`.
const BERNOULLI_OVER_FACTORIAL: [f64; 12] = [
    8.333_333_333_333_333e-2,
    -1.388_888_888_888_889e-3,
    3.306_878_306_878_307e-5,
    -8.267_195_767_195_768e-7,
    2.087_675_698_786_81e-8,
    -5.284_190_138_687_493e-10,
    1.338_253_653_068_467_9e-11,
    -3.389_680_296_322_582_7e-13,
    8.586_062_056_277_845e-15,
    -2.174_868_698_558_062e-16,
    5.509_002_828_360_229_5e-18,
    -1.395_446_468_581_252_2e-19,
];

/// `ζ(s)` with `tail_bound <= tolerance`.
pub fn zeta(s: f64) -> Result<SeriesValue> {
    zeta_with_tolerance(s, DEFAULT_TOLERANCE)
}

pub fn zeta_with_tolerance(s: f64, tolerance: f64) -> Result<SeriesValue> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::Domain(format!(
            "zeta needs a real argument above 1, got {s}"
        )));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    // direct sum with integral bracket: width is K^{1-s}-(K+1)^{1-s} over s-1 <= K^{-s}
    let k = tolerance.powf(-1.0 / s).ceil();
    if k <= DIRECT_LIMIT {
        let k = k as u64;
        let mut acc: Neumaier = (1..=k).map(|n| (n as f64).powf(-s)).collect();
        let lower = ((k + 1) as f64).powf(1.0 - s) / (s - 1.0);
        let upper = (k as f64).powf(1.0 - s) / (s - 1.0);
        acc.add(lower);
        return Ok(SeriesValue {
            value: acc.value(),
            tail_bound: (upper - lower).max(0.0),
            terms_used: k,
        });
    }
    euler_maclaurin(s, tolerance)
}

/// Euler–Maclaurin with cut-off `N`; the remainder after `m` correction
/// terms is bounded by the first omitted term.
fn euler_maclaurin(s: f64, tolerance: f64) -> Result<SeriesValue> {
    for n in [16u64, 32, 64, 128, 256, 512, 1024] {
        let nf = n as f64;
        let mut acc: Neumaier = (1..n).map(|k| (k as f64).powf(-s)).collect();
        acc.add(nf.powf(1.0 - s) / (s - 1.0));
        acc.add(0.5 * nf.powf(-s));
        // rising factorial s(s+1)...(s+2j-2) times N^{-s-2j+1}
        let mut rising = s;
        let mut power = nf.powf(-s - 1.0);
        for (j, &b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
            let term = b * rising * power;
            if j + 1 < BERNOULLI_OVER_FACTORIAL.len() {
                acc.add(term);
            } else {
                let bound = 2.0 * term.abs();
                if bound <= tolerance {
                    return Ok(SeriesValue {
                        value: acc.value() - term.abs(),
                        tail_bound: bound,
                        terms_used: n + j as u64,
                    });
                }
            }
            let j2 = 2.0 * (j as f64 + 1.0);
            rising *= (s + j2 - 1.0) * (s + j2);
            power /= nf * nf;
        }
    }
    Err(Error::Capacity(format!(
        "zeta({s}) cannot reach tolerance {tolerance}"
    )))
}
