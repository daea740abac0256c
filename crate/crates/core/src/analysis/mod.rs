//! Moments of the tilings, zeta values, Dirichlet series and asymptotic ratios.

// guards of the form `!(x > bound)` also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod dirichlet;
pub mod moments;
pub mod sum;
pub mod zeta;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::parse_fraction;

pub use asymptotics::{
    asymptotic_ratio, asymptotic_sweep, cumulative_bound, cumulative_moment_check, AsymptoticPoint,
    CumulativeCheck,
};
pub use dirichlet::{
    classical_l, classical_l_direct, dirichlet_l, dirichlet_l_adaptive, dirichlet_series,
    DirichletSeries,
};
pub use moments::{classical_moment, moment, moment_with, Arithmetic, MomentRequest, MomentValue};
pub use sum::Neumaier;
pub use zeta::{zeta, zeta_with_tolerance, SeriesValue};

/// A moment order, remembered exactly when it is an integer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Beta {
    value: f64,
    #[serde(skip)]
    integer: Option<u32>,
}

impl Beta {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "order must be positive, got {value}"
            )));
        }
        let integer = (value.fract() == 0.0 && value <= u32::MAX as f64).then_some(value as u32);
        Ok(Beta { value, integer })
    }

    pub fn integer(n: u32) -> Self {
        Beta {
            value: n as f64,
            integer: Some(n),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn as_integer(&self) -> Option<u32> {
        self.integer
    }

    /// `3β`, the exponent the planar main terms evaluate `L` at.
    pub fn tripled(&self) -> Beta {
        match self.integer {
            Some(n) => Beta::integer(3 * n),
            None => Beta {
                value: 3.0 * self.value,
                integer: None,
            },
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.integer {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "{}", self.value),
        }
    }
}

/// Accepts a decimal (`1.5`) or a ratio (`3/2`).
impl FromStr for Beta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('/') {
            let r = parse_fraction(s)?;
            if r.is_integer() && *r.numer() <= u32::MAX as u64 {
                return Beta::new(*r.numer() as f64);
            }
            return Beta::new(*r.numer() as f64 / *r.denom() as f64);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::InvalidInput(format!("cannot parse order {s:?}")))?;
        Beta::new(v)
    }
}
