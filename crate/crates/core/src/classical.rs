//! The one-dimensional Stern–Brocot partition of `[0, 1]`.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tiling::Refinement;

pub type Fraction = Ratio<u64>;

/// Largest level whose full fraction list is materialized.
pub const MAX_LIST_LEVEL: u32 = 24;

/// Inserts the mediant between every pair of neighbours.
pub fn step_1d(level: &[Fraction]) -> Result<Vec<Fraction>> {
    let ok = level.len() >= 2
        && level[0] == Fraction::from_integer(0)
        && level[level.len() - 1] == Fraction::from_integer(1)
        && level.windows(2).all(|w| w[0] < w[1]);
    if !ok {
        return Err(Error::InvalidInput(
            "a level must be strictly increasing from 0/1 to 1/1".into(),
        ));
    }
    let mut out = Vec::with_capacity(2 * level.len() - 1);
    out.push(level[0]);
    for w in level.windows(2) {
        let num = w[0].numer() + w[1].numer();
        let den = w[0].denom() + w[1].denom();
        out.push(Fraction::new(num, den));
        out.push(w[1]);
    }
    Ok(out)
}

/// The sorted sequence `F_n`, of length `2^n + 1`.
pub fn brocot(n: u32) -> Result<Vec<Fraction>> {
    if n > MAX_LIST_LEVEL {
        return Err(Error::Capacity(format!(
            "listing level {n} exceeds the limit of {MAX_LIST_LEVEL}"
        )));
    }
    let mut level = vec![Fraction::from_integer(0), Fraction::from_integer(1)];
    for _ in 0..n {
        level = step_1d(&level)?;
    }
    Ok(level)
}

/// A cell of the classical partition, endpoints stored as `(q, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Interval {
    pub left: [u64; 2],
    pub right: [u64; 2],
}

impl Interval {
    pub const UNIT: Interval = Interval {
        left: [1, 0],
        right: [1, 1],
    };

    pub fn left(&self) -> Fraction {
        Fraction::new_raw(self.left[1], self.left[0])
    }

    pub fn right(&self) -> Fraction {
        Fraction::new_raw(self.right[1], self.right[0])
    }

    /// The length is `1 / (q q')`; returns `q q'`.
    pub fn length_denominator(&self) -> u128 {
        self.left[0] as u128 * self.right[0] as u128
    }

    pub fn split(&self) -> (Interval, Interval) {
        let m = [self.left[0] + self.right[0], self.left[1] + self.right[1]];
        (
            Interval {
                left: self.left,
                right: m,
            },
            Interval {
                left: m,
                right: self.right,
            },
        )
    }
}

/// The mediant refinement of `[0, 1]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Classical;

impl Refinement for Classical {
    type Cell = Interval;

    fn roots(&self) -> Vec<Interval> {
        vec![Interval::UNIT]
    }

    fn refine(&self, cell: &Interval, out: &mut Vec<Interval>) {
        let (l, r) = cell.split();
        out.push(l);
        out.push(r);
    }

    fn branching(&self) -> usize {
        2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::TilingStream;

    fn f(p: u64, q: u64) -> Fraction {
        Fraction::new(p, q)
    }

    #[test]
    fn first_levels() {
        assert_eq!(brocot(1).unwrap(), vec![f(0, 1), f(1, 2), f(1, 1)]);
        assert_eq!(
            brocot(2).unwrap(),
            vec![f(0, 1), f(1, 3), f(1, 2), f(2, 3), f(1, 1)]
        );
        for n in 0..12 {
            assert_eq!(brocot(n).unwrap().len(), (1 << n) + 1);
        }
    }

    #[test]
    fn rejects_unsorted() {
        let bad = [f(0, 1), f(2, 3), f(1, 2), f(1, 1)];
        assert!(matches!(step_1d(&bad), Err(Error::InvalidInput(_))));
        assert!(step_1d(&[f(1, 1)]).is_err());
    }

    #[test]
    fn intervals_match_list() {
        let list = brocot(6).unwrap();
        let cells: Vec<Interval> = TilingStream::new(Classical, 6).collect();
        assert_eq!(cells.len(), 64);
        for (c, w) in cells.iter().zip(list.windows(2)) {
            assert_eq!((c.left(), c.right()), (w[0], w[1]));
            // neighbours are unimodular
            let det = c.right[1] * c.left[0] - c.left[1] * c.right[0];
            assert_eq!(det, 1);
        }
    }
}
