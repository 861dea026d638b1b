use serde::{Deserialize, Serialize};

use super::point::Point;
use super::{Family, Space};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::config(format!("[{lo}, {hi}] is not an interval")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn unit() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn contains(&self, t: f64) -> bool {
        (self.lo..=self.hi).contains(&t)
    }
}

/// `left ⊕₁ interval`: `d((p, s), (q, t)) = d_left(p, q) + |s − t|`.
pub fn l1_sum(left: Space, right: Interval) -> Space {
    Space::new(Family::L1Sum(Box::new(left), right))
}

/// The sequence `z_i = (x_i, β^i)` and centre `z = (x_0, 0)` in
/// `chain(α) ⊕₁ [0, 1]`, every pair of which is farther apart than either
/// member is from the centre.
#[derive(Clone, Debug)]
pub struct L1Witness {
    alpha: f64,
    beta: f64,
    space: Space,
}

impl L1Witness {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < alpha && alpha < 1.0) {
            return Err(Error::config(format!("need 0 < β < α < 1, got α = {alpha}, β = {beta}")));
        }
        if beta >= 0.5 {
            return Err(Error::config(format!("need β < 1/2, got {beta}")));
        }
        Ok(L1Witness {
            alpha,
            beta,
            space: l1_sum(Space::chain(alpha)?, Interval::unit()),
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn centre(&self) -> Point {
        Point::Sum(Box::new(Point::Hub(0)), 0.0)
    }

    /// `z_i` for `i >= 1`.
    pub fn point(&self, i: u64) -> Point {
        Point::Sum(Box::new(Point::Hub(i)), self.beta.powi(i as i32))
    }

    /// `(d(z_i, z_j) − d(z_i, z), d(z_i, z_j) − d(z_j, z))` for `i ≠ j`,
    /// evaluated without the chain sums that dominate each distance.
    ///
    /// Past a few dozen points the interval coordinates fall below the
    /// rounding error of the full distances, so comparing those directly in
    /// floating point reports ties that do not exist.
    pub fn margins(&self, i: u64, j: u64) -> (f64, f64) {
        let (lo, hi) = (i.min(j), i.max(j));
        let b_lo = self.beta.powi(lo as i32);
        let b_hi = self.beta.powi(hi as i32);
        // i < j: d(z_i, z_j) = S_j + β^i − β^j, d(z_i, z) = S_i + β^i, d(z_j, z) = S_j + β^j
        let chain_gap: f64 = (lo + 1..=hi).map(|k| self.alpha.powi(k as i32)).sum();
        let from_lo = chain_gap - b_hi;
        let from_hi = b_lo * (1.0 - 2.0 * self.beta.powi((hi - lo) as i32));
        if i < j {
            (from_lo, from_hi)
        } else {
            (from_hi, from_lo)
        }
    }
}
