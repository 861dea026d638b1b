//! Ball-family combinatorics on finite samples: multiplicity, disconnected
//! families, centre covers, dimension witnesses, Stone counting and the
//! counting lemmas behind the sigma-finite consistency argument.

mod lemmas;
mod stone;
mod witness;

pub use lemmas::{
    exact_subset_fraction, expected_subset_fraction_in_knn, hl_count_check, knn_ball_fractions, merge_fraction_bound,
    FractionEstimate,
};
pub use stone::{stone_bound_no_ties_check, stone_count, stone_count_with_placement, BoundCheck, Placement};
pub use witness::{
    max_disconnected_multiplicity, nagata_dimension, nagata_violation_witness, nagata_violation_witness_with_cap,
    NagataWitness, DEFAULT_WITNESS_CAP,
};

use serde::{Deserialize, Serialize};

use crate::metric_spaces::{Point, Space};
use crate::{Error, Result};

/// Dense symmetric matrix of pairwise distances over a point list.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(space: &Space, points: &[Point]) -> Result<Self> {
        let n = points.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = space.distance(&points[i], &points[j])?;
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    #[default]
    Closed,
}

/// A ball centred at a point of the family's point list.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub center: usize,
    pub radius: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl BallSpec {
    pub fn closed(center: usize, radius: f64) -> Self {
        BallSpec {
            center,
            radius,
            boundary: Boundary::Closed,
        }
    }

    pub fn open(center: usize, radius: f64) -> Self {
        BallSpec {
            center,
            radius,
            boundary: Boundary::Open,
        }
    }

    /// Whether a point at distance `d` from the centre lies in the ball.
    #[inline]
    pub fn admits(&self, d: f64) -> bool {
        match self.boundary {
            Boundary::Closed => d <= self.radius,
            Boundary::Open => d < self.radius,
        }
    }

    /// An open ball of radius zero contains nothing, not even its centre.
    pub fn is_empty(&self) -> bool {
        self.boundary == Boundary::Open && self.radius == 0.0
    }

    pub(crate) fn validate(&self, n: usize, scale: f64) -> Result<()> {
        if self.center >= n {
            return Err(Error::domain(format!("ball centre index {} out of range for {n} points", self.center)));
        }
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return Err(Error::domain(format!("ball radius {} must be finite and >= 0", self.radius)));
        }
        if self.radius >= scale {
            return Err(Error::domain(format!("ball radius {} not below scale {scale}", self.radius)));
        }
        Ok(())
    }
}

/// Finite family of balls centred at points of `points`, all of radius below `scale`.
#[derive(Clone, Debug)]
pub struct BallFamily<'a> {
    points: &'a [Point],
    space: &'a Space,
    balls: Vec<BallSpec>,
    scale: f64,
}

impl<'a> BallFamily<'a> {
    /// `scale` may be `f64::INFINITY`.
    pub fn new(points: &'a [Point], space: &'a Space, balls: Vec<BallSpec>, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::domain(format!("scale {scale} must be positive")));
        }
        for b in &balls {
            b.validate(points.len(), scale)?;
        }
        Ok(BallFamily {
            points,
            space,
            balls,
            scale,
        })
    }

    pub fn unbounded(points: &'a [Point], space: &'a Space, balls: Vec<BallSpec>) -> Result<Self> {
        Self::new(points, space, balls, f64::INFINITY)
    }

    pub fn points(&self) -> &'a [Point] {
        self.points
    }

    pub fn space(&self) -> &'a Space {
        self.space
    }

    pub fn balls(&self) -> &[BallSpec] {
        &self.balls
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn contains(&self, ball: &BallSpec, p: &Point) -> Result<bool> {
        Ok(ball.admits(self.space.distance(&self.points[ball.center], p)?))
    }

    fn with_balls(&self, balls: Vec<BallSpec>) -> Self {
        BallFamily {
            points: self.points,
            space: self.space,
            balls,
            scale: self.scale,
        }
    }
}

/// Largest number of balls of the family containing a single probe.
pub fn ball_multiplicity(family: &BallFamily<'_>, probes: &[Point]) -> Result<usize> {
    if probes.is_empty() {
        return Err(Error::domain("no probe points"));
    }
    let mut best = 0;
    for p in probes {
        let mut count = 0;
        for b in family.balls() {
            if family.contains(b, p)? {
                count += 1;
            }
        }
        best = best.max(count);
    }
    Ok(best)
}

/// Multiplicity probed at every point of the family's point list.
pub fn ball_multiplicity_on_points(family: &BallFamily<'_>) -> Result<usize> {
    ball_multiplicity(family, family.points())
}

/// True iff no ball's centre lies in another ball of the family.
pub fn is_disconnected(family: &BallFamily<'_>) -> Result<bool> {
    let balls = family.balls();
    for (i, a) in balls.iter().enumerate() {
        for (j, b) in balls.iter().enumerate() {
            if i != j && family.contains(b, &family.points()[a.center])? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Disconnected subfamily whose balls contain the centre of every ball of
/// the original family (empty open balls aside).
///
/// Balls are visited by decreasing radius, closed before open at equal
/// radius, then by position; a ball is kept unless its centre already lies
/// in a kept ball. The kept balls are returned in their original order.
pub fn center_cover_subfamily<'a>(family: &BallFamily<'a>) -> Result<BallFamily<'a>> {
    let balls = family.balls();
    let mut order: Vec<usize> = (0..balls.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&balls[i], &balls[j]);
        b.radius
            .total_cmp(&a.radius)
            .then_with(|| (a.boundary == Boundary::Open).cmp(&(b.boundary == Boundary::Open)))
            .then(i.cmp(&j))
    });
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let centre = &family.points()[balls[i].center];
        let mut covered = false;
        for &j in &kept {
            if family.contains(&balls[j], centre)? {
                covered = true;
                break;
            }
        }
        if !covered {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    Ok(family.with_balls(kept.into_iter().map(|i| balls[i]).collect()))
}
