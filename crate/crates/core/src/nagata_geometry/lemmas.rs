//! Checkers for the counting lemmas that replace Stone's geometric lemma in
//! spaces of finite dimension: the alpha-heavy ball count, the
//! fraction-merging inequality and the subset fraction under random tie-breaking.

use rand::Rng;
use serde::Serialize;

use super::stone::BoundCheck;
use super::BallSpec;
use crate::knn_rule::{inclusion_probability, select_from_distances, LabelledSample, TieBreakPolicy};
use crate::metric_spaces::{Point, Space};
use crate::{Error, Result};

/// Counts balls heavy in the subset and checks `count ≤ α⁻¹(δ + 1)m`.
///
/// Ball `i` must be centred at point `i`. A ball is heavy when it holds at
/// least an `alpha` fraction of subset points among the sample points it
/// contains; `m` is the subset size. `delta` is a dimension certificate for
/// the whole point list at `scale`, supplied by the caller.
pub fn hl_count_check(
    points: &[Point],
    space: &Space,
    subset_mask: &[bool],
    balls: &[BallSpec],
    alpha: f64,
    delta: usize,
    scale: f64,
) -> Result<BoundCheck> {
    let n = points.len();
    if subset_mask.len() != n || balls.len() != n {
        return Err(Error::domain(format!(
            "{n} points need {n} mask entries and {n} balls, got {} and {}",
            subset_mask.len(),
            balls.len()
        )));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("alpha {alpha} outside (0, 1]")));
    }
    for (i, b) in balls.iter().enumerate() {
        if b.center != i {
            return Err(Error::domain(format!("ball {i} centred at point {} instead of {i}", b.center)));
        }
        b.validate(n, scale)?;
    }
    let m = subset_mask.iter().filter(|&&s| s).count();
    let mut count = 0;
    let mut dists = Vec::with_capacity(n);
    for (i, b) in balls.iter().enumerate() {
        space.distances_into(&points[i], points, &mut dists)?;
        let (mut inside, mut inside_subset) = (0usize, 0usize);
        for (j, &d) in dists.iter().enumerate() {
            if b.admits(d) {
                inside += 1;
                inside_subset += usize::from(subset_mask[j]);
            }
        }
        if inside_subset as f64 >= alpha * inside as f64 {
            count += 1;
        }
    }
    let bound = (delta + 1) as f64 * m as f64 / alpha;
    Ok(BoundCheck {
        count,
        bound,
        ok: count as f64 <= bound,
    })
}

/// Rounding slack granted to each premise.
const PREMISE_TOL: f64 = 1e-12;
/// Rounding slack on the conclusion. It must exceed the premise slack,
/// which carries over to the conclusion unchanged.
const CONCLUSION_TOL: f64 = 1e-10;

/// Whether `(t1·a1 + t2·a2)/(t1 + t2) ≤ α` given the premises
/// `t1, t2 ∈ [0, 1]`, `t2 ≤ 1 − t1`, `a1 ≤ α` and `t1·a1 + (1 − t1)·a2 ≤ α`.
///
/// Premise failures, negative fractions and `t1 + t2 = 0` are precondition
/// errors. Premises are checked with `1e-12` slack for decimal inputs that
/// do not round exactly; the conclusion is compared in multiplied-out form
/// with `1e-10` slack.
pub fn merge_fraction_bound(t1: f64, t2: f64, a1: f64, a2: f64, alpha: f64) -> Result<bool> {
    let unit = 0.0..=1.0;
    if !unit.contains(&t1) || !unit.contains(&t2) {
        return Err(Error::precondition(format!("t1 = {t1}, t2 = {t2} must lie in [0, 1]")));
    }
    if a1 < 0.0 || a2 < 0.0 || alpha < 0.0 {
        return Err(Error::precondition("fractions and alpha must be nonnegative"));
    }
    if t2 > 1.0 - t1 + PREMISE_TOL {
        return Err(Error::precondition(format!("t2 = {t2} exceeds 1 - t1 = {}", 1.0 - t1)));
    }
    if a1 > alpha + PREMISE_TOL {
        return Err(Error::precondition(format!("a1 = {a1} exceeds alpha = {alpha}")));
    }
    if t1 * a1 + (1.0 - t1) * a2 > alpha + PREMISE_TOL {
        return Err(Error::precondition(format!(
            "t1 a1 + (1 - t1) a2 = {} exceeds alpha = {alpha}",
            t1 * a1 + (1.0 - t1) * a2
        )));
    }
    if t1 + t2 == 0.0 {
        return Err(Error::precondition("t1 + t2 = 0 leaves the merged fraction undefined"));
    }
    Ok(t1 * a1 + t2 * a2 <= alpha * (t1 + t2) + CONCLUSION_TOL)
}

/// Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FractionEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// Subset fractions in the closed k-NN ball around `x` and in its open
/// interior (0 when the interior holds no sample point).
pub fn knn_ball_fractions(
    sample: &LabelledSample,
    space: &Space,
    subset_mask: &[bool],
    x: &Point,
    k: usize,
) -> Result<(f64, f64)> {
    check_mask(sample, subset_mask)?;
    let d = space.distances(x, sample.points())?;
    let r = crate::knn_rule::kth_smallest(&d, k)?;
    let (mut closed, mut closed_sub, mut open, mut open_sub) = (0usize, 0usize, 0usize, 0usize);
    for (i, &di) in d.iter().enumerate() {
        if di <= r {
            closed += 1;
            closed_sub += usize::from(subset_mask[i]);
        }
        if di < r {
            open += 1;
            open_sub += usize::from(subset_mask[i]);
        }
    }
    let open_fraction = if open == 0 { 0.0 } else { open_sub as f64 / open as f64 };
    Ok((closed_sub as f64 / closed as f64, open_fraction))
}

fn check_mask(sample: &LabelledSample, subset_mask: &[bool]) -> Result<()> {
    if subset_mask.len() != sample.len() {
        return Err(Error::domain(format!(
            "mask has {} entries for {} sample points",
            subset_mask.len(),
            sample.len()
        )));
    }
    Ok(())
}

/// Mean over `trials` uniformly tie-broken selections of the subset share
/// among the k nearest neighbours of `x`.
pub fn expected_subset_fraction_in_knn(
    sample: &LabelledSample,
    space: &Space,
    subset_mask: &[bool],
    x: &Point,
    k: usize,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<FractionEstimate> {
    check_mask(sample, subset_mask)?;
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    let d = space.distances(x, sample.points())?;
    // integer counts keep the mean exact when every trial selects the same number of subset points
    let (mut sum, mut sum_sq) = (0u128, 0u128);
    for _ in 0..trials {
        let sel = select_from_distances(&d, k, TieBreakPolicy::UniformRandom, rng)?;
        let c = sel.indices.iter().filter(|&&i| subset_mask[i]).count() as u128;
        sum += c;
        sum_sq += c * c;
    }
    let t = trials as u128;
    let kf = k as f64;
    let mean = sum as f64 / (t as f64 * kf);
    let std_error = if trials > 1 {
        let spread = (t * sum_sq - sum * sum) as f64;
        (spread / (t as f64 * (t - 1) as f64) / t as f64).sqrt() / kf
    } else {
        0.0
    };
    Ok(FractionEstimate { mean, std_error, trials })
}

/// Exact expectation of the same quantity from per-point inclusion probabilities.
pub fn exact_subset_fraction(
    sample: &LabelledSample,
    space: &Space,
    subset_mask: &[bool],
    x: &Point,
    k: usize,
) -> Result<f64> {
    check_mask(sample, subset_mask)?;
    let d = space.distances(x, sample.points())?;
    let mut total = 0.0;
    for (i, &s) in subset_mask.iter().enumerate() {
        if s {
            total += inclusion_probability(&d, k, i)?;
        }
    }
    Ok(total / k as f64)
}
