//! Stone's counting quantity: how many sample points would keep `x` among
//! their k nearest neighbours if `x` replaced them in the sample.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::knn_rule::{select_from_distances, LabelledSample, TieBreakPolicy};
use crate::metric_spaces::{Point, Space};
use crate::{Error, Result};

use super::DistanceMatrix;

/// Where `x` sits in the substituted sample used for the i-th query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// `x` takes the place of `x_i`: `(x_1, …, x_{i-1}, x, x_{i+1}, …, x_n)`.
    #[default]
    InPlace,
    /// `x` comes first: `(x, x_1, …, x_{i-1}, x_{i+1}, …, x_n)`. Under
    /// [`TieBreakPolicy::IndexOrder`] this lets `x` win every tie.
    Front,
}

/// Stone count with `x` substituted in place.
pub fn stone_count(
    sample: &LabelledSample,
    space: &Space,
    x: &Point,
    k: usize,
    policy: TieBreakPolicy,
    rng: &mut impl Rng,
) -> Result<usize> {
    stone_count_with_placement(sample, space, x, k, policy, Placement::InPlace, rng)
}

/// Number of indices `i` with `x_i ≠ x` such that `x` is selected among the
/// k nearest neighbours of `x_i` within the sample where `x` replaces `x_i`.
pub fn stone_count_with_placement(
    sample: &LabelledSample,
    space: &Space,
    x: &Point,
    k: usize,
    policy: TieBreakPolicy,
    placement: Placement,
    rng: &mut impl Rng,
) -> Result<usize> {
    let m = DistanceMatrix::new(space, sample.points())?;
    let to_x = space.distances(x, sample.points())?;
    count_with_matrix(&m, &to_x, k, policy, placement, rng)
}

fn count_with_matrix(
    m: &DistanceMatrix,
    to_x: &[f64],
    k: usize,
    policy: TieBreakPolicy,
    placement: Placement,
    rng: &mut impl Rng,
) -> Result<usize> {
    let n = m.len();
    if k == 0 || k > n {
        return Err(Error::domain(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut buf = Vec::with_capacity(n);
    let mut count = 0;
    for i in 0..n {
        if to_x[i] == 0.0 {
            continue;
        }
        buf.clear();
        let x_pos = match placement {
            Placement::InPlace => {
                buf.extend_from_slice(m.row(i));
                buf[i] = to_x[i];
                i
            }
            Placement::Front => {
                buf.push(to_x[i]);
                buf.extend(m.row(i).iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &d)| d));
                0
            }
        };
        let sel = select_from_distances(&buf, k, policy, rng)?;
        if sel.indices.contains(&x_pos) {
            count += 1;
        }
    }
    Ok(count)
}

/// Outcome of a counting-bound check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub count: usize,
    pub bound: f64,
    pub ok: bool,
}

/// Checks `stone_count ≤ (k + 1)(δ + 1)` on a tie-free instance whose k-NN
/// radii all lie below `scale`.
///
/// Ties among the pairwise distances of `x, x_1, …, x_n` are reported as a
/// precondition error naming the two tying pairs (`x` is written as `x`,
/// sample points by 1-based index).
pub fn stone_bound_no_ties_check(
    sample: &LabelledSample,
    space: &Space,
    x: &Point,
    k: usize,
    delta: usize,
    scale: f64,
) -> Result<BoundCheck> {
    let n = sample.len();
    let m = DistanceMatrix::new(space, sample.points())?;
    let to_x = space.distances(x, sample.points())?;

    let name = |i: usize| if i == 0 { "x".to_string() } else { format!("x_{i}") };
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n + 1) / 2);
    for (i, &dx) in to_x.iter().enumerate() {
        pairs.push((dx, 0, i + 1));
        for j in i + 1..n {
            pairs.push((m.get(i, j), i + 1, j + 1));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
        let (d, a, b) = w[0];
        let (_, c, e) = w[1];
        return Err(Error::precondition(format!(
            "distance tie: d({}, {}) = d({}, {}) = {d:?}",
            name(a),
            name(b),
            name(c),
            name(e)
        )));
    }

    let mut buf = Vec::with_capacity(n);
    for i in 0..n {
        buf.clear();
        buf.extend_from_slice(m.row(i));
        buf[i] = to_x[i];
        let r = crate::knn_rule::kth_smallest(&buf, k)?;
        if r >= scale {
            return Err(Error::precondition(format!(
                "k-NN radius {r:?} of {} in the substituted sample is not below scale {scale}",
                name(i + 1)
            )));
        }
    }

    // without ties the policy is irrelevant and consumes nothing
    let mut unused = crate::rng::rng_from_seed(0);
    let count = count_with_matrix(&m, &to_x, k, TieBreakPolicy::IndexOrder, Placement::InPlace, &mut unused)?;
    let bound = ((k + 1) * (delta + 1)) as f64;
    Ok(BoundCheck {
        count,
        bound,
        ok: count as f64 <= bound,
    })
}
