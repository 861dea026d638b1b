//! Hub growth in the harmonic hub space `x_i = i`, where
//! `d(x_i, x_j) = 2^{max(i,j) − 1}` (and 1 when the larger index is 2).
//! Every earlier point ties as `x_i`'s nearest neighbour, so `x_1` is picked
//! with probability `1/(i − 1)` and its expected hub count over `n` points is
//! the harmonic number `H_{n−1}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::knn_rule::{inclusion_probability, select_from_distances, TieBreakPolicy};
use crate::metric_spaces::{Point, Space};
use crate::rng::stream;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HubGrowthRow {
    pub n: usize,
    pub mean_hub_count: f64,
    pub stderr: f64,
}

fn hub_points(n: usize) -> Vec<Point> {
    (1..=n as u64).map(Point::Hub).collect()
}

/// Distances from `x_i` (0-based `i`) to every other point of `points`.
fn others(space: &Space, points: &[Point], i: usize, buf: &mut Vec<f64>) -> Result<()> {
    buf.clear();
    for (j, p) in points.iter().enumerate() {
        if j != i {
            buf.push(space.distance(&points[i], p)?);
        }
    }
    Ok(())
}

/// Exact `E #{i ∈ 2..n : x_1 ∈ NN(x_i)}` under uniform tie-breaking with k = 1,
/// summed from per-point inclusion probabilities.
pub fn hub_growth_exact(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("hub growth needs n >= 2"));
    }
    let space = Space::hub();
    let points = hub_points(n);
    let mut buf = Vec::with_capacity(n);
    let mut total = 0.0;
    for i in 1..n {
        others(&space, &points, i, &mut buf)?;
        // x_1 sits at position 0 of the leave-one-out list
        total += inclusion_probability(&buf, 1, 0)?;
    }
    Ok(total)
}

/// Monte Carlo hub counts for every `n` in `2..=n_max`.
///
/// Points after `x_i` are farther from it than every earlier point, so
/// `x_i`'s nearest neighbour is the same in every sample `x_1..x_n` with
/// `n ≥ i`. Each trial therefore resolves one k = 1 query per point within
/// the full sample and reads off all counts as prefix sums.
pub fn run_hub_growth(n_max: usize, trials: usize, seed: u64) -> Result<Vec<HubGrowthRow>> {
    if n_max < 2 {
        return Err(Error::domain("hub growth needs n_max >= 2"));
    }
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    let space = Space::hub();
    let points = hub_points(n_max);
    let per_trial: Vec<Vec<u32>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, &[t as u64]);
            let mut buf = Vec::with_capacity(n_max);
            let mut counts = Vec::with_capacity(n_max - 1);
            let mut running = 0u32;
            for i in 1..n_max {
                others(&space, &points, i, &mut buf)?;
                let sel = select_from_distances(&buf, 1, TieBreakPolicy::UniformRandom, &mut rng)?;
                running += u32::from(sel.indices[0] == 0);
                counts.push(running);
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;
    let t = trials as f64;
    Ok((2..=n_max)
        .map(|n| {
            let xs = per_trial.iter().map(|c| f64::from(c[n - 2]));
            let mean = xs.clone().sum::<f64>() / t;
            let stderr = if trials > 1 {
                (xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1.0) / t).sqrt()
            } else {
                0.0
            };
            HubGrowthRow {
                n,
                mean_hub_count: mean,
                stderr,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(m: usize) -> f64 {
        (1..=m).map(|i| 1.0 / i as f64).sum()
    }

    #[test]
    fn exact_small_cases() {
        assert_eq!(hub_growth_exact(2).unwrap(), 1.0);
        assert_eq!(hub_growth_exact(3).unwrap(), 1.5);
        assert!((hub_growth_exact(100).unwrap() - harmonic(99)).abs() < 1e-12);
        assert!((harmonic(99) - 5.177).abs() < 1e-3);
    }

    #[test]
    fn monte_carlo_tracks_harmonic_numbers() {
        let rows = run_hub_growth(40, 2000, 7).unwrap();
        assert_eq!(rows.len(), 39);
        assert_eq!(rows[0], HubGrowthRow { n: 2, mean_hub_count: 1.0, stderr: 0.0 });
        for r in &rows[1..] {
            let h = harmonic(r.n - 1);
            assert!((r.mean_hub_count - h).abs() <= 4.0 * r.stderr, "{r:?} vs {h}");
        }
        assert_eq!(rows, run_hub_growth(40, 2000, 7).unwrap());
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(run_hub_growth(1, 10, 0).is_err());
        assert!(run_hub_growth(5, 0, 0).is_err());
        assert!(hub_growth_exact(1).is_err());
    }
}
