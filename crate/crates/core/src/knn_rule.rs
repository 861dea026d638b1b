//! The k-NN learning rule: k-NN radius, tie-aware neighbour selection, the
//! empirical regression function and the majority-vote classifier.
//!
//! Every search is an exact brute-force scan over the sample. Points are
//! tracked by index, so repeated point values are distinct sample members.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::metric_spaces::{LabelledDraw, Point, Space};
use crate::metric_spaces::threshold as sampler_threshold;
use crate::{Error, Result};

/// How slots left over on the k-NN sphere are filled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreakPolicy {
    /// Smallest sample indices first. Consumes no randomness.
    IndexOrder,
    /// A uniformly random subset of the tying sphere.
    #[default]
    UniformRandom,
}

/// Ordered labelled sample. Order matters for [`TieBreakPolicy::IndexOrder`].
#[derive(Clone, Debug, PartialEq)]
pub struct LabelledSample {
    points: Vec<Point>,
    labels: Vec<u8>,
    seed: Option<u64>,
}

impl LabelledSample {
    pub fn new(points: Vec<Point>, labels: Vec<u8>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::domain(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::domain("labels must be 0 or 1"));
        }
        Ok(LabelledSample {
            points,
            labels,
            seed: None,
        })
    }

    /// Sample with every label set to 0, for purely geometric queries.
    pub fn unlabelled(points: Vec<Point>) -> Self {
        let labels = vec![0; points.len()];
        LabelledSample {
            points,
            labels,
            seed: None,
        }
    }

    pub fn from_draws(draws: Vec<LabelledDraw>) -> Self {
        let (points, labels) = draws.into_iter().map(|d| (d.point, d.label)).unzip();
        LabelledSample {
            points,
            labels,
            seed: None,
        }
    }

    /// Records the generator seed the sample was drawn with.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Result of a k-NN query.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighbourSelection {
    /// Exactly `k` distinct sample indices: the open ball in index order, then
    /// the chosen sphere points in index order.
    pub indices: Vec<usize>,
    pub radius: f64,
    /// Number of sample points at distance exactly `radius`.
    pub sphere_tie_count: usize,
    /// Number of sample points strictly inside `radius`.
    pub open_ball_count: usize,
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("empty sample"));
    }
    if k == 0 || k > n {
        return Err(Error::domain(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    Ok(())
}

/// k-th smallest value of `distances`: `min{r : #{i : d_i <= r} >= k}`.
pub fn kth_smallest(distances: &[f64], k: usize) -> Result<f64> {
    check_k(distances.len(), k)?;
    let mut scratch = distances.to_vec();
    let (_, r, _) = scratch.select_nth_unstable_by(k - 1, f64::total_cmp);
    Ok(*r)
}

/// k-NN selection from precomputed distances (`distances[i] = d(x_i, x)`).
pub fn select_from_distances(
    distances: &[f64],
    k: usize,
    policy: TieBreakPolicy,
    rng: &mut impl Rng,
) -> Result<NeighbourSelection> {
    let radius = kth_smallest(distances, k)?;
    let mut indices = Vec::with_capacity(k);
    let mut sphere = Vec::new();
    for (i, &d) in distances.iter().enumerate() {
        if d < radius {
            indices.push(i);
        } else if d == radius {
            sphere.push(i);
        }
    }
    let open_ball_count = indices.len();
    let missing = k - open_ball_count;
    match policy {
        TieBreakPolicy::IndexOrder => indices.extend_from_slice(&sphere[..missing]),
        TieBreakPolicy::UniformRandom => {
            if missing == sphere.len() {
                indices.extend_from_slice(&sphere);
            } else {
                let mut chosen: Vec<usize> = index::sample(rng, sphere.len(), missing)
                    .into_iter()
                    .map(|j| sphere[j])
                    .collect();
                chosen.sort_unstable();
                indices.extend(chosen);
            }
        }
    }
    Ok(NeighbourSelection {
        indices,
        radius,
        sphere_tie_count: sphere.len(),
        open_ball_count,
    })
}

/// Probability that sample index `idx` is among the k nearest neighbours
/// under [`TieBreakPolicy::UniformRandom`].
pub fn inclusion_probability(distances: &[f64], k: usize, idx: usize) -> Result<f64> {
    let radius = kth_smallest(distances, k)?;
    let d = distances[idx];
    if d < radius {
        return Ok(1.0);
    }
    if d > radius {
        return Ok(0.0);
    }
    let open = distances.iter().filter(|&&e| e < radius).count();
    let sphere = distances.iter().filter(|&&e| e == radius).count();
    Ok((k - open) as f64 / sphere as f64)
}

/// Smallest radius of a closed ball around `x` holding at least `k` sample points.
pub fn knn_radius(sample: &LabelledSample, space: &Space, x: &Point, k: usize) -> Result<f64> {
    check_k(sample.len(), k)?;
    kth_smallest(&space.distances(x, sample.points())?, k)
}

pub fn knn_select(
    sample: &LabelledSample,
    space: &Space,
    x: &Point,
    k: usize,
    policy: TieBreakPolicy,
    rng: &mut impl Rng,
) -> Result<NeighbourSelection> {
    check_k(sample.len(), k)?;
    select_from_distances(&space.distances(x, sample.points())?, k, policy, rng)
}

/// Mean label over the selected neighbours, `η_{n,k}(x)`.
pub fn empirical_regression(
    sample: &LabelledSample,
    space: &Space,
    x: &Point,
    k: usize,
    policy: TieBreakPolicy,
    rng: &mut impl Rng,
) -> Result<f64> {
    let sel = knn_select(sample, space, x, k, policy, rng)?;
    Ok(mean_label(sample.labels(), &sel.indices))
}

/// Majority vote with voting ties resolved to 1.
pub fn classify(
    sample: &LabelledSample,
    space: &Space,
    x: &Point,
    k: usize,
    policy: TieBreakPolicy,
    rng: &mut impl Rng,
) -> Result<u8> {
    Ok(sampler_threshold(empirical_regression(sample, space, x, k, policy, rng)?))
}

fn mean_label(labels: &[u8], indices: &[usize]) -> f64 {
    let ones: usize = indices.iter().map(|&i| labels[i] as usize).sum();
    ones as f64 / indices.len() as f64
}

/// A k-NN classifier bound to a sample that reuses one distance buffer
/// across queries.
#[derive(Debug)]
pub struct KnnClassifier<'a> {
    sample: &'a LabelledSample,
    space: &'a Space,
    k: usize,
    policy: TieBreakPolicy,
    buffer: Vec<f64>,
}

impl<'a> KnnClassifier<'a> {
    pub fn new(sample: &'a LabelledSample, space: &'a Space, k: usize, policy: TieBreakPolicy) -> Result<Self> {
        check_k(sample.len(), k)?;
        Ok(KnnClassifier {
            sample,
            space,
            k,
            policy,
            buffer: Vec::with_capacity(sample.len()),
        })
    }

    pub fn select(&mut self, x: &Point, rng: &mut impl Rng) -> Result<NeighbourSelection> {
        self.space.distances_into(x, self.sample.points(), &mut self.buffer)?;
        select_from_distances(&self.buffer, self.k, self.policy, rng)
    }

    pub fn regression(&mut self, x: &Point, rng: &mut impl Rng) -> Result<(f64, NeighbourSelection)> {
        let sel = self.select(x, rng)?;
        Ok((mean_label(self.sample.labels(), &sel.indices), sel))
    }

    pub fn classify(&mut self, x: &Point, rng: &mut impl Rng) -> Result<u8> {
        Ok(sampler_threshold(self.regression(x, rng)?.0))
    }
}

/// Neighbour count as a function of the sample size.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KRule {
    /// `⌈√n⌉`
    #[default]
    Sqrt,
    /// `⌈n^e⌉`
    Power(f64),
    Fixed(usize),
}

impl KRule {
    pub fn k_for(&self, n: usize) -> Result<usize> {
        let k = match *self {
            KRule::Sqrt => (n as f64).sqrt().ceil() as usize,
            KRule::Power(e) => {
                if !(e > 0.0 && e <= 1.0) {
                    return Err(Error::config(format!("power rule exponent {e} outside (0, 1]")));
                }
                (n as f64).powf(e).ceil() as usize
            }
            KRule::Fixed(k) => k,
        };
        check_k(n, k).map_err(|_| Error::config(format!("k rule gives k = {k} for n = {n}")))?;
        Ok(k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoverHartRow {
    pub n: usize,
    pub k: usize,
    pub max_radius: f64,
}

/// For each `n`, draws a fresh `n`-sample and records the largest k-NN radius
/// over `test_points`.
pub fn cover_hart_curve(
    space: &Space,
    k_rule: KRule,
    ns: &[usize],
    test_points: &[Point],
    rng: &mut impl Rng,
) -> Result<Vec<CoverHartRow>> {
    if test_points.is_empty() {
        return Err(Error::domain("no test points"));
    }
    let mut rows = Vec::with_capacity(ns.len());
    let mut buffer = Vec::new();
    for &n in ns {
        let k = k_rule.k_for(n)?;
        let sample = LabelledSample::from_draws(space.sample_n(n, rng)?);
        let mut max_radius = 0.0f64;
        for x in test_points {
            space.distances_into(x, sample.points(), &mut buffer)?;
            max_radius = max_radius.max(kth_smallest(&buffer, k)?);
        }
        rows.push(CoverHartRow { n, k, max_radius });
    }
    Ok(rows)
}
