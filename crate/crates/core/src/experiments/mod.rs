//! Seeded Monte Carlo runners: error curves, the Preiss counterexample, hub
//! growth and Stone-count sweeps. Every runner is a pure function of its
//! configuration; rows come back ordered by `(n, trial)` or `k` regardless
//! of how trials were scheduled across threads.
//!
//! Trial `t` at schedule position `i` draws from
//! `stream(seed, [i, t])`; see [`crate::rng::split_seed`].

mod csv_out;
mod hub;
mod stone;

pub use csv_out::{write_csv, CsvRecord};
pub use hub::{hub_growth_exact, run_hub_growth, HubGrowthRow};
pub use stone::{run_stone_sweep, simplex, StoneFamily, StoneSweepConfig, StoneSweepRow};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::knn_rule::{cover_hart_curve, CoverHartRow, KRule, KnnClassifier, LabelledSample, TieBreakPolicy};
use crate::metric_spaces::{Family, Point, Space, SpaceSpec};
use crate::rng::stream;
use crate::{Error, Result};

pub const DEFAULT_TRIALS: usize = 10;
pub const DEFAULT_TEST_SIZE: usize = 500;

/// One error-curve experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: SpaceSpec,
    pub n_schedule: Vec<usize>,
    #[serde(default)]
    pub k_rule: KRule,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_test_size")]
    pub test_size: usize,
    pub seed: u64,
    #[serde(default)]
    pub policy: TieBreakPolicy,
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_test_size() -> usize {
    DEFAULT_TEST_SIZE
}

impl ExperimentConfig {
    pub fn new(space: SpaceSpec, n_schedule: Vec<usize>, seed: u64) -> Self {
        ExperimentConfig {
            space,
            n_schedule,
            k_rule: KRule::default(),
            trials: DEFAULT_TRIALS,
            test_size: DEFAULT_TEST_SIZE,
            seed,
            policy: TieBreakPolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_schedule.is_empty() {
            return Err(Error::config("empty n schedule"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials must be >= 1"));
        }
        if self.test_size == 0 {
            return Err(Error::config("test size must be >= 1"));
        }
        for &n in &self.n_schedule {
            self.k_rule.k_for(n)?;
        }
        Ok(())
    }

    /// `(position, n, k, trial)` for every job in output order.
    fn jobs(&self) -> Result<Vec<(usize, usize, usize, usize)>> {
        let mut jobs = Vec::with_capacity(self.n_schedule.len() * self.trials);
        for (i, &n) in self.n_schedule.iter().enumerate() {
            let k = self.k_rule.k_for(n)?;
            jobs.extend((0..self.trials).map(|t| (i, n, k, t)));
        }
        Ok(jobs)
    }
}

/// One `(n, trial)` measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorCurveRow {
    pub n: usize,
    pub k: usize,
    pub trial: usize,
    pub empirical_error: f64,
    pub bayes_error: f64,
    pub aux_name: String,
    pub aux_value: f64,
}

pub const AUX_MAX_RADIUS: &str = "max_radius";
pub const AUX_CLASS1_MISSED: &str = "class1_predicted_0";

struct TrialOutcome {
    errors: usize,
    tests: usize,
    max_radius: f64,
    class1: usize,
    class1_missed: usize,
    min_class1_radius: f64,
}

fn run_trial(space: &Space, cfg: &ExperimentConfig, pos: usize, n: usize, k: usize, trial: usize) -> Result<TrialOutcome> {
    let mut rng = stream(cfg.seed, &[pos as u64, trial as u64]);
    let sample = LabelledSample::from_draws(space.sample_n(n, &mut rng)?);
    let tests = space.sample_n(cfg.test_size, &mut rng)?;
    let mut clf = KnnClassifier::new(&sample, space, k, cfg.policy)?;
    let mut out = TrialOutcome {
        errors: 0,
        tests: tests.len(),
        max_radius: 0.0,
        class1: 0,
        class1_missed: 0,
        min_class1_radius: f64::INFINITY,
    };
    for t in &tests {
        let (eta, sel) = clf.regression(&t.point, &mut rng)?;
        let predicted = crate::metric_spaces::threshold(eta);
        out.errors += usize::from(predicted != t.label);
        out.max_radius = out.max_radius.max(sel.radius);
        if t.label == 1 {
            out.class1 += 1;
            out.class1_missed += usize::from(predicted == 0);
            out.min_class1_radius = out.min_class1_radius.min(sel.radius);
        }
    }
    Ok(out)
}

fn labelled_space(cfg: &ExperimentConfig) -> Result<Space> {
    cfg.validate()?;
    let space = cfg.space.build()?;
    if !space.has_sampler() {
        return Err(Error::config(format!("the {} family has no sampler", space.tag())));
    }
    Ok(space)
}

/// Error curve of the k-NN classifier over the n schedule; the auxiliary
/// column is the largest k-NN radius over the trial's test points.
pub fn run_error_curve(cfg: &ExperimentConfig) -> Result<Vec<ErrorCurveRow>> {
    let space = labelled_space(cfg)?;
    let bayes = space.bayes_error()?;
    cfg.jobs()?
        .into_par_iter()
        .map(|(pos, n, k, trial)| {
            let o = run_trial(&space, cfg, pos, n, k, trial)?;
            Ok(ErrorCurveRow {
                n,
                k,
                trial,
                empirical_error: o.errors as f64 / o.tests as f64,
                bayes_error: bayes,
                aux_name: AUX_MAX_RADIUS.to_string(),
                aux_value: o.max_radius,
            })
        })
        .collect()
}

/// Error curve on a truncated Preiss space. The auxiliary column is the
/// fraction of class-1 test points predicted 0 (NaN if a trial drew none).
///
/// Fails with [`Error::Resolution`] if a class-1 test point's k-NN radius
/// drops below the truncation resolution, where the truncated space no
/// longer represents the infinite one.
pub fn run_preiss_inconsistency(cfg: &ExperimentConfig) -> Result<Vec<ErrorCurveRow>> {
    let space = labelled_space(cfg)?;
    let resolution = match space.family() {
        Family::Preiss(p) => p.resolution(),
        _ => return Err(Error::config(format!("expected a preiss space, got {}", space.tag()))),
    };
    cfg.jobs()?
        .into_par_iter()
        .map(|(pos, n, k, trial)| {
            let o = run_trial(&space, cfg, pos, n, k, trial)?;
            if o.min_class1_radius < resolution {
                return Err(Error::Resolution {
                    radius: o.min_class1_radius,
                    resolution,
                });
            }
            let missed = if o.class1 == 0 {
                f64::NAN
            } else {
                o.class1_missed as f64 / o.class1 as f64
            };
            Ok(ErrorCurveRow {
                n,
                k,
                trial,
                empirical_error: o.errors as f64 / o.tests as f64,
                bayes_error: 0.0,
                aux_name: AUX_CLASS1_MISSED.to_string(),
                aux_value: missed,
            })
        })
        .collect()
}

/// Cover–Hart curve: one fresh sample per scheduled `n`, test points drawn
/// once from the space's law (`test_size` of them) and shared by every `n`.
pub fn run_cover_hart(cfg: &ExperimentConfig) -> Result<Vec<CoverHartRow>> {
    let space = labelled_space(cfg)?;
    let tests: Vec<Point> = space
        .sample_n(cfg.test_size, &mut stream(cfg.seed, &[u64::MAX]))?
        .into_iter()
        .map(|d| d.point)
        .collect();
    cfg.n_schedule
        .par_iter()
        .enumerate()
        .map(|(pos, &n)| {
            let mut rng = stream(cfg.seed, &[pos as u64]);
            Ok(cover_hart_curve(&space, cfg.k_rule, &[n], &tests, &mut rng)?.remove(0))
        })
        .collect()
}

/// Per-`n` aggregate of an error curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorSummary {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub mean_error: f64,
    pub std_error: f64,
    pub median_error: f64,
    pub bayes_error: f64,
    pub mean_aux: f64,
}

/// Groups rows by `n` (in first-seen order) and summarises each group.
pub fn summarize(rows: &[ErrorCurveRow]) -> Vec<ErrorSummary> {
    let mut order: Vec<usize> = Vec::new();
    for r in rows {
        if !order.contains(&r.n) {
            order.push(r.n);
        }
    }
    order
        .into_iter()
        .map(|n| {
            let group: Vec<&ErrorCurveRow> = rows.iter().filter(|r| r.n == n).collect();
            let t = group.len() as f64;
            let errs: Vec<f64> = group.iter().map(|r| r.empirical_error).collect();
            let mean = errs.iter().sum::<f64>() / t;
            let var = if group.len() > 1 {
                errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (t - 1.0)
            } else {
                0.0
            };
            let mut sorted = errs.clone();
            sorted.sort_by(f64::total_cmp);
            let mid = sorted.len() / 2;
            let median = if sorted.len() % 2 == 1 {
                sorted[mid]
            } else {
                (sorted[mid - 1] + sorted[mid]) / 2.0
            };
            ErrorSummary {
                n,
                k: group[0].k,
                trials: group.len(),
                mean_error: mean,
                std_error: (var / t).sqrt(),
                median_error: median,
                bayes_error: group[0].bayes_error,
                mean_aux: group.iter().map(|r| r.aux_value).sum::<f64>() / t,
            }
        })
        .collect()
}

/// Number of places where the median error rises from one `n` to the next.
pub fn median_inversions(summary: &[ErrorSummary]) -> usize {
    summary.windows(2).filter(|w| w[1].median_error > w[0].median_error).count()
}
