use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::knn_rule::{LabelledSample, TieBreakPolicy};
use crate::metric_spaces::{Alphabet, Point, Space, SpaceSpec};
use crate::nagata_geometry::{stone_count_with_placement, Placement};
use crate::rng::stream;
use crate::{Error, Result};

/// Where Stone-count instances come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StoneFamily {
    /// Sample points and `x` drawn i.i.d. from the space's law.
    Sampled { space: SpaceSpec },
    /// `n` equidistant points: `x` and `n − 1` sample points.
    Simplex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoneSweepConfig {
    pub family: StoneFamily,
    pub n: usize,
    pub k_list: Vec<usize>,
    #[serde(default = "super::default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub policy: TieBreakPolicy,
    #[serde(default)]
    pub placement: Placement,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StoneSweepRow {
    pub k: usize,
    pub max_count: usize,
    pub mean_count: f64,
}

/// `n` points pairwise at distance 1/2: a sample of `n − 1` one-symbol
/// sequences and `x`, the last symbol.
pub fn simplex(n: usize) -> Result<(LabelledSample, Space, Point)> {
    if n < 2 {
        return Err(Error::domain("a simplex instance needs at least 2 points"));
    }
    let n = n as u64;
    Ok((
        LabelledSample::unlabelled((1..n).map(|i| Point::finite_seq(vec![i])).collect()),
        Space::ultrametric(Alphabet::uniform(n)?),
        Point::finite_seq(vec![n]),
    ))
}

/// Per `k`: maximum and mean Stone count over `trials` fresh instances.
pub fn run_stone_sweep(cfg: &StoneSweepConfig) -> Result<Vec<StoneSweepRow>> {
    if cfg.trials == 0 {
        return Err(Error::config("trials must be >= 1"));
    }
    if cfg.k_list.is_empty() {
        return Err(Error::config("empty k list"));
    }
    let sampled = match &cfg.family {
        StoneFamily::Sampled { space } => {
            let space = space.build()?;
            if !space.has_sampler() {
                return Err(Error::config(format!("the {} family has no sampler", space.tag())));
            }
            Some(space)
        }
        StoneFamily::Simplex => None,
    };
    let sample_size = if sampled.is_some() { cfg.n } else { cfg.n.saturating_sub(1) };
    if let Some(&k) = cfg.k_list.iter().find(|&&k| k == 0 || k > sample_size) {
        return Err(Error::config(format!("k = {k} outside 1..={sample_size}")));
    }
    let fixed = if sampled.is_none() { Some(simplex(cfg.n)?) } else { None };

    let jobs: Vec<(usize, usize)> = (0..cfg.k_list.len())
        .flat_map(|i| (0..cfg.trials).map(move |t| (i, t)))
        .collect();
    let counts: Vec<usize> = jobs
        .into_par_iter()
        .map(|(i, t)| {
            let mut rng = stream(cfg.seed, &[i as u64, t as u64]);
            let k = cfg.k_list[i];
            match (&sampled, &fixed) {
                (Some(space), _) => {
                    let sample = LabelledSample::from_draws(space.sample_n(cfg.n, &mut rng)?);
                    let x = space.sample(&mut rng)?.point;
                    stone_count_with_placement(&sample, space, &x, k, cfg.policy, cfg.placement, &mut rng)
                }
                (None, Some((sample, space, x))) => {
                    stone_count_with_placement(sample, space, x, k, cfg.policy, cfg.placement, &mut rng)
                }
                (None, None) => unreachable!(),
            }
        })
        .collect::<Result<_>>()?;
    Ok(cfg
        .k_list
        .iter()
        .zip(counts.chunks(cfg.trials))
        .map(|(&k, c)| StoneSweepRow {
            k,
            max_count: c.iter().copied().max().unwrap_or(0),
            mean_count: c.iter().sum::<usize>() as f64 / c.len() as f64,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_spaces::FamilySpec;

    fn line(n: usize, k_list: Vec<usize>, trials: usize) -> StoneSweepConfig {
        StoneSweepConfig {
            family: StoneFamily::Sampled {
                space: SpaceSpec::new(FamilySpec::Euclidean { dim: 1, mixture: None }),
            },
            n,
            k_list,
            trials,
            policy: TieBreakPolicy::UniformRandom,
            placement: Placement::InPlace,
            seed: 13,
        }
    }

    #[test]
    fn uniform_line_within_cone_bound() {
        let rows = run_stone_sweep(&line(100, vec![1, 5], 100)).unwrap();
        for r in &rows {
            assert!(r.max_count <= 2 * r.k, "{r:?}");
            assert!(r.mean_count > 0.0);
        }
    }

    #[test]
    fn simplex_adversarial_and_uniform() {
        let mut cfg = StoneSweepConfig {
            family: StoneFamily::Simplex,
            n: 50,
            k_list: vec![1],
            trials: 5,
            policy: TieBreakPolicy::IndexOrder,
            placement: Placement::Front,
            seed: 0,
        };
        assert_eq!(run_stone_sweep(&cfg).unwrap()[0].max_count, 49);
        cfg.policy = TieBreakPolicy::UniformRandom;
        cfg.trials = 500;
        let r = run_stone_sweep(&cfg).unwrap()[0];
        assert!((r.mean_count - 1.0).abs() < 0.3, "{r:?}");
    }

    #[test]
    fn k_beyond_sample_rejected() {
        assert!(run_stone_sweep(&line(10, vec![11], 1)).is_err());
        let simplex_cfg = StoneSweepConfig {
            family: StoneFamily::Simplex,
            n: 10,
            k_list: vec![10],
            trials: 1,
            policy: TieBreakPolicy::IndexOrder,
            placement: Placement::InPlace,
            seed: 0,
        };
        assert!(run_stone_sweep(&simplex_cfg).is_err());
    }

    #[test]
    fn deterministic() {
        let cfg = line(50, vec![1, 3], 20);
        assert_eq!(run_stone_sweep(&cfg).unwrap(), run_stone_sweep(&cfg).unwrap());
    }

    #[test]
    fn config_from_toml() {
        let cfg: StoneSweepConfig = toml::from_str(
            r#"
            n = 50
            k_list = [1]
            policy = "index-order"
            placement = "front"
            seed = 3
            [family]
            kind = "simplex"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.family, StoneFamily::Simplex);
        assert_eq!(cfg.placement, Placement::Front);
        let sampled: StoneSweepConfig = toml::from_str(
            "n = 20\nk_list = [1, 2]\nseed = 1\n[family]\nkind = \"sampled\"\n[family.space]\nfamily = \"euclidean\"\n",
        )
        .unwrap();
        assert!(matches!(sampled.family, StoneFamily::Sampled { .. }));
    }
}
