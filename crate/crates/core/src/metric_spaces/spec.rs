use serde::{Deserialize, Serialize};

use super::cantor::build_cantor_ties;
use super::l1::{l1_sum, Interval};
use super::point::Alphabet;
use super::preiss::build_preiss_params;
use super::sampler::{FirstSymbolLabels, UniformMixture};
use super::{CantorSpace, EuclideanSpace, Family, Space};
use crate::{Error, Result};

/// Serialisable description of a space: a `family` tag, its parameters and an
/// optional scale hint.
///
/// ```toml
/// family = "euclidean"
/// dim = 1
/// mixture = { class0 = [0.0, 1.0], class1 = [0.9, 1.9], prior1 = 0.5 }
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    #[serde(flatten)]
    pub family: FamilySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    Euclidean {
        #[serde(default = "one")]
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mixture: Option<UniformMixture>,
    },
    Ultrametric {
        alphabet: Alphabet,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<FirstSymbolLabels>,
    },
    CantorTies {
        delta: f64,
        base_schedule: Vec<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<FirstSymbolLabels>,
    },
    Preiss {
        #[serde(default = "default_levels")]
        levels: usize,
    },
    Hub,
    Chain {
        alpha: f64,
    },
    L1sum {
        left: Box<SpaceSpec>,
        #[serde(default = "Interval::unit")]
        interval: Interval,
    },
}

fn one() -> usize {
    1
}

fn default_levels() -> usize {
    12
}

impl SpaceSpec {
    pub fn new(family: FamilySpec) -> Self {
        SpaceSpec { family, scale: None }
    }

    pub fn build(&self) -> Result<Space> {
        let space = match &self.family {
            FamilySpec::Euclidean { dim, mixture } => {
                if *dim == 0 {
                    return Err(Error::config("euclidean dimension must be >= 1"));
                }
                if let Some(m) = mixture {
                    m.validate()?;
                }
                Space::new(Family::Euclidean(EuclideanSpace {
                    dim: *dim,
                    mixture: *mixture,
                }))
            }
            FamilySpec::Ultrametric { alphabet, eta } => {
                Space::new(Family::Ultrametric(CantorSpace::new(alphabet.clone(), eta.clone())?))
            }
            FamilySpec::CantorTies {
                delta,
                base_schedule,
                eta,
            } => {
                let (space, _) = build_cantor_ties(*delta, base_schedule)?;
                match (space.family(), eta) {
                    (Family::CantorTies(c), Some(eta)) => Space::new(Family::CantorTies(CantorSpace::new(
                        c.alphabet().clone(),
                        Some(eta.clone()),
                    )?)),
                    _ => space,
                }
            }
            FamilySpec::Preiss { levels } => Space::preiss(build_preiss_params(*levels)?),
            FamilySpec::Hub => Space::hub(),
            FamilySpec::Chain { alpha } => Space::chain(*alpha)?,
            FamilySpec::L1sum { left, interval } => {
                let interval = Interval::new(interval.lo, interval.hi)?;
                l1_sum(left.build()?, interval)
            }
        };
        match self.scale {
            Some(s) => space.with_scale(s),
            None => Ok(space),
        }
    }
}
