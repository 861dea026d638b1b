use rand::Rng;
use serde::{Deserialize, Serialize};

use super::point::{Point, SeqPoint};
use super::{Family, Space};
use crate::{Error, Result};

/// Coordinates cached on sampled infinite sequences in Cantor spaces.
const CANTOR_MATERIALISED: usize = 24;
/// Extra coordinates cached past the truncation on sampled Preiss points.
const PREISS_EXTRA: usize = 4;

/// Heaviside convention: `η = 1/2` votes for label 1.
#[inline]
pub(crate) fn threshold(eta: f64) -> u8 {
    u8::from(eta >= 0.5)
}

/// Two-class mixture on the first coordinate: class 0 uniform on `class0`,
/// class 1 uniform on `class1`, class 1 drawn with probability `prior1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformMixture {
    pub class0: [f64; 2],
    pub class1: [f64; 2],
    pub prior1: f64,
}

impl UniformMixture {
    pub fn new(class0: [f64; 2], class1: [f64; 2], prior1: f64) -> Result<Self> {
        let m = UniformMixture { class0, class1, prior1 };
        m.validate()?;
        Ok(m)
    }

    /// Class 0 on `[0, 1]`, class 1 on `[0.9, 1.9]`, equal priors; Bayes error 0.05.
    pub fn overlap_default() -> Self {
        UniformMixture {
            class0: [0.0, 1.0],
            class1: [0.9, 1.9],
            prior1: 0.5,
        }
    }

    /// Both classes uniform on `[0, 1]`.
    pub fn unit_interval() -> Self {
        UniformMixture {
            class0: [0.0, 1.0],
            class1: [0.0, 1.0],
            prior1: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for [lo, hi] in [self.class0, self.class1] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::config(format!("mixture interval [{lo}, {hi}] is empty")));
            }
        }
        if !(0.0..=1.0).contains(&self.prior1) {
            return Err(Error::config(format!("class-1 prior {} outside [0, 1]", self.prior1)));
        }
        Ok(())
    }

    fn density(&self, x: f64) -> (f64, f64) {
        let uniform = |[lo, hi]: [f64; 2]| if (lo..=hi).contains(&x) { 1.0 / (hi - lo) } else { 0.0 };
        (
            (1.0 - self.prior1) * uniform(self.class0),
            self.prior1 * uniform(self.class1),
        )
    }

    /// Regression function `P[Y = 1 | X = x]` (0 off the support).
    pub fn eta(&self, x: f64) -> f64 {
        let (f0, f1) = self.density(x);
        if f0 + f1 == 0.0 {
            0.0
        } else {
            f1 / (f0 + f1)
        }
    }

    pub fn bayes_label(&self, x: f64) -> u8 {
        threshold(self.eta(x))
    }

    /// `∫ min(p0 f0, p1 f1) dx`: overlap length times the smaller weighted density.
    pub fn bayes_error(&self) -> f64 {
        let lo = self.class0[0].max(self.class1[0]);
        let hi = self.class0[1].min(self.class1[1]);
        if hi <= lo {
            return 0.0;
        }
        let w0 = (1.0 - self.prior1) / (self.class0[1] - self.class0[0]);
        let w1 = self.prior1 / (self.class1[1] - self.class1[0]);
        (hi - lo) * w0.min(w1)
    }

    fn draw(&self, rng: &mut impl Rng) -> (f64, u8) {
        let label = u8::from(rng.random::<f64>() < self.prior1);
        let [lo, hi] = if label == 1 { self.class1 } else { self.class0 };
        (rng.random_range(lo..hi), label)
    }
}

/// Labelling of a Cantor space by `η(σ) = eta[σ_1 − 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FirstSymbolLabels {
    eta: Vec<f64>,
}

impl FirstSymbolLabels {
    pub fn new(eta: Vec<f64>) -> Result<Self> {
        if eta.is_empty() || eta.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return Err(Error::config("labelling needs values in [0, 1], one per first symbol"));
        }
        Ok(FirstSymbolLabels { eta })
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// Bayes error under the uniform law of the first coordinate.
    pub fn bayes_error(&self) -> f64 {
        self.eta.iter().map(|e| e.min(1.0 - e)).sum::<f64>() / self.eta.len() as f64
    }
}

impl TryFrom<Vec<f64>> for FirstSymbolLabels {
    type Error = Error;

    fn try_from(eta: Vec<f64>) -> Result<Self> {
        FirstSymbolLabels::new(eta)
    }
}

impl From<FirstSymbolLabels> for Vec<f64> {
    fn from(l: FirstSymbolLabels) -> Self {
        l.eta
    }
}

/// One labelled draw together with the Bayes classifier's label at the point.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelledDraw {
    pub point: Point,
    pub label: u8,
    pub bayes_label: u8,
}

impl Space {
    pub fn has_sampler(&self) -> bool {
        matches!(
            self.family(),
            Family::Euclidean(_) | Family::Ultrametric(_) | Family::CantorTies(_) | Family::Preiss(_)
        )
    }

    /// Draws one labelled point from the space's law.
    pub fn sample(&self, rng: &mut impl Rng) -> Result<LabelledDraw> {
        match self.family() {
            Family::Euclidean(e) => {
                let mut coords: Vec<f64> = Vec::with_capacity(e.dim);
                let (first, label, bayes_label) = match &e.mixture {
                    Some(m) => {
                        let (x, y) = m.draw(rng);
                        (x, y, m.bayes_label(x))
                    }
                    None => (rng.random::<f64>(), 0, 0),
                };
                if e.dim > 0 {
                    coords.push(first);
                }
                coords.extend((1..e.dim).map(|_| rng.random::<f64>()));
                Ok(LabelledDraw {
                    point: Point::Euclidean(coords),
                    label,
                    bayes_label,
                })
            }
            Family::Ultrametric(c) | Family::CantorTies(c) => {
                let p = SeqPoint::lazy(rng.random(), CANTOR_MATERIALISED, c.alphabet());
                let (label, bayes_label) = match c.labels() {
                    Some(l) => {
                        let eta = l.eta()[(p.symbols[0] - 1) as usize];
                        (u8::from(rng.random::<f64>() < eta), threshold(eta))
                    }
                    None => (0, 0),
                };
                Ok(LabelledDraw {
                    point: Point::Seq(p),
                    label,
                    bayes_label,
                })
            }
            Family::Preiss(params) => {
                let z = params.normalizer();
                if rng.random::<f64>() * z < 1.0 {
                    let p = SeqPoint::lazy(rng.random(), params.levels() + PREISS_EXTRA, params.alphabet());
                    return Ok(LabelledDraw {
                        point: Point::Seq(p),
                        label: 1,
                        bayes_label: 1,
                    });
                }
                let probs = params.atom_level_probabilities();
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut level = probs.len();
                for (i, p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        level = i + 1;
                        break;
                    }
                }
                let symbols = (1..=level)
                    .map(|l| rng.random_range(1..=params.alphabet_size(l)))
                    .collect();
                Ok(LabelledDraw {
                    point: Point::Seq(SeqPoint::finite(symbols)),
                    label: 0,
                    bayes_label: 0,
                })
            }
            Family::Hub | Family::Chain { .. } | Family::L1Sum(..) => Err(Error::config(format!(
                "the {} family has no sampler; enumerate its points instead",
                self.tag()
            ))),
        }
    }

    pub fn sample_n(&self, n: usize, rng: &mut impl Rng) -> Result<Vec<LabelledDraw>> {
        (0..n).map(|_| self.sample(rng)).collect()
    }

    /// Closed-form Bayes error of the space's labelled law.
    pub fn bayes_error(&self) -> Result<f64> {
        match self.family() {
            Family::Euclidean(e) => Ok(e.mixture.map_or(0.0, |m| m.bayes_error())),
            Family::Ultrametric(c) | Family::CantorTies(c) => Ok(c.labels().map_or(0.0, |l| l.bayes_error())),
            Family::Preiss(_) => Ok(0.0),
            _ => Err(Error::config(format!("the {} family carries no labelled law", self.tag()))),
        }
    }
}
