//! Exact distances and seeded samplers for the space families used by the
//! k-NN experiments: Euclidean space, Cantor products with the dyadic
//! ultrametric, the truncated Preiss embedding, the hub space, the α-chain
//! and ℓ¹ sums with an interval.

mod cantor;
mod l1;
mod point;
mod preiss;
mod sampler;
mod spec;

pub use cantor::{
    birthday_alphabet, build_cantor_ties, build_cantor_ties_with_cap, cover_failure_bound, level_risk,
    TieLevel, TieSchedule, DEFAULT_SCHEDULE_CAP,
};
pub use l1::{l1_sum, Interval, L1Witness};
pub use point::{Alphabet, Point, SeqPoint, Tail, MAX_COMPARISON_DEPTH};
pub use preiss::{build_preiss_params, preiss_alphabet_size, PreissParams};
pub(crate) use sampler::threshold;
pub use sampler::{FirstSymbolLabels, LabelledDraw, UniformMixture};
pub use spec::{FamilySpec, SpaceSpec};

use crate::{Error, Result};

/// Cantor product `Π [N_k]` with the dyadic ultrametric and an optional
/// labelling that depends on the first coordinate only.
#[derive(Clone, Debug, PartialEq)]
pub struct CantorSpace {
    alphabet: Alphabet,
    labels: Option<FirstSymbolLabels>,
}

impl CantorSpace {
    pub fn new(alphabet: Alphabet, labels: Option<FirstSymbolLabels>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.eta().len() as u64 != alphabet.size(0) {
                return Err(Error::config(format!(
                    "labelling has {} entries but the first alphabet has {} symbols",
                    l.eta().len(),
                    alphabet.size(0)
                )));
            }
        }
        Ok(CantorSpace { alphabet, labels })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn labels(&self) -> Option<&FirstSymbolLabels> {
        self.labels.as_ref()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EuclideanSpace {
    pub dim: usize,
    pub mixture: Option<UniformMixture>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Euclidean(EuclideanSpace),
    Ultrametric(CantorSpace),
    CantorTies(CantorSpace),
    Preiss(PreissParams),
    /// `x_1, x_2, ...` with `d(x_1, x_2) = 1` and `x_{n+1}` at distance `2^n`
    /// from every earlier point.
    Hub,
    /// `x_0, x_1, ...` with `d(x_i, x_j) = Σ_{k=1}^{max(i,j)} α^k`.
    Chain { alpha: f64 },
    /// ℓ¹ sum of the inner space with an interval.
    L1Sum(Box<Space>, Interval),
}

/// A metric space handle: family, parameters and the scale hint `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Space {
    family: Family,
    scale: f64,
}

impl Space {
    pub fn new(family: Family) -> Self {
        Space {
            family,
            scale: f64::INFINITY,
        }
    }

    pub fn euclidean(dim: usize) -> Self {
        Space::new(Family::Euclidean(EuclideanSpace { dim, mixture: None }))
    }

    /// The real line carrying a two-class uniform mixture.
    pub fn real_line_mixture(mixture: UniformMixture) -> Self {
        Space::new(Family::Euclidean(EuclideanSpace {
            dim: 1,
            mixture: Some(mixture),
        }))
    }

    pub fn ultrametric(alphabet: Alphabet) -> Self {
        Space::new(Family::Ultrametric(CantorSpace { alphabet, labels: None }))
    }

    pub fn labelled_ultrametric(alphabet: Alphabet, labels: FirstSymbolLabels) -> Result<Self> {
        Ok(Space::new(Family::Ultrametric(CantorSpace::new(alphabet, Some(labels))?)))
    }

    pub fn preiss(params: PreissParams) -> Self {
        Space::new(Family::Preiss(params))
    }

    pub fn hub() -> Self {
        Space::new(Family::Hub)
    }

    pub fn chain(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::config(format!("chain parameter α = {alpha} must lie in (0, 1)")));
        }
        Ok(Space::new(Family::Chain { alpha }))
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::config(format!("scale must be positive, got {scale}")));
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn tag(&self) -> &'static str {
        match self.family {
            Family::Euclidean(_) => "euclidean",
            Family::Ultrametric(_) => "ultrametric",
            Family::CantorTies(_) => "cantor-ties",
            Family::Preiss(_) => "preiss",
            Family::Hub => "hub",
            Family::Chain { .. } => "chain",
            Family::L1Sum(..) => "l1sum",
        }
    }

    /// Whether the family satisfies the strong triangle inequality.
    pub fn is_ultrametric(&self) -> bool {
        matches!(
            self.family,
            Family::Ultrametric(_) | Family::CantorTies(_) | Family::Hub | Family::Chain { .. }
        )
    }

    /// Exact distance between two points of this space.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        match (&self.family, p, q) {
            (Family::Euclidean(e), Point::Euclidean(a), Point::Euclidean(b)) => {
                if a.len() != e.dim || b.len() != e.dim {
                    return Err(Error::domain(format!(
                        "expected {}-dimensional vectors, got {} and {}",
                        e.dim,
                        a.len(),
                        b.len()
                    )));
                }
                if e.dim == 1 {
                    return Ok((a[0] - b[0]).abs());
                }
                Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
            }
            (Family::Ultrametric(c) | Family::CantorTies(c), Point::Seq(a), Point::Seq(b)) => {
                Ok(match a.common_prefix(b, &c.alphabet)? {
                    None => 0.0,
                    Some(j) => 0.5f64.powi(j as i32 + 1),
                })
            }
            (Family::Preiss(params), Point::Seq(a), Point::Seq(b)) => {
                if a.symbols.is_empty() && !a.is_infinite() || b.symbols.is_empty() && !b.is_infinite() {
                    return Err(Error::domain("Preiss atoms live on levels >= 1"));
                }
                preiss::preiss_pair(a, b, params.alphabet())
            }
            (Family::Hub, Point::Hub(i), Point::Hub(j)) => {
                if *i == 0 || *j == 0 {
                    return Err(Error::domain("hub points are indexed from 1"));
                }
                Ok(match (*i).max(*j) {
                    _ if i == j => 0.0,
                    2 => 1.0,
                    m => 2f64.powi((m - 1).min(i32::MAX as u64) as i32),
                })
            }
            (Family::Chain { alpha }, Point::Hub(i), Point::Hub(j)) => {
                if i == j {
                    return Ok(0.0);
                }
                let m = (*i).max(*j);
                Ok((1..=m).map(|k| alpha.powi(k as i32)).sum())
            }
            (Family::L1Sum(inner, interval), Point::Sum(a, s), Point::Sum(b, t)) => {
                if !interval.contains(*s) || !interval.contains(*t) {
                    return Err(Error::domain(format!(
                        "interval coordinates {s}, {t} outside [{}, {}]",
                        interval.lo, interval.hi
                    )));
                }
                Ok(inner.distance(a, b)? + (s - t).abs())
            }
            _ => Err(Error::domain(format!(
                "points of kind {} and {} do not belong to a {} space",
                p.kind(),
                q.kind(),
                self.tag()
            ))),
        }
    }

    /// Distances from `x` to each point of `points`, into `out`.
    pub fn distances_into(&self, x: &Point, points: &[Point], out: &mut Vec<f64>) -> Result<()> {
        out.clear();
        out.reserve(points.len());
        for p in points {
            out.push(self.distance(p, x)?);
        }
        Ok(())
    }

    pub fn distances(&self, x: &Point, points: &[Point]) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        self.distances_into(x, points, &mut out)?;
        Ok(out)
    }
}
