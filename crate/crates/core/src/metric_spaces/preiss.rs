//! The truncated Preiss construction: a Cantor product `Q = Π [N_k]` embedded
//! in `ℓ²(Q*)` by `f(n̄) = Σ 2^{-i} e_{(n_1..n_i)}`, with the Haar image measure
//! labelled 1 and atoms on the finite prefixes labelled 0.

use super::point::{Alphabet, SeqPoint};
use crate::{Error, Result};

/// Alphabet recursion: `N_1 = 2`, `N_{k+1} = max(2, k^5)`.
pub fn preiss_alphabet_size(level: usize) -> u64 {
    assert!(level >= 1, "levels are 1-based");
    if level == 1 {
        return 2;
    }
    let k = (level - 1) as u64;
    k.saturating_pow(5).max(2)
}

/// Parameters `(N_k, a_k)` for levels `1..=K` and the normaliser `Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct PreissParams {
    alphabet_sizes: Vec<u64>,
    atom_weights: Vec<f64>,
    normalizer: f64,
    alphabet: Alphabet,
}

/// Builds parameters for `levels` levels with `a_k = k^{-2} / (N_1···N_k)`, so
/// that the level mass `b_k = a_k·|Q_k| = k^{-2}` is summable while
/// `b_k·N_{k+1}` grows without bound.
pub fn build_preiss_params(levels: usize) -> Result<PreissParams> {
    if levels < 2 {
        return Err(Error::domain(format!("Preiss construction needs K >= 2 levels, got {levels}")));
    }
    let alphabet_sizes: Vec<u64> = (1..=levels).map(preiss_alphabet_size).collect();
    let mut product = 1.0f64;
    let mut atom_weights = Vec::with_capacity(levels);
    for (i, &n) in alphabet_sizes.iter().enumerate() {
        product *= n as f64;
        let k = (i + 1) as f64;
        atom_weights.push(1.0 / (k * k) / product);
    }
    PreissParams::from_parts(alphabet_sizes, atom_weights)
}

impl PreissParams {
    /// Assembles parameters from explicit sizes and weights; the normaliser is
    /// `Z = 1 + Σ a_k·|Q_k|` (unit Haar mass plus the atomic mass).
    pub fn from_parts(alphabet_sizes: Vec<u64>, atom_weights: Vec<f64>) -> Result<Self> {
        if alphabet_sizes.len() != atom_weights.len() || alphabet_sizes.len() < 2 {
            return Err(Error::config("need matching N_k and a_k lists with K >= 2"));
        }
        if alphabet_sizes.iter().any(|&n| n < 2) {
            return Err(Error::config("alphabet sizes must be >= 2"));
        }
        if atom_weights.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::config("atom weights must be positive and finite"));
        }
        let levels = alphabet_sizes.len();
        let mut sizes = alphabet_sizes.clone();
        // a few extra levels so infinite tails keep growing before the last size repeats
        sizes.extend((levels + 1..=levels + 8).map(preiss_alphabet_size));
        let mut params = PreissParams {
            alphabet_sizes,
            atom_weights,
            normalizer: 0.0,
            alphabet: Alphabet::new(sizes)?,
        };
        params.normalizer = 1.0 + params.level_masses().iter().sum::<f64>();
        params.validate()?;
        Ok(params)
    }

    pub fn levels(&self) -> usize {
        self.alphabet_sizes.len()
    }

    pub fn alphabet_sizes(&self) -> &[u64] {
        &self.alphabet_sizes
    }

    pub fn atom_weights(&self) -> &[f64] {
        &self.atom_weights
    }

    /// `Z`; μ1 has mass 1 and μ0 mass `Z − 1` before normalisation.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Size of coordinate `level`'s alphabet (1-based). Past the truncation the
    /// recursion continues, so infinite points have well-defined tails.
    pub fn alphabet_size(&self, level: usize) -> u64 {
        self.alphabet_sizes
            .get(level - 1)
            .copied()
            .unwrap_or_else(|| preiss_alphabet_size(level))
    }

    /// `N_1···N_level` as a float (`1` for level 0).
    pub fn cell_count(&self, level: usize) -> f64 {
        (1..=level).map(|l| self.alphabet_size(l) as f64).product()
    }

    /// `b_k = a_k·|Q_k|`, the total μ0 mass at level k, for k = 1..=K.
    pub fn level_masses(&self) -> Vec<f64> {
        self.atom_weights
            .iter()
            .enumerate()
            .map(|(i, a)| a * self.cell_count(i + 1))
            .collect()
    }

    /// `a_k·N_1···N_k·N_{k+1}` for k = 1..=K; must diverge.
    pub fn growth_sequence(&self) -> Vec<f64> {
        self.level_masses()
            .iter()
            .enumerate()
            .map(|(i, b)| b * self.alphabet_size(i + 2) as f64)
            .collect()
    }

    /// Probability that a draw is an atom at `level`, conditional on drawing
    /// an atom.
    pub fn atom_level_probabilities(&self) -> Vec<f64> {
        let total = self.normalizer - 1.0;
        self.level_masses().iter().map(|b| b / total).collect()
    }

    /// Alphabet of the embedded product, extended past the truncation.
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Checks both defining conditions over the truncation: finite total mass
    /// equal to `Z − 1`, and `a_k·N_1···N_{k+1}` strictly increasing with the
    /// last value at least ten times the first (from three levels on).
    pub fn validate(&self) -> Result<()> {
        let masses = self.level_masses();
        let total: f64 = masses.iter().sum();
        if !total.is_finite() || self.normalizer <= 1.0 {
            return Err(Error::config(format!("normaliser Z = {} must exceed 1", self.normalizer)));
        }
        if ((self.normalizer - 1.0) - total).abs() > 1e-12 * total.max(1.0) {
            return Err(Error::config("normaliser does not match the atomic mass"));
        }
        let growth = self.growth_sequence();
        if let Some(w) = growth.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::config(format!(
                "a_k N_1..N_(k+1) must increase strictly; fails between levels {} and {}",
                w + 1,
                w + 2
            )));
        }
        if self.levels() >= 3 && growth[growth.len() - 1] < 10.0 * growth[0] {
            return Err(Error::config("a_k N_1..N_(k+1) grows by less than 10x over the truncation"));
        }
        Ok(())
    }

    /// Closed-form masses `(μ1, μ0)` (unnormalised) of the closed ball of
    /// squared radius `4^{-k}/3` around an infinite point: the ball holds the
    /// Haar cylinder of depth `k+1`, the path atom at level `k`, and every
    /// atom of level `> k` sharing the first `k+1` coordinates.
    pub fn ball_masses(&self, level: usize) -> (f64, f64) {
        assert!((1..=self.levels()).contains(&level));
        let cells = self.cell_count(level + 1);
        let mu1 = 1.0 / cells;
        let deeper: f64 = self.level_masses()[level..].iter().sum();
        let mu0 = self.atom_weights[level - 1] + deeper / cells;
        (mu1, mu0)
    }

    /// The domination bound `(N_1···N_{k+1})^{-1} / a_k`.
    pub fn ratio_bound(&self, level: usize) -> f64 {
        1.0 / (self.cell_count(level + 1) * self.atom_weights[level - 1])
    }

    /// Squared radius at which level-K atoms sit from their infinite
    /// continuations; k-NN radii at or below it see the truncation.
    pub fn resolution(&self) -> f64 {
        (4f64.powi(-(self.levels() as i32)) / 3.0).sqrt()
    }
}

/// Distance between two points of the Preiss embedding, from the common prefix
/// length `j` and the levels (`None` = infinite).
pub(crate) fn preiss_distance(j: usize, level_p: Option<usize>, level_q: Option<usize>) -> f64 {
    let q4 = |e: usize| 4f64.powi(-(e.min(i32::MAX as usize) as i32));
    let tail = |level: Option<usize>| level.map_or(0.0, q4);
    let sq = (2.0 * q4(j) - tail(level_p) - tail(level_q)) / 3.0;
    sq.max(0.0).sqrt()
}

pub(crate) fn preiss_pair(p: &SeqPoint, q: &SeqPoint, alphabet: &Alphabet) -> Result<f64> {
    let level = |s: &SeqPoint| (!s.is_infinite()).then_some(s.symbols.len());
    match p.common_prefix(q, alphabet)? {
        None => Ok(0.0),
        Some(j) => Ok(preiss_distance(j, level(p), level(q))),
    }
}
