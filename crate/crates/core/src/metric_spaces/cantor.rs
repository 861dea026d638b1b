//! Cantor product spaces `Π [N_k]` with the ultrametric
//! `d(σ, τ) = 2^{-min{i : σ_i ≠ τ_i}}`, and the recursive schedule that makes
//! distance ties among k-NN candidates overwhelmingly likely.

use serde::{Deserialize, Serialize};

use super::point::Alphabet;
use super::{Family, Space};
use crate::{Error, Result};

/// Default cap on any alphabet size or draw count in a tie schedule.
pub const DEFAULT_SCHEDULE_CAP: u64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TieLevel {
    /// `n_k`: sample size at which level k is exercised.
    pub draws: u64,
    /// `N_k`: alphabet size of coordinate k.
    pub alphabet: u64,
    /// `δ_k`: failure budget spent on level k (twice: distinctness and cover).
    pub risk: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TieSchedule {
    pub delta: f64,
    pub levels: Vec<TieLevel>,
}

/// Risk budget `δ_k = δ·2^{-(k+1)}`, so that `2·Σ δ_k = δ`.
pub fn level_risk(delta: f64, level: usize) -> f64 {
    delta * 0.5f64.powi(level as i32 + 1)
}

/// Smallest `N` with `n²/(2N) <= risk`: by the birthday bound, `n` uniform
/// draws from `[N]` are then pairwise distinct with probability `> 1 − risk`.
pub fn birthday_alphabet(draws: u64, risk: f64) -> f64 {
    ((draws as f64).powi(2) / (2.0 * risk)).ceil().max(2.0)
}

/// Union-Chernoff upper bound on the probability that some of `cells` equally
/// likely cells receives fewer than `min_hits` of `draws` uniform draws:
/// `cells · exp(−(λ − t)² / 2λ)` with `λ = draws / cells`, `t = min_hits`.
pub fn cover_failure_bound(draws: u64, cells: f64, min_hits: u64) -> f64 {
    let lambda = draws as f64 / cells;
    let t = min_hits as f64;
    if lambda <= t {
        return 1.0;
    }
    (cells * (-(lambda - t).powi(2) / (2.0 * lambda)).exp()).min(1.0)
}

/// Smallest `n >= floor` whose cover failure bound is below `risk`.
fn cover_draws(floor: u64, cells: f64, min_hits: u64, risk: f64, cap: u64, level: usize) -> Result<u64> {
    let ok = |n: u64| cover_failure_bound(n, cells, min_hits) < risk;
    let mut hi = floor.max(1);
    while !ok(hi) {
        if hi >= cap {
            return Err(Error::Resource {
                level: Some(level),
                message: format!("draw count n_{level} would exceed the cap {cap}"),
            });
        }
        hi = hi.saturating_mul(2).min(cap);
    }
    let mut lo = floor.max(1);
    if ok(lo) {
        return Ok(lo);
    }
    // invariant: !ok(lo), ok(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Builds the tie schedule for risk `delta` over the strictly increasing
/// `base_schedule` (`n'_k`), with the default size cap.
pub fn build_cantor_ties(delta: f64, base_schedule: &[u64]) -> Result<(Space, TieSchedule)> {
    build_cantor_ties_with_cap(delta, base_schedule, DEFAULT_SCHEDULE_CAP)
}

pub fn build_cantor_ties_with_cap(delta: f64, base_schedule: &[u64], cap: u64) -> Result<(Space, TieSchedule)> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("risk δ = {delta} must lie in (0, 1)")));
    }
    if base_schedule.is_empty() || base_schedule[0] == 0 {
        return Err(Error::domain("base schedule must start with a positive n'_1"));
    }
    if base_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("base schedule must be strictly increasing"));
    }

    let mut levels: Vec<TieLevel> = Vec::with_capacity(base_schedule.len());
    let mut draws = base_schedule[0];
    let mut cells = 1.0f64;
    for level in 1..=base_schedule.len() {
        let risk = level_risk(delta, level);
        let alphabet = birthday_alphabet(draws, risk);
        if alphabet > cap as f64 {
            return Err(Error::Resource {
                level: Some(level),
                message: format!("alphabet N_{level} = {alphabet:e} exceeds the cap {cap}"),
            });
        }
        let alphabet = alphabet as u64;
        levels.push(TieLevel { draws, alphabet, risk });
        cells *= alphabet as f64;
        if level < base_schedule.len() {
            let floor = base_schedule[level].max(draws + 1);
            draws = cover_draws(floor, cells, draws, risk, cap, level + 1)?;
        }
    }

    let alphabet = Alphabet::new(levels.iter().map(|l| l.alphabet).collect())?;
    let space = Space::new(Family::CantorTies(super::CantorSpace::new(alphabet, None)?));
    Ok((space, TieSchedule { delta, levels }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn exact_distinct_probability(n: u64, alphabet: u64) -> f64 {
        (0..n).map(|i| 1.0 - i as f64 / alphabet as f64).product()
    }

    #[test]
    fn first_level_by_birthday_bound() {
        let (_, s) = build_cantor_ties(0.5, &[2, 3]).unwrap();
        assert_eq!(s.levels[0].risk, 0.125);
        assert_eq!(s.levels[0].draws, 2);
        assert_eq!(s.levels[0].alphabet, 16);
        // exact collision probability is within budget
        assert!(1.0 - exact_distinct_probability(2, 16) < 0.125);
    }

    #[test]
    fn distinctness_by_monte_carlo() {
        let (_, s) = build_cantor_ties(0.5, &[5, 6]).unwrap();
        let TieLevel { draws, alphabet, risk } = s.levels[0];
        let mut rng = rng_from_seed(11);
        let trials = 10_000;
        let mut distinct = 0;
        for _ in 0..trials {
            let mut seen: Vec<u64> = (0..draws).map(|_| rng.random_range(1..=alphabet)).collect();
            seen.sort_unstable();
            seen.dedup();
            distinct += usize::from(seen.len() as u64 == draws);
        }
        assert!(distinct as f64 / trials as f64 >= 1.0 - risk);
    }

    #[test]
    fn cover_condition_by_monte_carlo() {
        let (_, s) = build_cantor_ties(0.5, &[2, 3]).unwrap();
        let cells = s.levels[0].alphabet;
        let need = s.levels[0].draws;
        let draws = s.levels[1].draws;
        assert!(cover_failure_bound(draws, cells as f64, need) < s.levels[0].risk);
        let mut rng = rng_from_seed(3);
        let mut ok = 0;
        for _ in 0..2000 {
            let mut hits = vec![0u64; cells as usize];
            for _ in 0..draws {
                hits[rng.random_range(0..cells as usize)] += 1;
            }
            ok += usize::from(hits.iter().all(|&h| h >= need));
        }
        assert!(ok as f64 / 2000.0 >= 1.0 - s.levels[0].risk);
    }

    #[test]
    fn single_level_schedule_is_accepted() {
        let (space, s) = build_cantor_ties(0.2, &[4]).unwrap();
        assert_eq!(s.levels.len(), 1);
        assert!(space.is_ultrametric());
    }

    #[test]
    fn schedule_validation() {
        assert!(build_cantor_ties(0.0, &[2]).is_err());
        assert!(build_cantor_ties(1.0, &[2]).is_err());
        assert!(build_cantor_ties(0.5, &[]).is_err());
        assert!(build_cantor_ties(0.5, &[3, 3]).is_err());
    }

    #[test]
    fn cap_reports_offending_level() {
        match build_cantor_ties_with_cap(0.5, &[2, 3, 4, 5], 10_000) {
            Err(Error::Resource { level: Some(l), .. }) => assert!(l >= 2),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn risks_sum_to_half_delta() {
        let total: f64 = (1..60).map(|k| level_risk(0.3, k)).sum();
        assert!((2.0 * total - 0.3).abs() < 1e-12);
    }
}
