//! Exhaustive search for dimension violations on finite point sets.
//!
//! A witness for `δ` at scale `s` is a centre `x` and `δ + 2` points of a
//! closed ball `B̄_r(x)`, `r < s`, such that every pair satisfies
//! `d(x_i, x_j) > max(d(x, x_i), d(x, x_j))`. A point set admits none
//! exactly when it has dimension at most `δ` on that scale.

use std::fmt;

use super::{BallSpec, Boundary, DistanceMatrix};
use crate::metric_spaces::{Point, Space};
use crate::{Error, Result};

/// Largest point set searched unless a larger cap is requested.
pub const DEFAULT_WITNESS_CAP: usize = 30;

#[derive(Clone, Debug, PartialEq)]
pub struct NagataWitness {
    pub center_index: usize,
    pub center: Point,
    pub indices: Vec<usize>,
    pub points: Vec<Point>,
    /// Smallest closed radius around the centre holding every witness point.
    pub radius: f64,
    /// `d(x, x_i)` for each witness point.
    pub center_distances: Vec<f64>,
    /// `(i, j, d(x_i, x_j))` for each pair of witness positions `i < j`.
    pub pair_distances: Vec<(usize, usize, f64)>,
}

impl fmt::Display for NagataWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "witness: {} points", self.indices.len())?;
        writeln!(f, "center: index {} point {:?}", self.center_index, self.center)?;
        writeln!(f, "radius: {:?}", self.radius)?;
        for (pos, (idx, p)) in self.indices.iter().zip(&self.points).enumerate() {
            writeln!(
                f,
                "x{}: index {} point {:?} d(x, x{}) = {:?}",
                pos + 1,
                idx,
                p,
                pos + 1,
                self.center_distances[pos]
            )?;
        }
        for &(i, j, d) in &self.pair_distances {
            let m = self.center_distances[i].max(self.center_distances[j]);
            writeln!(f, "d(x{}, x{}) = {:?} > max(d(x, x{}), d(x, x{})) = {:?}", i + 1, j + 1, d, i + 1, j + 1, m)?;
        }
        Ok(())
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::Resource {
            level: None,
            message: format!("witness search over {n} points exceeds cap {cap}"),
        });
    }
    Ok(())
}

fn check_scale(scale: f64) -> Result<()> {
    if !(scale > 0.0) {
        return Err(Error::domain(format!("scale {scale} must be positive")));
    }
    Ok(())
}

/// Points usable around centre `c`: distinct from it and strictly inside the scale.
fn candidates(m: &DistanceMatrix, c: usize, scale: f64) -> Vec<usize> {
    (0..m.len())
        .filter(|&i| i != c && m.get(c, i) > 0.0 && m.get(c, i) < scale)
        .collect()
}

#[inline]
fn spread(m: &DistanceMatrix, c: usize, i: usize, j: usize) -> bool {
    m.get(i, j) > m.get(c, i).max(m.get(c, j))
}

/// Extends `clique` to `target` vertices from `pool[from..]`, lexicographically first.
fn extend(m: &DistanceMatrix, c: usize, pool: &[usize], from: usize, clique: &mut Vec<usize>, target: usize) -> bool {
    if clique.len() == target {
        return true;
    }
    for pos in from..pool.len() {
        if pool.len() - pos < target - clique.len() {
            return false;
        }
        let v = pool[pos];
        if clique.iter().all(|&u| spread(m, c, u, v)) {
            clique.push(v);
            if extend(m, c, pool, pos + 1, clique, target) {
                return true;
            }
            clique.pop();
        }
    }
    false
}

/// First witness for `delta` over the matrix, by centre index then lexicographic order.
pub(crate) fn find_witness(m: &DistanceMatrix, delta: usize, scale: f64) -> Option<(usize, Vec<usize>)> {
    let target = delta + 2;
    for c in 0..m.len() {
        let pool = candidates(m, c, scale);
        let mut clique = Vec::with_capacity(target);
        if extend(m, c, &pool, 0, &mut clique, target) {
            return Some((c, clique));
        }
    }
    None
}

/// Searches `points` for a witness with the default size cap.
pub fn nagata_violation_witness(points: &[Point], space: &Space, delta: usize, scale: f64) -> Result<Option<NagataWitness>> {
    nagata_violation_witness_with_cap(points, space, delta, scale, DEFAULT_WITNESS_CAP)
}

pub fn nagata_violation_witness_with_cap(
    points: &[Point],
    space: &Space,
    delta: usize,
    scale: f64,
    cap: usize,
) -> Result<Option<NagataWitness>> {
    check_scale(scale)?;
    check_cap(points.len(), cap)?;
    let m = DistanceMatrix::new(space, points)?;
    Ok(find_witness(&m, delta, scale).map(|(c, indices)| {
        let center_distances: Vec<f64> = indices.iter().map(|&i| m.get(c, i)).collect();
        let mut pair_distances = Vec::new();
        for a in 0..indices.len() {
            for b in a + 1..indices.len() {
                pair_distances.push((a, b, m.get(indices[a], indices[b])));
            }
        }
        NagataWitness {
            center_index: c,
            center: points[c].clone(),
            points: indices.iter().map(|&i| points[i].clone()).collect(),
            radius: center_distances.iter().copied().fold(0.0, f64::max),
            indices,
            center_distances,
            pair_distances,
        }
    }))
}

/// Bron–Kerbosch with pivoting over an adjacency matrix; returns the maximum clique size.
fn max_clique(adj: &[Vec<bool>]) -> usize {
    fn recurse(adj: &[Vec<bool>], size: usize, p: Vec<usize>, mut x: Vec<usize>, best: &mut usize) {
        if p.is_empty() {
            if x.is_empty() {
                *best = (*best).max(size);
            }
            return;
        }
        if size + p.len() <= *best {
            return;
        }
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
            .unwrap();
        let mut p_rest = p.clone();
        for v in p.into_iter().filter(|&v| !adj[pivot][v]) {
            let np = p_rest.iter().copied().filter(|&w| adj[v][w]).collect();
            let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
            recurse(adj, size + 1, np, nx, best);
            p_rest.retain(|&w| w != v);
            x.push(v);
        }
    }
    let mut best = 0;
    recurse(adj, 0, (0..adj.len()).collect(), Vec::new(), &mut best);
    best
}

/// Smallest `δ` with no witness at `scale`, from the largest spread clique
/// over all centres.
pub fn nagata_dimension(points: &[Point], space: &Space, scale: f64, cap: usize) -> Result<usize> {
    check_scale(scale)?;
    check_cap(points.len(), cap)?;
    let m = DistanceMatrix::new(space, points)?;
    let mut omega = 0;
    for c in 0..m.len() {
        let pool = candidates(&m, c, scale);
        let adj: Vec<Vec<bool>> = pool
            .iter()
            .map(|&u| pool.iter().map(|&v| u != v && spread(&m, c, u, v)).collect())
            .collect();
        omega = omega.max(max_clique(&adj));
    }
    Ok(omega.saturating_sub(1))
}

/// Largest multiplicity, probed at the points themselves, of a disconnected
/// family of balls centred at the points with radii drawn from realised
/// distances below `scale`.
///
/// Every ball `(centre, radius)` containing a probe is a vertex; two balls
/// are adjacent when they have different centres and neither contains the
/// other's centre. The answer is the largest clique over all probes.
pub fn max_disconnected_multiplicity(points: &[Point], space: &Space, scale: f64, boundary: Boundary, cap: usize) -> Result<usize> {
    check_scale(scale)?;
    check_cap(points.len(), cap)?;
    let m = DistanceMatrix::new(space, points)?;
    let n = m.len();
    let mut radii: Vec<Vec<f64>> = Vec::with_capacity(n);
    for c in 0..n {
        let mut r: Vec<f64> = m.row(c).iter().copied().filter(|&d| d < scale).collect();
        r.sort_by(f64::total_cmp);
        r.dedup();
        radii.push(r);
    }
    let mut best = 0;
    for p in 0..n {
        let balls: Vec<BallSpec> = (0..n)
            .flat_map(|c| {
                radii[c].iter().map(move |&r| BallSpec {
                    center: c,
                    radius: r,
                    boundary,
                })
            })
            .filter(|b| b.admits(m.get(b.center, p)))
            .collect();
        let adj: Vec<Vec<bool>> = balls
            .iter()
            .map(|a| {
                balls
                    .iter()
                    .map(|b| {
                        let d = m.get(a.center, b.center);
                        a.center != b.center && !a.admits(d) && !b.admits(d)
                    })
                    .collect()
            })
            .collect();
        best = best.max(max_clique(&adj));
    }
    Ok(best)
}
