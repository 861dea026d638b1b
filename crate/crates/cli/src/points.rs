//! Point files: a space description plus points written as numeric arrays.
//!
//! ```toml
//! points = [[1, 2], [1, 3], [2, 1]]
//! [space]
//! family = "ultrametric"
//! alphabet = [3]
//! ```
//!
//! Coordinates are read per family: Euclidean coordinates; symbol sequences
//! (positive integers) for ultrametric, cantor-ties and preiss; a single
//! index for hub and chain; for an l1 sum, the left point's coordinates
//! followed by the interval coordinate.

use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use knnlab::metric_spaces::{Family, Point, Space, SpaceSpec};
use knnlab::nagata_geometry::Boundary;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointFile {
    pub space: SpaceSpec,
    pub points: Vec<Vec<f64>>,
    #[serde(default)]
    pub subset: Option<Vec<bool>>,
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub boundary: Boundary,
}

pub struct LoadedPoints {
    pub file: PointFile,
    pub space: Space,
    pub points: Vec<Point>,
}

pub fn load(path: &Path) -> Result<LoadedPoints> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: PointFile = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let space = file.space.build()?;
    let points = file
        .points
        .iter()
        .enumerate()
        .map(|(i, c)| to_point(&space, c).with_context(|| format!("point {i}")))
        .collect::<Result<_>>()?;
    Ok(LoadedPoints { file, space, points })
}

fn symbol(x: f64) -> Result<u64> {
    ensure!(x >= 1.0 && x.fract() == 0.0 && x < 2f64.powi(53), "symbol {x} is not a positive integer");
    Ok(x as u64)
}

fn to_point(space: &Space, coords: &[f64]) -> Result<Point> {
    Ok(match space.family() {
        Family::Euclidean(_) => Point::Euclidean(coords.to_vec()),
        Family::Ultrametric(_) | Family::CantorTies(_) | Family::Preiss(_) => {
            Point::finite_seq(coords.iter().map(|&x| symbol(x)).collect::<Result<_>>()?)
        }
        Family::Hub | Family::Chain { .. } => match coords {
            [i] if *i >= 0.0 && i.fract() == 0.0 => Point::Hub(*i as u64),
            _ => bail!("expected a single nonnegative integer index, got {coords:?}"),
        },
        Family::L1Sum(inner, _) => match coords.split_last() {
            Some((&t, rest)) if !rest.is_empty() => Point::Sum(Box::new(to_point(inner, rest)?), t),
            _ => bail!("an l1-sum point needs left coordinates and an interval coordinate"),
        },
    })
}
