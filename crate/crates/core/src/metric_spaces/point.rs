use serde::{Deserialize, Serialize};

use crate::rng::lazy_symbol;

/// Maximum number of coordinates compared between two lazy sequences before
/// giving up with [`crate::Error::DepthExhausted`].
pub const MAX_COMPARISON_DEPTH: usize = 1_000_000;

/// A point of one of the supported space families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Euclidean(Vec<f64>),
    Seq(SeqPoint),
    /// Index into a countable space (`hub`: `i >= 1`, `chain`: `i >= 0`).
    Hub(u64),
    /// Point of an ℓ¹ sum: a point of the left space and an interval coordinate.
    Sum(Box<Point>, f64),
}

impl Point {
    pub fn real(x: f64) -> Self {
        Point::Euclidean(vec![x])
    }

    pub fn finite_seq(symbols: Vec<u64>) -> Self {
        Point::Seq(SeqPoint::finite(symbols))
    }

    pub(crate) fn kind(&self) -> &'static str {
        match self {
            Point::Euclidean(_) => "euclidean",
            Point::Seq(_) => "seq",
            Point::Hub(_) => "hub",
            Point::Sum(..) => "sum",
        }
    }
}

/// Tail of a symbol sequence past its materialised prefix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// The sequence ends after its prefix.
    #[default]
    Finite,
    /// Infinite sequence; coordinate `i` past the prefix is a pure function of
    /// `(seed, i)`.
    Lazy { seed: u64 },
}

/// A finite or lazily generated infinite sequence over per-coordinate
/// alphabets `[N_1] x [N_2] x ...`, symbols 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeqPoint {
    pub symbols: Vec<u64>,
    #[serde(default)]
    pub tail: Tail,
}

impl SeqPoint {
    pub fn finite(symbols: Vec<u64>) -> Self {
        SeqPoint {
            symbols,
            tail: Tail::Finite,
        }
    }

    /// Infinite sequence generated from `seed`, with the first `materialise`
    /// coordinates cached.
    pub fn lazy(seed: u64, materialise: usize, alphabet: &Alphabet) -> Self {
        let symbols = (0..materialise)
            .map(|i| lazy_symbol(seed, i, alphabet.size(i)))
            .collect();
        SeqPoint {
            symbols,
            tail: Tail::Lazy { seed },
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.tail, Tail::Lazy { .. })
    }

    /// Coordinate `i` (0-based), or `None` past the end of a finite sequence.
    #[inline]
    pub fn symbol(&self, i: usize, alphabet: &Alphabet) -> Option<u64> {
        match self.symbols.get(i) {
            Some(&s) => Some(s),
            None => match self.tail {
                Tail::Finite => None,
                Tail::Lazy { seed } => Some(lazy_symbol(seed, i, alphabet.size(i))),
            },
        }
    }

    /// Number of leading coordinates on which the two sequences agree, capped
    /// at the shorter length. `Ok(None)` means the sequences are identical.
    pub fn common_prefix(&self, other: &SeqPoint, alphabet: &Alphabet) -> crate::Result<Option<usize>> {
        if let (Tail::Lazy { seed: a }, Tail::Lazy { seed: b }) = (self.tail, other.tail) {
            if a == b {
                return Ok(None);
            }
        }
        for i in 0..MAX_COMPARISON_DEPTH {
            match (self.symbol(i, alphabet), other.symbol(i, alphabet)) {
                (None, None) => return Ok(None),
                (Some(x), Some(y)) if x == y => continue,
                _ => return Ok(Some(i)),
            }
        }
        Err(crate::Error::DepthExhausted {
            depth: MAX_COMPARISON_DEPTH,
        })
    }
}

/// Per-coordinate alphabet sizes; coordinates past the explicit list reuse the
/// last size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Alphabet {
    sizes: Vec<u64>,
}

impl Alphabet {
    pub fn new(sizes: Vec<u64>) -> crate::Result<Self> {
        if sizes.is_empty() {
            return Err(crate::Error::config("alphabet needs at least one size"));
        }
        if let Some(pos) = sizes.iter().position(|&n| n < 2) {
            return Err(crate::Error::config(format!(
                "alphabet size at coordinate {} is {}, must be >= 2",
                pos + 1,
                sizes[pos]
            )));
        }
        Ok(Alphabet { sizes })
    }

    pub fn uniform(size: u64) -> crate::Result<Self> {
        Self::new(vec![size])
    }

    #[inline]
    pub fn size(&self, i: usize) -> u64 {
        *self.sizes.get(i).unwrap_or_else(|| self.sizes.last().expect("nonempty"))
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    /// Checks `symbols[i] ∈ 1..=N_i` for every materialised coordinate.
    pub fn check(&self, p: &SeqPoint) -> crate::Result<()> {
        for (i, &s) in p.symbols.iter().enumerate() {
            if s == 0 || s > self.size(i) {
                return Err(crate::Error::domain(format!(
                    "symbol {s} at coordinate {} outside [1, {}]",
                    i + 1,
                    self.size(i)
                )));
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<u64>> for Alphabet {
    type Error = crate::Error;

    fn try_from(sizes: Vec<u64>) -> crate::Result<Self> {
        Alphabet::new(sizes)
    }
}

impl From<Alphabet> for Vec<u64> {
    fn from(a: Alphabet) -> Self {
        a.sizes
    }
}
