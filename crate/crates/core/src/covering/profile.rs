use std::fmt;

use crate::error::{Error, Result};

/// Where a bracket came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundMethod {
    /// Farthest-point radius above, separated-set certificates below.
    GreedyPacking,
    /// Exact value (oracle or exhaustive search).
    Exact,
    /// Closed-form diagonal-operator bounds.
    CarlStephani,
    /// Geometric majorant fitted to measured upper bounds.
    GeometricMajorant,
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::GreedyPacking => "greedy-packing",
            Self::Exact => "exact",
            Self::CarlStephani => "carl-stephani",
            Self::GeometricMajorant => "geometric-majorant",
        })
    }
}

/// A certified bracket `lower ≤ value ≤ upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

impl Bracket {
    pub const ZERO: Bracket = Bracket { lower: 0.0, upper: 0.0 };

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn intersects(&self, other: &Bracket) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileEntry {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub method: BoundMethod,
}

impl ProfileEntry {
    pub fn bracket(&self) -> Bracket {
        Bracket { lower: self.lower, upper: self.upper }
    }
}

/// Brackets on the dyadic entropy numbers `e_n`, indexed by increasing `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyProfile {
    entries: Vec<ProfileEntry>,
}

impl EntropyProfile {
    /// Validates ordering, `lower ≤ upper` and monotonicity in `n`.
    pub fn new(entries: Vec<ProfileEntry>) -> Result<Self> {
        for e in &entries {
            if e.n == 0 {
                return Err(Error::InvalidArgument("profile indices start at n = 1".into()));
            }
            if !(e.lower >= 0.0) || !e.upper.is_finite() {
                return Err(Error::InvalidArgument(format!("invalid bracket at n = {}", e.n)));
            }
            if e.lower > e.upper {
                return Err(Error::BoundsInverted { n: e.n, lower: e.lower, upper: e.upper });
            }
        }
        for w in entries.windows(2) {
            if w[1].n <= w[0].n {
                return Err(Error::InvalidArgument("profile indices must increase".into()));
            }
            if w[1].upper > w[0].upper || w[1].lower > w[0].lower {
                return Err(Error::InvalidArgument(format!(
                    "profile is not nonincreasing between n = {} and n = {}",
                    w[0].n, w[1].n
                )));
            }
        }
        Ok(Self { entries })
    }

    /// Replaces both bounds by their running minimum, which keeps them valid
    /// because `e_n` is nonincreasing, then validates.
    pub fn from_cummin(mut entries: Vec<ProfileEntry>) -> Result<Self> {
        for i in 1..entries.len() {
            entries[i].upper = entries[i].upper.min(entries[i - 1].upper);
            entries[i].lower = entries[i].lower.min(entries[i - 1].lower);
        }
        Self::new(entries)
    }

    /// Profile with `lower = upper = values[n-1]`, tagged exact.
    pub fn exact(values: &[f64]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| ProfileEntry { n: i + 1, lower: v, upper: v, method: BoundMethod::Exact })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[ProfileEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, n: usize) -> Option<&ProfileEntry> {
        self.entries.iter().find(|e| e.n == n)
    }
}
