use std::cmp::Ordering;
use std::fmt;

/// Exponent vector `α` of the monomial `z^α = z₁^{α₁} ⋯ z_N^{α_N}`.
///
/// Ordered lexicographically with `z₁ ≺ z₂ ≺ … ≺ z_N`: the exponent of the
/// last variable is compared first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zeros(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    /// The standard basis index `ε_j` (0-based `j`).
    pub fn unit(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    /// `|α|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn add_unit(&self, j: usize) -> Self {
        let mut e = self.0.clone();
        e[j] += 1;
        Self(e)
    }

    /// `α − ε_j`, if `α_j > 0`.
    pub fn sub_unit(&self, j: usize) -> Option<Self> {
        let mut e = self.0.clone();
        e[j] = e[j].checked_sub(1)?;
        Some(Self(e))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "z{}^{}", i + 1, a)?;
        }
        Ok(())
    }
}

/// All multi-indices with `nvars` entries and `|α| = degree`, ascending.
pub fn monomials(nvars: usize, degree: u32) -> Vec<MultiIndex> {
    fn fill(prefix: &mut Vec<u32>, left: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
        if left == 1 {
            prefix.push(remaining);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in 0..=remaining {
            prefix.push(a);
            fill(prefix, left - 1, remaining - a, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return out;
    }
    fill(&mut Vec::with_capacity(nvars), nvars, degree, &mut out);
    out.sort();
    out
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of monomials of degree `degree` in `nvars` variables.
pub fn monomial_count(nvars: usize, degree: u32) -> u64 {
    if nvars == 0 {
        return u64::from(degree == 0);
    }
    binomial(nvars as u64 + degree as u64 - 1, degree as u64)
}
