//! Closed-form entropy bounds for diagonal operators on sequence spaces and
//! the two model sets built from them: the box `{ |x_k| ≤ ε^k }` and the
//! factorial block partition.
//!
//! For weights `w₁ ≥ w₂ ≥ … ≥ w_N > 0` the Carl–Stephani estimate for complex
//! scalars reads
//!
//! ```text
//! sup_{k ≤ N} 2^{-(n-1)/(2k)} (w₁⋯w_k)^{1/k} ≤ e_n ≤ 6 sup_{k < N} 2^{-(n-1)/(2k)} (w₁⋯w_k)^{1/k}
//! ```
//!
//! The upper supremum stops at `k < N`; for `N = 1` it falls back to the
//! `k = 1` term.

use std::ops::{Range, RangeInclusive};

use crate::covering::{BoundMethod, EntropyProfile, ProfileEntry};
use crate::error::{Error, Result};
use crate::metric::NormKind;

/// Largest block index accepted by [`sigma_partition_profile`].
pub const SIGMA_PROFILE_CAP: usize = 5;
/// Largest block index accepted by [`SigmaPartition::new`].
pub const SIGMA_PARTITION_CAP: usize = 8;

const UPPER_FACTOR: f64 = 6.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalModel {
    weights: Vec<f64>,
    pub ambient: NormKind,
}

impl DiagonalModel {
    pub fn new(weights: Vec<f64>, ambient: NormKind) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("diagonal model needs at least one weight".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("diagonal weights must be positive and finite".into()));
        }
        if weights.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument("diagonal weights must be nonincreasing".into()));
        }
        Ok(Self { weights, ambient })
    }

    /// Weights `ε, ε², …, ε^N` on `c₀`, whose unit-ball image is the
    /// truncated box `K^N`.
    pub fn geometric(epsilon: f64, len: usize) -> Result<Self> {
        check_epsilon(epsilon)?;
        Self::new((1..=len).map(|k| epsilon.powi(k as i32)).collect(), NormKind::Infinity)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `ln (w₁⋯w_k)^{1/k}` for `k = 1..=N`.
    fn log_geometric_means(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                acc += w.ln();
                acc / (i + 1) as f64
            })
            .collect()
    }
}

/// The enumerated terms `2^{-(n-1)/(2k)} (w₁⋯w_k)^{1/k}`, `k = 1..=N`.
pub fn carl_stephani_terms(model: &DiagonalModel, n: usize) -> Vec<f64> {
    let shift = (n.max(1) - 1) as f64 * std::f64::consts::LN_2 / 2.0;
    model.log_geometric_means().iter().enumerate().map(|(i, g)| (g - shift / (i + 1) as f64).exp()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalBounds {
    pub lower: f64,
    pub upper: f64,
    /// `k` attaining the lower supremum (1-based, lowest on ties).
    pub lower_argmax: usize,
}

impl DiagonalBounds {
    /// False when the strict upper index lets the `k = N` term exceed the
    /// upper bound.
    pub fn is_consistent(&self) -> bool {
        self.lower <= self.upper
    }
}

fn argmax(values: &[f64]) -> (usize, f64) {
    values.iter().enumerate().fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
}

pub fn carl_stephani_bounds(model: &DiagonalModel, n: usize) -> Result<DiagonalBounds> {
    if n == 0 {
        return Err(Error::InvalidArgument("entropy numbers are indexed from n = 1".into()));
    }
    let terms = carl_stephani_terms(model, n);
    let (k, lower) = argmax(&terms);
    let upper_range = if terms.len() == 1 { &terms[..1] } else { &terms[..terms.len() - 1] };
    let upper = UPPER_FACTOR * argmax(upper_range).1;
    Ok(DiagonalBounds { lower, upper, lower_argmax: k + 1 })
}

/// Brackets on `e_n(K)` for `K = { |x_k| ≤ ε^k } ⊂ c₀`, combining the
/// truncation sandwich `e_n(K^N) ≤ e_n(K) ≤ e_n(K^N) + ε^N` with the
/// diagonal estimate for `K^N`.
pub fn example_k_profile(epsilon: f64, truncation: usize, n_max: usize) -> Result<EntropyProfile> {
    let model = DiagonalModel::geometric(epsilon, truncation)?;
    let tail = epsilon.powi(truncation as i32);
    let entries = (1..=n_max)
        .map(|n| {
            let b = carl_stephani_bounds(&model, n)?;
            Ok(ProfileEntry { n, lower: b.lower, upper: b.upper + tail, method: BoundMethod::CarlStephani })
        })
        .collect::<Result<Vec<_>>>()?;
    EntropyProfile::new(entries)
}

/// Stretched-exponential envelope `C₁ s^{√(n-1)} ≤ e_n(K) ≤ C₂ S^{√(n-1)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub c1: f64,
    pub c2: f64,
    pub s: f64,
    pub big_s: f64,
}

impl Envelope {
    pub fn lower_at(&self, n: usize) -> f64 {
        self.c1 * self.s.powf(((n - 1) as f64).sqrt())
    }

    pub fn upper_at(&self, n: usize) -> f64 {
        self.c2 * self.big_s.powf(((n - 1) as f64).sqrt())
    }

    /// Checks both inequalities against every entry of the profile.
    pub fn brackets(&self, profile: &EntropyProfile) -> bool {
        profile.entries().iter().all(|e| self.lower_at(e.n) <= e.lower && e.upper <= self.upper_at(e.n))
    }
}

/// Largest `C₁` and smallest `C₂` for which the envelope brackets
/// [`example_k_profile`] over `n_range`, with `s = min(ε, 1/2)` and
/// `S = max(ε, 1/2)`.
pub fn asymptotic_envelope(epsilon: f64, truncation: usize, n_range: RangeInclusive<usize>) -> Result<Envelope> {
    check_epsilon(epsilon)?;
    let (first, last) = (*n_range.start(), *n_range.end());
    if first == 0 || first > last {
        return Err(Error::InvalidArgument(format!("invalid index range {first}..={last}")));
    }
    let profile = example_k_profile(epsilon, truncation, last)?;
    let s = epsilon.min(0.5);
    let big_s = epsilon.max(0.5);
    let window: Vec<&ProfileEntry> = profile.entries().iter().filter(|e| e.n >= first).collect();
    let root = |n: usize| ((n - 1) as f64).sqrt();
    let c1 = window.iter().map(|e| e.lower / s.powf(root(e.n))).fold(f64::INFINITY, f64::min);
    let c2 = window.iter().map(|e| e.upper / big_s.powf(root(e.n))).fold(0.0, f64::max);
    // absorb the rounding of the re-multiplication
    let slack = 4.0 * f64::EPSILON;
    let envelope = Envelope { c1: c1 * (1.0 - slack), c2: c2 * (1.0 + slack), s, big_s };
    let restricted = EntropyProfile::new(window.into_iter().copied().collect())?;
    if !envelope.brackets(&restricted) {
        return Err(Error::InvalidArgument("envelope failed re-verification".into()));
    }
    Ok(envelope)
}

/// Partition of `1, 2, 3, …` into consecutive blocks of sizes `1!, 2!, …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaPartition {
    /// Block `m` (1-based) is `blocks[m - 1]`, as 1-based index ranges.
    blocks: Vec<Range<usize>>,
}

pub fn factorial(m: usize) -> usize {
    (1..=m).product()
}

impl SigmaPartition {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidArgument("partition needs at least one block".into()));
        }
        if n_max > SIGMA_PARTITION_CAP {
            return Err(Error::CapExceeded { what: "N_max", value: n_max, cap: SIGMA_PARTITION_CAP });
        }
        let mut start = 1;
        let blocks = (1..=n_max)
            .map(|m| {
                let block = start..start + factorial(m);
                start = block.end;
                block
            })
            .collect();
        Ok(Self { blocks })
    }

    pub fn n_max(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, m: usize) -> Range<usize> {
        self.blocks[m - 1].clone()
    }

    /// Total number of covered indices.
    pub fn len(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.end - 1)
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block containing the 1-based index `j`.
    pub fn block_of(&self, j: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&j)).map(|i| i + 1)
    }
}

/// Exponents at which block partial sums are reported.
pub const SIGMA_EXPONENTS: [f64; 3] = [1.0, 1.5, 2.0];

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaBlockRow {
    pub block: usize,
    /// Entropy index `N! + 1`.
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    /// `(p, Σ_{M ≤ N} ((M+1)! − M!) · lower_M^p)` for each reported `p`.
    pub partial_sums: Vec<(f64, f64)>,
}

/// Block `N` of the factorial partition at radius `2^{-r}` is a diagonal
/// image with `N!` equal weights `2^{-rN}`; its entropy number at index
/// `N! + 1` is bracketed by the enumerated supremum and six times it.
pub fn sigma_partition_profile(r: u32, n_max: usize) -> Result<Vec<SigmaBlockRow>> {
    if r == 0 {
        return Err(Error::InvalidArgument("radius exponent r must be at least 1".into()));
    }
    if n_max > SIGMA_PROFILE_CAP {
        return Err(Error::CapExceeded { what: "N_max", value: n_max, cap: SIGMA_PROFILE_CAP });
    }
    let partition = SigmaPartition::new(n_max)?;
    let mut sums = [0.0; SIGMA_EXPONENTS.len()];
    (1..=partition.n_max())
        .map(|block| {
            let size = partition.block(block).len();
            let weight = 2f64.powi(-((r as usize * block) as i32));
            let model = DiagonalModel::new(vec![weight; size], NormKind::Infinity)?;
            let n = size + 1;
            let lower = argmax(&carl_stephani_terms(&model, n)).1;
            let upper = UPPER_FACTOR * lower;
            let multiplicity = (factorial(block + 1) - factorial(block)) as f64;
            let partial_sums = SIGMA_EXPONENTS
                .iter()
                .zip(sums.iter_mut())
                .map(|(&p, acc)| {
                    *acc += multiplicity * lower.powf(p);
                    (p, *acc)
                })
                .collect();
            Ok(SigmaBlockRow { block, n, lower, upper, partial_sums })
        })
        .collect()
}

/// Per-index profile of the block model: `e_1` and every index in
/// `(N!, (N+1)!]` carry the block-`N` bracket.
pub fn sigma_entropy_profile(r: u32, n_max: usize) -> Result<EntropyProfile> {
    let rows = sigma_partition_profile(r, n_max)?;
    let mut entries =
        vec![ProfileEntry { n: 1, lower: rows[0].lower, upper: rows[0].upper, method: BoundMethod::CarlStephani }];
    for row in &rows {
        for n in (factorial(row.block) + 1)..=factorial(row.block + 1) {
            entries.push(ProfileEntry { n, lower: row.lower, upper: row.upper, method: BoundMethod::CarlStephani });
        }
    }
    EntropyProfile::new(entries)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct enumeration of the printed supremum for geometric weights.
    fn printed_term(epsilon: f64, n: usize, k: usize) -> f64 {
        2f64.powf(-((n - 1) as f64) / (2.0 * k as f64)) * epsilon.powf((k + 1) as f64 / 2.0)
    }

    fn printed_sup(epsilon: f64, n: usize, ks: RangeInclusive<usize>) -> (usize, f64) {
        ks.map(|k| (k, printed_term(epsilon, n, k))).fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a })
    }

    #[test]
    fn model_validation() {
        assert!(DiagonalModel::new(vec![0.5, 0.6], NormKind::Infinity).is_err());
        assert!(DiagonalModel::new(vec![0.5, 0.0], NormKind::Infinity).is_err());
        assert!(DiagonalModel::new(vec![], NormKind::Infinity).is_err());
        assert!(DiagonalModel::geometric(1.0, 3).is_err());
    }

    #[test]
    fn geometric_specialization() {
        for &eps in &[0.5, 0.25, 0.9, 0.01] {
            let model = DiagonalModel::geometric(eps, 12).unwrap();
            for n in [1, 2, 9, 30] {
                let terms = carl_stephani_terms(&model, n);
                for (i, t) in terms.iter().enumerate() {
                    assert!((t - printed_term(eps, n, i + 1)).abs() <= 1e-15, "eps={eps} n={n} k={}", i + 1);
                }
            }
        }
    }

    #[test]
    fn bounds_examples() {
        let model = DiagonalModel::geometric(0.5, 8).unwrap();
        let b = carl_stephani_bounds(&model, 1).unwrap();
        assert!((b.lower - 0.5).abs() < 1e-15);
        assert_eq!(b.lower_argmax, 1);

        let (k, value) = printed_sup(0.5, 9, 1..=8);
        let b = carl_stephani_bounds(&model, 9).unwrap();
        assert_eq!(b.lower_argmax, k);
        assert!((b.lower - value).abs() < 1e-15);
        let (_, upper_sup) = printed_sup(0.5, 9, 1..=7);
        assert!((b.upper - 6.0 * upper_sup).abs() < 1e-14);
        assert!(b.is_consistent());

        for n in 1..=40 {
            assert!(carl_stephani_bounds(&model, n).unwrap().is_consistent(), "n={n}");
        }
        // with N = 2 the k = N term eventually beats six times the k = 1 term
        let short = DiagonalModel::geometric(0.5, 2).unwrap();
        assert!(!carl_stephani_bounds(&short, 100).unwrap().is_consistent());

        let single = DiagonalModel::geometric(0.5, 1).unwrap();
        let b = carl_stephani_bounds(&single, 3).unwrap();
        assert!((b.upper - 6.0 * b.lower).abs() < 1e-15);
    }

    #[test]
    fn example_k_profile_values() {
        let profile = example_k_profile(0.5, 10, 6).unwrap();
        let first = profile.get(1).unwrap();
        assert!((first.lower - 0.5).abs() < 1e-15);
        let expected_upper = 6.0 * printed_sup(0.5, 1, 1..=9).1 + 2f64.powi(-10);
        assert!((first.upper - expected_upper).abs() < 1e-14);

        let small = example_k_profile(1e-3, 10, 1).unwrap();
        assert!((small.get(1).unwrap().lower - 1e-3).abs() < 1e-17);

        let long = example_k_profile(0.5, 60, 3).unwrap();
        let b = carl_stephani_bounds(&DiagonalModel::geometric(0.5, 60).unwrap(), 3).unwrap();
        assert!((long.get(3).unwrap().upper - b.upper).abs() < 1e-15);
    }

    #[test]
    fn envelope_constants() {
        let e = asymptotic_envelope(0.5, 24, 1..=24).unwrap();
        assert_eq!((e.s, e.big_s), (0.5, 0.5));
        let e = asymptotic_envelope(0.25, 24, 1..=24).unwrap();
        assert_eq!((e.s, e.big_s), (0.25, 0.5));
        for eps in [0.25, 0.5, 0.7] {
            let e = asymptotic_envelope(eps, 16, 2..=20).unwrap();
            let profile = example_k_profile(eps, 16, 20).unwrap();
            for entry in profile.entries().iter().filter(|x| x.n >= 2) {
                assert!(e.lower_at(entry.n) <= entry.lower);
                assert!(entry.upper <= e.upper_at(entry.n));
            }
        }
    }

    #[test]
    fn sigma_partition_blocks() {
        let p = SigmaPartition::new(3).unwrap();
        assert_eq!(p.block(1), 1..2);
        assert_eq!(p.block(2), 2..4);
        assert_eq!(p.block(3), 4..10);
        assert_eq!(p.len(), 9);
        assert_eq!(p.block_of(5), Some(3));
        assert_eq!(p.block_of(10), None);
        assert!(SigmaPartition::new(9).is_err());
    }

    #[test]
    fn sigma_profile_values() {
        let rows = sigma_partition_profile(1, 5).unwrap();
        // brute-force supremum over k ≤ N! of 2^{-N!/(2k)} 2^{-rN}
        for row in &rows {
            let size = factorial(row.block);
            let sup = (1..=size)
                .map(|k| 2f64.powf(-(size as f64) / (2.0 * k as f64)) * 2f64.powi(-(row.block as i32)))
                .fold(0.0, f64::max);
            assert!((row.lower - sup).abs() < 1e-15);
            assert!((row.lower - 2f64.powf(-0.5) * 2f64.powi(-(row.block as i32))).abs() < 1e-15);
            assert_eq!(row.n, size + 1);
        }
        assert!((rows[1].lower - 0.176_776_695_296_636_9).abs() < 1e-15);
        for r in 1..4 {
            let rows = sigma_partition_profile(r, 1).unwrap();
            assert!((rows[0].lower - 2f64.powf(-0.5) * 2f64.powi(-(r as i32))).abs() < 1e-15);
        }
        let p1: Vec<f64> = rows.iter().map(|r| r.partial_sums[0].1).collect();
        assert!(p1.windows(2).all(|w| w[1] > w[0]));
        assert!(matches!(sigma_partition_profile(1, 6), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn sigma_entropy_profile_layout() {
        let profile = sigma_entropy_profile(1, 3).unwrap();
        assert_eq!(profile.len(), 24);
        let rows = sigma_partition_profile(1, 3).unwrap();
        assert_eq!(profile.get(2).unwrap().lower, rows[0].lower);
        assert_eq!(profile.get(3).unwrap().lower, rows[1].lower);
        assert_eq!(profile.get(24).unwrap().lower, rows[2].lower);
    }
}
