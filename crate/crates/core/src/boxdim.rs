//! Box-counting dimension on dyadic scales `δ_n = 2^{-n}`, and a tail test
//! relating an entropy profile to finite or infinite dimension.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;

use crate::covering::EntropyProfile;
use crate::error::{Error, Result};
use crate::metric::PointCloud;

/// Number of scales at the fine end used for `lower_est` / `upper_est`.
pub const TAIL_SCALES: usize = 3;
/// Largest real dimension `2d` for which offset averaging is allowed.
pub const MAX_OFFSET_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridMode {
    /// One grid with a corner at the origin.
    #[default]
    Anchored,
    /// Maximum over the `2^{2d}` grids shifted by `0` or `δ/2` per axis.
    OffsetMax,
}

fn cell_key(point: &[num_complex::Complex64], delta: f64, shifts: u32) -> Vec<i64> {
    let mut key = Vec::with_capacity(2 * point.len());
    for (i, z) in point.iter().enumerate() {
        for (j, x) in [z.re, z.im].into_iter().enumerate() {
            let shift = if shifts >> (2 * i + j) & 1 == 1 { delta / 2.0 } else { 0.0 };
            key.push(((x - shift) / delta).floor() as i64);
        }
    }
    key
}

fn count_with_shift(cloud: &PointCloud, delta: f64, shifts: u32) -> usize {
    cloud.points().iter().map(|p| cell_key(p.entries(), delta, shifts)).collect::<HashSet<_>>().len()
}

/// Number of distinct boxes of side `delta` (half-open cells of the grid
/// anchored at the origin of `ℝ^{2d}`) meeting the cloud.
pub fn box_count(cloud: &PointCloud, delta: f64) -> Result<usize> {
    box_count_with(cloud, delta, GridMode::Anchored)
}

pub fn box_count_with(cloud: &PointCloud, delta: f64, mode: GridMode) -> Result<usize> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("box side must be positive, got {delta}")));
    }
    let Some(dim) = cloud.dim() else { return Ok(0) };
    match mode {
        GridMode::Anchored => Ok(count_with_shift(cloud, delta, 0)),
        GridMode::OffsetMax => {
            let real_dim = 2 * dim;
            if real_dim > MAX_OFFSET_DIM {
                return Err(Error::CapExceeded { what: "offset grid dimension", value: real_dim, cap: MAX_OFFSET_DIM });
            }
            Ok((0..1u32 << real_dim).into_par_iter().map(|s| count_with_shift(cloud, delta, s)).max().unwrap_or(0))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    /// `(δ_n, N(δ_n))` for `n = n_min..=n_max`.
    pub scales: Vec<(f64, usize)>,
    /// `ln N(δ_n) / (-ln δ_n)` per scale.
    pub slope_table: Vec<f64>,
    /// Least-squares slope of `ln N` against `-ln δ` over all scales.
    pub regression_slope: f64,
    pub lower_est: f64,
    pub upper_est: f64,
    pub warnings: Vec<String>,
}

pub fn dim_estimate(cloud: &PointCloud, n_min: u32, n_max: u32) -> Result<DimensionEstimate> {
    dim_estimate_with(cloud, n_min, n_max, GridMode::Anchored)
}

pub fn dim_estimate_with(cloud: &PointCloud, n_min: u32, n_max: u32, mode: GridMode) -> Result<DimensionEstimate> {
    if n_min >= n_max {
        return Err(Error::InvalidArgument(format!("need n_min < n_max, got {n_min}..{n_max}")));
    }
    if n_min == 0 || n_max > 60 {
        return Err(Error::InvalidArgument("dyadic scale exponents must lie in 1..=60".into()));
    }
    if cloud.is_empty() {
        return Err(Error::InvalidArgument("dimension of an empty cloud is undefined".into()));
    }
    let scales: Vec<(f64, usize)> = (n_min..=n_max)
        .into_par_iter()
        .map(|n| {
            let delta = 0.5f64.powi(n as i32);
            box_count_with(cloud, delta, mode).map(|c| (delta, c))
        })
        .collect::<Result<_>>()?;

    let xs: Vec<f64> = scales.iter().map(|(d, _)| -d.ln()).collect();
    let ys: Vec<f64> = scales.iter().map(|&(_, c)| (c as f64).ln()).collect();
    let slope_table: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y / x).collect();
    let regression_slope = least_squares_slope(&xs, &ys);
    let tail = &slope_table[slope_table.len().saturating_sub(TAIL_SCALES)..];
    let lower_est = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let upper_est = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut warnings = Vec::new();
    if cloud.len() > 1 {
        for w in scales.windows(2) {
            if w[1].1 == w[0].1 && w[1].1 > 1 {
                warnings.push(format!("box count stopped growing at delta = {:e}", w[1].0));
            }
        }
        if let Some(&(delta, count)) = scales.iter().find(|&&(_, c)| 2 * c > cloud.len()) {
            warnings.push(format!(
                "saturation: {count} boxes for {} points at delta = {delta:e}; the cloud is too coarse",
                cloud.len()
            ));
        }
    }
    Ok(DimensionEstimate { scales, slope_table, regression_slope, lower_est, upper_est, warnings })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionClass {
    FiniteDimConsistent,
    InfiniteDimConsistent,
    Inconclusive,
}

impl fmt::Display for DimensionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::FiniteDimConsistent => "finite-dim-consistent",
            Self::InfiniteDimConsistent => "infinite-dim-consistent",
            Self::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeConfig {
    pub threshold: f64,
    /// Minimum tail length; the tail is otherwise the last half of the profile.
    pub min_tail: usize,
}

impl Default for BridgeConfig {
    fn default() -> Self {
        Self { threshold: 0.95, min_tail: 4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeReport {
    pub class: DimensionClass,
    /// First index of the tail.
    pub tail_start: usize,
    /// `max upper_n^{1/n}` over the tail.
    pub max_upper_root: f64,
    /// `min lower_n^{1/n}` over the tail.
    pub min_lower_root: f64,
    /// `exp(β₀)` from fitting `ln lower_n^{1/n} = β₀ + β₁/√n` on the tail,
    /// when at least three tail entries have a positive lower bound.
    pub extrapolated_lower_root: Option<f64>,
}

/// Classifies the tail behavior of `e_n^{1/n}`.
///
/// Roots of a stretched exponential `s^{√n}` approach 1 only like
/// `s^{1/√n}`, so at desk-scale `n` the raw roots stay below any fixed
/// threshold. The fitted limit of the lower roots in `1/√n` removes that
/// lag; geometric profiles fit to their ratio instead.
pub fn entropy_dim_bridge(profile: &EntropyProfile, config: &BridgeConfig) -> Result<BridgeReport> {
    let entries = profile.entries();
    if entries.len() < config.min_tail.max(1) {
        return Err(Error::InvalidArgument(format!(
            "bridge needs at least {} profile entries, got {}",
            config.min_tail,
            entries.len()
        )));
    }
    let tail_len = (entries.len() / 2).max(config.min_tail).min(entries.len());
    let tail = &entries[entries.len() - tail_len..];
    let root = |v: f64, n: usize| v.powf(1.0 / n as f64);
    let max_upper_root = tail.iter().map(|e| root(e.upper, e.n)).fold(0.0, f64::max);
    let min_lower_root = tail.iter().map(|e| root(e.lower, e.n)).fold(f64::INFINITY, f64::min);

    let fit: Vec<(f64, f64)> =
        tail.iter().filter(|e| e.lower > 0.0).map(|e| (1.0 / (e.n as f64).sqrt(), e.lower.ln() / e.n as f64)).collect();
    let extrapolated_lower_root = (fit.len() >= 3).then(|| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = fit.into_iter().unzip();
        let slope = least_squares_slope(&xs, &ys);
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        (my - slope * mx).exp()
    });

    let class = if min_lower_root >= config.threshold || extrapolated_lower_root.is_some_and(|l| l >= config.threshold)
    {
        DimensionClass::InfiniteDimConsistent
    } else if max_upper_root <= config.threshold {
        DimensionClass::FiniteDimConsistent
    } else {
        DimensionClass::Inconclusive
    };
    Ok(BridgeReport { class, tail_start: tail[0].n, max_upper_root, min_lower_root, extrapolated_lower_root })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{BoundMethod, ProfileEntry};
    use crate::diagonal::example_k_profile;
    use crate::metric::{grid_segment, ComplexVector, NormKind};
    use proptest::prelude::*;

    fn real_cloud(xs: &[f64]) -> PointCloud {
        PointCloud::new(
            xs.iter().map(|&x| ComplexVector::from_real(&[x]).unwrap()).collect(),
            NormKind::Infinity,
            "line",
        )
        .unwrap()
    }

    fn plane_cloud(pts: &[(f64, f64)]) -> PointCloud {
        PointCloud::new(
            pts.iter().map(|&(x, y)| ComplexVector::from_real(&[x, y]).unwrap()).collect(),
            NormKind::Infinity,
            "plane",
        )
        .unwrap()
    }

    #[test]
    fn count_examples() {
        assert_eq!(box_count(&real_cloud(&[0.1, 0.9]), 0.5).unwrap(), 2);
        for delta in [1e-3, 0.3, 7.0] {
            assert_eq!(box_count(&real_cloud(&[0.37]), delta).unwrap(), 1);
        }
        // 1025 points k/1024: cells [j/16, (j+1)/16) for j = 0..15 plus the cell holding 1
        let grid = grid_segment(0.0, 1.0, 1025).unwrap();
        let direct: HashSet<i64> = (0..=1024).map(|k| ((k as f64 / 1024.0) * 16.0).floor() as i64).collect();
        assert_eq!(box_count(&grid, 1.0 / 16.0).unwrap(), direct.len());
        assert_eq!(direct.len(), 17);
        assert!(box_count(&grid, 0.0).is_err());
    }

    #[test]
    fn offset_max_dominates_anchored() {
        let cloud = real_cloud(&[0.24, 0.26]);
        assert_eq!(box_count(&cloud, 0.5).unwrap(), 1);
        assert_eq!(box_count_with(&cloud, 0.5, GridMode::OffsetMax).unwrap(), 2);
    }

    #[test]
    fn segment_and_singleton_estimates() {
        let seg = grid_segment(0.0, 1.0, 1 << 12).unwrap();
        let est = dim_estimate(&seg, 2, 8).unwrap();
        assert!((0.9..=1.1).contains(&est.regression_slope), "{est:?}");
        assert!(est.lower_est <= est.upper_est);
        assert!(est.scales.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 >= w[0].1));

        let single = dim_estimate(&real_cloud(&[0.5]), 2, 8).unwrap();
        assert_eq!(single.regression_slope, 0.0);
        assert_eq!(single.upper_est, 0.0);

        let coarse = dim_estimate(&grid_segment(0.0, 1.0, 20).unwrap(), 2, 8).unwrap();
        assert!(!coarse.warnings.is_empty());
    }

    #[test]
    fn planar_grid_estimate() {
        let k = 1 << 10;
        let pts: Vec<(f64, f64)> =
            (0..k).flat_map(|i| (0..k).map(move |j| (i as f64 / k as f64, j as f64 / k as f64))).collect();
        let est = dim_estimate(&plane_cloud(&pts), 2, 8).unwrap();
        assert!((est.upper_est - 2.0).abs() <= 0.2, "{est:?}");
    }

    fn profile(values: &[(f64, f64)]) -> EntropyProfile {
        EntropyProfile::new(
            values
                .iter()
                .enumerate()
                .map(|(i, &(lower, upper))| ProfileEntry { n: i + 1, lower, upper, method: BoundMethod::Exact })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn bridge_examples() {
        let cfg = BridgeConfig::default();
        let geometric: Vec<(f64, f64)> = (1..=12).map(|n| (0.5f64.powi(n), 0.5f64.powi(n))).collect();
        let r = entropy_dim_bridge(&profile(&geometric), &cfg).unwrap();
        assert_eq!(r.class, DimensionClass::FiniteDimConsistent);
        assert!((r.max_upper_root - 0.5).abs() < 1e-12);

        let zeros = vec![(0.0, 0.0); 8];
        let r = entropy_dim_bridge(&profile(&zeros), &cfg).unwrap();
        assert_eq!(r.class, DimensionClass::FiniteDimConsistent);
        assert_eq!(r.extrapolated_lower_root, None);

        let diag = example_k_profile(0.5, 24, 24).unwrap();
        let r = entropy_dim_bridge(&diag, &cfg).unwrap();
        assert_eq!(r.class, DimensionClass::InfiniteDimConsistent, "{r:?}");

        let stretched: Vec<(f64, f64)> =
            (1..=64).map(|n| (0.5f64.powf((n as f64).sqrt()), 0.5f64.powf((n as f64).sqrt()))).collect();
        let r = entropy_dim_bridge(&profile(&stretched), &cfg).unwrap();
        assert!(r.tail_start >= 16);
        assert_eq!(r.class, DimensionClass::InfiniteDimConsistent);

        assert!(entropy_dim_bridge(&profile(&zeros[..3]), &cfg).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn count_monotone_on_dyadic_scales(xs in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..60)) {
            let cloud = plane_cloud(&xs);
            let counts: Vec<usize> = (0..8).map(|n| box_count(&cloud, 0.5f64.powi(n)).unwrap()).collect();
            prop_assert!(counts.windows(2).all(|w| w[0] <= w[1]));
            let offsets: Vec<usize> =
                (0..6).map(|n| box_count_with(&cloud, 0.5f64.powi(n), GridMode::OffsetMax).unwrap()).collect();
            prop_assert!(offsets.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn product_bound(a in prop::collection::vec(-1.0f64..1.0, 1..12),
                         b in prop::collection::vec(-1.0f64..1.0, 1..12),
                         n in 0i32..6) {
            let delta = 0.5f64.powi(n);
            let prod: Vec<(f64, f64)> = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect();
            let lhs = box_count(&plane_cloud(&prod), delta).unwrap();
            let rhs = box_count(&real_cloud(&a), delta).unwrap() * box_count(&real_cloud(&b), delta).unwrap();
            prop_assert!(lhs <= rhs);
        }
    }
}
