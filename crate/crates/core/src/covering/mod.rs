//! Covering numbers, packing numbers and (dyadic) entropy numbers of point
//! clouds.
//!
//! All covers use closed balls centered at cloud points. A cover with
//! centers anywhere in the ambient space at radius `ε` induces a
//! cloud-centered cover at radius `2ε`, so cloud-centered upper bounds are
//! within a factor 2 of the unrestricted entropy numbers. Lower bounds come
//! from separated subsets and hold for unrestricted centers as well.
//!
//! The empty cloud has covering number 0 and all entropy numbers 0.

mod exact;
mod profile;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::{ComplexVector, NormKind, PointCloud};

pub use profile::{BoundMethod, Bracket, EntropyProfile, ProfileEntry};

/// Default size limit for [`exact_covering_number`].
pub const DEFAULT_EXACT_LIMIT: usize = 64;

/// Relative width at which radius bisection stops.
const BISECTION_REL_TOL: f64 = 1e-9;

/// Consecutive-ratio floor for connected sets.
pub const LIMINF_RATIO_FLOOR: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    pub centers: Vec<ComplexVector>,
    /// Positions of the centers in the covered cloud.
    pub center_indices: Vec<usize>,
    pub radius: f64,
    pub norm: NormKind,
}

impl Cover {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Index of the center closest to `point`; ties go to the lowest index.
    pub fn nearest(&self, point: &[num_complex::Complex64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in self.centers.iter().enumerate() {
            let d = self.norm.dist(c.entries(), point);
            if best.is_none_or(|(_, b)| d < b) {
                best = Some((i, d));
            }
        }
        best
    }
}

/// True when every cloud point lies within `cover.radius` of some center.
pub fn verify_cover(cover: &Cover, cloud: &PointCloud) -> bool {
    cloud
        .points()
        .par_iter()
        .all(|p| cover.centers.iter().any(|c| cover.norm.dist(c.entries(), p.entries()) <= cover.radius))
}

/// Farthest-point (Gonzalez) traversal. `radii[k]` is the covering radius
/// of the first `k + 1` centers; the radii are nonincreasing and the first
/// `k + 2` centers are pairwise at least `radii[k]` apart.
#[derive(Debug, Clone)]
pub(crate) struct Traversal {
    pub order: Vec<usize>,
    pub radii: Vec<f64>,
}

impl Traversal {
    /// Runs until `max_centers` centers are placed or `stop(radius)` holds.
    pub fn run(cloud: &PointCloud, max_centers: usize, stop: impl Fn(f64) -> bool) -> Self {
        let n = cloud.len();
        let mut order = Vec::new();
        let mut radii = Vec::new();
        if n == 0 || max_centers == 0 {
            return Self { order, radii };
        }
        let mut closest = vec![f64::INFINITY; n];
        let mut next = 0usize;
        loop {
            order.push(next);
            let center = cloud.points()[next].entries();
            let norm = cloud.norm();
            closest.par_iter_mut().zip(cloud.points().par_iter()).for_each(|(c, p)| {
                let d = norm.dist(center, p.entries());
                if d < *c {
                    *c = d;
                }
            });
            // farthest point, lowest index on ties
            let (far, radius) =
                closest.iter().enumerate().fold(
                    (0, f64::NEG_INFINITY),
                    |(bi, bd), (i, &d)| {
                        if d > bd {
                            (i, d)
                        } else {
                            (bi, bd)
                        }
                    },
                );
            radii.push(radius);
            if radius == 0.0 || order.len() >= max_centers || stop(radius) {
                break;
            }
            next = far;
        }
        Self { order, radii }
    }

    /// Covering radius with `k ≥ 1` centers (0 once every point is a center).
    pub fn radius_with(&self, k: usize) -> f64 {
        if k > self.radii.len() {
            return *self.radii.last().unwrap_or(&0.0);
        }
        self.radii[k - 1]
    }
}

/// Cover by farthest-point traversal, stopping once the covering radius
/// drops to `epsilon`. An upper-bound witness for `N(L, ε)`, not a minimum.
pub fn greedy_cover(cloud: &PointCloud, epsilon: f64) -> Result<Cover> {
    check_radius(epsilon)?;
    let t = Traversal::run(cloud, usize::MAX, |r| r <= epsilon);
    Ok(Cover {
        centers: t.order.iter().map(|&i| cloud.points()[i].clone()).collect(),
        center_indices: t.order,
        radius: epsilon,
        norm: cloud.norm(),
    })
}

/// Minimum number of closed `epsilon`-balls centered at cloud points that
/// cover the cloud, by exact branch and bound.
pub fn exact_covering_number(cloud: &PointCloud, epsilon: f64, limit: usize) -> Result<usize> {
    check_radius(epsilon)?;
    let limit = limit.min(exact::MASK_BITS);
    if cloud.len() > limit {
        return Err(Error::SizeLimit { size: cloud.len(), limit });
    }
    Ok(exact::min_cover(cloud, epsilon))
}

/// Greedy (index-order) maximal subset whose points are pairwise more than
/// `epsilon` apart, stopping early once it reaches `stop_at` points.
fn packing_count(cloud: &PointCloud, epsilon: f64, stop_at: usize) -> usize {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..cloud.len() {
        if chosen.iter().all(|&j| cloud.dist(i, j) > epsilon) {
            chosen.push(i);
            if chosen.len() >= stop_at {
                break;
            }
        }
    }
    chosen.len()
}

/// Size of a maximal `epsilon`-separated subset (strict separation), found
/// greedily in index order.
///
/// Maximality makes the subset a cloud-centered `ε`-cover, so
/// `N(L, ε) ≤ packing_number(L, ε)`; separation gives
/// `packing_number(L, 2ε) ≤ N(L, ε)`.
pub fn packing_number(cloud: &PointCloud, epsilon: f64) -> Result<usize> {
    check_radius(epsilon)?;
    Ok(packing_count(cloud, epsilon, usize::MAX))
}

/// Bracket on the entropy number `𝓔_n` of the cloud.
///
/// `upper` is the farthest-point covering radius with `n` centers, which is
/// the smallest radius at which the greedy cover uses at most `n` centers.
/// `lower` is the larger of two separated-set certificates: half the
/// farthest-point radius (the first `n + 1` traversal points are pairwise
/// that far apart) and the largest bisected `r` with
/// `packing_number(2r) > n`.
pub fn entropy_number(cloud: &PointCloud, n: usize) -> Result<Bracket> {
    if n == 0 {
        return Err(Error::InvalidArgument("entropy numbers are indexed from n = 1".into()));
    }
    if cloud.len() <= 1 {
        return Ok(Bracket::ZERO);
    }
    let traversal = Traversal::run(cloud, n + 1, |_| false);
    Ok(bracket_from_traversal(cloud, &traversal, n))
}

fn bracket_from_traversal(cloud: &PointCloud, traversal: &Traversal, n: usize) -> Bracket {
    let upper = traversal.radius_with(n);
    if upper == 0.0 {
        return Bracket::ZERO;
    }
    let separated = upper / 2.0;
    Bracket { lower: separated.max(packing_lower_bound(cloud, n, traversal.radius_with(1))), upper }
}

/// Largest `r` found by bisection with more than `n` points pairwise
/// farther than `2r` apart; no `n` closed `r`-balls can then cover.
///
/// `scale` is the one-center covering radius, which lies between half the
/// diameter and the diameter.
fn packing_lower_bound(cloud: &PointCloud, n: usize, scale: f64) -> f64 {
    let certified = |r: f64| packing_count(cloud, 2.0 * r, n + 1) > n;
    let (mut lo, mut hi) = (0.0, scale);
    if !certified(lo) || certified(hi) {
        return 0.0;
    }
    while hi - lo > BISECTION_REL_TOL * scale {
        let mid = 0.5 * (lo + hi);
        if certified(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Exact cloud-centered `𝓔_n`: the smallest pairwise distance at which `n`
/// cloud-centered balls suffice.
pub fn exact_entropy_number(cloud: &PointCloud, n: usize, limit: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("entropy numbers are indexed from n = 1".into()));
    }
    let limit = limit.min(exact::MASK_BITS);
    if cloud.len() > limit {
        return Err(Error::SizeLimit { size: cloud.len(), limit });
    }
    let len = cloud.len();
    let mut radii = vec![0.0];
    for i in 0..len {
        for j in (i + 1)..len {
            radii.push(cloud.dist(i, j));
        }
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    // the covering number is nonincreasing in the radius
    let (mut lo, mut hi) = (0usize, radii.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if exact::min_cover(cloud, radii[mid]) <= n {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(radii[lo])
}

/// Raw brackets on `e_k = 𝓔_{2^{k-1}}` for `k = 1..=n_max`, before the
/// monotone pass.
pub fn dyadic_entropy_brackets(cloud: &PointCloud, n_max: usize) -> Result<Vec<Bracket>> {
    if n_max == 0 || n_max > 40 {
        return Err(Error::InvalidArgument(format!("n_max must be in 1..=40, got {n_max}")));
    }
    if cloud.len() <= 1 {
        return Ok(vec![Bracket::ZERO; n_max]);
    }
    let max_centers = (1usize << (n_max - 1)).saturating_add(1).min(cloud.len());
    let traversal = Traversal::run(cloud, max_centers, |_| false);
    Ok((1..=n_max).into_par_iter().map(|k| bracket_from_traversal(cloud, &traversal, 1usize << (k - 1))).collect())
}

/// Dyadic entropy profile of the cloud, with running minima applied.
pub fn dyadic_entropy_profile(cloud: &PointCloud, n_max: usize) -> Result<EntropyProfile> {
    let brackets = dyadic_entropy_brackets(cloud, n_max)?;
    EntropyProfile::from_cummin(
        brackets
            .into_iter()
            .enumerate()
            .map(|(i, b)| ProfileEntry { n: i + 1, lower: b.lower, upper: b.upper, method: BoundMethod::GreedyPacking })
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    /// Ratio of entry `n + 1` to entry `n`.
    pub n: usize,
    pub upper_ratio: Option<f64>,
    pub lower_ratio: Option<f64>,
    /// Largest ratio compatible with both brackets: `upper_{n+1} / lower_n`.
    pub certified_max: Option<f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub rows: Vec<RatioRow>,
    pub warnings: Vec<String>,
}

impl RatioReport {
    pub fn flag_count(&self) -> usize {
        self.rows.iter().filter(|r| r.flagged).count()
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    if den > 0.0 {
        Some(num / den)
    } else if num == 0.0 {
        None
    } else {
        Some(f64::INFINITY)
    }
}

/// Consecutive ratios `e_{n+1}/e_n`. A row is flagged (soft warning) when
/// every ratio compatible with the brackets is below 1/5, which a connected
/// set cannot sustain.
pub fn ratio_diagnostic(profile: &EntropyProfile) -> Result<RatioReport> {
    let entries = profile.entries();
    if entries.len() < 2 {
        return Err(Error::InvalidArgument("ratio diagnostic needs at least two entries".into()));
    }
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for w in entries.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let certified_max = ratio(b.upper, a.lower);
        let flagged = certified_max.is_some_and(|r| r < LIMINF_RATIO_FLOOR);
        if flagged {
            warnings.push(format!(
                "e_{}/e_{} is certified below 1/5 (at most {:.6}); the set cannot be connected",
                b.n,
                a.n,
                certified_max.unwrap_or(0.0)
            ));
        }
        rows.push(RatioRow {
            n: a.n,
            upper_ratio: ratio(b.upper, a.upper),
            lower_ratio: ratio(b.lower, a.lower),
            certified_max,
            flagged,
        });
    }
    Ok(RatioReport { rows, warnings })
}

fn check_radius(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {epsilon}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::grid_segment;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(xs: &[f64]) -> PointCloud {
        PointCloud::new(
            xs.iter().map(|&x| ComplexVector::from_real(&[x]).unwrap()).collect(),
            NormKind::Infinity,
            "line",
        )
        .unwrap()
    }

    /// Minimum cloud-centered cover of real points by sweeping left to right:
    /// the leftmost uncovered point is covered by the rightmost point within
    /// reach, which dominates every other choice.
    fn sweep_cover(xs: &[f64], eps: f64) -> usize {
        let mut xs = xs.to_vec();
        xs.sort_by(f64::total_cmp);
        let mut count = 0;
        let mut i = 0;
        while i < xs.len() {
            let left = xs[i];
            let mut c = i;
            while c + 1 < xs.len() && xs[c + 1] - left <= eps {
                c += 1;
            }
            let reach = xs[c] + eps;
            while i < xs.len() && xs[i] <= reach {
                i += 1;
            }
            count += 1;
        }
        count
    }

    /// Exhaustive search over center subsets.
    fn brute_cover(cloud: &PointCloud, eps: f64) -> usize {
        let n = cloud.len();
        (0u32..(1 << n))
            .filter(|&mask| (0..n).all(|i| (0..n).any(|c| mask >> c & 1 == 1 && cloud.dist(i, c) <= eps)))
            .map(u32::count_ones)
            .min()
            .unwrap() as usize
    }

    /// Largest strictly separated subset, by exhaustion.
    fn brute_packing(cloud: &PointCloud, eps: f64) -> usize {
        let n = cloud.len();
        (0u32..(1 << n))
            .filter(|&mask| {
                (0..n).all(|i| {
                    (0..n).all(|j| i == j || mask >> i & 1 == 0 || mask >> j & 1 == 0 || cloud.dist(i, j) > eps)
                })
            })
            .map(u32::count_ones)
            .max()
            .unwrap() as usize
    }

    #[test]
    fn greedy_cover_on_interval_grid() {
        let grid = grid_segment(0.0, 1.0, 1025).unwrap();
        let cover = greedy_cover(&grid, 0.25).unwrap();
        assert!(cover.len() <= 3);
        assert!(verify_cover(&cover, &grid));
        let xs: Vec<f64> = grid.points().iter().map(|p| p[0].re).collect();
        assert_eq!(sweep_cover(&xs, 0.25), 2);
    }

    #[test]
    fn greedy_cover_degenerate() {
        let single = line(&[0.3]);
        assert_eq!(greedy_cover(&single, 0.1).unwrap().len(), 1);
        let cloud = line(&[0.0, 0.2, 0.7]);
        assert_eq!(greedy_cover(&cloud, 0.7).unwrap().len(), 1);
        let empty = PointCloud::empty(NormKind::Infinity, "empty");
        assert!(greedy_cover(&empty, 1.0).unwrap().is_empty());
        assert!(greedy_cover(&cloud, 0.0).is_err());
    }

    #[test]
    fn exact_covering_examples() {
        // cloud-centered balls of radius 0.3 around {0, 0.5, 1} hold one point each
        let three = line(&[0.0, 0.5, 1.0]);
        assert_eq!(brute_cover(&three, 0.3), 3);
        assert_eq!(exact_covering_number(&three, 0.3, 64).unwrap(), 3);
        assert_eq!(exact_covering_number(&three, 0.5, 64).unwrap(), 1);
        assert_eq!(exact_covering_number(&three, 1.0, 64).unwrap(), 1);
        let two = line(&[0.0, 1.0]);
        assert_eq!(exact_covering_number(&two, 0.4, 64).unwrap(), 2);
        let empty = PointCloud::empty(NormKind::Infinity, "empty");
        assert_eq!(exact_covering_number(&empty, 0.4, 64).unwrap(), 0);
    }

    #[test]
    fn exact_covering_size_limit() {
        let grid = grid_segment(0.0, 1.0, 65).unwrap();
        assert_eq!(
            exact_covering_number(&grid, 0.1, DEFAULT_EXACT_LIMIT),
            Err(Error::SizeLimit { size: 65, limit: 64 })
        );
        let xs: Vec<f64> = grid.points().iter().map(|p| p[0].re).collect();
        assert_eq!(exact_covering_number(&grid, 0.1, 100).unwrap(), sweep_cover(&xs, 0.1));
    }

    #[test]
    fn packing_examples() {
        let three = line(&[0.0, 0.5, 1.0]);
        assert_eq!(brute_packing(&three, 0.6), 2);
        assert_eq!(packing_number(&three, 0.6).unwrap(), 2);
        assert_eq!(packing_number(&line(&[0.4]), 0.1).unwrap(), 1);
        assert_eq!(packing_number(&three, 1.5).unwrap(), 1);
    }

    #[test]
    fn entropy_number_on_interval() {
        let grid = grid_segment(0.0, 1.0, 1025).unwrap();
        for n in 1..=4 {
            // centers anywhere: 𝓔_n([0,1]) = 1/(2n)
            let truth = 1.0 / (2.0 * n as f64);
            let b = entropy_number(&grid, n).unwrap();
            assert!(b.lower <= truth + 1e-12, "n={n} {b:?}");
            assert!(truth <= 2.0 * b.upper, "n={n} {b:?}");
            assert!(b.upper <= 2.0 * truth + 1e-12, "n={n} {b:?}");
        }
        assert_eq!(entropy_number(&line(&[0.2]), 5).unwrap(), Bracket::ZERO);
        assert!(entropy_number(&grid, 0).is_err());
    }

    #[test]
    fn dyadic_profile_on_interval() {
        let grid = grid_segment(0.0, 1.0, 1025).unwrap();
        let profile = dyadic_entropy_profile(&grid, 4).unwrap();
        for e in profile.entries() {
            let truth = 2f64.powi(-(e.n as i32));
            assert!(e.lower <= truth && truth <= 2.0 * e.upper, "{e:?}");
        }
        let single = dyadic_entropy_profile(&line(&[0.0]), 3).unwrap();
        assert!(single.entries().iter().all(|e| e.lower == 0.0 && e.upper == 0.0));
        let two = dyadic_entropy_profile(&line(&[0.0, 1.0]), 2).unwrap();
        assert_eq!(two.get(2).unwrap().bracket(), Bracket::ZERO);
    }

    #[test]
    fn dyadic_profile_matches_entropy_number_before_cummin() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..300).map(|_| rng.random::<f64>()).collect();
        let cloud = line(&xs);
        let raw = dyadic_entropy_brackets(&cloud, 6).unwrap();
        for (k, b) in raw.iter().enumerate() {
            assert_eq!(*b, entropy_number(&cloud, 1 << k).unwrap());
        }
    }

    #[test]
    fn ratio_diagnostic_examples() {
        let exact = EntropyProfile::exact(&[0.5, 0.25, 0.125, 0.0625]).unwrap();
        let report = ratio_diagnostic(&exact).unwrap();
        assert!(report.rows.iter().all(|r| r.upper_ratio == Some(0.5) && !r.flagged));

        let constant = EntropyProfile::exact(&[0.3, 0.3, 0.3]).unwrap();
        assert!(ratio_diagnostic(&constant).unwrap().rows.iter().all(|r| r.upper_ratio == Some(1.0)));

        let two = dyadic_entropy_profile(&line(&[0.0, 1.0]), 2).unwrap();
        let report = ratio_diagnostic(&two).unwrap();
        assert_eq!(report.rows[0].certified_max, Some(0.0));
        assert_eq!(report.flag_count(), 1);
        assert_eq!(report.warnings.len(), 1);

        assert!(ratio_diagnostic(&EntropyProfile::exact(&[0.5]).unwrap()).is_err());
    }

    #[test]
    fn exact_entropy_number_small() {
        let cloud = line(&[0.0, 0.1, 0.5, 0.9, 1.0]);
        assert_eq!(exact_entropy_number(&cloud, 1, 64).unwrap(), 0.5);
        assert_eq!(exact_entropy_number(&cloud, 2, 64).unwrap(), 0.4);
        assert_eq!(exact_entropy_number(&cloud, 5, 64).unwrap(), 0.0);
    }

    fn arb_cloud(max_len: usize) -> impl Strategy<Value = PointCloud> {
        let norm = prop_oneof![Just(NormKind::P(1.0)), Just(NormKind::P(2.0)), Just(NormKind::Infinity)];
        (1usize..=3, norm).prop_flat_map(move |(dim, norm)| {
            proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 2 * dim), 1..=max_len).prop_map(
                move |pts| {
                    let pts = pts
                        .into_iter()
                        .map(|c| {
                            ComplexVector::new(c.chunks(2).map(|p| num_complex::Complex64::new(p[0], p[1])).collect())
                                .unwrap()
                        })
                        .collect();
                    PointCloud::new(pts, norm, "random").unwrap()
                },
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn greedy_cover_verifies(cloud in arb_cloud(60), eps in 0.01f64..2.0) {
            let cover = greedy_cover(&cloud, eps).unwrap();
            prop_assert!(verify_cover(&cover, &cloud));
        }

        #[test]
        fn exact_matches_brute_force(cloud in arb_cloud(10), eps in 0.05f64..1.5) {
            prop_assert_eq!(exact_covering_number(&cloud, eps, 64).unwrap(), brute_cover(&cloud, eps));
        }

        #[test]
        fn duality_sandwich(cloud in arb_cloud(40), eps in 0.05f64..1.0) {
            let n = exact_covering_number(&cloud, eps, 64).unwrap();
            prop_assert!(packing_number(&cloud, 2.0 * eps).unwrap() <= n);
            prop_assert!(n <= packing_number(&cloud, eps).unwrap());
        }

        #[test]
        fn covering_number_monotone_in_radius(cloud in arb_cloud(30), eps in 0.05f64..1.0, grow in 1.0f64..3.0) {
            prop_assert!(exact_covering_number(&cloud, eps * grow, 64).unwrap()
                <= exact_covering_number(&cloud, eps, 64).unwrap());
        }

        #[test]
        fn greedy_is_two_approximation(cloud in arb_cloud(24), n in 1usize..6) {
            let exact = exact_entropy_number(&cloud, n, 64).unwrap();
            let b = entropy_number(&cloud, n).unwrap();
            prop_assert!(b.upper <= 2.0 * exact + 1e-12);
            prop_assert!(b.lower <= exact + 1e-12);
            prop_assert!(exact <= b.upper + 1e-12);
        }

        #[test]
        fn upper_bounds_pass_to_subsets(cloud in arb_cloud(40), n in 1usize..6, keep in 0.2f64..1.0) {
            let m = ((cloud.len() as f64 * keep).ceil() as usize).max(1);
            let sub = cloud.select(&(0..m).collect::<Vec<_>>());
            let upper = entropy_number(&cloud, n).unwrap().upper;
            // abstract 𝓔_n(L') ≤ 𝓔_n(L) ≤ upper; the cloud-centered value may double
            let sub_exact = exact_entropy_number(&sub, n, 64).unwrap();
            prop_assert!(sub_exact <= 2.0 * upper + 1e-12);
            prop_assert!(entropy_number(&sub, n).unwrap().lower <= upper + 1e-12);
        }
    }
}
