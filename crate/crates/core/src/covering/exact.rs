//! Exact minimum set cover for clouds of at most 128 points, by depth-first
//! branch and bound over `u128` membership masks.

use crate::metric::PointCloud;

pub(crate) const MASK_BITS: usize = 128;

type Mask = u128;

/// `balls[i]` holds the indices within `epsilon` of point `i` (closed ball).
fn ball_masks(cloud: &PointCloud, epsilon: f64) -> Vec<Mask> {
    let n = cloud.len();
    let mut balls = vec![0 as Mask; n];
    for i in 0..n {
        balls[i] |= 1 << i;
        for j in (i + 1)..n {
            if cloud.dist(i, j) <= epsilon {
                balls[i] |= 1 << j;
                balls[j] |= 1 << i;
            }
        }
    }
    balls
}

fn bits(mut mask: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let i = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(i)
    })
}

struct Search<'a> {
    balls: &'a [Mask],
    best: usize,
}

impl Search<'_> {
    /// Lower bound: uncovered points whose balls are pairwise disjoint
    /// share no center, so each needs its own.
    fn lower_bound(&self, uncovered: Mask) -> usize {
        let mut used: Mask = 0;
        let mut count = 0;
        let mut max_gain = 0;
        for e in bits(uncovered) {
            if self.balls[e] & used == 0 {
                used |= self.balls[e];
                count += 1;
            }
            max_gain = max_gain.max((self.balls[e] & uncovered).count_ones() as usize);
        }
        let volume = (uncovered.count_ones() as usize).div_ceil(max_gain.max(1));
        count.max(volume)
    }

    fn descend(&mut self, uncovered: Mask, depth: usize) {
        if uncovered == 0 {
            self.best = self.best.min(depth);
            return;
        }
        if depth + self.lower_bound(uncovered) >= self.best {
            return;
        }
        // branch on the uncovered point with the fewest candidate centers;
        // the candidates covering e are exactly the points of its ball
        let pivot = bits(uncovered).min_by_key(|&e| (self.balls[e].count_ones(), e)).expect("uncovered is nonzero");
        let mut candidates: Vec<usize> = bits(self.balls[pivot]).collect();
        candidates.sort_by_key(|&c| (std::cmp::Reverse((self.balls[c] & uncovered).count_ones()), c));
        for c in candidates {
            self.descend(uncovered & !self.balls[c], depth + 1);
            if depth + 1 >= self.best {
                break;
            }
        }
    }
}

fn greedy_upper_bound(balls: &[Mask], all: Mask) -> usize {
    let mut uncovered = all;
    let mut count = 0;
    while uncovered != 0 {
        let best = (0..balls.len())
            .max_by_key(|&c| ((balls[c] & uncovered).count_ones(), std::cmp::Reverse(c)))
            .expect("nonempty");
        uncovered &= !balls[best];
        count += 1;
    }
    count
}

/// Minimum number of closed `epsilon`-balls centered at cloud points that
/// cover the cloud. The caller guarantees `cloud.len() <= MASK_BITS`.
pub(crate) fn min_cover(cloud: &PointCloud, epsilon: f64) -> usize {
    let n = cloud.len();
    debug_assert!(n <= MASK_BITS);
    if n == 0 {
        return 0;
    }
    let balls = ball_masks(cloud, epsilon);
    let all: Mask = if n == MASK_BITS { Mask::MAX } else { (1 << n) - 1 };
    let mut search = Search { balls: &balls, best: greedy_upper_bound(&balls, all) };
    search.descend(all, 0);
    search.best
}
