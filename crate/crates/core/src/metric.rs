//! Finite-dimensional complex normed spaces: vectors, `ℓ_p` norms, balls and
//! point clouds.
//!
//! Infinite-dimensional spaces (`c₀`, `ℓ_p`) only ever appear here through
//! explicit finite truncations. Callers that truncate are responsible for
//! carrying the tail error.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Index, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A vector of `ℂ^d` with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("vector dimension must be positive".into()));
        }
        if let Some(i) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(entries))
    }

    /// Embeds real coordinates with zero imaginary part.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        Self(vec![Complex64::new(0.0, 0.0); dim])
    }

    /// `ε_j` (zero-based `j`).
    pub fn basis(dim: usize, j: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[j] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.0
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * factor).collect())
    }

    pub fn norm(&self, norm: NormKind) -> f64 {
        norm.eval(&self.0)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;

    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector addition");
        ComplexVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;

    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector subtraction");
        ComplexVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// The exponent `p` of an `ℓ_p` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    P(f64),
    Infinity,
}

impl NormKind {
    pub fn p(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(Self::Infinity);
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidArgument(format!("norm exponent must be >= 1, got {p}")));
        }
        Ok(Self::P(p))
    }

    pub fn eval(self, entries: &[Complex64]) -> f64 {
        match self {
            Self::Infinity => entries.iter().map(|z| z.norm()).fold(0.0, f64::max),
            Self::P(1.0) => entries.iter().map(|z| z.norm()).sum(),
            Self::P(2.0) => entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            Self::P(p) => {
                // scale by the largest modulus so large p does not overflow
                let max = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
                if max == 0.0 {
                    return 0.0;
                }
                max * entries.iter().map(|z| (z.norm() / max).powf(p)).sum::<f64>().powf(1.0 / p)
            }
        }
    }

    /// `‖x − y‖` without allocating; the slices must have equal length.
    pub(crate) fn dist(self, x: &[Complex64], y: &[Complex64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        match self {
            Self::Infinity => x.iter().zip(y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max),
            Self::P(1.0) => x.iter().zip(y).map(|(a, b)| (a - b).norm()).sum(),
            Self::P(2.0) => x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt(),
            Self::P(_) => {
                let diff: Vec<Complex64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                self.eval(&diff)
            }
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::P(p) => write!(f, "l{p}"),
            Self::Infinity => write!(f, "linf"),
        }
    }
}

/// `‖x − y‖_p`.
pub fn distance(x: &ComplexVector, y: &ComplexVector, norm: NormKind) -> Result<f64> {
    x.check_dim(y)?;
    Ok(norm.dist(x.entries(), y.entries()))
}

/// A finite sample standing in for a bounded set.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<ComplexVector>,
    norm: NormKind,
    pub label: String,
}

impl PointCloud {
    pub fn new(points: Vec<ComplexVector>, norm: NormKind, label: impl Into<String>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidArgument("point cloud must be nonempty; use PointCloud::empty".into()));
        };
        let dim = first.dim();
        if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(Self { points, norm, label: label.into() })
    }

    pub fn empty(norm: NormKind, label: impl Into<String>) -> Self {
        Self { points: Vec::new(), norm, label: label.into() }
    }

    pub fn points(&self) -> &[ComplexVector] {
        &self.points
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Dimension of the points, `None` for the empty cloud.
    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(ComplexVector::dim)
    }

    pub(crate) fn dist(&self, i: usize, j: usize) -> f64 {
        self.norm.dist(self.points[i].entries(), self.points[j].entries())
    }

    /// Largest pairwise distance (quadratic).
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max(self.dist(i, j));
            }
        }
        best
    }

    /// Sub-cloud with the given point indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            norm: self.norm,
            label: self.label.clone(),
        }
    }

    pub fn with_norm(mut self, norm: NormKind) -> Self {
        self.norm = norm;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallSpec {
    pub center: ComplexVector,
    pub radius: f64,
    pub norm: NormKind,
}

impl BallSpec {
    pub fn new(center: ComplexVector, radius: f64, norm: NormKind) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius, norm })
    }

    /// Open ball of the given radius around the origin of `ℂ^dim`.
    pub fn centered(dim: usize, radius: f64, norm: NormKind) -> Result<Self> {
        Self::new(ComplexVector::zeros(dim), radius, norm)
    }
}

const MAX_REJECTIONS_PER_POINT: usize = 100_000;

/// Seeded sample of `count` points of the ball.
///
/// Each coordinate is drawn uniformly from the disc of radius `spec.radius`
/// (so the polydisc circumscribing the ball), and draws outside the `ℓ_p`
/// ball are rejected. The sup-norm ball is the polydisc, so nothing is
/// rejected there.
pub fn sample_ball(spec: &BallSpec, count: usize, seed: u64) -> Result<PointCloud> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let dim = spec.center.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let mut attempts = 0usize;
    let budget = count.saturating_mul(MAX_REJECTIONS_PER_POINT);
    while points.len() < count {
        attempts += 1;
        if attempts > budget {
            return Err(Error::SamplingExhausted { attempts: budget });
        }
        let offset: Vec<Complex64> = (0..dim)
            .map(|_| {
                let r = spec.radius * rng.random::<f64>().sqrt();
                Complex64::from_polar(r, TAU * rng.random::<f64>())
            })
            .collect();
        if spec.norm != NormKind::Infinity && spec.norm.eval(&offset) > spec.radius {
            continue;
        }
        let entries = offset.iter().zip(spec.center.entries()).map(|(o, c)| o + c).collect();
        points.push(ComplexVector(entries));
    }
    PointCloud::new(points, spec.norm, format!("ball(r={})", spec.radius))
}

/// `count` equispaced real points of `[a, b]`, endpoints included.
pub fn grid_segment(a: f64, b: f64, count: usize) -> Result<PointCloud> {
    if !(a < b) || count < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid_segment needs a < b and count >= 2 (a={a}, b={b}, count={count})"
        )));
    }
    let step = (b - a) / (count - 1) as f64;
    let points = (0..count)
        .map(|k| {
            let x = if k == count - 1 { b } else { a + step * k as f64 };
            ComplexVector(vec![Complex64::new(x, 0.0)])
        })
        .collect();
    PointCloud::new(points, NormKind::Infinity, format!("segment[{a},{b}]x{count}"))
}
