//! Recovery of the coordinate polynomials `p_j` of an `m`-homogeneous map
//! `P : E → F` from black-box evaluations:
//! `R∘P(Σ a_i x_i) = Σ_j p_j(a) P(x_j)` with `R` the orthogonal projection
//! onto `span{P(x_1), …, P(x_N)}`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::index::{monomials, MultiIndex};
use super::polynomial::FloatPoly;
use crate::error::{Error, Result};
use crate::metric::ComplexVector;

/// Largest roots-of-unity grid before falling back to least squares.
pub const MAX_GRID_POINTS: usize = 32_768;
/// Relative singular-value floor for the image basis `P(x_j)`.
pub const IMAGE_RANK_TOL: f64 = 1e-10;
/// Largest accepted condition number of the interpolation matrix.
pub const MAX_CONDITION: f64 = 1e10;
/// Largest accepted relative reproduction residual.
pub const MAX_RESIDUAL: f64 = 1e-9;

/// Black-box map `E → F` on coordinate vectors.
pub type PolyMap<'a> = dyn Fn(&[Complex64]) -> Vec<Complex64> + Sync + 'a;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpolationMethod {
    /// Discrete Fourier inversion on `{1} × μ_{m+1}^{N−1}`.
    RootsOfUnity,
    /// Least squares on random points of the torus `|a_k| = 1`.
    TorusLeastSquares,
}

#[derive(Debug, Clone)]
pub struct CoordinatePolynomials {
    pub polys: Vec<FloatPoly>,
    pub method: InterpolationMethod,
    /// `σ_max / σ_min` of the interpolation matrix (1 for the DFT grid).
    pub condition: f64,
    /// Worst relative reproduction error at fresh random points.
    pub residual: f64,
}

/// Coordinates of `y` in the basis `P(x_j)` via the pseudo-inverse.
struct Projector {
    pinv: DMatrix<Complex64>,
}

impl Projector {
    fn new(images: &[Vec<Complex64>]) -> Result<Self> {
        let n = images.len();
        let dim = images[0].len();
        if images.iter().any(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: images.iter().map(Vec::len).find(|&l| l != dim).unwrap_or(dim),
            });
        }
        let b = DMatrix::from_fn(dim, n, |i, j| images[j][i]);
        let svd = b.clone().svd(true, true);
        let sv = &svd.singular_values;
        let top = sv.iter().copied().fold(0.0, f64::max);
        let rank = sv.iter().filter(|&&s| s > IMAGE_RANK_TOL * top).count();
        if rank < n || top == 0.0 {
            return Err(Error::RankDeficient { rank, expected: n });
        }
        let pinv = svd.pseudo_inverse(IMAGE_RANK_TOL * top).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(Self { pinv })
    }

    fn coords(&self, y: &[Complex64]) -> Vec<Complex64> {
        let v = DMatrix::from_column_slice(y.len(), 1, y);
        (&self.pinv * v).iter().copied().collect()
    }
}

fn combine(xs: &[ComplexVector], a: &[Complex64]) -> Vec<Complex64> {
    let dim = xs[0].dim();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (x, ai) in xs.iter().zip(a) {
        for (o, xi) in out.iter_mut().zip(x.entries()) {
            *o += ai * xi;
        }
    }
    out
}

fn monomial_value(alpha: &MultiIndex, a: &[Complex64]) -> Complex64 {
    alpha.exponents().iter().zip(a).fold(Complex64::new(1.0, 0.0), |acc, (&e, ai)| acc * ai.powu(e))
}

/// Recovers `p_1, …, p_N` on `ℂ^N`. `seed` drives the least-squares sample
/// points and the reproduction check.
pub fn coordinate_polynomials(
    map: &PolyMap<'_>,
    degree: u32,
    xs: &[ComplexVector],
    seed: u64,
) -> Result<CoordinatePolynomials> {
    let n = xs.len();
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one point x_j".into()));
    }
    let dim = xs[0].dim();
    if let Some(bad) = xs.iter().find(|x| x.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
    }
    let images: Vec<Vec<Complex64>> = xs.iter().map(|x| map(x.entries())).collect();
    let projector = Projector::new(&images)?;
    let eval = |a: &[Complex64]| projector.coords(&map(&combine(xs, a)));
    let basis = monomials(n, degree);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let grid = (degree as usize + 1).checked_pow(n as u32 - 1).filter(|&g| g <= MAX_GRID_POINTS);
    let (coeffs, method, condition) = match grid {
        Some(size) => (roots_of_unity(&eval, &basis, n, degree, size), InterpolationMethod::RootsOfUnity, 1.0),
        None => {
            let (c, cond) = torus_least_squares(&eval, &basis, n, &mut rng)?;
            (c, InterpolationMethod::TorusLeastSquares, cond)
        }
    };

    let polys: Vec<FloatPoly> = (0..n)
        .map(|j| {
            FloatPoly::from_terms(n, degree, basis.iter().cloned().zip(coeffs.iter().map(|c| c[j])))
                .map(|p| p.prune(1e-13))
        })
        .collect::<Result<_>>()?;

    let mut residual: f64 = 0.0;
    for _ in 0..8 {
        let a: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let want = eval(&a);
        let scale = want.iter().map(|w| w.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for (p, w) in polys.iter().zip(&want) {
            residual = residual.max((p.evaluate_unchecked(&a) - w).norm() / scale);
        }
    }
    if residual > MAX_RESIDUAL {
        return Err(Error::IllConditioned { condition, residual });
    }
    Ok(CoordinatePolynomials { polys, method, condition, residual })
}

/// With `a_1 = 1` and `a_k = ω^{t_k}`, `ω = e^{2πi/(m+1)}`, the monomials
/// `Π_{k≥2} a_k^{γ_k}` with `γ_k ≤ m` are orthonormal over the grid, so each
/// coefficient is a grid average.
fn roots_of_unity(
    eval: &impl Fn(&[Complex64]) -> Vec<Complex64>,
    basis: &[MultiIndex],
    n: usize,
    degree: u32,
    size: usize,
) -> Vec<Vec<Complex64>> {
    let order = degree as usize + 1;
    let roots: Vec<Complex64> = (0..order).map(|t| Complex64::from_polar(1.0, TAU * t as f64 / order as f64)).collect();
    let mut acc = vec![vec![Complex64::new(0.0, 0.0); n]; basis.len()];
    let mut digits = vec![0usize; n - 1];
    for _ in 0..size {
        let mut a = vec![Complex64::new(1.0, 0.0)];
        a.extend(digits.iter().map(|&t| roots[t]));
        let values = eval(&a);
        for (slot, gamma) in acc.iter_mut().zip(basis) {
            let weight = monomial_value(gamma, &a).conj();
            for (s, v) in slot.iter_mut().zip(&values) {
                *s += weight * v;
            }
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < order {
                break;
            }
            *d = 0;
        }
    }
    for slot in acc.iter_mut() {
        for s in slot.iter_mut() {
            *s /= size as f64;
        }
    }
    acc
}

fn torus_least_squares(
    eval: &impl Fn(&[Complex64]) -> Vec<Complex64>,
    basis: &[MultiIndex],
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Vec<Complex64>>, f64)> {
    let samples = 2 * basis.len();
    let points: Vec<Vec<Complex64>> =
        (0..samples).map(|_| (0..n).map(|_| Complex64::from_polar(1.0, TAU * rng.random::<f64>())).collect()).collect();
    let a = DMatrix::from_fn(samples, basis.len(), |i, k| monomial_value(&basis[k], &points[i]));
    let mut y = DMatrix::zeros(samples, n);
    for (i, p) in points.iter().enumerate() {
        for (j, v) in eval(p).into_iter().enumerate() {
            y[(i, j)] = v;
        }
    }
    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    let (top, bottom) = sv.iter().fold((0.0f64, f64::INFINITY), |(t, b), &s| (t.max(s), b.min(s)));
    let condition = top / bottom;
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition, residual: f64::NAN });
    }
    let x = svd.solve(&y, 0.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(((0..basis.len()).map(|k| (0..n).map(|j| x[(k, j)]).collect()).collect(), condition))
}
