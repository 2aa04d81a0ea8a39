use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::polynomial::HomogeneousPolynomial;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Default relative singular-value cutoff for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Row-major matrix of polynomials sharing the number of variables.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix<C: Scalar> {
    rows: usize,
    cols: usize,
    entries: Vec<HomogeneousPolynomial<C>>,
}

impl<C: Scalar> PolyMatrix<C> {
    pub fn new(rows: usize, cols: usize, entries: Vec<HomogeneousPolynomial<C>>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: entries.len() });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &HomogeneousPolynomial<C> {
        &self.entries[i * self.cols + j]
    }

    pub fn evaluate(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).evaluate_unchecked(z))
    }
}

/// Shared `(nvars, degree)` of a nonempty family.
pub(crate) fn family_shape<C: Scalar>(polys: &[HomogeneousPolynomial<C>]) -> Result<(usize, u32)> {
    let first = polys.first().ok_or_else(|| Error::InvalidArgument("empty polynomial family".into()))?;
    for p in polys {
        if p.nvars() != first.nvars() {
            return Err(Error::DimensionMismatch { expected: first.nvars(), found: p.nvars() });
        }
        if p.degree() != first.degree() {
            return Err(Error::InvalidArgument("family members must share their degree".into()));
        }
    }
    Ok((first.nvars(), first.degree()))
}

/// `(∂p_i/∂z_j)`, an `r × N` matrix of degree-`(m−1)` entries.
pub fn jacobian<C: Scalar>(polys: &[HomogeneousPolynomial<C>]) -> Result<PolyMatrix<C>> {
    let (nvars, _) = family_shape(polys)?;
    let entries = polys.iter().flat_map(|p| (0..nvars).map(move |j| p.derivative(j))).collect();
    PolyMatrix::new(polys.len(), nvars, entries)
}

/// Determinant of the submatrix on `rows × cols`, by Laplace expansion
/// along the first selected row.
pub fn poly_minor<C: Scalar>(m: &PolyMatrix<C>, rows: &[usize], cols: &[usize]) -> Result<HomogeneousPolynomial<C>> {
    if rows.len() != cols.len() || rows.is_empty() {
        return Err(Error::InvalidArgument("minor needs a nonempty square selection".into()));
    }
    if rows.iter().any(|&i| i >= m.rows) || cols.iter().any(|&j| j >= m.cols) {
        return Err(Error::InvalidArgument("minor selection out of range".into()));
    }
    Ok(laplace(m, rows, cols))
}

fn laplace<C: Scalar>(m: &PolyMatrix<C>, rows: &[usize], cols: &[usize]) -> HomogeneousPolynomial<C> {
    if rows.len() == 1 {
        return m.get(rows[0], cols[0]).clone();
    }
    let entry_degree = m.get(rows[0], cols[0]).degree();
    let nvars = m.get(rows[0], cols[0]).nvars();
    let mut det = HomogeneousPolynomial::zero(nvars, entry_degree * rows.len() as u32);
    for (k, &c) in cols.iter().enumerate() {
        let entry = m.get(rows[0], c);
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &j)| j).collect();
        let term = entry.mul(&laplace(m, &rows[1..], &rest)).expect("shared nvars");
        let signed = if k % 2 == 0 { term } else { term.scale(&-C::one()) };
        det = det.add(&signed).expect("same degree");
    }
    det
}

/// Singular values above `tol × σ_max`.
pub fn numerical_rank(m: &DMatrix<Complex64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top).count()
}

/// Maximum numerical rank of the Jacobian over `trials` seeded points with
/// coordinates uniform in the square `[-1, 1]²`.
pub fn generic_rank<C: Scalar>(
    polys: &[HomogeneousPolynomial<C>],
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<usize> {
    if trials == 0 {
        return Err(Error::InvalidArgument("generic_rank needs at least one trial".into()));
    }
    let jac = jacobian(polys)?;
    let nvars = jac.cols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<Complex64>> = (0..trials)
        .map(|_| {
            (0..nvars)
                .map(|_| Complex64::new(2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0))
                .collect()
        })
        .collect();
    Ok(points.par_iter().map(|z| numerical_rank(&jac.evaluate(z), tol)).max().unwrap_or(0))
}
