//! The linear system for the coefficients `P_γ` of degree-`m` solutions of
//!
//! ```text
//! Q ∂P/∂z_j + Σ_{i ≤ r} Q_ij ∂P/∂z_i = 0,   j = r+1..N,
//! ```
//!
//! and its exact corank.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::index::{binomial, monomial_count, monomials, MultiIndex};
use super::matrix::{family_shape, generic_rank, jacobian, poly_minor, PolyMatrix};
use super::polynomial::ExactPoly;
use super::scalar::{Exact, Scalar};
use crate::error::{Error, Result};

/// Gaussian integer.
type GInt = Complex<BigInt>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeCaps {
    pub nvars: usize,
    pub degree: u32,
    pub rank: usize,
}

impl Default for SizeCaps {
    fn default() -> Self {
        Self { nvars: 10, degree: 4, rank: 3 }
    }
}

impl SizeCaps {
    fn check(&self, nvars: usize, degree: u32, rank: usize) -> Result<()> {
        if nvars > self.nvars {
            return Err(Error::CapExceeded { what: "N", value: nvars, cap: self.nvars });
        }
        if degree > self.degree {
            return Err(Error::CapExceeded { what: "m", value: degree as usize, cap: self.degree as usize });
        }
        if rank > self.rank {
            return Err(Error::CapExceeded { what: "r", value: rank, cap: self.rank });
        }
        Ok(())
    }
}

/// The leading minor `Q` and the cofactors `Q_ij` of a Jacobian, after
/// moving a nonzero `r × r` minor to the front.
#[derive(Debug, Clone)]
pub struct LeadingMinors {
    /// Columns (0-based variables) of the nonzero minor, in order.
    pub lead: Vec<usize>,
    /// The remaining variables, ascending.
    pub rest: Vec<usize>,
    pub q: ExactPoly,
    /// `q_ij[i][k]` belongs to lead position `i` and variable `rest[k]`.
    pub q_ij: Vec<Vec<ExactPoly>>,
}

impl LeadingMinors {
    /// Variable order `lead ++ rest`.
    pub fn permutation(&self) -> Vec<usize> {
        self.lead.iter().chain(&self.rest).copied().collect()
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Finds the first column set (lexicographically) with a nonzero minor and
/// builds `Q_ij = −det(J_lead with column i replaced by column j)`, which
/// makes every `p_i` a solution.
pub fn leading_minors(polys: &[ExactPoly]) -> Result<LeadingMinors> {
    let (nvars, _) = family_shape(polys)?;
    let r = polys.len();
    if r > nvars {
        return Err(Error::DegenerateFamily(format!("{r} polynomials in {nvars} variables cannot have rank {r}")));
    }
    let jac: PolyMatrix<Exact> = jacobian(polys)?;
    let rows: Vec<usize> = (0..r).collect();
    for lead in combinations(nvars, r) {
        let q = poly_minor(&jac, &rows, &lead)?;
        if q.is_zero() {
            continue;
        }
        let rest: Vec<usize> = (0..nvars).filter(|j| !lead.contains(j)).collect();
        let q_ij = (0..r)
            .map(|i| {
                rest.iter()
                    .map(|&j| {
                        let mut cols = lead.clone();
                        cols[i] = j;
                        poly_minor(&jac, &rows, &cols).map(|d| d.scale(&-Exact::one()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(LeadingMinors { lead, rest, q, q_ij });
    }
    Err(Error::DegenerateFamily("every r × r minor of the Jacobian vanishes identically".into()))
}

/// Sparse exact system; only structurally nonzero rows are stored.
#[derive(Debug, Clone)]
pub struct CoefficientSystem {
    pub nvars: usize,
    pub degree: u32,
    pub r: usize,
    pub minors: LeadingMinors,
    /// Column labels `γ`, ascending.
    pub unknowns: Vec<MultiIndex>,
    /// Row labels `(j, δ)` with `j` a 0-based variable outside the lead set.
    pub row_labels: Vec<(usize, MultiIndex)>,
    pub rows: Vec<Vec<(usize, Exact)>>,
}

impl CoefficientSystem {
    /// `C(N + d − 1, d) · (N − r)` with `d = r(m−1) + m − 1`.
    pub fn nominal_row_count(&self) -> u64 {
        let d = self.r as u32 * (self.degree - 1) + self.degree - 1;
        monomial_count(self.nvars, d) * (self.nvars - self.r) as u64
    }

    pub fn unknown_count(&self) -> usize {
        self.unknowns.len()
    }

    /// Exact substitution of `p`'s coefficients into every row.
    pub fn is_solution(&self, p: &ExactPoly) -> Result<bool> {
        if p.nvars() != self.nvars || p.degree() != self.degree {
            return Err(Error::InvalidArgument("polynomial shape does not match the system".into()));
        }
        let values: Vec<Exact> = self.unknowns.iter().map(|g| p.coeff(g)).collect();
        Ok(self
            .rows
            .iter()
            .all(|row| row.iter().fold(Exact::zero(), |acc, (c, v)| acc + v.clone() * values[*c].clone()).is_zero()))
    }
}

pub fn assemble_oxis(polys: &[ExactPoly], caps: &SizeCaps) -> Result<CoefficientSystem> {
    let (nvars, degree) = family_shape(polys)?;
    let r = polys.len();
    caps.check(nvars, degree, r)?;
    if degree == 0 {
        return Err(Error::DegenerateFamily("constant polynomials have a zero Jacobian".into()));
    }
    let minors = leading_minors(polys)?;
    let unknowns = monomials(nvars, degree);
    let mut table: BTreeMap<(usize, MultiIndex), BTreeMap<usize, Exact>> = BTreeMap::new();
    let mut push = |j: usize, delta: MultiIndex, col: usize, value: Exact| {
        let slot = table.entry((j, delta)).or_default().entry(col).or_insert_with(Exact::zero);
        *slot = slot.clone() + value;
    };
    for (col, gamma) in unknowns.iter().enumerate() {
        for (k, &j) in minors.rest.iter().enumerate() {
            // Q ∂z^γ/∂z_j
            if let Some(base) = gamma.sub_unit(j) {
                let factor = Exact::from_u64(gamma.exponents()[j] as u64);
                for (alpha, q) in minors.q.terms() {
                    push(j, alpha.add(&base), col, factor.clone() * q.clone());
                }
            }
            // Σ_i Q_ij ∂z^γ/∂z_{lead_i}
            for (i, &li) in minors.lead.iter().enumerate() {
                if let Some(base) = gamma.sub_unit(li) {
                    let factor = Exact::from_u64(gamma.exponents()[li] as u64);
                    for (beta, q) in minors.q_ij[i][k].terms() {
                        push(j, beta.add(&base), col, factor.clone() * q.clone());
                    }
                }
            }
        }
    }
    let (row_labels, rows) = table
        .into_iter()
        .filter_map(|(label, entries)| {
            let row: Vec<(usize, Exact)> = entries.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            (!row.is_empty()).then_some((label, row))
        })
        .unzip();
    Ok(CoefficientSystem { nvars, degree, r, minors, unknowns, row_labels, rows })
}

/// Clears denominators of an exact row into Gaussian integers.
fn integral_row(row: &[Exact]) -> Vec<GInt> {
    let lcm = row.iter().flat_map(|z| [z.re.denom(), z.im.denom()]).fold(BigInt::one(), |acc, d| acc.lcm(d));
    let scale = BigRational::from_integer(lcm);
    row.iter()
        .map(|z| {
            let re = (&z.re * &scale).to_integer();
            let im = (&z.im * &scale).to_integer();
            GInt::new(re, im)
        })
        .collect()
}

/// Divides out the rational-integer content of a row.
fn primitive(mut row: Vec<GInt>) -> Vec<GInt> {
    let g = row.iter().flat_map(|z| [&z.re, &z.im]).fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g > BigInt::one() {
        for z in &mut row {
            z.re /= &g;
            z.im /= &g;
        }
    }
    row
}

/// Exact quotient of Gaussian integers.
fn exact_div(a: &GInt, b: &GInt) -> GInt {
    let norm = &b.re * &b.re + &b.im * &b.im;
    let re = &a.re * &b.re + &a.im * &b.im;
    let im = &a.im * &b.re - &a.re * &b.im;
    debug_assert!((&re % &norm).is_zero() && (&im % &norm).is_zero(), "Bareiss division must be exact");
    GInt::new(re / &norm, im / norm)
}

/// Fraction-free (Bareiss) row echelon form; returns the nonzero rows.
fn bareiss_echelon(mut a: Vec<Vec<GInt>>, ncols: usize) -> Vec<Vec<GInt>> {
    let nrows = a.len();
    let mut prev = GInt::one();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let (top, bottom) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = pivot_row[col].clone();
        for row in bottom.iter_mut() {
            let factor = row[col].clone();
            for k in col + 1..ncols {
                let v = &pivot * &row[k] - &factor * &pivot_row[k];
                row[k] = exact_div(&v, &prev);
            }
            row[col] = GInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    a.truncate(rank);
    a
}

fn dense(row: &[(usize, Exact)], ncols: usize) -> Vec<Exact> {
    let mut d = vec![Exact::zero(); ncols];
    for (c, v) in row {
        d[*c] = v.clone();
    }
    d
}

/// Exact rank of a row set, eliminating in chunks so that the working
/// matrix never holds more than about twice `ncols` rows.
pub(crate) fn exact_rank(rows: impl IntoIterator<Item = Vec<Exact>>, ncols: usize) -> usize {
    let chunk = ncols.max(16);
    let mut basis: Vec<Vec<GInt>> = Vec::new();
    let mut pending: Vec<Vec<GInt>> = Vec::new();
    let flush = |basis: &mut Vec<Vec<GInt>>, pending: &mut Vec<Vec<GInt>>| {
        let mut work = std::mem::take(basis);
        work.append(pending);
        *basis = bareiss_echelon(work, ncols).into_iter().map(primitive).collect();
    };
    for row in rows {
        if basis.len() == ncols {
            break;
        }
        if row.iter().all(Zero::is_zero) {
            continue;
        }
        pending.push(primitive(integral_row(&row)));
        if pending.len() >= chunk {
            flush(&mut basis, &mut pending);
        }
    }
    if !pending.is_empty() {
        flush(&mut basis, &mut pending);
    }
    basis.len()
}

/// Dimension of the solution space.
pub fn corank(system: &CoefficientSystem) -> usize {
    let ncols = system.unknown_count();
    ncols - exact_rank(system.rows.iter().map(|r| dense(r, ncols)), ncols)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorankReport {
    pub corank: usize,
    /// `C(m+r−1, r−1)`, the number of degree-`m` monomials in `r` variables.
    pub monomial_bound: u64,
    /// `C(r+m−2, m−2)` (zero for `m < 2`).
    pub statement_binomial: u64,
    /// `C(r+m−1, m−1)`.
    pub proof_binomial: u64,
    pub within_bound: bool,
}

pub fn corank_report(system: &CoefficientSystem) -> CorankReport {
    let (r, m) = (system.r as u64, system.degree as u64);
    let corank = corank(system);
    let monomial_bound = binomial(m + r - 1, r - 1);
    CorankReport {
        corank,
        monomial_bound,
        statement_binomial: if m >= 2 { binomial(r + m - 2, m - 2) } else { 0 },
        proof_binomial: binomial(r + m - 1, m - 1),
        within_bound: corank as u64 <= monomial_bound,
    }
}

fn coefficient_rows(family: &[ExactPoly], basis: &[MultiIndex]) -> Vec<Vec<Exact>> {
    family.iter().map(|p| basis.iter().map(|g| p.coeff(g)).collect()).collect()
}

/// A nonzero `c` with `Σ c_k p_k = 0`, by reduced row echelon form of the
/// transposed coefficient matrix over `ℚ(i)`.
fn dependency(family: &[ExactPoly], basis: &[MultiIndex]) -> Option<Vec<Exact>> {
    let n = family.len();
    let rows = coefficient_rows(family, basis);
    let mut a: Vec<Vec<Exact>> = (0..basis.len()).map(|g| (0..n).map(|k| rows[k][g].clone()).collect()).collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let inv = Exact::one() / a[rank][col].clone();
        for v in a[rank].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot = a[rank].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pk) in row.iter_mut().zip(&pivot) {
                    *v = v.clone() - f.clone() * pk.clone();
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut c = vec![Exact::zero(); n];
    c[free] = Exact::one();
    for (row, &pc) in pivots.iter().enumerate() {
        c[pc] = -a[row][free].clone();
    }
    Some(c)
}

/// Exact rank of the family's coefficient matrix.
pub fn family_rank(family: &[ExactPoly]) -> Result<usize> {
    let (nvars, degree) = family_shape(family)?;
    let basis = monomials(nvars, degree);
    Ok(exact_rank(coefficient_rows(family, &basis), basis.len()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryReport {
    pub family_size: usize,
    pub degree: u32,
    pub rank: usize,
    /// `N^{1/m} − m`.
    pub bound: f64,
    pub pass: bool,
    /// `N ≤ C(m+r−1, r−1) ≤ (r+m)^m` at the measured rank.
    pub chain_holds: bool,
}

/// Checks `rank J ≥ N^{1/m} − m` for a linearly independent family.
pub fn corollary_check(family: &[ExactPoly], trials: usize, seed: u64, tol: f64) -> Result<CorollaryReport> {
    let (nvars, degree) = family_shape(family)?;
    if nvars > SizeCaps::default().nvars {
        return Err(Error::CapExceeded { what: "N", value: nvars, cap: SizeCaps::default().nvars });
    }
    let basis = monomials(nvars, degree);
    if let Some(c) = dependency(family, &basis) {
        let certificate = c
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| format!("{} * p{}", v.write_coeff(), k + 1))
            .collect::<Vec<_>>()
            .join(" + ");
        return Err(Error::DependentFamily { certificate: format!("{certificate} = 0") });
    }
    let rank = generic_rank(family, trials, seed, tol)?;
    let n = family.len();
    let bound = (n as f64).powf(1.0 / degree as f64) - degree as f64;
    let (r, m) = (rank as u64, degree as u64);
    let monomial_bound = if r == 0 { 0 } else { binomial(m + r - 1, r - 1) };
    let chain_holds = n as u64 <= monomial_bound && (monomial_bound as f64) <= ((r + m) as f64).powi(degree as i32);
    Ok(CorollaryReport { family_size: n, degree, rank, bound, pass: rank as f64 >= bound, chain_holds })
}
