use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::index::MultiIndex;
use super::scalar::{exact_from_c64, Exact, Scalar};
use crate::error::{Error, Result};

/// `P = Σ_{|γ| = m} P_γ z^γ` on `ℂ^N`, with no stored zero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPolynomial<C: Scalar> {
    nvars: usize,
    degree: u32,
    coeffs: BTreeMap<MultiIndex, C>,
}

pub type ExactPoly = HomogeneousPolynomial<Exact>;
pub type FloatPoly = HomogeneousPolynomial<Complex64>;

impl<C: Scalar> HomogeneousPolynomial<C> {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        Self { nvars, degree, coeffs: BTreeMap::new() }
    }

    /// Sums repeated indices and drops zeros.
    pub fn from_terms(nvars: usize, degree: u32, terms: impl IntoIterator<Item = (MultiIndex, C)>) -> Result<Self> {
        let mut p = Self::zero(nvars, degree);
        for (alpha, c) in terms {
            if alpha.nvars() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, found: alpha.nvars() });
            }
            if alpha.degree() != degree {
                return Err(Error::InvalidArgument(format!(
                    "monomial {alpha} has degree {} in a degree-{degree} polynomial",
                    alpha.degree()
                )));
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    pub fn monomial(alpha: MultiIndex, coeff: C) -> Self {
        let mut p = Self::zero(alpha.nvars(), alpha.degree());
        p.add_term(alpha, coeff);
        p
    }

    /// `z_j^m`.
    pub fn power(nvars: usize, j: usize, degree: u32) -> Self {
        let mut e = vec![0; nvars];
        e[j] = degree;
        Self::monomial(MultiIndex::new(e), C::one())
    }

    fn add_term(&mut self, alpha: MultiIndex, c: C) {
        let entry = self.coeffs.entry(alpha);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> C {
        self.coeffs.get(alpha).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: z.len() });
        }
        Ok(self.evaluate_unchecked(z))
    }

    pub(crate) fn evaluate_unchecked(&self, z: &[Complex64]) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(alpha, c)| alpha.exponents().iter().zip(z).fold(c.to_c64(), |acc, (&a, zi)| acc * zi.powu(a)))
            .sum()
    }

    /// `∂P/∂z_j` (0-based `j`), of degree `m − 1`.
    pub fn derivative(&self, j: usize) -> Self {
        let mut d = Self::zero(self.nvars, self.degree.saturating_sub(1));
        for (alpha, c) in &self.coeffs {
            if let Some(beta) = alpha.sub_unit(j) {
                let k = alpha.exponents()[j] as u64;
                d.add_term(beta, C::from_u64(k) * c.clone());
            }
        }
        d
    }

    pub fn scale(&self, factor: &C) -> Self {
        let mut p = Self::zero(self.nvars, self.degree);
        for (alpha, c) in &self.coeffs {
            p.add_term(alpha.clone(), c.clone() * factor.clone());
        }
        p
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: other.nvars });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::InvalidArgument("sum of polynomials of different degree".into()));
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let mut p = Self { nvars: self.nvars, degree, coeffs: self.coeffs.clone() };
        for (alpha, c) in &other.coeffs {
            p.add_term(alpha.clone(), c.clone());
        }
        Ok(p)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-C::one()))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut p = Self::zero(self.nvars, self.degree + other.degree);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                p.add_term(a.add(b), ca.clone() * cb.clone());
            }
        }
        Ok(p)
    }

    /// Multiplication by the variable `z_j`.
    pub fn shift(&self, j: usize) -> Self {
        Self {
            nvars: self.nvars,
            degree: self.degree + 1,
            coeffs: self.coeffs.iter().map(|(a, c)| (a.add_unit(j), c.clone())).collect(),
        }
    }

    /// Symbolic check of `Σ_j z_j ∂P/∂z_j = m P`.
    pub fn euler_identity_holds(&self) -> bool {
        let mut lhs = Self::zero(self.nvars, self.degree);
        for j in 0..self.nvars {
            lhs = lhs.add(&self.derivative(j).shift(j)).expect("same shape");
        }
        lhs.coeffs == self.scale(&C::from_u64(self.degree as u64)).coeffs
    }

    pub fn to_float(&self) -> FloatPoly {
        HomogeneousPolynomial {
            nvars: self.nvars,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(a, c)| (a.clone(), c.to_c64())).collect(),
        }
    }
}

impl FloatPoly {
    /// Exact polynomial with the same (binary) coefficients.
    pub fn rationalize(&self) -> Result<ExactPoly> {
        ExactPoly::from_terms(
            self.nvars,
            self.degree,
            self.coeffs.iter().map(|(a, c)| Ok((a.clone(), exact_from_c64(*c)?))).collect::<Result<Vec<_>>>()?,
        )
    }

    /// Drops coefficients with modulus at most `tol` times the largest one.
    pub fn prune(&self, tol: f64) -> Self {
        let scale = self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max);
        Self {
            nvars: self.nvars,
            degree: self.degree,
            coeffs: self.coeffs.iter().filter(|(_, c)| c.norm() > tol * scale).map(|(a, c)| (a.clone(), *c)).collect(),
        }
    }
}

/// `coeff * z1^a1 z2^a2 ... zN^aN` terms in ascending monomial order,
/// joined by ` + `; the zero polynomial is `0`.
impl<C: Scalar> fmt::Display for HomogeneousPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (alpha, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{} * {}", c.write_coeff(), alpha)?;
        }
        Ok(())
    }
}

fn parse_term(text: &str) -> Result<(MultiIndex, &str)> {
    let bad = || Error::Parse(format!("invalid term `{text}`"));
    let (coeff, monomial) = text.split_once(" * ").ok_or_else(bad)?;
    let mut exps = Vec::new();
    for (k, factor) in monomial.split_whitespace().enumerate() {
        let (var, exp) = factor.split_once('^').ok_or_else(bad)?;
        let index: usize = var.strip_prefix('z').and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        if index != k + 1 {
            return Err(Error::Parse(format!("expected z{} in `{text}`", k + 1)));
        }
        exps.push(exp.parse().map_err(|_| bad())?);
    }
    if exps.is_empty() {
        return Err(bad());
    }
    Ok((MultiIndex::new(exps), coeff.trim()))
}

impl<C: Scalar> HomogeneousPolynomial<C> {
    /// Parses the text format; `0` needs the shape supplied here.
    pub fn parse_with_shape(text: &str, nvars: usize, degree: u32) -> Result<Self> {
        let p: Self = if text.trim() == "0" { Self::zero(nvars, degree) } else { text.parse()? };
        if p.nvars != nvars || p.degree != degree {
            return Err(Error::Parse(format!(
                "expected {nvars} variables and degree {degree}, found {} and {}",
                p.nvars, p.degree
            )));
        }
        Ok(p)
    }
}

impl<C: Scalar> FromStr for HomogeneousPolynomial<C> {
    type Err = Error;

    /// Shape is taken from the first term. `0` parses to the zero polynomial
    /// in one variable of degree zero.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "0" {
            return Ok(Self::zero(1, 0));
        }
        let mut terms = Vec::new();
        for piece in text.split(" + ") {
            let (alpha, coeff) = parse_term(piece.trim())?;
            terms.push((alpha, C::parse_coeff(coeff)?));
        }
        let (nvars, degree) = (terms[0].0.nvars(), terms[0].0.degree());
        Self::from_terms(nvars, degree, terms).map_err(|e| Error::Parse(e.to_string()))
    }
}
