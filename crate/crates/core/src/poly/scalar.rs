use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact complex rational.
pub type Exact = Complex<BigRational>;

/// Coefficient field of a polynomial: `Complex64` for numeric work,
/// [`Exact`] for symbolic paths.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_u64(k: u64) -> Self;
    fn to_c64(&self) -> Complex64;
    /// Text form used by the polynomial format.
    fn write_coeff(&self) -> String;
    fn parse_coeff(text: &str) -> Result<Self>;
}

/// Splits `(a+bi)` / `(a-bi)` into its two parts, keeping the sign on `b`.
fn split_complex(text: &str) -> Option<(&str, &str)> {
    let inner = text.strip_prefix('(')?.strip_suffix(')')?.strip_suffix('i')?;
    let bytes = inner.as_bytes();
    let k =
        (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))?;
    let im = &inner[k..];
    Some((&inner[..k], im.strip_prefix('+').unwrap_or(im)))
}

fn parse_part<T: FromStr>(text: &str, whole: &str) -> Result<T> {
    text.trim().parse().map_err(|_| Error::Parse(format!("invalid coefficient `{whole}`")))
}

impl Scalar for Complex64 {
    fn from_u64(k: u64) -> Self {
        Complex64::new(k as f64, 0.0)
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn write_coeff(&self) -> String {
        if self.im == 0.0 {
            format!("{}", self.re)
        } else {
            let sign = if self.im.is_sign_negative() { '-' } else { '+' };
            format!("({}{}{}i)", self.re, sign, self.im.abs())
        }
    }

    fn parse_coeff(text: &str) -> Result<Self> {
        match split_complex(text) {
            Some((re, im)) => Ok(Complex64::new(parse_part(re, text)?, parse_part(im, text)?)),
            None => Ok(Complex64::new(parse_part(text, text)?, 0.0)),
        }
    }
}

impl Scalar for Exact {
    fn from_u64(k: u64) -> Self {
        Exact::new(BigRational::from_integer(BigInt::from(k)), BigRational::zero())
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    fn write_coeff(&self) -> String {
        if self.im.is_zero() {
            self.re.to_string()
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            format!("({}{}{}i)", self.re, sign, self.im.abs())
        }
    }

    fn parse_coeff(text: &str) -> Result<Self> {
        match split_complex(text) {
            Some((re, im)) => Ok(Exact::new(parse_part(re, text)?, parse_part(im, text)?)),
            None => Ok(Exact::new(parse_part(text, text)?, BigRational::zero())),
        }
    }
}

pub fn exact_int(re: i64, im: i64) -> Exact {
    Exact::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
}

pub fn exact_ratio(num: i64, den: i64) -> Exact {
    Exact::new(BigRational::new(num.into(), den.into()), BigRational::zero())
}

/// Exact value of a finite double.
pub fn exact_from_c64(z: Complex64) -> Result<Exact> {
    let conv = |x: f64| BigRational::from_float(x).ok_or(Error::NonFinite(0));
    Ok(Exact::new(conv(z.re)?, conv(z.im)?))
}
