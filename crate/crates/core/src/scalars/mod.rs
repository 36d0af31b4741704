//! Scalar rings shared by every other module.
//!
//! Two regimes live side by side: [`Exact`] big rationals for everything
//! defined by finite sums, and [`Approx`] fixed-precision binary floats for
//! quantities that need resummation. Generic code is written against
//! [`Ring`] / [`Field`] so the same routines serve both.

mod approx;
mod context;
mod jet;
mod series;

pub use approx::Approx;
pub use context::Context;
pub use jet::{Jet, Monomial, Symbol};
pub use series::QSeries;

use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exact scalar: an arbitrary-precision rational.
pub type Exact = BigRational;

/// A commutative ring with by-reference right operands.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + Debug
        + PartialEq
        + Zero
        + One
        + Neg<Output = Self>
        + Sub<Output = Self>
        + for<'a> Add<&'a Self, Output = Self>
        + for<'a> Sub<&'a Self, Output = Self>
        + for<'a> Mul<&'a Self, Output = Self>
{
}

/// A ring in which nonzero elements can be inverted.
pub trait Field: Ring + for<'a> Div<&'a Self, Output = Self> {}

impl<T> Field for T where T: Ring + for<'a> Div<&'a Self, Output = Self> {}

/// Scalars that can be built from exact rationals. Implemented by both regimes.
pub trait Scalar: Field + Send + Sync {
    const EXACT: bool;
    fn from_exact(x: &Exact, precision_bits: u32) -> Self;
    fn from_int(n: i64, precision_bits: u32) -> Self {
        Self::from_exact(&Exact::from_integer(BigInt::from(n)), precision_bits)
    }
    /// |x| as an approximate value, for residual bookkeeping.
    fn magnitude(&self, precision_bits: u32) -> Approx;
}

impl Scalar for Exact {
    const EXACT: bool = true;
    fn from_exact(x: &Exact, _: u32) -> Self {
        x.clone()
    }
    fn magnitude(&self, precision_bits: u32) -> Approx {
        Approx::from_exact(&self.abs(), precision_bits)
    }
}

impl Scalar for Approx {
    const EXACT: bool = false;
    fn from_exact(x: &Exact, precision_bits: u32) -> Self {
        Approx::from_exact(x, precision_bits)
    }
    fn magnitude(&self, _: u32) -> Approx {
        self.abs()
    }
}

/// `n` as an exact rational.
pub fn int(n: i64) -> Exact {
    Exact::from_integer(BigInt::from(n))
}

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn frac(n: i64, d: i64) -> Exact {
    Exact::new(BigInt::from(n), BigInt::from(d))
}

/// Integer power with negative exponents allowed. Panics on `0^negative`.
pub fn pow(x: &Exact, e: i64) -> Exact {
    if e >= 0 {
        num::pow::pow(x.clone(), e as usize)
    } else {
        num::pow::pow(x.recip(), e.unsigned_abs() as usize)
    }
}

/// Serializes a rational as `"num/den"` (`"n"` for integers).
pub fn format_exact(x: &Exact) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"n"`, `"n/d"` or a terminating decimal such as `"0.25"`.
pub fn parse_exact(s: &str) -> Option<Exact> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Exact::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = ip.starts_with('-');
        let digits: BigInt = format!("{}{}", ip.trim_start_matches(['-', '+']), fp).parse().ok()?;
        let scale = num::pow::pow(BigInt::from(10), fp.len());
        let v = Exact::new(digits, scale);
        return Some(if neg { -v } else { v });
    }
    s.parse::<BigInt>().ok().map(Exact::from_integer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings_round_trip() {
        for s in ["0", "7", "-3/4", "4/9"] {
            assert_eq!(format_exact(&parse_exact(s).unwrap()), s);
        }
        assert_eq!(parse_exact("0.25"), Some(frac(1, 4)));
        assert_eq!(parse_exact("-1.5"), Some(frac(-3, 2)));
        assert_eq!(parse_exact("6/8"), Some(frac(3, 4)));
        assert!(parse_exact("1/0").is_none());
        assert!(parse_exact("abc").is_none());
    }

    #[test]
    fn negative_powers() {
        assert_eq!(pow(&frac(2, 3), -2), frac(9, 4));
        assert_eq!(pow(&frac(2, 3), 0), int(1));
    }
}
