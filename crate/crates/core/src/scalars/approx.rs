use super::Exact;
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::ops::{BitTest, UnsignedAbs};
use dashu_int::{IBig, Sign, UBig};
use num::{BigInt, One, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

type F = FBig<HalfEven, 2>;

/// Deterministic binary float with round-half-even at a fixed precision.
///
/// Values built with [`Approx::from_exact`] carry their precision; the
/// constants `zero()`/`one()` are exact and adopt the precision of whatever
/// they are combined with.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Approx(F);

fn to_ibig(n: &BigInt) -> IBig {
    let (sign, bytes) = n.to_bytes_le();
    let mag = UBig::from_le_bytes(&bytes);
    match sign {
        num::bigint::Sign::Minus => IBig::from_parts(Sign::Negative, mag),
        _ => IBig::from(mag),
    }
}

impl Approx {
    pub fn from_exact(x: &Exact, precision_bits: u32) -> Self {
        let p = precision_bits as usize;
        let n = F::from(to_ibig(x.numer())).with_precision(p).value();
        if x.denom().is_one() {
            return Approx(n);
        }
        Approx(n / F::from(to_ibig(x.denom())).with_precision(p).value())
    }

    pub fn from_f64(x: f64, precision_bits: u32) -> Self {
        let v = F::try_from(x).expect("finite f64");
        Approx(v.with_precision(precision_bits as usize).value())
    }

    pub fn precision(&self) -> usize {
        self.0.precision()
    }

    pub fn abs(&self) -> Self {
        if self.0.sign() == Sign::Negative {
            Approx(-self.0.clone())
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    /// Base-2 exponent estimate of |x| (`None` for zero).
    pub fn log2_abs(&self) -> Option<f64> {
        if *self.0.repr().significand() == IBig::ZERO {
            return None;
        }
        let (m, e) = (self.0.repr().significand(), self.0.repr().exponent());
        let bits = m.clone().unsigned_abs().bit_len();
        let shift = bits.saturating_sub(60);
        let top: u64 = (m.clone().unsigned_abs() >> shift).try_into().unwrap_or(u64::MAX);
        Some((top as f64).log2() + (shift as isize + e) as f64)
    }

    /// Decimal rendering with `digits` significant digits, e.g. `-1.2345e-21`.
    pub fn to_sci(&self, digits: usize) -> String {
        if *self.0.repr().significand() == IBig::ZERO {
            return "0".into();
        }
        let d = self.0.to_decimal().value().with_precision(digits).value();
        let (sig, exp) = d.into_repr().into_parts();
        let neg = sig.sign() == Sign::Negative;
        let s = sig.unsigned_abs().to_string();
        let e = exp + s.len() as isize - 1;
        let (head, tail) = s.split_at(1);
        let tail = tail.trim_end_matches('0');
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(head);
        if !tail.is_empty() {
            out.push('.');
            out.push_str(tail);
        }
        if e != 0 {
            out.push_str(&format!("e{e}"));
        }
        out
    }

    /// Integer power by repeated squaring, negative exponents allowed.
    pub fn powi(&self, e: i64) -> Self {
        let mut base = if e < 0 { Approx::one() / self } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = Approx::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }

    pub fn max(self, other: Self) -> Self {
        if other.partial_cmp(&self) == Some(Ordering::Greater) {
            other
        } else {
            self
        }
    }
}

impl fmt::Debug for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(20))
    }
}

impl fmt::Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(30))
    }
}

impl Zero for Approx {
    fn zero() -> Self {
        Approx(F::ZERO)
    }
    fn is_zero(&self) -> bool {
        *self.0.repr().significand() == IBig::ZERO
    }
}

impl One for Approx {
    fn one() -> Self {
        Approx(F::ONE)
    }
}

impl Neg for Approx {
    type Output = Approx;
    fn neg(self) -> Approx {
        Approx(-self.0)
    }
}

// Division needs a finite precision; unlimited-precision operands (the exact
// constants) borrow it from the other side.
fn div_fbig(a: &F, b: &F) -> F {
    if a.precision() == 0 && b.precision() == 0 {
        let p = 256;
        a.clone().with_precision(p).value() / b.clone().with_precision(p).value()
    } else {
        a / b
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $e:expr) => {
        impl $tr<Approx> for Approx {
            type Output = Approx;
            fn $m(self, rhs: Approx) -> Approx {
                let f: fn(&F, &F) -> F = $e;
                Approx(f(&self.0, &rhs.0))
            }
        }
        impl<'a> $tr<&'a Approx> for Approx {
            type Output = Approx;
            fn $m(self, rhs: &'a Approx) -> Approx {
                let f: fn(&F, &F) -> F = $e;
                Approx(f(&self.0, &rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'a Approx> for &'b Approx {
            type Output = Approx;
            fn $m(self, rhs: &'a Approx) -> Approx {
                let f: fn(&F, &F) -> F = $e;
                Approx(f(&self.0, &rhs.0))
            }
        }
    };
}

binop!(Add, add, |a, b| a + b);
binop!(Sub, sub, |a, b| a - b);
binop!(Mul, mul, |a, b| a * b);
binop!(Div, div, div_fbig);

impl Approx {
    pub fn is_negative(&self) -> bool {
        self.0.sign() == Sign::Negative
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::frac;

    #[test]
    fn conversion_and_rendering() {
        let third = Approx::from_exact(&frac(1, 3), 256);
        assert_eq!(third.precision(), 256);
        assert_eq!(third.to_sci(10), "3.333333333e-1");
        assert!((third.to_f64() - 1.0 / 3.0).abs() < 1e-16);
        let x = Approx::from_exact(&frac(-5, 2), 64);
        assert_eq!(x.to_sci(5), "-2.5");
        assert_eq!(x.abs().to_sci(5), "2.5");
        assert_eq!(Approx::zero().to_sci(5), "0");
    }

    #[test]
    fn deterministic_expression_tree() {
        let eval = || {
            let mut acc = Approx::zero();
            for n in 1..50 {
                let t = Approx::from_exact(&frac(1, n), 256);
                acc = acc + &(t.clone() * &t);
            }
            acc
        };
        assert_eq!(eval(), eval());
        assert_eq!(format!("{}", eval()), format!("{}", eval()));
    }

    #[test]
    fn powers_and_log2() {
        let h = Approx::from_exact(&frac(1, 2), 128);
        assert_eq!(h.powi(10).to_sci(8), "9.765625e-4");
        assert_eq!(h.powi(-3).to_sci(8), "8");
        assert!((h.powi(300).log2_abs().unwrap() + 300.0).abs() < 1e-9);
        let one_exact = Approx::one() / &Approx::one();
        assert_eq!(one_exact, Approx::one());
    }
}
