use super::{Ring, Scalar};
use crate::error::{precondition, Result};

/// Truncated power series `Q^offset · Σ_{m=0}^{degree} coeffs[m] Q^m`.
///
/// All arithmetic keeps exactly `degree + 1` coefficients relative to the
/// offset, so products of valid series stay valid.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries<S> {
    pub coeffs: Vec<S>,
    pub offset: i64,
}

impl<S: Ring> QSeries<S> {
    /// Pads or truncates `coeffs` to `degree + 1` entries.
    pub fn new(mut coeffs: Vec<S>, offset: i64, degree: usize) -> Self {
        coeffs.resize(degree + 1, S::zero());
        QSeries { coeffs, offset }
    }

    pub fn zero(degree: usize) -> Self {
        Self::new(vec![], 0, degree)
    }

    pub fn one(degree: usize) -> Self {
        Self::new(vec![S::one()], 0, degree)
    }

    pub fn constant(c: S, degree: usize) -> Self {
        Self::new(vec![c], 0, degree)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `Q^(offset + m)`.
    pub fn coeff(&self, m: usize) -> &S {
        &self.coeffs[m]
    }

    fn check_compatible(&self, other: &Self, op: &'static str) {
        assert_eq!(self.degree(), other.degree(), "{op}: truncation orders differ");
        assert_eq!(self.offset, other.offset, "{op}: offsets differ");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other, "series_add");
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x.clone() + y).collect();
        QSeries { coeffs, offset: self.offset }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_compatible(other, "series_sub");
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x.clone() - y).collect();
        QSeries { coeffs, offset: self.offset }
    }

    pub fn neg(&self) -> Self {
        QSeries { coeffs: self.coeffs.iter().map(|x| -x.clone()).collect(), offset: self.offset }
    }

    pub fn scale(&self, c: &S) -> Self {
        QSeries { coeffs: self.coeffs.iter().map(|x| x.clone() * c).collect(), offset: self.offset }
    }

    /// Truncated product; offsets add.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree(), "series_mul: truncation orders differ");
        let n = self.degree();
        let mut out = vec![S::zero(); n + 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs[..=n - i].iter().enumerate() {
                out[i + j] = out[i + j].clone() + &(x.clone() * y);
            }
        }
        QSeries { coeffs: out, offset: self.offset + other.offset }
    }

    /// Multiplies coefficientwise-compatible series whose coefficients live in
    /// different rings, e.g. jet-valued times scalar-valued.
    pub fn mul_by<T>(&self, other: &QSeries<T>, act: impl Fn(&S, &T) -> S) -> Self {
        assert_eq!(self.degree(), other.coeffs.len() - 1, "series_mul: truncation orders differ");
        let n = self.degree();
        let mut out = vec![S::zero(); n + 1];
        for i in 0..=n {
            for j in 0..=n - i {
                out[i + j] = out[i + j].clone() + &act(&self.coeffs[i], &other.coeffs[j]);
            }
        }
        QSeries { coeffs: out, offset: self.offset + other.offset }
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> QSeries<T> {
        QSeries { coeffs: self.coeffs.iter().map(f).collect(), offset: self.offset }
    }
}

impl<S: Scalar> QSeries<S> {
    /// Multiplicative inverse; the constant term must be invertible.
    pub fn inv(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return precondition("series_inv", "constant term is 0");
        }
        let n = self.degree();
        let inv0 = S::one() / c0;
        let mut out: Vec<S> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for m in 1..=n {
            let mut acc = S::zero();
            for j in 1..=m {
                acc = acc + &(self.coeffs[j].clone() * &out[m - j]);
            }
            out.push(-(acc * &inv0));
        }
        Ok(QSeries { coeffs: out, offset: -self.offset })
    }

    /// exp of a series with zero constant term and zero offset.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() || self.offset != 0 {
            return precondition("series_exp", format!("constant term {:?} must be 0", self.coeffs[0]));
        }
        // e' = x' e, i.e. m e_m = Σ_j j x_j e_{m-j}
        let n = self.degree();
        let mut out = vec![S::one()];
        for m in 1..=n {
            let mut acc = S::zero();
            for j in 1..=m {
                acc = acc + &(S::from_int(j as i64, 0) * &self.coeffs[j] * &out[m - j]);
            }
            out.push(acc / &S::from_int(m as i64, 0));
        }
        Ok(QSeries { coeffs: out, offset: 0 })
    }

    /// log of a series with constant term 1 and zero offset.
    pub fn log(&self) -> Result<Self> {
        if self.coeffs[0] != S::one() || self.offset != 0 {
            return precondition("series_log", format!("constant term {:?} must be 1", self.coeffs[0]));
        }
        // m l_m = m x_m - Σ_{j=1}^{m-1} j l_j x_{m-j}
        let n = self.degree();
        let mut out = vec![S::zero()];
        for m in 1..=n {
            let mut acc = S::from_int(m as i64, 0) * &self.coeffs[m];
            for j in 1..m {
                acc = acc - &(S::from_int(j as i64, 0) * &out[j] * &self.coeffs[m - j]);
            }
            out.push(acc / &S::from_int(m as i64, 0));
        }
        Ok(QSeries { coeffs: out, offset: 0 })
    }

    /// Quotient `self / other` (requires invertible constant term in `other`).
    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{frac, int, Exact};

    fn s(v: &[i64]) -> QSeries<Exact> {
        QSeries::new(v.iter().map(|&x| int(x)).collect(), 0, v.len() - 1)
    }

    #[test]
    fn inverse_of_one_minus_q() {
        let x = s(&[1, -1, 0, 0, 0]);
        assert_eq!(x.inv().unwrap(), s(&[1, 1, 1, 1, 1]));
        assert!(s(&[0, 1]).inv().is_err());
    }

    #[test]
    fn exp_log_pair() {
        assert_eq!(QSeries::<Exact>::zero(4).exp().unwrap(), QSeries::one(4));
        let c = frac(3, 7);
        let x = QSeries::new(vec![int(0), c.clone()], 0, 5);
        let e = x.exp().unwrap();
        assert_eq!(e.coeffs[2], c.clone() * &c / int(2));
        assert_eq!(e.log().unwrap(), x);
        assert!(s(&[1, 2]).exp().is_err());
        assert!(s(&[2, 2]).log().is_err());
    }

    #[test]
    fn offsets_add_and_invert() {
        let mut x = s(&[2, 1, 0]);
        x.offset = 3;
        let y = x.inv().unwrap();
        assert_eq!(y.offset, -3);
        let p = x.mul(&y);
        assert_eq!(p, s(&[1, 0, 0]));
    }

    proptest::proptest! {
        #[test]
        fn ring_laws(x in proptest::collection::vec(-4i64..5, 5), y in proptest::collection::vec(-4i64..5, 5)) {
            let mut x = s(&x);
            let y = s(&y);
            proptest::prop_assert_eq!(x.mul(&y), y.mul(&x));
            x.coeffs[0] = int(3);
            proptest::prop_assert_eq!(x.mul(&x.inv().unwrap()), QSeries::one(4));
            let mut z = y.clone();
            z.coeffs[0] = int(0);
            proptest::prop_assert_eq!(z.exp().unwrap().log().unwrap(), z);
        }
    }
}
