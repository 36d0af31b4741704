use super::{Ring, Scalar};
use crate::error::{precondition, Result};
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A coupling constant: `T(k)` is t_k, `TBar(k)` is t̄_k (k ≥ 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    T(u16),
    TBar(u16),
}

impl Symbol {
    fn key(self) -> u16 {
        match self {
            Symbol::T(k) => 2 * (k - 1),
            Symbol::TBar(k) => 2 * (k - 1) + 1,
        }
    }
    fn from_key(key: u16) -> Self {
        if key % 2 == 0 {
            Symbol::T(key / 2 + 1)
        } else {
            Symbol::TBar(key / 2 + 1)
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::T(k) => write!(f, "t{k}"),
            Symbol::TBar(k) => write!(f, "tb{k}"),
        }
    }
}

/// Monomial in the couplings: sorted `(symbol key, exponent)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(u16, u8)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(vec![])
    }

    pub fn var(s: Symbol) -> Self {
        Monomial(vec![(s.key(), 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e as u32).sum()
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        let mut m: BTreeMap<u16, u8> = self.0.iter().copied().collect();
        for &(k, e) in &other.0 {
            *m.entry(k).or_insert(0) += e;
        }
        Monomial(m.into_iter().collect())
    }

    pub fn factors(&self) -> impl Iterator<Item = (Symbol, u8)> + '_ {
        self.0.iter().map(|&(k, e)| (Symbol::from_key(k), e))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors()
            .map(|(s, e)| if e == 1 { s.to_string() } else { format!("{s}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Polynomial in the couplings truncated above total degree `order`.
///
/// `order == u32::MAX` marks an order-agnostic constant (as produced by
/// `zero()`/`one()`); combining jets keeps the smaller order.
#[derive(Clone, Debug)]
pub struct Jet<S> {
    terms: BTreeMap<Monomial, S>,
    order: u32,
}

impl<S: Ring> Jet<S> {
    pub fn constant(c: S, order: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Jet { terms, order }
    }

    pub fn var(s: Symbol, order: u32) -> Self {
        Self::term(Monomial::var(s), S::one(), order)
    }

    pub fn term(m: Monomial, c: S, order: u32) -> Self {
        let mut terms = BTreeMap::new();
        if m.degree() <= order && !c.is_zero() {
            terms.insert(m, c);
        }
        Jet { terms, order }
    }

    /// Σ c_i · s_i.
    pub fn linear(parts: impl IntoIterator<Item = (Symbol, S)>, order: u32) -> Self {
        parts.into_iter().fold(Jet::constant(S::zero(), order), |acc, (s, c)| acc + &Jet::term(Monomial::var(s), c, order))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeff(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn constant_term(&self) -> S {
        self.coeff(&Monomial::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Jet { terms: BTreeMap::new(), order: self.order };
        for (m, x) in &self.terms {
            out.insert_add(m.clone(), x.clone() * c);
        }
        out
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> Jet<T> {
        let mut out = Jet { terms: BTreeMap::new(), order: self.order };
        for (m, x) in &self.terms {
            out.insert_add(m.clone(), f(x));
        }
        out
    }

    fn insert_add(&mut self, m: Monomial, c: S) {
        if m.degree() > self.order {
            return;
        }
        let v = match self.terms.remove(&m) {
            Some(old) => old + &c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(m, v);
        }
    }

    fn combine(&self, other: &Self, sign: bool) -> Self {
        let mut out = Jet { terms: BTreeMap::new(), order: self.order.min(other.order) };
        for (m, x) in &self.terms {
            out.insert_add(m.clone(), x.clone());
        }
        for (m, y) in &other.terms {
            out.insert_add(m.clone(), if sign { y.clone() } else { -y.clone() });
        }
        out
    }

    fn product(&self, other: &Self) -> Self {
        let mut out = Jet { terms: BTreeMap::new(), order: self.order.min(other.order) };
        for (m1, x) in &self.terms {
            for (m2, y) in &other.terms {
                if m1.degree() + m2.degree() <= out.order {
                    out.insert_add(m1.times(m2), x.clone() * y);
                }
            }
        }
        out
    }
}

impl<S: Scalar> Jet<S> {
    /// Truncated exponential of a jet with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return precondition("jet_exp", format!("constant term {:?} must be 0", self.constant_term()));
        }
        if self.order == u32::MAX {
            return Ok(Jet::one());
        }
        let mut out = Jet::constant(S::one(), self.order);
        let mut power = out.clone();
        for n in 1..=self.order {
            power = power.product(self).scale(&(S::one() / &S::from_int(n as i64, 0)));
            if power.terms.is_empty() {
                break;
            }
            out = out + &power;
        }
        Ok(out)
    }
}

impl<S: Ring> PartialEq for Jet<S> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<S: Ring> Zero for Jet<S> {
    fn zero() -> Self {
        Jet { terms: BTreeMap::new(), order: u32::MAX }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<S: Ring> One for Jet<S> {
    fn one() -> Self {
        Jet::constant(S::one(), u32::MAX)
    }
}

impl<S: Ring> Neg for Jet<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|x| -x.clone())
    }
}

impl<S: Ring> Add for Jet<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.combine(&rhs, true)
    }
}

impl<'a, S: Ring> Add<&'a Jet<S>> for Jet<S> {
    type Output = Self;
    fn add(self, rhs: &'a Self) -> Self {
        self.combine(rhs, true)
    }
}

impl<S: Ring> Sub for Jet<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.combine(&rhs, false)
    }
}

impl<'a, S: Ring> Sub<&'a Jet<S>> for Jet<S> {
    type Output = Self;
    fn sub(self, rhs: &'a Self) -> Self {
        self.combine(rhs, false)
    }
}

impl<S: Ring> Mul for Jet<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.product(&rhs)
    }
}

impl<'a, S: Ring> Mul<&'a Jet<S>> for Jet<S> {
    type Output = Self;
    fn mul(self, rhs: &'a Self) -> Self {
        self.product(rhs)
    }
}
