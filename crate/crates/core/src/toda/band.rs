//! Bi-infinite matrices seen through a finite window of lattice sites.
//!
//! A = Σ_j a_j(Δ) Λ^j is stored by diagonals: offset j holds a_j(n) = A_{n,n+j}
//! for rows n in the window (zero where the column leaves the window).
//! Entries at window positions are those of the bi-infinite matrix as long as
//! both row and column lie at least `valid_margin` sites inside the window.

use crate::scalars::{format_exact, Approx, Exact, Scalar};
use serde_json::{json, Value};
use std::collections::BTreeMap;

pub const SCHEMA: &str = "orbicrystal.matrix/1";

#[derive(Clone, Debug, PartialEq)]
pub struct BandMatrix<S> {
    pub window: (i64, i64),
    pub diagonals: BTreeMap<i64, Vec<S>>,
    pub valid_margin: usize,
    /// The underlying matrix extends past the window below / above the diagonal.
    pub infinite_below: bool,
    pub infinite_above: bool,
}

impl<S: Scalar> BandMatrix<S> {
    pub fn zero(window: (i64, i64)) -> Self {
        assert!(window.0 <= window.1, "empty window");
        BandMatrix { window, diagonals: BTreeMap::new(), valid_margin: 0, infinite_below: false, infinite_above: false }
    }

    pub fn size(&self) -> usize {
        (self.window.1 - self.window.0 + 1) as usize
    }

    fn inside(&self, n: i64) -> bool {
        (self.window.0..=self.window.1).contains(&n)
    }

    /// Σ_n f(n) E_{n,n+j}.
    pub fn from_diagonal(window: (i64, i64), j: i64, f: impl Fn(i64) -> S) -> Self {
        let mut m = Self::zero(window);
        m.set_diagonal(j, f);
        m
    }

    pub fn identity(window: (i64, i64)) -> Self {
        Self::from_diagonal(window, 0, |_| S::one())
    }

    /// Λ^j.
    pub fn shift(window: (i64, i64), j: i64) -> Self {
        Self::from_diagonal(window, j, |_| S::one())
    }

    /// Σ_j c_j Λ^{±j} (`lower` picks Λ^{−j}), the series cut at the window width.
    pub fn toeplitz(window: (i64, i64), coeffs: &[S], lower: bool, infinite: bool) -> Self {
        let mut m = Self::zero(window);
        let width = m.size();
        for (j, c) in coeffs.iter().enumerate().take(width) {
            let off = if lower { -(j as i64) } else { j as i64 };
            m.set_diagonal(off, |_| c.clone());
        }
        if lower {
            m.infinite_below = infinite;
        } else {
            m.infinite_above = infinite;
        }
        m
    }

    fn set_diagonal(&mut self, j: i64, f: impl Fn(i64) -> S) {
        let (lo, hi) = self.window;
        let v: Vec<S> = (lo..=hi).map(|n| if (lo..=hi).contains(&(n + j)) { f(n) } else { S::zero() }).collect();
        if v.iter().any(|x| !x.is_zero()) {
            self.diagonals.insert(j, v);
        } else {
            self.diagonals.remove(&j);
        }
    }

    /// A_{m,n}, zero outside the window.
    pub fn get(&self, m: i64, n: i64) -> S {
        if !self.inside(m) || !self.inside(n) {
            return S::zero();
        }
        self.diagonals.get(&(n - m)).map_or_else(S::zero, |d| d[(m - self.window.0) as usize].clone())
    }

    /// a_j(n), the coefficient of Λ^j at row n.
    pub fn coefficient(&self, j: i64, n: i64) -> S {
        self.get(n, n + j)
    }

    pub fn valid_range(&self) -> (i64, i64) {
        (self.window.0 + self.valid_margin as i64, self.window.1 - self.valid_margin as i64)
    }

    /// Lower / upper bandwidth; `None` when unbounded.
    pub fn lower_width(&self) -> Option<usize> {
        if self.infinite_below {
            return None;
        }
        Some(self.diagonals.keys().next().map_or(0, |&j| (-j).max(0) as usize))
    }

    pub fn upper_width(&self) -> Option<usize> {
        if self.infinite_above {
            return None;
        }
        Some(self.diagonals.keys().next_back().map_or(0, |&j| j.max(0) as usize))
    }

    fn from_dense(window: (i64, i64), dense: Vec<Vec<S>>) -> Self {
        let mut m = Self::zero(window);
        let lo = window.0;
        let n = m.size() as i64;
        for j in -(n - 1)..n {
            m.set_diagonal(j, |r| dense[(r - lo) as usize][(r + j - lo) as usize].clone());
        }
        m
    }

    fn dense(&self) -> Vec<Vec<S>> {
        let n = self.size();
        let mut d = vec![vec![S::zero(); n]; n];
        for (&j, v) in &self.diagonals {
            for (i, x) in v.iter().enumerate() {
                let c = i as i64 + j;
                if (0..n as i64).contains(&c) {
                    d[i][c as usize] = x.clone();
                }
            }
        }
        d
    }

    /// Product with the sum over intermediate sites restricted to the window.
    /// The valid margin grows by the widest intermediate range that can leave
    /// the window; if that range is unbounded nothing remains valid.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.window, other.window, "window mismatch");
        let (lo, hi) = self.window;
        let mut out = Self::zero(self.window);
        for (&i, a) in &self.diagonals {
            for (&k, b) in &other.diagonals {
                let j = i + k;
                if j.unsigned_abs() as usize >= out.size() {
                    continue;
                }
                let entry = out.diagonals.entry(j).or_insert_with(|| vec![S::zero(); (hi - lo + 1) as usize]);
                for n in lo..=hi {
                    let mid = n + i;
                    if !(lo..=hi).contains(&mid) || !(lo..=hi).contains(&(mid + k)) {
                        continue;
                    }
                    let x = &a[(n - lo) as usize];
                    if x.is_zero() {
                        continue;
                    }
                    let t = x.clone() * &b[(mid - lo) as usize];
                    let e = &mut entry[(n - lo) as usize];
                    *e = e.clone() + &t;
                }
            }
        }
        out.diagonals.retain(|_, v| v.iter().any(|x| !x.is_zero()));
        let reach = |x: Option<usize>, y: Option<usize>| match (x, y) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        };
        let grow = match (reach(self.lower_width(), other.upper_width()), reach(self.upper_width(), other.lower_width())) {
            (Some(x), Some(y)) => x.max(y),
            _ => out.size(),
        };
        out.valid_margin = (self.valid_margin.max(other.valid_margin) + grow).min(out.size());
        out.infinite_below = self.infinite_below || other.infinite_below;
        out.infinite_above = self.infinite_above || other.infinite_above;
        out
    }

    pub fn mul_all(factors: &[&Self]) -> Self {
        let mut it = factors.iter();
        let first = (*it.next().expect("at least one factor")).clone();
        it.fold(first, |acc, f| acc.mul(f))
    }

    pub fn combine(&self, x: &S, other: &Self, y: &S) -> Self {
        assert_eq!(self.window, other.window, "window mismatch");
        let mut out = Self::zero(self.window);
        let keys: std::collections::BTreeSet<i64> = self.diagonals.keys().chain(other.diagonals.keys()).copied().collect();
        for j in keys {
            out.set_diagonal(j, |n| self.coefficient(j, n) * x + &(other.coefficient(j, n) * y));
        }
        out.valid_margin = self.valid_margin.max(other.valid_margin);
        out.infinite_below = self.infinite_below || other.infinite_below;
        out.infinite_above = self.infinite_above || other.infinite_above;
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(&S::one(), other, &S::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(&S::one(), other, &-S::one())
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = self.clone();
        for v in out.diagonals.values_mut() {
            for x in v.iter_mut() {
                *x = x.clone() * c;
            }
        }
        out.diagonals.retain(|_, v| v.iter().any(|x| !x.is_zero()));
        out
    }

    /// left(Δ) · A · right(Δ), entrywise A_{m,n} ↦ left(m) A_{m,n} right(n).
    pub fn conjugate_diagonal(&self, left: impl Fn(i64) -> S, right: impl Fn(i64) -> S) -> Self {
        let mut out = self.clone();
        let lo = self.window.0;
        for (&j, v) in out.diagonals.iter_mut() {
            for (i, x) in v.iter_mut().enumerate() {
                let n = lo + i as i64;
                if !x.is_zero() {
                    *x = left(n) * &*x * &right(n + j);
                }
            }
        }
        out
    }

    fn is_lower(&self) -> bool {
        self.diagonals.keys().all(|&j| j <= 0)
    }

    fn is_upper(&self) -> bool {
        self.diagonals.keys().all(|&j| j >= 0)
    }

    /// Inverse of a triangular matrix with invertible diagonal. Entries of the
    /// inverse inside the window depend only on window entries, so the margin
    /// is unchanged; the inverse is an unbounded series on the same side.
    pub fn triangular_inverse(&self) -> Self {
        let lower = self.is_lower();
        assert!(lower || self.is_upper(), "triangular_inverse needs a triangular matrix");
        let n = self.size();
        let a = self.dense();
        let mut inv = vec![vec![S::zero(); n]; n];
        for col in 0..n {
            let order: Vec<usize> = if lower { (col..n).collect() } else { (0..=col).rev().collect() };
            for &row in &order {
                let mut acc = if row == col { S::one() } else { S::zero() };
                let range: Vec<usize> = if lower { (col..row).collect() } else { (row + 1..=col).collect() };
                for k in range {
                    acc = acc - &(a[row][k].clone() * &inv[k][col]);
                }
                assert!(!a[row][row].is_zero(), "singular diagonal");
                inv[row][col] = acc / &a[row][row];
            }
        }
        let mut out = Self::from_dense(self.window, inv);
        out.valid_margin = self.valid_margin;
        let band = if lower { self.lower_width() } else { self.upper_width() };
        let unbounded = band != Some(0);
        if lower {
            out.infinite_below = unbounded;
        } else {
            out.infinite_above = unbounded;
        }
        out
    }

    /// (A)_{≥0}: the part on and above the diagonal.
    pub fn upper_part(&self) -> Self {
        let mut out = self.clone();
        out.diagonals.retain(|&j, _| j >= 0);
        out.infinite_below = false;
        out
    }

    /// (A)_{<0}: the part strictly below the diagonal.
    pub fn strictly_lower_part(&self) -> Self {
        let mut out = self.clone();
        out.diagonals.retain(|&j, _| j < 0);
        out.infinite_above = false;
        out
    }

    /// Offsets carrying a nonzero entry at some valid row (with valid column).
    pub fn valid_offsets(&self) -> Vec<i64> {
        let (vlo, vhi) = self.valid_range();
        self.diagonals
            .iter()
            .filter(|(&j, v)| (vlo..=vhi).any(|n| (vlo..=vhi).contains(&(n + j)) && !v[(n - self.window.0) as usize].is_zero()))
            .map(|(&j, _)| j)
            .collect()
    }

    pub fn ring(&self) -> &'static str {
        if S::EXACT {
            "exact"
        } else {
            "approx"
        }
    }
}

impl<S: Scalar> BandMatrix<S> {
    /// JSON with entries formatted by `fmt`, one list per offset indexed by
    /// row from the window's low end (`null` where the column leaves the window).
    fn json_with(&self, fmt: impl Fn(&S) -> Value) -> Value {
        let (lo, hi) = self.window;
        let diagonals: Vec<Value> = self
            .diagonals
            .iter()
            .map(|(&j, v)| {
                let entries: Vec<Value> = (lo..=hi)
                    .map(|n| if (lo..=hi).contains(&(n + j)) { fmt(&v[(n - lo) as usize]) } else { Value::Null })
                    .collect();
                json!({ "offset": j, "entries": entries })
            })
            .collect();
        json!({
            "schema": SCHEMA,
            "window": [lo, hi],
            "ring": self.ring(),
            "valid_margin": self.valid_margin,
            "diagonals": diagonals,
        })
    }
}

impl BandMatrix<Exact> {
    pub fn to_json(&self) -> Value {
        self.json_with(|x| Value::String(format_exact(x)))
    }

    pub fn to_approx(&self, bits: u32) -> BandMatrix<Approx> {
        BandMatrix {
            window: self.window,
            diagonals: self.diagonals.iter().map(|(&j, v)| (j, v.iter().map(|x| Approx::from_exact(x, bits)).collect())).collect(),
            valid_margin: self.valid_margin,
            infinite_below: self.infinite_below,
            infinite_above: self.infinite_above,
        }
    }
}

impl BandMatrix<Approx> {
    pub fn to_json(&self, precision_bits: u32) -> Value {
        let digits = (precision_bits as f64 * std::f64::consts::LOG10_2).floor() as usize;
        let mut v = self.json_with(|x| Value::String(x.to_sci(digits)));
        v["precision_bits"] = json!(precision_bits);
        v
    }
}
