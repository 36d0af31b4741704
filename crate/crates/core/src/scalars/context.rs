use super::{int, pow, Exact};
use crate::error::{Error, Result};
use num::{One, Signed, Zero};

/// Session parameters. The uniformizer `u` fixes `q = u^(2ab)`, so every
/// fractional power `q^(n/d)` with `d | 2ab` is an integer power of `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Context {
    pub a: u32,
    pub b: u32,
    pub u: Exact,
    pub p: Vec<Exact>,
    pub r: Vec<Exact>,
    /// Rational stand-in for the Kähler parameter in the matrix picture.
    pub q0: Exact,
    pub q_degree: usize,
    pub fock_cutoff: usize,
    pub jet_order: u32,
    /// Number of active couplings t_1..t_K (and t̄_1..t̄_K).
    pub jet_symbols: usize,
    pub precision_bits: u32,
    pub tail_cutoff: usize,
    /// Lattice window [lo, hi] for band-matrix computations.
    pub window: (i64, i64),
}

impl Context {
    /// Desk-scale defaults: trivial p, r (all ones), Q₀ = 1/2.
    pub fn new(a: u32, b: u32, u: Exact) -> Result<Self> {
        let ctx = Context {
            a,
            b,
            u,
            p: vec![int(1); a as usize],
            r: vec![int(1); b as usize],
            q0: Exact::new(1.into(), 2.into()),
            q_degree: 6,
            fock_cutoff: 16,
            jet_order: 1,
            jet_symbols: 3,
            precision_bits: 256,
            tail_cutoff: 40,
            window: (-12, 12),
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn with_params(mut self, p: Vec<Exact>, r: Vec<Exact>) -> Result<Self> {
        self.p = p;
        self.r = r;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidContext(m));
        if self.a == 0 || self.b == 0 {
            return bad(format!("orbifold degrees must be positive, got ({}, {})", self.a, self.b));
        }
        if self.u.is_zero() || self.u.abs().is_one() {
            return bad(format!("uniformizer u = {} must differ from 0 and ±1", self.u));
        }
        if self.p.len() != self.a as usize || self.r.len() != self.b as usize {
            return bad(format!(
                "expected {} p-parameters and {} r-parameters, got {} and {}",
                self.a,
                self.b,
                self.p.len(),
                self.r.len()
            ));
        }
        if let Some(x) = self.p.iter().chain(&self.r).find(|x| x.is_zero()) {
            return bad(format!("parameter {x} must be nonzero"));
        }
        if self.q0.is_zero() {
            return bad("Q0 must be nonzero".into());
        }
        if self.precision_bits == 0 || self.tail_cutoff == 0 {
            return bad("precision_bits and tail_cutoff must be positive".into());
        }
        if self.window.0 > self.window.1 {
            return bad(format!("empty window [{}, {}]", self.window.0, self.window.1));
        }
        Ok(())
    }

    pub fn two_ab(&self) -> i64 {
        2 * self.a as i64 * self.b as i64
    }

    /// `u^e`.
    pub fn upow(&self, e: i64) -> Exact {
        pow(&self.u, e)
    }

    pub fn q(&self) -> Exact {
        self.upow(self.two_ab())
    }

    /// `q^e` for integer `e`.
    pub fn qi(&self, e: i64) -> Exact {
        self.upow(self.two_ab() * e)
    }

    /// Exponent of `u` representing `q^(num/den)`.
    pub fn u_exponent(&self, num: i64, den: i64) -> Result<i64> {
        let m = self.two_ab();
        if den == 0 || m % den != 0 {
            return Err(Error::FractionalPower { num, den, modulus: m });
        }
        Ok(num * (m / den))
    }

    /// `q^(num/den)`, exactly; `den` must divide `2ab`.
    pub fn qpow(&self, num: i64, den: i64) -> Result<Exact> {
        Ok(self.upow(self.u_exponent(num, den)?))
    }

    /// `1 - q^k`, nonzero for `k != 0` by the context invariant.
    pub fn one_minus_qk(&self, k: i64) -> Exact {
        int(1) - self.qi(k)
    }

    /// P_i = p_i / p_{i+1}, i = 1..a-1.
    pub fn cap_p(&self, i: usize) -> Exact {
        &self.p[i - 1] / &self.p[i]
    }

    /// R_j = r_j / r_{j+1}, j = 1..b-1.
    pub fn cap_r(&self, j: usize) -> Exact {
        &self.r[j - 1] / &self.r[j]
    }

    /// Q^(k) for k = 1..a+b: Q^(i) = P_1⋯P_{i-1} (i ≤ a),
    /// Q^(a+1) = P_1⋯P_{a-1}Q₀, Q^(a+j) = Q^(a+1) R_{b-1}⋯R_{b-j+1}.
    pub fn cap_q(&self, k: usize) -> Exact {
        let (a, b) = (self.a as usize, self.b as usize);
        assert!((1..=a + b).contains(&k), "Q^({k}) out of range");
        let pprod = |n: usize| (1..n).fold(int(1), |acc, i| acc * self.cap_p(i));
        if k <= a {
            return pprod(k);
        }
        let j = k - a;
        let mut v = pprod(a) * &self.q0;
        for i in 0..j - 1 {
            v *= self.cap_r(b - 1 - i);
        }
        v
    }

    /// P_1⋯P_{a-1} Q₀ R_{b-1}⋯R_1, the diagonal monomial between the two halves.
    pub fn middle_monomial(&self) -> Exact {
        let mut v = self.q0.clone();
        for i in 1..self.a as usize {
            v *= self.cap_p(i);
        }
        for j in 1..self.b as usize {
            v *= self.cap_r(j);
        }
        v
    }

    /// Parameters rescaled so that p_a = r_b = 1.
    pub fn normalized(&self) -> Context {
        let pa = self.p.last().unwrap().clone();
        let rb = self.r.last().unwrap().clone();
        let mut c = self.clone();
        c.p = self.p.iter().map(|x| x / &pa).collect();
        c.r = self.r.iter().map(|x| x / &rb).collect();
        c
    }

    pub fn is_normalized(&self) -> bool {
        self.p.last().unwrap().is_one() && self.r.last().unwrap().is_one()
    }

    /// |u| < 1, required wherever infinite resummation is involved.
    pub fn is_convergent(&self) -> bool {
        self.u.abs() < int(1)
    }

    pub fn require_convergent(&self, op: &'static str) -> Result<()> {
        if self.is_convergent() {
            Ok(())
        } else {
            crate::error::precondition(op, format!("needs |u| < 1, got u = {}", self.u))
        }
    }
}
